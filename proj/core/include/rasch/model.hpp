#pragma once

// Rasch Poisson counts model with interaction order d: rule settings,
// parameters, designs, Fisher information and the exact subset-inclusion
// matrices used by the corner-design analysis.

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace rasch {

// Subsets of {1..k} are bitmasks: bit i-1 is set iff rule i is a member.
using Subset = std::uint64_t;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IntVector = Eigen::Matrix<long long, Eigen::Dynamic, 1>;
using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr int kMaxRules = 63;
// Operations that enumerate {0,1}^k refuse larger k.
inline constexpr int kMaxEnumeratedRules = 20;

// Binomial coefficient over the integers. r < 0 gives 0. For n < 0 the
// generalized value (-1)^r C(r-n-1, r) is returned, so C(-1, r) = (-1)^r.
long long binomial(long long n, long long r);

int cardinality(Subset s);
bool is_subset(Subset inner, Subset outer);
// All c-element subsets of {1..k} in lexicographic order of sorted elements.
std::vector<Subset> subsets_with_cardinality(int k, int c);

// "1,2,4" for {1,2,4}; the empty string for the empty set.
std::string subset_label(Subset s);
Subset parse_subset_label(const std::string& label, int k);

class BinarySetting {
 public:
  BinarySetting() = default;
  BinarySetting(int k, Subset mask);

  // Bit string with character i holding x_{i+1}, e.g. "110" is (1,1,0).
  static BinarySetting from_string(const std::string& bits);
  static BinarySetting from_bits(std::span<const int> bits);

  int k() const { return k_; }
  Subset mask() const { return mask_; }
  // A(x) = {i : x_i = 1}; the same bitmask viewed as a subset.
  Subset support() const { return mask_; }
  int ones() const { return cardinality(mask_); }
  bool operator[](int i) const { return (mask_ >> i) & 1U; }
  std::string to_string() const;

  auto operator<=>(const BinarySetting&) const = default;

 private:
  int k_ = 0;
  Subset mask_ = 0;
};

class InteractionModel {
 public:
  InteractionModel(int k, int d);

  int k() const { return k_; }
  int d() const { return d_; }
  std::size_t p() const { return index_set_.size(); }

  // Subsets with |A| <= d ordered by cardinality, then lexicographically by
  // sorted elements: {}, {1}, .., {k}, {1,2}, {1,3}, ..
  const std::vector<Subset>& index_set() const { return index_set_; }
  Subset subset(std::size_t i) const { return index_set_[i]; }
  std::size_t index_of(Subset a) const;
  bool contains(Subset a) const { return position_.contains(a); }

  // Throws SizeGuardExceeded if 2^k settings cannot be enumerated.
  void require_enumerable() const;
  std::uint64_t num_settings() const;

  bool operator==(const InteractionModel& other) const {
    return k_ == other.k_ && d_ == other.d_;
  }

 private:
  int k_;
  int d_;
  std::vector<Subset> index_set_;
  std::unordered_map<Subset, std::size_t> position_;
};

// Log-scale parameters beta_A aligned with a model's index set.
class ParameterVector {
 public:
  ParameterVector() = default;
  explicit ParameterVector(const InteractionModel& m);
  ParameterVector(const InteractionModel& m, std::vector<double> beta);

  static ParameterVector from_mu(const InteractionModel& m,
                                 std::span<const double> mu);

  std::size_t size() const { return beta_.size(); }
  double beta(std::size_t i) const { return beta_[i]; }
  double mu(std::size_t i) const;
  std::span<const double> betas() const { return beta_; }
  Eigen::Map<const Vector> as_vector() const {
    return {beta_.data(), static_cast<Eigen::Index>(beta_.size())};
  }
  void set_beta(std::size_t i, double value);

  // True when beta_{} = 0.
  bool normalized() const { return !beta_.empty() && beta_[0] == 0.0; }
  ParameterVector with_zero_offset() const;

  void check_model(const InteractionModel& m) const;

 private:
  std::vector<double> beta_;
};

// mu_A = mu_by_cardinality[|A| - 1] for every nonempty A, mu_{} = 1.
// Missing cardinalities default to mu = 1.
ParameterVector symmetric_parameters(const InteractionModel& m,
                                     std::span<const double> mu_by_cardinality);

class Design {
 public:
  Design() = default;
  // Zero weights are dropped; the rest must be positive and sum to 1
  // within 1e-12.
  Design(int k, std::map<Subset, double> weights);

  // Rescales positive weights to unit mass.
  static Design normalized(int k, std::map<Subset, double> weights);
  static Design uniform(int k);
  static Design point(int k, Subset x);

  int k() const { return k_; }
  const std::map<Subset, double>& weights() const { return weights_; }
  std::size_t support_size() const { return weights_.size(); }
  double weight(Subset x) const;
  bool in_support(Subset x) const { return weights_.contains(x); }

  bool operator==(const Design&) const = default;

 private:
  int k_ = 0;
  std::map<Subset, double> weights_;
};

// Dense symmetric matrix stored as its packed lower triangle.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim);

  // Takes the lower triangle of `m`.
  static SymMatrix from_dense(const Matrix& m);

  std::size_t dim() const { return dim_; }
  double operator()(std::size_t i, std::size_t j) const {
    return packed_[offset(i, j)];
  }
  void set(std::size_t i, std::size_t j, double value) {
    packed_[offset(i, j)] = value;
  }
  std::span<const double> packed() const { return packed_; }

  // this += scale * v v^T
  void add_rank_one(double scale, const Vector& v);
  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator-=(const SymMatrix& other);
  SymMatrix& operator*=(double s);
  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

  Matrix dense() const;
  double trace() const;
  double max_abs() const;
  // Frobenius inner product <A, B> = trace(A B).
  double frobenius_dot(const SymMatrix& other) const;
  // Packed coordinates scaled so the Euclidean norm is the Frobenius norm.
  Vector vectorized() const;

 private:
  static std::size_t offset(std::size_t i, std::size_t j) {
    return i >= j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i;
  }

  std::size_t dim_ = 0;
  std::vector<double> packed_;
};

// Calls f(BinarySetting) for every x in {0,1}^k in bitmask order.
template <typename F>
void for_each_setting(const InteractionModel& m, F&& f) {
  m.require_enumerable();
  const std::uint64_t n = m.num_settings();
  for (std::uint64_t mask = 0; mask < n; ++mask) f(BinarySetting(m.k(), mask));
}

Vector regression_vector(const BinarySetting& x, const InteractionModel& m);
IntVector integer_regression_vector(const BinarySetting& x,
                                    const InteractionModel& m);

// Sum of beta_A over A subset of A(x), |A| <= d.
double log_intensity(const BinarySetting& x, const ParameterVector& theta,
                     const InteractionModel& m);
double intensity(const BinarySetting& x, const ParameterVector& theta,
                 const InteractionModel& m);
// lambda(x) for all settings, indexed by bitmask.
std::vector<double> all_intensities(const ParameterVector& theta,
                                    const InteractionModel& m);

// M(w, beta) = sum_x w_x lambda(x) f(x) f(x)^T
SymMatrix fisher_information(const Design& w, const ParameterVector& theta,
                             const InteractionModel& m);

// F_{A,B} = 1 iff B is a subset of A; rows and columns follow index_set().
IntMatrix model_matrix(const InteractionModel& m);
// Closed form (-1)^{|A|-|B|} [B subset of A].
IntMatrix inverse_model_matrix(const InteractionModel& m);
// F^{-T} f(x) from the closed-form binomial expression.
IntVector transform_vector(const BinarySetting& x, const InteractionModel& m);

}  // namespace rasch
