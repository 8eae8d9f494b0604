#include "rasch/model.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rasch/errors.hpp"

namespace rasch {

namespace {
__extension__ using WideInt = __int128;
}  // namespace

long long binomial(long long n, long long r) {
  if (r < 0) return 0;
  if (n < 0) {
    const long long value = binomial(r - n - 1, r);
    return (r % 2 == 0) ? value : -value;
  }
  if (r > n) return 0;
  r = std::min(r, n - r);
  WideInt result = 1;
  for (long long i = 1; i <= r; ++i) {
    // Exact at every step: result * (n - r + i) is divisible by i.
    result = result * (n - r + i) / i;
  }
  return static_cast<long long>(result);
}

int cardinality(Subset s) { return std::popcount(s); }

bool is_subset(Subset inner, Subset outer) { return (inner & ~outer) == 0; }

std::vector<Subset> subsets_with_cardinality(int k, int c) {
  std::vector<Subset> out;
  if (c < 0 || c > k) return out;
  std::vector<int> combo(static_cast<std::size_t>(c));
  std::iota(combo.begin(), combo.end(), 0);
  while (true) {
    Subset s = 0;
    for (int e : combo) s |= Subset{1} << e;
    out.push_back(s);
    int i = c - 1;
    while (i >= 0 && combo[static_cast<std::size_t>(i)] == k - c + i) --i;
    if (i < 0) break;
    ++combo[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < c; ++j) {
      combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

std::string subset_label(Subset s) {
  std::string out;
  for (int i = 0; i < 64; ++i) {
    if ((s >> i) & 1U) {
      if (!out.empty()) out += ',';
      out += std::to_string(i + 1);
    }
  }
  return out;
}

Subset parse_subset_label(const std::string& label, int k) {
  Subset s = 0;
  if (label.empty()) return s;
  std::stringstream ss(label);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int rule = 0;
    try {
      rule = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("bad subset label '" + label + "'");
    }
    if (used != item.size() || rule < 1 || rule > k) {
      throw InvalidArgument("bad subset label '" + label + "' for k=" +
                            std::to_string(k));
    }
    const Subset bit = Subset{1} << (rule - 1);
    if (s & bit) throw InvalidArgument("repeated rule in '" + label + "'");
    s |= bit;
  }
  return s;
}

BinarySetting::BinarySetting(int k, Subset mask) : k_(k), mask_(mask) {
  if (k < 0 || k > kMaxRules) throw InvalidArgument("setting length out of range");
  if (k < 64 && (mask >> k) != 0) {
    throw DimensionMismatch("setting has bits beyond k=" + std::to_string(k));
  }
}

BinarySetting BinarySetting::from_string(const std::string& bits) {
  if (bits.size() > static_cast<std::size_t>(kMaxRules)) {
    throw InvalidArgument("setting string too long");
  }
  Subset mask = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      mask |= Subset{1} << i;
    } else if (bits[i] != '0') {
      throw InvalidArgument("setting string must be binary: '" + bits + "'");
    }
  }
  return {static_cast<int>(bits.size()), mask};
}

BinarySetting BinarySetting::from_bits(std::span<const int> bits) {
  Subset mask = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1) throw InvalidArgument("bits must be 0 or 1");
    if (bits[i] == 1) mask |= Subset{1} << i;
  }
  return {static_cast<int>(bits.size()), mask};
}

std::string BinarySetting::to_string() const {
  std::string out(static_cast<std::size_t>(k_), '0');
  for (int i = 0; i < k_; ++i) {
    if ((*this)[i]) out[static_cast<std::size_t>(i)] = '1';
  }
  return out;
}

InteractionModel::InteractionModel(int k, int d) : k_(k), d_(d) {
  if (k < 1 || k > kMaxRules) {
    throw InvalidArgument("k must be in [1, " + std::to_string(kMaxRules) + "]");
  }
  if (d < 1 || d > k) throw InvalidArgument("d must satisfy 1 <= d <= k");

  for (int c = 0; c <= d; ++c) {
    const auto layer = subsets_with_cardinality(k, c);
    index_set_.insert(index_set_.end(), layer.begin(), layer.end());
  }
  position_.reserve(index_set_.size());
  for (std::size_t i = 0; i < index_set_.size(); ++i) position_[index_set_[i]] = i;
}

std::size_t InteractionModel::index_of(Subset a) const {
  auto it = position_.find(a);
  if (it == position_.end()) {
    throw InvalidArgument("subset {" + subset_label(a) + "} is not a model index");
  }
  return it->second;
}

void InteractionModel::require_enumerable() const {
  if (k_ > kMaxEnumeratedRules) {
    throw SizeGuardExceeded("k=" + std::to_string(k_) + " exceeds the limit of " +
                            std::to_string(kMaxEnumeratedRules) +
                            " rules for enumerating all settings");
  }
}

std::uint64_t InteractionModel::num_settings() const {
  require_enumerable();
  return std::uint64_t{1} << k_;
}

ParameterVector::ParameterVector(const InteractionModel& m) : beta_(m.p(), 0.0) {}

ParameterVector::ParameterVector(const InteractionModel& m, std::vector<double> beta)
    : beta_(std::move(beta)) {
  check_model(m);
  for (double b : beta_) {
    if (!std::isfinite(b)) throw InvalidArgument("parameters must be finite");
  }
}

ParameterVector ParameterVector::from_mu(const InteractionModel& m,
                                         std::span<const double> mu) {
  if (mu.size() != m.p()) throw DimensionMismatch("mu has wrong length");
  std::vector<double> beta(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!(mu[i] > 0.0)) throw InvalidArgument("mu must be positive");
    beta[i] = std::log(mu[i]);
  }
  return {m, std::move(beta)};
}

double ParameterVector::mu(std::size_t i) const { return std::exp(beta_[i]); }

void ParameterVector::set_beta(std::size_t i, double value) {
  if (!std::isfinite(value)) throw InvalidArgument("parameters must be finite");
  beta_.at(i) = value;
}

ParameterVector ParameterVector::with_zero_offset() const {
  ParameterVector out = *this;
  if (!out.beta_.empty()) out.beta_[0] = 0.0;
  return out;
}

void ParameterVector::check_model(const InteractionModel& m) const {
  if (beta_.size() != m.p()) {
    throw DimensionMismatch("parameter vector has " + std::to_string(beta_.size()) +
                            " entries, model needs " + std::to_string(m.p()));
  }
}

ParameterVector symmetric_parameters(const InteractionModel& m,
                                     std::span<const double> mu_by_cardinality) {
  std::vector<double> beta(m.p(), 0.0);
  for (std::size_t i = 1; i < m.p(); ++i) {
    const auto c = static_cast<std::size_t>(cardinality(m.subset(i)));
    if (c <= mu_by_cardinality.size()) {
      const double mu = mu_by_cardinality[c - 1];
      if (!(mu > 0.0)) throw InvalidArgument("symmetric mu values must be positive");
      beta[i] = std::log(mu);
    }
  }
  return {m, std::move(beta)};
}

namespace {

void check_weights(int k, const std::map<Subset, double>& weights) {
  if (k < 1 || k > kMaxEnumeratedRules) {
    throw InvalidArgument("design k out of range");
  }
  for (const auto& [x, w] : weights) {
    if ((x >> k) != 0) throw DimensionMismatch("design setting beyond k");
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw InvalidArgument("design weights must be positive and finite");
    }
  }
}

}  // namespace

Design::Design(int k, std::map<Subset, double> weights) : k_(k) {
  std::erase_if(weights, [](const auto& kv) { return kv.second == 0.0; });
  check_weights(k, weights);
  double total = 0.0;
  for (const auto& kv : weights) total += kv.second;
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgument("design weights sum to " + std::to_string(total));
  }
  weights_ = std::move(weights);
}

Design Design::normalized(int k, std::map<Subset, double> weights) {
  std::erase_if(weights, [](const auto& kv) { return kv.second == 0.0; });
  check_weights(k, weights);
  if (weights.empty()) throw InvalidArgument("design has no support");
  double total = 0.0;
  for (const auto& kv : weights) total += kv.second;
  for (auto& kv : weights) kv.second /= total;
  Design out;
  out.k_ = k;
  out.weights_ = std::move(weights);
  return out;
}

Design Design::uniform(int k) {
  if (k < 1 || k > kMaxEnumeratedRules) throw SizeGuardExceeded("uniform design k out of range");
  const std::uint64_t n = std::uint64_t{1} << k;
  std::map<Subset, double> weights;
  for (std::uint64_t x = 0; x < n; ++x) weights.emplace_hint(weights.end(), x, 1.0 / static_cast<double>(n));
  return {k, std::move(weights)};
}

Design Design::point(int k, Subset x) { return {k, {{x, 1.0}}}; }

double Design::weight(Subset x) const {
  auto it = weights_.find(x);
  return it == weights_.end() ? 0.0 : it->second;
}

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim), packed_(dim * (dim + 1) / 2, 0.0) {}

SymMatrix SymMatrix::from_dense(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("matrix is not square");
  SymMatrix out(static_cast<std::size_t>(m.rows()));
  for (std::size_t i = 0; i < out.dim_; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      out.set(i, j, m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
  }
  return out;
}

void SymMatrix::add_rank_one(double scale, const Vector& v) {
  if (static_cast<std::size_t>(v.size()) != dim_) throw DimensionMismatch("rank-one update size");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double si = scale * v(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j <= i; ++j) packed_[idx++] += si * v(static_cast<Eigen::Index>(j));
  }
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  if (other.dim_ != dim_) throw DimensionMismatch("matrix sum size");
  for (std::size_t i = 0; i < packed_.size(); ++i) packed_[i] += other.packed_[i];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
  if (other.dim_ != dim_) throw DimensionMismatch("matrix difference size");
  for (std::size_t i = 0; i < packed_.size(); ++i) packed_[i] -= other.packed_[i];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  for (double& v : packed_) v *= s;
  return *this;
}

Matrix SymMatrix::dense() const {
  const auto n = static_cast<Eigen::Index>(dim_);
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = (*this)(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (double v : packed_) m = std::max(m, std::abs(v));
  return m;
}

double SymMatrix::frobenius_dot(const SymMatrix& other) const {
  if (other.dim_ != dim_) throw DimensionMismatch("inner product size");
  double s = 0.0;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j <= i; ++j, ++idx) {
      const double prod = packed_[idx] * other.packed_[idx];
      s += (i == j) ? prod : 2.0 * prod;
    }
  }
  return s;
}

Vector SymMatrix::vectorized() const {
  Vector out(static_cast<Eigen::Index>(packed_.size()));
  std::size_t idx = 0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j <= i; ++j, ++idx) {
      out(static_cast<Eigen::Index>(idx)) =
          (i == j) ? packed_[idx] : std::sqrt(2.0) * packed_[idx];
    }
  }
  return out;
}

namespace {

void check_setting(const BinarySetting& x, const InteractionModel& m) {
  if (x.k() != m.k()) {
    throw DimensionMismatch("setting has length " + std::to_string(x.k()) +
                            ", model has k=" + std::to_string(m.k()));
  }
}

}  // namespace

Vector regression_vector(const BinarySetting& x, const InteractionModel& m) {
  check_setting(x, m);
  Vector f(static_cast<Eigen::Index>(m.p()));
  for (std::size_t i = 0; i < m.p(); ++i) {
    f(static_cast<Eigen::Index>(i)) = is_subset(m.subset(i), x.support()) ? 1.0 : 0.0;
  }
  return f;
}

IntVector integer_regression_vector(const BinarySetting& x, const InteractionModel& m) {
  check_setting(x, m);
  IntVector f(static_cast<Eigen::Index>(m.p()));
  for (std::size_t i = 0; i < m.p(); ++i) {
    f(static_cast<Eigen::Index>(i)) = is_subset(m.subset(i), x.support()) ? 1 : 0;
  }
  return f;
}

double log_intensity(const BinarySetting& x, const ParameterVector& theta,
                     const InteractionModel& m) {
  check_setting(x, m);
  theta.check_model(m);
  double s = 0.0;
  for (std::size_t i = 0; i < m.p(); ++i) {
    if (is_subset(m.subset(i), x.support())) s += theta.beta(i);
  }
  return s;
}

double intensity(const BinarySetting& x, const ParameterVector& theta,
                 const InteractionModel& m) {
  return std::exp(log_intensity(x, theta, m));
}

std::vector<double> all_intensities(const ParameterVector& theta,
                                    const InteractionModel& m) {
  theta.check_model(m);
  std::vector<double> out;
  out.reserve(m.num_settings());
  for_each_setting(m, [&](const BinarySetting& x) {
    out.push_back(std::exp(log_intensity(x, theta, m)));
  });
  return out;
}

SymMatrix fisher_information(const Design& w, const ParameterVector& theta,
                             const InteractionModel& m) {
  theta.check_model(m);
  if (w.k() != m.k()) throw DimensionMismatch("design k does not match model");
  SymMatrix info(m.p());
  for (const auto& [mask, weight] : w.weights()) {
    const BinarySetting x(m.k(), mask);
    info.add_rank_one(weight * intensity(x, theta, m), regression_vector(x, m));
  }
  return info;
}

IntMatrix model_matrix(const InteractionModel& m) {
  const auto p = static_cast<Eigen::Index>(m.p());
  IntMatrix f = IntMatrix::Zero(p, p);
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) {
      if (is_subset(m.subset(static_cast<std::size_t>(b)), m.subset(static_cast<std::size_t>(a)))) {
        f(a, b) = 1;
      }
    }
  }
  return f;
}

IntMatrix inverse_model_matrix(const InteractionModel& m) {
  const auto p = static_cast<Eigen::Index>(m.p());
  IntMatrix inv = IntMatrix::Zero(p, p);
  for (Eigen::Index a = 0; a < p; ++a) {
    const Subset sa = m.subset(static_cast<std::size_t>(a));
    for (Eigen::Index b = 0; b <= a; ++b) {
      const Subset sb = m.subset(static_cast<std::size_t>(b));
      if (is_subset(sb, sa)) {
        inv(a, b) = ((cardinality(sa) - cardinality(sb)) % 2 == 0) ? 1 : -1;
      }
    }
  }
  return inv;
}

IntVector transform_vector(const BinarySetting& x, const InteractionModel& m) {
  check_setting(x, m);
  const int n = x.ones();
  IntVector out = IntVector::Zero(static_cast<Eigen::Index>(m.p()));
  for (std::size_t i = 0; i < m.p(); ++i) {
    const Subset a = m.subset(i);
    if (!is_subset(a, x.support())) continue;
    const int size_a = cardinality(a);
    const int r = m.d() - size_a;
    // For |A(x)| <= d this yields the unit vector e_{A(x)}: C(-1, r) = (-1)^r.
    const long long c = binomial(n - size_a - 1, r);
    out(static_cast<Eigen::Index>(i)) = (r % 2 == 0) ? c : -c;
  }
  return out;
}

}  // namespace rasch
