#pragma once

// Reference computations for the tests. Nothing here calls into the library
// beyond reading the subset ordering, so agreement is meaningful.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace oracle {

struct Fraction {
  long long num = 0;
  long long den = 1;

  Fraction() = default;
  Fraction(long long n, long long d = 1) : num(n), den(d) { reduce(); }

  void reduce() {
    if (den == 0) throw std::domain_error("zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  bool is_zero() const { return num == 0; }
  bool is_integer() const { return den == 1; }

  friend Fraction operator+(Fraction a, Fraction b) {
    return {a.num * b.den + b.num * a.den, a.den * b.den};
  }
  friend Fraction operator-(Fraction a, Fraction b) {
    return {a.num * b.den - b.num * a.den, a.den * b.den};
  }
  friend Fraction operator*(Fraction a, Fraction b) { return {a.num * b.num, a.den * b.den}; }
  friend Fraction operator/(Fraction a, Fraction b) {
    if (b.num == 0) throw std::domain_error("division by zero");
    return {a.num * b.den, a.den * b.num};
  }
};

using RationalMatrix = std::vector<std::vector<Fraction>>;
using IntegerMatrix = std::vector<std::vector<long long>>;

inline bool subset_of(std::uint64_t inner, std::uint64_t outer) { return (inner & ~outer) == 0; }

// Rows and columns indexed by `subsets`; entry (A, B) is 1 iff B is in A.
inline IntegerMatrix inclusion_matrix(const std::vector<std::uint64_t>& subsets) {
  const std::size_t p = subsets.size();
  IntegerMatrix f(p, std::vector<long long>(p, 0));
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < p; ++b) f[a][b] = subset_of(subsets[b], subsets[a]) ? 1 : 0;
  }
  return f;
}

// Gauss-Jordan elimination over the rationals with row pivoting.
inline std::optional<RationalMatrix> inverse(const IntegerMatrix& a) {
  const std::size_t n = a.size();
  RationalMatrix work(n, std::vector<Fraction>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) work[i][j] = Fraction(a[i][j]);
    work[i][n + i] = Fraction(1);
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && work[pivot][col].is_zero()) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(work[pivot], work[col]);
    const Fraction lead = work[col][col];
    for (auto& v : work[col]) v = v / lead;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || work[r][col].is_zero()) continue;
      const Fraction factor = work[r][col];
      for (std::size_t j = 0; j < 2 * n; ++j) work[r][j] = work[r][j] - factor * work[col][j];
    }
  }
  RationalMatrix out(n, std::vector<Fraction>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i][j] = work[i][n + j];
  }
  return out;
}

// f(x)_A = 1 iff A is contained in the support of x.
inline std::vector<long long> regression(std::uint64_t x, const std::vector<std::uint64_t>& subsets) {
  std::vector<long long> f(subsets.size());
  for (std::size_t i = 0; i < subsets.size(); ++i) f[i] = subset_of(subsets[i], x) ? 1 : 0;
  return f;
}

// (F^{-1})^T f, with F^{-1} from `inverse`.
inline std::vector<Fraction> transposed_inverse_times(const RationalMatrix& inv,
                                                      const std::vector<long long>& f) {
  const std::size_t n = f.size();
  std::vector<Fraction> out(n);
  for (std::size_t a = 0; a < n; ++a) {
    Fraction sum(0);
    for (std::size_t b = 0; b < n; ++b) {
      if (f[b] != 0) sum = sum + inv[b][a] * Fraction(f[b]);
    }
    out[a] = sum;
  }
  return out;
}

// Pascal's triangle, independent of the library's binomial.
inline std::vector<std::vector<long long>> pascal(int n_max) {
  std::vector<std::vector<long long>> c(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    c[static_cast<std::size_t>(n)].assign(static_cast<std::size_t>(n) + 1, 1);
    for (int r = 1; r < n; ++r) {
      c[static_cast<std::size_t>(n)][static_cast<std::size_t>(r)] =
          c[static_cast<std::size_t>(n) - 1][static_cast<std::size_t>(r) - 1] +
          c[static_cast<std::size_t>(n) - 1][static_cast<std::size_t>(r)];
    }
  }
  return c;
}

// The two symmetric-slice polynomials at k = 4, d = 2, typed out by hand.
inline double slice_c3(double s, double t) {
  return s * s * s * t * t * t + 3 * s * s * t * t * t + 3 * s * s * s * t * t;
}
inline double slice_c4(double s, double t) {
  return 9 * std::pow(s, 4) * std::pow(t, 6) + 16 * std::pow(s, 3) * std::pow(t, 6) +
         6 * std::pow(s, 4) * std::pow(t, 5);
}

// det of the Example-style 3x3 slice for k = 2, d = 1 in coordinates
// (x, y, z) toward the vertices (1,0), (0,1), (1,1), entered entrywise.
inline double two_rule_slice_det(double l1, double l2, double x, double y, double z) {
  const double a = 1 + x * (l1 - 1) + y * (l2 - 1) + z * (l1 * l2 - 1);
  const double b = x * l1 + z * l1 * l2;
  const double c = y * l2 + z * l1 * l2;
  const double e = z * l1 * l2;
  // [[a, b, c], [b, b, e], [c, e, c]]
  return a * (b * c - e * e) - b * (b * c - e * c) + c * (b * e - b * c);
}

}  // namespace oracle
