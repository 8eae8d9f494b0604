#include "rasch/optimality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "rasch/errors.hpp"
#include "rasch/format.hpp"
#include "rasch/parallel.hpp"

namespace rasch {

Design corner_design(const InteractionModel& m) {
  m.require_enumerable();
  std::map<Subset, double> weights;
  const double w = 1.0 / static_cast<double>(m.p());
  for (Subset a : m.index_set()) weights.emplace(a, w);
  return Design::normalized(m.k(), std::move(weights));
}

MonomialInequality corner_inequality(const InteractionModel& m, Subset c, ProductRule rule) {
  if (m.k() < 64 && (c >> m.k()) != 0) throw DimensionMismatch("label beyond k");
  const int size_c = cardinality(c);
  if (size_c <= m.d()) throw InvalidArgument("inequalities need |C| > d");

  std::vector<std::size_t> below;  // model indices A with A subset of C
  for (std::size_t i = 0; i < m.p(); ++i) {
    if (is_subset(m.subset(i), c)) below.push_back(i);
  }

  MonomialInequality q;
  q.label = c;
  q.terms.reserve(below.size());
  for (std::size_t b_index : below) {
    const Subset b = m.subset(b_index);
    const int size_b = cardinality(b);
    const long long coeff = binomial(size_c - size_b - 1, m.d() - size_b);
    MonomialTerm term;
    term.coefficient = coeff * coeff;
    term.omitted = b;
    for (std::size_t a_index : below) {
      const Subset a = m.subset(a_index);
      const bool keep = rule == ProductRule::kAsStated ? a != b : !is_subset(a, b);
      if (keep) term.support.push_back(a_index);
    }
    q.terms.push_back(std::move(term));
  }
  return q;
}

std::vector<MonomialInequality> corner_inequalities(const InteractionModel& m, ProductRule rule) {
  std::vector<MonomialInequality> out;
  for (int c = m.d() + 1; c <= m.k(); ++c) {
    for (Subset label : subsets_with_cardinality(m.k(), c)) {
      out.push_back(corner_inequality(m, label, rule));
    }
  }
  return out;
}

double evaluate_inequality(const MonomialInequality& q, const ParameterVector& theta) {
  double total = 0.0;
  for (const MonomialTerm& term : q.terms) {
    double log_term = 0.0;
    for (std::size_t a : term.support) log_term += theta.beta(a);
    total += static_cast<double>(term.coefficient) * std::exp(log_term);
  }
  return total;
}

OptimalityVerdict is_corner_optimal_by_theorem(const ParameterVector& theta,
                                               const InteractionModel& m, ProductRule rule) {
  theta.check_model(m);
  const ParameterVector normalized = theta.with_zero_offset();
  OptimalityVerdict verdict;
  verdict.optimal = true;
  verdict.max_directional_value = 0.0;
  verdict.worst_setting = BinarySetting(m.k(), 0);
  for (int c = m.d() + 1; c <= m.k(); ++c) {
    for (Subset label : subsets_with_cardinality(m.k(), c)) {
      const double lhs = evaluate_inequality(corner_inequality(m, label, rule), normalized);
      if (lhs > verdict.max_directional_value) {
        verdict.max_directional_value = lhs;
        verdict.worst_setting = BinarySetting(m.k(), label);
      }
      if (lhs > 1.0 + kTheoremTolerance) {
        verdict.optimal = false;
        verdict.violated_labels.push_back(label);
      } else if (lhs >= 1.0 - kTheoremTolerance) {
        verdict.boundary = true;
      }
    }
  }
  return verdict;
}

namespace {

Eigen::LLT<Matrix> factor_information(const Design& w, const ParameterVector& theta,
                                      const InteractionModel& m) {
  const Matrix info = fisher_information(w, theta, m).dense();
  Eigen::LLT<Matrix> llt(info);
  if (llt.info() != Eigen::Success) {
    throw SingularInformation("information matrix is not positive definite (support of " +
                              std::to_string(w.support_size()) + " points does not span)");
  }
  // LLT succeeds on some numerically singular matrices; reject a tiny pivot.
  const Vector diag = llt.matrixL().toDenseMatrix().diagonal();
  if (diag.minCoeff() <= 1e-14 * std::sqrt(info.diagonal().maxCoeff())) {
    throw SingularInformation("information matrix is numerically singular");
  }
  return llt;
}

}  // namespace

std::vector<double> sensitivity_function(const Design& w, const ParameterVector& theta,
                                         const InteractionModel& m) {
  theta.check_model(m);
  const auto llt = factor_information(w, theta, m);
  std::vector<double> out;
  out.reserve(m.num_settings());
  for_each_setting(m, [&](const BinarySetting& x) {
    const Vector z = llt.matrixL().solve(regression_vector(x, m));
    out.push_back(intensity(x, theta, m) * z.squaredNorm());
  });
  return out;
}

OptimalityVerdict kw_certificate(const Design& w, const ParameterVector& theta,
                                 const InteractionModel& m, double tolerance) {
  const std::vector<double> d = sensitivity_function(w, theta, m);
  const double p = static_cast<double>(m.p());
  OptimalityVerdict verdict;
  const auto worst = std::max_element(d.begin(), d.end());
  verdict.max_directional_value = *worst;
  verdict.worst_setting = BinarySetting(m.k(), static_cast<Subset>(worst - d.begin()));
  verdict.optimal = *worst <= p * (1.0 + tolerance);
  for (std::size_t x = 0; x < d.size(); ++x) {
    if (d[x] > p * (1.0 + tolerance)) {
      verdict.violated_labels.push_back(static_cast<Subset>(x));
    } else if (!w.in_support(x) && d[x] >= p * (1.0 - tolerance)) {
      verdict.boundary = true;
    }
  }
  return verdict;
}

std::vector<double> saturated_kw_values(const Design& w, const ParameterVector& theta,
                                        const InteractionModel& m) {
  theta.check_model(m);
  if (w.k() != m.k()) throw DimensionMismatch("design k does not match model");
  const std::size_t p = m.p();
  if (w.support_size() != p) {
    throw NotSaturated("design has " + std::to_string(w.support_size()) +
                       " support points, saturated needs " + std::to_string(p));
  }
  for (const auto& kv : w.weights()) {
    if (std::abs(kv.second - 1.0 / static_cast<double>(p)) > 1e-12) {
      throw NotSaturated("saturated sensitivity needs uniform weights 1/p");
    }
  }

  const auto n = static_cast<Eigen::Index>(p);
  Matrix support_matrix(n, n);
  std::vector<double> support_log_intensity;
  Eigen::Index row = 0;
  for (const auto& kv : w.weights()) {
    const BinarySetting x(m.k(), kv.first);
    support_matrix.row(row++) = regression_vector(x, m).transpose();
    support_log_intensity.push_back(log_intensity(x, theta, m));
  }
  Eigen::FullPivLU<Matrix> lu(support_matrix.transpose());
  if (!lu.isInvertible()) {
    throw SingularSupport("regression vectors of the support are linearly dependent");
  }

  std::vector<double> out;
  out.reserve(m.num_settings());
  for_each_setting(m, [&](const BinarySetting& x) {
    const Vector v = lu.solve(regression_vector(x, m));
    const double log_lambda = log_intensity(x, theta, m);
    double value = 0.0;
    for (Eigen::Index b = 0; b < n; ++b) {
      value += v(b) * v(b) * std::exp(log_lambda - support_log_intensity[static_cast<std::size_t>(b)]);
    }
    out.push_back(value);
  });
  return out;
}

double symmetric_slice_value(int c, double s, double t) {
  if (c < 3) throw InvalidArgument("slice cardinality must be at least 3");
  const double pairs = static_cast<double>(binomial(c, 2));
  const double empty_coeff = static_cast<double>(binomial(c - 1, 2));
  const double single_coeff = static_cast<double>(binomial(c - 2, 1));
  return empty_coeff * empty_coeff * std::pow(s, c) * std::pow(t, pairs) +
         c * single_coeff * single_coeff * std::pow(s, c - 1) * std::pow(t, pairs) +
         pairs * std::pow(s, c) * std::pow(t, pairs - 1.0);
}

namespace {

void require_pairwise(const InteractionModel& m) {
  if (m.d() != 2) throw InvalidArgument("symmetric slice requires d = 2");
  if (m.k() < 3) throw InvalidArgument("symmetric slice requires k >= 3");
}

void require_positive(double s, double t) {
  if (!(s > 0.0) || !(t > 0.0)) throw InvalidArgument("slice coordinates must be positive");
}

}  // namespace

std::map<int, double> symmetric_slice(const InteractionModel& m, double s, double t) {
  require_pairwise(m);
  require_positive(s, t);
  std::map<int, double> out;
  for (int c = 3; c <= m.k(); ++c) out.emplace(c, symmetric_slice_value(c, s, t));
  return out;
}

const char* to_string(SliceVerdict v) {
  switch (v) {
    case SliceVerdict::kOptimal:
      return "optimal";
    case SliceVerdict::kBoundary:
      return "boundary";
    case SliceVerdict::kNotOptimal:
      return "not-optimal";
  }
  return "unknown";
}

SliceRow evaluate_slice_point(const InteractionModel& m, double s, double t) {
  require_pairwise(m);
  require_positive(s, t);
  SliceRow row;
  row.s = s;
  row.t = t;
  row.margin = std::numeric_limits<double>::infinity();
  int violated = 0;
  int last_violated = 0;
  int tightest = 3;
  for (int c = 3; c <= m.k(); ++c) {
    const double lhs = symmetric_slice_value(c, s, t);
    row.lhs.push_back(lhs);
    if (1.0 - lhs < row.margin) {
      row.margin = 1.0 - lhs;
      tightest = c;
    }
    if (lhs > 1.0 + kTheoremTolerance) {
      ++violated;
      last_violated = c;
    }
  }
  if (violated == 0) {
    row.binding_c = tightest;
    row.verdict = row.margin <= kTheoremTolerance ? SliceVerdict::kBoundary : SliceVerdict::kOptimal;
  } else {
    row.binding_c = violated == 1 ? last_violated : 0;
    row.verdict = SliceVerdict::kNotOptimal;
  }
  return row;
}

std::vector<SliceRow> region_slice(const InteractionModel& m, const std::vector<double>& s_grid,
                                   const std::vector<double>& t_grid, int threads) {
  require_pairwise(m);
  if (s_grid.empty() || t_grid.empty()) throw InvalidArgument("slice grid is empty");
  std::vector<SliceRow> rows(s_grid.size() * t_grid.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    rows[i] = evaluate_slice_point(m, s_grid[i / t_grid.size()], t_grid[i % t_grid.size()]);
  });
  return rows;
}

void write_region_slice_csv(std::ostream& out, const InteractionModel& m,
                            const std::vector<SliceRow>& rows) {
  out << "s,t";
  for (int c = 3; c <= m.k(); ++c) out << ",lhs_" << c;
  out << ",binding_c,verdict\n";
  for (const SliceRow& row : rows) {
    out << format_number(row.s) << ',' << format_number(row.t);
    for (double v : row.lhs) out << ',' << format_number(v);
    out << ',' << row.binding_c << ',' << to_string(row.verdict) << '\n';
  }
}

std::vector<ProbeEntry> redundancy_probe(const InteractionModel& m, const ProbeRegion& region,
                                         std::uint64_t samples, std::uint64_t seed, int threads) {
  require_pairwise(m);
  if (!(region.s_lo >= 0.0 && region.s_hi > region.s_lo && region.t_lo >= 0.0 &&
        region.t_hi > region.t_lo)) {
    throw InvalidArgument("probe region must satisfy 0 <= lo < hi");
  }

  // Draws are generated sequentially so the sample set does not depend on
  // the thread count.
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<std::pair<double, double>> points(samples);
  for (auto& pt : points) {
    pt.first = region.s_hi - unit() * (region.s_hi - region.s_lo);
    pt.second = region.t_hi - unit() * (region.t_hi - region.t_lo);
  }

  // witness_for[i] = c if point i violates only inequality c, else 0.
  std::vector<int> witness_for(samples, 0);
  parallel_for(points.size(), threads, [&](std::size_t i) {
    const SliceRow row = evaluate_slice_point(m, points[i].first, points[i].second);
    if (row.verdict == SliceVerdict::kNotOptimal && row.binding_c != 0) {
      witness_for[i] = row.binding_c;
    }
  });

  std::vector<ProbeEntry> report;
  for (int c = 3; c <= m.k(); ++c) {
    ProbeEntry entry;
    entry.c = c;
    report.push_back(entry);
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (witness_for[i] == 0) continue;
    ProbeEntry& entry = report[static_cast<std::size_t>(witness_for[i] - 3)];
    if (!entry.witness) entry.witness = points[i];
    entry.redundant_in_region = false;
    ++entry.witness_count;
  }
  return report;
}

CornerComparison compare_corner_verdicts(const ParameterVector& theta, const InteractionModel& m) {
  CornerComparison out;
  out.as_stated = is_corner_optimal_by_theorem(theta, m, ProductRule::kAsStated);
  out.derived = is_corner_optimal_by_theorem(theta, m, ProductRule::kSaturatedDerived);
  out.certificate = kw_certificate(corner_design(m), theta, m);
  const ParameterVector normalized = theta.with_zero_offset();
  for (const auto& q : corner_inequalities(m, ProductRule::kAsStated)) {
    out.as_stated_lhs.push_back(evaluate_inequality(q, normalized));
  }
  for (const auto& q : corner_inequalities(m, ProductRule::kSaturatedDerived)) {
    out.derived_lhs.push_back(evaluate_inequality(q, normalized));
  }
  return out;
}

}  // namespace rasch
