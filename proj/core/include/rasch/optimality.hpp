#pragma once

// Regions of optimality of the corner design: the monomial inequality
// system, a general Kiefer-Wolfowitz certificate as an independent check,
// and sampling tools for the symmetric (s, t) slice at d = 2.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "rasch/model.hpp"

namespace rasch {

inline constexpr double kTheoremTolerance = 1e-9;
inline constexpr double kKwTolerance = 1e-7;

// Which subsets enter the product of a term labelled by B.
enum class ProductRule {
  // Every A subset of C with |A| <= d except A = B.
  kAsStated,
  // Every A subset of C with |A| <= d that is not a subset of B. This is
  // lambda(x_C) / lambda(x_B), what the saturated sensitivity reduces to.
  kSaturatedDerived,
};

struct MonomialTerm {
  long long coefficient = 0;  // squared binomial coefficient
  Subset omitted = 0;         // the subset B labelling the term
  std::vector<std::size_t> support;  // model indices A with exponent 1
};

// sum_terms coefficient * prod_{A in support} mu_A <= 1
struct MonomialInequality {
  Subset label = 0;  // the generating set C, |C| > d
  std::vector<MonomialTerm> terms;
};

struct OptimalityVerdict {
  bool optimal = false;
  // Some constraint sits within the tolerance band of equality. For the
  // sensitivity check only settings outside the support count.
  bool boundary = false;
  double max_directional_value = 0.0;
  BinarySetting worst_setting;
  std::vector<Subset> violated_labels;
};

Design corner_design(const InteractionModel& m);

MonomialInequality corner_inequality(const InteractionModel& m, Subset c,
                                     ProductRule rule = ProductRule::kAsStated);
// One inequality per C with |C| > d, ordered by (|C|, lexicographic).
std::vector<MonomialInequality> corner_inequalities(
    const InteractionModel& m, ProductRule rule = ProductRule::kAsStated);

double evaluate_inequality(const MonomialInequality& q, const ParameterVector& theta);

// Evaluates the inequality system at theta with beta_{} set to 0.
// max_directional_value is the largest left-hand side; worst_setting is x(C)
// for the inequality attaining it.
OptimalityVerdict is_corner_optimal_by_theorem(
    const ParameterVector& theta, const InteractionModel& m,
    ProductRule rule = ProductRule::kAsStated);

// d(x) = lambda(x) f(x)^T M(w)^{-1} f(x) for every setting, by bitmask.
// Throws SingularInformation if M(w) is not positive definite.
std::vector<double> sensitivity_function(const Design& w, const ParameterVector& theta,
                                         const InteractionModel& m);

OptimalityVerdict kw_certificate(const Design& w, const ParameterVector& theta,
                                 const InteractionModel& m,
                                 double tolerance = kKwTolerance);

// lambda(x) (F_w^{-T} f(x))^T Lambda_w^{-1} (F_w^{-T} f(x)) for every setting,
// where F_w stacks the regression vectors of the support and Lambda_w holds
// the support intensities. Requires a uniform design on p points.
std::vector<double> saturated_kw_values(const Design& w, const ParameterVector& theta,
                                        const InteractionModel& m);

// Closed-form left-hand side of the |C| = c inequality at d = 2 when
// mu_i = s, mu_ij = t and mu_{} = 1.
double symmetric_slice_value(int c, double s, double t);
// c -> value for c in 3..k. Requires d = 2.
std::map<int, double> symmetric_slice(const InteractionModel& m, double s, double t);

enum class SliceVerdict { kOptimal, kBoundary, kNotOptimal };
const char* to_string(SliceVerdict v);

struct SliceRow {
  double s = 0.0;
  double t = 0.0;
  std::vector<double> lhs;  // lhs[i] belongs to c = 3 + i
  // Feasible point: the c with the largest left-hand side. Exactly one
  // inequality violated: that c. Several violated: 0.
  int binding_c = 0;
  double margin = 0.0;  // min over c of 1 - lhs_c
  SliceVerdict verdict = SliceVerdict::kNotOptimal;
};

SliceRow evaluate_slice_point(const InteractionModel& m, double s, double t);

// Rows in (s-major, t-minor) grid order.
std::vector<SliceRow> region_slice(const InteractionModel& m, const std::vector<double>& s_grid,
                                   const std::vector<double>& t_grid, int threads = 1);

// Header "s,t,lhs_3,...,lhs_k,binding_c,verdict", 12 significant digits.
void write_region_slice_csv(std::ostream& out, const InteractionModel& m,
                            const std::vector<SliceRow>& rows);

struct ProbeRegion {
  double s_lo = 0.0, s_hi = 1.0;
  double t_lo = 0.0, t_hi = 1.0;
};

struct ProbeEntry {
  int c = 0;
  bool redundant_in_region = true;  // no witness found; evidence only
  std::optional<std::pair<double, double>> witness;
  std::uint64_t witness_count = 0;
};

// Samples (s, t) uniformly in (lo, hi] x (lo, hi]. A witness for c violates
// inequality c while every other inequality holds. Deterministic in seed and
// independent of the thread count.
std::vector<ProbeEntry> redundancy_probe(const InteractionModel& m, const ProbeRegion& region,
                                         std::uint64_t samples, std::uint64_t seed,
                                         int threads = 1);

// Independent readings of optimality of the corner design at one point.
struct CornerComparison {
  OptimalityVerdict as_stated;
  OptimalityVerdict derived;
  OptimalityVerdict certificate;
  std::vector<double> as_stated_lhs;  // per inequality, corner_inequalities order
  std::vector<double> derived_lhs;
  bool agree() const {
    return as_stated.optimal == certificate.optimal && derived.optimal == certificate.optimal;
  }
};

CornerComparison compare_corner_verdicts(const ParameterVector& theta, const InteractionModel& m);

}  // namespace rasch
