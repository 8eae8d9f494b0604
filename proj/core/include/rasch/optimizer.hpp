#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rasch/model.hpp"

namespace rasch {

struct OptimizerConfig {
  int max_iterations = 200000;
  // Stop once max_x d(x) <= p (1 + kw_tolerance).
  double kw_tolerance = 1e-7;
  // Support points lighter than this are dropped and the rest renormalized.
  double prune_threshold = 1e-8;
  // Drop settings that provably carry no weight in any D-optimal design:
  // d(x) < p (1 + e/2 - sqrt(e (4 + e - 4/p)) / 2) with e = max d - p.
  bool eliminate_nonsupport = true;
  // Weights at or below this count as absent when classifying the result.
  double structure_tolerance = 1e-5;
  // Uniform over all settings when empty.
  std::optional<Design> seed;

  void validate() const;
};

enum class DesignStructure { kUniform, kCorner, kSaturatedOther, kInterior };

const char* to_string(DesignStructure s);

struct OptimizerResult {
  Design design;
  int iterations = 0;
  double final_kw_max = 0.0;
  double log_det = 0.0;
  DesignStructure structure = DesignStructure::kInterior;
  bool converged = false;
  // log det never dropped by more than 1e-12 across a multiplicative step.
  bool monotone = true;
  // Support size <= caratheodory_bound(m). Not guaranteed: the uniform
  // optimum at beta = 0 can exceed it.
  bool within_caratheodory_bound = true;
  int prune_events = 0;
  int prune_rollbacks = 0;
  int eliminated_points = 0;
  // Largest |sum_x w_x d(x) / p - 1| seen over the run.
  double max_averaging_error = 0.0;
  // Set when the run stopped abnormally.
  std::string diagnostic;
};

// Multiplicative weight iteration w_x <- w_x d(x) / p.
OptimizerResult optimize_design(const ParameterVector& theta, const InteractionModel& m,
                                const OptimizerConfig& cfg = {});

// Weights at or below tol are ignored when determining the support.
DesignStructure classify_structure(const Design& w, const InteractionModel& m, double tol);

struct Transition {
  double location = 0.0;
  double lo = 0.0;  // predicate(lo) == predicate at the lower bracket end
  double hi = 0.0;
  int evaluations = 0;
};

// Bisection on a one-parameter family theta(t) for the point where
// predicate(optimize_design(theta(t))) changes value. Throws NoBracket if
// the predicate agrees at both ends.
Transition find_transition(const std::function<ParameterVector(double)>& path,
                           const InteractionModel& m,
                           const std::function<bool(const OptimizerResult&)>& predicate,
                           double lo, double hi, double tol, const OptimizerConfig& cfg = {});

// Caratheodory bound p (p - 1) / 2 + 1 on the support size needed to realize
// any information matrix.
long long caratheodory_bound(const InteractionModel& m);

}  // namespace rasch
