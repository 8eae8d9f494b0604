#include "rasch/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rasch/errors.hpp"

namespace rasch {

void OptimizerConfig::validate() const {
  if (max_iterations < 0) throw InvalidArgument("max_iterations must be nonnegative");
  if (!(kw_tolerance > 0.0)) throw InvalidArgument("kw_tolerance must be positive");
  if (!(prune_threshold >= 0.0 && prune_threshold <= 1e-6)) {
    throw InvalidArgument("prune_threshold must lie in [0, 1e-6]");
  }
  if (!(structure_tolerance >= 0.0)) throw InvalidArgument("structure_tolerance must be >= 0");
}

const char* to_string(DesignStructure s) {
  switch (s) {
    case DesignStructure::kUniform:
      return "uniform";
    case DesignStructure::kCorner:
      return "corner";
    case DesignStructure::kSaturatedOther:
      return "saturated";
    case DesignStructure::kInterior:
      return "interior";
  }
  return "unknown";
}

namespace {

// Precomputed regression vectors (one row per setting) and intensities.
struct SettingTable {
  Matrix regressors;
  Vector intensities;
};

SettingTable tabulate(const ParameterVector& theta, const InteractionModel& m) {
  const auto n = static_cast<Eigen::Index>(m.num_settings());
  SettingTable t{Matrix(n, static_cast<Eigen::Index>(m.p())), Vector(n)};
  for_each_setting(m, [&](const BinarySetting& x) {
    const auto row = static_cast<Eigen::Index>(x.mask());
    t.regressors.row(row) = regression_vector(x, m).transpose();
    t.intensities(row) = intensity(x, theta, m);
  });
  return t;
}

struct Evaluation {
  bool ok = false;
  double log_det = 0.0;
  Vector sensitivity;
};

Evaluation evaluate(const SettingTable& t, const Vector& w) {
  const Vector scale = w.cwiseProduct(t.intensities);
  const Matrix info = t.regressors.transpose() * scale.asDiagonal() * t.regressors;
  Eigen::LLT<Matrix> llt(info);
  Evaluation e;
  if (llt.info() != Eigen::Success) return e;
  const Vector diag = llt.matrixL().toDenseMatrix().diagonal();
  if (diag.minCoeff() <= 1e-14 * std::sqrt(info.diagonal().maxCoeff())) return e;
  e.ok = true;
  e.log_det = 2.0 * diag.array().log().sum();
  const Matrix z = llt.matrixL().solve(t.regressors.transpose());
  e.sensitivity = t.intensities.cwiseProduct(z.colwise().squaredNorm().transpose());
  return e;
}

Design to_design(int k, const Vector& w) {
  std::map<Subset, double> weights;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) > 0.0) weights.emplace(static_cast<Subset>(i), w(i));
  }
  return Design::normalized(k, std::move(weights));
}

}  // namespace

OptimizerResult optimize_design(const ParameterVector& theta, const InteractionModel& m,
                                const OptimizerConfig& cfg) {
  cfg.validate();
  theta.check_model(m);
  const SettingTable table = tabulate(theta, m);
  const auto n = table.intensities.size();
  const double p = static_cast<double>(m.p());

  Vector w = Vector::Constant(n, 1.0 / static_cast<double>(n));
  if (cfg.seed) {
    if (cfg.seed->k() != m.k()) throw DimensionMismatch("seed design k does not match model");
    w.setZero();
    for (const auto& [x, weight] : cfg.seed->weights()) w(static_cast<Eigen::Index>(x)) = weight;
  }

  OptimizerResult result;
  double threshold = cfg.prune_threshold;
  double previous_log_det = -std::numeric_limits<double>::infinity();
  bool compare_with_previous = false;
  Evaluation current = evaluate(table, w);
  if (!current.ok) throw SingularInformation("seed design has a singular information matrix");

  while (true) {
    if (compare_with_previous &&
        current.log_det < previous_log_det - 1e-12 * std::max(1.0, std::abs(previous_log_det))) {
      result.monotone = false;
      result.diagnostic = "log det decreased from " + std::to_string(previous_log_det) + " to " +
                          std::to_string(current.log_det) + " at iteration " +
                          std::to_string(result.iterations);
      break;
    }
    const double averaging = w.dot(current.sensitivity) / p - 1.0;
    result.max_averaging_error = std::max(result.max_averaging_error, std::abs(averaging));

    if (current.sensitivity.maxCoeff() <= p * (1.0 + cfg.kw_tolerance)) {
      result.converged = true;
      break;
    }
    if (result.iterations >= cfg.max_iterations) {
      result.diagnostic = "iteration limit reached";
      break;
    }

    Vector next = w.cwiseProduct(current.sensitivity) / p;
    next /= next.sum();
    ++result.iterations;

    const double excess = std::max(current.sensitivity.maxCoeff() - p, 0.0);
    const double floor =
        cfg.eliminate_nonsupport
            ? p * (1.0 + excess / 2.0 - std::sqrt(excess * (4.0 + excess - 4.0 / p)) / 2.0)
            : 0.0;
    bool pruned = false;
    int eliminated = 0;
    Vector candidate = next;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (candidate(i) <= 0.0) continue;
      if (current.sensitivity(i) < floor) {
        candidate(i) = 0.0;
        ++eliminated;
        pruned = true;
      } else if (candidate(i) < threshold) {
        candidate(i) = 0.0;
        pruned = true;
      }
    }
    Evaluation after;
    if (pruned) {
      candidate /= candidate.sum();
      after = evaluate(table, candidate);
      if (after.ok) {
        next = candidate;
        ++result.prune_events;
        result.eliminated_points += eliminated;
      } else {
        ++result.prune_rollbacks;
        threshold /= 2.0;
        pruned = false;
      }
    }
    if (!pruned) {
      after = evaluate(table, next);
      if (!after.ok) throw SingularInformation("information matrix lost rank during iteration");
    }

    previous_log_det = current.log_det;
    compare_with_previous = !pruned;
    w = next;
    current = std::move(after);
  }

  result.design = to_design(m.k(), w);
  result.final_kw_max = current.sensitivity.maxCoeff();
  result.log_det = current.log_det;
  result.within_caratheodory_bound =
      static_cast<long long>(result.design.support_size()) <= caratheodory_bound(m);
  result.structure = classify_structure(result.design, m, cfg.structure_tolerance);
  return result;
}

DesignStructure classify_structure(const Design& w, const InteractionModel& m, double tol) {
  if (w.k() != m.k()) throw DimensionMismatch("design k does not match model");
  std::map<Subset, double> effective;
  for (const auto& [x, weight] : w.weights()) {
    if (weight > tol) effective.emplace(x, weight);
  }
  const auto near_all = [&](double target) {
    for (const auto& kv : effective) {
      if (std::abs(kv.second - target) > tol) return false;
    }
    return true;
  };

  const std::uint64_t settings = m.num_settings();
  if (effective.size() == settings && near_all(1.0 / static_cast<double>(settings))) {
    return DesignStructure::kUniform;
  }
  if (effective.size() == m.p()) {
    bool corner_support = true;
    for (const auto& kv : effective) {
      if (cardinality(kv.first) > m.d()) corner_support = false;
    }
    if (corner_support && near_all(1.0 / static_cast<double>(m.p()))) {
      return DesignStructure::kCorner;
    }
    return DesignStructure::kSaturatedOther;
  }
  return DesignStructure::kInterior;
}

Transition find_transition(const std::function<ParameterVector(double)>& path,
                           const InteractionModel& m,
                           const std::function<bool(const OptimizerResult&)>& predicate,
                           double lo, double hi, double tol, const OptimizerConfig& cfg) {
  if (!(hi > lo)) throw InvalidArgument("bracket must satisfy lo < hi");
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  Transition t;
  const auto at = [&](double s) {
    ++t.evaluations;
    return predicate(optimize_design(path(s), m, cfg));
  };
  const bool low_value = at(lo);
  if (at(hi) == low_value) {
    throw NoBracket("predicate does not change on [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (at(mid) == low_value) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  t.lo = lo;
  t.hi = hi;
  t.location = 0.5 * (lo + hi);
  return t;
}

long long caratheodory_bound(const InteractionModel& m) {
  const auto p = static_cast<long long>(m.p());
  return p * (p - 1) / 2 + 1;
}

}  // namespace rasch
