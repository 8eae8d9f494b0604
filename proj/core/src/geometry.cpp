#include "rasch/geometry.hpp"

#include <cmath>
#include <limits>

#include "rasch/errors.hpp"

namespace rasch {

namespace {

constexpr double kIndependenceTolerance = 1e-10;
constexpr double kFeasibilityTolerance = 1e-8;

// Columns are the vectorized directions.
Matrix direction_matrix(const std::vector<SymMatrix>& directions, Eigen::Index rows) {
  Matrix out(rows, static_cast<Eigen::Index>(directions.size()));
  for (std::size_t i = 0; i < directions.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = directions[i].vectorized();
  }
  return out;
}

// Lawson-Hanson active set method for min ||A x - b||, x >= 0.
Vector nonnegative_least_squares(const Matrix& a, const Vector& b) {
  const Eigen::Index n = a.cols();
  Vector x = Vector::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double eps = 1e-14 * std::max(1.0, a.cwiseAbs().maxCoeff());

  const auto solve_passive = [&](Vector& s) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    }
    Matrix sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = a.col(idx[c]);
    const Vector z = sub.colPivHouseholderQr().solve(b);
    s.setZero(n);
    for (std::size_t c = 0; c < idx.size(); ++c) s(idx[c]) = z(static_cast<Eigen::Index>(c));
  };

  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    const Vector grad = a.transpose() * (b - a * x);
    Eigen::Index best = -1;
    double best_value = eps;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && grad(j) > best_value) {
        best_value = grad(j);
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    Vector s;
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      solve_passive(s);
      double alpha = 1.0;
      bool clipped = false;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && s(j) <= 0.0) {
          const double denom = x(j) - s(j);
          if (denom > 0.0) alpha = std::min(alpha, x(j) / denom);
          clipped = true;
        }
      }
      if (!clipped) break;
      x += alpha * (s - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x(j) <= eps) {
          passive[static_cast<std::size_t>(j)] = false;
          x(j) = 0.0;
        }
      }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      x(j) = passive[static_cast<std::size_t>(j)] ? s(j) : 0.0;
    }
  }
  return x;
}

}  // namespace

PolytopeModel polytope_vertices(const ParameterVector& theta, const InteractionModel& m) {
  theta.check_model(m);
  PolytopeModel pm;
  for_each_setting(m, [&](const BinarySetting& x) {
    SymMatrix v(m.p());
    v.add_rank_one(intensity(x, theta, m), regression_vector(x, m));
    pm.vertices.push_back({x, std::move(v)});
  });
  pm.base_index = 0;
  const SymMatrix& base = pm.vertices[pm.base_index].matrix;

  // Greedy Gram-Schmidt over the vertex differences in setting order.
  std::vector<Vector> basis;
  for (std::size_t j = 0; j < pm.vertices.size(); ++j) {
    if (j == pm.base_index) continue;
    SymMatrix diff = pm.vertices[j].matrix - base;
    const Vector v = diff.vectorized();
    Vector r = v;
    for (const Vector& q : basis) r -= q.dot(r) * q;
    if (r.squaredNorm() > kIndependenceTolerance * v.squaredNorm() && r.norm() > 0.0) {
      basis.push_back(r / r.norm());
      pm.direction_vertices.push_back(j);
      pm.directions.push_back(std::move(diff));
    }
  }

  const auto rows = static_cast<Eigen::Index>(base.packed().size());
  const Matrix dirs = direction_matrix(pm.directions, rows);
  const auto qr = dirs.colPivHouseholderQr();
  pm.vertex_coordinates.resize(static_cast<Eigen::Index>(pm.dim()),
                               static_cast<Eigen::Index>(pm.vertices.size()));
  for (std::size_t j = 0; j < pm.vertices.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    if (j == pm.base_index) {
      pm.vertex_coordinates.col(col).setZero();
    } else {
      pm.vertex_coordinates.col(col) = qr.solve((pm.vertices[j].matrix - base).vectorized());
    }
  }
  // Exact unit coordinates for the chart's own vertices.
  for (std::size_t i = 0; i < pm.direction_vertices.size(); ++i) {
    auto col = pm.vertex_coordinates.col(static_cast<Eigen::Index>(pm.direction_vertices[i]));
    col.setZero();
    col(static_cast<Eigen::Index>(i)) = 1.0;
  }
  return pm;
}

SymMatrix LmiSlice::at(const Vector& u) const {
  if (static_cast<std::size_t>(u.size()) != directions.size()) {
    throw DimensionMismatch("slice coordinates have wrong length");
  }
  SymMatrix s = base;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    s += u(static_cast<Eigen::Index>(i)) * directions[i];
  }
  return s;
}

Vector LmiSlice::centroid() const { return vertex_coordinates.rowwise().mean(); }

LmiSlice lmi_slice(const PolytopeModel& pm) {
  LmiSlice slice;
  slice.base = pm.vertices[pm.base_index].matrix;
  slice.directions = pm.directions;
  for (std::size_t j : pm.direction_vertices) {
    slice.labels.push_back(pm.vertices[j].setting.to_string());
  }
  slice.vertex_coordinates = pm.vertex_coordinates;
  return slice;
}

LogDetDerivatives log_det_derivatives(const LmiSlice& slice, const Vector& u) {
  LogDetDerivatives out;
  const Matrix s = slice.at(u).dense();
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) return out;
  const Matrix l = llt.matrixL();
  if (l.diagonal().minCoeff() <= 0.0) return out;
  out.feasible = true;
  out.value = 2.0 * l.diagonal().array().log().sum();

  const std::size_t n = slice.dim();
  std::vector<Matrix> whitened(n);
  for (std::size_t i = 0; i < n; ++i) {
    // L^{-1} D_i L^{-T}
    const Matrix half = llt.matrixL().solve(slice.directions[i].dense());
    whitened[i] = llt.matrixL().solve(half.transpose()).transpose();
  }
  out.gradient.resize(static_cast<Eigen::Index>(n));
  out.hessian.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    out.gradient(ii) = whitened[i].trace();
    for (std::size_t j = 0; j <= i; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double h = -(whitened[i].cwiseProduct(whitened[j].transpose())).sum();
      out.hessian(ii, jj) = h;
      out.hessian(jj, ii) = h;
    }
  }
  return out;
}

Membership polytope_membership(const Matrix& vertex_coordinates, const Vector& u) {
  const Eigen::Index dim = vertex_coordinates.rows();
  const Eigen::Index n = vertex_coordinates.cols();
  if (u.size() != dim) throw DimensionMismatch("membership point has wrong dimension");
  Membership out;
  out.weights = Vector::Zero(n);

  const bool simplex = n == dim + 1;
  if (simplex) {
    // Barycentric coordinates: solve [V; 1] w = [u; 1].
    Matrix a(dim + 1, n);
    a.topRows(dim) = vertex_coordinates;
    a.row(dim).setOnes();
    Vector b(dim + 1);
    b.head(dim) = u;
    b(dim) = 1.0;
    const Vector w = a.fullPivLu().solve(b);
    out.residual = (a * w - b).norm();
    out.inside = w.minCoeff() >= -kFeasibilityTolerance &&
                 out.residual <= kFeasibilityTolerance * std::max(1.0, u.norm());
    out.weights = w;
  } else {
    const double scale = std::max(1.0, vertex_coordinates.cwiseAbs().maxCoeff());
    Matrix a(dim + 1, n);
    a.topRows(dim) = vertex_coordinates;
    a.row(dim).setConstant(scale);
    Vector b(dim + 1);
    b.head(dim) = u;
    b(dim) = scale;
    const Vector w = nonnegative_least_squares(a, b);
    out.residual = (a * w - b).norm();
    out.inside = out.residual <= kFeasibilityTolerance * std::max(1.0, u.norm());
    out.weights = w;
  }
  if (out.inside) {
    out.weights = out.weights.cwiseMax(0.0);
    out.weights /= out.weights.sum();
  }
  return out;
}

Membership polytope_membership(const PolytopeModel& pm, const Vector& u) {
  return polytope_membership(pm.vertex_coordinates, u);
}

Membership polytope_membership(const PolytopeModel& pm, const SymMatrix& point) {
  const SymMatrix& base = pm.vertices[pm.base_index].matrix;
  if (point.dim() != base.dim()) throw DimensionMismatch("matrix has wrong dimension");
  const Vector target = (point - base).vectorized();
  const Matrix dirs = direction_matrix(pm.directions, target.size());
  const Vector u = dirs.colPivHouseholderQr().solve(target);
  const double residual = (dirs * u - target).norm();
  if (residual > kFeasibilityTolerance * std::max(1.0, point.vectorized().norm())) {
    throw NotInAffineHull("matrix lies off the affine hull of the polytope (residual " +
                          std::to_string(residual) + ")");
  }
  return polytope_membership(pm, u);
}

const char* to_string(CenterStatus s) {
  switch (s) {
    case CenterStatus::kConverged:
      return "converged";
    case CenterStatus::kUnbounded:
      return "unbounded";
    case CenterStatus::kMaxIterations:
      return "max-iterations";
  }
  return "unknown";
}

CenterResult analytic_center(const LmiSlice& slice, std::optional<Vector> start,
                             const CenterOptions& options) {
  Vector u = start ? *start : slice.centroid();
  LogDetDerivatives current = log_det_derivatives(slice, u);
  if (!current.feasible) {
    throw InfeasibleStart("start point is not strictly feasible for the slice");
  }
  const double start_value = current.value;

  CenterResult result;
  result.status = CenterStatus::kMaxIterations;
  for (; result.iterations < options.max_iterations; ++result.iterations) {
    if (current.gradient.norm() <= options.gradient_tolerance) {
      result.status = CenterStatus::kConverged;
      break;
    }
    // log det is strictly concave on the slice, so -H is positive definite.
    Eigen::LLT<Matrix> neg_hessian(-current.hessian);
    Vector step = neg_hessian.info() == Eigen::Success ? Vector(neg_hessian.solve(current.gradient))
                                                       : Vector(current.gradient);
    const double slope = current.gradient.dot(step);
    // Predicted gain below the resolution of log det: further steps only chase noise.
    const double resolution = 4.0 * std::numeric_limits<double>::epsilon() *
                              std::max(1.0, std::abs(current.value));
    if (slope <= resolution && current.gradient.norm() <= 1e-8) {
      result.status = CenterStatus::kConverged;
      break;
    }

    double t = 1.0;
    LogDetDerivatives next;
    Vector candidate;
    while (t > 1e-16) {
      candidate = u + t * step;
      next = log_det_derivatives(slice, candidate);
      if (next.feasible && next.value >= current.value + 0.25 * t * slope) break;
      t *= 0.5;
    }
    if (!(t > 1e-16)) {
      // No further ascent possible at double precision.
      if (current.gradient.norm() <= 1e-8) result.status = CenterStatus::kConverged;
      break;
    }
    u = candidate;
    current = std::move(next);
    if (current.value - start_value > options.log_det_ceiling ||
        u.cwiseAbs().maxCoeff() > options.coordinate_limit) {
      result.status = CenterStatus::kUnbounded;
      ++result.iterations;
      break;
    }
  }

  result.coordinates = u;
  result.matrix = slice.at(u);
  result.log_det = current.value;
  result.gradient_norm = current.gradient.norm();
  if (result.status == CenterStatus::kConverged) {
    const Membership membership = polytope_membership(slice.vertex_coordinates, u);
    result.inside_polytope = membership.inside;
    if (membership.inside) result.weights = membership.weights;
  }
  return result;
}

CenterPath center_path(const std::function<ParameterVector(double)>& family,
                       const InteractionModel& m, const std::vector<double>& grid,
                       bool warm_start, const CenterOptions& options) {
  if (grid.empty()) throw InvalidArgument("center path grid is empty");
  CenterPath path;
  std::optional<Vector> previous;
  bool previous_inside = false;
  for (double parameter : grid) {
    const LmiSlice slice = lmi_slice(polytope_vertices(family(parameter), m));
    std::optional<Vector> start;
    if (warm_start && previous && previous->size() == static_cast<Eigen::Index>(slice.dim()) &&
        log_det_derivatives(slice, *previous).feasible) {
      start = previous;
    }
    CenterPathRow row{parameter, analytic_center(slice, start, options)};
    if (row.center.status == CenterStatus::kConverged) {
      previous = row.center.coordinates;
    } else {
      previous.reset();
    }
    if (!path.exit_index && previous_inside && !row.center.inside_polytope) {
      path.exit_index = path.rows.size();
    }
    previous_inside = row.center.inside_polytope;
    path.rows.push_back(std::move(row));
  }
  return path;
}

ParameterVector diagonal_family(const InteractionModel& m, double lambda) {
  const double mu[] = {lambda};
  return symmetric_parameters(m, mu);
}

}  // namespace rasch
