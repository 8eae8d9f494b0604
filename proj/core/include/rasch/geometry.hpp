#pragma once

// Information matrix polytope, its LMI relaxation in an affine chart, and the
// analytic center of that relaxation.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rasch/model.hpp"

namespace rasch {

struct PolytopeVertex {
  BinarySetting setting;
  SymMatrix matrix;  // lambda(x) f(x) f(x)^T
};

// Affine chart: point(u) = V_base + sum_i u_i (V_{direction_vertices[i]} - V_base).
struct PolytopeModel {
  std::vector<PolytopeVertex> vertices;  // bitmask order
  std::size_t base_index = 0;
  std::vector<std::size_t> direction_vertices;
  std::vector<SymMatrix> directions;
  // Column j holds the chart coordinates of vertices[j].
  Matrix vertex_coordinates;

  std::size_t dim() const { return directions.size(); }
  bool is_simplex() const { return vertices.size() == dim() + 1; }
};

PolytopeModel polytope_vertices(const ParameterVector& theta, const InteractionModel& m);

struct LmiSlice {
  SymMatrix base;
  std::vector<SymMatrix> directions;
  std::vector<std::string> labels;  // setting of the vertex each coordinate moves toward
  Matrix vertex_coordinates;

  std::size_t dim() const { return directions.size(); }
  SymMatrix at(const Vector& u) const;
  Vector centroid() const;
};

LmiSlice lmi_slice(const PolytopeModel& pm);

struct LogDetDerivatives {
  bool feasible = false;  // S(u) positive definite
  double value = 0.0;
  Vector gradient;  // trace(S^{-1} D_i)
  Matrix hessian;   // -trace(S^{-1} D_i S^{-1} D_j)
};

LogDetDerivatives log_det_derivatives(const LmiSlice& slice, const Vector& u);

struct Membership {
  bool inside = false;
  Vector weights;  // one per vertex, nonnegative, summing to 1
  double residual = 0.0;
};

// Chart coordinates `u` are reproduced as a convex combination of the vertex
// coordinates. Feasibility tolerance on the residual is 1e-8.
Membership polytope_membership(const Matrix& vertex_coordinates, const Vector& u);
Membership polytope_membership(const PolytopeModel& pm, const Vector& u);
// Projects the matrix onto the affine hull first; throws NotInAffineHull if
// the projection residual exceeds 1e-8 relative.
Membership polytope_membership(const PolytopeModel& pm, const SymMatrix& point);

enum class CenterStatus { kConverged, kUnbounded, kMaxIterations };
const char* to_string(CenterStatus s);

struct CenterOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-10;
  // Unbounded once log det rises this far above the start value.
  double log_det_ceiling = 50.0;
  double coordinate_limit = 1e8;
};

struct CenterResult {
  Vector coordinates;
  SymMatrix matrix;
  double log_det = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  CenterStatus status = CenterStatus::kMaxIterations;
  bool inside_polytope = false;
  std::optional<Vector> weights;  // convex weights when inside
};

// Damped Newton ascent of log det S(u) from `start` (the vertex centroid
// when empty). Throws InfeasibleStart if S(start) is not positive definite.
CenterResult analytic_center(const LmiSlice& slice, std::optional<Vector> start = std::nullopt,
                             const CenterOptions& options = {});

struct CenterPathRow {
  double parameter = 0.0;
  CenterResult center;
};

struct CenterPath {
  std::vector<CenterPathRow> rows;
  // First row whose center lies outside the polytope after an inside row.
  std::optional<std::size_t> exit_index;
};

// One analytic center per grid value, warm-started from the previous
// converged center when it is strictly feasible for the next slice.
CenterPath center_path(const std::function<ParameterVector(double)>& family,
                       const InteractionModel& m, const std::vector<double>& grid,
                       bool warm_start = true, const CenterOptions& options = {});

// lambda_i = lambda for every rule, all other beta zero.
ParameterVector diagonal_family(const InteractionModel& m, double lambda);

}  // namespace rasch
