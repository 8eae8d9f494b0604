#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rasch/errors.hpp"
#include "rasch/geometry.hpp"

using namespace rasch;

namespace {

const double kSqrt2Minus1 = std::sqrt(2.0) - 1.0;

ParameterVector lambda_pair(double l1, double l2) {
  const InteractionModel m(2, 1);
  const std::vector<double> mu{1.0, l1, l2};
  return ParameterVector::from_mu(m, mu);
}

LmiSlice two_rule_slice(double lambda) {
  return lmi_slice(polytope_vertices(lambda_pair(lambda, lambda), InteractionModel(2, 1)));
}

// Cyclic golden-section ascent on the hand-typed determinant, sharing no code
// with the Newton solver. log det is concave on the feasible set.
Vector golden_section_center(double lambda, Vector u) {
  const auto value = [&](const Vector& v) {
    const double det = oracle::two_rule_slice_det(lambda, lambda, v(0), v(1), v(2));
    return det > 0.0 ? std::log(det) : -1e300;
  };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int sweep = 0; sweep < 300; ++sweep) {
    for (int i = 0; i < 3; ++i) {
      double lo = u(i) - 0.5;
      double hi = u(i) + 0.5;
      for (int iter = 0; iter < 80; ++iter) {
        Vector a = u;
        Vector b = u;
        a(i) = hi - phi * (hi - lo);
        b(i) = lo + phi * (hi - lo);
        if (value(a) < value(b)) {
          lo = a(i);
        } else {
          hi = b(i);
        }
      }
      u(i) = 0.5 * (lo + hi);
    }
  }
  return u;
}

}  // namespace

TEST(Polytope, TwoRuleVertices) {
  const double l1 = 0.6;
  const double l2 = 0.3;
  const PolytopeModel pm = polytope_vertices(lambda_pair(l1, l2), InteractionModel(2, 1));
  ASSERT_EQ(pm.vertices.size(), 4U);
  EXPECT_EQ(pm.dim(), 3U);
  EXPECT_TRUE(pm.is_simplex());
  EXPECT_EQ(pm.base_index, 0U);
  EXPECT_EQ(pm.vertices[0].setting.mask(), Subset{0});
  Matrix v11 = Matrix::Ones(3, 3) * l1 * l2;
  EXPECT_TRUE(pm.vertices[3].matrix.dense().isApprox(v11, 1e-15));
  EXPECT_NEAR(pm.vertices[1].matrix(1, 1), l1, 1e-15);
  EXPECT_NEAR(pm.vertices[2].matrix(2, 2), l2, 1e-15);
}

TEST(Polytope, VerticesAreRankOne) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const InteractionModel m(3, 2);
  std::vector<double> b(m.p());
  for (double& v : b) v = dist(rng);
  const ParameterVector theta(m, b);
  const PolytopeModel pm = polytope_vertices(theta, m);
  EXPECT_EQ(pm.vertices.size(), 8U);
  for (const auto& v : pm.vertices) {
    const Vector f = regression_vector(v.setting, m);
    EXPECT_NEAR(v.matrix.trace(), intensity(v.setting, theta, m) * f.squaredNorm(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(v.matrix.dense());
    const auto ev = eig.eigenvalues();
    EXPECT_GT(ev(ev.size() - 1), 0.0);
    for (Eigen::Index i = 0; i + 1 < ev.size(); ++i) EXPECT_NEAR(ev(i), 0.0, 1e-12);
  }
  // chart directions are independent
  Matrix gram(pm.dim(), pm.dim());
  for (std::size_t i = 0; i < pm.dim(); ++i) {
    for (std::size_t j = 0; j < pm.dim(); ++j) {
      gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          pm.directions[i].frobenius_dot(pm.directions[j]);
    }
  }
  EXPECT_EQ(Eigen::FullPivLU<Matrix>(gram).rank(), static_cast<Eigen::Index>(pm.dim()));
}

TEST(LmiSlice, ReproducesTheTwoRuleMatrix) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-0.5, 1.0);
  const double l1 = 0.7;
  const double l2 = 0.45;
  const LmiSlice slice =
      lmi_slice(polytope_vertices(lambda_pair(l1, l2), InteractionModel(2, 1)));
  EXPECT_EQ(slice.at(Vector::Zero(3)).dense(), (Matrix(3, 3) << 1, 0, 0, 0, 0, 0, 0, 0, 0).finished());
  for (int trial = 0; trial < 100; ++trial) {
    const Vector u = Vector::NullaryExpr(3, [&] { return dist(rng); });
    const SymMatrix s = slice.at(u);
    const double x = u(0);
    const double y = u(1);
    const double z = u(2);
    EXPECT_NEAR(s(0, 0), 1 + x * (l1 - 1) + y * (l2 - 1) + z * (l1 * l2 - 1), 1e-14);
    EXPECT_NEAR(s(1, 2), z * l1 * l2, 1e-14);
    const double want = oracle::two_rule_slice_det(l1, l2, x, y, z);
    EXPECT_NEAR(s.dense().determinant(), want, 1e-10 * std::max(std::abs(want), 1e-3));
  }
  for (int i = 0; i < 3; ++i) {
    Vector e = Vector::Zero(3);
    e(i) = 1.0;
    EXPECT_TRUE(slice.at(e).dense().isApprox(
        polytope_vertices(lambda_pair(l1, l2), InteractionModel(2, 1))
            .vertices[static_cast<std::size_t>(i) + 1]
            .matrix.dense(),
        1e-14));
  }
}

TEST(LogDetDerivatives, MatchFiniteDifferences) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const InteractionModel m(3, 1 + trial % 2);
    std::vector<double> b(m.p());
    for (double& v : b) v = -1.0 + 1.5 * unit(rng);
    const LmiSlice slice = lmi_slice(polytope_vertices(ParameterVector(m, b), m));
    Vector w = Vector::NullaryExpr(slice.vertex_coordinates.cols(), [&] { return 0.05 + unit(rng); });
    w /= w.sum();
    const Vector u = slice.vertex_coordinates * w;
    const LogDetDerivatives at = log_det_derivatives(slice, u);
    ASSERT_TRUE(at.feasible);
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      Vector up = u;
      Vector down = u;
      up(i) += h;
      down(i) -= h;
      const auto plus = log_det_derivatives(slice, up);
      const auto minus = log_det_derivatives(slice, down);
      EXPECT_NEAR((plus.value - minus.value) / (2 * h), at.gradient(i),
                  1e-5 * std::max(1.0, at.gradient.norm()));
      EXPECT_LE(((plus.gradient - minus.gradient) / (2 * h) - at.hessian.col(i)).norm(),
                1e-5 * std::max(1.0, at.hessian.norm()));
    }
  }
}

TEST(AnalyticCenter, ReferenceValues) {
  struct Row {
    double lambda;
    double x, y, z;
  };
  for (const Row& row : {Row{1.0, 0.250, 0.250, 0.250}, Row{0.8, 0.254, 0.254, 0.217},
                         Row{0.4, 0.343, 0.343, -0.023}}) {
    const CenterResult c = analytic_center(two_rule_slice(row.lambda));
    ASSERT_EQ(c.status, CenterStatus::kConverged);
    EXPECT_NEAR(c.coordinates(0), row.x, 5e-4);
    EXPECT_NEAR(c.coordinates(1), row.y, 5e-4);
    EXPECT_NEAR(c.coordinates(2), row.z, 5e-4);
    EXPECT_LE(c.gradient_norm, 1e-8);
  }
  const CenterResult at_transition = analytic_center(two_rule_slice(kSqrt2Minus1));
  EXPECT_NEAR(at_transition.coordinates(0), 1.0 / 3.0, 1e-9);
  EXPECT_NEAR(at_transition.coordinates(1), 1.0 / 3.0, 1e-9);
  EXPECT_NEAR(at_transition.coordinates(2), 0.0, 1e-9);
}

TEST(AnalyticCenter, AgreesWithDerivativeFreeAscent) {
  for (double lambda : {1.0, 0.8, 0.5, 0.4, 0.3}) {
    const CenterResult c = analytic_center(two_rule_slice(lambda));
    ASSERT_EQ(c.status, CenterStatus::kConverged);
    const Vector reference = golden_section_center(lambda, Vector::Constant(3, 0.25));
    EXPECT_LE((c.coordinates - reference).cwiseAbs().maxCoeff(), 1e-6) << "lambda=" << lambda;
  }
  // The lambda = 0.5 center has x = y = 0.2952, not 0.300.
  const CenterResult half = analytic_center(two_rule_slice(0.5));
  EXPECT_NEAR(half.coordinates(0), 0.29521, 1e-5);
  EXPECT_NEAR(half.coordinates(2), 0.09409, 1e-5);
}

TEST(AnalyticCenter, FarRowAndUnboundedSlice) {
  const CenterResult far = analytic_center(two_rule_slice(0.2));
  ASSERT_EQ(far.status, CenterStatus::kConverged);
  EXPECT_NEAR(far.coordinates(0), 1.580, 0.02);
  EXPECT_NEAR(far.coordinates(2), -2.976, 0.02);
  EXPECT_FALSE(far.inside_polytope);

  const CenterResult none = analytic_center(two_rule_slice(0.1));
  EXPECT_EQ(none.status, CenterStatus::kUnbounded);
}

TEST(AnalyticCenter, StationaryAndMaximal) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const InteractionModel m(2, 1);
  const ParameterVector theta(m, {0.0, -0.3, -0.1});
  const LmiSlice slice = lmi_slice(polytope_vertices(theta, m));
  const CenterResult c = analytic_center(slice);
  ASSERT_EQ(c.status, CenterStatus::kConverged);
  EXPECT_LE(log_det_derivatives(slice, c.coordinates).gradient.cwiseAbs().maxCoeff(), 1e-7);
  for (int trial = 0; trial < 1000; ++trial) {
    Vector w = Vector::NullaryExpr(slice.vertex_coordinates.cols(), [&] { return unit(rng); });
    w /= w.sum();
    const LogDetDerivatives at = log_det_derivatives(slice, slice.vertex_coordinates * w);
    if (at.feasible) EXPECT_LE(at.value, c.log_det + 1e-12);
  }
}

TEST(AnalyticCenter, InfeasibleStartThrows) {
  EXPECT_THROW(analytic_center(two_rule_slice(0.5), Vector::Constant(3, 5.0)), InfeasibleStart);
}

TEST(Membership, Examples) {
  const PolytopeModel pm = polytope_vertices(lambda_pair(0.5, 0.5), InteractionModel(2, 1));
  for (std::size_t j = 0; j < pm.vertices.size(); ++j) {
    const Membership at_vertex = polytope_membership(pm, pm.vertices[j].matrix);
    EXPECT_TRUE(at_vertex.inside);
    EXPECT_NEAR(at_vertex.weights(static_cast<Eigen::Index>(j)), 1.0, 1e-12);
  }
  const CenterResult half = analytic_center(lmi_slice(pm));
  EXPECT_TRUE(half.inside_polytope);
  ASSERT_TRUE(half.weights.has_value());
  EXPECT_NEAR(half.weights->sum(), 1.0, 1e-12);
  EXPECT_NEAR((*half.weights)(3), half.coordinates(2), 1e-12);

  const CenterResult low = analytic_center(two_rule_slice(0.4));
  EXPECT_FALSE(low.inside_polytope);
  EXPECT_FALSE(low.weights.has_value());

  EXPECT_THROW(polytope_membership(pm, SymMatrix::from_dense(Matrix::Identity(3, 3))),
               NotInAffineHull);
}

TEST(Membership, InsideNearUnitIntensity) {
  for (double lambda = 0.9; lambda <= 1.0 + 1e-12; lambda += 0.01) {
    EXPECT_TRUE(analytic_center(two_rule_slice(lambda)).inside_polytope) << lambda;
  }
}

TEST(Membership, NonSimplexUsesLeastSquares) {
  const InteractionModel m(4, 1);
  const ParameterVector theta(m, {0.0, -0.2, -0.4, -0.6, -0.8});
  const PolytopeModel pm = polytope_vertices(theta, m);
  ASSERT_FALSE(pm.is_simplex());
  const Vector centroid = pm.vertex_coordinates.rowwise().mean();
  const Membership inside = polytope_membership(pm, centroid);
  EXPECT_TRUE(inside.inside);
  EXPECT_NEAR(inside.weights.sum(), 1.0, 1e-10);
  EXPECT_GE(inside.weights.minCoeff(), 0.0);
  EXPECT_LE((pm.vertex_coordinates * inside.weights - centroid).norm(), 1e-8);
  const Vector far = centroid + Vector::Constant(centroid.size(), 3.0);
  EXPECT_FALSE(polytope_membership(pm, far).inside);
  EXPECT_THROW(polytope_membership(pm, Vector::Zero(2)), DimensionMismatch);
}

TEST(CenterPath, ExitFlagAndWarmStarts) {
  const InteractionModel m(2, 1);
  const auto family = [&](double l) { return diagonal_family(m, l); };
  std::vector<double> grid;
  for (int i = 450; i >= 380; --i) grid.push_back(i / 1000.0);
  const CenterPath warm = center_path(family, m, grid, true);
  const CenterPath cold = center_path(family, m, grid, false);
  ASSERT_TRUE(warm.exit_index.has_value());
  EXPECT_EQ(warm.exit_index, cold.exit_index);
  EXPECT_GT(kSqrt2Minus1, grid[*warm.exit_index]);
  EXPECT_LT(kSqrt2Minus1, grid[*warm.exit_index - 1]);
  EXPECT_NEAR(grid[*warm.exit_index], kSqrt2Minus1, 5e-3);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_LE((warm.rows[i].center.coordinates - cold.rows[i].center.coordinates).norm(), 1e-8);
  }

  const CenterPath single = center_path(family, m, {1.0});
  ASSERT_EQ(single.rows.size(), 1U);
  EXPECT_TRUE(single.rows[0].center.inside_polytope);
  EXPECT_FALSE(single.exit_index.has_value());
  EXPECT_THROW(center_path(family, m, {}), InvalidArgument);
}
