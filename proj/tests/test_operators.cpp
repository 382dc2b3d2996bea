#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "ebopt/operators.hpp"
#include "ebopt/random_fields.hpp"

using namespace ebopt;

namespace {

constexpr double kPi = std::numbers::pi;

SpaceField ones(const Grid& g) { return SpaceField(g.space_nodes(), 1.0); }

SpaceField variable_k(const Grid& g) {
  return SpaceField::sample(g, [&](double x) { return 1.0 + 0.5 * x / g.length() + 0.2 * std::sin(3 * x); });
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::ContractViolation;
}

}  // namespace

TEST(Bending, HandAssembledNx4) {
  Grid g(2.0, 1.0, 4, 2);
  const BendingOperator b(ones(g), g);
  const double s = 1.0 / std::pow(g.dx(), 4);
  const double expected[3][3] = {{5, -4, 1}, {-4, 6, -4}, {1, -4, 5}};
  ASSERT_EQ(b.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_DOUBLE_EQ(b.matrix().at(i, j), expected[i][j] * s) << i << "," << j;
      // Columns of the matrix-free product agree with the band.
      std::vector<double> e(3, 0.0), col(3);
      e[j] = 1.0;
      b.multiply_interior(e, col);
      EXPECT_DOUBLE_EQ(col[i], expected[i][j] * s);
    }
}

TEST(Bending, InteriorRowsFollowBiharmonicStencil) {
  Grid g(1.0, 1.0, 10, 2);
  const BendingOperator b(ones(g), g);
  const double s = std::pow(g.dx(), 4);
  for (std::size_t r = 2; r + 2 < b.size(); ++r) {
    EXPECT_NEAR(b.matrix().at(r, r - 2) * s, 1.0, 1e-12);
    EXPECT_NEAR(b.matrix().at(r, r - 1) * s, -4.0, 1e-12);
    EXPECT_NEAR(b.matrix().at(r, r) * s, 6.0, 1e-12);
  }
  EXPECT_NEAR(b.matrix().at(0, 0) * s, 5.0, 1e-12);
}

TEST(Bending, ZeroMapsToZero) {
  Grid g(kPi, 1.0, 20, 2);
  const auto b = assemble_bending(variable_k(g), g);
  const SpaceField out = apply_bending(b, SpaceField::zeros(g));
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], 0.0);
}

TEST(Bending, SineEigenvalues) {
  Grid g(kPi, 1.0, 64, 2);
  const auto b = assemble_bending(ones(g), g);
  const double dx = g.dx();
  for (int m : {1, 2, 5, 17}) {
    const auto f = SpaceField::sample(g, [&](double x) { return std::sin(m * x); });
    const double lambda = 16.0 / std::pow(dx, 4) * std::pow(std::sin(m * dx / 2.0), 4);
    const SpaceField bf = apply_bending(b, f);
    for (std::size_t i = 1; i + 1 < f.size(); ++i)
      EXPECT_NEAR(bf[i], lambda * f[i], 1e-9 * lambda) << "m=" << m << " i=" << i;
  }
  // lambda_1 -> 1 = m^4 under refinement
  Grid fine(kPi, 1.0, 400, 2);
  const double l1 = 16.0 / std::pow(fine.dx(), 4) * std::pow(std::sin(fine.dx() / 2.0), 4);
  EXPECT_NEAR(l1, 1.0, 1e-4);
}

TEST(Bending, ConsistencyOrderTwo) {
  // k = 2, f = sin(pi x): (k f'')'' = 2 pi^4 sin(pi x).
  auto err = [](int n) {
    Grid g(1.0, 1.0, n, 2);
    const auto b = assemble_bending(SpaceField(g.space_nodes(), 2.0), g);
    const auto f = SpaceField::sample(g, [](double x) { return std::sin(kPi * x); });
    const SpaceField bf = apply_bending(b, f);
    double e = 0.0;
    for (std::size_t i = 1; i + 1 < f.size(); ++i)
      e = std::max(e, std::abs(bf[i] - 2.0 * std::pow(kPi, 4) * f[i]));
    return e;
  };
  EXPECT_NEAR(std::log2(err(20) / err(40)), 2.0, 0.3);
  EXPECT_NEAR(std::log2(err(40) / err(80)), 2.0, 0.3);
}

TEST(Bending, SymmetricAndPositive) {
  Grid g(1.7, 1.0, 90, 2);
  const auto b = assemble_bending(variable_k(g), g);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    SpaceField f(g.space_nodes()), h(g.space_nodes());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
      f[i] = d(rng);
      h[i] = d(rng);
    }
    const double a = inner_space(apply_bending(b, f), h, g);
    const double c = inner_space(f, apply_bending(b, h), g);
    EXPECT_LE(std::abs(a - c), 1e-12 * std::max(std::abs(a), std::abs(c)));
    EXPECT_GT(inner_space(apply_bending(b, f), f, g), 0.0);
  }
}

TEST(Bending, Linear) {
  Grid g(1.0, 1.0, 40, 2);
  const auto b = assemble_bending(variable_k(g), g);
  std::mt19937_64 rng(2);
  const SpaceField f = random_smooth_field(g, rng);
  const SpaceField h = random_smooth_field(g, rng);
  const SpaceField lhs = apply_bending(b, 2.5 * f + (-1.5) * h);
  const SpaceField rhs = 2.5 * apply_bending(b, f) + (-1.5) * apply_bending(b, h);
  const double scale = max_abs(rhs.values());
  for (std::size_t i = 0; i < lhs.size(); ++i) EXPECT_NEAR(lhs[i], rhs[i], 1e-12 * scale);
}

TEST(Bending, RejectsBadStiffness) {
  Grid g(1.0, 1.0, 8, 2);
  SpaceField k = ones(g);
  k[3] = -1.0;
  EXPECT_EQ(kind_of([&] { BendingOperator(k, g); }), ErrorKind::InvalidStiffness);
  k[3] = 0.0;
  EXPECT_EQ(kind_of([&] { BendingOperator(k, g); }), ErrorKind::InvalidStiffness);
  k[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(kind_of([&] { BendingOperator(k, g); }), ErrorKind::InvalidInput);
  k[3] = std::numeric_limits<double>::infinity();
  EXPECT_EQ(kind_of([&] { BendingOperator(k, g); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([&] { BendingOperator(SpaceField(5, 1.0), g); }), ErrorKind::ContractViolation);
}

TEST(Bending, RejectsNonzeroBoundary) {
  Grid g(1.0, 1.0, 8, 2);
  const auto b = assemble_bending(ones(g), g);
  SpaceField f(g.space_nodes(), 1.0);
  EXPECT_EQ(kind_of([&] { apply_bending(b, f); }), ErrorKind::ContractViolation);
}

TEST(Curvature, GhostClosure) {
  Grid g(kPi, 1.0, 100, 2);
  const auto f = SpaceField::sample(g, [](double x) { return std::sin(x); });
  std::vector<double> c(f.size());
  curvature(f.values(), g.dx(), c);
  EXPECT_NEAR(c[0], 0.0, 1e-12);
  EXPECT_NEAR(c[50], -1.0, 1e-3);
}
