#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ebopt/adjoint.hpp"
#include "ebopt/random_fields.hpp"
#include "ebopt/verify.hpp"

using namespace ebopt;

namespace {

BeamProblem variable_problem(int n) {
  Grid g(std::numbers::pi, std::numbers::pi, n, n);
  auto k = SpaceField::sample(g, [](double x) { return 1.0 + 0.5 * x / std::numbers::pi; });
  auto w = SpaceField::sample(g, [](double x) { return 0.3 * std::sin(2 * x); });
  auto F = SpaceTimeField::sample(g, [](double x, double t) { return std::sin(x) * std::cos(t); });
  auto y = SpaceTimeField::sample(g, [](double x, double t) { return 0.5 * std::sin(x) * t; });
  return BeamProblem(g, k, w, F, y, 1e-3, 5.0);
}

}  // namespace

TEST(Adjoint, ZeroSourceGivesZero) {
  const BeamProblem p = cases::adjoint_problem(40, 40);
  const AdjointState a = solve_adjoint(p, p.target());
  EXPECT_EQ(max_abs(a.psi.flat()), 0.0);
  EXPECT_EQ(max_abs(a.trace_at_zero.values()), 0.0);
  EXPECT_EQ(max_abs(solve_adjoint_difference(p, SpaceTimeField::zeros(p.grid())).psi.flat()), 0.0);
}

TEST(Adjoint, AnalyticTrace) {
  const BeamProblem p = cases::adjoint_problem(200, 200);
  const AdjointState a = solve_adjoint(p, SpaceTimeField::zeros(p.grid()));
  const Grid& g = p.grid();
  double err = 0.0;
  for (std::size_t i = 0; i < g.space_nodes(); ++i)
    err = std::max(err, std::abs(a.trace_at_zero[i] - 4.0 * std::sin(g.x(i))));
  EXPECT_LE(err, 1e-3 * 4.0);
  // Final conditions hold at t = T and the trace is row 0.
  for (std::size_t i = 0; i < g.space_nodes(); ++i) {
    EXPECT_EQ(a.psi(g.nt(), i), 0.0);
    EXPECT_EQ(a.psi(0, i), a.trace_at_zero[i]);
  }
  // Interior values follow 2 (1 - cos(t - T)) sin x.
  EXPECT_NEAR(a.psi(100, 100), 2.0, 2e-3);
}

TEST(Adjoint, AnalyticTraceOrderTwo) {
  const auto res = convergence_errors("sine-adjoint", {{25, 25}, {50, 50}, {100, 100}});
  for (double o : res.orders) EXPECT_NEAR(o, 2.0, 0.3);
}

TEST(Adjoint, Linearity) {
  const BeamProblem p = variable_problem(60);
  const Grid& g = p.grid();
  std::mt19937_64 rng(6);
  const SpaceTimeField u = solve_forward(p, random_smooth_field(g, rng)).u;
  const SpaceTimeField du = solve_difference(p, random_smooth_field(g, rng)).u;

  const SpaceTimeField lhs = solve_adjoint(p, u + du).psi - solve_adjoint(p, u).psi;
  const SpaceTimeField rhs = solve_adjoint_difference(p, du).psi;
  const double scale = max_abs(rhs.flat());
  for (std::size_t k = 0; k < lhs.flat().size(); ++k)
    ASSERT_NEAR(lhs.flat()[k], rhs.flat()[k], 1e-10 * scale);

  // Doubling u - y doubles psi.
  const SpaceTimeField r = u - p.target();
  const SpaceTimeField psi1 = solve_adjoint(p, u).psi;
  const SpaceTimeField psi2 = solve_adjoint(p, p.target() + 2.0 * r).psi;
  const double s2 = max_abs(psi2.flat());
  for (std::size_t k = 0; k < psi1.flat().size(); ++k)
    ASSERT_NEAR(psi2.flat()[k], 2.0 * psi1.flat()[k], 1e-12 * s2);
}

TEST(Adjoint, TimeReversalMatchesForward) {
  // With zero final data, psi reversed in time is the forward solution from
  // rest driven by the reversed source.
  const BeamProblem p = variable_problem(40);
  const Grid& g = p.grid();
  const SpaceTimeField u = solve_forward(p, SpaceField::zeros(g)).u;
  const SpaceTimeField source = -2.0 * (u - p.target());
  const SpaceTimeField psi = solve_adjoint(p, u).psi;
  const SpaceTimeField rev_source = detail::reverse_levels(source);
  const SpaceTimeField forward = p.integrator().march(&rev_source, SpaceField::zeros(g),
                                                      SpaceField::zeros(g)).u;
  const SpaceTimeField back = detail::reverse_levels(psi);
  for (std::size_t k = 0; k < back.flat().size(); ++k) ASSERT_EQ(back.flat()[k], forward.flat()[k]);
}

TEST(Adjoint, IntegralIdentityAtFineGrid) {
  const BeamProblem p = cases::adjoint_problem(200, 200);
  std::mt19937_64 rng(21);
  for (int s = 0; s < 10; ++s) {
    const SpaceField v = smooth_probe(p.grid(), rng);
    const SpaceField dv = smooth_probe(p.grid(), rng);
    EXPECT_LE(adjoint_identity(p, v, dv).gap, 5e-3);
  }
}

TEST(Adjoint, IntegralIdentityGapOnVariableStiffness) {
  auto gap = [](int n) {
    const BeamProblem p = variable_problem(n);
    std::mt19937_64 rng(3);
    const auto cv = random_sine_coefficients(rng, 4, 1.0, 2.0);
    const auto cd = random_sine_coefficients(rng, 4, 1.0, 2.0);
    return adjoint_identity(p, sine_series(p.grid(), cv), sine_series(p.grid(), cd)).gap;
  };
  const double g50 = gap(50), g100 = gap(100), g200 = gap(200);
  EXPECT_LE(g200, 5e-3);
  EXPECT_NEAR(std::log2(g50 / g100), 2.0, 0.4);
  EXPECT_NEAR(std::log2(g100 / g200), 2.0, 0.4);
}
