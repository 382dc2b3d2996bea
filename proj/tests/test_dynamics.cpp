#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "ebopt/dynamics.hpp"
#include "ebopt/random_fields.hpp"
#include "ebopt/verify.hpp"

using namespace ebopt;

namespace {

constexpr double kPi = std::numbers::pi;

BeamProblem loaded_problem(int nx, int nt) {
  Grid g(1.5, 1.0, nx, nt);
  auto k = SpaceField::sample(g, [](double x) { return 1.0 + 0.3 * x; });
  auto w = SpaceField::sample(g, [&](double x) { return 0.2 * std::sin(2 * kPi * x / 1.5); });
  auto F = SpaceTimeField::sample(g, [&](double x, double t) { return std::sin(kPi * x / 1.5) * std::cos(3 * t); });
  return BeamProblem(g, k, w, F, SpaceTimeField::zeros(g), 0.0, 1.0);
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

TEST(Forward, ZeroDataGivesZero) {
  const BeamProblem p = cases::sine_problem(30, 30);
  const EvolutionState s = solve_forward(p, SpaceField::zeros(p.grid()));
  EXPECT_EQ(max_abs(s.u.flat()), 0.0);
  EXPECT_EQ(max_abs(s.velocity.flat()), 0.0);
}

TEST(Forward, SineSolutionMidpoint) {
  const BeamProblem p = cases::sine_problem(200, 200);
  const EvolutionState s = solve_forward(p, cases::sine_velocity(p.grid()));
  EXPECT_NEAR(s.u(100, 100), 1.0, 1e-3);
  const SpaceTimeField exact = cases::sine_solution(p.grid());
  EXPECT_LE(l2_norm_spacetime(s.u - exact, p.grid()) / l2_norm_spacetime(exact, p.grid()), 1e-3);
  // Ends stay pinned.
  for (std::size_t n = 0; n < p.grid().time_levels(); ++n) {
    EXPECT_EQ(s.u(n, 0), 0.0);
    EXPECT_EQ(s.u(n, 200), 0.0);
  }
}

TEST(Forward, ManufacturedSolutionOrderTwo) {
  const auto res = convergence_errors("mms-forward", {{25, 25}, {50, 50}, {100, 100}});
  ASSERT_EQ(res.orders.size(), 2u);
  for (double o : res.orders) EXPECT_NEAR(o, 2.0, 0.3);
}

TEST(Forward, SecondOrderInEachDirection) {
  // Refining only dt with a fine space grid, and only dx with a fine time grid.
  auto err = [](int nx, int nt) { return case_error("sine-forward", nx, nt); };
  EXPECT_NEAR(std::log2(err(400, 25) / err(400, 50)), 2.0, 0.3);
  EXPECT_NEAR(std::log2(err(20, 800) / err(40, 800)), 2.0, 0.3);
}

TEST(Difference, ZeroAndSuperposition) {
  const BeamProblem p = loaded_problem(60, 80);
  const Grid& g = p.grid();
  EXPECT_EQ(max_abs(solve_difference(p, SpaceField::zeros(g)).u.flat()), 0.0);

  std::mt19937_64 rng(4);
  const SpaceField v = random_smooth_field(g, rng);
  const SpaceField dv = random_smooth_field(g, rng);
  const SpaceTimeField lhs = solve_forward(p, v + dv).u - solve_forward(p, v).u;
  const SpaceTimeField rhs = solve_difference(p, dv).u;
  const double scale = max_abs(rhs.flat());
  for (std::size_t k = 0; k < lhs.flat().size(); ++k)
    ASSERT_NEAR(lhs.flat()[k], rhs.flat()[k], 1e-11 * scale);
}

TEST(Difference, StabilityConstantIsGridStable) {
  // max ||du|| / ||dv|| over the same continuous probes on two grids.
  auto ratio = [](int n) {
    const BeamProblem p = loaded_problem(n, n);
    std::mt19937_64 rng(12);
    double worst = 0.0;
    for (int s = 0; s < 20; ++s) {
      const SpaceField dv = sine_series(p.grid(), random_sine_coefficients(rng, 6));
      worst = std::max(worst, l2_norm_spacetime(solve_difference(p, dv).u, p.grid()) /
                                  l2_norm_space(dv, p.grid()));
    }
    return worst;
  };
  const double c50 = ratio(50), c100 = ratio(100);
  EXPECT_GT(c50, 0.0);
  EXPECT_NEAR(c50 / c100, 1.0, 0.02);
}

TEST(Energy, ZeroStateHasZeroEnergy) {
  const BeamProblem p = cases::sine_problem(20, 20);
  for (double e : energy_series(solve_forward(p, SpaceField::zeros(p.grid())), p)) EXPECT_EQ(e, 0.0);
}

TEST(Energy, SineCaseValueAndConservation) {
  const BeamProblem p = cases::sine_problem(200, 200);
  const auto e = energy_series(solve_forward(p, cases::sine_velocity(p.grid())), p);
  double drift = 0.0;
  for (double en : e) {
    EXPECT_NEAR(en, kPi / 4.0, 1e-3);
    drift = std::max(drift, std::abs(en - e.front()) / e.front());
  }
  EXPECT_LE(drift, 1e-8);
}

TEST(Energy, UnconditionallyStable) {
  for (auto [nx, nt] : std::vector<std::pair<int, int>>{{200, 4}, {100, 7}, {16, 600}}) {
    const BeamProblem p = cases::sine_problem(nx, nt);
    std::mt19937_64 rng(nx + nt);
    const auto e = energy_series(solve_forward(p, random_smooth_field(p.grid(), rng, 8)), p);
    for (double en : e) EXPECT_LE(en, e.front() * (1.0 + 1e-8)) << nx << "x" << nt;
  }
}

TEST(Energy, LoadedBalanceConverges) {
  auto gap = [](int n) {
    const BeamProblem p = loaded_problem(n, n);
    std::mt19937_64 rng(1);
    return energy_balance(p, solve_forward(p, random_smooth_field(p.grid(), rng, 4, 1.0, 2.0))).gap;
  };
  const double g50 = gap(50), g100 = gap(100), g200 = gap(200);
  EXPECT_LE(g200, 5e-3);
  EXPECT_NEAR(std::log2(g50 / g100), 2.0, 0.3);
  EXPECT_NEAR(std::log2(g100 / g200), 2.0, 0.3);
}

TEST(BeamProblem, Validation) {
  Grid g(1.0, 1.0, 10, 10);
  const SpaceField k(g.space_nodes(), 1.0);
  const auto z = SpaceTimeField::zeros(g);
  SpaceField w = SpaceField::zeros(g);
  EXPECT_EQ(kind_of([&] { BeamProblem(g, k, w, z, z, -1.0, 1.0); }), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([&] { BeamProblem(g, k, w, z, z, 0.0, 0.0); }), ErrorKind::InvalidConfig);
  w[0] = 0.1;
  EXPECT_EQ(kind_of([&] { BeamProblem(g, k, w, z, z, 0.0, 1.0); }), ErrorKind::InvalidInput);
  w[0] = 0.0;
  auto bad = z;
  bad(3, 4) = std::numeric_limits<double>::infinity();
  EXPECT_EQ(kind_of([&] { BeamProblem(g, k, w, bad, z, 0.0, 1.0); }), ErrorKind::InvalidInput);
  SpaceField neg = k;
  neg[2] = -1.0;
  EXPECT_EQ(kind_of([&] { BeamProblem(g, neg, w, z, z, 0.0, 1.0); }), ErrorKind::InvalidStiffness);

  const BeamProblem p(g, k, w, z, z, 0.0, 1.0);
  SpaceField v = SpaceField::zeros(g);
  v[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(kind_of([&] { solve_forward(p, v); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([&] { solve_forward(p, SpaceField(4)); }), ErrorKind::ContractViolation);
}

TEST(BeamProblem, CopiesShareFactorization) {
  const BeamProblem p = cases::sine_problem(20, 20);
  const BeamProblem q = p.with_alpha(0.5).with_radius(2.0);
  EXPECT_EQ(&p.integrator(), &q.integrator());
  EXPECT_EQ(q.alpha(), 0.5);
  EXPECT_EQ(q.v_c(), 2.0);
}

TEST(Forward, Deterministic) {
  const BeamProblem p = loaded_problem(40, 40);
  std::mt19937_64 rng(9);
  const SpaceField v = random_smooth_field(p.grid(), rng);
  EXPECT_TRUE(solve_forward(p, v).u == solve_forward(p, v).u);
}
