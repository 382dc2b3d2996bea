#pragma once

// Executable checks of the identities the solver is built on: energy balance,
// the adjoint integral identity, gradient consistency, the Lipschitz bound,
// first-order optimality on the admissible ball, and convergence orders.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ebopt/adjoint.hpp"
#include "ebopt/control.hpp"
#include "ebopt/dynamics.hpp"
#include "ebopt/grid.hpp"
#include "ebopt/random_fields.hpp"

namespace ebopt {

struct VerificationRecord {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string grids;
  std::string detail;
};

struct VerificationReport {
  std::vector<VerificationRecord> records;

  bool passed() const {
    for (const auto& r : records)
      if (!r.passed) return false;
    return true;
  }
};

/// |a - b| / max(|a|, |b|), zero when both vanish.
inline double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

inline std::string grid_label(const Grid& g) {
  return "Nx=" + std::to_string(g.nx()) + ",Nt=" + std::to_string(g.nt());
}

/// Smooth probe field: 4 sine modes with coefficients in [-1, 1] / m^2.
inline SpaceField smooth_probe(const Grid& g, std::mt19937_64& rng) {
  return random_smooth_field(g, rng, 4, 1.0, 2.0);
}

// ---------------------------------------------------------------------------
// Reference problems with closed-form solutions.

namespace cases {

inline constexpr double kPi = std::numbers::pi;

/// k = 1, L = T = pi, w = 0, F = 0, y = 0. With v = sin x the state is
/// sin x sin t.
inline BeamProblem sine_problem(int nx, int nt, double alpha = 0.0, double v_c = 10.0) {
  Grid g(kPi, kPi, nx, nt);
  return BeamProblem(g, SpaceField(g.space_nodes(), 1.0), SpaceField::zeros(g),
                     SpaceTimeField::zeros(g), SpaceTimeField::zeros(g), alpha, v_c);
}

inline SpaceField sine_velocity(const Grid& g) {
  return SpaceField::sample(g, [](double x) { return std::sin(x); });
}

inline SpaceTimeField sine_solution(const Grid& g) {
  return SpaceTimeField::sample(g, [](double x, double t) { return std::sin(x) * std::sin(t); });
}

/// Adjoint case: u = 0, y = sin x, so psi = 2 (1 - cos(t - T)) sin x and
/// psi(x, 0) = 4 sin x when T = pi.
inline BeamProblem adjoint_problem(int nx, int nt) {
  Grid g(kPi, kPi, nx, nt);
  return BeamProblem(g, SpaceField(g.space_nodes(), 1.0), SpaceField::zeros(g),
                     SpaceTimeField::zeros(g),
                     SpaceTimeField::sample(g, [](double x, double) { return std::sin(x); }),
                     0.0, 10.0);
}

/// Manufactured state u* = sin(pi x / L) t^2 with k = 1, w = 0, v = 0.
inline BeamProblem mms_problem(int nx, int nt, double length = 1.0, double horizon = 1.0) {
  Grid g(length, horizon, nx, nt);
  const double kx = kPi / length;
  const double k4 = std::pow(kx, 4);
  auto load = SpaceTimeField::sample(g, [&](double x, double t) {
    return 2.0 * std::sin(kx * x) + k4 * std::sin(kx * x) * t * t;
  });
  return BeamProblem(g, SpaceField(g.space_nodes(), 1.0), SpaceField::zeros(g), std::move(load),
                     SpaceTimeField::zeros(g), 0.0, 10.0);
}

inline SpaceTimeField mms_solution(const Grid& g) {
  const double kx = kPi / g.length();
  return SpaceTimeField::sample(g, [&](double x, double t) { return std::sin(kx * x) * t * t; });
}

}  // namespace cases

// ---------------------------------------------------------------------------

struct EnergyBalance {
  std::vector<double> energy;  // E(t_n)
  std::vector<double> work;    // trapezoid accumulation of int F u_t dx
  double gap = 0.0;            // max_n |E_n - E_0 - W_n| / scale
};

inline EnergyBalance energy_balance(const BeamProblem& p, const EvolutionState& s) {
  const Grid& g = p.grid();
  EnergyBalance b;
  b.energy = energy_series(s, p);
  b.work.assign(g.time_levels(), 0.0);
  auto power = [&](std::size_t n) {
    return g.dx() * detail::trapezoid_dot(p.load().row(n), s.velocity.row(n));
  };
  double prev = power(0);
  for (std::size_t n = 1; n < g.time_levels(); ++n) {
    const double cur = power(n);
    b.work[n] = b.work[n - 1] + 0.5 * g.dt() * (prev + cur);
    prev = cur;
  }
  double scale = 0.0, worst = 0.0;
  for (std::size_t n = 0; n < b.energy.size(); ++n) {
    scale = std::max({scale, b.energy[n], std::abs(b.work[n])});
    worst = std::max(worst, std::abs(b.energy[n] - b.energy[0] - b.work[n]));
  }
  b.gap = scale > 0.0 ? worst / scale : 0.0;
  return b;
}

/// Default tolerance: conservation to round-off when unloaded, otherwise the
/// discretization-order agreement.
inline double default_energy_tolerance(const BeamProblem& p) {
  return max_abs(p.load().flat()) == 0.0 ? 1e-8 : 5e-3;
}

inline VerificationRecord check_energy_identity(const BeamProblem& p, const SpaceField& v,
                                                std::optional<double> tol = std::nullopt) {
  const EnergyBalance b = energy_balance(p, solve_forward(p, v));
  VerificationRecord r;
  r.name = "energy-identity";
  r.measured = b.gap;
  r.tolerance = tol.value_or(default_energy_tolerance(p));
  r.passed = b.gap <= r.tolerance;
  r.grids = grid_label(p.grid());
  return r;
}

struct AdjointIdentity {
  double state_side = 0.0;    // 2 <u - y, du>_{L2(Omega)}
  double adjoint_side = 0.0;  // -<psi(., 0), dv>_{L2(0,L)}
  double gap = 0.0;
  double signed_gap = 0.0;    // (state - adjoint) / max magnitude
};

inline AdjointIdentity adjoint_identity(const BeamProblem& p, const SpaceField& v,
                                        const SpaceField& dv) {
  const Grid& g = p.grid();
  const SpaceTimeField u = solve_forward(p, v).u;
  const SpaceTimeField du = solve_difference(p, dv).u;
  const AdjointState adj = solve_adjoint(p, u);
  AdjointIdentity id;
  id.state_side = 2.0 * inner_spacetime(u - p.target(), du, g);
  id.adjoint_side = -inner_space(adj.trace_at_zero, dv, g);
  id.gap = relative_gap(id.state_side, id.adjoint_side);
  const double scale = std::max(std::abs(id.state_side), std::abs(id.adjoint_side));
  id.signed_gap = scale > 0.0 ? (id.state_side - id.adjoint_side) / scale : 0.0;
  return id;
}

inline VerificationRecord check_adjoint_identity(const BeamProblem& p, const SpaceField& v,
                                                 const SpaceField& dv, double tol = 5e-3) {
  const AdjointIdentity id = adjoint_identity(p, v, dv);
  VerificationRecord r;
  r.name = "adjoint-identity";
  r.measured = id.gap;
  r.tolerance = tol;
  r.passed = id.gap <= tol;
  r.grids = grid_label(p.grid());
  std::ostringstream os;
  os << "state=" << id.state_side << " adjoint=" << id.adjoint_side;
  r.detail = os.str();
  return r;
}

struct GradientProbe {
  double directional = 0.0;  // <J'(v), dv>
  double best_mismatch = 0.0;
  double best_h = 0.0;
};

inline GradientProbe gradient_fd(const BeamProblem& p, const SpaceField& v, const SpaceField& dv,
                                 const std::vector<double>& h_list) {
  GradientProbe gp;
  gp.directional = inner_space(gradient(p, v), dv, p.grid());
  gp.best_mismatch = std::numeric_limits<double>::infinity();
  for (double h : h_list) {
    const double fd = (cost(p, v + h * dv) - cost(p, v - h * dv)) / (2.0 * h);
    const double m = relative_gap(gp.directional, fd);
    if (m < gp.best_mismatch) {
      gp.best_mismatch = m;
      gp.best_h = h;
    }
  }
  return gp;
}

inline VerificationRecord check_gradient_fd(const BeamProblem& p, const SpaceField& v,
                                            const SpaceField& dv,
                                            const std::vector<double>& h_list = {1e-3, 1e-4},
                                            double tol = 1e-3) {
  const GradientProbe gp = gradient_fd(p, v, dv, h_list);
  VerificationRecord r;
  r.name = "gradient-fd";
  r.measured = gp.best_mismatch;
  r.tolerance = tol;
  r.passed = gp.best_mismatch <= tol;
  r.grids = grid_label(p.grid());
  std::ostringstream os;
  os << "h=" << gp.best_h << " directional=" << gp.directional;
  r.detail = os.str();
  return r;
}

/// Random admissible controls: 8 sine modes with coefficients in
/// [-v_c, v_c], projected onto the ball.
inline SpaceField random_admissible(const Grid& g, double v_c, std::mt19937_64& rng) {
  return project_ball(random_smooth_field(g, rng, 8, v_c, 0.0), v_c, g);
}

struct VariationalInequality {
  double min_pairing = 0.0;  // min over samples of <J'(v*), v - v*>
  double grad_norm = 0.0;
};

inline VariationalInequality variational_inequality(const BeamProblem& p, const SpaceField& v_star,
                                                    int n_samples, std::uint64_t seed) {
  const Grid& g = p.grid();
  const SpaceField grad = gradient(p, v_star);
  std::mt19937_64 rng(seed);
  VariationalInequality vi;
  vi.grad_norm = l2_norm_space(grad, g);
  vi.min_pairing = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_samples; ++s) {
    const SpaceField v = random_admissible(g, p.v_c(), rng);
    vi.min_pairing = std::min(vi.min_pairing, inner_space(grad, v - v_star, g));
  }
  return vi;
}

inline VerificationRecord check_variational_inequality(const BeamProblem& p,
                                                       const SpaceField& v_star, int n_samples,
                                                       std::uint64_t seed = 99,
                                                       double tol = 1e-6) {
  const double vn = l2_norm_space(v_star, p.grid());
  require(vn <= p.v_c() * (1.0 + 1e-12), ErrorKind::InvalidInput,
          "variational inequality: v* is not admissible");
  const VariationalInequality vi = variational_inequality(p, v_star, n_samples, seed);
  VerificationRecord r;
  r.name = "variational-inequality";
  r.measured = vi.min_pairing;
  r.tolerance = -tol * (1.0 + vi.grad_norm);
  r.passed = vi.min_pairing >= r.tolerance;
  r.grids = grid_label(p.grid());
  std::ostringstream os;
  os << "samples=" << n_samples << " |J'(v*)|=" << vi.grad_norm;
  r.detail = os.str();
  return r;
}

struct LipschitzProbe {
  double estimate = 0.0;
  double max_ratio = 0.0;  // max ||J'(v+dv) - J'(v)|| / ||dv|| over probes
};

inline LipschitzProbe lipschitz_probe(const BeamProblem& p, const OptimizerConfig& cfg,
                                      int n_probes, std::uint64_t seed) {
  const Grid& g = p.grid();
  LipschitzProbe lp;
  lp.estimate = estimate_lipschitz(p, cfg).value;
  std::mt19937_64 rng(seed);
  for (int s = 0; s < n_probes; ++s) {
    const SpaceField v = random_smooth_field(g, rng, 8, 1.0, 0.0);
    const SpaceField dv = random_smooth_field(g, rng, 8, 1.0, 0.0);
    const double ratio =
        l2_norm_space(gradient(p, v + dv) - gradient(p, v), g) / l2_norm_space(dv, g);
    lp.max_ratio = std::max(lp.max_ratio, ratio);
  }
  return lp;
}

// ---------------------------------------------------------------------------
// Convergence studies.

struct ConvergenceResult {
  std::vector<std::pair<int, int>> levels;
  std::vector<double> errors;
  std::vector<double> orders;  // empty when every error is exactly zero
  bool exact = false;
};

inline double case_error(const std::string& case_id, int nx, int nt) {
  if (case_id == "sine-forward") {
    const BeamProblem p = cases::sine_problem(nx, nt);
    const SpaceTimeField exact = cases::sine_solution(p.grid());
    const SpaceTimeField u = solve_forward(p, cases::sine_velocity(p.grid())).u;
    return l2_norm_spacetime(u - exact, p.grid()) / l2_norm_spacetime(exact, p.grid());
  }
  if (case_id == "mms-forward") {
    const BeamProblem p = cases::mms_problem(nx, nt);
    const SpaceTimeField exact = cases::mms_solution(p.grid());
    const SpaceTimeField u = solve_forward(p, SpaceField::zeros(p.grid())).u;
    return l2_norm_spacetime(u - exact, p.grid()) / l2_norm_spacetime(exact, p.grid());
  }
  if (case_id == "sine-adjoint") {
    const BeamProblem p = cases::adjoint_problem(nx, nt);
    const AdjointState a = solve_adjoint(p, SpaceTimeField::zeros(p.grid()));
    const SpaceField exact =
        SpaceField::sample(p.grid(), [](double x) { return 4.0 * std::sin(x); });
    return max_abs((a.trace_at_zero - exact).values()) / max_abs(exact.values());
  }
  if (case_id == "lemma2-gap") {
    // Same continuous probes on every grid.
    std::mt19937_64 rng(2024);
    const auto cv = random_sine_coefficients(rng, 4, 1.0, 2.0);
    const auto cd = random_sine_coefficients(rng, 4, 1.0, 2.0);
    const BeamProblem p = cases::adjoint_problem(nx, nt);
    return adjoint_identity(p, sine_series(p.grid(), cv), sine_series(p.grid(), cd)).gap;
  }
  if (case_id == "zero-forward") {
    const BeamProblem p = cases::sine_problem(nx, nt);
    return l2_norm_spacetime(solve_forward(p, SpaceField::zeros(p.grid())).u, p.grid());
  }
  throw Error(ErrorKind::InvalidInput, "convergence_study: unknown case '" + case_id + "'");
}

inline ConvergenceResult convergence_errors(const std::string& case_id,
                                            const std::vector<std::pair<int, int>>& levels) {
  require(levels.size() >= 2, ErrorKind::InvalidInput,
          "convergence_study: need at least two levels");
  ConvergenceResult res;
  res.levels = levels;
  for (auto [nx, nt] : levels) res.errors.push_back(case_error(case_id, nx, nt));
  res.exact = true;
  for (double e : res.errors) res.exact = res.exact && e == 0.0;
  if (!res.exact)
    for (std::size_t i = 0; i + 1 < res.errors.size(); ++i)
      res.orders.push_back(std::log2(res.errors[i] / res.errors[i + 1]));
  return res;
}

inline const std::vector<std::pair<int, int>>& default_levels() {
  static const std::vector<std::pair<int, int>> levels{{50, 50}, {100, 100}, {200, 200}};
  return levels;
}

inline VerificationRecord convergence_study(const std::string& case_id,
                                            const std::vector<std::pair<int, int>>& levels =
                                                default_levels(),
                                            double expected = 2.0, double band = 0.3) {
  const ConvergenceResult res = convergence_errors(case_id, levels);
  VerificationRecord r;
  r.name = "order/" + case_id;
  r.tolerance = band;
  std::ostringstream grids, detail;
  for (std::size_t i = 0; i < levels.size(); ++i)
    grids << (i ? ";" : "") << levels[i].first << "x" << levels[i].second;
  r.grids = grids.str();
  detail << "errors=";
  for (std::size_t i = 0; i < res.errors.size(); ++i) detail << (i ? "," : "") << res.errors[i];
  if (res.exact) {
    r.measured = 0.0;
    r.passed = true;
    detail << " order=exact";
  } else {
    r.passed = true;
    double worst = -1.0;
    detail << " orders=";
    for (std::size_t i = 0; i < res.orders.size(); ++i) {
      const double dev = std::abs(res.orders[i] - expected);
      detail << (i ? "," : "") << res.orders[i];
      if (!(dev <= band)) r.passed = false;
      if (!(dev <= worst)) {
        worst = dev;
        r.measured = res.orders[i];
      }
    }
  }
  r.detail = detail.str();
  return r;
}

// ---------------------------------------------------------------------------
// Suites.

enum class Suite { All, Energy, Adjoint, Gradient, VI, Order };

inline Suite parse_suite(const std::string& s) {
  if (s == "all") return Suite::All;
  if (s == "energy") return Suite::Energy;
  if (s == "adjoint") return Suite::Adjoint;
  if (s == "gradient") return Suite::Gradient;
  if (s == "vi") return Suite::VI;
  if (s == "order") return Suite::Order;
  throw Error(ErrorKind::InvalidInput, "unknown verification suite '" + s + "'");
}

struct SuiteOptions {
  std::uint64_t seed = 7;
  int adjoint_pairs = 10;
  int gradient_pairs = 20;
  int lipschitz_probes = 50;
  int vi_samples = 100;
  int reference_n = 200;  // grid for the built-in analytic cases
};

namespace detail {

inline VerificationRecord worst_of(std::string name, const std::vector<VerificationRecord>& rs) {
  VerificationRecord w = rs.front();
  for (const auto& r : rs)
    if (r.measured > w.measured) w = r;
  w.name = std::move(name);
  w.passed = true;
  for (const auto& r : rs) w.passed = w.passed && r.passed;
  w.detail = "worst of " + std::to_string(rs.size()) + "; " + w.detail;
  return w;
}

inline bool wants(Suite s, Suite part) { return s == Suite::All || s == part; }

}  // namespace detail

/// Runs the requested checks on problem p plus the built-in analytic cases.
inline VerificationReport run_verification(const BeamProblem& p, const OptimizerConfig& cfg,
                                           const SpaceField& v0, Suite suite,
                                           const SuiteOptions& opt = {}) {
  VerificationReport rep;
  const Grid& g = p.grid();
  std::mt19937_64 rng(opt.seed);

  if (detail::wants(suite, Suite::Energy)) {
    auto r = check_energy_identity(p, v0 + smooth_probe(g, rng));
    r.name = "energy/config";
    rep.records.push_back(r);

    const BeamProblem sine = cases::sine_problem(opt.reference_n, opt.reference_n);
    r = check_energy_identity(sine, cases::sine_velocity(sine.grid()), 1e-8);
    r.name = "energy/sine-conservation";
    rep.records.push_back(r);

    const BeamProblem mms = cases::mms_problem(opt.reference_n, opt.reference_n);
    r = check_energy_identity(mms, SpaceField::zeros(mms.grid()), 5e-3);
    r.name = "energy/mms-balance";
    rep.records.push_back(r);
  }

  if (detail::wants(suite, Suite::Adjoint)) {
    std::vector<VerificationRecord> rs;
    for (int i = 0; i < opt.adjoint_pairs; ++i) {
      const SpaceField v = smooth_probe(g, rng);
      const SpaceField dv = smooth_probe(g, rng);
      rs.push_back(check_adjoint_identity(p, v, dv));
    }
    rep.records.push_back(detail::worst_of("adjoint/integral-identity", rs));
  }

  if (detail::wants(suite, Suite::Gradient)) {
    std::vector<VerificationRecord> rs;
    for (int i = 0; i < opt.gradient_pairs; ++i) {
      const SpaceField v = smooth_probe(g, rng);
      const SpaceField dv = smooth_probe(g, rng);
      rs.push_back(check_gradient_fd(p, v, dv));
    }
    rep.records.push_back(detail::worst_of("gradient/fd-consistency", rs));

    // Target reproduced exactly: only the regularization term is active, and
    // central differences of the quadratic cost are exact.
    const SpaceField v = smooth_probe(g, rng);
    const SpaceField dv = smooth_probe(g, rng);
    const BeamProblem reg = p.with_alpha(1.0).with_target(solve_forward(p, v).u);
    auto r = check_gradient_fd(reg, v, dv, {1e-3, 1e-4}, 1e-10);
    r.name = "gradient/pure-regularization";
    rep.records.push_back(r);

    const LipschitzProbe lp = lipschitz_probe(p, cfg, opt.lipschitz_probes, opt.seed + 1);
    VerificationRecord lr;
    lr.name = "gradient/lipschitz-bound";
    lr.measured = lp.estimate > 0.0 ? lp.max_ratio / lp.estimate : 0.0;
    lr.tolerance = 1.005;
    lr.passed = lp.max_ratio <= lp.estimate * 1.005 &&
                lp.estimate >= 2.0 * p.alpha() * (1.0 - 1e-6);
    lr.grids = grid_label(g);
    std::ostringstream os;
    os << "L_hat=" << lp.estimate << " max_ratio=" << lp.max_ratio;
    lr.detail = os.str();
    rep.records.push_back(lr);
  }

  if (detail::wants(suite, Suite::VI)) {
    const OptimizationReport opt_rep = optimize(p, cfg, v0);
    VerificationRecord mono;
    mono.name = "vi/cost-monotone";
    mono.tolerance = 0.0;
    mono.passed = true;
    for (std::size_t k = 1; k < opt_rep.cost_history.size(); ++k) {
      const double rise = opt_rep.cost_history[k] - opt_rep.cost_history[k - 1];
      mono.measured = std::max(mono.measured, rise);
      if (rise > 0.0) mono.passed = false;
    }
    mono.grids = grid_label(g);
    mono.detail = std::string("iterations=") + std::to_string(opt_rep.iterations) +
                  " termination=" + to_string(opt_rep.termination);
    rep.records.push_back(mono);

    auto r = check_variational_inequality(p, opt_rep.final_v, opt.vi_samples, opt.seed + 2);
    r.name = "vi/optimality";
    rep.records.push_back(r);
  }

  if (detail::wants(suite, Suite::Order)) {
    for (const char* c : {"sine-forward", "mms-forward", "sine-adjoint", "lemma2-gap"})
      rep.records.push_back(convergence_study(c));
  }
  return rep;
}

}  // namespace ebopt
