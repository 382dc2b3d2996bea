#pragma once

// Tracking cost, its gradient via the adjoint, the gradient increment
// (Hessian action), Lipschitz estimation by power iteration, projection onto
// the admissible L2 ball, and projected gradient descent.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ebopt/adjoint.hpp"
#include "ebopt/dynamics.hpp"
#include "ebopt/errors.hpp"
#include "ebopt/grid.hpp"

namespace ebopt {

enum class StepMode { InverseLipschitz, Fixed, Backtracking };

inline const char* to_string(StepMode m) {
  switch (m) {
    case StepMode::InverseLipschitz: return "inverse-lipschitz";
    case StepMode::Fixed: return "fixed";
    case StepMode::Backtracking: return "backtracking";
  }
  return "?";
}

struct OptimizerConfig {
  StepMode step_mode = StepMode::InverseLipschitz;
  double fixed_step = 1.0;       // beta for fixed mode, initial trial for backtracking
  double eps = 1e-6;             // stop when ||v^{k+1} - v^k|| <= eps
  int max_iters = 500;
  int power_iters = 200;
  double power_tol = 1e-10;      // relative change of the Rayleigh quotient
  double shrink = 0.5;
  int max_backtracks = 50;
  std::uint64_t seed = 20240611;

  void validate() const {
    require(std::isfinite(fixed_step) && fixed_step > 0.0, ErrorKind::InvalidConfig,
            "optimizer: step must be > 0");
    require(std::isfinite(eps) && eps > 0.0, ErrorKind::InvalidConfig, "optimizer: eps must be > 0");
    require(max_iters >= 1, ErrorKind::InvalidConfig, "optimizer: max_iters must be >= 1");
    require(power_iters >= 1, ErrorKind::InvalidConfig, "optimizer: power_iters must be >= 1");
    require(std::isfinite(power_tol) && power_tol > 0.0, ErrorKind::InvalidConfig,
            "optimizer: power_tol must be > 0");
    require(shrink > 0.0 && shrink < 1.0, ErrorKind::InvalidConfig,
            "optimizer: shrink must lie strictly inside (0, 1)");
    require(max_backtracks >= 1, ErrorKind::InvalidConfig,
            "optimizer: max_backtracks must be >= 1");
  }
};

enum class Termination { ToleranceMet, MaxIters, StationaryGradient };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::ToleranceMet: return "tolerance-met";
    case Termination::MaxIters: return "max-iters";
    case Termination::StationaryGradient: return "stationary-gradient";
  }
  return "?";
}

struct OptimizationReport {
  int iterations = 0;
  std::vector<double> cost_history;       // J(v^k) for every accepted iterate
  std::vector<double> grad_norm_history;  // ||J'(v^k)||
  std::vector<double> step_history;       // step that produced v^k (0 for k = 0)
  SpaceField final_v;
  double final_cost = 0.0;
  Termination termination = Termination::MaxIters;
  std::optional<double> lipschitz_used;
  int rejected_steps = 0;  // backtracking shrinks over the whole run
  std::uint64_t seed = 0;
};

struct LipschitzEstimate {
  double value = 0.0;
  double residual = 0.0;  // ||H x - value x|| / ||H x|| at the last iterate
  int iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
};

/// J(v) = ||u(v) - y||^2_{L2(Omega)} + alpha ||v||^2_{L2(0,L)}.
inline double cost_from_state(const BeamProblem& p, const SpaceField& v, const SpaceTimeField& u) {
  const double misfit = l2_norm_spacetime(u - p.target(), p.grid());
  const double vn = l2_norm_space(v, p.grid());
  return misfit * misfit + p.alpha() * vn * vn;
}

inline double cost(const BeamProblem& p, const SpaceField& v) {
  return cost_from_state(p, v, solve_forward(p, v).u);
}

inline SpaceField gradient_from_state(const BeamProblem& p, const SpaceField& v,
                                      const SpaceTimeField& u) {
  SpaceField g = solve_adjoint(p, u).trace_at_zero;
  g *= -1.0;
  g += 2.0 * p.alpha() * v;
  return g;
}

/// J'(v) = -psi(., 0) + 2 alpha v.
inline SpaceField gradient(const BeamProblem& p, const SpaceField& v) {
  return gradient_from_state(p, v, solve_forward(p, v).u);
}

/// J'(v + dv) - J'(v) = -dpsi(., 0) + 2 alpha dv; independent of v.
inline SpaceField hessian_apply(const BeamProblem& p, const SpaceField& dv) {
  const EvolutionState du = solve_difference(p, dv);
  SpaceField h = solve_adjoint_difference(p, du.u).trace_at_zero;
  h *= -1.0;
  h += 2.0 * p.alpha() * dv;
  return h;
}

inline SpaceField project_ball(const SpaceField& v, double v_c, const Grid& g) {
  require(std::isfinite(v_c) && v_c > 0.0, ErrorKind::InvalidConfig,
          "project_ball: radius v_c must be > 0");
  const double n = l2_norm_space(v, g);
  if (n <= v_c) return v;
  return (v_c / n) * v;
}

/// Dominant eigenvalue of the gradient increment map by power iteration with
/// Rayleigh quotients in the L2(0,L) inner product.
inline LipschitzEstimate estimate_lipschitz(const BeamProblem& p, const OptimizerConfig& cfg) {
  cfg.validate();
  const Grid& g = p.grid();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  SpaceField x(g.space_nodes());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = dist(rng);
  x *= 1.0 / l2_norm_space(x, g);

  LipschitzEstimate est;
  est.seed = cfg.seed;
  double prev = 0.0;
  for (int it = 1; it <= cfg.power_iters; ++it) {
    const SpaceField hx = hessian_apply(p, x);
    const double rq = inner_space(hx, x, g);  // ||x|| = 1
    const double hn = l2_norm_space(hx, g);
    est.value = rq;
    est.iterations = it;
    est.residual = hn > 0.0 ? l2_norm_space(hx - rq * x, g) / hn : 0.0;
    if (hn == 0.0) {
      est.converged = true;
      break;
    }
    if (it > 1 && std::abs(rq - prev) <= cfg.power_tol * std::abs(rq)) {
      est.converged = true;
      break;
    }
    prev = rq;
    x = (1.0 / hn) * hx;
  }
  return est;
}

namespace detail {

struct Evaluation {
  double cost;
  SpaceField grad;
};

inline Evaluation evaluate(const BeamProblem& p, const SpaceField& v) {
  const EvolutionState s = solve_forward(p, v);
  return {cost_from_state(p, v, s.u), gradient_from_state(p, v, s.u)};
}

inline double stationary_threshold(double v_norm) { return 1e-12 * std::max(1.0, v_norm); }

}  // namespace detail

/// Projected gradient descent v <- P(v - beta J'(v)) with a descent safeguard.
inline OptimizationReport optimize(const BeamProblem& p, const OptimizerConfig& cfg,
                                   const SpaceField& v0) {
  cfg.validate();
  const Grid& g = p.grid();
  check_bound(v0, g, "v0");

  OptimizationReport rep;
  rep.seed = cfg.seed;

  double base_step = cfg.fixed_step;
  if (cfg.step_mode == StepMode::InverseLipschitz) {
    const LipschitzEstimate lip = estimate_lipschitz(p, cfg);
    require(lip.value > 0.0 && std::isfinite(lip.value), ErrorKind::NumericalFailure,
            "optimize: Lipschitz estimate is not positive");
    rep.lipschitz_used = lip.value;
    base_step = 1.0 / lip.value;
  }

  SpaceField v = project_ball(v0, p.v_c(), g);
  detail::Evaluation cur = detail::evaluate(p, v);
  rep.cost_history.push_back(cur.cost);
  rep.grad_norm_history.push_back(l2_norm_space(cur.grad, g));
  rep.step_history.push_back(0.0);

  auto accept = [&](SpaceField next, detail::Evaluation ev, double step) {
    v = std::move(next);
    cur = std::move(ev);
    rep.cost_history.push_back(cur.cost);
    rep.grad_norm_history.push_back(l2_norm_space(cur.grad, g));
    rep.step_history.push_back(step);
  };

  rep.termination = Termination::MaxIters;
  for (int k = 0; k < cfg.max_iters; ++k) {
    rep.iterations = k + 1;
    if (rep.grad_norm_history.back() <= detail::stationary_threshold(l2_norm_space(v, g))) {
      rep.termination = Termination::StationaryGradient;
      break;
    }

    double step = base_step;
    bool done = false;
    for (int attempt = 0;; ++attempt) {
      SpaceField next = project_ball(v - step * cur.grad, p.v_c(), g);
      const double move = l2_norm_space(next - v, g);
      detail::Evaluation ev = detail::evaluate(p, next);
      if (move <= cfg.eps) {
        // Converged; keep whichever end point is cheaper.
        if (ev.cost <= cur.cost) accept(std::move(next), std::move(ev), step);
        rep.termination = Termination::ToleranceMet;
        done = true;
        break;
      }
      if (ev.cost < cur.cost) {
        accept(std::move(next), std::move(ev), step);
        break;
      }
      if (attempt + 1 >= cfg.max_backtracks)
        throw Error(ErrorKind::StepFailure,
                    "optimize: no descent step found at iterate " + std::to_string(k) +
                        " after " + std::to_string(cfg.max_backtracks) + " shrinks");
      ++rep.rejected_steps;
      step *= cfg.shrink;
    }
    if (done) break;
  }

  rep.final_v = v;
  rep.final_cost = cur.cost;
  return rep;
}

}  // namespace ebopt
