#pragma once

// Forward beam dynamics u_tt + (k u_xx)_xx = F with simply supported ends,
// integrated by the average-acceleration Newmark scheme (beta = 1/4,
// gamma = 1/2) with identity mass.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ebopt/banded.hpp"
#include "ebopt/errors.hpp"
#include "ebopt/grid.hpp"
#include "ebopt/operators.hpp"

namespace ebopt {

/// Displacement, velocity and acceleration at every time level.
struct EvolutionState {
  SpaceTimeField u;
  SpaceTimeField velocity;
  SpaceTimeField acceleration;
};

/// Newmark stepper for one (grid, k) pair. The factorization of
/// I + dt^2/4 B is built once and shared by every solve on the problem.
class NewmarkIntegrator {
 public:
  static constexpr double kBeta = 0.25;
  static constexpr double kGamma = 0.5;

  NewmarkIntegrator(const SpaceField& k, const Grid& g)
      : grid_(g), bending_(k, g), factor_(effective_matrix(bending_, g.dt())) {}

  const Grid& grid() const noexcept { return grid_; }
  const BendingOperator& bending() const noexcept { return bending_; }

  /// March from (u0, v0) under load (nullptr means F = 0). Boundary entries
  /// of u0, v0 are ignored; the ends are pinned to zero.
  EvolutionState march(const SpaceTimeField* load, const SpaceField& u0,
                       const SpaceField& v0) const {
    const Grid& g = grid_;
    check_bound(u0, g, "initial displacement");
    check_bound(v0, g, "initial velocity");
    if (load) check_bound(*load, g, "load");

    const std::size_t n = g.interior_nodes();
    const std::size_t levels = g.time_levels();
    const double dt = g.dt();
    const double b_dt2 = kBeta * dt * dt;
    const double one_m_b_dt2 = (0.5 - kBeta) * dt * dt;

    EvolutionState s{SpaceTimeField::zeros(g), SpaceTimeField::zeros(g), SpaceTimeField::zeros(g)};
    std::vector<double> u(u0.values().begin() + 1, u0.values().begin() + 1 + n);
    std::vector<double> v(v0.values().begin() + 1, v0.values().begin() + 1 + n);
    std::vector<double> a(n), pred_u(n), pred_v(n), rhs(n);

    auto load_at = [&](std::size_t lvl, std::size_t r) {
      return load ? (*load)(lvl, r + 1) : 0.0;
    };
    auto store = [&](std::size_t lvl) {
      for (std::size_t r = 0; r < n; ++r) {
        s.u(lvl, r + 1) = u[r];
        s.velocity(lvl, r + 1) = v[r];
        s.acceleration(lvl, r + 1) = a[r];
      }
    };

    // a0 = F(0) - B w
    bending_.multiply_interior(u, a);
    for (std::size_t r = 0; r < n; ++r) a[r] = load_at(0, r) - a[r];
    store(0);

    for (std::size_t lvl = 1; lvl < levels; ++lvl) {
      for (std::size_t r = 0; r < n; ++r) {
        pred_u[r] = u[r] + dt * v[r] + one_m_b_dt2 * a[r];
        pred_v[r] = v[r] + (1.0 - kGamma) * dt * a[r];
      }
      // (I + beta dt^2 B) a_{n+1} = F_{n+1} - B u_pred
      bending_.multiply_interior(pred_u, rhs);
      for (std::size_t r = 0; r < n; ++r) rhs[r] = load_at(lvl, r) - rhs[r];
      factor_.solve_in_place(rhs);
      bool finite = true;
      for (std::size_t r = 0; r < n; ++r) {
        a[r] = rhs[r];
        u[r] = pred_u[r] + b_dt2 * a[r];
        v[r] = pred_v[r] + kGamma * dt * a[r];
        finite = finite && std::isfinite(u[r]) && std::isfinite(v[r]);
      }
      if (!finite)
        throw Error(ErrorKind::Divergence,
                    "Newmark march produced a non-finite value at time level " +
                        std::to_string(lvl));
      store(lvl);
    }
    return s;
  }

 private:
  static SymmetricBandMatrix effective_matrix(const BendingOperator& b, double dt) {
    SymmetricBandMatrix m = b.matrix();
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n && j <= i + m.bandwidth(); ++j)
        m.at(j, i) *= kBeta * dt * dt;
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) += 1.0;
    return m;
  }

  Grid grid_;
  BendingOperator bending_;
  BandCholesky factor_;
};

/// All data of the control problem bound to one grid. Immutable; copies share
/// the factorized integrator.
class BeamProblem {
 public:
  BeamProblem(const Grid& g, SpaceField k, SpaceField w, SpaceTimeField load,
              SpaceTimeField target, double alpha, double v_c)
      : grid_(g),
        k_(std::move(k)),
        w_(std::move(w)),
        load_(std::move(load)),
        target_(std::move(target)),
        alpha_(alpha),
        v_c_(v_c) {
    check_bound(w_, g, "initial displacement w");
    check_bound(load_, g, "load F");
    check_bound(target_, g, "target y");
    require(w_.all_finite(), ErrorKind::InvalidInput, "initial displacement w is not finite");
    require(load_.all_finite(), ErrorKind::InvalidInput, "load F is not finite");
    require(target_.all_finite(), ErrorKind::InvalidInput, "target y is not finite");
    const double tol = 1e-12 * std::max(1.0, max_abs(w_.values()));
    require(std::abs(w_[0]) <= tol && std::abs(w_[w_.size() - 1]) <= tol,
            ErrorKind::InvalidInput, "initial displacement w must vanish at x = 0 and x = L");
    require(std::isfinite(alpha) && alpha >= 0.0, ErrorKind::InvalidConfig,
            "alpha must be finite and >= 0");
    require(std::isfinite(v_c) && v_c > 0.0, ErrorKind::InvalidConfig,
            "v_c must be finite and > 0");
    integrator_ = std::make_shared<const NewmarkIntegrator>(k_, g);
  }

  const Grid& grid() const noexcept { return grid_; }
  const SpaceField& stiffness() const noexcept { return k_; }
  const SpaceField& initial_displacement() const noexcept { return w_; }
  const SpaceTimeField& load() const noexcept { return load_; }
  const SpaceTimeField& target() const noexcept { return target_; }
  double alpha() const noexcept { return alpha_; }
  double v_c() const noexcept { return v_c_; }
  const NewmarkIntegrator& integrator() const noexcept { return *integrator_; }

  BeamProblem with_target(SpaceTimeField y) const {
    check_bound(y, grid_, "target y");
    BeamProblem p = *this;
    p.target_ = std::move(y);
    return p;
  }
  BeamProblem with_alpha(double alpha) const {
    require(std::isfinite(alpha) && alpha >= 0.0, ErrorKind::InvalidConfig,
            "alpha must be finite and >= 0");
    BeamProblem p = *this;
    p.alpha_ = alpha;
    return p;
  }
  BeamProblem with_radius(double v_c) const {
    require(std::isfinite(v_c) && v_c > 0.0, ErrorKind::InvalidConfig, "v_c must be > 0");
    BeamProblem p = *this;
    p.v_c_ = v_c;
    return p;
  }

 private:
  Grid grid_;
  SpaceField k_;
  SpaceField w_;
  SpaceTimeField load_;
  SpaceTimeField target_;
  double alpha_;
  double v_c_;
  std::shared_ptr<const NewmarkIntegrator> integrator_;
};

inline EvolutionState solve_forward(const BeamProblem& p, const SpaceField& v) {
  check_bound(v, p.grid(), "initial velocity v");
  require(v.all_finite(), ErrorKind::InvalidInput, "initial velocity v is not finite");
  return p.integrator().march(&p.load(), p.initial_displacement(), v);
}

/// State increment for a velocity increment dv: zero load, zero displacement.
inline EvolutionState solve_difference(const BeamProblem& p, const SpaceField& dv) {
  check_bound(dv, p.grid(), "velocity increment dv");
  require(dv.all_finite(), ErrorKind::InvalidInput, "velocity increment dv is not finite");
  return p.integrator().march(nullptr, SpaceField::zeros(p.grid()), dv);
}

/// E(t_n) = 1/2 int (u_t^2 + k u_xx^2) dx at each level.
inline std::vector<double> energy_series(const EvolutionState& s, const BeamProblem& p) {
  const Grid& g = p.grid();
  check_bound(s.u, g, "displacement");
  check_bound(s.velocity, g, "velocity");
  const SpaceField& k = p.stiffness();
  std::vector<double> e(g.time_levels());
  SpaceField density(g.space_nodes());
  std::vector<double> c(g.space_nodes());
  for (std::size_t n = 0; n < e.size(); ++n) {
    curvature(s.u.row(n), g.dx(), c);
    auto vel = s.velocity.row(n);
    for (std::size_t i = 0; i < c.size(); ++i) density[i] = vel[i] * vel[i] + k[i] * c[i] * c[i];
    e[n] = 0.5 * integrate_space(density, g);
  }
  return e;
}

}  // namespace ebopt
