#pragma once

// Backward adjoint problems. With tau = T - t the adjoint equation has the same
// form as the forward one, so the forward Newmark integrator is reused on the
// time-reversed source with zero initial data.

#include <cstddef>

#include "ebopt/dynamics.hpp"
#include "ebopt/grid.hpp"

namespace ebopt {

struct AdjointState {
  SpaceTimeField psi;
  SpaceField trace_at_zero;  // psi(., 0)
};

namespace detail {

inline SpaceTimeField reverse_levels(const SpaceTimeField& f) {
  SpaceTimeField r(f.levels(), f.nodes());
  const std::size_t last = f.levels() - 1;
  for (std::size_t n = 0; n <= last; ++n) {
    auto src = f.row(last - n);
    auto dst = r.row(n);
    for (std::size_t i = 0; i < f.nodes(); ++i) dst[i] = src[i];
  }
  return r;
}

/// psi_tt + B psi = source, psi(T) = psi_t(T) = 0.
inline AdjointState solve_backward(const BeamProblem& p, const SpaceTimeField& source) {
  const Grid& g = p.grid();
  const SpaceTimeField reversed = reverse_levels(source);
  const EvolutionState fwd =
      p.integrator().march(&reversed, SpaceField::zeros(g), SpaceField::zeros(g));
  AdjointState out{reverse_levels(fwd.u), SpaceField{}};
  out.trace_at_zero = out.psi.slice(0);
  return out;
}

}  // namespace detail

/// Adjoint driven by the tracking residual: source -2 (u - y).
inline AdjointState solve_adjoint(const BeamProblem& p, const SpaceTimeField& u) {
  check_bound(u, p.grid(), "state u");
  SpaceTimeField source = u - p.target();
  source *= -2.0;
  return detail::solve_backward(p, source);
}

/// Adjoint increment driven by a state increment: source -2 du.
inline AdjointState solve_adjoint_difference(const BeamProblem& p, const SpaceTimeField& du) {
  check_bound(du, p.grid(), "state increment du");
  SpaceTimeField source = du;
  source *= -2.0;
  return detail::solve_backward(p, source);
}

}  // namespace ebopt
