#pragma once

// Discrete bending operator (k u_xx)_xx with simply supported ends
// (u = u_xx = 0 at x = 0, L), assembled as D2^T diag(k) D2 over interior nodes.
//
// D2 is the three-point second difference. The bending-moment condition is
// closed with the odd ghost node u_{-1} = -u_1, which makes the nodal
// curvature vanish at both ends, so only interior curvatures enter the sum.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ebopt/banded.hpp"
#include "ebopt/errors.hpp"
#include "ebopt/grid.hpp"

namespace ebopt {

inline void check_stiffness(const SpaceField& k, const Grid& g) {
  check_bound(k, g, "stiffness k");
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (std::isnan(k[i]) || std::isinf(k[i]))
      throw Error(ErrorKind::InvalidInput,
                  "stiffness k is not finite at node " + std::to_string(i));
    if (!(k[i] > 0.0))
      throw Error(ErrorKind::InvalidStiffness,
                  "stiffness k must be positive; k[" + std::to_string(i) +
                      "] = " + std::to_string(k[i]));
  }
}

class BendingOperator {
 public:
  BendingOperator(const SpaceField& k, const Grid& g) : grid_(g), k_(k) {
    check_stiffness(k, g);
    const std::size_t n = g.interior_nodes();
    const double s = 1.0 / std::pow(g.dx(), 4);
    band_ = SymmetricBandMatrix(n, 2);
    // Interior row r corresponds to node r + 1; curvature rows outside
    // [0, n) belong to the boundary and vanish.
    auto kin = [&](std::ptrdiff_t r) {
      return (r < 0 || r >= static_cast<std::ptrdiff_t>(n)) ? 0.0 : k[static_cast<std::size_t>(r) + 1];
    };
    for (std::size_t r = 0; r < n; ++r) {
      const auto ri = static_cast<std::ptrdiff_t>(r);
      band_.at(r, r) = s * (kin(ri - 1) + 4.0 * kin(ri) + kin(ri + 1));
      if (r + 1 < n) band_.at(r + 1, r) = -2.0 * s * (kin(ri) + kin(ri + 1));
      if (r + 2 < n) band_.at(r + 2, r) = s * kin(ri + 1);
    }
  }

  const Grid& grid() const noexcept { return grid_; }
  const SpaceField& stiffness() const noexcept { return k_; }
  const SymmetricBandMatrix& matrix() const noexcept { return band_; }
  std::size_t size() const noexcept { return band_.size(); }

  /// y = B x on interior vectors (length Nx-1), evaluated in the factored
  /// form D2^T (k D2 x). The stencil weights are exact in floating point, so
  /// smooth modes keep their eigenvalues to round-off; the assembled band
  /// entries (~dx^-4) lose that through cancellation.
  void multiply_interior(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = x.size();
    std::vector<double> m(n);
    auto at = [&](std::span<const double> f, std::ptrdiff_t r) {
      return (r < 0 || r >= static_cast<std::ptrdiff_t>(n)) ? 0.0 : f[static_cast<std::size_t>(r)];
    };
    for (std::size_t r = 0; r < n; ++r) {
      const auto ri = static_cast<std::ptrdiff_t>(r);
      m[r] = k_[r + 1] * (at(x, ri - 1) - 2.0 * x[r] + at(x, ri + 1));
    }
    const double s = 1.0 / std::pow(grid_.dx(), 4);
    for (std::size_t r = 0; r < n; ++r) {
      const auto ri = static_cast<std::ptrdiff_t>(r);
      y[r] = s * (at(m, ri - 1) - 2.0 * m[r] + at(m, ri + 1));
    }
  }

 private:
  Grid grid_;
  SpaceField k_;
  SymmetricBandMatrix band_;
};

inline BendingOperator assemble_bending(const SpaceField& k, const Grid& g) {
  return BendingOperator(k, g);
}

/// Interior entries = B f_interior; boundary entries zero. f must vanish at
/// both ends.
inline SpaceField apply_bending(const BendingOperator& b, const SpaceField& f) {
  const Grid& g = b.grid();
  check_bound(f, g);
  const std::size_t last = f.size() - 1;
  const double tol = 1e-12 * std::max(1.0, max_abs(f.values()));
  require(std::abs(f[0]) <= tol && std::abs(f[last]) <= tol, ErrorKind::ContractViolation,
          "apply_bending: field must vanish at x = 0 and x = L");
  SpaceField out(f.size());
  b.multiply_interior(f.values().subspan(1, last - 1), out.values().subspan(1, last - 1));
  return out;
}

/// Nodal curvature u_xx from the second difference with the odd ghost closure.
inline void curvature(std::span<const double> u, double dx, std::span<double> out) {
  const std::size_t last = u.size() - 1;
  const double s = 1.0 / (dx * dx);
  // ghost u_{-1} = -u_1, u_{N+1} = -u_{N-1}
  out[0] = -2.0 * u[0] * s;
  out[last] = -2.0 * u[last] * s;
  for (std::size_t i = 1; i < last; ++i) out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * s;
}

}  // namespace ebopt
