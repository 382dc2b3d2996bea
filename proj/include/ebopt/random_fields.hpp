#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "ebopt/grid.hpp"

namespace ebopt {

/// Smooth random field sum_m c_m sin(m pi x / L) with c_m uniform in
/// [-amp, amp] / m^decay. Modes are evaluated on the grid, so the same
/// coefficients give the same continuous function on every grid.
inline std::vector<double> random_sine_coefficients(std::mt19937_64& rng, int modes,
                                                    double amp = 1.0, double decay = 0.0) {
  std::uniform_real_distribution<double> dist(-amp, amp);
  std::vector<double> c(static_cast<std::size_t>(modes));
  for (int m = 1; m <= modes; ++m)
    c[static_cast<std::size_t>(m - 1)] = dist(rng) / std::pow(static_cast<double>(m), decay);
  return c;
}

inline SpaceField sine_series(const Grid& g, const std::vector<double>& coeffs) {
  const double w = std::numbers::pi / g.length();
  SpaceField f(g.space_nodes());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    double s = 0.0;
    for (std::size_t m = 0; m < coeffs.size(); ++m)
      s += coeffs[m] * std::sin(static_cast<double>(m + 1) * w * g.x(i));
    f[i] = s;
  }
  return f;
}

inline SpaceField random_smooth_field(const Grid& g, std::mt19937_64& rng, int modes = 8,
                                      double amp = 1.0, double decay = 0.0) {
  return sine_series(g, random_sine_coefficients(rng, modes, amp, decay));
}

}  // namespace ebopt
