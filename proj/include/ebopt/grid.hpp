#pragma once

// Uniform space-time grid on (0,L)x(0,T), nodal fields, and the composite
// trapezoid quadrature used for every L2 inner product and norm.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ebopt/errors.hpp"

namespace ebopt {

class Grid {
 public:
  Grid(double length, double horizon, int nx, int nt)
      : length_(length), horizon_(horizon), nx_(nx), nt_(nt) {
    require(std::isfinite(length) && length > 0.0, ErrorKind::InvalidConfig,
            "grid: L must be positive and finite");
    require(std::isfinite(horizon) && horizon > 0.0, ErrorKind::InvalidConfig,
            "grid: T must be positive and finite");
    require(nx >= 4, ErrorKind::InvalidConfig, "grid: Nx must be >= 4");
    require(nt >= 2, ErrorKind::InvalidConfig, "grid: Nt must be >= 2");
    dx_ = length_ / nx_;
    dt_ = horizon_ / nt_;
  }

  double length() const noexcept { return length_; }
  double horizon() const noexcept { return horizon_; }
  int nx() const noexcept { return nx_; }
  int nt() const noexcept { return nt_; }
  double dx() const noexcept { return dx_; }
  double dt() const noexcept { return dt_; }

  std::size_t space_nodes() const noexcept { return static_cast<std::size_t>(nx_) + 1; }
  std::size_t time_levels() const noexcept { return static_cast<std::size_t>(nt_) + 1; }
  /// Nodes strictly inside (0,L); the unknowns of the bending operator.
  std::size_t interior_nodes() const noexcept { return static_cast<std::size_t>(nx_) - 1; }

  double x(std::size_t i) const noexcept { return static_cast<double>(i) * dx_; }
  double t(std::size_t n) const noexcept { return static_cast<double>(n) * dt_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double length_;
  double horizon_;
  int nx_;
  int nt_;
  double dx_ = 0.0;
  double dt_ = 0.0;
};

/// Function of x sampled at the Nx+1 grid nodes.
class SpaceField {
 public:
  SpaceField() = default;
  explicit SpaceField(std::size_t n, double value = 0.0) : values_(n, value) {}
  explicit SpaceField(std::vector<double> values) : values_(std::move(values)) {}

  static SpaceField zeros(const Grid& g) { return SpaceField(g.space_nodes()); }

  static SpaceField sample(const Grid& g, const std::function<double(double)>& f) {
    SpaceField out(g.space_nodes());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(g.x(i));
    return out;
  }

  std::size_t size() const noexcept { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  SpaceField& operator+=(const SpaceField& o) {
    check_same(o);
    for (std::size_t i = 0; i < size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  SpaceField& operator-=(const SpaceField& o) {
    check_same(o);
    for (std::size_t i = 0; i < size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  SpaceField& operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
  }

  friend SpaceField operator+(SpaceField a, const SpaceField& b) { return a += b; }
  friend SpaceField operator-(SpaceField a, const SpaceField& b) { return a -= b; }
  friend SpaceField operator*(double c, SpaceField a) { return a *= c; }
  friend SpaceField operator*(SpaceField a, double c) { return a *= c; }
  friend bool operator==(const SpaceField&, const SpaceField&) = default;

 private:
  void check_same(const SpaceField& o) const {
    require(o.size() == size(), ErrorKind::ContractViolation,
            "space field size mismatch");
  }

  std::vector<double> values_;
};

/// Function of (x,t) on the full grid; row n holds time level t_n.
class SpaceTimeField {
 public:
  SpaceTimeField() = default;
  SpaceTimeField(std::size_t levels, std::size_t nodes, double value = 0.0)
      : levels_(levels), nodes_(nodes), values_(levels * nodes, value) {}

  static SpaceTimeField zeros(const Grid& g) {
    return SpaceTimeField(g.time_levels(), g.space_nodes());
  }

  static SpaceTimeField sample(const Grid& g,
                               const std::function<double(double, double)>& f) {
    SpaceTimeField out = zeros(g);
    for (std::size_t n = 0; n < out.levels(); ++n)
      for (std::size_t i = 0; i < out.nodes(); ++i) out(n, i) = f(g.x(i), g.t(n));
    return out;
  }

  std::size_t levels() const noexcept { return levels_; }
  std::size_t nodes() const noexcept { return nodes_; }

  double& operator()(std::size_t n, std::size_t i) { return values_[n * nodes_ + i]; }
  double operator()(std::size_t n, std::size_t i) const { return values_[n * nodes_ + i]; }

  std::span<double> row(std::size_t n) { return {values_.data() + n * nodes_, nodes_}; }
  std::span<const double> row(std::size_t n) const {
    return {values_.data() + n * nodes_, nodes_};
  }
  std::span<const double> flat() const noexcept { return values_; }

  SpaceField slice(std::size_t n) const {
    auto r = row(n);
    return SpaceField(std::vector<double>(r.begin(), r.end()));
  }

  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  SpaceTimeField& operator+=(const SpaceTimeField& o) {
    check_same(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    return *this;
  }
  SpaceTimeField& operator-=(const SpaceTimeField& o) {
    check_same(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    return *this;
  }
  SpaceTimeField& operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
  }

  friend SpaceTimeField operator+(SpaceTimeField a, const SpaceTimeField& b) { return a += b; }
  friend SpaceTimeField operator-(SpaceTimeField a, const SpaceTimeField& b) { return a -= b; }
  friend SpaceTimeField operator*(double c, SpaceTimeField a) { return a *= c; }
  friend bool operator==(const SpaceTimeField&, const SpaceTimeField&) = default;

 private:
  void check_same(const SpaceTimeField& o) const {
    require(o.levels_ == levels_ && o.nodes_ == nodes_, ErrorKind::ContractViolation,
            "space-time field shape mismatch");
  }

  std::size_t levels_ = 0;
  std::size_t nodes_ = 0;
  std::vector<double> values_;
};

inline void check_bound(const SpaceField& f, const Grid& g, const char* what = "field") {
  require(f.size() == g.space_nodes(), ErrorKind::ContractViolation,
          std::string(what) + ": expected " + std::to_string(g.space_nodes()) +
              " nodes, got " + std::to_string(f.size()));
}

inline void check_bound(const SpaceTimeField& f, const Grid& g, const char* what = "field") {
  require(f.levels() == g.time_levels() && f.nodes() == g.space_nodes(),
          ErrorKind::ContractViolation,
          std::string(what) + ": shape does not match grid (" +
              std::to_string(g.time_levels()) + "x" + std::to_string(g.space_nodes()) + ")");
}

/// Composite trapezoid weight of node i out of 0..last (unscaled).
inline double trapezoid_weight(std::size_t i, std::size_t last) noexcept {
  return (i == 0 || i == last) ? 0.5 : 1.0;
}

namespace detail {

inline double trapezoid_sum(std::span<const double> f) {
  const std::size_t last = f.size() - 1;
  double s = 0.0;
  for (std::size_t i = 0; i <= last; ++i) s += trapezoid_weight(i, last) * f[i];
  return s;
}

inline double trapezoid_dot(std::span<const double> f, std::span<const double> h) {
  const std::size_t last = f.size() - 1;
  double s = 0.0;
  for (std::size_t i = 0; i <= last; ++i) s += trapezoid_weight(i, last) * f[i] * h[i];
  return s;
}

}  // namespace detail

inline double integrate_space(const SpaceField& f, const Grid& g) {
  check_bound(f, g);
  return g.dx() * detail::trapezoid_sum(f.values());
}

inline double inner_space(const SpaceField& f, const SpaceField& h, const Grid& g) {
  check_bound(f, g);
  check_bound(h, g);
  return g.dx() * detail::trapezoid_dot(f.values(), h.values());
}

inline double l2_norm_space(const SpaceField& f, const Grid& g) {
  return std::sqrt(inner_space(f, f, g));
}

inline double integrate_spacetime(const SpaceTimeField& f, const Grid& g) {
  check_bound(f, g);
  const std::size_t last = f.levels() - 1;
  double s = 0.0;
  for (std::size_t n = 0; n <= last; ++n)
    s += trapezoid_weight(n, last) * detail::trapezoid_sum(f.row(n));
  return g.dx() * g.dt() * s;
}

inline double inner_spacetime(const SpaceTimeField& f, const SpaceTimeField& h, const Grid& g) {
  check_bound(f, g);
  check_bound(h, g);
  const std::size_t last = f.levels() - 1;
  double s = 0.0;
  for (std::size_t n = 0; n <= last; ++n)
    s += trapezoid_weight(n, last) * detail::trapezoid_dot(f.row(n), h.row(n));
  return g.dx() * g.dt() * s;
}

inline double l2_norm_spacetime(const SpaceTimeField& f, const Grid& g) {
  return std::sqrt(inner_spacetime(f, f, g));
}

inline double max_abs(std::span<const double> f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace ebopt
