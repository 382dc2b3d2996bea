#pragma once

// Symmetric banded storage and a banded Cholesky factorization, used for the
// implicit per-step systems of the time integrator.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ebopt/errors.hpp"

namespace ebopt {

/// Symmetric n x n matrix with half-bandwidth p. Only the lower band is kept:
/// entry (i, i-d) for d = 0..p lives at data_[i*(p+1) + d].
class SymmetricBandMatrix {
 public:
  SymmetricBandMatrix() = default;
  SymmetricBandMatrix(std::size_t n, std::size_t p)
      : n_(n), p_(p), data_(n * (p + 1), 0.0) {}

  std::size_t size() const noexcept { return n_; }
  std::size_t bandwidth() const noexcept { return p_; }

  /// Entry (i, j) with |i - j| <= p. Symmetric access.
  double& at(std::size_t i, std::size_t j) {
    if (i < j) std::swap(i, j);
    return data_[i * (p_ + 1) + (i - j)];
  }
  double at(std::size_t i, std::size_t j) const {
    if (i < j) std::swap(i, j);
    if (i - j > p_) return 0.0;
    return data_[i * (p_ + 1) + (i - j)];
  }

  /// y = A x.
  void multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < n_; ++i) {
      double s = data_[i * (p_ + 1)] * x[i];
      const std::size_t lo = i >= p_ ? i - p_ : 0;
      for (std::size_t j = lo; j < i; ++j) s += data_[i * (p_ + 1) + (i - j)] * x[j];
      const std::size_t hi = std::min(n_ - 1, i + p_);
      for (std::size_t j = i + 1; j <= hi; ++j) s += data_[j * (p_ + 1) + (j - i)] * x[j];
      y[i] = s;
    }
  }

 private:
  std::size_t n_ = 0;
  std::size_t p_ = 0;
  std::vector<double> data_;
};

/// A = L L^T for a symmetric positive definite band matrix; L keeps the band.
class BandCholesky {
 public:
  explicit BandCholesky(const SymmetricBandMatrix& a) : l_(a) {
    const std::size_t n = l_.size();
    const std::size_t p = l_.bandwidth();
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t lo = j >= p ? j - p : 0;
      double s = l_.at(j, j);
      for (std::size_t k = lo; k < j; ++k) s -= l_.at(j, k) * l_.at(j, k);
      if (!(s > 0.0) || !std::isfinite(s))
        throw Error(ErrorKind::NumericalFailure,
                    "banded Cholesky: matrix not positive definite at pivot " +
                        std::to_string(j));
      const double d = std::sqrt(s);
      l_.at(j, j) = d;
      const std::size_t hi = std::min(n - 1, j + p);
      for (std::size_t i = j + 1; i <= hi; ++i) {
        const std::size_t lo_i = i >= p ? i - p : 0;
        double t = l_.at(i, j);
        for (std::size_t k = std::max(lo, lo_i); k < j; ++k) t -= l_.at(i, k) * l_.at(j, k);
        l_.at(i, j) = t / d;
      }
    }
  }

  /// Overwrites b with A^{-1} b.
  void solve_in_place(std::span<double> b) const {
    const std::size_t n = l_.size();
    const std::size_t p = l_.bandwidth();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i >= p ? i - p : 0;
      double s = b[i];
      for (std::size_t k = lo; k < i; ++k) s -= l_.at(i, k) * b[k];
      b[i] = s / l_.at(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
      const std::size_t hi = std::min(n - 1, ii + p);
      double s = b[ii];
      for (std::size_t k = ii + 1; k <= hi; ++k) s -= l_.at(k, ii) * b[k];
      b[ii] = s / l_.at(ii, ii);
    }
  }

 private:
  SymmetricBandMatrix l_;
};

}  // namespace ebopt
