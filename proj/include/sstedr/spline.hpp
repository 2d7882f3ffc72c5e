#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "sstedr/error.hpp"

namespace sstedr {

/// Interpolating cubic spline on strictly increasing knots.
///
/// Natural end conditions set s'' = 0 at both ends. Clamped (complete) end
/// conditions prescribe s' at both ends; the classical uniform error bound
/// |f - s| <= 5/384 h^4 |f''''| is a statement about the clamped spline.
class CubicSpline {
 public:
  struct Clamped {
    double left_slope;
    double right_slope;
  };

  /// Natural spline.
  CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    validate();
    solve(nullptr);
  }

  CubicSpline(std::vector<double> x, std::vector<double> y, Clamped ends) : x_(std::move(x)), y_(std::move(y)) {
    validate();
    solve(&ends);
  }

  double operator()(double t) const {
    const std::size_t n = x_.size();
    std::size_t i = 0;
    if (t >= x_[n - 1]) {
      i = n - 2;
    } else if (t > x_[0]) {
      i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin()) - 1;
    }
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h;
    const double b = (t - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * (h * h) / 6.0;
  }

  std::span<const double> knots() const noexcept { return x_; }
  /// Second derivative at each knot.
  std::span<const double> curvature() const noexcept { return m_; }

 private:
  void validate() const {
    if (x_.size() != y_.size()) throw InvalidArgument("CubicSpline: knot and value counts differ");
    if (x_.size() < 2) throw InvalidArgument("CubicSpline: need at least two knots");
    for (std::size_t i = 1; i < x_.size(); ++i) {
      if (!(x_[i] > x_[i - 1])) throw InvalidArgument("CubicSpline: knots must be strictly increasing");
    }
  }

  // Tridiagonal system for the knot second derivatives, solved by the Thomas
  // algorithm.
  void solve(const Clamped* ends) {
    const std::size_t n = x_.size();
    std::vector<double> lower(n, 0.0), diag(n, 1.0), upper(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1];
      const double h1 = x_[i + 1] - x_[i];
      lower[i] = h0 / 6.0;
      diag[i] = (h0 + h1) / 3.0;
      upper[i] = h1 / 6.0;
      rhs[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    }
    if (ends != nullptr) {
      const double h0 = x_[1] - x_[0];
      const double hn = x_[n - 1] - x_[n - 2];
      diag[0] = h0 / 3.0;
      upper[0] = h0 / 6.0;
      rhs[0] = (y_[1] - y_[0]) / h0 - ends->left_slope;
      lower[n - 1] = hn / 6.0;
      diag[n - 1] = hn / 3.0;
      rhs[n - 1] = ends->right_slope - (y_[n - 1] - y_[n - 2]) / hn;
    }
    for (std::size_t i = 1; i < n; ++i) {
      const double w = lower[i] / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    m_.assign(n, 0.0);
    m_[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
  }

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;
};

}  // namespace sstedr
