#pragma once

// Independent reference computations shared by the test suites. None of
// these call into the library under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline std::vector<double> tone(std::size_t n, double freq, double dt, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t m = 0; m < n; ++m) x[m] = std::cos(two_pi * freq * static_cast<double>(m) * dt + phase);
  return x;
}

inline double correlation(std::span<const double> a, std::span<const double> b) {
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

/// Penalized log-magnitude functional, evaluated directly from its
/// definition with q the total magnitude of the matrix.
inline double ridge_functional(const Eigen::MatrixXd& mag, const std::vector<std::size_t>& bins, double lambda) {
  const double q = mag.sum();
  double value = 0.0;
  for (Eigen::Index m = 0; m < mag.cols(); ++m) {
    value += std::log(mag(static_cast<Eigen::Index>(bins[static_cast<std::size_t>(m)]), m) / q);
  }
  for (std::size_t m = 1; m < bins.size(); ++m) {
    const double d = static_cast<double>(bins[m]) - static_cast<double>(bins[m - 1]);
    value -= lambda * d * d;
  }
  return value;
}

namespace detail {

inline void enumerate_curves(const Eigen::MatrixXd& logs, double lambda, std::vector<std::size_t>& curve,
                             std::size_t m, double partial, double& best, std::vector<std::size_t>& arg) {
  const auto nb = static_cast<std::size_t>(logs.rows());
  for (std::size_t l = 0; l < nb; ++l) {
    double v = partial + logs(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m));
    if (m > 0) {
      const double d = static_cast<double>(l) - static_cast<double>(curve[m - 1]);
      v -= lambda * d * d;
    }
    curve[m] = l;
    if (m + 1 == curve.size()) {
      if (v > best) {
        best = v;
        arg = curve;
      }
    } else {
      enumerate_curves(logs, lambda, curve, m + 1, v, best, arg);
    }
  }
}

}  // namespace detail

/// Visits every curve (n_bins ^ n_cols of them) and returns the first one,
/// in lexicographic order, attaining the largest functional value.
inline std::vector<std::size_t> brute_force_ridge(const Eigen::MatrixXd& mag, double lambda) {
  const Eigen::MatrixXd logs = (mag.array() / mag.sum()).log().matrix();
  std::vector<std::size_t> curve(static_cast<std::size_t>(mag.cols()), 0), arg;
  double best = -std::numeric_limits<double>::infinity();
  detail::enumerate_curves(logs, lambda, curve, 0, 0.0, best, arg);
  return arg;
}

/// Trapezoid rule of f over [a, b] with n panels.
template <class F>
double integrate(F f, double a, double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  double s = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i < n; ++i) s += f(a + static_cast<double>(i) * h);
  return s * h;
}

}  // namespace oracle
