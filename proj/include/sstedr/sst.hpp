#pragma once

// Synchrosqueezing: per-cell instantaneous-frequency estimates from the CWT
// (the phase transform), then reassignment of each coefficient to the
// nearest bin of a log-spaced frequency grid.

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "sstedr/cwt.hpp"
#include "sstedr/error.hpp"
#include "sstedr/signal.hpp"

namespace sstedr {

/// Instantaneous-frequency estimate (Hz) per CWT cell. Cells whose
/// coefficient magnitude does not exceed the threshold hold +infinity.
struct PhaseMatrix {
  Eigen::MatrixXd values;

  static constexpr double excluded_marker = std::numeric_limits<double>::infinity();
  bool excluded(Eigen::Index j, Eigen::Index m) const { return std::isinf(values(j, m)); }
};

/// Geometric grid xi_l = 2^(l * delta_xi) * xi_min, l = 0 .. count-1, from
/// 1/(n dt) up to the Nyquist frequency 1/(2 dt).
struct FreqGrid {
  std::vector<double> xi;
  double xi_min = 0.0;
  double xi_max = 0.0;
  double delta_xi = 0.0;  // log2 step between neighbouring bins

  std::size_t size() const noexcept { return xi.size(); }
};

inline FreqGrid make_freq_grid(std::size_t n, std::size_t n_xi, double dt) {
  if (n < 4 || !std::has_single_bit(n)) {
    throw InvalidArgument("make_freq_grid: n must be a power of two >= 4");
  }
  if (n_xi < 2) throw InvalidArgument("make_freq_grid: need at least two frequency bins");
  if (!(dt > 0.0)) throw InvalidArgument("make_freq_grid: dt must be positive");
  FreqGrid g;
  g.xi_min = 1.0 / (static_cast<double>(n) * dt);
  g.xi_max = 1.0 / (2.0 * dt);
  g.delta_xi = std::log2(static_cast<double>(n) / 2.0) / static_cast<double>(n_xi - 1);
  g.xi.resize(n_xi);
  for (std::size_t l = 0; l < n_xi; ++l) {
    g.xi[l] = std::exp2(static_cast<double>(l) * g.delta_xi) * g.xi_min;
  }
  g.xi.front() = g.xi_min;
  g.xi.back() = g.xi_max;
  return g;
}

/// Squeezed coefficients: rows are frequency bins, columns are time samples.
struct SstMatrix {
  Eigen::MatrixXcd values;
  FreqGrid grid;
  double dt = 1.0;
  double t0 = 0.0;
  WaveletSpec wavelet;

  Eigen::Index bins() const noexcept { return values.rows(); }
  Eigen::Index cols() const noexcept { return values.cols(); }
  double time(Eigen::Index m) const noexcept { return t0 + static_cast<double>(m) * dt; }
};

inline PhaseMatrix phase_transform(const CwtMatrix& w, const CwtMatrix& dw, double gamma) {
  if (w.rows() != dw.rows() || w.cols() != dw.cols() || !(w.grid == dw.grid)) {
    throw InvalidArgument("phase_transform: transform and derivative disagree in shape or grid");
  }
  if (!(gamma > 0.0)) throw InvalidArgument("phase_transform: gamma must be positive");
  PhaseMatrix out;
  out.values.resize(w.rows(), w.cols());
  constexpr double inv_2pi = 0.5 / std::numbers::pi;
  for (Eigen::Index m = 0; m < w.cols(); ++m) {
    for (Eigen::Index j = 0; j < w.rows(); ++j) {
      const std::complex<double> c = w.values(j, m);
      if (std::abs(c) <= gamma) {
        out.values(j, m) = PhaseMatrix::excluded_marker;
        continue;
      }
      // Re(-i/(2 pi) * dW / W) = Im(dW / W) / (2 pi)
      out.values(j, m) = std::imag(dw.values(j, m) / c) * inv_2pi;
    }
  }
  return out;
}

/// Index of the grid bin a frequency estimate is squeezed into, or -1 when
/// the cell is dropped (excluded, non-positive, or outside the grid).
inline long squeeze_bin(double omega, const FreqGrid& grid) {
  if (!std::isfinite(omega) || !(omega > 0.0)) return -1;
  const double pos = std::log2(omega / grid.xi_min) / grid.delta_xi;
  if (!(pos > -1.0) || pos > static_cast<double>(grid.size())) return -1;
  const long l = std::lround(pos);
  if (l < 0 || l >= static_cast<long>(grid.size())) return -1;
  return l;
}

inline SstMatrix squeeze(const CwtMatrix& w, const PhaseMatrix& omega, const FreqGrid& grid, double gamma) {
  if (omega.values.rows() != w.rows() || omega.values.cols() != w.cols()) {
    throw InvalidArgument("squeeze: phase matrix shape differs from the transform");
  }
  if (static_cast<std::size_t>(w.rows()) != w.grid.size()) {
    throw InvalidArgument("squeeze: transform rows differ from its scale grid");
  }
  SstMatrix out;
  out.grid = grid;
  out.dt = w.dt;
  out.values = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(grid.size()), w.cols());
  if (w.rows() == 0) return out;
  const double measure = std::numbers::ln2 / static_cast<double>(w.grid.voices);
  std::vector<double> weight(w.grid.size());
  for (std::size_t j = 0; j < weight.size(); ++j) weight[j] = measure / std::sqrt(w.grid.scales[j]);

  for (Eigen::Index m = 0; m < w.cols(); ++m) {
    for (Eigen::Index j = 0; j < w.rows(); ++j) {
      const std::complex<double> c = w.values(j, m);
      if (std::abs(c) <= gamma) continue;
      const long l = squeeze_bin(omega.values(j, m), grid);
      if (l < 0) continue;
      out.values(l, m) += c * weight[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

struct SstParams {
  WaveletSpec wavelet = WaveletSpec::respiration();
  int voices = 32;
  double gamma = 1e-8;
  std::size_t n_xi = 512;
  DerivativeScheme derivative = DerivativeScheme::spectral;
};

/// Full transform of a dyadic record: reflect-pad by n/2 on each side, CWT
/// and derivative on the padded record, keep the central n columns, then
/// phase transform and squeeze. The scale grid covers L octaves of the
/// unpadded record.
inline SstMatrix synchrosqueeze(const DyadicSignal& sig, const SstParams& params) {
  const std::size_t n = sig.size();
  if (n < 4) throw InvalidArgument("synchrosqueeze: record must hold at least four samples");
  const std::size_t pad = n / 2;
  const auto padded = reflect_pad(sig.signal(), pad);
  const auto grid = make_scale_grid(sig.octaves(), params.voices, sig.dt());
  auto pair = cwt_with_derivative(padded, grid, params.wavelet, pad, n, params.derivative);
  const auto omega = phase_transform(pair.transform, pair.derivative, params.gamma);
  pair.derivative.values.resize(0, 0);
  auto out = squeeze(pair.transform, omega, make_freq_grid(n, params.n_xi, sig.dt()), params.gamma);
  out.t0 = sig.signal().t0();
  out.wavelet = params.wavelet;
  return out;
}

}  // namespace sstedr
