#pragma once

// Continuous wavelet transform on a geometric scale grid, computed in the
// frequency domain. The mother wavelet is given only through its Fourier
// transform, a Gaussian bump centred on dimensionless frequency 1:
//
//   psi_hat(xi) = 2^(-((xi - 1) / sigma)^2),  xi > 0;  0 otherwise.
//
// Row j of the transform is IDFT[ f_hat(xi_k) * psi_hat(a_j xi_k) * sqrt(a_j) ],
// so a pure tone of frequency f0 peaks near the scale a_j = 1 / f0.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include "sstedr/error.hpp"
#include "sstedr/signal.hpp"

namespace sstedr {

struct WaveletSpec {
  double sigma = 0.15;

  explicit WaveletSpec(double s = 0.15) : sigma(s) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw InvalidArgument("WaveletSpec: sigma must lie in (0, 1)");
  }

  static WaveletSpec respiration() { return WaveletSpec(0.15); }
  static WaveletSpec edr() { return WaveletSpec(0.125); }

  friend bool operator==(const WaveletSpec&, const WaveletSpec&) = default;
};

inline double wavelet_hat(double xi, const WaveletSpec& spec) {
  if (xi <= 0.0) return 0.0;
  const double u = (xi - 1.0) / spec.sigma;
  return std::exp2(-u * u);
}

/// Scales a_j = 2^(j / voices) * dt for j = 1 .. octaves * voices.
struct ScaleGrid {
  std::vector<double> scales;
  int voices = 0;
  int octaves = 0;

  std::size_t size() const noexcept { return scales.size(); }
  friend bool operator==(const ScaleGrid&, const ScaleGrid&) = default;
};

inline ScaleGrid make_scale_grid(int octaves, int voices, double dt) {
  if (voices < 1) throw InvalidArgument("make_scale_grid: need at least one voice per octave");
  if (octaves < 0) throw InvalidArgument("make_scale_grid: negative octave count");
  if (!(dt > 0.0)) throw InvalidArgument("make_scale_grid: dt must be positive");
  ScaleGrid grid;
  grid.voices = voices;
  grid.octaves = octaves;
  const int count = octaves * voices;
  grid.scales.reserve(static_cast<std::size_t>(count));
  for (int j = 1; j <= count; ++j) {
    grid.scales.push_back(std::exp2(static_cast<double>(j) / voices) * dt);
  }
  return grid;
}

/// Wavelet coefficients: rows are scales, columns are time samples.
struct CwtMatrix {
  Eigen::MatrixXcd values;
  ScaleGrid grid;
  double dt = 1.0;

  Eigen::Index rows() const noexcept { return values.rows(); }
  Eigen::Index cols() const noexcept { return values.cols(); }
};

enum class DerivativeScheme {
  /// Multiply the spectrum by i*2*pi*xi before inverting; exact for band-limited rows.
  spectral,
  /// Central difference along time, one-sided at the two edges.
  central,
};

namespace detail {

inline std::vector<std::complex<double>> forward_spectrum(std::span<const double> x) {
  Eigen::FFT<double> fft;
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out;
  fft.fwd(out, in);
  return out;
}

// Frequency (Hz) of DFT bin k for a length-n transform. The Nyquist bin is
// counted as positive.
inline double bin_frequency(std::size_t k, std::size_t n, double dt) {
  const double span = static_cast<double>(n) * dt;
  if (2 * k <= n) return static_cast<double>(k) / span;
  return -static_cast<double>(n - k) / span;
}

// Computes the wavelet rows (or their spectral time derivative) of `x` and
// keeps columns [offset, offset + count).
inline Eigen::MatrixXcd wavelet_rows(std::span<const double> x, double dt, const ScaleGrid& grid,
                                     const WaveletSpec& spec, bool derivative, std::size_t offset,
                                     std::size_t count) {
  const std::size_t n = x.size();
  const auto spectrum = forward_spectrum(x);
  std::vector<double> freq(n);
  for (std::size_t k = 0; k < n; ++k) freq[k] = bin_frequency(k, n, dt);

  Eigen::MatrixXcd out(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(count));
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> filtered(n);
  std::vector<std::complex<double>> row;
  constexpr std::complex<double> i2pi{0.0, 2.0 * std::numbers::pi};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double a = grid.scales[j];
    const double root_a = std::sqrt(a);
    for (std::size_t k = 0; k < n; ++k) {
      const double w = wavelet_hat(a * freq[k], spec);
      if (w == 0.0) {
        filtered[k] = 0.0;
        continue;
      }
      filtered[k] = spectrum[k] * (w * root_a);
      if (derivative) filtered[k] *= i2pi * freq[k];
    }
    fft.inv(row, filtered);
    for (std::size_t m = 0; m < count; ++m) {
      out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m)) = row[offset + m];
    }
  }
  return out;
}

inline Eigen::MatrixXcd central_difference(const Eigen::MatrixXcd& w, double dt) {
  const Eigen::Index n = w.cols();
  Eigen::MatrixXcd d(w.rows(), n);
  if (n < 2) return Eigen::MatrixXcd::Zero(w.rows(), n);
  d.col(0) = (w.col(1) - w.col(0)) / dt;
  d.col(n - 1) = (w.col(n - 1) - w.col(n - 2)) / dt;
  for (Eigen::Index m = 1; m + 1 < n; ++m) d.col(m) = (w.col(m + 1) - w.col(m - 1)) / (2.0 * dt);
  return d;
}

}  // namespace detail

/// CWT of the signal as given (circular boundary; pad beforehand if needed).
inline CwtMatrix cwt(const DyadicSignal& sig, const WaveletSpec& spec, int voices) {
  CwtMatrix out;
  out.grid = make_scale_grid(sig.octaves(), voices, sig.dt());
  out.dt = sig.dt();
  out.values = detail::wavelet_rows(sig.signal().samples(), sig.dt(), out.grid, spec, false, 0, sig.size());
  return out;
}

/// Time derivative of the CWT, D_b W.
inline CwtMatrix cwt_time_derivative(const DyadicSignal& sig, const WaveletSpec& spec, int voices,
                                     DerivativeScheme scheme = DerivativeScheme::central) {
  CwtMatrix out;
  out.grid = make_scale_grid(sig.octaves(), voices, sig.dt());
  out.dt = sig.dt();
  if (scheme == DerivativeScheme::spectral) {
    out.values = detail::wavelet_rows(sig.signal().samples(), sig.dt(), out.grid, spec, true, 0, sig.size());
  } else {
    out.values = detail::central_difference(
        detail::wavelet_rows(sig.signal().samples(), sig.dt(), out.grid, spec, false, 0, sig.size()),
        sig.dt());
  }
  return out;
}

/// CWT and its time derivative of a padded record, restricted to the
/// `count` columns starting at `offset`. For central differences the stencil
/// reaches into the padding, so only the outermost padded columns are one-sided.
struct CwtPair {
  CwtMatrix transform;
  CwtMatrix derivative;
};

inline CwtPair cwt_with_derivative(const UniformSignal& padded, const ScaleGrid& grid,
                                   const WaveletSpec& spec, std::size_t offset, std::size_t count,
                                   DerivativeScheme scheme) {
  if (offset + count > padded.size()) throw InvalidArgument("cwt_with_derivative: crop exceeds record");
  CwtPair out;
  out.transform.grid = grid;
  out.transform.dt = padded.dt();
  out.derivative.grid = grid;
  out.derivative.dt = padded.dt();
  if (scheme == DerivativeScheme::spectral) {
    out.transform.values = detail::wavelet_rows(padded.samples(), padded.dt(), grid, spec, false, offset, count);
    out.derivative.values = detail::wavelet_rows(padded.samples(), padded.dt(), grid, spec, true, offset, count);
    return out;
  }
  const std::size_t lo = offset > 0 ? offset - 1 : 0;
  const std::size_t hi = std::min(padded.size(), offset + count + 1);
  const auto wide = detail::wavelet_rows(padded.samples(), padded.dt(), grid, spec, false, lo, hi - lo);
  const auto diff = detail::central_difference(wide, padded.dt());
  const auto first = static_cast<Eigen::Index>(offset - lo);
  out.transform.values = wide.middleCols(first, static_cast<Eigen::Index>(count));
  out.derivative.values = diff.middleCols(first, static_cast<Eigen::Index>(count));
  return out;
}

}  // namespace sstedr
