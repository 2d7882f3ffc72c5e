#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "sstedr/error.hpp"
#include "sstedr/ridge.hpp"
#include "sstedr/signal.hpp"
#include "sstedr/sst.hpp"

namespace sstedr {

/// Complex sum of S over bins c(m) - n_w .. c(m) + n_w, clipped to the grid.
inline std::vector<std::complex<double>> band_sum(const SstMatrix& s, const Ridge& r, std::size_t n_w) {
  if (r.bins.size() != static_cast<std::size_t>(s.cols())) {
    throw InvalidArgument("band_sum: ridge length differs from the transform");
  }
  const auto nb = static_cast<std::size_t>(s.bins());
  std::vector<std::complex<double>> out(r.bins.size());
  for (std::size_t m = 0; m < out.size(); ++m) {
    const std::size_t c = r.bins[m];
    if (c >= nb) throw InvalidArgument("band_sum: ridge bin outside grid");
    const std::size_t lo = c > n_w ? c - n_w : 0;
    const std::size_t hi = std::min(nb - 1, c + n_w);
    std::complex<double> acc = 0.0;
    for (std::size_t l = lo; l <= hi; ++l) {
      acc += s.values(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m));
    }
    out[m] = acc;
  }
  return out;
}

namespace detail {

// Reference tone used for gain calibration: unit cosine with 16 samples per
// cycle on a 1024-sample record.
inline double calibrate_gain(const WaveletSpec& wavelet) {
  constexpr std::size_t n = 1024;
  constexpr double dt = 1.0;
  constexpr double f0 = 1.0 / 16.0;
  std::vector<double> x(n);
  for (std::size_t m = 0; m < n; ++m) x[m] = std::cos(2.0 * std::numbers::pi * f0 * static_cast<double>(m) * dt);
  const DyadicSignal sig(UniformSignal(x, dt), 9);
  SstParams params;
  params.wavelet = wavelet;
  const auto s = synchrosqueeze(sig, params);
  double xy = 0.0;
  double yy = 0.0;
  for (std::size_t m = n / 4; m < 3 * n / 4; ++m) {
    const double y = s.values.col(static_cast<Eigen::Index>(m)).sum().real();
    xy += x[m] * y;
    yy += y * y;
  }
  if (!(yy > 0.0)) throw DegenerateInput("reconstruction gain: calibration tone vanished");
  return xy / yy;
}

}  // namespace detail

/// Real gain turning a squeezed band sum into signal amplitude. Calibrated
/// once per wavelet from a unit reference tone and cached.
inline double reconstruction_gain(const WaveletSpec& wavelet) {
  static std::mutex mutex;
  static std::map<double, double> cache;
  std::scoped_lock lock(mutex);
  const auto it = cache.find(wavelet.sigma);
  if (it != cache.end()) return it->second;
  const double gain = detail::calibrate_gain(wavelet);
  cache.emplace(wavelet.sigma, gain);
  return gain;
}

/// Analytic (complex) reconstruction; its magnitude is the amplitude envelope.
inline std::vector<std::complex<double>> reconstruct_band_analytic(const SstMatrix& s, const Ridge& r,
                                                                   std::size_t n_w) {
  auto out = band_sum(s, r, n_w);
  const double gain = reconstruction_gain(s.wavelet);
  for (auto& v : out) v *= gain;
  return out;
}

inline UniformSignal reconstruct_band(const SstMatrix& s, const Ridge& r, std::size_t n_w) {
  const auto z = reconstruct_band_analytic(s, r, n_w);
  std::vector<double> out(z.size());
  for (std::size_t m = 0; m < z.size(); ++m) out[m] = z[m].real();
  return UniformSignal(std::move(out), s.dt, s.t0);
}

}  // namespace sstedr
