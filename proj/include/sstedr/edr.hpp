#pragma once

// ECG-derived respiration:
//   1. running-median baseline removal,
//   2. cubic spline through the R (or S) peak amplitudes of all non-PVC beats,
//   3. synchrosqueezing of that spline, ridge extraction and band
//      reconstruction around the ridge.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "sstedr/beats.hpp"
#include "sstedr/error.hpp"
#include "sstedr/reconstruct.hpp"
#include "sstedr/ridge.hpp"
#include "sstedr/signal.hpp"
#include "sstedr/spline.hpp"
#include "sstedr/sst.hpp"

namespace sstedr {

struct EdrConfig {
  double sigma = 0.125;
  int n_v = 32;
  double gamma = 1e-8;
  double lambda = 10.0;
  std::size_t n_w = 80;
  std::size_t n_xi = 512;
  double detrend_window_s = 0.1;
  /// Sampling interval of the beat-amplitude spline fed to the transform.
  double edr_dt = 0.25;

  void validate() const {
    if (!(sigma > 0.0 && sigma < 1.0)) throw InvalidArgument("EdrConfig: sigma must lie in (0, 1)");
    if (n_v < 1) throw InvalidArgument("EdrConfig: n_v must be positive");
    if (!(gamma > 0.0)) throw InvalidArgument("EdrConfig: gamma must be positive");
    if (!(lambda > 0.0)) throw InvalidArgument("EdrConfig: lambda must be positive");
    if (n_w < 1) throw InvalidArgument("EdrConfig: n_w must be positive");
    if (n_xi < 2) throw InvalidArgument("EdrConfig: n_xi must be at least 2");
    if (!(detrend_window_s > 0.0)) throw InvalidArgument("EdrConfig: detrend window must be positive");
    if (!(edr_dt > 0.0)) throw InvalidArgument("EdrConfig: edr_dt must be positive");
  }

  SstParams sst_params() const {
    SstParams p;
    p.wavelet = WaveletSpec(sigma);
    p.voices = n_v;
    p.gamma = gamma;
    p.n_xi = n_xi;
    return p;
  }
};

/// Knots of the beat-amplitude spline: the non-PVC beats and the ECG value
/// at the sample nearest each beat.
struct BeatAmplitudes {
  std::vector<double> times;
  std::vector<double> values;
};

inline BeatAmplitudes beat_amplitudes(const UniformSignal& ecg, const BeatSeries& beats) {
  beats.validate();
  BeatAmplitudes out;
  const auto last = static_cast<double>(ecg.size() - 1);
  for (std::size_t i = 0; i < beats.size(); ++i) {
    if (beats.labels[i] == BeatLabel::pvc) continue;
    const double pos = std::clamp(std::round((beats.times[i] - ecg.t0()) / ecg.dt()), 0.0, last);
    out.times.push_back(beats.times[i]);
    out.values.push_back(ecg[static_cast<std::size_t>(pos)]);
  }
  if (out.times.size() < 4) throw InsufficientBeats("EDR: fewer than four non-PVC beats");
  return out;
}

/// Traditional EDR: natural cubic spline through the non-PVC beat amplitudes,
/// sampled every edr_dt seconds from the first to the last knot.
inline UniformSignal build_edr_t(const UniformSignal& ecg, const BeatSeries& beats, double edr_dt) {
  if (!(edr_dt > 0.0)) throw InvalidArgument("build_edr_t: edr_dt must be positive");
  auto knots = beat_amplitudes(ecg, beats);
  const double t_first = knots.times.front();
  const double span = knots.times.back() - t_first;
  const auto count = static_cast<std::size_t>(std::floor(span / edr_dt + 1e-9)) + 1;
  if (count < 2) throw InsufficientBeats("build_edr_t: beats span less than one EDR sample");
  const CubicSpline spline(std::move(knots.times), std::move(knots.values));
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = spline(t_first + static_cast<double>(k) * edr_dt);
  return UniformSignal(std::move(out), edr_dt, t_first);
}

struct EdrStats {
  std::size_t beats_total = 0;
  std::size_t pvc_excluded = 0;
  std::size_t pac_retained = 0;
  /// Non-PVC beats falling after the end of the dyadic-truncated record.
  std::size_t dropped_after_truncation = 0;
  bool detector_used = false;
  Polarity polarity = Polarity::r_peak;
};

struct EdrResult {
  /// Instantaneous respiration frequency (Hz), one value per EDR sample.
  std::vector<double> if_e;
  UniformSignal edr;
  Ridge ridge;
  SstMatrix sst;
  EdrStats stats;

  double time(std::size_t m) const { return edr.time(m); }
};

namespace detail {

inline EdrResult run_edr_detrended(const UniformSignal& detrended, const BeatSeries& beats,
                                   const EdrConfig& cfg, bool detector_used) {
  const auto edr_t = build_edr_t(detrended, beats, cfg.edr_dt);
  const auto dyadic = to_dyadic(edr_t);
  if (dyadic.size() < 4) throw InsufficientBeats("EDR: beats span fewer than four EDR samples");

  EdrStats stats;
  stats.beats_total = beats.size();
  stats.pvc_excluded = beats.count(BeatLabel::pvc);
  stats.pac_retained = beats.count(BeatLabel::pac);
  stats.detector_used = detector_used;
  stats.polarity = beats.polarity;
  const double t_end = dyadic.signal().end_time();
  for (std::size_t i = 0; i < beats.size(); ++i) {
    if (beats.labels[i] != BeatLabel::pvc && beats.times[i] > t_end) ++stats.dropped_after_truncation;
  }

  auto sst = synchrosqueeze(dyadic, cfg.sst_params());
  auto ridge = extract_ridge(sst, cfg.lambda);
  auto edr = reconstruct_band(sst, ridge, cfg.n_w);
  auto if_e = ridge.freqs;
  return EdrResult{std::move(if_e), std::move(edr), std::move(ridge), std::move(sst), stats};
}

}  // namespace detail

/// Annotated path: beat times and labels come from the caller.
inline EdrResult run_edr(const UniformSignal& ecg, const BeatSeries& beats, const EdrConfig& cfg) {
  cfg.validate();
  return detail::run_edr_detrended(median_detrend(ecg, cfg.detrend_window_s), beats, cfg, false);
}

/// Detector path: peaks are located on the detrended ECG.
inline EdrResult run_edr(const UniformSignal& ecg, const EdrConfig& cfg) {
  cfg.validate();
  const auto detrended = median_detrend(ecg, cfg.detrend_window_s);
  return detail::run_edr_detrended(detrended, detect_peaks(detrended), cfg, true);
}

}  // namespace sstedr
