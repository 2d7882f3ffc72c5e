#pragma once

// Ground-truth generators. Respiration follows the AM-FM model
//   R(t) = A(t) s(2 pi phi(t)) + W(t),
// where s is 2 pi-periodic with a dominant first harmonic and phi'(t) is the
// instantaneous frequency. The synthetic ECG is a train of narrow spikes whose
// heights are scaled by (1 + depth * R(t_i)) at each beat time.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "sstedr/beats.hpp"
#include "sstedr/error.hpp"
#include "sstedr/signal.hpp"

namespace sstedr {

/// One Fourier term of the shape function: c cos(k theta) + s sin(k theta).
struct ShapeHarmonic {
  int order = 1;
  double cos_coef = 1.0;
  double sin_coef = 0.0;
};

struct RespirationSpec {
  std::function<double(double)> amplitude = [](double) { return 1.0; };
  /// phi(t) in cycles.
  std::function<double(double)> phase = [](double t) { return 0.3 * t; };
  /// phi'(t) in Hz.
  std::function<double(double)> phase_rate = [](double) { return 0.3; };
  std::vector<ShapeHarmonic> shape{{1, 1.0, 0.0}};
  /// Every harmonic other than the first must stay below delta times the first.
  double delta = 0.5;
  double noise_sd = 0.0;
  double duration = 600.0;
  double dt = 0.05;
  double t0 = 0.0;

  static RespirationSpec tone(double freq_hz, double duration_s, double dt_s) {
    RespirationSpec s;
    s.phase = [freq_hz](double t) { return freq_hz * t; };
    s.phase_rate = [freq_hz](double) { return freq_hz; };
    s.duration = duration_s;
    s.dt = dt_s;
    return s;
  }

  /// Linear chirp: phi'(t) = start_hz + slope_hz_per_s * t.
  static RespirationSpec chirp(double start_hz, double slope_hz_per_s, double duration_s, double dt_s) {
    RespirationSpec s;
    s.phase = [=](double t) { return start_hz * t + 0.5 * slope_hz_per_s * t * t; };
    s.phase_rate = [=](double t) { return start_hz + slope_hz_per_s * t; };
    s.duration = duration_s;
    s.dt = dt_s;
    return s;
  }

  std::size_t sample_count() const { return static_cast<std::size_t>(std::llround(duration / dt)); }

  double shape_at(double theta) const {
    double v = 0.0;
    for (const auto& h : shape) {
      v += h.cos_coef * std::cos(h.order * theta) + h.sin_coef * std::sin(h.order * theta);
    }
    return v;
  }

  /// Noise-free value A(t) s(2 pi phi(t)).
  double clean(double t) const { return amplitude(t) * shape_at(2.0 * std::numbers::pi * phase(t)); }

  void validate() const {
    if (!(dt > 0.0) || !(duration > 0.0)) throw InvalidArgument("RespirationSpec: dt and duration must be positive");
    if (sample_count() < 2) throw InvalidArgument("RespirationSpec: record shorter than two samples");
    if (!(noise_sd >= 0.0)) throw InvalidArgument("RespirationSpec: negative noise level");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("RespirationSpec: delta must lie in (0, 1)");
    if (!amplitude || !phase || !phase_rate) throw InvalidArgument("RespirationSpec: missing function");
    double first = 0.0;
    for (const auto& h : shape) {
      if (h.order == 1) first = std::hypot(h.cos_coef, h.sin_coef);
      if (h.order < 1) throw InvalidArgument("RespirationSpec: harmonic orders start at 1");
    }
    if (!(first > 0.0)) throw InvalidArgument("RespirationSpec: shape needs a first harmonic");
    for (const auto& h : shape) {
      if (h.order != 1 && !(std::hypot(h.cos_coef, h.sin_coef) < delta * first)) {
        throw InvalidArgument("RespirationSpec: higher harmonic not dominated by the first");
      }
    }
    const std::size_t n = sample_count();
    for (std::size_t m = 0; m < n; ++m) {
      const double t = t0 + static_cast<double>(m) * dt;
      if (!(amplitude(t) > 0.0)) throw InvalidArgument("RespirationSpec: amplitude must stay positive");
      if (!(phase_rate(t) > 0.0)) throw InvalidArgument("RespirationSpec: phase must be increasing");
    }
  }
};

struct RespirationRecord {
  UniformSignal signal;
  std::vector<double> true_iif;
};

inline RespirationRecord gen_respiration(const RespirationSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t n = spec.sample_count();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> x(n), iif(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double t = spec.t0 + static_cast<double>(m) * spec.dt;
    x[m] = spec.clean(t);
    if (spec.noise_sd > 0.0) x[m] += spec.noise_sd * noise(rng);
    iif[m] = spec.phase_rate(t);
  }
  return {UniformSignal(std::move(x), spec.dt, spec.t0), std::move(iif)};
}

enum class RrModel {
  metronomic,
  /// Independent draws, uniform on [rr_min, rr_max].
  af_uniform,
  /// RR changes linearly in time from rr_start to rr_end.
  ramping,
};

struct EcgSpec {
  RrModel rr_model = RrModel::metronomic;
  double rr = 0.8;
  double rr_min = 0.4;
  double rr_max = 1.2;
  double rr_start = 1.0;
  double rr_end = 0.7;

  /// Raised-cosine QRS spike, full width in seconds.
  double beat_width = 0.04;
  double beat_amplitude = 1.0;

  RespirationSpec respiration = RespirationSpec::tone(0.25, 1.0, 1.0);
  double modulation_depth = 0.2;

  /// Beats drawn as premature atrial complexes: early by `prematurity` of the
  /// scheduled interval, normal morphology and modulation.
  double pac_fraction = 0.0;
  /// Premature ventricular complexes: early, wide, unmodulated, followed by a
  /// compensatory pause.
  double pvc_fraction = 0.0;
  double prematurity = 0.3;
  double pvc_amplitude = 1.6;
  double pvc_width = 0.12;

  double drift_amplitude = 0.0;
  double drift_hz = 0.05;
  double noise_sd = 0.0;
  double duration = 300.0;
  double dt = 0.001;

  void validate() const {
    if (!(dt > 0.0) || !(duration > 4.0 * dt)) throw InvalidArgument("EcgSpec: bad dt or duration");
    if (!(beat_width > 0.0) || !(pvc_width > 0.0)) throw InvalidArgument("EcgSpec: beat width must be positive");
    if (!(noise_sd >= 0.0)) throw InvalidArgument("EcgSpec: negative noise level");
    if (!(modulation_depth >= 0.0)) throw InvalidArgument("EcgSpec: negative modulation depth");
    if (!(pac_fraction >= 0.0 && pvc_fraction >= 0.0 && pac_fraction + pvc_fraction <= 1.0)) {
      throw InvalidArgument("EcgSpec: ectopic fractions must lie in [0, 1]");
    }
    if (!(prematurity >= 0.0 && prematurity < 1.0)) throw InvalidArgument("EcgSpec: prematurity must lie in [0, 1)");
    switch (rr_model) {
      case RrModel::metronomic:
        if (!(rr > 0.0)) throw InvalidArgument("EcgSpec: RR must be positive");
        break;
      case RrModel::af_uniform:
        if (!(rr_min > 0.0 && rr_max >= rr_min)) throw InvalidArgument("EcgSpec: need 0 < rr_min <= rr_max");
        break;
      case RrModel::ramping:
        if (!(rr_start > 0.0 && rr_end > 0.0)) throw InvalidArgument("EcgSpec: RR must be positive");
        break;
    }
  }
};

struct EcgRecord {
  UniformSignal ecg;
  /// Ground-truth beat times (on the sample grid) and labels.
  BeatSeries beats;
  /// Respiration phi'(t) on the ECG sample grid.
  std::vector<double> true_iif;
  /// Spike height of each beat.
  std::vector<double> amplitudes;
};

inline EcgRecord gen_ecg(const EcgSpec& spec, std::uint64_t seed) {
  spec.validate();
  const auto n = static_cast<std::size_t>(std::llround(spec.duration / spec.dt));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const auto next_rr = [&](double t) {
    switch (spec.rr_model) {
      case RrModel::af_uniform: return spec.rr_min + (spec.rr_max - spec.rr_min) * unit(rng);
      case RrModel::ramping: return spec.rr_start + (spec.rr_end - spec.rr_start) * (t / spec.duration);
      case RrModel::metronomic: break;
    }
    return spec.rr;
  };
  const auto snap = [&](double t) { return std::round(t / spec.dt) * spec.dt; };

  EcgRecord rec{UniformSignal(std::vector<double>(n, 0.0), spec.dt), {}, {}, {}};
  std::vector<double> x(n, 0.0);
  const double t_stop = spec.duration - spec.pvc_width;
  double t = snap(spec.pvc_width);
  double pause = 0.0;
  bool first = true;
  while (true) {
    BeatLabel label = BeatLabel::normal;
    if (!first) {
      double rr = next_rr(t) + pause;
      pause = 0.0;
      const double u = unit(rng);
      if (u < spec.pac_fraction) {
        label = BeatLabel::pac;
        rr -= spec.prematurity * rr;
      } else if (u < spec.pac_fraction + spec.pvc_fraction) {
        label = BeatLabel::pvc;
        const double early = spec.prematurity * rr;
        rr -= early;
        pause = early;
      }
      t = snap(t + rr);
    }
    first = false;
    if (t > t_stop) break;
    if (!rec.beats.times.empty() && !(t > rec.beats.times.back())) continue;

    double height = 0.0;
    double width = spec.beat_width;
    if (label == BeatLabel::pvc) {
      height = spec.pvc_amplitude * spec.beat_amplitude;
      width = spec.pvc_width;
    } else {
      const double scale = 1.0 + spec.modulation_depth * spec.respiration.clean(t);
      if (!(scale > 0.0)) throw InvalidArgument("EcgSpec: modulation drives a beat amplitude non-positive");
      height = spec.beat_amplitude * scale;
    }
    rec.beats.times.push_back(t);
    rec.beats.labels.push_back(label);
    rec.amplitudes.push_back(height);

    const auto centre = static_cast<long>(std::llround(t / spec.dt));
    const auto half = static_cast<long>(std::ceil(0.5 * width / spec.dt));
    for (long k = -half; k <= half; ++k) {
      const long m = centre + k;
      if (m < 0 || m >= static_cast<long>(n)) continue;
      const double u = static_cast<double>(k) * spec.dt / width;
      if (std::abs(u) >= 0.5) continue;
      x[static_cast<std::size_t>(m)] += height * 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * u));
    }
  }

  rec.true_iif.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double tm = static_cast<double>(m) * spec.dt;
    if (spec.drift_amplitude != 0.0) {
      x[m] += spec.drift_amplitude * std::sin(2.0 * std::numbers::pi * spec.drift_hz * tm);
    }
    if (spec.noise_sd > 0.0) x[m] += spec.noise_sd * gauss(rng);
    rec.true_iif[m] = spec.respiration.phase_rate(tm);
  }
  rec.ecg = UniformSignal(std::move(x), spec.dt);
  rec.beats.polarity = Polarity::r_peak;
  return rec;
}

}  // namespace sstedr
