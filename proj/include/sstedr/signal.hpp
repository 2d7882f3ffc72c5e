#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sstedr/error.hpp"

namespace sstedr {

/// Real-valued, uniformly sampled time series. Sample m sits at t0 + m * dt.
class UniformSignal {
 public:
  UniformSignal(std::vector<double> samples, double dt, double t0 = 0.0)
      : samples_(std::move(samples)), dt_(dt), t0_(t0) {
    if (!(dt_ > 0.0) || !std::isfinite(dt_)) {
      throw InvalidArgument("UniformSignal: dt must be positive and finite");
    }
    if (samples_.size() < 2) {
      throw InvalidArgument("UniformSignal: at least two samples required");
    }
  }

  std::span<const double> samples() const noexcept { return samples_; }
  const std::vector<double>& values() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double dt() const noexcept { return dt_; }
  double t0() const noexcept { return t0_; }
  double time(std::size_t m) const noexcept { return t0_ + static_cast<double>(m) * dt_; }
  double end_time() const noexcept { return time(samples_.size() - 1); }
  double operator[](std::size_t m) const noexcept { return samples_[m]; }

  friend bool operator==(const UniformSignal&, const UniformSignal&) = default;

 private:
  std::vector<double> samples_;
  double dt_;
  double t0_;
};

/// A signal whose length is exactly 2^(L+1).
class DyadicSignal {
 public:
  DyadicSignal(UniformSignal inner, int octaves) : inner_(std::move(inner)), octaves_(octaves) {
    if (octaves_ < 0 || octaves_ > 60 ||
        inner_.size() != (std::size_t{1} << static_cast<unsigned>(octaves_ + 1))) {
      throw InvalidArgument("DyadicSignal: length must equal 2^(L+1)");
    }
  }

  const UniformSignal& signal() const noexcept { return inner_; }
  /// L in n = 2^(L+1).
  int octaves() const noexcept { return octaves_; }
  std::size_t size() const noexcept { return inner_.size(); }
  double dt() const noexcept { return inner_.dt(); }

 private:
  UniformSignal inner_;
  int octaves_;
};

namespace detail {

// Lower median of a scratch buffer; reorders the buffer.
inline double lower_median(std::span<double> buf) {
  const auto k = (buf.size() - 1) / 2;
  std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(k), buf.end());
  return buf[k];
}

}  // namespace detail

/// Running lower median over a window of `window` samples. Windows shrink at
/// the edges instead of padding.
inline std::vector<double> running_median(std::span<const double> x, std::size_t window) {
  if (window < 1) throw InvalidArgument("running_median: window must be at least one sample");
  if (window > x.size()) throw InvalidArgument("running_median: window longer than signal");
  const std::size_t n = x.size();
  const std::size_t left = (window - 1) / 2;
  const std::size_t right = window / 2;
  std::vector<double> out(n);
  std::vector<double> buf;
  buf.reserve(window);
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t lo = m >= left ? m - left : 0;
    const std::size_t hi = std::min(n - 1, m + right);
    buf.assign(x.begin() + static_cast<std::ptrdiff_t>(lo),
               x.begin() + static_cast<std::ptrdiff_t>(hi + 1));
    out[m] = detail::lower_median(buf);
  }
  return out;
}

/// Removes baseline wander: the signal minus its running median over
/// ROUND(window_s / dt) samples.
inline UniformSignal median_detrend(const UniformSignal& sig, double window_s) {
  if (!(window_s > 0.0)) throw InvalidArgument("median_detrend: window must be positive");
  const double w = std::round(window_s / sig.dt());
  if (w < 1.0) throw InvalidArgument("median_detrend: window shorter than one sample");
  if (w > static_cast<double>(sig.size())) {
    throw InvalidArgument("median_detrend: window longer than signal");
  }
  const auto baseline = running_median(sig.samples(), static_cast<std::size_t>(w));
  std::vector<double> out(sig.size());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = sig[m] - baseline[m];
  return UniformSignal(std::move(out), sig.dt(), sig.t0());
}

/// Mirror-pads n_pad samples on each side without repeating the edge sample.
inline UniformSignal reflect_pad(const UniformSignal& sig, std::size_t n_pad) {
  const std::size_t n = sig.size();
  if (n_pad < 1 || n_pad >= n) throw InvalidArgument("reflect_pad: need 1 <= n_pad < length");
  std::vector<double> out;
  out.reserve(n + 2 * n_pad);
  for (std::size_t k = n_pad; k >= 1; --k) out.push_back(sig[k]);
  out.insert(out.end(), sig.samples().begin(), sig.samples().end());
  for (std::size_t k = 1; k <= n_pad; ++k) out.push_back(sig[n - 1 - k]);
  return UniformSignal(std::move(out), sig.dt(), sig.t0() - static_cast<double>(n_pad) * sig.dt());
}

/// Drops `n_cut` samples from each end; the inverse of reflect_pad.
inline UniformSignal crop(const UniformSignal& sig, std::size_t n_cut) {
  if (2 * n_cut + 2 > sig.size()) throw InvalidArgument("crop: nothing would remain");
  std::vector<double> out(sig.samples().begin() + static_cast<std::ptrdiff_t>(n_cut),
                          sig.samples().end() - static_cast<std::ptrdiff_t>(n_cut));
  return UniformSignal(std::move(out), sig.dt(), sig.time(n_cut));
}

/// Linear interpolation onto a grid of spacing new_dt over the same time span.
inline UniformSignal resample(const UniformSignal& sig, double new_dt) {
  if (!(new_dt > 0.0) || !std::isfinite(new_dt)) {
    throw InvalidArgument("resample: new_dt must be positive");
  }
  if (new_dt == sig.dt()) return sig;
  const double span = static_cast<double>(sig.size() - 1) * sig.dt();
  // Tolerate the grid landing a hair past the last sample through rounding.
  const auto count = static_cast<std::size_t>(std::floor(span / new_dt + 1e-9)) + 1;
  if (count < 2) throw InvalidArgument("resample: new_dt longer than the signal span");
  const std::size_t last = sig.size() - 1;
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double pos = static_cast<double>(k) * new_dt / sig.dt();
    const auto i = std::min(static_cast<std::size_t>(pos), last);
    if (i == last) {
      out[k] = sig[last];
      continue;
    }
    const double frac = pos - static_cast<double>(i);
    out[k] = sig[i] + frac * (sig[i + 1] - sig[i]);
  }
  return UniformSignal(std::move(out), new_dt, sig.t0());
}

/// Keeps the earliest 2^(L+1) samples, the largest power of two that fits.
inline DyadicSignal to_dyadic(const UniformSignal& sig) {
  const std::size_t p = std::bit_floor(sig.size());
  const int octaves = std::countr_zero(p) - 1;
  if (p == sig.size()) return DyadicSignal(sig, octaves);
  std::vector<double> head(sig.samples().begin(), sig.samples().begin() + static_cast<std::ptrdiff_t>(p));
  return DyadicSignal(UniformSignal(std::move(head), sig.dt(), sig.t0()), octaves);
}

}  // namespace sstedr
