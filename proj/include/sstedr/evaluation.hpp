#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "sstedr/beats.hpp"
#include "sstedr/error.hpp"
#include "sstedr/signal.hpp"

namespace sstedr {

inline constexpr double undefined_rate = std::numeric_limits<double>::quiet_NaN();

/// Ends of inspiration: local maxima of a respiration trace at least
/// `min_spacing_s` apart (the larger of two close maxima wins), with
/// parabolic refinement of each peak time.
inline std::vector<double> detect_breath_marks(const UniformSignal& resp, double min_spacing_s = 1.0) {
  const auto x = resp.samples();
  std::vector<std::size_t> idx;
  const double min_gap = min_spacing_s / resp.dt();
  for (std::size_t m = 1; m + 1 < x.size(); ++m) {
    if (!(x[m] > x[m - 1] && x[m] >= x[m + 1])) continue;
    if (!idx.empty() && static_cast<double>(m - idx.back()) < min_gap) {
      if (x[m] > x[idx.back()]) idx.back() = m;
      continue;
    }
    idx.push_back(m);
  }
  std::vector<double> marks;
  marks.reserve(idx.size());
  for (std::size_t m : idx) {
    const double a = x[m - 1], b = x[m], c = x[m + 1];
    const double denom = a - 2.0 * b + c;
    const double offset = denom < 0.0 ? 0.5 * (a - c) / denom : 0.0;
    marks.push_back(resp.time(m) + offset * resp.dt());
  }
  return marks;
}

/// Intuitive instantaneous respiration rate on the given time grid:
/// 1 / (t_k - t_{k-1}) for t_k <= t < t_{k+1}, the last value held after the
/// final mark, NaN before the second mark.
inline std::vector<double> irr_from_breath_marks(std::span<const double> marks, std::span<const double> grid) {
  if (marks.size() < 2) throw InvalidArgument("irr_from_breath_marks: need at least two marks");
  for (std::size_t k = 1; k < marks.size(); ++k) {
    if (!(marks[k] > marks[k - 1])) throw InvalidArgument("irr_from_breath_marks: marks must increase");
  }
  std::vector<double> out(grid.size(), undefined_rate);
  for (std::size_t m = 0; m < grid.size(); ++m) {
    const double t = grid[m];
    // k = last mark with marks[k] <= t
    const auto it = std::upper_bound(marks.begin(), marks.end(), t);
    const auto k = static_cast<std::size_t>(it - marks.begin());
    if (k < 2) continue;
    out[m] = 1.0 / (marks[k - 1] - marks[k - 2]);
  }
  return out;
}

struct SegmentErrorReport {
  std::size_t k = 0;
  /// Signed relative error per non-empty segment, percent.
  std::vector<double> deltas;
  /// Segment index of each entry of deltas.
  std::vector<std::size_t> segments;
  /// Median of |delta|, percent.
  double e_k = 0.0;
  /// Median of the signed deltas, percent.
  double e_k_signed = 0.0;
  std::size_t empty_segments = 0;
};

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return undefined_rate;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace detail

/// Splits the record into K equal, non-overlapping segments, averages both
/// IF series per segment, and reports delta_i = (ref - est) / ref * 100.
/// Samples where either series is non-finite are ignored; segments left
/// without samples are skipped and counted.
inline SegmentErrorReport segment_error(std::span<const double> if_ref, std::span<const double> if_est,
                                        double dt, std::size_t k) {
  if (if_ref.size() != if_est.size()) throw InvalidArgument("segment_error: series lengths differ");
  if (k < 1 || k > if_ref.size()) throw InvalidArgument("segment_error: need 1 <= K <= length");
  if (!(dt > 0.0)) throw InvalidArgument("segment_error: dt must be positive");
  const std::size_t n = if_ref.size();
  std::vector<double> sum_ref(k, 0.0), sum_est(k, 0.0);
  std::vector<std::size_t> count(k, 0);
  for (std::size_t m = 0; m < n; ++m) {
    if (!std::isfinite(if_ref[m]) || !std::isfinite(if_est[m])) continue;
    // Segment of width T / K holding t_m = m * dt, with T = n * dt.
    const std::size_t seg = std::min(k - 1, m * k / n);
    sum_ref[seg] += if_ref[m];
    sum_est[seg] += if_est[m];
    ++count[seg];
  }
  SegmentErrorReport report;
  report.k = k;
  std::vector<double> magnitudes;
  for (std::size_t i = 0; i < k; ++i) {
    if (count[i] == 0) {
      ++report.empty_segments;
      continue;
    }
    const double ref = sum_ref[i] / static_cast<double>(count[i]);
    const double est = sum_est[i] / static_cast<double>(count[i]);
    const double delta = (ref - est) / ref * 100.0;
    report.deltas.push_back(delta);
    report.segments.push_back(i);
    magnitudes.push_back(std::abs(delta));
  }
  report.e_k = detail::median(magnitudes);
  report.e_k_signed = detail::median(report.deltas);
  return report;
}

struct HrvReport {
  double mean_rr_ms = 0.0;
  double rmssd_ms = 0.0;
  double sdnn_ms = 0.0;
  std::size_t nn50 = 0;
  double pnn50 = 0.0;
};

/// Time-domain HRV from a run of consecutive normal-to-normal intervals (ms).
inline HrvReport hrv_from_intervals(std::span<const double> rr) {
  if (rr.size() < 2) throw InvalidArgument("hrv: need at least two intervals");
  HrvReport r;
  double sum = 0.0;
  for (double v : rr) sum += v;
  r.mean_rr_ms = sum / static_cast<double>(rr.size());
  double ss = 0.0;
  for (double v : rr) ss += (v - r.mean_rr_ms) * (v - r.mean_rr_ms);
  r.sdnn_ms = std::sqrt(ss / static_cast<double>(rr.size()));

  double sq = 0.0;
  for (std::size_t i = 1; i < rr.size(); ++i) {
    const double d = rr[i] - rr[i - 1];
    sq += d * d;
    if (std::abs(d) > 50.0) ++r.nn50;
  }
  const auto diffs = static_cast<double>(rr.size() - 1);
  r.rmssd_ms = std::sqrt(sq / diffs);
  r.pnn50 = static_cast<double>(r.nn50) / diffs * 100.0;
  return r;
}

/// Time-domain HRV over the normal beats. Non-normal beats are removed
/// before intervals are formed.
inline HrvReport hrv_time_domain(const BeatSeries& beats) {
  beats.validate();
  std::vector<double> t;
  for (std::size_t i = 0; i < beats.size(); ++i) {
    if (beats.labels[i] == BeatLabel::normal) t.push_back(beats.times[i]);
  }
  if (t.size() < 3) throw InvalidArgument("hrv_time_domain: need at least three normal beats");
  std::vector<double> rr(t.size() - 1);
  for (std::size_t i = 0; i < rr.size(); ++i) rr[i] = (t[i + 1] - t[i]) * 1000.0;
  return hrv_from_intervals(rr);
}

}  // namespace sstedr
