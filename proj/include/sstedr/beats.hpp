#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sstedr/error.hpp"
#include "sstedr/signal.hpp"

namespace sstedr {

enum class BeatLabel { normal, pvc, pac };
enum class Polarity { r_peak, s_peak };

inline std::string_view to_string(BeatLabel label) {
  switch (label) {
    case BeatLabel::pvc: return "PVC";
    case BeatLabel::pac: return "PAC";
    case BeatLabel::normal: break;
  }
  return "N";
}

inline std::optional<BeatLabel> parse_beat_label(std::string_view s) {
  if (s == "N") return BeatLabel::normal;
  if (s == "PVC") return BeatLabel::pvc;
  if (s == "PAC") return BeatLabel::pac;
  return std::nullopt;
}

inline std::string_view to_string(Polarity p) { return p == Polarity::s_peak ? "S" : "R"; }

/// Beat times (seconds, strictly increasing) with one label per beat.
struct BeatSeries {
  std::vector<double> times;
  std::vector<BeatLabel> labels;
  Polarity polarity = Polarity::r_peak;

  std::size_t size() const noexcept { return times.size(); }

  void validate() const {
    if (times.size() != labels.size()) throw InvalidArgument("BeatSeries: one label per beat required");
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (!(times[i] > times[i - 1])) throw InvalidArgument("BeatSeries: beat times must be strictly increasing");
    }
  }

  std::size_t count(BeatLabel label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace detail

/// Parses `<time_seconds>,<label>` lines (label N, PVC or PAC). Blank lines,
/// `#` comments and a `t,label` header are skipped.
inline BeatSeries load_annotations(std::istream& in) {
  BeatSeries beats;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (body == "t,label") continue;
    const auto comma = body.find(',');
    if (comma == std::string_view::npos) throw ParseError(lineno, "expected <time>,<label>");
    const auto t = detail::parse_double(body.substr(0, comma));
    if (!t) throw ParseError(lineno, "bad beat time");
    const auto label = parse_beat_label(detail::trim(body.substr(comma + 1)));
    if (!label) throw ParseError(lineno, "unknown beat label (expected N, PVC or PAC)");
    beats.times.push_back(*t);
    beats.labels.push_back(*label);
  }
  if (beats.times.empty()) throw InsufficientBeats("annotations: no beats");
  beats.validate();
  return beats;
}

inline BeatSeries load_annotations(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_annotations(in);
}

struct PeakDetectorOptions {
  double refractory_s = 0.2;
  /// Fraction of the recent peak level a local maximum must reach.
  double threshold_ratio = 0.4;
  std::size_t history = 8;
};

namespace detail {

inline double top_decile_median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end(), std::greater<>());
  const std::size_t k = std::max<std::size_t>(1, v.size() / 10);
  v.resize(k);
  return lower_median(v);
}

}  // namespace detail

/// Locates R (or S) peaks in a detrended single-lead ECG.
///
/// Polarity: the lead is read as R-dominant unless the median of the top
/// decile of negative excursions exceeds that of the positive ones. Peaks are
/// local maxima of the polarity-corrected trace above an adaptive threshold
/// (a fraction of the mean of recent accepted peaks), with a refractory
/// period in which only the larger candidate survives. All beats are
/// labelled normal.
inline BeatSeries detect_peaks(const UniformSignal& ecg, const PeakDetectorOptions& opt = {}) {
  const auto x = ecg.samples();
  std::vector<double> pos, neg;
  for (double v : x) {
    if (v > 0.0) pos.push_back(v);
    if (v < 0.0) neg.push_back(-v);
  }
  BeatSeries beats;
  beats.polarity = detail::top_decile_median(neg) > detail::top_decile_median(std::move(pos))
                       ? Polarity::s_peak
                       : Polarity::r_peak;
  const double sign = beats.polarity == Polarity::s_peak ? -1.0 : 1.0;

  std::vector<double> y(x.size());
  for (std::size_t m = 0; m < x.size(); ++m) y[m] = sign * x[m];

  // Seed the level from the 99.5th percentile so the first beats are found.
  std::vector<double> sorted = y;
  const auto q = static_cast<std::size_t>(0.995 * static_cast<double>(sorted.size() - 1));
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(q), sorted.end());
  const double seed_level = sorted[q];
  if (!(seed_level > 0.0)) throw InsufficientBeats("detect_peaks: no positive excursions");

  const auto refractory = static_cast<std::size_t>(std::llround(opt.refractory_s / ecg.dt()));
  std::vector<std::size_t> idx;
  std::vector<double> amp;
  const auto level = [&] {
    if (amp.empty()) return seed_level;
    const std::size_t k = std::min(opt.history, amp.size());
    double s = 0.0;
    for (std::size_t i = amp.size() - k; i < amp.size(); ++i) s += amp[i];
    return s / static_cast<double>(k);
  };
  for (std::size_t m = 1; m + 1 < y.size(); ++m) {
    if (!(y[m] > y[m - 1] && y[m] >= y[m + 1])) continue;
    if (y[m] < opt.threshold_ratio * level()) continue;
    if (!idx.empty() && m - idx.back() < refractory) {
      if (y[m] > amp.back()) {
        idx.back() = m;
        amp.back() = y[m];
      }
      continue;
    }
    idx.push_back(m);
    amp.push_back(y[m]);
  }
  if (idx.size() < 4) throw InsufficientBeats("detect_peaks: fewer than four beats found");
  beats.times.reserve(idx.size());
  for (std::size_t i : idx) beats.times.push_back(ecg.time(i));
  beats.labels.assign(idx.size(), BeatLabel::normal);
  return beats;
}

}  // namespace sstedr
