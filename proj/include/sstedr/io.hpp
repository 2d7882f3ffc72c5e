#pragma once

// Plain-text formats. Numbers are written with 9 significant digits.
//   signal:      header `t,value`, one sample per line, uniform spacing
//   frequency:   header `t,freq_hz` (ridge / IF series)
//   annotations: header `t,label`, label in {N, PVC, PAC}

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sstedr/beats.hpp"
#include "sstedr/error.hpp"
#include "sstedr/signal.hpp"
#include "sstedr/sst.hpp"

namespace sstedr::io {

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// Two-column numeric table with a named header.
struct Series {
  std::vector<double> t;
  std::vector<double> value;
};

inline Series read_series(std::istream& in, std::string_view header) {
  Series s;
  std::string line;
  std::size_t lineno = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (!seen_header) {
      if (body != header) throw ParseError(lineno, "expected header `" + std::string(header) + "`");
      seen_header = true;
      continue;
    }
    const auto comma = body.find(',');
    if (comma == std::string_view::npos) throw ParseError(lineno, "expected two comma-separated columns");
    const auto t = detail::parse_double(body.substr(0, comma));
    const auto v = detail::parse_double(body.substr(comma + 1));
    if (!t || !v) throw ParseError(lineno, "bad number");
    s.t.push_back(*t);
    s.value.push_back(*v);
  }
  if (!seen_header) throw ParseError(lineno, "empty file");
  return s;
}

inline void write_series(std::ostream& out, std::string_view header, std::span<const double> t,
                         std::span<const double> value) {
  if (t.size() != value.size()) throw InvalidArgument("write_series: column lengths differ");
  out << header << '\n';
  for (std::size_t i = 0; i < t.size(); ++i) out << format_number(t[i]) << ',' << format_number(value[i]) << '\n';
}

/// Spacing check: every step within `tolerance` (relative) of the mean step.
inline double uniform_step(std::span<const double> t, double tolerance = 1e-6) {
  if (t.size() < 2) throw InvalidArgument("signal file: at least two samples required");
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (!(dt > 0.0)) throw InvalidArgument("signal file: times must increase");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - dt) > tolerance * dt) {
      throw InvalidArgument("signal file: non-uniform sampling near t=" + format_number(t[i]));
    }
  }
  return dt;
}

inline UniformSignal read_signal(std::istream& in, std::string_view header = "t,value") {
  auto s = read_series(in, header);
  const double dt = uniform_step(s.t);
  return UniformSignal(std::move(s.value), dt, s.t.front());
}

inline void write_signal(std::ostream& out, const UniformSignal& sig, std::string_view header = "t,value") {
  out << header << '\n';
  for (std::size_t m = 0; m < sig.size(); ++m) {
    out << format_number(sig.time(m)) << ',' << format_number(sig[m]) << '\n';
  }
}

inline void write_annotations(std::ostream& out, const BeatSeries& beats) {
  out << "t,label\n";
  for (std::size_t i = 0; i < beats.size(); ++i) {
    out << format_number(beats.times[i]) << ',' << to_string(beats.labels[i]) << '\n';
  }
}

/// Squeezed magnitude matrix: a `# ` comment line with the grid parameters,
/// a header `freq_hz,<t_0>,<t_1>,...`, then one row per frequency bin.
inline void write_sst_magnitude(std::ostream& out, const SstMatrix& s) {
  out << "# xi_min=" << format_number(s.grid.xi_min) << " xi_max=" << format_number(s.grid.xi_max)
      << " delta_xi=" << format_number(s.grid.delta_xi) << " n_xi=" << s.grid.size()
      << " dt=" << format_number(s.dt) << " t0=" << format_number(s.t0) << '\n';
  out << "freq_hz";
  for (Eigen::Index m = 0; m < s.cols(); ++m) out << ',' << format_number(s.time(m));
  out << '\n';
  for (Eigen::Index l = 0; l < s.bins(); ++l) {
    out << format_number(s.grid.xi[static_cast<std::size_t>(l)]);
    for (Eigen::Index m = 0; m < s.cols(); ++m) out << ',' << format_number(std::abs(s.values(l, m)));
    out << '\n';
  }
}

}  // namespace sstedr::io
