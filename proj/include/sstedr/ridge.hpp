#pragma once

// Penalized ridge extraction. The curve c maximizes
//
//   sum_m log(|S(c(m), m)| / q) - lambda * sum_{m>=1} (c(m) - c(m-1))^2,
//   q = sum_{l,m} |S(l, m)|,
//
// found exactly by dynamic programming over (bin x time). Bins are 0-based.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "sstedr/error.hpp"
#include "sstedr/sst.hpp"

namespace sstedr {

struct Ridge {
  std::vector<std::size_t> bins;
  std::vector<double> freqs;
};

enum class RidgeSearch {
  /// Divide and conquer over the leftmost-argmax predecessor map; the
  /// quadratic penalty makes the transition matrix Monge, so the leftmost
  /// optimal predecessor is nondecreasing in the bin index.
  monotone,
  /// Scan every predecessor for every bin, O(n * n_xi^2).
  exhaustive,
};

namespace detail {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// Per-cell score log(|S| / q), -inf for empty cells.
inline Eigen::MatrixXd ridge_cell_scores(const Eigen::MatrixXd& magnitude) {
  const double q = magnitude.sum();
  if (!(q > 0.0) || !std::isfinite(q)) throw DegenerateInput("ridge: matrix carries no energy");
  Eigen::MatrixXd score(magnitude.rows(), magnitude.cols());
  for (Eigen::Index m = 0; m < magnitude.cols(); ++m) {
    for (Eigen::Index l = 0; l < magnitude.rows(); ++l) {
      const double v = magnitude(l, m);
      score(l, m) = v > 0.0 ? std::log(v / q) : neg_inf;
    }
  }
  return score;
}

inline double transition(const std::vector<double>& prev, long k, long l, double lambda) {
  const double d = static_cast<double>(l - k);
  return prev[static_cast<std::size_t>(k)] - lambda * d * d;
}

// Leftmost argmax over k in [klo, khi] of prev[k] - lambda (l - k)^2.
inline long best_predecessor(const std::vector<double>& prev, long l, long klo, long khi, double lambda,
                             double& value) {
  long arg = klo;
  value = transition(prev, klo, l, lambda);
  for (long k = klo + 1; k <= khi; ++k) {
    const double v = transition(prev, k, l, lambda);
    if (v > value) {
      value = v;
      arg = k;
    }
  }
  return arg;
}

inline void monotone_step(const std::vector<double>& prev, long lo, long hi, long klo, long khi,
                          double lambda, std::vector<double>& value, std::vector<long>& arg) {
  if (lo > hi) return;
  const long mid = lo + (hi - lo) / 2;
  double v = 0.0;
  const long k = best_predecessor(prev, mid, klo, khi, lambda, v);
  value[static_cast<std::size_t>(mid)] = v;
  arg[static_cast<std::size_t>(mid)] = k;
  monotone_step(prev, lo, mid - 1, klo, k, lambda, value, arg);
  monotone_step(prev, mid + 1, hi, k, khi, lambda, value, arg);
}

}  // namespace detail

/// Score of a given curve under the ridge functional (bins 0-based).
inline double ridge_score(const Eigen::MatrixXd& magnitude, const std::vector<std::size_t>& bins,
                          double lambda) {
  const double q = magnitude.sum();
  double total = 0.0;
  for (std::size_t m = 0; m < bins.size(); ++m) {
    const double v = magnitude(static_cast<Eigen::Index>(bins[m]), static_cast<Eigen::Index>(m));
    total += v > 0.0 ? std::log(v / q) : detail::neg_inf;
  }
  for (std::size_t m = 1; m < bins.size(); ++m) {
    const double d = static_cast<double>(bins[m]) - static_cast<double>(bins[m - 1]);
    total -= lambda * d * d;
  }
  return total;
}

/// Maximizing curve over a nonnegative magnitude matrix (rows = bins).
/// Ties go to the lower bin index.
inline std::vector<std::size_t> extract_ridge_bins(const Eigen::MatrixXd& magnitude, double lambda,
                                                   RidgeSearch search = RidgeSearch::monotone) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("extract_ridge: lambda must be >= 0");
  const Eigen::Index nb = magnitude.rows();
  const Eigen::Index nt = magnitude.cols();
  if (nb == 0 || nt == 0) throw DegenerateInput("extract_ridge: empty matrix");
  const Eigen::MatrixXd score = detail::ridge_cell_scores(magnitude);
  const auto nbins = static_cast<std::size_t>(nb);

  std::vector<double> prev(nbins);
  for (std::size_t l = 0; l < nbins; ++l) prev[l] = score(static_cast<Eigen::Index>(l), 0);

  // Flat (time x bin) table of optimal predecessors.
  std::vector<std::uint32_t> back(static_cast<std::size_t>(nt) * nbins);
  std::vector<double> value(nbins);
  std::vector<long> arg(nbins);
  std::vector<double> cur(nbins);
  for (Eigen::Index m = 1; m < nt; ++m) {
    bool any_finite = false;
    for (double v : prev) any_finite = any_finite || v > detail::neg_inf;
    if (!any_finite) throw DegenerateInput("extract_ridge: every curve passes through an empty cell");

    if (search == RidgeSearch::monotone && lambda > 0.0) {
      detail::monotone_step(prev, 0, nb - 1, 0, nb - 1, lambda, value, arg);
    } else {
      for (long l = 0; l < nb; ++l) {
        arg[static_cast<std::size_t>(l)] =
            detail::best_predecessor(prev, l, 0, nb - 1, lambda, value[static_cast<std::size_t>(l)]);
      }
    }
    for (std::size_t l = 0; l < nbins; ++l) cur[l] = value[l] + score(static_cast<Eigen::Index>(l), m);
    auto* row = back.data() + static_cast<std::size_t>(m) * nbins;
    for (std::size_t l = 0; l < nbins; ++l) row[l] = static_cast<std::uint32_t>(arg[l]);
    prev.swap(cur);
  }

  std::size_t last = 0;
  for (std::size_t l = 1; l < nbins; ++l) {
    if (prev[l] > prev[last]) last = l;
  }
  if (!(prev[last] > detail::neg_inf)) {
    throw DegenerateInput("extract_ridge: every curve passes through an empty cell");
  }
  std::vector<std::size_t> bins(static_cast<std::size_t>(nt));
  bins.back() = last;
  for (auto m = static_cast<std::size_t>(nt) - 1; m >= 1; --m) {
    bins[m - 1] = back[m * nbins + bins[m]];
  }
  return bins;
}

inline std::vector<double> ridge_to_if(const Ridge& r, const FreqGrid& grid) {
  std::vector<double> out(r.bins.size());
  for (std::size_t m = 0; m < out.size(); ++m) {
    if (r.bins[m] >= grid.size()) throw InvalidArgument("ridge_to_if: bin outside grid");
    out[m] = grid.xi[r.bins[m]];
  }
  return out;
}

inline Ridge extract_ridge(const SstMatrix& s, double lambda, RidgeSearch search = RidgeSearch::monotone) {
  Ridge r;
  r.bins = extract_ridge_bins(s.values.cwiseAbs(), lambda, search);
  r.freqs = ridge_to_if(r, s.grid);
  return r;
}

}  // namespace sstedr
