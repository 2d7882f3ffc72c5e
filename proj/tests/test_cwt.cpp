#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sstedr/cwt.hpp"

using namespace sstedr;

namespace {

DyadicSignal make_dyadic(std::vector<double> x, double dt) {
  return to_dyadic(UniformSignal(std::move(x), dt));
}

Eigen::Index strongest_row(const CwtMatrix& w, Eigen::Index m) {
  Eigen::Index best = 0;
  w.values.col(m).cwiseAbs().maxCoeff(&best);
  return best;
}

}  // namespace

TEST(WaveletHat, ClosedFormValues) {
  for (double sigma : {0.05, 0.125, 0.15, 0.5}) EXPECT_DOUBLE_EQ(wavelet_hat(1.0, WaveletSpec(sigma)), 1.0);
  EXPECT_NEAR(wavelet_hat(1.15, WaveletSpec(0.15)), 0.5, 1e-15);
  EXPECT_EQ(wavelet_hat(-0.5, WaveletSpec(0.15)), 0.0);
  EXPECT_EQ(wavelet_hat(0.0, WaveletSpec(0.15)), 0.0);
}

TEST(WaveletSpec, RejectsOutOfRangeSigma) {
  EXPECT_THROW(WaveletSpec(0.0), InvalidArgument);
  EXPECT_THROW(WaveletSpec(1.0), InvalidArgument);
  EXPECT_THROW(WaveletSpec(-0.1), InvalidArgument);
}

TEST(ScaleGrid, GeometricInVoices) {
  const auto g = make_scale_grid(3, 4, 0.5);
  ASSERT_EQ(g.size(), 12u);
  EXPECT_DOUBLE_EQ(g.scales.front(), std::exp2(0.25) * 0.5);
  EXPECT_DOUBLE_EQ(g.scales.back(), 8.0 * 0.5);
  for (std::size_t j = 1; j < g.size(); ++j) EXPECT_NEAR(g.scales[j] / g.scales[j - 1], std::exp2(0.25), 1e-14);
}

TEST(Cwt, ZeroSignalGivesZeroMatrix) {
  const auto w = cwt(make_dyadic(std::vector<double>(256, 0.0), 0.1), WaveletSpec(), 8);
  EXPECT_EQ(w.values.cwiseAbs().maxCoeff(), 0.0);
  const auto dw = cwt_time_derivative(make_dyadic(std::vector<double>(256, 0.0), 0.1), WaveletSpec(), 8);
  EXPECT_EQ(dw.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Cwt, ConstantSignalIsInvisible) {
  const auto sig = make_dyadic(std::vector<double>(512, 4.0), 0.25);
  for (auto spec : {WaveletSpec::respiration(), WaveletSpec::edr()}) {
    EXPECT_LT(cwt(sig, spec, 16).values.cwiseAbs().maxCoeff(), 1e-6 * 4.0);
    EXPECT_LT(cwt_time_derivative(sig, spec, 16).values.cwiseAbs().maxCoeff(), 1e-6 * 4.0);
  }
}

TEST(Cwt, ToneMagnitudePeaksNearMatchingScale) {
  const double dt = 0.25, f0 = 0.3;
  const std::size_t n = 4096;
  const auto w = cwt(make_dyadic(oracle::tone(n, f0, dt), dt), WaveletSpec::respiration(), 32);
  std::size_t expected = 0;
  for (std::size_t j = 1; j < w.grid.size(); ++j) {
    if (std::abs(w.grid.scales[j] * f0 - 1.0) < std::abs(w.grid.scales[expected] * f0 - 1.0)) expected = j;
  }
  const auto interior_lo = static_cast<Eigen::Index>(n / 4), interior_hi = static_cast<Eigen::Index>(3 * n / 4);
  for (Eigen::Index m = interior_lo; m < interior_hi; m += 97) {
    EXPECT_EQ(static_cast<std::size_t>(strongest_row(w, m)), expected);
  }
  // The modulus of every well-excited row is flat in time on the interior.
  const double peak = w.values.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < w.rows(); ++j) {
    const auto row = w.values.row(j).segment(interior_lo, interior_hi - interior_lo).cwiseAbs();
    if (row.maxCoeff() < 0.1 * peak) continue;
    EXPECT_LT((row.maxCoeff() - row.minCoeff()) / row.mean(), 1e-2) << "row " << j;
  }
}

TEST(Cwt, IsLinear) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<double> a(1024), b(1024), s(1024);
  for (std::size_t m = 0; m < a.size(); ++m) {
    a[m] = g(rng);
    b[m] = g(rng);
    s[m] = a[m] + b[m];
  }
  const WaveletSpec spec;
  const auto wa = cwt(make_dyadic(a, 0.5), spec, 16);
  const auto wb = cwt(make_dyadic(b, 0.5), spec, 16);
  const auto ws = cwt(make_dyadic(s, 0.5), spec, 16);
  const double scale = ws.values.cwiseAbs().maxCoeff();
  EXPECT_LT((ws.values - wa.values - wb.values).cwiseAbs().maxCoeff(), 1e-10 * scale);
}

TEST(CwtTimeDerivative, ToneRatioIsI2PiF) {
  const double dt = 0.01, f0 = 1.0;  // 2 pi f0 dt = 0.063
  const std::size_t n = 4096;
  const auto sig = make_dyadic(oracle::tone(n, f0, dt), dt);
  const auto w = cwt(sig, WaveletSpec::respiration(), 32);
  const std::complex<double> expected{0.0, oracle::two_pi * f0};
  for (auto scheme : {DerivativeScheme::central, DerivativeScheme::spectral}) {
    const auto dw = cwt_time_derivative(sig, WaveletSpec::respiration(), 32, scheme);
    for (Eigen::Index m = n / 4; m < static_cast<Eigen::Index>(3 * n / 4); m += 61) {
      const auto j = strongest_row(w, m);
      const auto ratio = dw.values(j, m) / w.values(j, m);
      EXPECT_LT(std::abs(ratio - expected) / std::abs(expected), 1e-2);
    }
  }
}

TEST(CwtWithDerivative, CropMatchesFullTransform) {
  const double dt = 0.5;
  const auto x = oracle::tone(512, 0.07, dt);
  const UniformSignal padded(x, dt);
  const auto full = cwt(to_dyadic(padded), WaveletSpec(), 8);
  const auto pair = cwt_with_derivative(padded, full.grid, WaveletSpec(), 100, 200, DerivativeScheme::spectral);
  EXPECT_LT((pair.transform.values - full.values.middleCols(100, 200)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(cwt_with_derivative(padded, full.grid, WaveletSpec(), 400, 200, DerivativeScheme::spectral),
               InvalidArgument);
}
