/**
 * @file test_spectra.cpp
 * @brief Regression-theorem correlators, emission spectra and g2.
 */
#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace su3engine;
using namespace su3test;

namespace {

EngineParams fig6_params(double g_w, double beta_h) {
  EngineParams p;
  p.model = Model::DissipativeLoad;
  p.beta_c = 1.1;
  p.beta_h = beta_h;
  p.g_w = g_w;
  return p;
}

struct Emitter {
  IrrepOperators ops;
  Liouvillian L;
  CMatrix rho;
};

Emitter emitter(IrrepLabel l, const EngineParams& p) {
  auto ops = irrep_matrices(l, p.omega_c, p.omega_h);
  auto L = build_liouvillian(ops, p);
  CMatrix rho = steady_state(L);
  return {std::move(ops), std::move(L), std::move(rho)};
}

double trapezoid(const RVector& x, const RVector& y) {
  double s = 0.0;
  for (Eigen::Index k = 0; k + 1 < x.size(); ++k) s += 0.5 * (x(k + 1) - x(k)) * (y(k) + y(k + 1));
  return s;
}

}  // namespace

TEST(TimeGrid, ResolvesFastestAndSlowestRates) {
  const auto e = emitter({2, 1}, fig6_params(0.3, 0.3));
  const auto grid = default_time_grid(e.L);
  const CVector ev = liouvillian_spectrum(e.L);
  const double lmax = ev.cwiseAbs().maxCoeff();
  EXPECT_LE(grid.dtau() * lmax, 0.05);
  EXPECT_GE(grid.points, 1 << 14);
  double gap = 1e300;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) > 1e-9) gap = std::min(gap, std::abs(ev(i).real()));
  EXPECT_NEAR(grid.tau_max, 20.0 / gap, 1e-9 * grid.tau_max);
}

TEST(G1, StartsAtEmittedFluxAndIsBounded) {
  const auto e = emitter({4, 0}, fig6_params(0.3, 0.3));
  const auto s = g1_correlator(e.L, e.rho, e.ops.gen.Wp, e.ops.gen.Wm, default_time_grid(e.L));
  EXPECT_NEAR(s.values(0).real(), expectation(e.ops.gen.Wp * e.ops.gen.Wm, e.rho), 1e-14);
  EXPECT_NEAR(s.values(0).imag(), 0.0, 1e-14);
  EXPECT_LE(s.values.cwiseAbs().maxCoeff(), s.values(0).real() * (1.0 + 1e-12));
  EXPECT_FALSE(s.warning.has_value());
}

TEST(G1, EigenRouteEqualsTimeStepping) {
  for (IrrepLabel l : {IrrepLabel{1, 0}, IrrepLabel{2, 1}}) {
    const auto e = emitter(l, fig6_params(0.3, 0.3));
    const TimeGrid grid{40.0, 4001};
    const auto s = g1_correlator(e.L, e.rho, e.ops.gen.Wp, e.ops.gen.Wm, grid);
    std::vector<double> taus;
    for (int k = 0; k < grid.points; k += 100) taus.push_back(s.tau(k));
    const CVector ev = g1_eigen(e.L, e.rho, e.ops.gen.Wp, e.ops.gen.Wm, taus);
    for (std::size_t i = 0; i < taus.size(); ++i)
      EXPECT_LT(std::abs(ev(static_cast<Eigen::Index>(i)) - s.values(static_cast<Eigen::Index>(100 * i))), 1e-8)
          << l.to_string();
  }
}

TEST(G1, WarnsWhenWindowTooShort) {
  const auto e = emitter({2, 1}, fig6_params(0.3, 0.3));
  const auto s = g1_correlator(e.L, e.rho, e.ops.gen.Wp, e.ops.gen.Wm, TimeGrid{0.5, 64});
  EXPECT_TRUE(s.warning.has_value());
}

TEST(G1, MatchesLoadPowerOverCoupling) {
  const auto p = fig6_params(0.4, 0.25);
  const auto e = emitter({2, 1}, p);
  const auto s = g1_correlator(e.L, e.rho, e.ops.gen.Wp, e.ops.gen.Wm, TimeGrid{1.0, 2});
  EXPECT_NEAR(s.norm, load_power(e.rho, e.ops.gen, p) / (p.omega_l() * p.g_w), 1e-14);
}

TEST(Spectrum, ExponentialCorrelatorGivesLorentzian) {
  const double A = 0.7, gamma = 0.3;
  CorrelatorSeries s;
  s.dtau = 0.01;
  const int N = 1 << 14;
  s.values.resize(N);
  for (int k = 0; k < N; ++k) s.values(k) = A * std::exp(-gamma * s.tau(k));
  s.norm = A;
  s.derivative0 = -gamma * A;
  RVector delta = RVector::LinSpaced(41, -2.0, 2.0);
  const auto direct = spectrum_from_series(s, delta, 1.0);
  for (Eigen::Index k = 0; k < delta.size(); ++k) {
    const double ref = gamma / (M_PI * (gamma * gamma + delta(k) * delta(k)));
    EXPECT_NEAR(direct.values(k), ref, 1e-6 * ref);
    EXPECT_NEAR(direct.omega(k), 1.0 + delta(k), 1e-15);
  }
  const auto fft = spectrum_fft(s, 1.0);
  for (Eigen::Index k = 0; k < fft.delta.size(); k += 97) {
    if (std::abs(fft.delta(k)) > 5.0) continue;
    const double ref = gamma / (M_PI * (gamma * gamma + fft.delta(k) * fft.delta(k)));
    EXPECT_NEAR(fft.values(k), ref, 1e-5 * ref);
  }
}

TEST(Spectrum, FftAndResolventAgree) {
  for (IrrepLabel l : {IrrepLabel{4, 0}, IrrepLabel{2, 1}, IrrepLabel{1, 0}}) {
    const auto e = emitter(l, fig6_params(0.3, 0.3));
    const auto series = g1_correlator(e.L, e.rho, e.ops.gen.Wp, e.ops.gen.Wm, default_time_grid(e.L));
    const auto fft = spectrum_fft(series, 1.0);
    // 200 consecutive FFT frequencies around the peak.
    Eigen::Index centre = 0;
    fft.delta.cwiseAbs().minCoeff(&centre);
    const Eigen::Index stride = 8, first = centre - 100 * stride;
    RVector delta(200), from_fft(200);
    for (Eigen::Index k = 0; k < 200; ++k) {
      delta(k) = fft.delta(first + k * stride);
      from_fft(k) = fft.values(first + k * stride);
    }
    const auto res = spectrum_resolvent(e.L, e.rho, e.ops.gen.Wp, e.ops.gen.Wm, delta, 1.0);
    const double scale = res.values.cwiseAbs().maxCoeff();
    EXPECT_LT((res.values - from_fft).cwiseAbs().maxCoeff() / scale, 1e-4) << l.to_string();
    EXPECT_GE(fft.values.minCoeff(), -1e-8);
    EXPECT_NEAR(trapezoid(fft.delta, fft.values), 1.0, 1e-3) << l.to_string();
  }
}

TEST(Spectrum, DirectQuadratureMatchesResolventClosely) {
  const auto e = emitter({2, 1}, fig6_params(0.2, 0.35));
  const auto series = g1_correlator(e.L, e.rho, e.ops.gen.Wp, e.ops.gen.Wm, default_time_grid(e.L));
  const RVector delta = RVector::LinSpaced(21, -1.0, 1.0);
  const auto q = spectrum_from_series(series, delta, 1.0);
  const auto r = spectrum_resolvent(e.L, e.rho, e.ops.gen.Wp, e.ops.gen.Wm, delta, 1.0);
  EXPECT_LT((q.values - r.values).cwiseAbs().maxCoeff() / r.values.maxCoeff(), 1e-7);
}

TEST(Spectrum, DrivenPeakAgreesWithQuadratureAtResonance) {
  EngineParams p = fig6_params(0.0, 0.3);
  p.model = Model::Driven;
  p.alpha = 0.07;
  const auto e = emitter({3, 0}, p);
  const auto series = g1_correlator(e.L, e.rho, e.ops.gen.Wp, e.ops.gen.Wm, default_time_grid(e.L));
  RVector zero = RVector::Zero(1);
  const double q = spectrum_from_series(series, zero, 1.0).values(0);
  const auto r = spectrum_resolvent(e.L, e.rho, e.ops.gen.Wp, e.ops.gen.Wm, zero, 1.0);
  EXPECT_NEAR(r.values(0), q, 1e-6 * std::abs(q));
  EXPECT_GT(r.coherent_fraction, 0.0);
  EXPECT_LT(r.coherent_fraction, 1.0);
}

TEST(Spectrum, PeakFallsWithLoadCoupling) {
  for (IrrepLabel l : {IrrepLabel{4, 0}, IrrepLabel{2, 1}})
    for (double bh : {0.15, 0.3, 0.5}) {
      double prev = std::numeric_limits<double>::infinity();
      for (double gw : {0.05, 0.1, 0.2, 0.4, 0.8}) {
        const auto e = emitter(l, fig6_params(gw, bh));
        const double peak = spectrum_peak(e.L, e.rho, e.ops.gen.Wp, e.ops.gen.Wm);
        EXPECT_LT(peak, prev) << l.to_string() << " g_w=" << gw;
        prev = peak;
      }
    }
}

TEST(Spectrum, RegressionGeneratorChoiceMatters) {
  const auto e = emitter({2, 1}, fig6_params(0.5, 0.3));
  const auto L2 = regression_liouvillian(e.L, e.ops.gen, RegressionGenerator::TwoBath);
  EXPECT_EQ(L2.model, Model::TwoBath);
  const double full = spectrum_peak(e.L, e.rho, e.ops.gen.Wp, e.ops.gen.Wm);
  const double two = spectrum_peak(L2, e.rho, e.ops.gen.Wp, e.ops.gen.Wm);
  EXPECT_GT(two, full);
  EXPECT_EQ(parse_regression_generator("two_bath"), RegressionGenerator::TwoBath);
  EXPECT_THROW(parse_regression_generator("partial"), InvalidInput);
}

TEST(Spectrum, WindowFractionAndLinewidth) {
  const auto e = emitter({4, 0}, fig6_params(0.3, 0.3));
  const double peak = spectrum_peak(e.L, e.rho, e.ops.gen.Wp, e.ops.gen.Wm);
  const double hw = 10.0 * effective_linewidth(peak);
  const auto s = spectrum_resolvent(e.L, e.rho, e.ops.gen.Wp, e.ops.gen.Wm, RVector::LinSpaced(801, -hw, hw), 1.0);
  const double frac = window_fraction(s, hw);
  EXPECT_GT(frac, 0.9);
  EXPECT_LE(frac, 1.0 + 1e-3);
  EXPECT_NEAR(window_fraction(s, hw / 2.0), trapezoid(s.delta.segment(200, 401), s.values.segment(200, 401)), 1e-12);
}

TEST(G2, SingleEmitterIsAntibunched) {
  for (IrrepLabel l : {IrrepLabel{1, 0}, IrrepLabel{0, 1}}) {
    const auto e = emitter(l, fig6_params(0.3, 0.3));
    EXPECT_LT(max_abs(e.ops.gen.Wm * e.ops.gen.Wm), 1e-15);
    EXPECT_NEAR(g2_zero(e.rho, e.ops.gen.Wp, e.ops.gen.Wm), 0.0, 1e-12) << l.to_string();
  }
  const auto e = emitter({1, 0}, fig6_params(0.3, 0.3));
  const auto s = g2_correlator(e.L, e.rho, e.ops.gen.Wp, e.ops.gen.Wm, TimeGrid{200.0, 20001});
  EXPECT_NEAR(s.values(0).real(), 0.0, 1e-15);
  const double target = std::pow(expectation(e.ops.gen.Wp * e.ops.gen.Wm, e.rho), 2);
  for (Eigen::Index k = 1; k < s.values.size() && s.values(k).real() < 0.9 * target; ++k)
    EXPECT_GE(s.values(k).real(), s.values(k - 1).real());
}

TEST(G2, CoherentStateOfOscillatorIsPoissonian) {
  const int dim = 80;
  const double alpha = 2.0;
  CMatrix a = CMatrix::Zero(dim, dim);
  for (int k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  CVector psi(dim);
  double fact = 1.0;
  for (int k = 0; k < dim; ++k) {
    if (k > 0) fact *= k;
    psi(k) = std::exp(-alpha * alpha / 2.0) * std::pow(alpha, k) / std::sqrt(fact);
  }
  const CMatrix rho = psi * psi.adjoint();
  EXPECT_NEAR(g2_zero(rho, a.adjoint(), a), 1.0, 1e-10);
}

TEST(G2, LongTimeLimitFactorizes) {
  for (IrrepLabel l : {IrrepLabel{4, 0}, IrrepLabel{2, 1}}) {
    const auto e = emitter(l, fig6_params(0.3, 0.3));
    const auto grid = default_time_grid(e.L);
    const auto s = g2_correlator(e.L, e.rho, e.ops.gen.Wp, e.ops.gen.Wm, grid);
    const double n = expectation(e.ops.gen.Wp * e.ops.gen.Wm, e.rho);
    EXPECT_NEAR(s.values(s.values.size() - 1).real() / (n * n), 1.0, 1e-6);
    EXPECT_NEAR(s.values(0).real() / (n * n), g2_zero(e.rho, e.ops.gen.Wp, e.ops.gen.Wm), 1e-12);
    EXPECT_LT(s.values.imag().cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_GE(s.values.real().minCoeff(), -1e-8);
  }
}

TEST(G2, ZeroFluxIsRejected) {
  const auto ops = irrep_matrices({2, 1}, 2.0 / 3.0, 5.0 / 3.0);
  CMatrix rho = CMatrix::Zero(ops.dim(), ops.dim());
  const auto lowest = ops.index_of(ops.basis.back());
  rho(lowest, lowest) = 1.0;
  if (expectation(ops.gen.Wp * ops.gen.Wm, rho) == 0.0) EXPECT_THROW(g2_zero(rho, ops.gen.Wp, ops.gen.Wm), InvalidInput);
  EXPECT_THROW(g2_zero(CMatrix::Zero(ops.dim(), ops.dim()), ops.gen.Wp, ops.gen.Wm), InvalidInput);
}
