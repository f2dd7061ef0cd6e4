/**
 * @file spectra.hpp
 * @brief Two-time correlators from the regression theorem, emission spectra and g2.
 *
 * g(τ) = tr{W- e^{Lτ}[ρ W+]} is the stationary correlator ⟨W+(0) W-(τ)⟩. The
 * spectrum is evaluated at detuning Δ from the lasing frequency,
 *   S(Δ) = (1/π) Re ∫_0^∞ e^{iΔτ} g_inc(τ) dτ / g(0),
 * where g_inc = g - tr(W-ρ) tr(ρW+) is the incoherent part. The coherent weight
 * |⟨W+⟩|²/g(0) sits in a delta peak at Δ = 0 and is reported separately.
 */
#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include "su3engine/engine.hpp"
#include "su3engine/types.hpp"

namespace su3engine {

/// Which generator propagates the regression correlators.
enum class RegressionGenerator { Full, TwoBath };

inline RegressionGenerator parse_regression_generator(const std::string& s) {
  if (s == "full") return RegressionGenerator::Full;
  if (s == "two_bath") return RegressionGenerator::TwoBath;
  throw InvalidInput("unknown regression_generator '" + s + "' (expected full or two_bath)");
}

inline std::string to_string(RegressionGenerator r) { return r == RegressionGenerator::Full ? "full" : "two_bath"; }

inline Liouvillian regression_liouvillian(const Liouvillian& L, const Generators& g, RegressionGenerator which) {
  return which == RegressionGenerator::Full ? L : two_bath_part(L, g);
}

/// Eigenvalues of the dense generator.
inline CVector liouvillian_spectrum(const Liouvillian& L) {
  Eigen::ComplexEigenSolver<CMatrix> es(L.dense(), false);
  return es.eigenvalues();
}

struct TimeGrid {
  double tau_max = 0.0;
  int points = 0;
  double dtau() const { return tau_max / (points - 1); }
};

inline constexpr int kDefaultTauPoints = 1 << 14;
inline constexpr int kMaxTauPoints = 1 << 20;
inline constexpr double kMaxStepTimesRate = 0.05;

/// τ_max = 20/|Re λ_gap|, 2^14 points, doubled until Δτ |λ|_max <= 0.05.
inline TimeGrid default_time_grid(const Liouvillian& L) {
  const CVector ev = liouvillian_spectrum(L);
  const double lmax = ev.cwiseAbs().maxCoeff();
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) > 1e-9 * std::max(1.0, lmax)) gap = std::min(gap, std::abs(ev(i).real()));
  if (!std::isfinite(gap) || gap <= 0.0) throw ConvergenceError("default_time_grid: generator has no decaying mode");
  TimeGrid grid{20.0 / gap, kDefaultTauPoints};
  while (grid.dtau() * lmax > kMaxStepTimesRate && grid.points < kMaxTauPoints) grid.points *= 2;
  return grid;
}

struct CorrelatorSeries {
  double dtau = 0.0;
  CVector values;
  /// g(0) = ⟨W+W-⟩ for G1, ⟨W+W+W-W-⟩ for G2.
  double norm = 0.0;
  /// Long-time constant tr(A ρ) tr(B ρ) of the correlator.
  cplx coherent = 0.0;
  /// dg/dτ at τ = 0, used for the quadrature end correction.
  cplx derivative0 = 0.0;
  std::optional<std::string> warning;

  double tau(Eigen::Index k) const { return dtau * static_cast<double>(k); }
};

namespace detail {

/// tr(A X) as a row vector acting on vec(X).
inline Eigen::RowVectorXcd trace_functional(const CMatrix& A) {
  return Eigen::Map<const CVector>(CMatrix(A.transpose()).data(), A.size()).transpose();
}

inline CorrelatorSeries time_series(const Liouvillian& L, const CMatrix& observable, const CMatrix& x0,
                                    cplx coherent, const TimeGrid& grid) {
  if (grid.points < 2 || !(grid.tau_max > 0.0)) throw InvalidInput("correlator: invalid time grid");
  CorrelatorSeries s;
  s.dtau = grid.dtau();
  s.values.resize(grid.points);
  const CMatrix step = propagator(L, s.dtau);
  const Eigen::RowVectorXcd f = trace_functional(observable);
  CVector x = vec(x0);
  s.derivative0 = f * (L.matrix * x);
  for (int k = 0; k < grid.points; ++k) {
    s.values(k) = f * x;
    if (k + 1 < grid.points) x = step * x;
  }
  s.norm = s.values(0).real();
  s.coherent = coherent;
  const double tail = std::abs(s.values(grid.points - 1) - coherent);
  if (tail > 1e-3 * std::abs(s.values(0))) {
    s.warning = "correlator has not decayed at tau_max (|g - g_inf| = " + std::to_string(tail) + ")";
  }
  return s;
}

}  // namespace detail

/// G1(τ) = tr{lower e^{Lτ}[ρ raise]} on a uniform grid.
inline CorrelatorSeries g1_correlator(const Liouvillian& L, const CMatrix& rho, const CMatrix& raise,
                                      const CMatrix& lower, const TimeGrid& grid) {
  const cplx coherent = (lower * rho).trace() * (rho * raise).trace();
  return detail::time_series(L, lower, rho * raise, coherent, grid);
}

/// G2(τ) = tr{raise lower e^{Lτ}[lower ρ raise]} on a uniform grid.
inline CorrelatorSeries g2_correlator(const Liouvillian& L, const CMatrix& rho, const CMatrix& raise,
                                      const CMatrix& lower, const TimeGrid& grid) {
  const cplx n = (raise * lower * rho).trace();
  return detail::time_series(L, raise * lower, lower * rho * raise, n * n, grid);
}

/// G1 at the given delays from the eigendecomposition of L.
inline CVector g1_eigen(const Liouvillian& L, const CMatrix& rho, const CMatrix& raise, const CMatrix& lower,
                        const std::vector<double>& taus) {
  Eigen::ComplexEigenSolver<CMatrix> es(L.dense());
  const CMatrix& R = es.eigenvectors();
  const CVector coeff = R.partialPivLu().solve(vec(rho * raise));
  const Eigen::RowVectorXcd proj = detail::trace_functional(lower) * R;
  CVector out(static_cast<Eigen::Index>(taus.size()));
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const CVector e = (es.eigenvalues() * taus[i]).array().exp().matrix();
    out(static_cast<Eigen::Index>(i)) = (proj.transpose().array() * e.array() * coeff.array()).sum();
  }
  return out;
}

/// tr(raise raise lower lower ρ) / tr(raise lower ρ)^2.
inline double g2_zero(const CMatrix& rho, const CMatrix& raise, const CMatrix& lower) {
  const double n = (raise * lower * rho).trace().real();
  if (!(n > 1e-14)) throw InvalidInput("g2_zero: emitted flux vanishes");
  return (raise * raise * lower * lower * rho).trace().real() / (n * n);
}

struct Spectrum {
  RVector delta;
  RVector omega;
  RVector values;
  /// P_tot = g(0).
  double p_tot = 0.0;
  /// Fraction of the flux in the delta peak at Δ = 0.
  double coherent_fraction = 0.0;
};

namespace detail {

inline Spectrum make_spectrum(RVector delta, RVector values, double omega_l, double p_tot, double coherent) {
  Spectrum s;
  s.omega = delta.array() + omega_l;
  s.delta = std::move(delta);
  s.values = std::move(values);
  s.p_tot = p_tot;
  s.coherent_fraction = coherent / p_tot;
  return s;
}

inline void check_series(const CorrelatorSeries& s) {
  if (s.values.size() < 2 || !(s.norm > 0.0)) throw InvalidInput("spectrum: correlator has no emitted flux");
}

}  // namespace detail

/**
 * S on the FFT grid Δ_k = 2πk/(M Δτ), with M = zero_pad × N points, trapezoid
 * weights and the first end correction Δτ²/12 · d/dτ[e^{iΔτ} g_inc](0).
 */
inline Spectrum spectrum_fft(const CorrelatorSeries& series, double omega_l, int zero_pad = 4) {
  detail::check_series(series);
  const Eigen::Index N = series.values.size();
  const Eigen::Index M = N * zero_pad;
  std::vector<cplx> buf(static_cast<std::size_t>(M), 0.0);
  for (Eigen::Index j = 0; j < N; ++j) {
    const double w = (j == 0 || j == N - 1) ? 0.5 : 1.0;
    buf[static_cast<std::size_t>(j)] = std::conj(w * (series.values(j) - series.coherent));
  }
  Eigen::FFT<double> fft;
  std::vector<cplx> out;
  fft.fwd(out, buf);
  const double dt = series.dtau;
  const double g0 = (series.values(0) - series.coherent).real();
  RVector delta(M), values(M);
  for (Eigen::Index k = 0; k < M; ++k) {
    // Reorder so that Δ runs from the most negative to the most positive frequency.
    const Eigen::Index src = (k + M / 2) % M;
    const Eigen::Index signed_k = src >= M / 2 ? src - M : src;
    const double d = 2.0 * M_PI * static_cast<double>(signed_k) / (static_cast<double>(M) * dt);
    const cplx integral = dt * std::conj(out[static_cast<std::size_t>(src)]) +
                          dt * dt / 12.0 * (kI * d * cplx(g0) + series.derivative0);
    delta(k) = d;
    values(k) = integral.real() / (M_PI * series.norm);
  }
  return detail::make_spectrum(std::move(delta), std::move(values), omega_l, series.norm, std::abs(series.coherent));
}

/// The same quadrature as spectrum_fft evaluated directly at arbitrary detunings.
inline Spectrum spectrum_from_series(const CorrelatorSeries& series, const RVector& delta, double omega_l) {
  detail::check_series(series);
  const Eigen::Index N = series.values.size();
  const double dt = series.dtau;
  const double g0 = (series.values(0) - series.coherent).real();
  RVector values(delta.size());
  for (Eigen::Index k = 0; k < delta.size(); ++k) {
    const cplx rot = std::exp(kI * delta(k) * dt);
    cplx phase = 1.0, acc = 0.0;
    for (Eigen::Index j = 0; j < N; ++j) {
      const double w = (j == 0 || j == N - 1) ? 0.5 : 1.0;
      acc += w * phase * (series.values(j) - series.coherent);
      phase *= rot;
      if ((j & 1023) == 1023) phase /= std::abs(phase);
    }
    const cplx integral = dt * acc + dt * dt / 12.0 * (kI * delta(k) * cplx(g0) + series.derivative0);
    values(k) = integral.real() / (M_PI * series.norm);
  }
  return detail::make_spectrum(delta, std::move(values), omega_l, series.norm, std::abs(series.coherent));
}

/// S(Δ) = (1/π) Re tr{lower (-iΔ - L)^{-1}[ρ raise - tr(ρ raise) ρ]} / g(0).
inline Spectrum spectrum_resolvent(const Liouvillian& L, const CMatrix& rho, const CMatrix& raise,
                                   const CMatrix& lower, const RVector& delta, double omega_l) {
  const double p_tot = (raise * lower * rho).trace().real();
  if (!(p_tot > 0.0)) throw InvalidInput("spectrum_resolvent: emitted flux vanishes");
  const cplx mean_raise = (rho * raise).trace();
  const CVector x0 = vec(rho * raise - mean_raise * rho);
  const Eigen::RowVectorXcd f = detail::trace_functional(lower);
  SparseCMatrix id(L.matrix.rows(), L.matrix.cols());
  id.setIdentity();
  RVector values(delta.size());
  Eigen::SparseLU<SparseCMatrix> lu;
  for (Eigen::Index k = 0; k < delta.size(); ++k) {
    SparseCMatrix A = cplx(0.0, -delta(k)) * id - L.matrix;
    if (delta(k) == 0.0) {
      // -L is singular; the traceless source has a unique traceless preimage, so
      // the redundant first row is replaced by the trace condition.
      A = detail::replace_first_row_with_trace(A, L.dim);
    }
    CVector rhs = x0;
    if (delta(k) == 0.0) rhs(0) = 0.0;
    A.makeCompressed();
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw ConvergenceError("spectrum_resolvent: factorization failed");
    const cplx value = f * lu.solve(rhs);
    values(k) = value.real() / (M_PI * p_tot);
  }
  const double coherent = std::abs((lower * rho).trace() * mean_raise);
  return detail::make_spectrum(delta, std::move(values), omega_l, p_tot, coherent);
}

/// S(ω_l) from the resolvent.
inline double spectrum_peak(const Liouvillian& L, const CMatrix& rho, const CMatrix& raise, const CMatrix& lower) {
  RVector d(1);
  d(0) = 0.0;
  return spectrum_resolvent(L, rho, raise, lower, d, 0.0).values(0);
}

/// Trapezoid integral of S over |Δ| <= half_width.
inline double window_fraction(const Spectrum& s, double half_width) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k + 1 < s.delta.size(); ++k) {
    const double a = std::max(s.delta(k), -half_width), b = std::min(s.delta(k + 1), half_width);
    if (b <= a) continue;
    const double h = s.delta(k + 1) - s.delta(k);
    auto lerp = [&](double x) { return s.values(k) + (s.values(k + 1) - s.values(k)) * (x - s.delta(k)) / h; };
    acc += 0.5 * (b - a) * (lerp(a) + lerp(b));
  }
  return acc;
}

/// Effective half-width 1/(π S(ω_l)).
inline double effective_linewidth(double peak) { return 1.0 / (M_PI * peak); }

}  // namespace su3engine
