/**
 * @file thermo.hpp
 * @brief Ergotropy, lasing ergotropy, heat currents, power and efficiency.
 *
 * Heat currents are counted positive when energy flows from a bath into the
 * system; power is positive when the system delivers energy to the load or
 * the drive. The functions take generic generators so that block and
 * full-space states are handled by the same code.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "su3engine/engine.hpp"
#include "su3engine/su3_algebra.hpp"
#include "su3engine/types.hpp"

namespace su3engine {

inline double expectation(const CMatrix& op, const CMatrix& rho) { return (op * rho).trace().real(); }

struct ErgotropyResult {
  double value = 0.0;
  CMatrix passive;
};

/// Maximum energy extractable from ρ by a unitary, with the corresponding passive state.
inline ErgotropyResult ergotropy(const CMatrix& rho, const CMatrix& H) {
  if (rho.rows() != H.rows() || rho.cols() != H.cols()) throw InvalidInput("ergotropy: shape mismatch");
  Eigen::SelfAdjointEigenSolver<CMatrix> eh(hermitian_part(H));
  Eigen::SelfAdjointEigenSolver<CMatrix> er(hermitian_part(rho), Eigen::EigenvaluesOnly);
  const Eigen::Index d = rho.rows();
  // Energies ascending from the solver; populations paired in decreasing order.
  RVector pops(d);
  for (Eigen::Index k = 0; k < d; ++k) pops(k) = er.eigenvalues()(d - 1 - k);
  ErgotropyResult r;
  r.passive = eh.eigenvectors() * pops.cast<cplx>().asDiagonal() * eh.eigenvectors().adjoint();
  r.value = std::max(0.0, expectation(H, rho) - pops.dot(eh.eigenvalues()));
  return r;
}

/// W_x = (W+ + W-)/2 and W_y = (W+ - W-)/(2i).
inline CMatrix isospin_x(const Generators& g) { return 0.5 * (g.Wp + g.Wm); }
inline CMatrix isospin_y(const Generators& g) { return cplx(0.0, -0.5) * (g.Wp - g.Wm); }

inline constexpr double kWyTolerance = 1e-8;
inline constexpr int kThetaGridPoints = 1000;

/**
 * max_θ (tr[Hρ] - tr[H e^{-iθW_x} ρ e^{iθW_x}]) on a uniform grid over [0, 2π)
 * refined by golden-section search around the best grid point.
 */
inline double lasing_ergotropy_scan(const CMatrix& rho, const Generators& g, const CMatrix& H) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(isospin_x(g)));
  const CMatrix& V = es.eigenvectors();
  const RVector& mu = es.eigenvalues();
  const CMatrix rt = V.adjoint() * rho * V;
  const CMatrix ht = V.adjoint() * H * V;
  const Eigen::Index d = rho.rows();
  // tr[H U ρ U†] = Σ_jk Ht_kj ρt_jk e^{-iθ(μ_j - μ_k)}
  CMatrix m(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < d; ++k) m(j, k) = ht(k, j) * rt(j, k);
  const double e0 = expectation(H, rho);
  auto extracted = [&](double theta) {
    cplx s = 0.0;
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = 0; k < d; ++k) s += m(j, k) * std::exp(cplx(0.0, -theta * (mu(j) - mu(k))));
    return e0 - s.real();
  };
  const double step = 2.0 * M_PI / kThetaGridPoints;
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kThetaGridPoints; ++i) {
    const double v = extracted(i * step);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = (best - 1) * step, b = (best + 1) * step;
  double c = b - inv_phi * (b - a), e = a + inv_phi * (b - a);
  double fc = extracted(c), fe = extracted(e);
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    if (fc > fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - inv_phi * (b - a);
      fc = extracted(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + inv_phi * (b - a);
      fe = extracted(e);
    }
  }
  return std::max({best_val, fc, fe, 0.0});
}

struct LasingErgotropy {
  double value = 0.0;
  /// ⟨W_y⟩ was too large for the closed form and the scan was used.
  bool used_scan = false;
};

/// 2 w_l max(⟨W_z⟩, 0), falling back to the θ-scan when |⟨W_y⟩| > 1e-8.
inline LasingErgotropy lasing_ergotropy(const CMatrix& rho, const Generators& g, const CMatrix& H, double omega_l) {
  if (std::abs(expectation(isospin_y(g), rho)) > kWyTolerance) return {lasing_ergotropy_scan(rho, g, H), true};
  return {2.0 * omega_l * std::max(expectation(g.Wz, rho), 0.0), false};
}

inline LasingErgotropy lasing_ergotropy(const CMatrix& rho, const IrrepOperators& ops) {
  return lasing_ergotropy(rho, ops.gen, ops.H, ops.omega_h - ops.omega_c);
}

/// Boltzmann distribution over the q+1 states w = (p+k)/2, y = (p+2q)/3 - k, W = w.
inline CMatrix cold_limit_state(IrrepLabel label, double beta_h, double omega_h) {
  const auto basis = enumerate_basis(label);
  const auto d = static_cast<Eigen::Index>(basis.size());
  CMatrix rho = CMatrix::Zero(d, d);
  double z = 0.0;
  for (int k = 0; k <= label.q; ++k) z += std::exp(-k * beta_h * omega_h);
  for (int k = 0; k <= label.q; ++k) {
    const QuantumNumber w = QuantumNumber::ratio(label.p + k, 2);
    const WeightState s{w, w, QuantumNumber::ratio(label.p + 2 * label.q - 3 * k, 3)};
    const auto it = std::lower_bound(basis.begin(), basis.end(), s, basis_order);
    if (it == basis.end() || *it != s) throw ConsistencyError("cold_limit_state: line state missing from basis");
    const auto i = static_cast<Eigen::Index>(it - basis.begin());
    rho(i, i) = std::exp(-k * beta_h * omega_h) / z;
  }
  return rho;
}

/// w_l [p + q + 1/(1 - x) - (q+1)/(1 - x^{q+1})] with x = e^{-β_h w_h}.
inline double cold_limit_ergotropy(IrrepLabel label, double beta_h, double omega_h, double omega_l) {
  const int q = label.q;
  return omega_l * (label.p + q + 1.0 / (-std::expm1(-beta_h * omega_h)) -
                    (q + 1.0) / (-std::expm1(-(q + 1.0) * beta_h * omega_h)));
}

struct HeatCurrents {
  double hot = 0.0;
  double cold = 0.0;
};

/// w_h g_u tr{[n̄_h U+U- - (n̄_h+1) U-U+] ρ}.
inline double heat_current_hot(const CMatrix& rho, const Generators& g, const EngineParams& p) {
  const double nb = p.nbar_h();
  return p.omega_h * p.g_u * expectation(nb * g.Up * g.Um - (nb + 1.0) * g.Um * g.Up, rho);
}

/// w_c g_v tr{[n̄_c V+V- - (n̄_c+1) V-V+] ρ}.
inline double heat_current_cold(const CMatrix& rho, const Generators& g, const EngineParams& p) {
  const double nb = p.nbar_c();
  return p.omega_c * p.g_v * expectation(nb * g.Vp * g.Vm - (nb + 1.0) * g.Vm * g.Vp, rho);
}

namespace detail {

/// D†[O](X) = O† X O - {O†O, X}/2.
inline CMatrix adjoint_dissipator(const CMatrix& op, const CMatrix& x) {
  const CMatrix od = op.adjoint() * op;
  return op.adjoint() * x * op - 0.5 * (od * x + x * od);
}

}  // namespace detail

/// Currents tr{ρ g L*(H)} from the adjoint dissipators of each bath applied to H.
inline HeatCurrents adjoint_heat_currents(const CMatrix& rho, const Generators& g, const CMatrix& H,
                                          const EngineParams& p) {
  const double nh = p.nbar_h(), nc = p.nbar_c();
  const CMatrix lh = nh * detail::adjoint_dissipator(g.Um, H) + (nh + 1.0) * detail::adjoint_dissipator(g.Up, H);
  const CMatrix lc = nc * detail::adjoint_dissipator(g.Vm, H) + (nc + 1.0) * detail::adjoint_dissipator(g.Vp, H);
  return {p.g_u * expectation(lh, rho), p.g_v * expectation(lc, rho)};
}

/// w_l g_w tr{W+W- ρ}; zero outside the load model.
inline double load_power(const CMatrix& rho, const Generators& g, const EngineParams& p) {
  return p.omega_l() * p.effective_g_w() * expectation(g.Wp * g.Wm, rho);
}

/// -tr{H g_w D[W-] ρ}.
inline double load_power_from_dissipator(const CMatrix& rho, const Generators& g, const CMatrix& H,
                                         const EngineParams& p) {
  const CMatrix dr = g.Wm * rho * g.Wp - 0.5 * (g.Wp * g.Wm * rho + rho * g.Wp * g.Wm);
  return -p.effective_g_w() * (H * dr).trace().real();
}

/// i α w_l tr{(W+ - W-) ρ}; zero outside the driven model.
inline double driven_power(const CMatrix& rho, const Generators& g, const EngineParams& p) {
  const cplx v = kI * p.effective_alpha() * p.omega_l() * ((g.Wp - g.Wm) * rho).trace();
  return v.real();
}

/// Imaginary part of the driven-power trace, zero for Hermitian ρ.
inline double driven_power_imaginary_part(const CMatrix& rho, const Generators& g, const EngineParams& p) {
  const cplx v = kI * p.effective_alpha() * p.omega_l() * ((g.Wp - g.Wm) * rho).trace();
  return v.imag();
}

inline double power(const CMatrix& rho, const Generators& g, const EngineParams& p) {
  switch (p.model) {
    case Model::TwoBath: return 0.0;
    case Model::DissipativeLoad: return load_power(rho, g, p);
    case Model::Driven: return driven_power(rho, g, p);
  }
  return 0.0;
}

/// P / I_h; requires I_h > 0.
inline double efficiency(const CMatrix& rho, const Generators& g, const EngineParams& p) {
  const double ih = heat_current_hot(rho, g, p);
  if (!(ih > 0.0)) throw InvalidInput("efficiency: hot heat current is not positive");
  return power(rho, g, p) / ih;
}

/// N_g = n/3 + Y/2 - W_z, without the constant n/3 (it drops out of every rate).
inline CMatrix ground_population_operator(const Generators& g) { return 0.5 * g.Y - g.Wz; }

/// tr{N_g L(ρ)}.
inline double ground_population_rate(const CMatrix& rho, const Generators& g, const Liouvillian& L) {
  return expectation(ground_population_operator(g), L.apply(rho));
}

/// Figures of merit of one state.
struct ThermoReport {
  double energy = 0.0;
  double ergotropy = 0.0;
  double lasing_ergotropy = 0.0;
  double heat_hot = 0.0;
  double heat_cold = 0.0;
  double power = 0.0;
  /// P / I_h, NaN when I_h <= 0.
  double efficiency = std::numeric_limits<double>::quiet_NaN();
  /// tr{N_g L(ρ)}, zero in steady state.
  double ng_rate = 0.0;
  double first_law_residual = 0.0;
  double expect_wy = 0.0;
};

inline ThermoReport thermo_report(const CMatrix& rho, const Generators& g, const CMatrix& H, const EngineParams& p,
                                  const Liouvillian& L) {
  ThermoReport r;
  r.energy = expectation(H, rho);
  r.ergotropy = ergotropy(rho, H).value;
  r.lasing_ergotropy = lasing_ergotropy(rho, g, H, p.omega_l()).value;
  r.heat_hot = heat_current_hot(rho, g, p);
  r.heat_cold = heat_current_cold(rho, g, p);
  r.power = power(rho, g, p);
  if (r.heat_hot > 0.0) r.efficiency = r.power / r.heat_hot;
  r.ng_rate = ground_population_rate(rho, g, L);
  r.first_law_residual = r.heat_hot + r.heat_cold - r.power;
  r.expect_wy = expectation(isospin_y(g), rho);
  return r;
}

/// Σ_λ w_λ X_λ for every field; the efficiency is recomputed from the aggregated currents.
inline ThermoReport aggregate(const std::vector<ThermoReport>& reports, const std::vector<double>& weights) {
  if (reports.size() != weights.size()) throw InvalidInput("aggregate: size mismatch");
  ThermoReport a;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const double w = weights[i];
    const auto& r = reports[i];
    a.energy += w * r.energy;
    a.ergotropy += w * r.ergotropy;
    a.lasing_ergotropy += w * r.lasing_ergotropy;
    a.heat_hot += w * r.heat_hot;
    a.heat_cold += w * r.heat_cold;
    a.power += w * r.power;
    a.ng_rate += w * r.ng_rate;
    a.first_law_residual += w * r.first_law_residual;
    a.expect_wy += w * r.expect_wy;
  }
  if (a.heat_hot > 0.0) a.efficiency = a.power / a.heat_hot;
  return a;
}

/// Each field multiplied by n (independent-particle baseline from a single-particle report).
inline ThermoReport scaled(const ThermoReport& r, double n) {
  ThermoReport s = aggregate({r}, {n});
  s.efficiency = r.efficiency;
  return s;
}

}  // namespace su3engine
