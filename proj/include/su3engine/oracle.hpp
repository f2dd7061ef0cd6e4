/**
 * @file oracle.hpp
 * @brief Brute-force reference on the full product space (C^3)^n.
 *
 * Collective coupling uses the collective generators as jump operators;
 * independent coupling gives every particle its own dissipators. Steady states
 * are obtained by projecting the initial state onto the stationary manifold
 * (n <= 3) or by adaptive time integration (n = 4).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "su3engine/engine.hpp"
#include "su3engine/schur_weyl.hpp"
#include "su3engine/spectra.hpp"
#include "su3engine/thermo.hpp"

namespace su3engine {

enum class Coupling { Collective, Independent };

inline constexpr int kMaxOracleParticles = 4;
inline constexpr int kMaxDenseOracleParticles = 3;

struct FullSpaceModel {
  int n = 0;
  Coupling coupling = Coupling::Collective;
  EngineParams params;
  /// Collective generators.
  Generators gen;
  CMatrix H;
  /// One entry for collective coupling, one per particle otherwise.
  std::vector<Generators> channels;
  Liouvillian L;
};

/// 1 ⊗ ... ⊗ A (slot k) ⊗ ... ⊗ 1.
inline CMatrix embed_single(const CMatrix& single, int k, int n) {
  detail::check_dense_n(n, "embed_single");
  const auto left = static_cast<Eigen::Index>(detail::pow3(k));
  const auto right = static_cast<Eigen::Index>(detail::pow3(n - k - 1));
  const auto dim = static_cast<Eigen::Index>(detail::pow3(n));
  CMatrix out = CMatrix::Zero(dim, dim);
  for (Eigen::Index a = 0; a < left; ++a)
    for (Eigen::Index i = 0; i < 3; ++i)
      for (Eigen::Index j = 0; j < 3; ++j)
        for (Eigen::Index b = 0; b < right; ++b) out((a * 3 + i) * right + b, (a * 3 + j) * right + b) = single(i, j);
  return out;
}

inline FullSpaceModel make_full_model(int n, const EngineParams& params, Coupling coupling = Coupling::Collective) {
  if (n < 1 || n > kMaxOracleParticles) throw InvalidInput("oracle: n must be between 1 and 4");
  FullSpaceModel m;
  m.n = n;
  m.coupling = coupling;
  m.params = params;
  m.gen = collective_generators(n);
  m.H = free_hamiltonian(m.gen, params.omega_c, params.omega_h);
  if (coupling == Coupling::Collective) {
    m.channels = {m.gen};
  } else {
    const auto sp = single_particle_generators(params.omega_c, params.omega_h).gen;
    for (int k = 0; k < n; ++k) {
      m.channels.push_back({embed_single(sp.Wz, k, n), embed_single(sp.Y, k, n), embed_single(sp.Wp, k, n),
                            embed_single(sp.Wm, k, n), embed_single(sp.Up, k, n), embed_single(sp.Um, k, n),
                            embed_single(sp.Vp, k, n), embed_single(sp.Vm, k, n)});
    }
  }
  SparseCMatrix L(m.H.rows() * m.H.rows(), m.H.rows() * m.H.rows());
  for (const auto& ch : m.channels) L += model_generator(ch, params);
  L.makeCompressed();
  m.L = {IrrepLabel{}, params.model, params, m.H.rows(), L};
  return m;
}

/// ⊗_k e^{-β0 h}/z on (C^3)^n.
inline CMatrix thermal_product_state(int n, double beta0, const EngineParams& params) {
  detail::check_dense_n(n, "thermal_product_state");
  const auto eps = single_particle_energies(params.omega_c, params.omega_h);
  CMatrix single = CMatrix::Zero(3, 3);
  double z = 0.0;
  for (int i = 0; i < 3; ++i) z += std::exp(-beta0 * (eps[static_cast<std::size_t>(i)] - eps[1]));
  for (int i = 0; i < 3; ++i) single(i, i) = std::exp(-beta0 * (eps[static_cast<std::size_t>(i)] - eps[1])) / z;
  CMatrix out = single;
  for (int k = 1; k < n; ++k) out = Eigen::kroneckerProduct(out, single).eval();
  return out;
}

struct FullSteadyState {
  CMatrix rho;
  double residual = 0.0;
  /// Dimension of the stationary manifold (dense route) or 0.
  Eigen::Index nullity = 0;
  /// Final integration time (integration route) or 0.
  double time = 0.0;
};

inline constexpr double kOracleStationarityTolerance = 1e-8;
inline constexpr double kOracleStepTolerance = 1e-10;

namespace detail {

/// Adaptive RK4 with step doubling until ‖Lρ‖ <= target.
inline FullSteadyState integrate_to_stationarity(const FullSpaceModel& m, const CMatrix& rho0, double t_cap,
                                                 double target) {
  const SparseCMatrix& L = m.L.matrix;
  auto rk4 = [&](const CVector& y, double h) {
    const CVector k1 = L * y;
    const CVector k2 = L * (y + 0.5 * h * k1);
    const CVector k3 = L * (y + 0.5 * h * k2);
    const CVector k4 = L * (y + h * k3);
    return CVector(y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };
  CVector y = vec(rho0);
  double t = 0.0, h = 0.1;
  double residual = (L * y).norm();
  while (residual > target) {
    if (t > t_cap) {
      throw ConvergenceError("oracle integration did not become stationary by t=" + std::to_string(t_cap) +
                             " (residual " + std::to_string(residual) + ")");
    }
    const CVector full = rk4(y, h);
    const CVector half = rk4(rk4(y, 0.5 * h), 0.5 * h);
    const double err = (half - full).cwiseAbs().maxCoeff() / 15.0;
    if (err <= kOracleStepTolerance) {
      y = half + (half - full) / 15.0;
      t += h;
      residual = (L * y).norm();
    }
    const double factor = err > 0.0 ? 0.9 * std::pow(kOracleStepTolerance / err, 0.2) : 2.0;
    h *= std::clamp(factor, 0.2, 2.0);
  }
  FullSteadyState out;
  out.rho = hermitian_part(unvec(y, m.L.dim));
  out.rho /= out.rho.trace().real();
  out.residual = (L * vec(out.rho)).norm();
  out.time = t;
  return out;
}

}  // namespace detail

/// Singular value decomposition of the dense full-space generator with its null spaces.
struct StationaryStructure {
  CMatrix U, V;
  RVector sv;
  /// Right (stationary states) and left (conserved quantities) null vectors.
  CMatrix R, Lam;
  Eigen::Index nullity = 0;
};

inline StationaryStructure stationary_structure(const FullSpaceModel& m) {
  if (m.n > kMaxDenseOracleParticles) throw InvalidInput("stationary_structure: dense route limited to n <= 3");
  Eigen::BDCSVD<CMatrix> svd(m.L.dense(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  StationaryStructure s;
  s.U = svd.matrixU();
  s.V = svd.matrixV();
  s.sv = svd.singularValues();
  const double cut = 1e-9 * std::max(1.0, s.sv(0));
  for (Eigen::Index i = s.sv.size() - 1; i >= 0 && s.sv(i) <= cut; --i) ++s.nullity;
  s.R = s.V.rightCols(s.nullity);
  s.Lam = s.U.rightCols(s.nullity);
  return s;
}

/// Stationary state R (Λ†R)^{-1} Λ† vec(ρ0) reached from ρ0.
inline FullSteadyState full_steady_state(const FullSpaceModel& m, const StationaryStructure& s, const CMatrix& rho0) {
  if (rho0.rows() != m.L.dim || rho0.cols() != m.L.dim) throw InvalidInput("full_steady_state: shape mismatch");
  const CVector x = s.R * (s.Lam.adjoint() * s.R).partialPivLu().solve(s.Lam.adjoint() * vec(rho0));
  FullSteadyState out;
  out.rho = hermitian_part(unvec(x, m.L.dim));
  out.rho /= out.rho.trace().real();
  out.nullity = s.nullity;
  out.residual = (m.L.matrix * vec(out.rho)).norm();
  if (out.residual > kOracleStationarityTolerance) {
    throw ConvergenceError("oracle steady state residual " + std::to_string(out.residual) + " above tolerance");
  }
  return out;
}

/// Stationary state reached from rho0: dense projection for n <= 3, time integration to ‖Lρ‖ <= target for n = 4.
inline FullSteadyState full_steady_state(const FullSpaceModel& m, const CMatrix& rho0,
                                         double target = kOracleStationarityTolerance) {
  if (rho0.rows() != m.L.dim || rho0.cols() != m.L.dim) throw InvalidInput("full_steady_state: shape mismatch");
  if (m.n <= kMaxDenseOracleParticles) return full_steady_state(m, stationary_structure(m), rho0);
  const double gmin = std::min({m.params.g_u > 0 ? m.params.g_u : 1e300, m.params.g_v > 0 ? m.params.g_v : 1e300,
                                m.params.effective_g_w() > 0 ? m.params.effective_g_w() : 1e300});
  FullSteadyState out = detail::integrate_to_stationarity(m, rho0, 5000.0 / gmin, std::min(target, kOracleStationarityTolerance));
  if (out.residual > kOracleStationarityTolerance) {
    throw ConvergenceError("oracle steady state residual " + std::to_string(out.residual) + " above tolerance");
  }
  return out;
}

/**
 * S(ω_l) of a stationary full-space state: y solves -L y = ρ raise - tr(ρ raise) ρ
 * with no component along the stationary manifold (the Δ → 0 limit of the resolvent).
 */
inline double full_space_spectrum_peak(const FullSpaceModel& m, const StationaryStructure& s, const CMatrix& rho,
                                       const CMatrix& raise, const CMatrix& lower) {
  const double p_tot = (raise * lower * rho).trace().real();
  if (!(p_tot > 0.0)) throw InvalidInput("full_space_spectrum_peak: emitted flux vanishes");
  const CVector x0 = vec(rho * raise - (rho * raise).trace() * rho);
  const Eigen::Index r = s.sv.size() - s.nullity;
  const CVector coeff = (s.U.leftCols(r).adjoint() * x0).cwiseQuotient(s.sv.head(r).cast<cplx>());
  CVector y = -(s.V.leftCols(r) * coeff);
  y -= s.R * (s.Lam.adjoint() * s.R).partialPivLu().solve(s.Lam.adjoint() * y);
  const cplx value = (lower * unvec(y, m.L.dim)).trace();
  return value.real() / (M_PI * p_tot);
}

/// Reduced bases and multiplicity copies of every irrep of n particles.
struct SchurDecomposer {
  int n = 0;
  std::vector<ReducedBasis> bases;
  std::vector<std::vector<CMatrix>> copies;

  /// Bases are aligned to the algebraic basis of each irrep.
  explicit SchurDecomposer(int particles) : n(particles) {
    for (const auto& lam : partitions(n)) {
      const auto ops = irrep_matrices(lam.label(), 1.0, 2.0);
      bases.push_back(align_to_algebraic(reduced_basis(lam), ops));
      copies.push_back(multiplicity_copies(bases.back()));
    }
  }

  std::size_t index_of(IrrepLabel label) const {
    for (std::size_t i = 0; i < bases.size(); ++i)
      if (bases[i].label == label) return i;
    throw InvalidInput("SchurDecomposer: irrep " + label.to_string() + " does not occur");
  }
};

struct DecomposedState {
  BlockState blocks;
  /// |Σ p^λ - 1|.
  double defect = 0.0;
};

inline constexpr double kDecompositionDefectTolerance = 1e-8;

/// p^λ = Σ_s tr(B_s† ρ B_s), ρ^λ = Σ_s B_s† ρ B_s / p^λ, in each reduced-basis ordering.
inline DecomposedState decompose_full_state(const CMatrix& rho, const SchurDecomposer& dec) {
  DecomposedState out;
  out.blocks.n = dec.n;
  double total = 0.0;
  for (std::size_t i = 0; i < dec.bases.size(); ++i) {
    const Eigen::Index d = dec.bases[i].dim();
    CMatrix block = CMatrix::Zero(d, d);
    for (const auto& b : dec.copies[i]) block += b.adjoint() * rho * b;
    const double p = block.trace().real();
    total += p;
    out.blocks.entries.push_back({dec.bases[i].label, p, p > 1e-300 ? CMatrix(hermitian_part(block) / p) : block});
  }
  out.defect = std::abs(total - 1.0);
  if (out.defect > kDecompositionDefectTolerance) {
    throw ConsistencyError("decompose_full_state: weights sum to " + std::to_string(total));
  }
  return out;
}

/// B ρ^λ B† for the first copy.
inline CMatrix embed_block(const CMatrix& block, const ReducedBasis& basis) {
  return basis.isometry * block * basis.isometry.adjoint();
}

/// Thermodynamic quantities with unreduced operators; ergotropies are those of the full space.
inline ThermoReport full_observables(const CMatrix& rho, const FullSpaceModel& m) {
  ThermoReport r = thermo_report(rho, m.gen, m.H, m.params, m.L);
  if (m.coupling == Coupling::Independent) {
    r.heat_hot = r.heat_cold = 0.0;
    double pw = 0.0;
    for (const auto& ch : m.channels) {
      r.heat_hot += heat_current_hot(rho, ch, m.params);
      r.heat_cold += heat_current_cold(rho, ch, m.params);
      if (m.params.model == Model::DissipativeLoad) pw += load_power(rho, ch, m.params);
    }
    if (m.params.model == Model::DissipativeLoad) r.power = pw;
    r.efficiency = r.heat_hot > 0.0 ? r.power / r.heat_hot : std::numeric_limits<double>::quiet_NaN();
    r.first_law_residual = r.heat_hot + r.heat_cold - r.power;
  }
  return r;
}

}  // namespace su3engine
