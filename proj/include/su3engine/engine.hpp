/**
 * @file engine.hpp
 * @brief Per-irrep Lindblad generators, steady states, propagation and block states.
 *
 * Superoperators act on column-stacked density matrices, vec(AXB) = (B^T ⊗ A) vec(X).
 * All three models are written in the interaction picture of the free
 * Hamiltonian; the driven model is in the frame rotating at w_l, where the
 * drive becomes H_R = α (W+ + W-).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "su3engine/schur_weyl.hpp"
#include "su3engine/su3_algebra.hpp"
#include "su3engine/types.hpp"

namespace su3engine {

enum class Model { TwoBath, DissipativeLoad, Driven };

inline std::string to_string(Model m) {
  switch (m) {
    case Model::TwoBath: return "two_bath";
    case Model::DissipativeLoad: return "load";
    case Model::Driven: return "driven";
  }
  return "unknown";
}

inline Model parse_model(const std::string& s) {
  if (s == "two_bath") return Model::TwoBath;
  if (s == "load") return Model::DissipativeLoad;
  if (s == "driven") return Model::Driven;
  throw InvalidInput("unknown model '" + s + "' (expected two_bath, load or driven)");
}

/// Bose occupation 1/(e^{ωβ} - 1).
inline double bose_occupation(double omega, double beta) { return 1.0 / std::expm1(omega * beta); }

struct EngineParams {
  double omega_c = 2.0 / 3.0;
  double omega_h = 5.0 / 3.0;
  double beta_c = 1.5;
  double beta_h = 0.8;
  double g_u = 0.1;
  double g_v = 0.1;
  double g_w = 0.0;
  double alpha = 0.0;
  double beta0 = 1.0;
  Model model = Model::TwoBath;

  double omega_l() const { return omega_h - omega_c; }
  double nbar_c() const { return bose_occupation(omega_c, beta_c); }
  double nbar_h() const { return bose_occupation(omega_h, beta_h); }

  /// Load coupling is only part of the load model, the drive only of the driven model.
  double effective_g_w() const { return model == Model::DissipativeLoad ? g_w : 0.0; }
  double effective_alpha() const { return model == Model::Driven ? alpha : 0.0; }

  void validate() const {
    if (!(omega_c > 0.0) || !(omega_h > omega_c)) throw InvalidInput("EngineParams: require omega_h > omega_c > 0");
    if (!(beta_c > 0.0) || !(beta_h > 0.0)) throw InvalidInput("EngineParams: inverse temperatures must be positive");
    if (g_u < 0.0 || g_v < 0.0 || g_w < 0.0 || alpha < 0.0) throw InvalidInput("EngineParams: rates must be >= 0");
    if (!std::isfinite(beta0) || beta0 < 0.0) throw InvalidInput("EngineParams: beta0 must be finite and >= 0");
  }

  /// Number of channels with a nonzero rate that the model actually uses.
  int active_channels() const {
    return (g_u > 0.0) + (g_v > 0.0) + (effective_g_w() > 0.0) + (effective_alpha() > 0.0);
  }
};

/// Message when the drive leaves the weak-drive regime α <= w_l/10; empty otherwise.
inline std::optional<std::string> weak_drive_warning(const EngineParams& p) {
  if (p.model == Model::Driven && p.alpha > p.omega_l() / 10.0) {
    return "drive amplitude alpha=" + std::to_string(p.alpha) + " exceeds omega_l/10; the rotating-frame local "
           "master equation may be inaccurate";
  }
  return std::nullopt;
}

/// Vectorized Lindblad generator of one block.
struct Liouvillian {
  IrrepLabel label;
  Model model = Model::TwoBath;
  EngineParams params;
  Eigen::Index dim = 0;
  SparseCMatrix matrix;

  CMatrix dense() const { return CMatrix(matrix); }

  CMatrix apply(const CMatrix& rho) const { return unvec(matrix * vec(rho), dim); }
};

namespace detail {

inline SparseCMatrix sparse_identity(Eigen::Index d) {
  SparseCMatrix id(d, d);
  id.setIdentity();
  return id;
}

inline SparseCMatrix to_sparse(const CMatrix& m) { return m.sparseView(0.0, 0.0); }

/// D[O] = conj(O) ⊗ O - (I ⊗ O†O)/2 - ((O†O)^T ⊗ I)/2.
inline SparseCMatrix dissipator(const CMatrix& op) {
  const Eigen::Index d = op.rows();
  const SparseCMatrix id = sparse_identity(d);
  const SparseCMatrix o = to_sparse(op);
  const SparseCMatrix oc = to_sparse(op.conjugate());
  const SparseCMatrix od = to_sparse(op.adjoint() * op);
  const SparseCMatrix odt = to_sparse((op.adjoint() * op).transpose());
  SparseCMatrix out = Eigen::kroneckerProduct(oc, o);
  out -= 0.5 * SparseCMatrix(Eigen::kroneckerProduct(id, od));
  out -= 0.5 * SparseCMatrix(Eigen::kroneckerProduct(odt, id));
  return out;
}

}  // namespace detail

/// -i[H, ·] as a superoperator.
inline SparseCMatrix hamiltonian_superoperator(const CMatrix& h) {
  const Eigen::Index d = h.rows();
  const SparseCMatrix id = detail::sparse_identity(d);
  SparseCMatrix out = Eigen::kroneckerProduct(id, detail::to_sparse(h));
  out -= SparseCMatrix(Eigen::kroneckerProduct(detail::to_sparse(h.transpose()), id));
  return cplx(0.0, -1.0) * out;
}

/// g (n̄ D[O-] + (n̄+1) D[O+]).
inline SparseCMatrix dissipator_pair(const CMatrix& o_plus, const CMatrix& o_minus, double nbar, double g) {
  if (o_plus.rows() != o_plus.cols() || o_minus.rows() != o_plus.rows() || o_minus.cols() != o_plus.cols()) {
    throw InvalidInput("dissipator_pair: shape mismatch");
  }
  SparseCMatrix out(o_plus.rows() * o_plus.rows(), o_plus.rows() * o_plus.rows());
  if (g == 0.0) return out;
  if (nbar != 0.0) out += (g * nbar) * detail::dissipator(o_minus);
  out += (g * (nbar + 1.0)) * detail::dissipator(o_plus);
  out.prune(cplx(0.0));
  return out;
}

/**
 * Model generator for any set of collective generators:
 *   two_bath: g_u L_U(n̄_h) + g_v L_V(n̄_c)
 *   load:     + g_w D[W-]
 *   driven:   - i[α (W+ + W-), ·]
 */
inline SparseCMatrix model_generator(const Generators& g, const EngineParams& params) {
  params.validate();
  SparseCMatrix L = dissipator_pair(g.Up, g.Um, params.nbar_h(), params.g_u);
  L += dissipator_pair(g.Vp, g.Vm, params.nbar_c(), params.g_v);
  if (params.effective_g_w() > 0.0) L += params.effective_g_w() * detail::dissipator(g.Wm);
  if (params.effective_alpha() > 0.0) L += hamiltonian_superoperator(params.effective_alpha() * (g.Wp + g.Wm));
  L.prune(cplx(0.0));
  L.makeCompressed();
  return L;
}

inline Liouvillian build_liouvillian(const IrrepOperators& ops, const EngineParams& params) {
  return {ops.label, params.model, params, ops.dim(), model_generator(ops.gen, params)};
}

/// Generator of the dissipative part a two-bath engine would have with the same couplings.
inline Liouvillian two_bath_part(const Liouvillian& L, const Generators& g) {
  EngineParams p = L.params;
  p.model = Model::TwoBath;
  return {L.label, Model::TwoBath, p, L.dim, model_generator(g, p)};
}

struct SteadyStateSolution {
  CMatrix rho;
  double residual = 0.0;
  double min_eigenvalue = 0.0;
  /// True when the dense nullspace route was needed.
  bool used_nullspace = false;
};

inline constexpr double kSteadyResidualTolerance = 1e-10;
inline constexpr double kPsdTolerance = 1e-10;

namespace detail {

inline CMatrix finalize_density(const CVector& x, Eigen::Index d) {
  CMatrix rho = hermitian_part(unvec(x, d));
  const cplx tr = rho.trace();
  if (std::abs(tr) < 1e-300) throw ConsistencyError("steady state has vanishing trace");
  return rho / tr.real();
}

inline double residual_of(const Liouvillian& L, const CMatrix& rho) { return (L.matrix * vec(rho)).norm(); }

inline double min_eigenvalue(const CMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Copy of a d²×d² superoperator whose first row is replaced by the trace functional vec(I)^T.
inline SparseCMatrix replace_first_row_with_trace(const SparseCMatrix& m, Eigen::Index d) {
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<std::size_t>(m.nonZeros() + d));
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (SparseCMatrix::InnerIterator it(m, k); it; ++it)
      if (it.row() != 0) trips.emplace_back(it.row(), it.col(), it.value());
  for (Eigen::Index i = 0; i < d; ++i) trips.emplace_back(0, i + i * d, 1.0);
  SparseCMatrix out(m.rows(), m.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

/// Nullspace of the dense generator from its singular values.
inline CMatrix dense_nullspace(const SparseCMatrix& L, double rel_tol = 1e-9) {
  Eigen::BDCSVD<CMatrix> svd(CMatrix(L), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = rel_tol * std::max(1.0, sv(0));
  Eigen::Index nullity = 0;
  for (Eigen::Index i = sv.size() - 1; i >= 0 && sv(i) <= cut; --i) ++nullity;
  return svd.matrixV().rightCols(nullity);
}

}  // namespace detail

/**
 * Unique steady state of L. The trace condition replaces the first row of the
 * generator and the bordered system is solved with sparse LU; the dense
 * nullspace is computed only when that fails.
 */
inline SteadyStateSolution solve_steady_state(const Liouvillian& L) {
  const Eigen::Index d = L.dim;
  if (d == 1) return {CMatrix::Ones(1, 1), 0.0, 1.0, false};
  if (L.params.active_channels() < 2) {
    throw DegenerateDynamicsError("steady state is not unique: fewer than two of the couplings used by model '" +
                                      to_string(L.model) + "' are nonzero",
                                  0);
  }
  const Eigen::Index D = d * d;
  const SparseCMatrix A = detail::replace_first_row_with_trace(L.matrix, d);

  SteadyStateSolution sol;
  Eigen::SparseLU<SparseCMatrix> lu;
  lu.compute(A);
  bool ok = lu.info() == Eigen::Success;
  if (ok) {
    CVector rhs = CVector::Zero(D);
    rhs(0) = 1.0;
    const CVector x = lu.solve(rhs);
    ok = lu.info() == Eigen::Success && x.allFinite();
    if (ok) {
      sol.rho = detail::finalize_density(x, d);
      sol.residual = detail::residual_of(L, sol.rho);
      ok = sol.residual <= kSteadyResidualTolerance;
    }
  }
  if (!ok) {
    const CMatrix ns = detail::dense_nullspace(L.matrix);
    if (ns.cols() != 1) {
      throw DegenerateDynamicsError("stationary subspace has dimension " + std::to_string(ns.cols()),
                                    static_cast<std::size_t>(ns.cols()));
    }
    sol.rho = detail::finalize_density(ns.col(0), d);
    sol.residual = detail::residual_of(L, sol.rho);
    sol.used_nullspace = true;
    if (sol.residual > kSteadyResidualTolerance) {
      throw ConvergenceError("steady state residual " + std::to_string(sol.residual) + " above tolerance");
    }
  }
  sol.min_eigenvalue = detail::min_eigenvalue(sol.rho);
  if (sol.min_eigenvalue < -kPsdTolerance) {
    throw ConsistencyError("steady state is not positive semidefinite (min eigenvalue " +
                           std::to_string(sol.min_eigenvalue) + ")");
  }
  return sol;
}

inline CMatrix steady_state(const Liouvillian& L) { return solve_steady_state(L).rho; }

inline constexpr Eigen::Index kMaxDensePropagatorDim = 48;

/// Dense matrix of e^{Lt}.
inline CMatrix propagator(const Liouvillian& L, double t) {
  if (t < 0.0) throw InvalidInput("propagator: t must be >= 0");
  if (L.dim > kMaxDensePropagatorDim) throw InvalidInput("propagator: block too large for dense exponentiation");
  return (L.dense() * t).exp();
}

/// e^{Lt}(X) for an arbitrary operator X.
inline CMatrix propagate(const Liouvillian& L, const CMatrix& X, double t) {
  if (X.rows() != L.dim || X.cols() != L.dim) throw InvalidInput("propagate: operator shape mismatch");
  if (t == 0.0) return X;
  return unvec(propagator(L, t) * vec(X), L.dim);
}

/// Zeroes entries between different (w, y) weight spaces.
inline CMatrix diagonal_twirl(const CMatrix& rho, const std::vector<WeightState>& basis) {
  const auto d = static_cast<Eigen::Index>(basis.size());
  if (rho.rows() != d || rho.cols() != d) throw InvalidInput("diagonal_twirl: shape mismatch");
  CMatrix out = rho;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (!basis[static_cast<std::size_t>(i)].same_weight(basis[static_cast<std::size_t>(j)])) out(i, j) = 0.0;
  return out;
}

/// Largest |ρ_ij| between different weight spaces.
inline double off_weight_coherence(const CMatrix& rho, const std::vector<WeightState>& basis) {
  return (rho - diagonal_twirl(rho, basis)).cwiseAbs().maxCoeff();
}

/// Largest |ρ_ij| between states of the same weight but different W.
inline double same_weight_coherence(const CMatrix& rho, const std::vector<WeightState>& basis) {
  double mx = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j)
      if (i != j && basis[i].same_weight(basis[j]))
        mx = std::max(mx, std::abs(rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
  return mx;
}

struct BlockEntry {
  IrrepLabel label;
  double weight = 0.0;
  CMatrix rho;
};

/// ⊕_λ p^λ ρ^λ with inter-block coherences dropped.
struct BlockState {
  int n = 0;
  std::vector<BlockEntry> entries;

  double total_weight() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.weight;
    return s;
  }

  void validate(double tol = 1e-10) const {
    if (std::abs(total_weight() - 1.0) > tol) throw ConsistencyError("BlockState: weights do not sum to one");
    for (const auto& e : entries) {
      if (e.weight < -tol) throw ConsistencyError("BlockState: negative weight");
      if ((e.rho - e.rho.adjoint()).cwiseAbs().maxCoeff() > tol) throw ConsistencyError("BlockState: non-Hermitian block");
      if (std::abs(e.rho.trace() - 1.0) > tol) throw ConsistencyError("BlockState: block trace differs from one");
      if (detail::min_eigenvalue(e.rho) < -tol) throw ConsistencyError("BlockState: block not positive semidefinite");
    }
  }
};

/// Single-particle energies of (|e>, |g>, |f>) under H = w_l Wz - (w_c + w_h) Y / 2.
inline std::array<double, 3> single_particle_energies(double omega_c, double omega_h) {
  const double wl = omega_h - omega_c, s = (omega_c + omega_h) / 6.0;
  return {wl / 2.0 - s, -wl / 2.0 - s, 2.0 * s};
}

struct IrrepWeight {
  IrrepLabel label;
  double weight = 0.0;
};

/**
 * Irrep weights p^λ = m_λ s_λ(r) / (r1 + r2 + r3)^n of the product state ρ1^{⊗n}
 * with spectrum r. Evaluated in log space, so n may be large.
 */
inline std::vector<IrrepWeight> product_block_weights(int n, double r1, double r2, double r3) {
  if (n < 1) throw InvalidInput("product_block_weights: n must be >= 1");
  if (r1 < 0.0 || r2 < 0.0 || r3 < 0.0) throw InvalidInput("product_block_weights: r must be non-negative");
  const double mx = std::max({r1, r2, r3});
  if (!(mx > 0.0)) throw InvalidInput("product_block_weights: r must not vanish");
  const double a = r1 / mx, b = r2 / mx, c = r3 / mx;
  const double log_norm = n * std::log(a + b + c);
  std::vector<IrrepWeight> out;
  for (const auto& lam : partitions(n)) {
    const double lw = log_multiplicity(lam.label(), n) + log_schur_polynomial(lam, a, b, c) - log_norm;
    out.push_back({lam.label(), std::exp(lw)});
  }
  return out;
}

/// Gibbs state e^{-β0 H}/Z of a block with diagonal H.
inline CMatrix gibbs_state(const CMatrix& H, double beta0) {
  const RVector e = H.diagonal().real();
  const double e0 = e.minCoeff();
  RVector pop = (-(beta0) * (e.array() - e0)).exp().matrix();
  pop /= pop.sum();
  return pop.cast<cplx>().asDiagonal();
}

/// Each particle thermalised at β0: weights m_λ Z^λ/Z and per-irrep Gibbs states.
inline BlockState thermal_block_state(int n, double beta0, const EngineParams& params) {
  const auto eps = single_particle_energies(params.omega_c, params.omega_h);
  const double emin = *std::min_element(eps.begin(), eps.end());
  const auto weights = product_block_weights(n, std::exp(-beta0 * (eps[0] - emin)),
                                             std::exp(-beta0 * (eps[1] - emin)), std::exp(-beta0 * (eps[2] - emin)));
  BlockState bs;
  bs.n = n;
  for (const auto& w : weights) {
    const auto ops = irrep_matrices(w.label, params.omega_c, params.omega_h);
    bs.entries.push_back({w.label, w.weight, gibbs_state(ops.H, beta0)});
  }
  return bs;
}

}  // namespace su3engine
