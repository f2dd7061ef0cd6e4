/**
 * @file schur_weyl.hpp
 * @brief Partitions, irrep dimensions, Young symmetrizers and reduced Schur bases for n qutrits.
 *
 * Product states |i_1 ... i_n> are indexed lexicographically with particle 1
 * most significant. Dense constructions are limited to n <= 6.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "su3engine/su3_algebra.hpp"
#include "su3engine/types.hpp"

namespace su3engine {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr int kMaxDenseParticles = 6;

/// Young diagram with at most three rows.
struct Partition3 {
  std::array<int, 3> rows{0, 0, 0};

  constexpr auto operator<=>(const Partition3&) const = default;

  constexpr int n() const { return rows[0] + rows[1] + rows[2]; }
  constexpr bool valid() const { return rows[0] >= rows[1] && rows[1] >= rows[2] && rows[2] >= 0; }
  constexpr IrrepLabel label() const { return {rows[0] - rows[1], rows[1] - rows[2]}; }

  std::string to_string() const {
    return "[" + std::to_string(rows[0]) + "," + std::to_string(rows[1]) + "," + std::to_string(rows[2]) + "]";
  }
};

/// Partition of n with the given (p,q); columns of length three fill the remainder.
inline Partition3 partition_for(IrrepLabel label, int n) {
  if (!label.occurs_for(n)) {
    throw InvalidInput("irrep " + label.to_string() + " does not occur for n=" + std::to_string(n));
  }
  const int l3 = (n - label.p - 2 * label.q) / 3;
  return {{l3 + label.q + label.p, l3 + label.q, l3}};
}

/// All partitions of n into at most three parts, lexicographically decreasing.
inline std::vector<Partition3> partitions(int n) {
  if (n < 1) throw InvalidInput("partitions: n must be >= 1");
  std::vector<Partition3> out;
  for (int a = n; a >= 0; --a) {
    for (int b = std::min(a, n - a); b >= 0; --b) {
      const int c = n - a - b;
      if (c <= b) out.push_back({{a, b, c}});
    }
  }
  return out;
}

/// Particle-permutation multiplicity m_λ as an exact integer.
inline BigInt multiplicity_exact(IrrepLabel label, int n) {
  const Partition3 lam = partition_for(label, n);
  auto factorial = [](int k) {
    BigInt f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  };
  const BigInt two_d = BigInt(label.p + 1) * (label.p + label.q + 2) * (label.q + 1);
  const BigInt num = two_d * factorial(n);
  const BigInt den = factorial(lam.rows[0] + 2) * factorial(lam.rows[1] + 1) * factorial(lam.rows[2]);
  if (num % den != 0) throw ConsistencyError("multiplicity is not an integer for " + label.to_string());
  return num / den;
}

inline std::uint64_t multiplicity(IrrepLabel label, int n) {
  const BigInt m = multiplicity_exact(label, n);
  if (m > std::numeric_limits<std::uint64_t>::max()) {
    throw InvalidInput("multiplicity overflows 64 bits for n=" + std::to_string(n));
  }
  return m.convert_to<std::uint64_t>();
}

/// log m_λ, usable for large n.
inline double log_multiplicity(IrrepLabel label, int n) {
  const Partition3 lam = partition_for(label, n);
  return std::log(2.0 * static_cast<double>(label.dimension())) + std::lgamma(n + 1.0) -
         std::lgamma(lam.rows[0] + 3.0) - std::lgamma(lam.rows[1] + 2.0) - std::lgamma(lam.rows[2] + 1.0);
}

struct IrrepDims {
  std::uint64_t dimension = 0;
  std::uint64_t multiplicity = 0;
};

inline IrrepDims dims(const Partition3& lam, int n) {
  if (!lam.valid() || lam.n() != n) throw InvalidInput("dims: " + lam.to_string() + " is not a partition of n");
  return {lam.label().dimension(), multiplicity(lam.label(), n)};
}

/// Counts (t0, t1, t2) of particles in |0>, |1>, |2>.
using TypeVector = std::array<int, 3>;

/// Weight (w, y) carried by every product state of type t.
inline std::pair<QuantumNumber, QuantumNumber> type_weight(const TypeVector& t) {
  return {QuantumNumber::ratio(t[0] - t[1], 2), QuantumNumber::ratio(t[0] + t[1] - 2 * t[2], 3)};
}

/// Semistandard filling with entries 0..2, stored row by row.
struct Tableau {
  std::vector<int> entries;

  TypeVector type() const {
    TypeVector t{0, 0, 0};
    for (int e : entries) ++t[e];
    return t;
  }
};

/// Semistandard tableaux of shape λ in lexicographic order of the row-major reading.
inline std::vector<Tableau> semistandard_tableaux(const Partition3& lam) {
  if (!lam.valid()) throw InvalidInput("semistandard_tableaux: invalid partition " + lam.to_string());
  std::vector<std::pair<int, int>> cells;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < lam.rows[r]; ++c) cells.emplace_back(r, c);
  std::vector<Tableau> out;
  std::vector<int> filling(cells.size(), 0);
  auto at = [&](int r, int c) { return filling[static_cast<std::size_t>(
                                    (r > 0 ? lam.rows[0] : 0) + (r > 1 ? lam.rows[1] : 0) + c)]; };
  auto fill = [&](auto&& self, std::size_t k) -> void {
    if (k == cells.size()) {
      out.push_back({filling});
      return;
    }
    const auto [r, c] = cells[k];
    int lo = 0;
    if (c > 0) lo = std::max(lo, at(r, c - 1));
    if (r > 0) lo = std::max(lo, at(r - 1, c) + 1);
    for (int v = lo; v <= 2; ++v) {
      filling[k] = v;
      self(self, k + 1);
    }
  };
  fill(fill, 0);
  return out;
}

/// Schur polynomial s_λ(r1, r2, r3) as a sum over Gelfand-Tsetlin patterns.
inline double schur_polynomial(const Partition3& lam, double r1, double r2, double r3) {
  if (!lam.valid()) throw InvalidInput("schur_polynomial: invalid partition " + lam.to_string());
  const int n = lam.n();
  double s = 0.0;
  for (int a1 = lam.rows[1]; a1 <= lam.rows[0]; ++a1)
    for (int a2 = lam.rows[2]; a2 <= lam.rows[1]; ++a2)
      for (int b = a2; b <= a1; ++b) s += std::pow(r1, b) * std::pow(r2, a1 + a2 - b) * std::pow(r3, n - a1 - a2);
  return s;
}

/// log s_λ(r1, r2, r3) for r_i >= 0, accumulated in log space; -inf when the polynomial vanishes.
inline double log_schur_polynomial(const Partition3& lam, double r1, double r2, double r3) {
  if (!lam.valid()) throw InvalidInput("log_schur_polynomial: invalid partition " + lam.to_string());
  const int n = lam.n();
  const std::array<double, 3> lr{std::log(r1), std::log(r2), std::log(r3)};
  auto term = [&](int k, int i) { return k == 0 ? 0.0 : k * lr[static_cast<std::size_t>(i)]; };
  std::vector<double> logs;
  for (int a1 = lam.rows[1]; a1 <= lam.rows[0]; ++a1)
    for (int a2 = lam.rows[2]; a2 <= lam.rows[1]; ++a2)
      for (int b = a2; b <= a1; ++b) logs.push_back(term(b, 0) + term(a1 + a2 - b, 1) + term(n - a1 - a2, 2));
  const double mx = *std::max_element(logs.begin(), logs.end());
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - mx);
  return mx + std::log(acc);
}

namespace detail {

inline std::size_t pow3(int n) {
  std::size_t r = 1;
  for (int i = 0; i < n; ++i) r *= 3;
  return r;
}

inline void check_dense_n(int n, const char* who) {
  if (n < 1 || n > kMaxDenseParticles) {
    throw InvalidInput(std::string(who) + ": dense construction supports 1 <= n <= 6, got " + std::to_string(n));
  }
}

inline std::vector<int> digits_of(std::size_t index, int n) {
  std::vector<int> d(static_cast<std::size_t>(n));
  for (int k = n - 1; k >= 0; --k) {
    d[static_cast<std::size_t>(k)] = static_cast<int>(index % 3);
    index /= 3;
  }
  return d;
}

inline std::size_t index_of_digits(const std::vector<int>& d) {
  std::size_t idx = 0;
  for (int v : d) idx = idx * 3 + static_cast<std::size_t>(v);
  return idx;
}

/// Index of P(σ)|s>, where particle k moves to position perm[k].
inline std::size_t permuted_index(std::size_t index, const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  const auto d = digits_of(index, n);
  std::vector<int> out(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) out[static_cast<std::size_t>(perm[k])] = d[k];
  return index_of_digits(out);
}

inline int permutation_sign(const std::vector<int>& perm) {
  int sign = 1;
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(perm[j])) {
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

/// All permutations of {0..n-1} that only shuffle particles within each block.
inline std::vector<std::vector<int>> block_permutations(int n, const std::vector<std::vector<int>>& blocks) {
  std::vector<std::vector<int>> out{std::vector<int>(static_cast<std::size_t>(n))};
  std::iota(out[0].begin(), out[0].end(), 0);
  for (const auto& block : blocks) {
    if (block.size() < 2) continue;
    std::vector<std::vector<int>> next;
    std::vector<int> images = block;
    std::sort(images.begin(), images.end());
    do {
      for (auto base : out) {
        for (std::size_t k = 0; k < block.size(); ++k) base[static_cast<std::size_t>(block[k])] = images[k];
        next.push_back(std::move(base));
      }
    } while (std::next_permutation(images.begin(), images.end()));
    out = std::move(next);
  }
  return out;
}

/// Particle labels (0-based) in the rows and columns of the row-major standard tableau.
inline std::pair<std::vector<std::vector<int>>, std::vector<std::vector<int>>> canonical_tableau(const Partition3& lam) {
  std::vector<std::vector<int>> rows(3), cols(static_cast<std::size_t>(lam.rows[0]));
  int label = 0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < lam.rows[r]; ++c) {
      rows[static_cast<std::size_t>(r)].push_back(label);
      cols[static_cast<std::size_t>(c)].push_back(label);
      ++label;
    }
  return {rows, cols};
}

/// Product-state indices of type t, ascending.
inline std::vector<std::size_t> type_indices(const TypeVector& t, int n) {
  std::vector<std::size_t> out;
  const std::size_t total = pow3(n);
  for (std::size_t i = 0; i < total; ++i) {
    TypeVector c{0, 0, 0};
    for (int v : digits_of(i, n)) ++c[static_cast<std::size_t>(v)];
    if (c == t) out.push_back(i);
  }
  return out;
}

}  // namespace detail

/// Dense permutation operator P(σ) on (C^3)^n; particle k is moved to slot perm[k].
inline CMatrix permutation_operator(const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  detail::check_dense_n(n, "permutation_operator");
  const std::size_t dim = detail::pow3(n);
  CMatrix P = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i)
    P(static_cast<Eigen::Index>(detail::permuted_index(i, perm)), static_cast<Eigen::Index>(i)) = 1.0;
  return P;
}

/// Young symmetrizer restricted to one type subspace, in the ascending product-state basis of that type.
struct RestrictedSymmetrizer {
  TypeVector type{0, 0, 0};
  std::vector<std::size_t> indices;
  CMatrix matrix;
};

/**
 * (Σ_r P(r)) (Σ_c sgn(c) P(c)) for the row-major standard tableau of λ, restricted
 * to product states of type t. For λ = [2,1,0] this is (1 + P_(213))(1 - P_(321)).
 */
inline RestrictedSymmetrizer young_symmetrizer(const Partition3& lam, const TypeVector& t) {
  const int n = lam.n();
  detail::check_dense_n(n, "young_symmetrizer");
  if (!lam.valid()) throw InvalidInput("young_symmetrizer: invalid partition " + lam.to_string());
  if (t[0] < 0 || t[1] < 0 || t[2] < 0 || t[0] + t[1] + t[2] != n) {
    throw InvalidInput("young_symmetrizer: type vector does not sum to n");
  }
  const auto tableaux = semistandard_tableaux(lam);
  if (std::none_of(tableaux.begin(), tableaux.end(), [&](const Tableau& tb) { return tb.type() == t; })) {
    throw InvalidInput("young_symmetrizer: no semistandard filling of " + lam.to_string() + " has this type");
  }
  RestrictedSymmetrizer out;
  out.type = t;
  out.indices = detail::type_indices(t, n);
  const auto k = static_cast<Eigen::Index>(out.indices.size());
  std::vector<int> local(detail::pow3(n), -1);
  for (std::size_t i = 0; i < out.indices.size(); ++i) local[out.indices[i]] = static_cast<int>(i);

  const auto [rows, cols] = detail::canonical_tableau(lam);
  CMatrix row_sum = CMatrix::Zero(k, k);
  CMatrix col_sum = CMatrix::Zero(k, k);
  for (const auto& perm : detail::block_permutations(n, rows))
    for (Eigen::Index j = 0; j < k; ++j)
      row_sum(local[detail::permuted_index(out.indices[static_cast<std::size_t>(j)], perm)], j) += 1.0;
  for (const auto& perm : detail::block_permutations(n, cols)) {
    const double sgn = detail::permutation_sign(perm);
    for (Eigen::Index j = 0; j < k; ++j)
      col_sum(local[detail::permuted_index(out.indices[static_cast<std::size_t>(j)], perm)], j) += sgn;
  }
  out.matrix = row_sum * col_sum;
  return out;
}

/// Σ_k 1 ⊗ ... ⊗ A_k ⊗ ... ⊗ 1 on (C^3)^n.
inline CMatrix collective_operator(const CMatrix& single, int n) {
  detail::check_dense_n(n, "collective_operator");
  if (single.rows() != 3 || single.cols() != 3) throw InvalidInput("collective_operator: expected a 3x3 matrix");
  const auto dim = static_cast<Eigen::Index>(detail::pow3(n));
  CMatrix out = CMatrix::Zero(dim, dim);
  for (int k = 0; k < n; ++k) {
    const auto left = static_cast<Eigen::Index>(detail::pow3(k));
    const auto right = static_cast<Eigen::Index>(detail::pow3(n - k - 1));
    for (Eigen::Index a = 0; a < left; ++a)
      for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = 0; j < 3; ++j) {
          if (single(i, j) == cplx(0.0)) continue;
          for (Eigen::Index b = 0; b < right; ++b)
            out((a * 3 + i) * right + b, (a * 3 + j) * right + b) += single(i, j);
        }
  }
  return out;
}

/// All eight collective generators on (C^3)^n.
inline Generators collective_generators(int n) {
  const auto sp = single_particle_generators(0.0, 1.0).gen;
  return {collective_operator(sp.Wz, n), collective_operator(sp.Y, n), collective_operator(sp.Wp, n),
          collective_operator(sp.Wm, n), collective_operator(sp.Up, n), collective_operator(sp.Um, n),
          collective_operator(sp.Vp, n), collective_operator(sp.Vm, n)};
}

/// Orthonormal columns spanning one copy of irrep λ inside (C^3)^n.
struct ReducedBasis {
  Partition3 partition;
  IrrepLabel label;
  CMatrix isometry;
  /// Quantum numbers of each column.
  std::vector<WeightState> states;

  int n() const { return partition.n(); }
  Eigen::Index dim() const { return isometry.cols(); }
};

inline constexpr double kSymmetrizerRankTolerance = 1e-8;

/**
 * Reduced Schur basis of λ from the ranges of the restricted Young symmetrizers.
 *
 * Types appear in order of first occurrence among the lexicographically ordered
 * semistandard tableaux. Columns sharing a type are eigenvectors of the
 * projected W^2, ordered by W descending, with the largest component made real
 * and positive.
 */
inline ReducedBasis reduced_basis(const Partition3& lam) {
  const int n = lam.n();
  detail::check_dense_n(n, "reduced_basis");
  ReducedBasis rb;
  rb.partition = lam;
  rb.label = lam.label();
  const auto dim = static_cast<Eigen::Index>(detail::pow3(n));
  const Eigen::Index d = static_cast<Eigen::Index>(rb.label.dimension());
  rb.isometry = CMatrix::Zero(dim, d);

  std::vector<TypeVector> types;
  std::vector<int> kostka;
  for (const auto& tb : semistandard_tableaux(lam)) {
    const auto t = tb.type();
    auto it = std::find(types.begin(), types.end(), t);
    if (it == types.end()) {
      types.push_back(t);
      kostka.push_back(1);
    } else {
      ++kostka[static_cast<std::size_t>(it - types.begin())];
    }
  }

  const auto sp = single_particle_generators(0.0, 1.0).gen;
  const CMatrix Wp = collective_operator(sp.Wp, n);
  const CMatrix Wz = collective_operator(sp.Wz, n);
  const CMatrix W2 = Wp.adjoint() * Wp + Wz * Wz + Wz;

  Eigen::Index col = 0;
  for (std::size_t ti = 0; ti < types.size(); ++ti) {
    const auto sym = young_symmetrizer(lam, types[ti]);
    Eigen::JacobiSVD<CMatrix> svd(sym.matrix, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > kSymmetrizerRankTolerance * sv(0)) ++rank;
    if (rank != kostka[ti]) {
      throw ConsistencyError("reduced_basis: symmetrizer rank " + std::to_string(rank) + " differs from " +
                             std::to_string(kostka[ti]) + " semistandard fillings for " + lam.to_string());
    }
    CMatrix Q = CMatrix::Zero(dim, rank);
    for (std::size_t i = 0; i < sym.indices.size(); ++i)
      Q.row(static_cast<Eigen::Index>(sym.indices[i])) = svd.matrixU().row(static_cast<Eigen::Index>(i)).head(rank);

    const CMatrix w2 = hermitian_part(Q.adjoint() * W2 * Q);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(w2);
    const auto [w, y] = type_weight(types[ti]);
    for (Eigen::Index k = rank - 1; k >= 0; --k) {
      CVector v = Q * es.eigenvectors().col(k);
      Eigen::Index arg = 0;
      v.cwiseAbs().maxCoeff(&arg);
      v *= std::conj(v(arg)) / std::abs(v(arg));
      const double ev = es.eigenvalues()(k);
      const double twoW = std::sqrt(1.0 + 4.0 * ev) - 1.0;
      const int twoW_int = static_cast<int>(std::lround(twoW));
      if (std::abs(twoW - twoW_int) > 1e-6) {
        throw ConsistencyError("reduced_basis: W^2 eigenvalue " + std::to_string(ev) + " is not W(W+1)");
      }
      if (k + 1 < rank && std::abs(es.eigenvalues()(k + 1) - ev) < 1e-6) {
        throw ConsistencyError("reduced_basis: degenerate W within one weight space");
      }
      rb.isometry.col(col++) = v;
      rb.states.push_back({QuantumNumber::ratio(twoW_int, 2), w, y});
    }
  }
  if (col != d) throw ConsistencyError("reduced_basis: column count differs from the irrep dimension");
  return rb;
}

/// B†OB.
inline CMatrix project_operator(const CMatrix& op, const ReducedBasis& basis) {
  if (op.rows() != basis.isometry.rows() || op.cols() != basis.isometry.rows()) {
    throw InvalidInput("project_operator: dimension mismatch");
  }
  return basis.isometry.adjoint() * op * basis.isometry;
}

inline Generators project_generators(const Generators& g, const ReducedBasis& basis) {
  return {project_operator(g.Wz, basis), project_operator(g.Y, basis),  project_operator(g.Wp, basis),
          project_operator(g.Wm, basis), project_operator(g.Up, basis), project_operator(g.Um, basis),
          project_operator(g.Vp, basis), project_operator(g.Vm, basis)};
}

/**
 * Reorders the columns of a reduced basis into the algebraic basis order and
 * rephases them so that the projected raising and lowering operators carry the
 * same non-negative matrix elements as irrep_matrices. Phases are fixed along a
 * spanning tree of nonzero ladder elements.
 */
inline ReducedBasis align_to_algebraic(const ReducedBasis& rb, const IrrepOperators& ops) {
  if (rb.label != ops.label) throw InvalidInput("align_to_algebraic: label mismatch");
  const Eigen::Index d = ops.dim();
  ReducedBasis out = rb;
  out.states = ops.basis;
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto it = std::find(rb.states.begin(), rb.states.end(), ops.basis[static_cast<std::size_t>(i)]);
    if (it == rb.states.end()) throw ConsistencyError("align_to_algebraic: state missing from reduced basis");
    out.isometry.col(i) = rb.isometry.col(static_cast<Eigen::Index>(it - rb.states.begin()));
  }
  const Generators proj = project_generators(collective_generators(rb.n()), out);
  const std::array<const CMatrix*, 4> alg{&ops.gen.Wp, &ops.gen.Vp, &ops.gen.Wm, &ops.gen.Vm};
  const std::array<const CMatrix*, 4> prj{&proj.Wp, &proj.Vp, &proj.Wm, &proj.Vm};
  std::vector<cplx> phase(static_cast<std::size_t>(d), 0.0);
  std::vector<Eigen::Index> queue{0};
  phase[0] = 1.0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Eigen::Index j = queue[head];
    for (std::size_t o = 0; o < alg.size(); ++o)
      for (Eigen::Index i = 0; i < d; ++i) {
        if (phase[static_cast<std::size_t>(i)] != cplx(0.0) || std::abs((*alg[o])(i, j)) < 1e-12) continue;
        const cplx c = (*prj[o])(i, j) * phase[static_cast<std::size_t>(j)];
        if (std::abs(c) < 1e-12) throw ConsistencyError("align_to_algebraic: ladder element vanishes in reduced basis");
        phase[static_cast<std::size_t>(i)] = c / std::abs(c);
        queue.push_back(i);
      }
  }
  if (static_cast<Eigen::Index>(queue.size()) != d) throw ConsistencyError("align_to_algebraic: ladder graph not connected");
  for (Eigen::Index i = 0; i < d; ++i) out.isometry.col(i) *= phase[static_cast<std::size_t>(i)];
  return out;
}

/**
 * All m_λ mutually orthogonal isometries B_s carrying identical copies of λ,
 * with B_1 the reduced basis. Candidates P(σ)B_1 are orthogonalized with the
 * scalar overlaps tr(B_s† X)/d_λ.
 */
inline std::vector<CMatrix> multiplicity_copies(const ReducedBasis& basis) {
  const int n = basis.n();
  detail::check_dense_n(n, "multiplicity_copies");
  const std::uint64_t m = multiplicity(basis.label, n);
  const double d = static_cast<double>(basis.dim());
  std::vector<CMatrix> copies{basis.isometry};
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  const auto rows = basis.isometry.rows();
  while (copies.size() < m && std::next_permutation(perm.begin(), perm.end())) {
    CMatrix x(rows, basis.dim());
    for (Eigen::Index i = 0; i < rows; ++i)
      x.row(static_cast<Eigen::Index>(detail::permuted_index(static_cast<std::size_t>(i), perm))) =
          basis.isometry.row(i);
    for (const auto& b : copies) x -= b * ((b.adjoint() * x).trace() / d);
    const double kappa = (x.adjoint() * x).trace().real() / d;
    if (kappa > 1e-8) copies.push_back(x / std::sqrt(kappa));
  }
  if (copies.size() != m) throw ConsistencyError("multiplicity_copies: found fewer copies than m_λ");
  return copies;
}

}  // namespace su3engine
