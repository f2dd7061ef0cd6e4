/**
 * @file test_su3_algebra.cpp
 * @brief Weight bases, ladder coefficients and generator matrices of SU(3) irreps.
 */
#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace su3engine;
using namespace su3test;

namespace {

std::vector<IrrepLabel> small_labels(int max_pq) {
  std::vector<IrrepLabel> out;
  for (int p = 0; p <= max_pq; ++p)
    for (int q = 0; q <= max_pq; ++q) out.push_back({p, q});
  return out;
}

}  // namespace

TEST(QuantumNumber, ExactSixthsArithmetic) {
  const auto a = QuantumNumber::ratio(1, 3);
  const auto b = QuantumNumber::ratio(1, 2);
  EXPECT_EQ((a + b).sixths(), 5);
  EXPECT_EQ((a - b).to_string(), "-1/6");
  EXPECT_EQ(QuantumNumber::ratio(4, 2).to_string(), "2");
  EXPECT_DOUBLE_EQ(QuantumNumber::ratio(-2, 3).value(), -2.0 / 3.0);
  EXPECT_THROW(QuantumNumber::ratio(1, 4), InvalidInput);
}

TEST(IrrepLabel, OccurrenceAndDimension) {
  EXPECT_TRUE((IrrepLabel{4, 0}.occurs_for(4)));
  EXPECT_TRUE((IrrepLabel{1, 0}.occurs_for(4)));
  EXPECT_FALSE((IrrepLabel{3, 0}.occurs_for(4)));
  EXPECT_FALSE((IrrepLabel{0, 3}.occurs_for(4)));
  EXPECT_EQ((IrrepLabel{1, 1}.dimension()), 8u);
  EXPECT_EQ((IrrepLabel{0, 0}.dimension()), 1u);
}

TEST(Basis, SizeMatchesGelfandTsetlinCount) {
  for (const auto& l : small_labels(6)) {
    const std::array<int, 3> rows{l.p + l.q, l.q, 0};
    EXPECT_EQ(static_cast<long long>(enumerate_basis(l).size()), count_gt_patterns(rows)) << l.to_string();
  }
}

TEST(Basis, ContainsHighestWeightAndIsSorted) {
  for (const auto& l : small_labels(4)) {
    const auto basis = enumerate_basis(l);
    const auto [w, y] = highest_weight(l);
    bool found = false;
    for (const auto& s : basis) found = found || (s.w == w && s.y == y);
    EXPECT_TRUE(found) << l.to_string();
    EXPECT_TRUE(std::is_sorted(basis.begin(), basis.end(), basis_order));
  }
}

TEST(Basis, WeightDiagramOfTwoOneHasDoublyDegenerateCentre) {
  const auto basis = enumerate_basis({2, 1});
  ASSERT_EQ(basis.size(), 15u);
  std::map<std::pair<int, int>, int> count;
  for (const auto& s : basis) ++count[{s.w.sixths(), s.y.sixths()}];
  int doubled = 0;
  for (const auto& [k, c] : count) doubled += c == 2;
  EXPECT_EQ(doubled, 3);
  EXPECT_EQ(count.size(), 12u);
}

TEST(Ladder, CoefficientsRealAndNonNegative) {
  for (const auto& l : small_labels(5))
    for (const auto& s : enumerate_basis(l)) {
      const auto c = ladder_coefficients(l, s);
      EXPECT_GE(c.A, 0.0);
      EXPECT_GE(c.B, 0.0);
      EXPECT_TRUE(std::isfinite(c.A) && std::isfinite(c.B));
    }
}

TEST(Ladder, RejectsInconsistentState) {
  const WeightState bad{QuantumNumber::ratio(1, 2), QuantumNumber::ratio(3, 2), QuantumNumber::ratio(1, 3)};
  EXPECT_THROW(ladder_coefficients({1, 0}, bad), InvalidInput);
}

TEST(Generators, ListedCommutatorsHold) {
  for (const auto& l : small_labels(5)) {
    const auto ops = irrep_matrices(l, 2.0 / 3.0, 5.0 / 3.0);
    for (const auto& rel : listed_commutators())
      EXPECT_LT(max_abs(rel.lhs(ops.gen) - rel.rhs(ops.gen)), 1e-10) << l.to_string() << " " << rel.name;
  }
}

TEST(Generators, AllCommutatorsMatchDefiningRepresentation) {
  const auto def = single_particle_generators(2.0 / 3.0, 5.0 / 3.0).gen;
  for (const auto& l : small_labels(4)) {
    const auto ops = irrep_matrices(l, 2.0 / 3.0, 5.0 / 3.0);
    EXPECT_LT(structure_constant_defect(ops.gen, def), 1e-10) << l.to_string();
  }
}

TEST(Generators, CasimirIsScalar) {
  for (const auto& l : small_labels(5)) {
    const auto ops = irrep_matrices(l, 1.0, 2.0);
    const CMatrix c = quadratic_casimir(ops.gen);
    const CMatrix expected = casimir_eigenvalue(l) * CMatrix::Identity(ops.dim(), ops.dim());
    EXPECT_LT(max_abs(c - expected), 1e-10) << l.to_string();
  }
}

TEST(Generators, DiagonalsAndAdjointsAreConsistent) {
  for (const auto& l : small_labels(4)) {
    const auto ops = irrep_matrices(l, 2.0 / 3.0, 5.0 / 3.0);
    const auto& g = ops.gen;
    EXPECT_LT(max_abs(g.Wm - g.Wp.adjoint()), 1e-14);
    EXPECT_LT(max_abs(g.Um - g.Up.adjoint()), 1e-14);
    EXPECT_LT(max_abs(g.Vm - g.Vp.adjoint()), 1e-14);
    const CMatrix w2 = isospin_squared(g);
    for (Eigen::Index i = 0; i < ops.dim(); ++i) {
      const auto& s = ops.basis[static_cast<std::size_t>(i)];
      EXPECT_NEAR(g.Wz(i, i).real(), s.w.value(), 1e-14);
      EXPECT_NEAR(g.Y(i, i).real(), s.y.value(), 1e-14);
      EXPECT_NEAR(w2(i, i).real(), s.W.value() * (s.W.value() + 1.0), 1e-10);
    }
    EXPECT_LT(max_abs(w2 - CMatrix(w2.diagonal().asDiagonal())), 1e-10);
  }
}

TEST(Generators, FundamentalMatchesSingleParticle) {
  const auto ops = irrep_matrices({1, 0}, 2.0 / 3.0, 5.0 / 3.0);
  const auto sp = single_particle_generators(2.0 / 3.0, 5.0 / 3.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> a(ops.H), b(sp.h);
  const RVector shift = RVector::Constant(3, b.eigenvalues()(0) - a.eigenvalues()(0));
  EXPECT_LT((a.eigenvalues() + shift - b.eigenvalues()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(structure_constant_defect(ops.gen, sp.gen), 1e-12);
}

TEST(Generators, HamiltonianIsDiagonalWithWeightEnergies) {
  const auto ops = irrep_matrices({2, 1}, 2.0 / 3.0, 5.0 / 3.0);
  const auto rows = weight_diagram({2, 1}, 2.0 / 3.0, 5.0 / 3.0);
  ASSERT_EQ(static_cast<Eigen::Index>(rows.size()), ops.dim());
  EXPECT_LT(max_abs(ops.H - CMatrix(ops.H.diagonal().asDiagonal())), 1e-14);
  for (Eigen::Index i = 0; i < ops.dim(); ++i) {
    const auto& s = rows[static_cast<std::size_t>(i)].state;
    EXPECT_NEAR(rows[static_cast<std::size_t>(i)].energy, ops.H(i, i).real(), 1e-14);
    EXPECT_NEAR(rows[static_cast<std::size_t>(i)].energy, s.w.value() - 3.5 * s.y.value() / 3.0, 1e-14);
  }
}

TEST(Generators, TrivialIrrepIsZero) {
  const auto ops = irrep_matrices({0, 0}, 1.0, 2.0);
  ASSERT_EQ(ops.dim(), 1);
  for (const CMatrix* m : generator_list(ops.gen)) EXPECT_EQ(max_abs(*m), 0.0);
}
