/**
 * @file test_oracle.cpp
 * @brief Full 3^n-space reference model, Schur decomposition of its states and block equivalence.
 */
#include <random>

#include <gtest/gtest.h>

#include "experiment.hpp"
#include "test_support.hpp"

using namespace su3engine;
using namespace su3test;

namespace {

EngineParams oracle_params(Model m) {
  EngineParams p;
  p.model = m;
  p.beta_c = 1.3;
  p.beta_h = 0.35;
  p.g_u = 0.12;
  p.g_v = 0.2;
  p.g_w = 0.25;
  p.alpha = 0.05;
  p.beta0 = 0.8;
  return p;
}

CMatrix act(const FullSpaceModel& m, const CMatrix& rho) { return unvec(m.L.matrix * vec(rho), m.L.dim); }

CMatrix random_density(Eigen::Index d, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx(nd(rng), nd(rng));
  CMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

double trace_distance(const CMatrix& a, const CMatrix& b) { return cli::trace_distance(a, b); }

}  // namespace

TEST(FullModel, SingleParticleMatchesFundamentalIrrep) {
  for (Model model : {Model::TwoBath, Model::DissipativeLoad, Model::Driven}) {
    const auto p = oracle_params(model);
    const auto m = make_full_model(1, p);
    const auto fs = full_steady_state(m, thermal_product_state(1, p.beta0, p));
    const SchurDecomposer dec(1);
    const auto d = decompose_full_state(fs.rho, dec);
    ASSERT_EQ(d.blocks.entries.size(), 1u);
    EXPECT_NEAR(d.blocks.entries[0].weight, 1.0, 1e-12);
    const auto ops = irrep_matrices({1, 0}, p.omega_c, p.omega_h);
    EXPECT_LT(trace_distance(d.blocks.entries[0].rho, steady_state(build_liouvillian(ops, p))), 1e-9) << to_string(model);
  }
}

TEST(FullModel, ThreeParticleBlocksMatchIrrepSteadyStates) {
  const SchurDecomposer dec(3);
  for (Model model : {Model::TwoBath, Model::DissipativeLoad, Model::Driven}) {
    const auto p = oracle_params(model);
    const auto m = make_full_model(3, p);
    const auto fs = full_steady_state(m, thermal_product_state(3, p.beta0, p));
    EXPECT_LT(fs.residual, 1e-10);
    const auto d = decompose_full_state(fs.rho, dec);
    const auto thermal = thermal_block_state(3, p.beta0, p);
    for (std::size_t i = 0; i < d.blocks.entries.size(); ++i) {
      const auto& e = d.blocks.entries[i];
      EXPECT_NEAR(e.weight, thermal.entries[i].weight, 1e-9);
      if (e.label.dimension() == 1) continue;
      const auto ops = irrep_matrices(e.label, p.omega_c, p.omega_h);
      EXPECT_LT(trace_distance(e.rho, steady_state(build_liouvillian(ops, p))), 1e-6)
          << to_string(model) << " " << e.label.to_string();
    }
  }
}

TEST(FullModel, SteadyStateIsPermutationInvariant) {
  const auto p = oracle_params(Model::Driven);
  const auto m = make_full_model(3, p);
  const auto fs = full_steady_state(m, thermal_product_state(3, p.beta0, p));
  for (const auto& perm : std::vector<std::vector<int>>{{1, 0, 2}, {0, 2, 1}, {2, 0, 1}}) {
    const CMatrix P = permutation_operator(perm);
    EXPECT_LT(max_abs(P * fs.rho * P.adjoint() - fs.rho), 1e-9);
  }
}

TEST(FullModel, LiouvillianCommutesWithTranspositions) {
  for (Model model : {Model::TwoBath, Model::DissipativeLoad, Model::Driven}) {
    const auto m = make_full_model(3, oracle_params(model));
    const CMatrix rho = random_density(27, 11);
    const CMatrix P = permutation_operator({1, 0, 2});
    EXPECT_LT(max_abs(act(m, P * rho * P.adjoint()) - P * act(m, rho) * P.adjoint()), 1e-12) << to_string(model);
  }
}

TEST(FullModel, WeightPhaseSymmetryOnlyWithoutDrive) {
  const double theta = 0.73, phi = -1.21;
  for (Model model : {Model::TwoBath, Model::DissipativeLoad, Model::Driven}) {
    const auto m = make_full_model(2, oracle_params(model));
    CVector phase(m.L.dim);
    for (Eigen::Index i = 0; i < m.L.dim; ++i)
      phase(i) = std::exp(cplx(0.0, theta * m.gen.Wz(i, i).real() + phi * m.gen.Y(i, i).real()));
    const CMatrix U = phase.asDiagonal();
    const CMatrix rho = random_density(m.L.dim, 5);
    const double defect = max_abs(act(m, U * rho * U.adjoint()) - U * act(m, rho) * U.adjoint());
    if (model == Model::Driven)
      EXPECT_GT(defect, 1e-3);
    else
      EXPECT_LT(defect, 1e-12) << to_string(model);
  }
}

TEST(Decomposition, GroundStateIsFullySymmetric) {
  const auto p = oracle_params(Model::TwoBath);
  for (int n = 2; n <= 4; ++n) {
    const SchurDecomposer dec(n);
    const auto d = decompose_full_state(thermal_product_state(n, 200.0, p), dec);
    for (const auto& e : d.blocks.entries) EXPECT_NEAR(e.weight, (e.label == IrrepLabel{n, 0}) ? 1.0 : 0.0, 1e-12);
  }
}

TEST(Decomposition, MaximallyMixedGivesDimensionCounts) {
  for (int n = 2; n <= 4; ++n) {
    const SchurDecomposer dec(n);
    const auto dim = static_cast<Eigen::Index>(detail::pow3(n));
    const auto d = decompose_full_state(CMatrix::Identity(dim, dim) / static_cast<double>(dim), dec);
    for (const auto& e : d.blocks.entries)
      EXPECT_NEAR(e.weight, multiplicity(e.label, n) * static_cast<double>(e.label.dimension()) / dim, 1e-12);
  }
}

TEST(Decomposition, ThreeParticleSingletIsTrivialIrrep) {
  CVector psi = CVector::Zero(27);
  for (const auto& perm : std::vector<std::vector<int>>{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}}) {
    const int sign = (perm == std::vector<int>{1, 0, 2} || perm == std::vector<int>{0, 2, 1} || perm == std::vector<int>{2, 1, 0}) ? -1 : 1;
    psi(perm[0] * 9 + perm[1] * 3 + perm[2]) = sign / std::sqrt(6.0);
  }
  const SchurDecomposer dec(3);
  const auto d = decompose_full_state(psi * psi.adjoint(), dec);
  for (const auto& e : d.blocks.entries) EXPECT_NEAR(e.weight, (e.label == IrrepLabel{0, 0}) ? 1.0 : 0.0, 1e-12);
}

TEST(Decomposition, BlockWeightsOfThermalProductState) {
  const auto p = oracle_params(Model::Driven);
  const SchurDecomposer dec(4);
  const auto d = decompose_full_state(thermal_product_state(4, p.beta0, p), dec);
  const auto t = thermal_block_state(4, p.beta0, p);
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    EXPECT_NEAR(d.blocks.entries[i].weight, t.entries[i].weight, 1e-12);
    EXPECT_LT(max_abs(d.blocks.entries[i].rho - t.entries[i].rho), 1e-12);
  }
}

TEST(Independent, ProductOfSingleParticleSteadyStates) {
  const auto p = oracle_params(Model::DissipativeLoad);
  const auto m1 = make_full_model(1, p, Coupling::Independent);
  const auto m2 = make_full_model(2, p, Coupling::Independent);
  const auto s1 = full_steady_state(m1, thermal_product_state(1, p.beta0, p));
  const auto s2 = full_steady_state(m2, thermal_product_state(2, p.beta0, p));
  EXPECT_LT(max_abs(s2.rho - CMatrix(Eigen::kroneckerProduct(s1.rho, s1.rho))), 1e-9);
  const auto r1 = full_observables(s1.rho, m1);
  const auto r2 = full_observables(s2.rho, m2);
  EXPECT_NEAR(r2.heat_hot, 2.0 * r1.heat_hot, 1e-10);
  EXPECT_NEAR(r2.power, 2.0 * r1.power, 1e-10);
  EXPECT_LT(std::abs(r2.first_law_residual), 1e-10);

  const auto mc = make_full_model(2, p, Coupling::Collective);
  const auto sc = full_steady_state(mc, thermal_product_state(2, p.beta0, p));
  EXPECT_GT(std::abs(full_observables(sc.rho, mc).power - r2.power), 1e-4);
}

TEST(Observables, FullSpaceAggregateEqualsWeightedBlocks) {
  const auto p = oracle_params(Model::DissipativeLoad);
  const auto m = make_full_model(3, p);
  const auto fs = full_steady_state(m, thermal_product_state(3, p.beta0, p));
  const auto full = full_observables(fs.rho, m);
  std::vector<ThermoReport> reports;
  std::vector<double> weights;
  for (const auto& e : thermal_block_state(3, p.beta0, p).entries) {
    const auto ops = irrep_matrices(e.label, p.omega_c, p.omega_h);
    const auto L = build_liouvillian(ops, p);
    if (e.label.dimension() == 1) {
      reports.push_back(thermo_report(CMatrix::Identity(1, 1), ops.gen, ops.H, p, L));
    } else {
      reports.push_back(thermo_report(steady_state(L), ops.gen, ops.H, p, L));
    }
    weights.push_back(e.weight);
  }
  const auto agg = aggregate(reports, weights);
  EXPECT_NEAR(full.heat_hot, agg.heat_hot, 1e-9);
  EXPECT_NEAR(full.heat_cold, agg.heat_cold, 1e-9);
  EXPECT_NEAR(full.power, agg.power, 1e-9);
  EXPECT_NEAR(full.energy, agg.energy, 1e-9);
}

TEST(Validation, TwoParticleSuitePasses) {
  const auto report = cli::run_validation(2, 1, std::nullopt);
  for (const auto& c : report.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.value;
  EXPECT_GT(report.checks.size(), 30u);
}

TEST(Validation, RateDegenerateConfigRejected) {
  EngineParams p = oracle_params(Model::TwoBath);
  p.g_v = 0.0;
  EXPECT_THROW(cli::run_validation(2, 1, p), cli::ConfigError);
  EXPECT_THROW(make_full_model(5, p), InvalidInput);
}
