#include <random>

#include <gtest/gtest.h>

#include "arealaw/errors.hpp"
#include "arealaw/spectra.hpp"
#include "oracles.hpp"

using namespace arealaw;

namespace {

ModelSpec tfi(double g) {
  ModelSpec m;
  m.g = g;
  return m;
}

ModelSpec counting() {
  ModelSpec m;
  m.kind = ModelKind::diagonal_counting;
  return m;
}

}  // namespace

TEST(Diagonalize, DiagonalInput) {
  Matrix d = Matrix::Zero(4, 4);
  d(0, 0) = 1;
  d(1, 1) = 1;
  const auto s = diagonalize(d);
  EXPECT_NEAR(s.values(0), 0, 1e-15);
  EXPECT_NEAR(s.values(1), 0, 1e-15);
  EXPECT_NEAR(s.values(2), 1, 1e-15);
  EXPECT_NEAR(s.values(3), 1, 1e-15);
  EXPECT_EQ(s.completeness, Completeness::full);
}

TEST(Diagonalize, NonHermitianRejected) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = 1.0;
  EXPECT_THROW(diagonalize(a), DomainError);
}

TEST(Diagonalize, MatchesEigenSolverOracle) {
  std::mt19937_64 rng(2);
  const Matrix h = oracle::random_hermitian(24, rng);
  const auto s = diagonalize(h);
  const auto o = oracle::eig(h);
  for (Index i = 0; i < 24; ++i) EXPECT_NEAR(s.values(i), o.values(i), 1e-10);
  const auto r = spectral_residuals(h, s);
  EXPECT_LE(r.residual, 1e-10);
  EXPECT_LE(r.orthonormality, 1e-12);
}

TEST(Diagonalize, LowestKAgreesWithFullOnTenSites) {
  const Lattice lat = Lattice::chain(10);
  const auto h = build_model(lat, tfi(1.5));
  const Region all = Region::all(lat);
  const auto full = diagonalize(assemble(h.terms(), all.sites(), 2));
  const auto low = diagonalize_lowest(assemble_sparse(h.terms(), all.sites(), 2), 4);
  EXPECT_EQ(low.completeness, Completeness::lowest_k);
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(low.values(i), full.values(i), 1e-8);
}

TEST(GroundState, KrylovPathMatchesDense) {
  const Lattice lat = Lattice::chain(10);
  const auto h = psd_normalize(build_model(lat, tfi(2.0)));
  const auto gs = ground_state(h);
  const auto o = oracle::eig(oracle::tfi(10, 2.0));
  EXPECT_NEAR(gs.energy - h.total_shift(), o.values(0), 1e-8);
  EXPECT_NEAR(gs.gap, o.values(1) - o.values(0), 1e-8);
  EXPECT_NEAR(std::norm(gs.state.dot(o.vectors.col(0))), 1.0, 1e-8);
}

TEST(Frustration, WholeLatticeExpectationEqualsE0) {
  const Lattice lat = Lattice::chain(8);
  const auto h = psd_normalize(build_model(lat, tfi(1.2)));
  const auto gs = ground_state(h);
  const auto r = frustration_check(h, Region::all(lat), gs.state);
  EXPECT_NEAR(r.expectation, r.e0, 1e-9);
  EXPECT_NEAR(r.e0, gs.energy, 1e-9);
  EXPECT_EQ(r.window, 0.0);
  EXPECT_TRUE(r.pass);
}

TEST(Frustration, TenSiteChainPrefixHolds) {
  const Lattice lat = Lattice::chain(10);
  const auto h = psd_normalize(build_model(lat, tfi(1.05)));
  const auto gs = ground_state(h);
  const Region X = Region::interval(lat, 0, 3);
  const auto r = frustration_check(h, X, gs.state);
  // independent: H_X from Kronecker products, shifted the same way
  const auto inside = terms_inside(h, X);
  double shift = 0.0;
  const auto raw = build_model(lat, tfi(1.05));
  for (const auto& t : raw.terms()) {
    bool in = true;
    for (Site y : t.support) in = in && X.contains(y);
    if (in) shift -= min_eigenvalue(t.op);
  }
  // the field on site 3 sits in the term anchored at 3, which crosses into site 4
  const Matrix hx = oracle::tfi(4, 1.05) + 1.05 * oracle::chain_product(4, {{3, oracle::X()}});
  const double e0 = oracle::eig(hx).values(0) + shift;
  EXPECT_NEAR(r.e0, e0, 1e-9);
  EXPECT_TRUE(r.pass);
  EXPECT_GE(r.slack_low, -1e-9);
  EXPECT_GE(r.slack_high, -1e-9);
}

TEST(Frustration, RandomRegionsOnPsdModels) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Lattice lat = Lattice::chain(8);
    ModelSpec m;
    m.kind = ModelKind::random_two_local;
    m.seed = seed;
    const auto h = psd_normalize(build_model(lat, m));
    const auto gs = ground_state(h);
    for (int lo = 0; lo < 6; ++lo)
      for (int hi = lo + 1; hi < 8; ++hi) EXPECT_TRUE(frustration_check(h, Region::interval(lat, lo, hi), gs.state).pass);
  }
}

TEST(Frustration, NonPsdInputIsPreconditionError) {
  const Lattice lat = Lattice::chain(4);
  const auto h = build_model(lat, tfi(1.0));
  const auto gs = ground_state(h);
  EXPECT_THROW(frustration_check(h, Region::interval(lat, 0, 1), gs.state), PreconditionError);
}

TEST(DosCount, DiagonalCountingThreeSites) {
  const Lattice lat = Lattice::chain(3);
  const auto h = build_model(lat, counting());
  const auto s = region_spectrum(h, Region::all(lat));
  EXPECT_EQ(dos_count(s, 1.0).value(), 3);
  EXPECT_FALSE(dos_count(s, -0.5).has_value());
  EXPECT_EQ(dos_count(s, 3.0).value(), 7);
}

TEST(DosCount, MonotoneAndTopIsDimensionMinusOne) {
  const Lattice lat = Lattice::chain(6);
  const auto s = region_spectrum(build_model(lat, tfi(0.7)), Region::all(lat));
  Index prev = -1;
  for (double e = s.values(0) - 1.0; e <= s.values(s.size() - 1) + 1.0; e += 0.05) {
    const Index n = dos_count(s, e).value_or(-1);
    EXPECT_GE(n, prev);
    prev = n;
  }
  EXPECT_EQ(dos_count(s, s.values(s.size() - 1)).value(), s.size() - 1);
}

TEST(DosCount, BinomialCountsAndVolumeBound) {
  for (int n = 3; n <= 8; ++n) {
    const Lattice lat = Lattice::chain(n);
    const auto s = region_spectrum(build_model(lat, counting()), Region::all(lat));
    double cumulative = 0.0;
    for (int e = 0; e <= n; ++e) {
      cumulative += oracle::binomial(n, e);
      EXPECT_EQ(static_cast<double>(dos_count(s, e).value()), cumulative - 1.0);
      if (e >= 1) EXPECT_LE(oracle::binomial(n, e), std::pow(n, e));
    }
  }
}

TEST(DosCount, LowestKCoverageError) {
  const Lattice lat = Lattice::chain(8);
  const auto h = build_model(lat, tfi(1.0));
  const auto low = diagonalize_lowest(assemble_sparse(h.terms(), Region::all(lat).sites(), 2), 3);
  EXPECT_THROW(dos_count(low, low.values(2) + 1.0), CoverageError);
  EXPECT_EQ(dos_count(low, low.values(0)).value(), 0);
}

TEST(DosFit, CountingModelFamilyFindsConstants) {
  const Lattice lat = Lattice::chain(8);
  const auto h = psd_normalize(build_model(lat, counting()));
  std::vector<Region> regions;
  for (int n = 3; n <= 8; ++n) regions.push_back(Region::interval(lat, 0, n - 1));
  const auto fit = fit_assumption2(h, regions);
  ASSERT_TRUE(fit.found);
  for (const auto& r : fit.regions) {
    if (r.omega == 0) continue;
    EXPECT_LE(std::log(static_cast<double>(r.omega)),
              dos_log_bound(fit, r.X.size(), r.e - r.e0, r.boundary) + 1e-9);
  }
  EXPECT_GE(fit.worst_slack, -1e-9);
}

TEST(DosFit, GappedIsingChains) {
  const Lattice lat = Lattice::chain(8);
  const auto h = psd_normalize(build_model(lat, tfi(2.0)));
  const auto fit = fit_assumption2(h, {Region::interval(lat, 0, 3), Region::interval(lat, 0, 5),
                                       Region::interval(lat, 0, 7)});
  ASSERT_TRUE(fit.found);
  EXPECT_GE(fit.gamma, 0.0);
  EXPECT_GE(fit.eta, 0.0);
  EXPECT_GE(fit.worst_slack, -1e-9);
}

TEST(Superposition, GroundAmplitudeOnly) {
  const Lattice lat = Lattice::chain(6);
  const auto s = region_spectrum(build_model(lat, tfi(2.0)), Region::all(lat));
  const auto phi = low_energy_superposition(s, {1.0}, s.values(0));
  EXPECT_NEAR((phi.state - s.vectors.col(0)).norm(), 0.0, 1e-14);
  EXPECT_EQ(phi.excitation(), 0.0);
}

TEST(Superposition, EqualPairAndCeiling) {
  const Lattice lat = Lattice::chain(6);
  const auto s = region_spectrum(build_model(lat, tfi(2.0)), Region::all(lat));
  const auto phi = low_energy_superposition(s, {1.0, 1.0}, s.values(1));
  EXPECT_NEAR(phi.state.norm(), 1.0, 1e-12);
  EXPECT_LE(phi.energy, s.values(1) + 1e-12);
  EXPECT_THROW(low_energy_superposition(s, {1.0, 1.0, 1.0}, s.values(1) - 1e-3), DomainError);
}

TEST(Superposition, RandomLowestFourOnTenSites) {
  const Lattice lat = Lattice::chain(10);
  const auto s = region_spectrum(build_model(lat, tfi(2.0)), Region::all(lat));
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  std::vector<cplx> amp(4);
  for (auto& a : amp) a = cplx(g(rng), g(rng));
  const auto phi = low_energy_superposition(s, amp, s.values(3));
  EXPECT_NEAR(phi.state.norm(), 1.0, 1e-12);
  const double energy = phi.state.dot(assemble(build_model(lat, tfi(2.0)).terms(), Region::all(lat).sites(), 2) * phi.state).real();
  EXPECT_NEAR(energy, phi.energy, 1e-9);
  EXPECT_LE(phi.energy, s.values(3) + 1e-12);
}

TEST(SingleMode, ZOnIsingGroundState) {
  const Lattice lat = Lattice::chain(8, Boundary::periodic);
  const auto h = build_model(lat, tfi(3.0));
  const auto gs = ground_state(h);
  const Vector a = single_mode_state(lat, gs.state, pauli_z(), {0.0});
  EXPECT_NEAR(a.norm(), 1.0, 1e-12);
  const Vector b = single_mode_state(lat, gs.state, pauli_z(), {0.7});
  const Vector c = single_mode_state(lat, gs.state, pauli_z(), {0.7 + 2 * M_PI});
  EXPECT_NEAR((b - c).norm(), 0.0, 1e-10);
}

TEST(SingleMode, IdentityViolatesZeroMean) {
  const Lattice lat = Lattice::chain(6, Boundary::periodic);
  const auto gs = ground_state(build_model(lat, tfi(3.0)));
  EXPECT_THROW(single_mode_state(lat, gs.state, Matrix::Identity(2, 2), {0.0}), PreconditionError);
}
