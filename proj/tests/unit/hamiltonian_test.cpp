#include <gtest/gtest.h>

#include "arealaw/errors.hpp"
#include "arealaw/hamiltonian.hpp"
#include "arealaw/spectra.hpp"
#include "oracles.hpp"

using namespace arealaw;

namespace {

ModelSpec tfi(double g) {
  ModelSpec m;
  m.kind = ModelKind::transverse_ising;
  m.g = g;
  return m;
}

Matrix full(const LocalHamiltonian& h) {
  std::vector<Site> all(static_cast<std::size_t>(h.lattice().num_sites()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Site>(i);
  return assemble(h.terms(), all, h.lattice().q());
}

}  // namespace

TEST(BuildModel, TfiMatchesKroneckerOracle) {
  const Lattice lat = Lattice::chain(6);
  const Matrix h = full(build_model(lat, tfi(1.3)));
  EXPECT_LE((h - oracle::tfi(6, 1.3)).norm(), 1e-12);
}

TEST(BuildModel, DiagonalCountingSpectrumOnThreeSites) {
  const Lattice lat = Lattice::chain(3);
  ModelSpec m;
  m.kind = ModelKind::diagonal_counting;
  const auto ev = eigvalsh(full(build_model(lat, m)));
  const std::vector<double> expected{0, 1, 1, 1, 2, 2, 2, 3};
  ASSERT_EQ(ev.size(), 8);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(ev(i), expected[static_cast<std::size_t>(i)], 1e-12);
}

TEST(BuildModel, TfiZeroFieldTwoSitesPsdGroundEnergyZero) {
  const Lattice lat = Lattice::chain(2);
  const auto h = psd_normalize(build_model(lat, tfi(0.0)));
  const auto ev = eigvalsh(full(h));
  EXPECT_NEAR(ev(0), 0.0, 1e-12);
  EXPECT_NEAR(ev(1), 0.0, 1e-12);
  EXPECT_NEAR(ev(2), 2.0, 1e-12);
}

TEST(BuildModel, RandomTwoLocalDeterministicPerSeed) {
  const Lattice lat = Lattice::chain(4);
  ModelSpec m;
  m.kind = ModelKind::random_two_local;
  m.seed = 99;
  const Matrix a = full(build_model(lat, m));
  const Matrix b = full(build_model(lat, m));
  EXPECT_EQ((a - b).norm(), 0.0);
  m.seed = 100;
  EXPECT_GT((a - full(build_model(lat, m))).norm(), 1e-3);
  EXPECT_TRUE(is_hermitian(a));
}

TEST(BuildModel, SpinModelsNeedQubits) {
  const Lattice lat = Lattice::chain(3, Boundary::open, 3);
  EXPECT_THROW(build_model(lat, tfi(1.0)), DomainError);
  ModelSpec m;
  m.kind = ModelKind::diagonal_counting;
  EXPECT_NO_THROW(build_model(lat, m));
}

TEST(BuildModel, JIsTheLargestTermNorm) {
  const Lattice lat = Lattice::chain(5);
  const auto h = build_model(lat, tfi(2.0));
  double j = 0.0;
  for (const auto& t : h.terms()) j = std::max(j, oracle::opnorm(t.op));
  EXPECT_NEAR(h.J(), j, 1e-12);
  EXPECT_NEAR(h.lr_velocity(), 10.0 * j, 1e-12);
}

TEST(PsdNormalize, AlreadyPsdTermUnchanged) {
  const Lattice lat = Lattice::chain(1);
  ModelSpec m;
  m.kind = ModelKind::diagonal_counting;
  const auto h = build_model(lat, m);
  const auto p = psd_normalize(h);
  EXPECT_LE((h.terms()[0].op - p.terms()[0].op).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(p.total_shift(), 0.0);
}

TEST(PsdNormalize, MinusZZShiftedByOne) {
  const Lattice lat = Lattice::chain(2);
  const auto h = psd_normalize(from_pieces(lat, {{{0, 1}, -kron(pauli_z(), pauli_z())}}));
  const auto ev = eigvalsh(h.terms()[0].op);
  EXPECT_NEAR(ev(0), 0.0, 1e-12);
  EXPECT_NEAR(ev(1), 0.0, 1e-12);
  EXPECT_NEAR(ev(2), 2.0, 1e-12);
  EXPECT_NEAR(ev(3), 2.0, 1e-12);
  EXPECT_NEAR(h.total_shift(), 1.0, 1e-12);
}

TEST(PsdNormalize, SpectrumShiftsUniformly) {
  const Lattice lat = Lattice::chain(4);
  ModelSpec m;
  m.kind = ModelKind::heisenberg;
  m.h = 0.3;
  const auto h = build_model(lat, m);
  const auto p = psd_normalize(h);
  const auto a = oracle::eig(full(h)).values;
  const auto b = oracle::eig(full(p)).values;
  for (Index i = 0; i < a.size(); ++i) EXPECT_NEAR(b(i) - a(i), p.total_shift(), 1e-10);
  for (const auto& t : p.terms()) EXPECT_GE(min_eigenvalue(t.op), -1e-10);
}

TEST(Partition, WholeLatticeHasNoCrossingTerms) {
  const Lattice lat = Lattice::chain(6);
  const auto h = build_model(lat, tfi(1.0));
  const auto p = partition(h, Region::all(lat));
  EXPECT_EQ(p.inside.size(), h.terms().size());
  EXPECT_TRUE(p.crossing.empty());
  EXPECT_TRUE(p.outside.empty());
}

TEST(Partition, EmptyRegionPutsEverythingOutside) {
  const Lattice lat = Lattice::chain(6);
  const auto h = build_model(lat, tfi(1.0));
  const auto p = partition(h, Region());
  EXPECT_TRUE(p.inside.empty());
  EXPECT_EQ(p.outside.size(), h.terms().size());
}

TEST(Partition, PrefixHasOneCrossingBond) {
  const Lattice lat = Lattice::chain(10);
  const auto h = psd_normalize(build_model(lat, tfi(1.0)));
  const auto p = partition(h, Region::interval(lat, 0, 4));
  ASSERT_EQ(p.crossing.size(), 1u);
  EXPECT_EQ(p.crossing[0].anchor, 4);
  EXPECT_TRUE(p.norm_computed);
  EXPECT_LE(p.norm_crossing, h.J() + 1e-12);
  EXPECT_LE(p.norm_crossing, p.crossing_bound);
}

TEST(Partition, SumOfPiecesReassemblesH) {
  const Lattice lat = Lattice::chain(7);
  ModelSpec m;
  m.kind = ModelKind::random_two_local;
  m.seed = 4;
  const auto h = build_model(lat, m);
  const auto p = partition(h, Region::interval(lat, 2, 4));
  std::vector<Site> all{0, 1, 2, 3, 4, 5, 6};
  const Matrix sum = assemble(p.inside, all, 2) + assemble(p.crossing, all, 2) + assemble(p.outside, all, 2);
  EXPECT_LE((sum - full(h)).norm(), 1e-12);
}

TEST(Assemble, EmptyTermsGiveZero) {
  const Matrix z = assemble({}, {0, 1}, 2);
  EXPECT_EQ(z.rows(), 4);
  EXPECT_EQ(z.norm(), 0.0);
}

TEST(Assemble, SingleSiteTermEmbedsWithIdentity) {
  const Lattice lat = Lattice::chain(2);
  Matrix proj = Matrix::Zero(2, 2);
  proj(0, 0) = 1.0;
  const auto h = from_pieces(lat, {{{0}, proj}});
  const Matrix a = assemble(h.terms(), {0, 1}, 2);
  Eigen::VectorXd d(4);
  d << 1, 1, 0, 0;
  EXPECT_LE((a - Matrix(d.cast<cplx>().asDiagonal())).norm(), 1e-15);
}

TEST(Assemble, OverCapIsCapacityError) {
  const Lattice lat = Lattice::chain(6);
  const auto h = build_model(lat, tfi(1.0));
  EXPECT_THROW(assemble(h.terms(), {0, 1, 2, 3, 4, 5}, 2, 4), CapacityError);
}

TEST(LocalTerm, RadiusTwoSupportRejected) {
  const Lattice lat = Lattice::chain(4);
  EXPECT_THROW(from_pieces(lat, {{{0, 2}, kron(pauli_z(), pauli_z())}}), DomainError);
}
