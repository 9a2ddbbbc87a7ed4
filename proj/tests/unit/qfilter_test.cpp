#include <gtest/gtest.h>

#include "arealaw/errors.hpp"
#include "arealaw/qfilter.hpp"
#include "arealaw/support.hpp"
#include "oracles.hpp"

using namespace arealaw;

namespace {

LocalHamiltonian psd_tfi(const Lattice& lat, double g) {
  ModelSpec m;
  m.g = g;
  return psd_normalize(build_model(lat, m));
}

// sum_{m,n} Phi((a - e_m + E_n)/sqrt(sigma)) (Pi_m (x) I) |Psi_n><Psi_n| with X the leading sites
Matrix closed_form_Q(const Matrix& H, const Matrix& HX, int rest_sites, double a, double sigma) {
  const auto eh = oracle::eig(H);
  const auto ex = oracle::eig(HX);
  const Matrix I = Matrix::Identity(Index(1) << rest_sites, Index(1) << rest_sites);
  Matrix Q = Matrix::Zero(H.rows(), H.cols());
  for (Index m = 0; m < ex.values.size(); ++m) {
    const Matrix Pm = oracle::kron(ex.vectors.col(m) * ex.vectors.col(m).adjoint(), I);
    for (Index n = 0; n < eh.values.size(); ++n) {
      const double c = oracle::normal_cdf((a - ex.values(m) + eh.values(n)) / std::sqrt(sigma));
      Q += c * Pm * eh.vectors.col(n) * eh.vectors.col(n).adjoint();
    }
  }
  return Q;
}

}  // namespace

TEST(AssignEcut, Substitution) {
  EXPECT_DOUBLE_EQ(assign_ecut(1.0, 1, 2, 0.0, 10.0), 212.0);
  EXPECT_DOUBLE_EQ(assign_ecut(1.0, 1, 2, 0.0, 10.0, 0.0), assign_ecut(1.0, 1, 2, 0.0, 10.0));
  EXPECT_DOUBLE_EQ(assign_ecut(3.0, 2, 0, 1.5, 4.0), 81.5);
  EXPECT_DOUBLE_EQ(assign_ecut(1.0, 1, 2, 0.0, 10.0, 3.0), 215.0);
}

TEST(FilterSpec, DefaultRuleConstants) {
  const Lattice lat = Lattice::chain(8);
  const auto spec = make_filter_spec(lat, Region::interval(lat, 0, 5), 5, 10.0, 2.0, 0.0);
  EXPECT_DOUBLE_EQ(spec.delta, 40.0);
  EXPECT_DOUBLE_EQ(spec.sigma, 1e4 * 4.0 / 5.0);
  const auto tail = make_filter_spec(lat, Region::interval(lat, 0, 5), 5, 10.0, 2.0, 0.0, SigmaRule::gaussian_tail);
  EXPECT_NEAR(std::exp(-tail.delta * tail.delta / (2.0 * tail.sigma)), std::exp(-5.0), 1e-15);
  EXPECT_THROW(make_filter_spec(lat, Region::interval(lat, 0, 5), 4, 10.0, 2.0, 0.0), ParameterError);
}

TEST(BuildM, CoefficientsAndProjectors) {
  const Lattice lat = Lattice::chain(6);
  const auto h = psd_tfi(lat, 1.0);
  const Region X = Region::interval(lat, 0, 3);
  const auto sx = region_spectrum(h, X);
  FilterSpec spec = make_filter_spec(lat, X, 5, sx.values(3), 0.1, 0.0, SigmaRule::gaussian_tail);
  const auto m = build_M(spec, sx);
  EXPECT_NEAR(m.coefficient(3), 0.5, 1e-15);
  for (Index i = 0; i < m.coefficient.size(); ++i) {
    EXPECT_GE(m.coefficient(i), 0.0);
    EXPECT_LE(m.coefficient(i), 1.0);
    EXPECT_LE(m.minus(i), m.plus(i));
  }
  EXPECT_LE((m.M_minus * m.M_minus - m.M_minus).norm(), 1e-10);
  EXPECT_LE((m.M_plus * m.M_plus - m.M_plus).norm(), 1e-10);
  EXPECT_GE(min_eigenvalue(m.M), -1e-12);
  EXPECT_GE(min_eigenvalue(Matrix::Identity(16, 16) - m.M), -1e-12);
}

TEST(BuildM, SharpLimitIsIndicator) {
  const Lattice lat = Lattice::chain(4);
  const auto h = psd_tfi(lat, 1.0);
  const auto sx = region_spectrum(h, Region::all(lat));
  Index k = 4;
  while (sx.values(k + 1) - sx.values(k) < 1e-6) ++k;
  FilterSpec spec = make_filter_spec(lat, Region::all(lat), 5, 0.5 * (sx.values(k) + sx.values(k + 1)), 1.0, 0.0);
  spec.sigma = 1e-12;
  const auto m = build_M(spec, sx);
  for (Index i = 0; i < 16; ++i) EXPECT_NEAR(m.coefficient(i), sx.values(i) <= spec.e_cut ? 1.0 : 0.0, 1e-12);
}

TEST(BuildQ, MatchesClosedFormOracle) {
  const Lattice lat = Lattice::chain(4);
  const auto h = psd_tfi(lat, 1.2);
  const Region X = Region::interval(lat, 0, 1);
  const auto sh = region_spectrum(h, Region::all(lat));
  const auto sx = region_spectrum(h, X);
  FilterSpec spec = make_filter_spec(lat, X, 5, sx.values(0) + 1.3, 0.2, sh.ground_energy(), SigmaRule::gaussian_tail);
  spec.sigma = 0.7;
  const Matrix Q = build_Q_spectral(spec, sh, sx, lat);
  const Matrix H = assemble(h.terms(), Region::all(lat).sites(), 2);
  const Matrix HX = assemble(terms_inside(h, X), X.sites(), 2);
  EXPECT_LE((Q - closed_form_Q(H, HX, 2, spec.e_cut - spec.e_ref, spec.sigma)).norm(), 1e-10);
}

TEST(BuildQ, WholeLatticeIsScalar) {
  // H_X = H commutes with H, so the filter collapses to Phi((e_cut - e_ref) / sqrt(sigma)) I
  const Lattice lat = Lattice::chain(5);
  const auto h = psd_tfi(lat, 0.9);
  const Region all = Region::all(lat);
  const auto sh = region_spectrum(h, all);
  FilterSpec spec = make_filter_spec(lat, all, 5, sh.ground_energy() + 1.0, 0.1, sh.ground_energy(), SigmaRule::gaussian_tail);
  const Matrix Q = build_Q_spectral(spec, sh, sh, lat);
  const double c = oracle::normal_cdf((spec.e_cut - spec.e_ref) / std::sqrt(spec.sigma));
  EXPECT_LE((Q - c * Matrix::Identity(32, 32)).norm(), 1e-10);
  const auto m = build_M(spec, sh);
  EXPECT_LE((Q * sh.vectors.col(0) - m.M * sh.vectors.col(0)).norm(), 1e-10);
  for (Index n = 0; n < 6; ++n) {
    const double cn = oracle::normal_cdf((spec.e_cut - sh.values(n)) / std::sqrt(spec.sigma));
    EXPECT_NEAR((m.M * sh.vectors.col(n) - cn * sh.vectors.col(n)).norm(), 0.0, 1e-10);
  }
}

TEST(BuildQ, GroundStateActionAndStepProfile) {
  const Lattice lat = Lattice::chain(8);
  const auto h = psd_tfi(lat, 2.0);
  const Region X = Region::interval(lat, 2, 5);
  const auto sh = region_spectrum(h, Region::all(lat));
  const auto sx = region_spectrum(h, X);
  const double v = h.lr_velocity();
  const double e_cut = assign_ecut(h.J(), 1, boundary(lat, X).size(), sx.ground_energy(), v);
  for (SigmaRule rule : {SigmaRule::lieb_robinson, SigmaRule::gaussian_tail}) {
    FilterSpec spec = make_filter_spec(lat, X, 5, e_cut, v, sh.ground_energy(), rule);
    const Matrix Q = build_Q_spectral(spec, sh, sx, lat);
    const TensorSplit split(8, 2, X.sites());
    EXPECT_LE((Q * sh.vectors.col(0) - split.apply(build_M(spec, sx).M, sh.vectors.col(0))).norm(), 1e-8);
    for (Index n = 1; n <= 3; ++n) EXPECT_LE(step_profile_error(Q, spec, sh, sx, lat, n), 1e-8);
  }
}

TEST(BuildQ, ExcitedStateMatchesShiftedCut) {
  const Lattice lat = Lattice::chain(6);
  const auto h = psd_tfi(lat, 1.0);
  const Region X = Region::interval(lat, 1, 3);
  const auto sh = region_spectrum(h, Region::all(lat));
  const auto sx = region_spectrum(h, X);
  FilterSpec spec = make_filter_spec(lat, X, 5, sx.values(0) + 2.0, 0.1, sh.ground_energy());
  spec.sigma = 0.5;
  const Matrix Q = build_Q_spectral(spec, sh, sx, lat);
  const TensorSplit split(6, 2, X.sites());
  for (Index n = 1; n < 5; ++n) {
    // directly built shifted filter: coefficients at e_cut + E_n - E_0
    const double cut = spec.e_cut + sh.values(n) - sh.values(0);
    Eigen::VectorXd c(sx.size());
    for (Index m = 0; m < sx.size(); ++m) c(m) = oracle::normal_cdf((cut - sx.values(m)) / std::sqrt(spec.sigma));
    const Matrix M = sx.vectors * c.cast<cplx>().asDiagonal() * sx.vectors.adjoint();
    EXPECT_LE((Q * sh.vectors.col(n) - split.apply(M, sh.vectors.col(n))).norm(), 1e-10);
  }
}

TEST(Quadrature, AgreesWithSpectralAndConverges) {
  const Lattice lat = Lattice::chain(4);
  const auto h = psd_tfi(lat, 1.0);
  const Region X = Region::interval(lat, 0, 1);
  const auto sh = region_spectrum(h, Region::all(lat));
  const auto sx = region_spectrum(h, X);
  FilterSpec spec = make_filter_spec(lat, X, 5, sx.values(0) + 1.0, 0.1, sh.ground_energy());
  spec.sigma = 1.0;
  const Matrix Qs = build_Q_spectral(spec, sh, sx, lat);
  const auto def = build_Q_quadrature(spec, sh, sx, lat);
  EXPECT_LE(check_quadrature(def.Q, Qs), 5e-3);
  double prev = INFINITY;
  for (int k = 0; k < 4; ++k) {
    QuadratureOptions o;
    o.T = 8.0;
    o.dt = 8.0 / (16.0 * std::pow(2.0, k));
    const double err = operator_norm(build_Q_quadrature(spec, sh, sx, lat, o).Q - Qs);
    EXPECT_LE(err, std::max(prev, 1e-11));
    prev = err;
  }
  QuadratureOptions coarse;
  coarse.T = 8.0;
  coarse.dt = 1.0;
  EXPECT_THROW(check_quadrature(build_Q_quadrature(spec, sh, sx, lat, coarse).Q, Qs, 1e-12), NumericError);
}

TEST(Quadrature, CommutingCaseMatchesScalar) {
  const Lattice lat = Lattice::chain(3);
  const auto h = psd_tfi(lat, 0.6);
  const Region all = Region::all(lat);
  const auto sh = region_spectrum(h, all);
  FilterSpec spec = make_filter_spec(lat, all, 5, sh.ground_energy() + 0.8, 0.1, sh.ground_energy());
  spec.sigma = 1.0;
  const auto q = build_Q_quadrature(spec, sh, sh, lat);
  const double c = oracle::normal_cdf(0.8);
  EXPECT_LE(operator_norm(q.Q - c * Matrix::Identity(8, 8)), 5e-3);
  EXPECT_LE(operator_norm(q.Q - build_Q_spectral(spec, sh, sh, lat)), 5e-3);
}

TEST(Qtilde, ShellCoveringRegionEqualsQ) {
  const Lattice lat = Lattice::chain(8);
  const auto h = psd_tfi(lat, 1.5);
  const Region X = Region::interval(lat, 2, 5);
  const auto sh = region_spectrum(h, Region::all(lat));
  const auto sx = region_spectrum(h, X);
  FilterSpec spec = make_filter_spec(lat, X, 5, sx.values(0) + 3.0, 0.5, sh.ground_energy());
  spec.sigma = 2.0;
  ASSERT_EQ(spec.S, X);
  const Matrix Q = build_Q_spectral(spec, sh, sx, lat);
  const Matrix Qt = build_Qtilde(spec, h);
  EXPECT_LE((Q - Qt).norm(), 1e-10);
  EXPECT_EQ(lemma1_check(Q, Qt, X.size(), 5).pass, true);
}

TEST(Qtilde, IdentityOnBulk) {
  const Lattice lat = Lattice::chain(8);
  const auto h = psd_tfi(lat, 1.5);
  const Region X = Region::interval(lat, 0, 6);
  const auto sh = region_spectrum(h, Region::all(lat));
  const auto sx = region_spectrum(h, X);
  FilterSpec spec = make_filter_spec(lat, X, 5, sx.values(0) + 3.0, 0.5, sh.ground_energy());
  spec.sigma = 2.0;
  EXPECT_EQ(spec.S, Region::interval(lat, 2, 6));
  const Matrix Qt = build_Qtilde(spec, h);
  for (const Matrix& op : {oracle::chain_product(8, {{0, oracle::X()}}), oracle::chain_product(8, {{1, oracle::Z()}})})
    EXPECT_LE((Qt * op - op * Qt).norm(), 1e-10);
}

TEST(Lemma1, VacuityFlagFromArithmetic) {
  const Matrix a = Matrix::Identity(4, 4), b = Matrix::Zero(4, 4);
  const auto c = lemma1_check(a, b, 10, 5);
  EXPECT_NEAR(c.bound, 1000.0 * std::exp(-5.0), 1e-9);
  EXPECT_TRUE(c.vacuous);
  EXPECT_TRUE(c.pass);
  EXPECT_FALSE(lemma1_check(a, b, 2, 5).vacuous);
  EXPECT_FALSE(lemma1_check(a, b, 2, 5).pass);
}

TEST(Lemma3, WholeLatticeGroundStateBelowCut) {
  const Lattice lat = Lattice::chain(6);
  const auto h = psd_tfi(lat, 2.0);
  const Region all = Region::all(lat);
  const auto sh = region_spectrum(h, all);
  const double v = h.lr_velocity();
  const double e_cut = assign_ecut(h.J(), 1, 0, sh.ground_energy(), v);
  EXPECT_NEAR(e_cut, sh.ground_energy() + 20.0 * v, 1e-12);
  const auto spec = make_filter_spec(lat, all, 5, e_cut, v, sh.ground_energy(), SigmaRule::gaussian_tail);
  // empty shell: the shell filter reduces to Q itself here
  FilterOperators f;
  f.spec = spec;
  f.M = build_M(spec, sh);
  f.Q = build_Q_spectral(spec, sh, sh, lat);
  f.Qtilde = f.Q;
  const Vector psi = sh.vectors.col(0);
  const Region R = Region::interval(lat, 2, 3);
  const auto P = build_P(sh, all, R, 2, e_cut + spec.delta);
  const Matrix Pm = P.projector();
  Lemma3Inputs in{&f, &sh, &lat, &psi, sh.ground_energy(), R, &Pm, e_cut + spec.delta};
  const auto checks = lemma3_check(in);
  EXPECT_NEAR(checks[0].measured, 1.0, 1e-12);
  EXPECT_TRUE(all_pass(checks));
  in.P_threshold += 1.0;
  EXPECT_THROW(lemma3_check(in), ConfigError);
}

TEST(Lemma3, InteriorRegionWithTailSoftness) {
  const Lattice lat = Lattice::chain(8);
  const auto h = psd_tfi(lat, 2.0);
  const Region X = Region::interval(lat, 1, 6), R = Region::interval(lat, 3, 4);
  const auto sh = region_spectrum(h, Region::all(lat));
  const auto sx = region_spectrum(h, X);
  const double v = h.lr_velocity();
  const double e_cut = assign_ecut(h.J(), 1, boundary(lat, X).size(), sx.ground_energy(), v);
  const auto spec = make_filter_spec(lat, X, 5, e_cut, v, sh.ground_energy(), SigmaRule::gaussian_tail);
  const auto f = build_filter(spec, h, sh, sx);
  const Vector psi = sh.vectors.col(0);
  const auto P = build_P(sx, X, R, 2, e_cut + spec.delta);
  const Matrix Pm = P.projector();
  Lemma3Inputs in{&f, &sx, &lat, &psi, term_expectation(h, terms_inside(h, X), psi), R, &Pm, e_cut + spec.delta};
  for (const auto& c : lemma3_check(in)) EXPECT_TRUE(c.pass) << c.check << " " << c.measured << " vs " << c.bound;
  // worst-case estimate from direct expectations
  const TensorSplit split(8, 2, X.sites());
  const double m_minus = psi.dot(split.apply(f.M.M_minus, psi)).real();
  EXPECT_GE(in.expectation_HX + 1e-9, m_minus * sx.values(0) + (1.0 - m_minus) * (e_cut - spec.delta));
}
