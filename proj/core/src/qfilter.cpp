#include "arealaw/qfilter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "arealaw/errors.hpp"

namespace arealaw {

namespace {

void require_full(const SpectralData& spec, const char* what) {
  if (spec.completeness != Completeness::full || spec.size() != spec.dim()) {
    throw CoverageError(std::string(what) + ": full spectrum required");
  }
}

std::vector<int> positions_of(const Region& sub, const Region& basis) {
  return positions_within(sub.sites(), basis.sites());
}

}  // namespace

std::string to_string(SigmaRule rule) {
  return rule == SigmaRule::lieb_robinson ? "lieb-robinson" : "gaussian-tail";
}

double assign_ecut(double J, int s, std::size_t boundary_size, double e0, double v,
                   double excitation) {
  return 2.0 * J * std::pow(3.0, s) * static_cast<double>(boundary_size) + e0 + 20.0 * v +
         excitation;
}

double filter_sigma(double v, int l, SigmaRule rule, double delta) {
  if (l <= 0) throw ParameterError("filter_sigma: l must be positive");
  if (rule == SigmaRule::lieb_robinson) return 1e4 * v * v / l;
  return delta * delta / (2.0 * l);
}

FilterSpec make_filter_spec(const Lattice& lattice, const Region& X, int l, double e_cut,
                            double v, double e_ref, SigmaRule rule) {
  if (l < 5) throw ParameterError("make_filter_spec: l must be at least 5");
  if (!(v > 0.0)) throw ParameterError("make_filter_spec: v must be positive");
  FilterSpec spec;
  spec.X = X;
  spec.S = shell(lattice, X, l);
  spec.l = l;
  spec.e_cut = e_cut;
  spec.delta = 20.0 * v;
  spec.sigma = filter_sigma(v, l, rule, spec.delta);
  spec.e_ref = e_ref;
  spec.v = v;
  spec.rule = rule;
  return spec;
}

MOperators build_M(const FilterSpec& spec, const SpectralData& spec_X) {
  require_full(spec_X, "build_M");
  const Index n = spec_X.size();
  const double root = std::sqrt(spec.sigma);
  // e_cut - delta can land on e_0 exactly (|dX| = 0); keep the edge inside
  const double edge = 1e-12 * std::max(1.0, std::abs(spec.e_cut) + spec.delta);
  MOperators m;
  m.coefficient.resize(n);
  m.minus.resize(n);
  m.plus.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double e = spec_X.values(i);
    m.coefficient(i) = normal_cdf((spec.e_cut - e) / root);
    m.minus(i) = e <= spec.e_cut - spec.delta + edge ? 1.0 : 0.0;
    m.plus(i) = e <= spec.e_cut + spec.delta + edge ? 1.0 : 0.0;
  }
  const Matrix& U = spec_X.vectors;
  auto diag = [&](const RealVector& d) -> Matrix {
    return U * d.cast<cplx>().asDiagonal() * U.adjoint();
  };
  m.M = diag(m.coefficient);
  m.M_minus = diag(m.minus);
  m.M_plus = diag(m.plus);
  return m;
}

Matrix filter_action(const SpectralData& inner, const SpectralData& outer,
                     const TensorSplit& split, double a, double sigma) {
  require_full(inner, "filter_action");
  require_full(outer, "filter_action");
  if (inner.dim() != split.dim_a() || outer.dim() != split.full_dim()) {
    throw DomainError("filter_action: spectra do not match the tensor split");
  }
  const double root = std::sqrt(sigma);
  const Matrix& U = inner.vectors;
  const Matrix& V = outer.vectors;
  const Index na = split.dim_a();
  const Index nb = split.full_dim();

  Matrix coeff(na, nb);
  for (Index n = 0; n < nb; ++n)
    for (Index m = 0; m < na; ++m)
      coeff(m, n) = normal_cdf((a - inner.values(m) + outer.values(n)) / root);

  Matrix W(nb, nb);
  for (Index r = 0; r < split.dim_rest(); ++r) {
    Matrix block = U.adjoint() * split.gather(V, r);
    block.array() *= coeff.array();
    split.scatter(U * block, r, W);
  }
  return W;
}

Matrix build_Q_spectral(const FilterSpec& spec, const SpectralData& spec_H,
                        const SpectralData& spec_X, const Lattice& lattice) {
  require_full(spec_H, "build_Q_spectral");
  require_full(spec_X, "build_Q_spectral");
  const TensorSplit split(lattice.num_sites(), lattice.q(), spec.X.sites());
  const Matrix W = filter_action(spec_X, spec_H, split, spec.e_cut - spec.e_ref, spec.sigma);
  Matrix Q = W * spec_H.vectors.adjoint();

  // Q|Psi_0> = M|Psi_0> when the reference is the ground energy
  if (std::abs(spec.e_ref - spec_H.ground_energy()) <= 1e-12 * std::max(1.0, std::abs(spec.e_ref))) {
    const MOperators m = build_M(spec, spec_X);
    const Vector psi0 = spec_H.vectors.col(0);
    const double err = (Q * psi0 - split.apply(m.M, psi0)).norm();
    if (err > 1e-8) {
      throw NumericError("build_Q_spectral: Q|Psi_0> differs from M|Psi_0> by " +
                         std::to_string(err));
    }
  }
  return Q;
}

QuadratureResult build_Q_quadrature(const FilterSpec& spec, const SpectralData& spec_H,
                                    const SpectralData& spec_X, const Lattice& lattice,
                                    const QuadratureOptions& options) {
  require_full(spec_H, "build_Q_quadrature");
  require_full(spec_X, "build_Q_quadrature");
  const TensorSplit split(lattice.num_sites(), lattice.q(), spec.X.sites());
  const Index dim = spec_H.dim();
  if (spec_X.dim() != split.dim_a() || dim != split.full_dim()) {
    throw DomainError("build_Q_quadrature: spectra do not match the lattice");
  }
  const double norm_H = std::max(std::abs(spec_H.values(0)), std::abs(spec_H.values(dim - 1)));

  QuadratureResult out;
  out.T = options.T > 0.0 ? options.T : 8.0 / std::sqrt(spec.sigma);
  double dt = options.dt > 0.0 ? options.dt
                               : std::min(norm_H > 0.0 ? 0.05 / norm_H : out.T, out.T / 2000.0);
  out.steps = std::max(1, static_cast<int>(std::ceil(out.T / dt - 1e-9)));
  out.dt = out.T / out.steps;
  const double a = spec.e_cut - spec.e_ref;
  const double exclusion = options.epsilon * out.T;

  const Matrix& V = spec_H.vectors;
  const Matrix& U = spec_X.vectors;
  const Matrix Vh = V.adjoint();
  const Matrix Uh = U.adjoint();
  auto evolve_H = [&](double t) -> Matrix {
    Vector ph(dim);
    for (Index i = 0; i < dim; ++i) ph(i) = std::polar(1.0, t * spec_H.values(i));
    return V * ph.asDiagonal() * Vh;
  };
  auto evolve_X = [&](double t) -> Matrix {
    Vector ph(spec_X.size());
    for (Index i = 0; i < spec_X.size(); ++i) ph(i) = std::polar(1.0, t * spec_X.values(i));
    return U * ph.asDiagonal() * Uh;
  };

  // analytic t -> 0 limit of the kernel
  const Matrix HX_full = split.embed(U * spec_X.values.cast<cplx>().asDiagonal() * Uh);
  const Matrix H_full = V * spec_H.values.cast<cplx>().asDiagonal() * Vh;
  const Matrix h0 = (a * Matrix::Identity(dim, dim) + H_full - HX_full) / std::numbers::pi;

  Matrix integral = Matrix::Zero(dim, dim);
  const cplx prefactor(0.0, 1.0 / (2.0 * std::numbers::pi));
  for (int k = 0; k <= out.steps; ++k) {
    const double t = k * out.dt;
    const double w = (k == 0 || k == out.steps) ? 0.5 * out.dt : out.dt;
    if (t <= exclusion) {
      integral += w * h0;
      continue;
    }
    const Matrix UH = evolve_H(-t);  // e^{-iHt}
    const Matrix g_plus = std::polar(1.0, -a * t) * split.apply_rows(evolve_X(t), UH);
    const Matrix g_minus = std::polar(1.0, a * t) * split.apply_rows(evolve_X(-t), UH.adjoint());
    const double damp = std::exp(-0.5 * spec.sigma * t * t) / t;
    integral += (w * damp) * prefactor * (g_plus - g_minus);
  }
  out.Q = 0.5 * Matrix::Identity(dim, dim) + integral;
  return out;
}

double check_quadrature(const Matrix& Q_quad, const Matrix& Q_spec, double tolerance) {
  const double d = operator_norm(Q_quad - Q_spec);
  if (d > tolerance) {
    throw NumericError("quadrature filter differs from the spectral filter by " +
                       std::to_string(d));
  }
  return d;
}

Matrix build_Qtilde(const FilterSpec& spec, const SpectralData& spec_S,
                    const SpectralData& spec_outer, const Lattice& lattice) {
  const Region Y = set_union(lattice, exterior(lattice, spec.X), spec.S);
  const TensorSplit inner_split(static_cast<int>(Y.size()), lattice.q(), positions_of(spec.S, Y));
  const Matrix W =
      filter_action(spec_S, spec_outer, inner_split, spec.e_cut - spec.e_ref, spec.sigma);
  const Matrix QY = W * spec_outer.vectors.adjoint();
  if (static_cast<int>(Y.size()) == lattice.num_sites()) return QY;
  const TensorSplit embed_split(lattice.num_sites(), lattice.q(), Y.sites());
  return embed_split.embed(QY);
}

Matrix build_Qtilde(const FilterSpec& spec, const LocalHamiltonian& h, int dense_cap) {
  const Lattice& lattice = h.lattice();
  const Region Y = set_union(lattice, exterior(lattice, spec.X), spec.S);
  const SpectralData spec_S = region_spectrum(h, spec.S, dense_cap);
  const SpectralData spec_Y = region_spectrum(h, Y, dense_cap);
  return build_Qtilde(spec, spec_S, spec_Y, lattice);
}

FilterOperators build_filter(const FilterSpec& spec, const LocalHamiltonian& h,
                             const SpectralData& spec_H, const SpectralData& spec_X,
                             int dense_cap) {
  FilterOperators f;
  f.spec = spec;
  f.M = build_M(spec, spec_X);
  f.Q = build_Q_spectral(spec, spec_H, spec_X, h.lattice());
  f.Qtilde = build_Qtilde(spec, h, dense_cap);
  return f;
}

InequalityCheck lemma1_check(const Matrix& Q, const Matrix& Qtilde, std::size_t size_X, int l) {
  if (Q.rows() != Qtilde.rows() || Q.cols() != Qtilde.cols()) {
    throw DomainError("lemma1_check: operators act on different spaces");
  }
  const double bound = std::pow(static_cast<double>(size_X), 3) * std::exp(-l);
  return make_check("lemma1: ||Q - Qtilde|| <= |X|^3 e^-l", operator_norm(Q - Qtilde),
                    Relation::less_equal, bound, 1e-10, bound >= 2.0);
}

std::vector<InequalityCheck> lemma3_check(const Lemma3Inputs& in) {
  if (!in.filter || !in.spec_X || !in.lattice || !in.ground || !in.P) {
    throw ParameterError("lemma3_check: missing inputs");
  }
  const FilterOperators& f = *in.filter;
  const FilterSpec& spec = f.spec;
  const Lattice& lattice = *in.lattice;
  const Vector& psi = *in.ground;
  const double expected = spec.e_cut + spec.delta;
  if (std::abs(in.P_threshold - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
    throw ConfigError("lemma3_check: P threshold " + format_number(in.P_threshold) +
                      " does not match e_cut + delta = " + format_number(expected));
  }
  if (!is_subset(in.R, spec.X)) throw DomainError("lemma3_check: R must lie inside X");

  const double el = std::exp(-spec.l);
  const double cube = std::pow(static_cast<double>(spec.X.size()), 3) * el;
  const MOperators& M = f.M;
  const Matrix& U = in.spec_X->vectors;

  const TensorSplit split_X(lattice.num_sites(), lattice.q(), spec.X.sites());
  const Matrix rho_X = split_X.reduced_density(psi);
  const RealVector w = (U.adjoint() * rho_X * U).diagonal().real();
  const double m_minus = w.dot(M.minus);
  const double hx = w.dot(in.spec_X->values);

  std::vector<InequalityCheck> out;
  out.push_back(make_check("lemma3(a): <M-> >= 1/2", m_minus, Relation::greater_equal, 0.5,
                           1e-10));

  double low = INFINITY, high = INFINITY, square = INFINITY, inclusion = -INFINITY;
  for (Index n = 0; n < M.coefficient.size(); ++n) {
    const double phi = M.coefficient(n);
    low = std::min(low, phi - M.minus(n) + el);
    high = std::min(high, M.plus(n) + el - phi);
    square = std::min(square, (1.0 + 2.0 * el) * M.plus(n) + el * el - phi * phi);
    inclusion = std::max(inclusion, M.minus(n) - M.plus(n));
  }
  const std::string rule = "sigma rule " + to_string(spec.rule);
  out.push_back(make_check("lemma3(b): M - (M- - e^-l) >= 0", low, Relation::greater_equal, 0.0,
                           1e-8, false, rule));
  out.push_back(make_check("lemma3(b): (M+ + e^-l) - M >= 0", high, Relation::greater_equal, 0.0,
                           1e-8, false, rule));
  out.push_back(make_check("lemma3(c): (1+2e^-l) M+ + e^-2l - M^2 >= 0", square,
                           Relation::greater_equal, 0.0, 1e-8, false, rule));
  out.push_back(make_check("M- <= M+", inclusion, Relation::less_equal, 0.0, 1e-12));

  const double jbp = m_minus * in.spec_X->ground_energy() +
                     (1.0 - m_minus) * (spec.e_cut - spec.delta);
  out.push_back(make_check("jbp: <H_X> >= <M->e0 + <1-M->(e_cut - delta)", in.expectation_HX,
                           Relation::greater_equal, jbp, 1e-9 * std::max(1.0, std::abs(jbp))));
  out.push_back(make_check("<H_X> from the X spectrum", std::abs(hx - in.expectation_HX),
                           Relation::less_equal, 0.0, 1e-8 * std::max(1.0, std::abs(hx))));

  const double qt_norm = operator_norm(f.Qtilde);
  out.push_back(make_check("||Qtilde|| <= 1", qt_norm, Relation::less_equal, 1.0, 1e-8));

  const Vector qt_psi = f.Qtilde * psi;
  const double qt_expect = psi.dot(qt_psi).real();
  const double bound_d = 0.5 - 2.0 * cube;
  out.push_back(make_check("lemma3(d): Re<Qtilde> >= 1/2 - 2|X|^3 e^-l", qt_expect,
                           Relation::greater_equal, bound_d, 1e-10, bound_d <= -1.0));

  const TensorSplit split_R(lattice.num_sites(), lattice.q(), in.R.sites());
  const Matrix& P = *in.P;
  const Matrix P_perp = Matrix::Identity(P.rows(), P.cols()) - P;
  const Vector perp_psi = split_R.apply(P_perp, psi);
  const double perp = perp_psi.squaredNorm();
  const double perp_qt = std::abs(perp_psi.dot(qt_psi));
  const double bound_e = 2.0 * cube;
  out.push_back(make_check("lemma3(e): |<P_perp Qtilde>| <= 2|X|^3 e^-l", perp_qt,
                           Relation::less_equal, bound_e, 1e-10, bound_e >= qt_norm));

  // intermediate steps of the chain
  const Vector m_psi = split_X.apply(M.M, psi);
  const double perp_m = std::abs(perp_psi.dot(m_psi));
  out.push_back(make_check("chain: |<P_perp Qtilde>| <= |<P_perp M>| + |X|^3 e^-l", perp_qt,
                           Relation::less_equal, perp_m + cube, 1e-10, cube >= 2.0));
  const Vector m_perp = split_X.apply(M.M, perp_psi);
  const double m2 = m_perp.squaredNorm();
  out.push_back(make_check("chain: |<P_perp M>| <= <P_perp>^1/2 <P_perp M^2 P_perp>^1/2", perp_m,
                           Relation::less_equal, std::sqrt(perp * m2), 1e-12));
  const double mplus_perp = split_X.apply(M.M_plus, perp_psi).squaredNorm();
  const double step3 = (1.0 + 2.0 * el) * mplus_perp + el * el * perp;
  out.push_back(make_check("chain: <P_perp M^2 P_perp> <= (1+2e^-l)<P_perp M+ P_perp> + e^-2l",
                           m2, Relation::less_equal, step3, 1e-12));
  out.push_back(make_check("chain: sqrt(<P_perp> bound) + |X|^3 e^-l <= 2|X|^3 e^-l",
                           std::sqrt(perp * step3) + cube, Relation::less_equal, 2.0 * cube,
                           1e-12, 2.0 * cube >= qt_norm));

  // P_perp M+ = 0 on the X factor
  const std::vector<int> r_in_x = positions_of(in.R, spec.X);
  const TensorSplit split_RX(static_cast<int>(spec.X.size()), lattice.q(), r_in_x);
  const double leak = split_RX.apply_rows(P_perp, M.M_plus).norm();
  out.push_back(make_check("P_perp M+ = 0", leak, Relation::less_equal, 0.0, 1e-8));
  return out;
}

double step_profile_error(const Matrix& Q, const FilterSpec& spec, const SpectralData& spec_H,
                          const SpectralData& spec_X, const Lattice& lattice, Index n) {
  require_full(spec_H, "step_profile_error");
  if (n < 0 || n >= spec_H.size()) throw DomainError("step_profile_error: index out of range");
  const TensorSplit split(lattice.num_sites(), lattice.q(), spec.X.sites());
  if (Q.rows() != spec_H.dim()) throw DomainError("step_profile_error: dimension mismatch");
  const Vector psi = spec_H.vectors.col(n);

  FilterSpec shifted = spec;
  shifted.e_cut = spec.e_cut - spec.e_ref + spec_H.values(n);
  const MOperators m = build_M(shifted, spec_X);
  return (Q * psi - split.apply(m.M, psi)).norm();
}

}  // namespace arealaw
