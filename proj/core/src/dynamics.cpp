#include "arealaw/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "arealaw/errors.hpp"

namespace arealaw {

namespace {

void require_full(const SpectralData& spec) {
  if (spec.completeness != Completeness::full || spec.size() != spec.dim()) {
    throw CoverageError("time evolution needs the full spectrum");
  }
}

Matrix phase_conjugate(const Matrix& x_eig, const RealVector& e, double t) {
  Matrix out = x_eig;
  for (Index n = 0; n < out.cols(); ++n)
    for (Index m = 0; m < out.rows(); ++m) out(m, n) *= std::polar(1.0, (e(m) - e(n)) * t);
  return out;
}

Matrix unitary(const EigenDecomposition& eig, double t) {
  return spectral_function(eig, [t](double e) { return std::polar(1.0, e * t); });
}

}  // namespace

Matrix heisenberg_evolve(const Matrix& X, const SpectralData& spec, double t) {
  require_full(spec);
  if (X.rows() != spec.dim() || X.cols() != spec.dim()) {
    throw DomainError("heisenberg_evolve: operator dimension mismatch");
  }
  const Matrix& V = spec.vectors;
  return V * phase_conjugate(V.adjoint() * X * V, spec.values, t) * V.adjoint();
}

double lr_bound_eval(std::size_t support_size, int d, double t, double J, int s) {
  if (d < 0 || t < 0.0) throw DomainError("lr_bound_eval: need d >= 0 and t >= 0");
  const double v = 2.0 * J * std::pow(5.0, s);
  const int n = d / 2;
  if (n == 0) return 2.0 * static_cast<double>(support_size);
  if (t == 0.0 || v == 0.0) return 0.0;
  const double log_value = std::log(2.0 * static_cast<double>(support_size)) +
                           n * std::log(v * t) - std::lgamma(n + 1.0);
  return std::exp(log_value);
}

double lr_recursive_bound(int r, double t, double J, int s, double norm_X) {
  if (r < 2) throw DomainError("lr_recursive_bound: need r >= 2");
  if (t < 0.0) throw DomainError("lr_recursive_bound: need t >= 0");
  const double v = 2.0 * J * std::pow(5.0, s);
  const int n = (r - 1) / 2;
  const double prefactor = 2.0 * J * norm_X;
  if (n == 0) return prefactor;
  if (t == 0.0 || v == 0.0 || prefactor == 0.0) return 0.0;
  return std::exp(std::log(prefactor) + n * std::log(v * t) - std::lgamma(n + 1.0));
}

std::vector<double> lr_time_grid(double v, double vt_min, double vt_max, int points) {
  if (v <= 0.0 || vt_min <= 0.0 || vt_max < vt_min || points < 1) {
    throw DomainError("lr_time_grid: invalid range");
  }
  std::vector<double> times;
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    times.push_back(vt_min * std::pow(vt_max / vt_min, f) / v);
  }
  return times;
}

CommutatorScanner::CommutatorScanner(const SpectralData& spec, const Matrix& X_full,
                                     const Matrix& Y_full)
    : energies_(spec.values) {
  require_full(spec);
  const Matrix& V = spec.vectors;
  x_eig_ = V.adjoint() * X_full * V;
  y_eig_ = V.adjoint() * Y_full * V;
  hermitian_ = is_hermitian(x_eig_, 1e-12) && is_hermitian(y_eig_, 1e-12);
  if (hermitian_) {
    x_eig_ = 0.5 * (x_eig_ + x_eig_.adjoint()).eval();
    y_eig_ = 0.5 * (y_eig_ + y_eig_.adjoint()).eval();
    real_ = is_real_valued(x_eig_) && is_real_valued(y_eig_);
    if (real_) {
      x_real_ = x_eig_.real();
      y_real_ = y_eig_.real();
    }
  }
}

double CommutatorScanner::norm_at(double t) const {
  if (real_) {
    // X(t) = A + iB with A = X o cos, B = X o sin; i[X(t), Y] = i[A, Y] - [B, Y]
    const Index n = x_real_.rows();
    Eigen::MatrixXd a(n, n), b(n, n);
    for (Index c = 0; c < n; ++c)
      for (Index r = 0; r < n; ++r) {
        const double phase = (energies_(r) - energies_(c)) * t;
        a(r, c) = x_real_(r, c) * std::cos(phase);
        b(r, c) = x_real_(r, c) * std::sin(phase);
      }
    const Eigen::MatrixXd p1 = a * y_real_;
    const Eigen::MatrixXd p2 = b * y_real_;
    Matrix m(n, n);
    m.real() = -(p2 + p2.transpose());
    m.imag() = p1 - p1.transpose();
    return hermitian_norm(m);
  }
  const Matrix xt = phase_conjugate(x_eig_, energies_, t);
  if (hermitian_) {
    // [A, B] = P - P^dagger with P = A B; i [A, B] is Hermitian
    const Matrix p = xt * y_eig_;
    return hermitian_norm(cplx(0, 1) * (p - p.adjoint()));
  }
  return operator_norm(xt * y_eig_ - y_eig_ * xt);
}

bool LightConeScan::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const LightConeRow& r) { return r.pass; });
}

Matrix embed_site_operator(const Lattice& lattice, const SiteOperator& op) {
  const TensorSplit split(lattice.num_sites(), lattice.q(), op.support.sites());
  return split.embed(op.op);
}

LightConeScan lr_cone_scan(const Lattice& lattice, const SpectralData& spec, double J,
                           const SiteOperator& X, const SiteOperator& Y,
                           const std::vector<double>& times, double slack) {
  if (!disjoint(X.support, Y.support)) throw DomainError("lr_cone_scan: supports overlap");
  if (operator_norm(X.op) > 1.0 + 1e-12 || operator_norm(Y.op) > 1.0 + 1e-12) {
    throw DomainError("lr_cone_scan: operators must have norm <= 1");
  }
  LightConeScan scan;
  scan.d = region_distance(lattice, X.support, Y.support);
  scan.v = 2.0 * J * std::pow(5.0, lattice.s());
  scan.support_X = X.support.size();
  const CommutatorScanner scanner(spec, embed_site_operator(lattice, X),
                                  embed_site_operator(lattice, Y));
  for (double t : times) {
    LightConeRow row;
    row.t = t;
    row.vt = scan.v * t;
    row.measured = scanner.norm_at(t);
    row.bound = lr_bound_eval(scan.support_X, scan.d, t, J, lattice.s());
    row.pass = row.measured <= row.bound + slack && row.measured <= 2.0 + slack;
    scan.rows.push_back(row);
  }
  return scan;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth) {
  if (b == a) return 0.0;
  struct Cell {
    double a, b, fa, fm, fb, whole;
    int depth;
  };
  auto simpson = [](double a0, double b0, double fa, double fm, double fb) {
    return (b0 - a0) / 6.0 * (fa + 4.0 * fm + fb);
  };
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = simpson(a, b, fa, fm, fb);
  // absolute target from a coarse magnitude estimate
  double scale = std::abs(whole);
  for (int i = 1; i < 8; ++i) scale = std::max(scale, std::abs(f(a + (b - a) * i / 8.0)) * std::abs(b - a));
  const double abs_tol = rel_tol * std::max(scale, 1e-300);

  double total = 0.0;
  std::vector<std::pair<Cell, double>> stack{{{a, b, fa, fm, fb, whole, 0}, abs_tol}};
  while (!stack.empty()) {
    auto [c, tol] = stack.back();
    stack.pop_back();
    const double m = 0.5 * (c.a + c.b);
    const double flm = f(0.5 * (c.a + m));
    const double frm = f(0.5 * (m + c.b));
    const double left = simpson(c.a, m, c.fa, flm, c.fm);
    const double right = simpson(m, c.b, c.fm, frm, c.fb);
    const double delta = left + right - c.whole;
    if (c.depth >= max_depth || std::abs(delta) <= 15.0 * tol) {
      total += left + right + delta / 15.0;
    } else {
      stack.push_back({{c.a, m, c.fa, flm, c.fm, left, c.depth + 1}, 0.5 * tol});
      stack.push_back({{m, c.b, c.fm, frm, c.fb, right, c.depth + 1}, 0.5 * tol});
    }
  }
  return total;
}

Lemma2Report lemma2_check(const Matrix& H, const Matrix& X, const Matrix& Y, double t,
                          double rel_tol) {
  if (!is_hermitian(H) || !is_hermitian(X) || !is_hermitian(Y)) {
    throw DomainError("lemma2_check: inputs must be Hermitian");
  }
  if (t < 0.0) throw DomainError("lemma2_check: need t >= 0");
  const auto eH = eigh(H);
  const auto eHX = eigh(H - X);
  const auto eHY = eigh(H - Y);
  const auto eHXY = eigh(H - X - Y);
  const Matrix first = unitary(eHX, t) * unitary(eH, -t);
  const Matrix second = unitary(eHXY, t) * unitary(eHY, -t);

  Lemma2Report rep;
  rep.lhs = operator_norm(first - second);

  const SpectralData spec{eH.values, eH.vectors, Completeness::full, "H"};
  const CommutatorScanner scanner(spec, X, Y);
  // int_0^t dt2 int_0^t2 dt1 f(t1) = int_0^t (t - t1) f(t1) dt1
  rep.rhs = adaptive_simpson([&](double t1) { return (t - t1) * scanner.norm_at(t1); }, 0.0, t,
                             rel_tol);
  rep.tolerance = rel_tol * std::abs(rep.rhs) + 1e-12;
  rep.pass = rep.lhs <= rep.rhs + rep.tolerance;
  return rep;
}

}  // namespace arealaw
