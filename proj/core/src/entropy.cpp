#include "arealaw/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "arealaw/errors.hpp"

namespace arealaw {

namespace {

bool is_cube(const Lattice& lattice, const Region& R) {
  if (R.empty()) return false;
  const int s = lattice.s();
  Coords lo = lattice.coords(R.sites().front());
  Coords hi = lo;
  for (Site x : R.sites()) {
    const Coords c = lattice.coords(x);
    for (int i = 0; i < s; ++i) {
      lo[i] = std::min(lo[i], c[i]);
      hi[i] = std::max(hi[i], c[i]);
    }
  }
  std::size_t volume = 1;
  for (int i = 0; i < s; ++i) {
    if (hi[i] - lo[i] != hi[0] - lo[0]) return false;
    volume *= static_cast<std::size_t>(hi[i] - lo[i] + 1);
  }
  return volume == R.size();
}

constexpr double kInf = std::numeric_limits<double>::infinity();

double entropy_term(double p) { return p > 0.0 ? -p * std::log(p) : 0.0; }

}  // namespace

ReducedState reduced_state(const Lattice& lattice, const Vector& state, const Region& R,
                           int dense_cap) {
  if (static_cast<int>(R.size()) > dense_cap) {
    throw CapacityError("reduced_state: region of " + std::to_string(R.size()) +
                        " sites exceeds the dense limit");
  }
  if (std::abs(state.norm() - 1.0) > 1e-10) throw DomainError("reduced_state: state not normalized");
  const TensorSplit split(lattice.num_sites(), lattice.q(), R.sites());
  ReducedState out;
  out.R = R;
  out.rho = split.reduced_density(state);
  RealVector ev = eigvalsh(out.rho);
  std::reverse(ev.data(), ev.data() + ev.size());
  out.eigenvalues = ev;
  if (std::abs(out.rho.trace().real() - 1.0) > 1e-10 || (ev.size() > 0 && ev(ev.size() - 1) < -1e-10)) {
    throw NumericError("reduced_state: density matrix invariants violated");
  }
  return out;
}

double shannon_entropy(const RealVector& p) {
  double s = 0.0;
  for (Index i = 0; i < p.size(); ++i) s += entropy_term(p(i));
  return s;
}

double vn_entropy(const ReducedState& rho) { return shannon_entropy(rho.eigenvalues); }

double result1_leading(const AreaLawConstants& k, double size_R, double boundary_R) {
  return boundary_R * std::pow(10.0 * k.xi * std::log(size_R), k.s) *
         (k.s / k.xi * (k.gamma * k.J * std::pow(3.0, k.s) + k.eta) + std::log(k.q));
}

double result2_leading(const AreaLawConstants& k, double size_R, double boundary_R) {
  return boundary_R * std::log(size_R) *
         (k.gamma * 2.0 * k.J * std::pow(3.0, k.s) + k.eta + 4.0 * k.xi * std::log(k.q));
}

double excited_bound(const AreaLawConstants& k, double size_R, double boundary_R,
                     double excitation) {
  if (excitation < 0.0) throw DomainError("excited_bound: E_m must not lie below E_0");
  const double extra = excitation * std::pow(std::log(k.tau * size_R), 1.0 - k.nu) * k.gamma *
                       k.c1 * std::pow(2.0, k.nu + 3.0) / (k.nu * k.xi);
  return result2_leading(k, size_R, boundary_R) + extra;
}

double simple_c3(const AreaLawConstants& k, double size_R, double boundary_R) {
  return boundary_R * std::log(k.tau * size_R) * (k.J * std::pow(3.0, k.s) * k.gamma + k.eta) +
         std::log(k.c2);
}

double simple_bound(const AreaLawConstants& k, double size_R, double boundary_R) {
  return 2.0 * k.J * std::pow(3.0, k.s) * k.gamma * boundary_R * std::log(k.tau * size_R) +
         2.0 * k.eta * boundary_R + 2.0 * std::log(k.c2) +
         std::numbers::pi * std::numbers::pi / (6.0 * std::numbers::e);
}

double relaxed_bound(double a, double c3) {
  if (!(a > 1.0)) throw DomainError("relaxed_bound: the series needs a > 1");
  // zeta(a) by direct summation with an integral tail estimate
  double zeta = 0.0;
  const long n_max = 100000;
  for (long n = n_max; n >= 1; --n) zeta += std::pow(static_cast<double>(n), -a);
  zeta += std::pow(static_cast<double>(n_max) + 0.5, 1.0 - a) / (a - 1.0);
  return zeta / std::numbers::e + a * c3;
}

SimpleOracle simple_bound_oracle(double c3, long N, double tol) {
  if (N < 1) throw DomainError("simple_bound_oracle: N must be positive");
  if (c3 < 0.0) throw DomainError("simple_bound_oracle: c3 < 0 admits no distribution");
  const auto logs = [&] {
    std::vector<double> l(static_cast<std::size_t>(N));
    for (long n = 1; n <= N; ++n) l[static_cast<std::size_t>(n - 1)] = std::log(static_cast<double>(n));
    return l;
  }();
  // mean of ln n and entropy under mu ~ n^-a
  auto moments = [&](double a, double& mean, double& entropy) {
    double z = 0.0, m = 0.0;
    for (double ln : logs) {
      const double w = std::exp(-a * ln);
      z += w;
      m += w * ln;
    }
    mean = m / z;
    entropy = std::log(z) + a * mean;
  };
  SimpleOracle out;
  double mean = 0.0, entropy = 0.0;
  moments(0.0, mean, entropy);
  if (mean <= c3) {
    out.value = entropy;  // uniform, ln N
    return out;
  }
  out.constraint_active = true;
  if (c3 == 0.0 || N == 1) {
    out.value = 0.0;
    out.a = kInf;
    return out;
  }
  double lo = 0.0, hi = 1.0;
  for (;;) {
    moments(hi, mean, entropy);
    if (mean <= c3) break;
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NumericError("simple_bound_oracle: bracket not found up to a = 1e6");
  }
  while (hi - lo > tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    moments(mid, mean, entropy);
    (mean > c3 ? lo : hi) = mid;
    if (++out.iterations > 400) {
      throw NumericError("simple_bound_oracle: bisection stalled in [" + format_number(lo) + ", " +
                         format_number(hi) + "]");
    }
  }
  out.a = hi;
  moments(hi, mean, entropy);
  out.value = entropy;
  return out;
}

double simplex_grid_oracle(double c3, double h) {
  const double l2 = std::log(2.0), l3 = std::log(3.0);
  auto value = [&](double m2, double m3) {
    const double m1 = 1.0 - m2 - m3;
    if (m1 < 0.0 || m2 < 0.0 || m3 < 0.0 || m2 * l2 + m3 * l3 > c3 + 1e-12) return -kInf;
    return entropy_term(m1) + entropy_term(m2) + entropy_term(m3);
  };
  double best = -kInf;
  const int n = static_cast<int>(std::round(1.0 / h));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) {
      const double v = value(i * h, j * h);
      best = std::max(best, v);
    }
  // the optimum sits on the constraint line (or at the uniform point); scan the line
  // m2 ln 2 + m3 ln 3 = c3 densely, then shrink a bracket around the best point
  const double t_max = std::min(1.0, c3 / l3);
  auto on_line = [&](double m3) { return value((c3 - m3 * l3) / l2, m3); };
  const int samples = 100000;
  double bt = 0.0, bv = -kInf;
  for (int i = 0; i <= samples; ++i) {
    const double t = t_max * i / samples;
    const double v = on_line(t);
    if (v > bv) bv = v, bt = t;
  }
  double lo = std::max(0.0, bt - t_max / samples), hi = std::min(t_max, bt + t_max / samples);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
    if (on_line(a) < on_line(b)) {
      lo = a;
    } else {
      hi = b;
    }
  }
  best = std::max({best, bv, on_line(0.5 * (lo + hi))});
  return best;
}

RealVector mu_coefficients(const Lattice& lattice, const Vector& state, const SpectralData& spec_R,
                           const Region& R) {
  if (spec_R.completeness != Completeness::full) {
    throw CoverageError("mu_coefficients: full spectrum of H_R required");
  }
  const TensorSplit split(lattice.num_sites(), lattice.q(), R.sites());
  const Matrix c = spec_R.vectors.adjoint() * split.to_matrix(state);
  return c.rowwise().squaredNorm();
}

std::vector<InequalityCheck> mu_checks(const Lattice& lattice, const Vector& state,
                                       const SpectralData& spec_R, const Region& R, double J) {
  const RealVector mu = mu_coefficients(lattice, state, spec_R, R);
  const double S = vn_entropy(reduced_state(lattice, state, R, static_cast<int>(R.size())));
  const double S_mu = shannon_entropy(mu);
  const double energy = mu.dot(spec_R.values);
  const double bound = spec_R.ground_energy() +
                       J * std::pow(3.0, lattice.s()) * static_cast<double>(boundary(lattice, R).size());
  return {
      make_check("S(rho_R) <= entropy of mu", S, Relation::less_equal, S_mu, 1e-10),
      make_check("sum mu_n e_n <= e_0 + J 3^s |dR|", energy, Relation::less_equal, bound,
                 1e-9 * std::max(1.0, std::abs(bound))),
  };
}

EntropyBoundReport entropy_report(const Lattice& lattice, const Vector& state, const Region& R,
                                  const AreaLawConstants& k, double excitation, std::string label) {
  EntropyBoundReport rep;
  rep.label = std::move(label);
  rep.R = R;
  rep.constants = k;
  rep.excitation = excitation;
  rep.measured = vn_entropy(reduced_state(lattice, state, R, static_cast<int>(R.size())));
  const double size = static_cast<double>(R.size());
  const double bnd = static_cast<double>(boundary(lattice, R).size());
  rep.cubic = is_cube(lattice, R);
  rep.result1 = result1_leading(k, size, bnd);
  rep.simple = simple_bound(k, size, bnd);
  rep.checks.push_back(make_check("S <= Result 1 leading term", rep.measured, Relation::less_equal,
                                  rep.result1, 1e-12));
  if (rep.cubic) {
    rep.result2 = result2_leading(k, size, bnd);
    rep.excited = excited_bound(k, size, bnd, excitation);
    rep.checks.push_back(make_check(excitation > 0.0 ? "S <= excited-state bound"
                                                     : "S <= Result 2 leading term",
                                    rep.measured, Relation::less_equal,
                                    excitation > 0.0 ? rep.excited : rep.result2, 1e-12));
  }
  rep.checks.push_back(make_check("S <= simple bound", rep.measured, Relation::less_equal,
                                  rep.simple, 1e-12));
  return rep;
}

}  // namespace arealaw
