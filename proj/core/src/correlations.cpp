#include "arealaw/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arealaw/errors.hpp"
#include "arealaw/hamiltonian.hpp"

namespace arealaw {

namespace {

/// All q = 2 Pauli strings on k sites except the identity string.
std::vector<Matrix> pauli_strings(int k) {
  const std::vector<Matrix> single{Matrix::Identity(2, 2), pauli_x(), pauli_y(), pauli_z()};
  std::vector<Matrix> out{Matrix::Identity(1, 1)};
  for (int i = 0; i < k; ++i) {
    std::vector<Matrix> next;
    next.reserve(out.size() * 4);
    for (const auto& a : out)
      for (const auto& p : single) next.push_back(kron(a, p));
    out = std::move(next);
  }
  out.erase(out.begin());
  return out;
}

double cell_maximum(const Lattice& lattice, const Vector& state, const Region& X,
                    const Region& Y, const std::vector<Matrix>& strings) {
  const Region XY = set_union(lattice, X, Y);
  const TensorSplit split(lattice.num_sites(), lattice.q(), XY.sites());
  const Matrix rho = split.reduced_density(state);
  const Index dx = checked_power(lattice.q(), static_cast<int>(X.size()));
  const Index dy = checked_power(lattice.q(), static_cast<int>(Y.size()));

  // X precedes Y in site order, so rho is on (X)(Y) with X most significant
  Matrix rho_x = Matrix::Zero(dx, dx);
  Matrix rho_y = Matrix::Zero(dy, dy);
  for (Index a = 0; a < dx; ++a)
    for (Index b = 0; b < dx; ++b)
      for (Index c = 0; c < dy; ++c) rho_x(a, b) += rho(a * dy + c, b * dy + c);
  for (Index c = 0; c < dy; ++c)
    for (Index d = 0; d < dy; ++d)
      for (Index a = 0; a < dx; ++a) rho_y(c, d) += rho(a * dy + c, a * dy + d);
  const Matrix C = rho - kron(rho_x, rho_y);

  double best = 0.0;
  for (const auto& px : strings) {
    // B = tr_X[C (px (x) I)]
    Matrix B = Matrix::Zero(dy, dy);
    for (Index a = 0; a < dx; ++a)
      for (Index b = 0; b < dx; ++b) {
        const cplx w = px(b, a);
        if (w == cplx(0.0)) continue;
        B += w * C.block(a * dy, b * dy, dy, dy);
      }
    for (const auto& py : strings) {
      const double v = std::abs((B * py).trace());
      best = std::max(best, v);
    }
  }
  return best;
}

}  // namespace

CorrelationValue connected_correlation(const Lattice& lattice, const Vector& state,
                                       const SiteOperator& X, const SiteOperator& Y) {
  if (!disjoint(X.support, Y.support)) {
    throw DomainError("connected_correlation: supports overlap");
  }
  CorrelationValue out;
  Matrix x = X.op;
  Matrix y = Y.op;
  const double nx = operator_norm(x);
  const double ny = operator_norm(y);
  if (nx > 1.0 + 1e-12) {
    x /= nx;
    out.normalized = true;
  }
  if (ny > 1.0 + 1e-12) {
    y /= ny;
    out.normalized = true;
  }
  const TensorSplit sx(lattice.num_sites(), lattice.q(), X.support.sites());
  const TensorSplit sy(lattice.num_sites(), lattice.q(), Y.support.sites());
  const Vector y_psi = sy.apply(y, state);
  const Vector x_psi = sx.apply(x.adjoint(), state);
  const cplx xy = x_psi.dot(y_psi);
  const cplx ex = state.dot(sx.apply(x, state));
  const cplx ey = state.dot(y_psi);
  out.value = std::abs(xy - ex * ey);
  return out;
}

GapClustering gap_clustering_params(double J, int s, double gap) {
  if (!(gap > 0.0)) throw DomainError("gap_clustering_params: gap must be positive");
  GapClustering g;
  g.v = 2.0 * J * std::pow(5.0, s);
  g.xi = 10.0 * g.v / gap;
  return g;
}

std::string to_string(EnvelopeMode mode) {
  return mode == EnvelopeMode::exponential ? "exponential" : "polynomial";
}

EnvelopeMode parse_envelope_mode(const std::string& name) {
  if (name == "exponential") return EnvelopeMode::exponential;
  if (name == "polynomial") return EnvelopeMode::polynomial;
  throw ConfigError("unknown envelope mode '" + name + "'");
}

Envelope::Envelope(EnvelopeMode mode_, double c1_, double xi_, double nu_, int s_)
    : mode(mode_), c1(c1_), xi(xi_), nu(nu_), s(s_) {
  if (!(c1 >= 0.0) || !(xi > 0.0)) throw ParameterError("Envelope: need c1 >= 0 and xi > 0");
  if (mode == EnvelopeMode::polynomial && !(nu > s)) {
    throw ParameterError("Envelope: polynomial decay needs nu > s");
  }
}

double gamma_eval(const Envelope& env, double l, double size) {
  if (size < 1.0) throw DomainError("gamma_eval: support size must be at least 1");
  if (env.mode == EnvelopeMode::exponential) return env.c1 * size * std::exp(-l / env.xi);
  if (!(env.nu > env.s)) throw ParameterError("gamma_eval: polynomial decay needs nu > s");
  const double denom = l - env.xi * std::log(size);
  if (!(denom > 0.0)) {
    throw DomainError("gamma_eval: l must exceed xi ln|X| in polynomial mode");
  }
  return env.c1 / std::pow(denom, env.nu);
}

std::vector<CorrelationSample> measure_decay(const Lattice& lattice, const Vector& state,
                                             const DecayOptions& options) {
  if (lattice.s() != 1) throw DomainError("measure_decay: chains only");
  if (lattice.q() != 2) throw DomainError("measure_decay: Pauli family needs q = 2");
  const int n = lattice.num_sites();
  std::vector<CorrelationSample> out;
  for (int k : options.sizes) {
    if (k < 1) throw DomainError("measure_decay: support size must be positive");
    const auto strings = pauli_strings(k);
    const int max_sep = n - 2 * k + 1;
    std::vector<int> seps = options.separations;
    if (seps.empty())
      for (int d = 1; d <= max_sep; ++d) seps.push_back(d);
    for (int d : seps) {
      if (d < 1 || d > max_sep) {
        throw DomainError("measure_decay: separation " + std::to_string(d) + " with size " +
                          std::to_string(k) + " does not fit; feasible separations are 1.." +
                          std::to_string(max_sep));
      }
      CorrelationSample sample;
      sample.l = d;
      sample.support = k;
      // Y starts d sites after the last site of X
      for (int x0 = 0; x0 + 2 * k - 1 + d - 1 < n; ++x0) {
        const Region X = Region::interval(lattice, x0, x0 + k - 1);
        const int y0 = x0 + k - 1 + d;
        const Region Y = Region::interval(lattice, y0, y0 + k - 1);
        // wraparound can shorten the distance on a ring
        if (x0 == 0) sample.l = region_distance(lattice, X, Y);
        sample.measured = std::max(sample.measured, cell_maximum(lattice, state, X, Y, strings));
      }
      out.push_back(sample);
    }
  }
  return out;
}

bool envelope_dominates(const Envelope& env, const std::vector<CorrelationSample>& samples) {
  return std::all_of(samples.begin(), samples.end(), [&](const CorrelationSample& c) {
    return gamma_eval(env, c.l, c.support) >= c.measured;
  });
}

CorrelationProfile fit_envelope(const std::vector<CorrelationSample>& samples, int s,
                                const DecayOptions& options) {
  CorrelationProfile prof;
  prof.samples = samples;
  if (samples.empty()) {
    prof.message = "no samples";
    return prof;
  }
  const double inflate = 1.0 + 1e-12;

  std::vector<double> xis;
  for (int i = 0; i < options.xi_points; ++i) {
    const double f = options.xi_points == 1 ? 0.0 : static_cast<double>(i) / (options.xi_points - 1);
    xis.push_back(options.xi_min * std::pow(options.xi_max / options.xi_min, f));
  }
  std::vector<double> nus{0.0};
  if (options.mode == EnvelopeMode::polynomial) {
    nus.clear();
    for (int i = 1; i <= options.nu_points; ++i) nus.push_back(s + i * options.nu_step);
  }

  double best = std::numeric_limits<double>::infinity();
  for (double xi : xis) {
    if (options.mode == EnvelopeMode::polynomial) {
      bool ok = true;
      for (const auto& c : samples)
        if (!(c.l - xi * std::log(static_cast<double>(c.support)) > 0.0)) ok = false;
      if (!ok) continue;
    }
    for (double nu : nus) {
      const Envelope unit(options.mode, 1.0, xi, nu, s);
      double c1 = 0.0;
      for (const auto& c : samples) {
        const double g = gamma_eval(unit, c.l, c.support);
        if (g <= 0.0) {
          c1 = std::numeric_limits<double>::infinity();
          break;
        }
        c1 = std::max(c1, c.measured / g);
      }
      if (!std::isfinite(c1)) continue;
      c1 *= inflate;
      double objective = 0.0;
      for (const auto& c : samples) {
        if (c.measured <= options.floor) continue;
        objective += std::log(c1 * gamma_eval(unit, c.l, c.support) / c.measured);
      }
      if (objective < best) {
        best = objective;
        prof.found = true;
        prof.envelope = Envelope(options.mode, c1, xi, nu, s);
        prof.objective = objective;
      }
    }
  }
  if (!prof.found) {
    prof.message = options.mode == EnvelopeMode::polynomial
                       ? "polynomial envelope with nu > s not found on this instance"
                       : "exponential envelope not found on this instance";
  } else if (!envelope_dominates(prof.envelope, samples)) {
    throw NumericError("fit_envelope: fitted envelope fails to dominate a sample");
  }
  return prof;
}

CorrelationProfile decay_profile(const Lattice& lattice, const Vector& state,
                                 const DecayOptions& options) {
  return fit_envelope(measure_decay(lattice, state, options), lattice.s(), options);
}

}  // namespace arealaw
