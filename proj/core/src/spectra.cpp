#include "arealaw/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arealaw/errors.hpp"

namespace arealaw {

namespace {

constexpr double kInvariantTol = 1e-8;

void assert_invariants(const SpectralResiduals& r, double scale, const std::string& source) {
  if (r.residual > kInvariantTol * std::max(scale, 1.0)) {
    throw NumericError("eigen residual " + std::to_string(r.residual) + " too large for " +
                       source);
  }
  if (r.orthonormality > kInvariantTol) {
    throw NumericError("eigenvectors not orthonormal (" + std::to_string(r.orthonormality) +
                       ") for " + source);
  }
}

template <typename Mat>
SpectralResiduals residuals_impl(const Mat& h, const SpectralData& spec) {
  SpectralResiduals r;
  if (spec.size() == 0) return r;
  const Matrix hv = h * spec.vectors;
  const Matrix diff = hv - spec.vectors * spec.values.cast<cplx>().asDiagonal();
  r.residual = diff.colwise().norm().maxCoeff();
  const Matrix gram = spec.vectors.adjoint() * spec.vectors;
  r.orthonormality = max_abs(gram - Matrix::Identity(gram.rows(), gram.cols()));
  return r;
}

}  // namespace

SpectralResiduals spectral_residuals(const Matrix& h, const SpectralData& spec) {
  return residuals_impl(h, spec);
}

SpectralResiduals spectral_residuals(const SparseMatrix& h, const SpectralData& spec) {
  return residuals_impl(h, spec);
}

SpectralData diagonalize(const Matrix& h, std::string source) {
  if (!is_hermitian(h)) throw DomainError("diagonalize: input is not Hermitian");
  auto eig = eigh(h);
  SpectralData out{std::move(eig.values), std::move(eig.vectors), Completeness::full,
                   std::move(source)};
  const double scale =
      out.size() ? std::max(std::abs(out.values(0)), std::abs(out.values(out.size() - 1))) : 0.0;
  assert_invariants(spectral_residuals(h, out), scale, out.source);
  return out;
}

SpectralData diagonalize_lowest(const SparseMatrix& h, int k, std::string source,
                                const KrylovOptions& options) {
  auto eig = lowest_eigenpairs(h, k, options);
  SpectralData out{std::move(eig.values), std::move(eig.vectors), Completeness::lowest_k,
                   std::move(source)};
  const double scale = out.values.cwiseAbs().maxCoeff();
  assert_invariants(spectral_residuals(h, out), scale, out.source);
  return out;
}

SpectralData region_spectrum(const LocalHamiltonian& h, const Region& region, int dense_cap) {
  const auto terms = terms_inside(h, region);
  const Matrix m = assemble(terms, region.sites(), h.lattice().q(), dense_cap);
  return diagonalize(m, "H_" + region.describe());
}

GroundState ground_state(const LocalHamiltonian& h, int max_sites) {
  const Region all = Region::all(h.lattice());
  if (h.lattice().num_sites() > max_sites) {
    throw CapacityError("ground_state: " + std::to_string(h.lattice().num_sites()) +
                        " sites exceed the limit of " + std::to_string(max_sites));
  }
  GroundState gs;
  const Index dim = checked_power(h.lattice().q(), h.lattice().num_sites());
  if (dim <= 256) {
    const auto spec = diagonalize(assemble(h.terms(), all.sites(), h.lattice().q()), "H");
    gs.energy = spec.values(0);
    gs.state = spec.vectors.col(0);
    gs.gap = spec.size() > 1 ? spec.values(1) - spec.values(0) : 0.0;
    return gs;
  }
  const auto spec =
      diagonalize_lowest(assemble_sparse(h.terms(), all.sites(), h.lattice().q()), 2, "H");
  gs.energy = spec.values(0);
  gs.state = spec.vectors.col(0);
  gs.gap = spec.values(1) - spec.values(0);
  return gs;
}

double term_expectation(const LocalHamiltonian& h, const std::vector<LocalTerm>& terms,
                        const Vector& psi) {
  if (terms.empty()) return 0.0;
  const Region all = Region::all(h.lattice());
  const SparseMatrix m = assemble_sparse(terms, all.sites(), h.lattice().q());
  if (psi.size() != m.rows()) throw DomainError("term_expectation: state dimension mismatch");
  return psi.dot(m * psi).real();
}

FrustrationReport frustration_check(const LocalHamiltonian& h, const Region& X,
                                    const Vector& ground, int dense_cap) {
  if (!h.psd_shifted()) {
    throw PreconditionError("frustration_check: terms must be PSD-normalized first");
  }
  FrustrationReport rep;
  rep.X = X;
  const auto inside = terms_inside(h, X);
  rep.e0 = X.empty() ? 0.0
                     : min_eigenvalue(assemble(inside, X.sites(), h.lattice().q(), dense_cap));
  rep.expectation = term_expectation(h, inside, ground);
  rep.window = h.J() * std::pow(3.0, h.lattice().s()) *
               static_cast<double>(boundary(h.lattice(), X).size());
  rep.slack_low = rep.expectation - rep.e0;
  rep.slack_high = rep.e0 + rep.window - rep.expectation;
  rep.pass = rep.slack_low >= -1e-9 && rep.slack_high >= -1e-9;
  return rep;
}

std::optional<Index> dos_count(const SpectralData& spectrum, double e) {
  if (spectrum.size() == 0) throw CoverageError("dos_count: empty spectrum");
  const double tol = 1e-9 * std::max(1.0, std::abs(e));
  if (e + tol < spectrum.values(0)) return std::nullopt;
  if (spectrum.completeness == Completeness::lowest_k &&
      spectrum.values(spectrum.size() - 1) <= e + tol) {
    throw CoverageError("dos_count: the lowest-k spectrum does not extend above e = " +
                        std::to_string(e));
  }
  const auto* begin = spectrum.values.data();
  const auto* end = begin + spectrum.size();
  const auto* it = std::upper_bound(begin, end, e + tol);
  return static_cast<Index>(it - begin) - 1;
}

double assumption2_energy(const LocalHamiltonian& h, std::size_t boundary_size, double e0) {
  const double s = h.lattice().s();
  return 2.0 * h.J() * std::pow(3.0, s) * static_cast<double>(boundary_size) + e0 +
         40.0 * h.lr_velocity();
}

double dos_log_bound(const DosFit& fit, double size_X, double e_minus_e0, double boundary_size) {
  const double exponent = fit.gamma * e_minus_e0 + fit.eta * boundary_size;
  return std::log(fit.c2) + exponent * std::log(fit.tau * size_X);
}

DosFit fit_assumption2(const LocalHamiltonian& h, const std::vector<Region>& regions,
                       const DosFitOptions& options) {
  if (regions.empty()) throw DomainError("fit_assumption2: no regions");
  DosFit fit;
  fit.tau = options.tau;
  for (const auto& X : regions) {
    const auto inside = terms_inside(h, X);
    const RealVector e =
        eigvalsh(assemble(inside, X.sites(), h.lattice().q(), options.dense_cap));
    SpectralData spec{e, Matrix(), Completeness::full, {}};
    DosFitRegion r;
    r.X = X;
    r.e0 = e(0);
    r.boundary = static_cast<Index>(boundary(h.lattice(), X).size());
    r.e = assumption2_energy(h, static_cast<std::size_t>(r.boundary), r.e0);
    r.omega = dos_count(spec, r.e).value_or(0);
    fit.regions.push_back(r);
  }

  std::vector<double> grid{0.0};
  const int decades = static_cast<int>(
      std::lround(std::log10(options.grid_max / options.grid_min) * options.points_per_decade));
  for (int i = 0; i <= decades; ++i) {
    grid.push_back(options.grid_min *
                   std::pow(10.0, static_cast<double>(i) / options.points_per_decade));
  }

  const double log_cap = std::log(options.c2_cap);
  auto holds = [&](double gamma, double eta) {
    for (const auto& r : fit.regions) {
      if (r.omega == 0) continue;
      const double exponent = gamma * (r.e - r.e0) + eta * static_cast<double>(r.boundary);
      const double rhs = log_cap + exponent * std::log(options.tau * static_cast<double>(r.X.size()));
      if (std::log(static_cast<double>(r.omega)) > rhs + 1e-12) return false;
    }
    return true;
  };

  for (double gamma : grid) {
    for (double eta : grid) {
      if (holds(gamma, eta)) {
        fit.found = true;
        fit.gamma = gamma;
        fit.eta = eta;
        break;
      }
    }
    if (fit.found) break;
  }
  if (!fit.found) {
    fit.message = "no (gamma, eta) on the grid satisfies the counting bound with c2 = " +
                  std::to_string(options.c2_cap);
    return fit;
  }

  double log_c2 = -std::numeric_limits<double>::infinity();
  for (const auto& r : fit.regions) {
    if (r.omega == 0) continue;
    const double exponent = fit.gamma * (r.e - r.e0) + fit.eta * static_cast<double>(r.boundary);
    log_c2 = std::max(log_c2, std::log(static_cast<double>(r.omega)) -
                                  exponent * std::log(options.tau * static_cast<double>(r.X.size())));
  }
  fit.c2 = std::isfinite(log_c2) ? std::exp(log_c2) : 1.0;

  fit.worst_slack = std::numeric_limits<double>::infinity();
  for (auto& r : fit.regions) {
    r.log_bound = dos_log_bound(fit, static_cast<double>(r.X.size()), r.e - r.e0,
                                static_cast<double>(r.boundary));
    r.slack = r.omega == 0 ? std::numeric_limits<double>::infinity()
                           : r.log_bound - std::log(static_cast<double>(r.omega));
    fit.worst_slack = std::min(fit.worst_slack, r.slack);
  }
  if (fit.worst_slack < -1e-9) {
    throw NumericError("fit_assumption2: fitted constants violate the bound on a fitted region");
  }
  return fit;
}

LowEnergyState low_energy_superposition(const SpectralData& spec,
                                        const std::vector<cplx>& amplitudes, double E_m) {
  if (static_cast<Index>(amplitudes.size()) > spec.size()) {
    throw CoverageError("low_energy_superposition: amplitudes beyond the available spectrum");
  }
  const double tol = 1e-12 * std::max(1.0, std::abs(E_m));
  double norm2 = 0.0;
  for (std::size_t n = 0; n < amplitudes.size(); ++n) {
    if (amplitudes[n] == cplx(0.0)) continue;
    if (spec.values(static_cast<Index>(n)) > E_m + tol) {
      throw DomainError("low_energy_superposition: amplitude on eigenstate " + std::to_string(n) +
                        " above the ceiling");
    }
    norm2 += std::norm(amplitudes[n]);
  }
  if (norm2 <= 0.0) throw DomainError("low_energy_superposition: all amplitudes vanish");
  LowEnergyState out;
  out.E_m = E_m;
  out.E_0 = spec.values(0);
  out.state = Vector::Zero(spec.dim());
  const double scale = 1.0 / std::sqrt(norm2);
  for (std::size_t n = 0; n < amplitudes.size(); ++n) {
    const cplx a = amplitudes[n] * scale;
    out.amplitudes.push_back(a);
    if (a == cplx(0.0)) continue;
    out.state += a * spec.vectors.col(static_cast<Index>(n));
    out.energy += std::norm(a) * spec.values(static_cast<Index>(n));
  }
  if (out.energy > E_m + tol + 1e-12) {
    throw NumericError("low_energy_superposition: energy above the ceiling");
  }
  return out;
}

Vector single_mode_state(const Lattice& lattice, const Vector& ground, const Matrix& Z,
                         const std::vector<double>& k) {
  if (static_cast<int>(k.size()) != lattice.s()) {
    throw DomainError("single_mode_state: momentum needs one component per axis");
  }
  const int n = lattice.num_sites();
  Vector out = Vector::Zero(ground.size());
  for (Site x = 0; x < n; ++x) {
    const TensorSplit split(n, lattice.q(), {x});
    const Vector zx = split.apply(Z, ground);
    const cplx mean = ground.dot(zx);
    if (std::abs(mean) > 1e-8) {
      throw PreconditionError("single_mode_state: <Z_x> = " + std::to_string(std::abs(mean)) +
                              " at site " + std::to_string(x) + " (must vanish)");
    }
    const Coords c = lattice.coords(x);
    double phase = 0.0;
    for (int a = 0; a < lattice.s(); ++a) phase += c[a] * k[a];
    out += std::polar(1.0, phase) * zx;
  }
  const double norm = out.norm();
  if (norm < 1e-10) throw NumericError("single_mode_state: degenerate ansatz (vanishing vector)");
  return out / norm;
}

}  // namespace arealaw
