#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arealaw/hamiltonian.hpp"
#include "arealaw/linalg.hpp"

namespace arealaw {

enum class Completeness { full, lowest_k };

struct SpectralData {
  RealVector values;  // ascending
  Matrix vectors;     // orthonormal columns
  Completeness completeness = Completeness::full;
  std::string source;

  Index size() const { return values.size(); }
  Index dim() const { return vectors.rows(); }
  double ground_energy() const { return values(0); }
};

/// Full dense diagonalization; asserts residual and orthonormality invariants.
SpectralData diagonalize(const Matrix& h, std::string source = {});
/// Lowest k eigenpairs by restarted Krylov iteration.
SpectralData diagonalize_lowest(const SparseMatrix& h, int k, std::string source = {},
                                const KrylovOptions& options = {});

/// max_n ||H v_n - l_n v_n|| and max |V^dagger V - I|.
struct SpectralResiduals {
  double residual = 0.0;
  double orthonormality = 0.0;
};
SpectralResiduals spectral_residuals(const Matrix& h, const SpectralData& spec);
SpectralResiduals spectral_residuals(const SparseMatrix& h, const SpectralData& spec);

/// Full spectrum of H_region (terms fully inside the region) on the region's sites.
SpectralData region_spectrum(const LocalHamiltonian& h, const Region& region,
                             int dense_cap = kDefaultDenseCap);

/// Global ground state and first excitation, dense for small lattices and
/// Krylov otherwise.
struct GroundState {
  double energy = 0.0;
  Vector state;
  double gap = 0.0;  // E_1 - E_0
};
GroundState ground_state(const LocalHamiltonian& h, int max_sites = 20);

/// Expectation <psi| H_terms |psi> with the terms embedded in the whole lattice.
double term_expectation(const LocalHamiltonian& h, const std::vector<LocalTerm>& terms,
                        const Vector& psi);

struct FrustrationReport {
  Region X;
  double expectation = 0.0;  // <Psi_0|H_X|Psi_0>
  double e0 = 0.0;           // lowest eigenvalue of H_X
  double window = 0.0;       // J 3^s |dX|
  double slack_low = 0.0;    // <H_X> - e0
  double slack_high = 0.0;   // e0 + window - <H_X>
  bool pass = false;
};

/// e_0 <= <H_X> <= e_0 + J 3^s |dX| on the global ground state (1e-9 slack).
FrustrationReport frustration_check(const LocalHamiltonian& h, const Region& X,
                                    const Vector& ground, int dense_cap = kDefaultDenseCap);

/// Largest 0-based index n with e_n <= e; nullopt when e < e_0.
std::optional<Index> dos_count(const SpectralData& spectrum, double e);

struct DosFitRegion {
  Region X;
  double e = 0.0;        // evaluation energy
  double e0 = 0.0;
  Index omega = 0;       // dos_count at e
  Index boundary = 0;    // |dX|
  double log_bound = 0.0;
  double slack = 0.0;    // log(bound) - log(omega), in nats
};

struct DosFit {
  bool found = false;
  double c2 = 1.0;
  double tau = 1.0;
  double gamma = 0.0;
  double eta = 0.0;
  std::vector<DosFitRegion> regions;
  double worst_slack = 0.0;
  std::string message;
};

struct DosFitOptions {
  double tau = 1.0;
  double c2_cap = 1.0;  // (gamma, eta) are chosen so that c2 = c2_cap suffices
  int points_per_decade = 10;
  double grid_min = 1e-6;
  double grid_max = 1e3;
  int dense_cap = 12;
};

/// Evaluation energy 2 J 3^s |dX| + e_0 + 40 v.
double assumption2_energy(const LocalHamiltonian& h, std::size_t boundary_size, double e0);

/// Fits c2, gamma, eta (tau fixed) so that Omega(e) <= c2 (tau |X|)^(gamma (e - e0) + eta |dX|)
/// holds on every region at the assumption-2 energy.
DosFit fit_assumption2(const LocalHamiltonian& h, const std::vector<Region>& regions,
                       const DosFitOptions& options = {});

/// log of c2 (tau |X|)^(gamma (e - e0) + eta |dX|).
double dos_log_bound(const DosFit& fit, double size_X, double e_minus_e0, double boundary_size);

struct LowEnergyState {
  Vector state;
  std::vector<cplx> amplitudes;  // normalized, indexed by eigenstate
  double E_m = 0.0;
  double E_0 = 0.0;
  double energy = 0.0;  // <Phi|H|Phi>
  double excitation() const { return E_m - E_0; }
};

/// Normalized superposition of eigenstates with E_n <= E_m.
LowEnergyState low_energy_superposition(const SpectralData& spec,
                                        const std::vector<cplx>& amplitudes, double E_m);

/// Normalized sum_x exp(i x.k) Z_x |Psi_0>.
Vector single_mode_state(const Lattice& lattice, const Vector& ground, const Matrix& Z,
                         const std::vector<double>& k);

}  // namespace arealaw
