#pragma once

#include <string>
#include <vector>

#include "arealaw/correlations.hpp"
#include "arealaw/hamiltonian.hpp"
#include "arealaw/lattice.hpp"
#include "arealaw/linalg.hpp"
#include "arealaw/spectra.hpp"

namespace arealaw {

/// psi = sum_n mu_n |alpha_n> (x) |beta_n>, mu non-increasing.
struct SchmidtData {
  RealVector coefficients;
  Matrix left;   // columns on the subsystem factor
  Matrix right;  // columns on the rest
};

/// Schmidt decomposition across the split (subsystem = split's positions).
SchmidtData schmidt(const Vector& psi, const TensorSplit& split);

/// Projector onto the span of reduced vectors on R of low-energy eigenstates of H_X.
struct SupportProjector {
  Region R;
  double threshold = 0.0;
  Matrix basis;  // orthonormal columns on the R factor
  Index rank() const { return basis.cols(); }
  Matrix projector() const { return basis * basis.adjoint(); }
};

/// 2 J 3^s |dX| + e_0 + 40 v, plus E_m - E_0 in excited mode.
double support_threshold(double J, int s, std::size_t boundary_size, double e0, double v,
                         double excitation = 0.0);

/// Collects left Schmidt vectors (coefficient > 1e-12) of every eigenstate of H_X with
/// e_n <= threshold and orthonormalizes them with a relative rank cut of 1e-10.
SupportProjector build_P(const SpectralData& spec_X, const Region& X, const Region& R, int q,
                         double threshold);

struct WeightReport {
  double expectation = 0.0;  // <Psi_0|P|Psi_0>
  double gamma = 0.0;        // Gamma(l, |R|)
  double bound = 0.0;        // 1 - 4 Gamma
  bool pass = false;
  double window_low = 0.0;   // 6 |X|^3 e^-l
  bool window_valid = false; // 1/2 >= Gamma >= 6 |X|^3 e^-l
};

WeightReport weight_check(const Lattice& lattice, const SupportProjector& P, const Vector& ground,
                          const Envelope& envelope, int l, std::size_t size_X);

struct RankReport {
  Index rank = 0;
  double log_bound = 0.0;
  double bound = 0.0;  // may be inf
  bool pass = false;
  bool vacuous = false;  // bound >= q^|R|
  bool within_dimension = false;
};

/// rank P <= q^{|X\R|} c2 (tau |X|)^{|dX| (gamma 2 J 3^s + eta) + gamma 40 v}, in log space.
RankReport rank_check(const SupportProjector& P, const DosFit& fit, int q, int s, double J,
                      std::size_t size_X, std::size_t size_X_minus_R, std::size_t boundary_X);

struct RgBlock {
  SupportProjector P;
};

struct RgReport {
  Index dim_effective = 0;
  std::vector<Index> ranks;
  std::vector<double> expectations;  // <P_b> on the ground state
  std::vector<double> deficits;      // 1 - <P_b>
  double deficit_sum = 0.0;
  double fidelity = 0.0;             // |<W Phi_eff|Psi_0>|^2
  double energy = 0.0;               // E_0
  double energy_effective = 0.0;
};

/// Replaces in-block terms K_x by P K_x P and restricts H to the range of the product of
/// block projectors (identity elsewhere); diagonalizes the result.
RgReport rg_transform(const LocalHamiltonian& h, const std::vector<RgBlock>& blocks,
                      int dense_cap = 12);

}  // namespace arealaw
