#pragma once

#include <string>
#include <vector>

#include "arealaw/checks.hpp"
#include "arealaw/lattice.hpp"
#include "arealaw/linalg.hpp"
#include "arealaw/spectra.hpp"

namespace arealaw {

struct ReducedState {
  Region R;
  Matrix rho;
  RealVector eigenvalues;  // descending
};

/// tr_{L\R} |psi><psi|; asserts unit trace and positivity within 1e-10.
ReducedState reduced_state(const Lattice& lattice, const Vector& state, const Region& R,
                           int dense_cap = 12);

/// -sum lambda ln lambda with 0 ln 0 = 0.
double vn_entropy(const ReducedState& rho);
double shannon_entropy(const RealVector& p);

/// Constants shared by the entropy bounds.
struct AreaLawConstants {
  double c1 = 1.0;
  double xi = 1.0;
  double nu = 2.0;
  double gamma = 0.0;
  double eta = 0.0;
  double tau = 1.0;
  double c2 = 1.0;
  int q = 2;
  double J = 1.0;
  int s = 1;
};

/// |dR| (10 xi ln|R|)^s [ (s/xi)(gamma J 3^s + eta) + ln q ]
double result1_leading(const AreaLawConstants& k, double size_R, double boundary_R);
/// |dR| ln|R| (gamma 2 J 3^s + eta + 4 xi ln q)
double result2_leading(const AreaLawConstants& k, double size_R, double boundary_R);

/// Result 2 plus (E_m - E_0) (ln tau|R|)^{1-nu} gamma c1 2^{nu+3} / (nu xi).
double excited_bound(const AreaLawConstants& k, double size_R, double boundary_R,
                     double excitation);

/// c3 = |dR| ln(tau|R|) (J 3^s gamma + eta) + ln c2.
double simple_c3(const AreaLawConstants& k, double size_R, double boundary_R);

/// 2 J 3^s gamma |dR| ln(tau|R|) + 2 eta |dR| + 2 ln c2 + pi^2/(6e), as printed.
double simple_bound(const AreaLawConstants& k, double size_R, double boundary_R);

/// sum_{n>=1} n^-a / e + a c3 for a > 1 (the relaxed stationary value).
double relaxed_bound(double a, double c3);

/// Maximum of -sum mu ln mu over distributions on {1..N} with sum mu_n ln n <= c3.
/// mu_n is proportional to n^-a with a found by bisection when the constraint binds.
struct SimpleOracle {
  double value = 0.0;
  double a = 0.0;
  int iterations = 0;
  bool constraint_active = false;
};
SimpleOracle simple_bound_oracle(double c3, long N, double tol = 1e-13);

/// Dense grid search over the 2-simplex (N = 3) plus a dense scan of the constraint line.
double simplex_grid_oracle(double c3, double h = 1e-3);

/// Weights mu_n = ||(<psi_n| (x) I)|Psi>||^2 against the eigenbasis of H_R.
RealVector mu_coefficients(const Lattice& lattice, const Vector& state, const SpectralData& spec_R,
                           const Region& R);

/// Entropy of the mu-coefficients dominates S(rho_R), and sum mu_n e_n <= e_0 + J 3^s |dR|.
std::vector<InequalityCheck> mu_checks(const Lattice& lattice, const Vector& state,
                                       const SpectralData& spec_R, const Region& R, double J);

struct EntropyBoundReport {
  std::string label;
  Region R;
  double measured = 0.0;
  double result1 = 0.0;
  double result2 = 0.0;
  bool cubic = false;
  double simple = 0.0;
  double excited = 0.0;
  double excitation = 0.0;
  AreaLawConstants constants;
  std::vector<InequalityCheck> checks;
};

/// Measured entropy of R in `state` beside the closed-form bounds with constants k.
EntropyBoundReport entropy_report(const Lattice& lattice, const Vector& state, const Region& R,
                                  const AreaLawConstants& k, double excitation = 0.0,
                                  std::string label = {});

}  // namespace arealaw
