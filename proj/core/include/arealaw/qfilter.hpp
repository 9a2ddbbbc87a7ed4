#pragma once

#include <string>
#include <vector>

#include "arealaw/checks.hpp"
#include "arealaw/hamiltonian.hpp"
#include "arealaw/lattice.hpp"
#include "arealaw/linalg.hpp"
#include "arealaw/spectra.hpp"

namespace arealaw {

/// How the softness sigma is chosen.
///  lieb_robinson: sigma = 10^4 v^2 / l (the filter's defining choice).
///  gaussian_tail: sigma = delta^2 / (2 l), so that exp(-delta^2 / 2 sigma) = e^-l,
///                 the hypothesis behind the M- / M / M+ sandwich.
enum class SigmaRule { lieb_robinson, gaussian_tail };

std::string to_string(SigmaRule rule);

struct FilterSpec {
  Region X;
  Region S;  // shell of X with width l
  int l = 5;
  double e_cut = 0.0;
  double sigma = 1.0;
  double delta = 0.0;
  double e_ref = 0.0;  // reference global energy (E_0, or E_n / E_m for excited filtering)
  double v = 0.0;
  SigmaRule rule = SigmaRule::lieb_robinson;
};

/// 2 J 3^s |dX| + e_0 + 20 v, plus E_m - E_0 in excited mode.
double assign_ecut(double J, int s, std::size_t boundary_size, double e0, double v,
                   double excitation = 0.0);

double filter_sigma(double v, int l, SigmaRule rule, double delta);

/// delta = 20 v, sigma from the rule, shell of width l.
FilterSpec make_filter_spec(const Lattice& lattice, const Region& X, int l, double e_cut,
                            double v, double e_ref, SigmaRule rule = SigmaRule::lieb_robinson);

/// M and M+- on the X factor, diagonal in the eigenbasis of H_X.
struct MOperators {
  Matrix M, M_minus, M_plus;
  RealVector coefficient;  // Phi((e_cut - e_n) / sqrt(sigma))
  RealVector minus;        // 1 if e_n <= e_cut - delta
  RealVector plus;         // 1 if e_n <= e_cut + delta
};

MOperators build_M(const FilterSpec& spec, const SpectralData& spec_X);

/// W = Q V for an outer region B with inner subregion A:
/// column n is sum_m Phi((a - e_m + E_n) / sqrt(sigma)) (Pi_m (x) I) |V_n>.
Matrix filter_action(const SpectralData& inner, const SpectralData& outer,
                     const TensorSplit& split, double a, double sigma);

/// Closed form of the filter on the whole lattice from full spectra of H and H_X.
Matrix build_Q_spectral(const FilterSpec& spec, const SpectralData& spec_H,
                        const SpectralData& spec_X, const Lattice& lattice);

struct QuadratureOptions {
  double T = 0.0;         // 0 picks 8 / sqrt(sigma)
  double dt = 0.0;        // 0 picks min(0.05 / ||H||, T / 2000)
  double epsilon = 1e-6;  // principal-value exclusion radius, relative to T
};

struct QuadratureResult {
  Matrix Q;
  double T = 0.0;
  double dt = 0.0;
  int steps = 0;
};

/// Time-integral representation: Q = I/2 + int_0^T h(t) dt by the trapezoid rule,
/// h(t) = (i / 2 pi) e^{-sigma t^2 / 2} (g(t) - g(-t)) / t, g(t) = e^{-iat} e^{iH_X t} e^{-iHt}.
QuadratureResult build_Q_quadrature(const FilterSpec& spec, const SpectralData& spec_H,
                                    const SpectralData& spec_X, const Lattice& lattice,
                                    const QuadratureOptions& options = {});

/// Throws NumericError when ||Q_quad - Q_spec|| > tolerance; returns the distance.
double check_quadrature(const Matrix& Q_quad, const Matrix& Q_spec, double tolerance = 5e-3);

/// The shell-and-exterior filter, embedded with identity on the bulk X \ S.
Matrix build_Qtilde(const FilterSpec& spec, const LocalHamiltonian& h,
                    int dense_cap = kDefaultDenseCap);
Matrix build_Qtilde(const FilterSpec& spec, const SpectralData& spec_S,
                    const SpectralData& spec_outer, const Lattice& lattice);

struct FilterOperators {
  FilterSpec spec;
  MOperators M;
  Matrix Q;
  Matrix Qtilde;
  std::string path = "spectral";
};

FilterOperators build_filter(const FilterSpec& spec, const LocalHamiltonian& h,
                             const SpectralData& spec_H, const SpectralData& spec_X,
                             int dense_cap = kDefaultDenseCap);

/// ||Q - Q~|| against |X|^3 e^-l; vacuous when the bound reaches 2.
InequalityCheck lemma1_check(const Matrix& Q, const Matrix& Qtilde, std::size_t size_X, int l);

struct Lemma3Inputs {
  const FilterOperators* filter = nullptr;
  const SpectralData* spec_X = nullptr;
  const Lattice* lattice = nullptr;
  const Vector* ground = nullptr;  // global ground state
  double expectation_HX = 0.0;     // <Psi_0|H_X|Psi_0>
  Region R;                        // support of P
  const Matrix* P = nullptr;       // projector on the R factor
  double P_threshold = 0.0;        // energy used to build P
};

/// The expectation bounds and operator inequalities behind the support bound.
std::vector<InequalityCheck> lemma3_check(const Lemma3Inputs& in);

/// ||Q|Psi_n> - M'|Psi_n>|| where M' is built with the shifted cut e_cut - E_ref + E_n.
double step_profile_error(const Matrix& Q, const FilterSpec& spec, const SpectralData& spec_H,
                          const SpectralData& spec_X, const Lattice& lattice, Index n);

}  // namespace arealaw
