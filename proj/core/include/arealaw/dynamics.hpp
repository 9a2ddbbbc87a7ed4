#pragma once

#include <functional>
#include <vector>

#include "arealaw/lattice.hpp"
#include "arealaw/linalg.hpp"
#include "arealaw/spectra.hpp"

namespace arealaw {

/// e^{iHt} X e^{-iHt} from a full spectrum of H.
Matrix heisenberg_evolve(const Matrix& X, const SpectralData& spec, double t);

/// 2 |X| (vt)^floor(d/2) / floor(d/2)!, v = 2 J 5^s, evaluated in log space.
double lr_bound_eval(std::size_t support_size, int d, double t, double J, int s);

/// 2 J ||X|| (vt)^floor((r-1)/2) / floor((r-1)/2)! for r >= 2.
double lr_recursive_bound(int r, double t, double J, int s, double norm_X);

/// Log-spaced times with v t spanning [vt_min, vt_max].
std::vector<double> lr_time_grid(double v, double vt_min, double vt_max, int points = 20);

/// Operator on a set of lattice sites (factor order = sorted site order).
struct SiteOperator {
  Region support;
  Matrix op;
};

/// Commutator norms ||[X(t), Y]|| for a fixed pair, evaluated in the eigenbasis
/// of H (elementwise phases, eigenvalue-only norm).
class CommutatorScanner {
 public:
  CommutatorScanner(const SpectralData& spec, const Matrix& X_full, const Matrix& Y_full);
  double norm_at(double t) const;

 private:
  RealVector energies_;
  Matrix x_eig_;
  Matrix y_eig_;
  bool hermitian_;
  // real symmetric copies when H, X and Y are all real
  bool real_ = false;
  Eigen::MatrixXd x_real_;
  Eigen::MatrixXd y_real_;
};

struct LightConeRow {
  double t = 0.0;
  double vt = 0.0;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct LightConeScan {
  int d = 0;
  double v = 0.0;
  std::size_t support_X = 0;
  std::vector<LightConeRow> rows;
  bool all_pass() const;
};

/// Measured commutator norm against the Lieb-Robinson bound on every grid time.
/// Requires disjoint supports and ||X||, ||Y|| <= 1.
LightConeScan lr_cone_scan(const Lattice& lattice, const SpectralData& spec, double J,
                           const SiteOperator& X, const SiteOperator& Y,
                           const std::vector<double>& times, double slack = 1e-9);

/// Embeds a site operator into the full lattice space.
Matrix embed_site_operator(const Lattice& lattice, const SiteOperator& op);

struct Lemma2Report {
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// ||e^{i(H-X)t}e^{-iHt} - e^{i(H-X-Y)t}e^{-i(H-Y)t}|| against
/// int_0^t dt2 int_0^t2 dt1 ||[X(t1), Y]||.
Lemma2Report lemma2_check(const Matrix& H, const Matrix& X, const Matrix& Y, double t,
                          double rel_tol = 1e-6);

/// Adaptive Simpson quadrature on [a, b] with relative tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth = 40);

}  // namespace arealaw
