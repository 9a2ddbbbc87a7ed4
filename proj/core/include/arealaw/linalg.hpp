#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace arealaw {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;
using Index = Eigen::Index;

/// Eigenvalues in ascending order with matching orthonormal columns.
struct EigenDecomposition {
  RealVector values;
  Matrix vectors;
};

bool is_hermitian(const Matrix& a, double relative_tolerance = 1e-10);
bool is_real_valued(const Matrix& a);
double max_abs(const Matrix& a);

/// Full Hermitian eigendecomposition (LAPACK divide and conquer).
/// Real-valued input takes the real symmetric path.
EigenDecomposition eigh(const Matrix& a);
RealVector eigvalsh(const Matrix& a);

double min_eigenvalue(const Matrix& hermitian);
/// Spectral norm of a Hermitian matrix, max |lambda|.
double hermitian_norm(const Matrix& hermitian);
/// Largest singular value of an arbitrary square or rectangular matrix.
double operator_norm(const Matrix& a);

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

/// Applies f elementwise to the eigenvalues: V f(Lambda) V^dagger.
Matrix spectral_function(const EigenDecomposition& eig,
                         const std::function<cplx(double)>& f);

/// Standard normal cumulative distribution.
double normal_cdf(double x);

using LinearMap = std::function<void(const Vector& in, Vector& out)>;

struct KrylovOptions {
  double tolerance = 1e-10;  // residual, relative to max(1, |largest Ritz value|)
  int max_basis = 0;         // 0 picks max(2k + 24, 48)
  int max_restarts = 400;
  std::uint64_t seed = 0x5eedULL;
};

/// Lowest k eigenpairs of a Hermitian map by thick-restarted Lanczos with
/// full reorthogonalization. Throws ConvergenceError with the iteration count.
EigenDecomposition lowest_eigenpairs(const LinearMap& apply, Index dim, int k,
                                     const KrylovOptions& options = {});
EigenDecomposition lowest_eigenpairs(const SparseMatrix& a, int k,
                                     const KrylovOptions& options = {});

/// Bookkeeping for a tensor-product space of `num_sites` factors of dimension
/// `q`, split into a subsystem A (given by factor positions) and the rest.
/// Factor 0 is the most significant digit of the basis index.
class TensorSplit {
 public:
  TensorSplit(int num_sites, int q, std::vector<int> subsystem_positions);

  Index full_dim() const { return full_dim_; }
  Index dim_a() const { return dim_a_; }
  Index dim_rest() const { return dim_rest_; }
  const std::vector<int>& positions() const { return positions_; }

  /// Full-space index of the product of A-basis state `a` and rest state `r`.
  Index index(Index a, Index r) const { return map_[static_cast<std::size_t>(a * dim_rest_ + r)]; }

  /// psi(b) reshaped as the dim_a x dim_rest coefficient matrix.
  Matrix to_matrix(const Vector& psi) const;
  Vector from_matrix(const Matrix& coefficients) const;

  /// op_a (x) identity_rest as a dense full-space matrix.
  Matrix embed(const Matrix& op_a) const;
  /// (op_a (x) identity_rest) psi without forming the full matrix.
  Vector apply(const Matrix& op_a, const Vector& psi) const;
  /// (op_a (x) identity_rest) m, column by column.
  Matrix apply_rows(const Matrix& op_a, const Matrix& m) const;
  /// Rows of m belonging to rest index r, as a dim_a x cols block.
  Matrix gather(const Matrix& m, Index r) const;
  void scatter(const Matrix& block, Index r, Matrix& m) const;
  /// tr_rest |psi><psi|.
  Matrix reduced_density(const Vector& psi) const;

 private:
  int num_sites_;
  int q_;
  std::vector<int> positions_;
  Index full_dim_;
  Index dim_a_;
  Index dim_rest_;
  std::vector<Index> map_;
};

/// Positions of the (sorted) `subset` inside the (sorted) `basis`.
/// Throws DomainError if an element of subset is missing from basis.
std::vector<int> positions_within(std::span<const int> subset, std::span<const int> basis);

Index checked_power(int base, int exponent);

}  // namespace arealaw
