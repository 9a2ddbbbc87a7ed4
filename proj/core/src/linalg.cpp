#include "arealaw/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <lapacke.h>

#include "arealaw/errors.hpp"

namespace arealaw {

namespace {

lapack_complex_double* as_lapack(cplx* p) { return reinterpret_cast<lapack_complex_double*>(p); }

void check_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) throw DomainError(std::string(what) + ": matrix is not square");
}

void check_info(lapack_int info, const char* routine) {
  if (info != 0) {
    throw NumericError(std::string(routine) + " failed with info=" + std::to_string(info));
  }
}

Vector random_vector(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = cplx(gauss(rng), gauss(rng));
  return v;
}

}  // namespace

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

bool is_hermitian(const Matrix& a, double relative_tolerance) {
  if (a.rows() != a.cols()) return false;
  const double scale = max_abs(a);
  if (scale == 0.0) return true;
  return max_abs(a - a.adjoint()) <= relative_tolerance * scale;
}

bool is_real_valued(const Matrix& a) {
  return a.size() == 0 || a.imag().cwiseAbs().maxCoeff() == 0.0;
}

EigenDecomposition eigh(const Matrix& a) {
  check_square(a, "eigh");
  const auto n = static_cast<lapack_int>(a.rows());
  EigenDecomposition out;
  out.values.resize(n);
  if (n == 0) return out;
  if (is_real_valued(a)) {
    Eigen::MatrixXd work = 0.5 * (a.real() + a.real().transpose());
    check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, work.data(), n, out.values.data()),
               "dsyevd");
    out.vectors = work.cast<cplx>();
  } else {
    out.vectors = 0.5 * (a + a.adjoint());
    check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, as_lapack(out.vectors.data()), n,
                              out.values.data()),
               "zheevd");
  }
  return out;
}

RealVector eigvalsh(const Matrix& a) {
  check_square(a, "eigvalsh");
  const auto n = static_cast<lapack_int>(a.rows());
  RealVector values(n);
  if (n == 0) return values;
  if (is_real_valued(a)) {
    Eigen::MatrixXd work = 0.5 * (a.real() + a.real().transpose());
    check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, values.data()),
               "dsyevd");
  } else {
    Matrix work = 0.5 * (a + a.adjoint());
    check_info(
        LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, as_lapack(work.data()), n, values.data()),
        "zheevd");
  }
  return values;
}

double min_eigenvalue(const Matrix& hermitian) {
  if (hermitian.size() == 0) return 0.0;
  return eigvalsh(hermitian)(0);
}

double hermitian_norm(const Matrix& hermitian) {
  if (hermitian.size() == 0) return 0.0;
  const RealVector v = eigvalsh(hermitian);
  return std::max(std::abs(v(0)), std::abs(v(v.size() - 1)));
}

double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == a.cols() && is_hermitian(a, 0.0)) return hermitian_norm(a);
  const auto m = static_cast<lapack_int>(a.rows());
  const auto n = static_cast<lapack_int>(a.cols());
  RealVector s(std::min(m, n));
  if (is_real_valued(a)) {
    Eigen::MatrixXd work = a.real();
    check_info(LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m, s.data(), nullptr, 1,
                              nullptr, 1),
               "dgesdd");
  } else {
    Matrix work = a;
    check_info(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, as_lapack(work.data()), m, s.data(),
                              nullptr, 1, nullptr, 1),
               "zgesdd");
  }
  return s.size() == 0 ? 0.0 : s.maxCoeff();
}

Matrix spectral_function(const EigenDecomposition& eig, const std::function<cplx(double)>& f) {
  Vector diag(eig.values.size());
  for (Index i = 0; i < diag.size(); ++i) diag(i) = f(eig.values(i));
  return eig.vectors * diag.asDiagonal() * eig.vectors.adjoint();
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

EigenDecomposition lowest_eigenpairs(const LinearMap& apply, Index dim, int k,
                                     const KrylovOptions& options) {
  if (k <= 0 || k > dim) {
    throw ParameterError("lowest_eigenpairs: k=" + std::to_string(k) + " outside [1, " +
                         std::to_string(dim) + "]");
  }
  const int max_basis =
      options.max_basis > 0 ? options.max_basis : std::max(2 * k + 24, 48);

  if (dim <= 256 || max_basis * 2 >= dim) {
    Matrix dense(dim, dim);
    Vector unit = Vector::Zero(dim);
    Vector col(dim);
    for (Index j = 0; j < dim; ++j) {
      unit(j) = 1.0;
      apply(unit, col);
      dense.col(j) = col;
      unit(j) = 0.0;
    }
    auto full = eigh(0.5 * (dense + dense.adjoint()));
    return {full.values.head(k), full.vectors.leftCols(k)};
  }

  std::mt19937_64 rng(options.seed);
  Matrix basis(dim, max_basis);
  Matrix images(dim, max_basis);
  int m = 0;
  long matvecs = 0;
  Vector next = random_vector(dim, rng);
  Vector image(dim);

  for (int restart = 0;; ++restart) {
    while (m < max_basis) {
      const double before = next.norm();
      for (int pass = 0; pass < 2 && m > 0; ++pass) {
        next -= basis.leftCols(m) * (basis.leftCols(m).adjoint() * next);
      }
      double norm = next.norm();
      if (!(norm > 1e-12 * std::max(before, 1e-300))) {
        // invariant subspace reached; continue with a fresh direction
        next = random_vector(dim, rng);
        for (int pass = 0; pass < 2 && m > 0; ++pass) {
          next -= basis.leftCols(m) * (basis.leftCols(m).adjoint() * next);
        }
        norm = next.norm();
      }
      basis.col(m) = next / norm;
      apply(basis.col(m), image);
      ++matvecs;
      images.col(m) = image;
      next = image;
      ++m;
    }

    Matrix projected = basis.leftCols(m).adjoint() * images.leftCols(m);
    projected = 0.5 * (projected + projected.adjoint()).eval();
    const EigenDecomposition ritz = eigh(projected);
    const Matrix coeffs = ritz.vectors.leftCols(k);
    const Matrix vectors = basis.leftCols(m) * coeffs;
    const Matrix mapped = images.leftCols(m) * coeffs;
    const double scale = std::max(1.0, ritz.values.cwiseAbs().maxCoeff());

    int first_unconverged = -1;
    for (int i = 0; i < k; ++i) {
      const double r = (mapped.col(i) - ritz.values(i) * vectors.col(i)).norm();
      if (r > options.tolerance * scale) {
        first_unconverged = i;
        break;
      }
    }
    if (first_unconverged < 0) return {ritz.values.head(k), vectors};

    if (restart >= options.max_restarts) {
      throw ConvergenceError("lowest_eigenpairs: no convergence after " +
                             std::to_string(restart) + " restarts (" + std::to_string(matvecs) +
                             " matrix-vector products)");
    }

    const int keep = std::min(m - 2, std::max(k + 8, 2 * k));
    const Matrix kept = ritz.vectors.leftCols(keep);
    Matrix new_basis = basis.leftCols(m) * kept;
    Matrix new_images = images.leftCols(m) * kept;
    basis.leftCols(keep) = new_basis;
    images.leftCols(keep) = new_images;
    m = keep;
    const auto i = first_unconverged;
    next = mapped.col(i) - ritz.values(i) * vectors.col(i);
  }
}

EigenDecomposition lowest_eigenpairs(const SparseMatrix& a, int k, const KrylovOptions& options) {
  if (a.rows() != a.cols()) throw DomainError("lowest_eigenpairs: matrix is not square");
  return lowest_eigenpairs([&a](const Vector& in, Vector& out) { out.noalias() = a * in; },
                           a.rows(), k, options);
}

Index checked_power(int base, int exponent) {
  if (base < 1 || exponent < 0) throw ParameterError("checked_power: invalid arguments");
  Index result = 1;
  for (int i = 0; i < exponent; ++i) {
    if (result > std::numeric_limits<Index>::max() / base) {
      throw CapacityError("dimension " + std::to_string(base) + "^" + std::to_string(exponent) +
                          " overflows the index type");
    }
    result *= base;
  }
  return result;
}

TensorSplit::TensorSplit(int num_sites, int q, std::vector<int> subsystem_positions)
    : num_sites_(num_sites), q_(q), positions_(std::move(subsystem_positions)) {
  if (q < 2 || num_sites < 0) throw ParameterError("TensorSplit: invalid sizes");
  std::sort(positions_.begin(), positions_.end());
  if (std::adjacent_find(positions_.begin(), positions_.end()) != positions_.end()) {
    throw DomainError("TensorSplit: duplicate subsystem positions");
  }
  for (int p : positions_) {
    if (p < 0 || p >= num_sites) throw DomainError("TensorSplit: position out of range");
  }
  const int na = static_cast<int>(positions_.size());
  full_dim_ = checked_power(q, num_sites);
  dim_a_ = checked_power(q, na);
  dim_rest_ = checked_power(q, num_sites - na);

  std::vector<bool> in_a(static_cast<std::size_t>(num_sites), false);
  for (int p : positions_) in_a[static_cast<std::size_t>(p)] = true;

  map_.assign(static_cast<std::size_t>(full_dim_), 0);
  std::vector<int> digits(static_cast<std::size_t>(num_sites), 0);
  for (Index b = 0; b < full_dim_; ++b) {
    Index rem = b;
    for (int s = num_sites - 1; s >= 0; --s) {
      digits[static_cast<std::size_t>(s)] = static_cast<int>(rem % q);
      rem /= q;
    }
    Index a = 0;
    Index r = 0;
    for (int s = 0; s < num_sites; ++s) {
      if (in_a[static_cast<std::size_t>(s)]) {
        a = a * q + digits[static_cast<std::size_t>(s)];
      } else {
        r = r * q + digits[static_cast<std::size_t>(s)];
      }
    }
    map_[static_cast<std::size_t>(a * dim_rest_ + r)] = b;
  }
}

Matrix TensorSplit::to_matrix(const Vector& psi) const {
  if (psi.size() != full_dim_) throw DomainError("TensorSplit::to_matrix: dimension mismatch");
  Matrix c(dim_a_, dim_rest_);
  for (Index a = 0; a < dim_a_; ++a)
    for (Index r = 0; r < dim_rest_; ++r) c(a, r) = psi(index(a, r));
  return c;
}

Vector TensorSplit::from_matrix(const Matrix& coefficients) const {
  if (coefficients.rows() != dim_a_ || coefficients.cols() != dim_rest_) {
    throw DomainError("TensorSplit::from_matrix: shape mismatch");
  }
  Vector psi(full_dim_);
  for (Index a = 0; a < dim_a_; ++a)
    for (Index r = 0; r < dim_rest_; ++r) psi(index(a, r)) = coefficients(a, r);
  return psi;
}

Matrix TensorSplit::embed(const Matrix& op_a) const {
  if (op_a.rows() != dim_a_ || op_a.cols() != dim_a_) {
    throw DomainError("TensorSplit::embed: operator shape mismatch");
  }
  Matrix full = Matrix::Zero(full_dim_, full_dim_);
  for (Index r = 0; r < dim_rest_; ++r)
    for (Index a2 = 0; a2 < dim_a_; ++a2) {
      const Index col = index(a2, r);
      for (Index a1 = 0; a1 < dim_a_; ++a1) full(index(a1, r), col) = op_a(a1, a2);
    }
  return full;
}

Vector TensorSplit::apply(const Matrix& op_a, const Vector& psi) const {
  return from_matrix(op_a * to_matrix(psi));
}

Matrix TensorSplit::gather(const Matrix& m, Index r) const {
  Matrix block(dim_a_, m.cols());
  for (Index a = 0; a < dim_a_; ++a) block.row(a) = m.row(index(a, r));
  return block;
}

void TensorSplit::scatter(const Matrix& block, Index r, Matrix& m) const {
  for (Index a = 0; a < dim_a_; ++a) m.row(index(a, r)) = block.row(a);
}

Matrix TensorSplit::apply_rows(const Matrix& op_a, const Matrix& m) const {
  if (m.rows() != full_dim_ || op_a.rows() != dim_a_ || op_a.cols() != dim_a_) {
    throw DomainError("TensorSplit::apply_rows: shape mismatch");
  }
  Matrix out(m.rows(), m.cols());
  for (Index r = 0; r < dim_rest_; ++r) scatter(op_a * gather(m, r), r, out);
  return out;
}

Matrix TensorSplit::reduced_density(const Vector& psi) const {
  const Matrix c = to_matrix(psi);
  return c * c.adjoint();
}

std::vector<int> positions_within(std::span<const int> subset, std::span<const int> basis) {
  std::vector<int> out;
  out.reserve(subset.size());
  for (int site : subset) {
    const auto it = std::lower_bound(basis.begin(), basis.end(), site);
    if (it == basis.end() || *it != site) {
      throw DomainError("site " + std::to_string(site) + " is not part of the basis region");
    }
    out.push_back(static_cast<int>(it - basis.begin()));
  }
  return out;
}

}  // namespace arealaw
