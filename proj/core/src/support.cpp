#include "arealaw/support.hpp"

#include <algorithm>
#include <cmath>

#include "arealaw/errors.hpp"

namespace arealaw {

SchmidtData schmidt(const Vector& psi, const TensorSplit& split) {
  if (psi.size() != split.full_dim()) throw DomainError("schmidt: dimension mismatch");
  const Matrix c = split.to_matrix(psi);
  Eigen::BDCSVD<Matrix> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtData out;
  out.coefficients = svd.singularValues();
  out.left = svd.matrixU();
  out.right = svd.matrixV().conjugate();
  return out;
}

double support_threshold(double J, int s, std::size_t boundary_size, double e0, double v,
                         double excitation) {
  return 2.0 * J * std::pow(3.0, s) * static_cast<double>(boundary_size) + e0 + 40.0 * v +
         excitation;
}

SupportProjector build_P(const SpectralData& spec_X, const Region& X, const Region& R, int q,
                         double threshold) {
  if (spec_X.completeness != Completeness::full) {
    throw CoverageError("build_P: full spectrum of H_X required");
  }
  if (!is_subset(R, X)) throw DomainError("build_P: R must lie inside X");
  const TensorSplit split(static_cast<int>(X.size()), q, positions_within(R.sites(), X.sites()));
  if (spec_X.dim() != split.full_dim()) throw DomainError("build_P: spectrum does not match X");

  std::vector<Vector> cols;
  for (Index n = 0; n < spec_X.size() && spec_X.values(n) <= threshold; ++n) {
    const SchmidtData sd = schmidt(spec_X.vectors.col(n), split);
    for (Index k = 0; k < sd.coefficients.size(); ++k)
      if (sd.coefficients(k) > 1e-12) cols.push_back(sd.left.col(k));
  }
  if (cols.empty()) {
    throw PreconditionError("build_P: no eigenstate of H_X lies below the threshold");
  }
  Matrix stacked(split.dim_a(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) stacked.col(static_cast<Index>(j)) = cols[j];
  Eigen::BDCSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
  const RealVector& sv = svd.singularValues();
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > 1e-10 * sv(0)) ++rank;

  SupportProjector P;
  P.R = R;
  P.threshold = threshold;
  P.basis = svd.matrixU().leftCols(rank);
  return P;
}

WeightReport weight_check(const Lattice& lattice, const SupportProjector& P, const Vector& ground,
                          const Envelope& envelope, int l, std::size_t size_X) {
  const TensorSplit split(lattice.num_sites(), lattice.q(), P.R.sites());
  const Matrix rho = split.reduced_density(ground);
  WeightReport rep;
  rep.expectation = (P.basis.adjoint() * rho * P.basis).trace().real();
  rep.gamma = gamma_eval(envelope, l, static_cast<double>(P.R.size()));
  rep.bound = 1.0 - 4.0 * rep.gamma;
  rep.pass = rep.expectation >= rep.bound - 1e-10;
  rep.window_low = 6.0 * std::pow(static_cast<double>(size_X), 3) * std::exp(-l);
  rep.window_valid = rep.gamma <= 0.5 && rep.gamma >= rep.window_low;
  return rep;
}

RankReport rank_check(const SupportProjector& P, const DosFit& fit, int q, int s, double J,
                      std::size_t size_X, std::size_t size_X_minus_R, std::size_t boundary_X) {
  if (!fit.found) throw PreconditionError("rank_check: no density-of-states fit available");
  const double v = 2.0 * J * std::pow(5.0, s);
  const double exponent = static_cast<double>(boundary_X) *
                              (fit.gamma * 2.0 * J * std::pow(3.0, s) + fit.eta) +
                          fit.gamma * 40.0 * v;
  RankReport rep;
  rep.rank = P.rank();
  rep.log_bound = static_cast<double>(size_X_minus_R) * std::log(static_cast<double>(q)) +
                  std::log(fit.c2) + exponent * std::log(fit.tau * static_cast<double>(size_X));
  rep.bound = std::exp(rep.log_bound);
  rep.pass = std::log(static_cast<double>(rep.rank)) <= rep.log_bound + 1e-12;
  const double log_dim = static_cast<double>(P.R.size()) * std::log(static_cast<double>(q));
  rep.vacuous = rep.log_bound >= log_dim;
  rep.within_dimension = static_cast<double>(rep.rank) <= std::exp(log_dim) + 0.5;
  return rep;
}

namespace {

/// Reorders the row factors of m from `order` (site list) to sorted site order.
Matrix sort_row_factors(const Matrix& m, const std::vector<Site>& order, int q) {
  std::vector<Site> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  if (sorted == order) return m;
  const int k = static_cast<int>(order.size());
  std::vector<int> target(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    target[static_cast<std::size_t>(i)] = static_cast<int>(
        std::lower_bound(sorted.begin(), sorted.end(), order[static_cast<std::size_t>(i)]) -
        sorted.begin());
  }
  Matrix out(m.rows(), m.cols());
  std::vector<int> digits(static_cast<std::size_t>(k));
  for (Index row = 0; row < m.rows(); ++row) {
    Index rem = row;
    for (int i = k - 1; i >= 0; --i) {
      digits[static_cast<std::size_t>(i)] = static_cast<int>(rem % q);
      rem /= q;
    }
    Index dest = 0;
    std::vector<int> placed(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
      placed[static_cast<std::size_t>(target[static_cast<std::size_t>(i)])] =
          digits[static_cast<std::size_t>(i)];
    for (int i = 0; i < k; ++i) dest = dest * q + placed[static_cast<std::size_t>(i)];
    out.row(dest) = m.row(row);
  }
  return out;
}

}  // namespace

RgReport rg_transform(const LocalHamiltonian& h, const std::vector<RgBlock>& blocks,
                      int dense_cap) {
  const Lattice& lattice = h.lattice();
  const int q = lattice.q();
  if (blocks.empty()) throw DomainError("rg_transform: no blocks");
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = i + 1; j < blocks.size(); ++j)
      if (!disjoint(blocks[i].P.R, blocks[j].P.R)) throw DomainError("rg_transform: blocks overlap");

  // product basis of all blocks, factors in block order, then sorted
  Matrix composite = Matrix::Identity(1, 1);
  std::vector<Site> order;
  for (const auto& b : blocks) {
    composite = kron(composite, b.P.basis);
    order.insert(order.end(), b.P.R.sites().begin(), b.P.R.sites().end());
  }
  composite = sort_row_factors(composite, order, q);
  std::sort(order.begin(), order.end());

  const TensorSplit split(lattice.num_sites(), q, order);
  const Index d_eff = composite.cols() * split.dim_rest();
  Matrix W = Matrix::Zero(split.full_dim(), d_eff);
  for (Index r = 0; r < split.dim_rest(); ++r)
    for (Index c = 0; c < composite.cols(); ++c)
      for (Index a = 0; a < split.dim_a(); ++a)
        W(split.index(a, r), c * split.dim_rest() + r) = composite(a, c);

  const Region all = Region::all(lattice);
  const Matrix H = assemble(h.terms(), all.sites(), q, dense_cap);
  const auto full = eigh(H);
  // W^dagger (P K P) W = W^dagger K W since W = P W
  const auto eff = eigh(W.adjoint() * H * W);

  RgReport rep;
  rep.dim_effective = d_eff;
  rep.energy = full.values(0);
  rep.energy_effective = eff.values(0);
  const Vector psi0 = full.vectors.col(0);
  const Vector lifted = W * eff.vectors.col(0);
  rep.fidelity = std::norm(lifted.dot(psi0));
  for (const auto& b : blocks) {
    const TensorSplit bs(lattice.num_sites(), q, b.P.R.sites());
    const Matrix rho = bs.reduced_density(psi0);
    const double e = (b.P.basis.adjoint() * rho * b.P.basis).trace().real();
    rep.ranks.push_back(b.P.rank());
    rep.expectations.push_back(e);
    rep.deficits.push_back(1.0 - e);
    rep.deficit_sum += 1.0 - e;
  }
  return rep;
}

}  // namespace arealaw
