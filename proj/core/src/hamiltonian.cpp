#include "arealaw/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <utility>

#include "arealaw/errors.hpp"

namespace arealaw {

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::transverse_ising: return "tfi";
    case ModelKind::heisenberg: return "heisenberg";
    case ModelKind::random_two_local: return "random-2-local";
    case ModelKind::diagonal_counting: return "diagonal-counting";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "tfi" || name == "transverse-ising") return ModelKind::transverse_ising;
  if (name == "heisenberg") return ModelKind::heisenberg;
  if (name == "random-2-local") return ModelKind::random_two_local;
  if (name == "diagonal-counting") return ModelKind::diagonal_counting;
  throw ConfigError("unknown model '" + name + "'");
}

LocalHamiltonian::LocalHamiltonian(Lattice lattice, std::vector<LocalTerm> terms,
                                   bool psd_shifted, double total_shift)
    : lattice_(std::move(lattice)),
      terms_(std::move(terms)),
      psd_shifted_(psd_shifted),
      total_shift_(total_shift) {
  const int q = lattice_.q();
  for (auto& t : terms_) {
    std::sort(t.support.begin(), t.support.end());
    if (!std::binary_search(t.support.begin(), t.support.end(), t.anchor)) {
      throw DomainError("term support must contain its anchor " + std::to_string(t.anchor));
    }
    for (Site y : t.support) {
      if (!lattice_.contains(y)) throw DomainError("term support leaves the lattice");
      if (lattice_.distance(t.anchor, y) > 1) {
        throw DomainError("term anchored at " + std::to_string(t.anchor) +
                          " reaches beyond distance 1");
      }
    }
    const Index dim = checked_power(q, static_cast<int>(t.support.size()));
    if (t.op.rows() != dim || t.op.cols() != dim) {
      throw DomainError("term operator has the wrong dimension for its support");
    }
    if (!is_hermitian(t.op)) throw DomainError("term operator is not Hermitian");
    J_ = std::max(J_, hermitian_norm(t.op));
  }
}

double LocalHamiltonian::lr_velocity() const { return 2.0 * J_ * std::pow(5.0, lattice_.s()); }

namespace {

Matrix swap_two_sites(const Matrix& op, int q) {
  const Index d = q;
  Matrix out(op.rows(), op.cols());
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b)
      for (Index c = 0; c < d; ++c)
        for (Index e = 0; e < d; ++e) out(b * d + a, e * d + c) = op(a * d + b, c * d + e);
  return out;
}

Matrix random_hermitian(Index dim, std::mt19937_64& rng, double norm) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(dim, dim);
  for (Index j = 0; j < dim; ++j)
    for (Index i = 0; i < dim; ++i) a(i, j) = cplx(gauss(rng), gauss(rng));
  Matrix h = 0.5 * (a + a.adjoint());
  return h * (norm / hermitian_norm(h));
}

std::vector<std::pair<Site, Site>> nearest_bonds(const Lattice& lattice) {
  std::set<std::pair<Site, Site>> bonds;
  const auto& spec = lattice.spec();
  for (Site x = 0; x < lattice.num_sites(); ++x) {
    const Coords c = lattice.coords(x);
    for (int axis = 0; axis < spec.s; ++axis) {
      Coords n = c;
      n[axis] += 1;
      if (n[axis] >= spec.extents[axis]) {
        if (spec.boundary[axis] != Boundary::periodic) continue;
        n[axis] = 0;
      }
      const Site y = lattice.index(n);
      if (y == x) continue;
      bonds.insert({std::min(x, y), std::max(x, y)});
    }
  }
  return {bonds.begin(), bonds.end()};
}

}  // namespace

LocalHamiltonian from_pieces(const Lattice& lattice, const std::vector<Piece>& pieces) {
  const int q = lattice.q();
  std::map<Site, std::vector<const Piece*>> by_anchor;
  for (const auto& p : pieces) {
    if (p.sites.empty() || p.sites.size() > 2) throw DomainError("pieces act on one or two sites");
    by_anchor[*std::min_element(p.sites.begin(), p.sites.end())].push_back(&p);
  }
  std::vector<LocalTerm> terms;
  for (const auto& [anchor, list] : by_anchor) {
    std::set<Site> support_set;
    for (const Piece* p : list) support_set.insert(p->sites.begin(), p->sites.end());
    LocalTerm term;
    term.anchor = anchor;
    term.support.assign(support_set.begin(), support_set.end());
    const int n = static_cast<int>(term.support.size());
    const Index dim = checked_power(q, n);
    term.op = Matrix::Zero(dim, dim);
    for (const Piece* p : list) {
      std::vector<Site> sites = p->sites;
      Matrix op = p->op;
      if (sites.size() == 2 && sites[0] > sites[1]) {
        std::swap(sites[0], sites[1]);
        op = swap_two_sites(op, q);
      }
      if (sites.size() == 2 && sites[0] == sites[1]) throw DomainError("piece sites coincide");
      const auto pos = positions_within(sites, term.support);
      term.op += TensorSplit(n, q, pos).embed(op);
    }
    terms.push_back(std::move(term));
  }
  return LocalHamiltonian(lattice, std::move(terms));
}

LocalHamiltonian build_model(const Lattice& lattice, const ModelSpec& model) {
  const int q = lattice.q();
  if (model.kind != ModelKind::diagonal_counting && model.kind != ModelKind::random_two_local &&
      q != 2) {
    throw DomainError("unsupported model: " + to_string(model.kind) + " needs q = 2");
  }
  std::vector<Piece> pieces;
  const auto bonds = nearest_bonds(lattice);
  switch (model.kind) {
    case ModelKind::transverse_ising: {
      const Matrix zz = -model.coupling * kron(pauli_z(), pauli_z());
      for (Site x = 0; x < lattice.num_sites(); ++x) pieces.push_back({{x}, -model.g * pauli_x()});
      for (auto [a, b] : bonds) pieces.push_back({{a, b}, zz});
      break;
    }
    case ModelKind::heisenberg: {
      const Matrix bond = model.jx * kron(pauli_x(), pauli_x()) +
                          model.jy * kron(pauli_y(), pauli_y()) +
                          model.jz * kron(pauli_z(), pauli_z());
      if (model.h != 0.0) {
        for (Site x = 0; x < lattice.num_sites(); ++x) pieces.push_back({{x}, model.h * pauli_z()});
      }
      for (auto [a, b] : bonds) pieces.push_back({{a, b}, bond});
      break;
    }
    case ModelKind::random_two_local: {
      std::mt19937_64 rng(model.seed);
      for (Site x = 0; x < lattice.num_sites(); ++x) {
        pieces.push_back({{x}, random_hermitian(q, rng, model.strength)});
      }
      for (auto [a, b] : bonds) {
        pieces.push_back({{a, b}, random_hermitian(static_cast<Index>(q) * q, rng, model.strength)});
      }
      break;
    }
    case ModelKind::diagonal_counting: {
      Matrix proj = Matrix::Zero(q, q);
      proj(0, 0) = 1.0;
      for (Site x = 0; x < lattice.num_sites(); ++x) pieces.push_back({{x}, proj});
      break;
    }
  }
  return from_pieces(lattice, pieces);
}

LocalHamiltonian psd_normalize(const LocalHamiltonian& h) {
  std::vector<LocalTerm> terms = h.terms();
  double shift = h.total_shift();
  for (auto& t : terms) {
    const double lo = min_eigenvalue(t.op);
    t.op -= lo * Matrix::Identity(t.op.rows(), t.op.cols());
    shift -= lo;
  }
  return LocalHamiltonian(h.lattice(), std::move(terms), true, shift);
}

std::vector<LocalTerm> terms_inside(const LocalHamiltonian& h, const Region& region) {
  std::vector<LocalTerm> out;
  for (const auto& t : h.terms()) {
    if (std::all_of(t.support.begin(), t.support.end(),
                    [&](Site y) { return region.contains(y); })) {
      out.push_back(t);
    }
  }
  return out;
}

HamiltonianPartition partition(const LocalHamiltonian& h, const Region& X, bool compute_norm,
                               int dense_cap) {
  const Lattice& lat = h.lattice();
  for (Site x : X.sites())
    if (!lat.contains(x)) throw DomainError("partition: region leaves the lattice");
  HamiltonianPartition p;
  p.X = X;
  std::set<Site> crossing_sites;
  for (const auto& t : h.terms()) {
    std::size_t in = 0;
    for (Site y : t.support) in += X.contains(y) ? 1 : 0;
    if (in == t.support.size()) {
      p.inside.push_back(t);
    } else if (in == 0) {
      p.outside.push_back(t);
    } else {
      p.crossing.push_back(t);
      crossing_sites.insert(t.support.begin(), t.support.end());
    }
  }
  const double boundary_size = static_cast<double>(boundary(lat, X).size());
  p.crossing_bound = h.J() * std::pow(3.0, lat.s()) * boundary_size;
  if (compute_norm) {
    const std::vector<Site> basis(crossing_sites.begin(), crossing_sites.end());
    if (static_cast<int>(basis.size()) <= dense_cap) {
      p.norm_crossing = basis.empty() ? 0.0 : hermitian_norm(assemble(p.crossing, basis, lat.q()));
      p.norm_computed = true;
      if (p.norm_crossing > p.crossing_bound * (1.0 + 1e-12) + 1e-12) {
        throw NumericError("partition: ||H_1|| = " + std::to_string(p.norm_crossing) +
                           " exceeds J 3^s |dX| = " + std::to_string(p.crossing_bound));
      }
    }
  }
  return p;
}

namespace {

// Scatter plan for one term inside a basis: for every local index a the
// offset sum_k digit_k(a) * stride(pos_k) in the basis index.
struct TermPlan {
  std::vector<Index> offsets;
  std::vector<Index> strides;  // per support factor
  Index local_dim = 1;
};

TermPlan plan_term(const LocalTerm& t, const std::vector<Site>& basis, int q) {
  const auto pos = positions_within(t.support, basis);
  const int n = static_cast<int>(basis.size());
  const int k = static_cast<int>(pos.size());
  TermPlan plan;
  plan.local_dim = checked_power(q, k);
  plan.strides.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) plan.strides[i] = checked_power(q, n - 1 - pos[i]);
  plan.offsets.resize(static_cast<std::size_t>(plan.local_dim));
  for (Index a = 0; a < plan.local_dim; ++a) {
    Index rem = a;
    Index off = 0;
    for (int i = k - 1; i >= 0; --i) {
      off += (rem % q) * plan.strides[i];
      rem /= q;
    }
    plan.offsets[static_cast<std::size_t>(a)] = off;
  }
  return plan;
}

Index local_index(Index b, const TermPlan& plan, int q) {
  Index a = 0;
  for (Index stride : plan.strides) a = a * q + (b / stride) % q;
  return a;
}

template <typename Emit>
void for_each_entry(const std::vector<LocalTerm>& terms, const std::vector<Site>& basis, int q,
                    Index dim, Emit emit) {
  for (const auto& t : terms) {
    const TermPlan plan = plan_term(t, basis, q);
    for (Index b = 0; b < dim; ++b) {
      const Index a = local_index(b, plan, q);
      const Index base = b - plan.offsets[static_cast<std::size_t>(a)];
      for (Index a2 = 0; a2 < plan.local_dim; ++a2) {
        const cplx v = t.op(a2, a);
        if (v != cplx(0.0)) emit(base + plan.offsets[static_cast<std::size_t>(a2)], b, v);
      }
    }
  }
}

void check_basis(const std::vector<Site>& basis) {
  if (!std::is_sorted(basis.begin(), basis.end()) ||
      std::adjacent_find(basis.begin(), basis.end()) != basis.end()) {
    throw DomainError("assemble: basis sites must be sorted and distinct");
  }
}

}  // namespace

Matrix assemble(const std::vector<LocalTerm>& terms, const std::vector<Site>& basis, int q,
                int dense_cap) {
  check_basis(basis);
  if (static_cast<int>(basis.size()) > dense_cap) {
    throw CapacityError("dense assembly of " + std::to_string(basis.size()) +
                        " sites exceeds the cap of " + std::to_string(dense_cap) +
                        "; use assemble_sparse with lowest_eigenpairs");
  }
  const Index dim = checked_power(q, static_cast<int>(basis.size()));
  Matrix out = Matrix::Zero(dim, dim);
  for_each_entry(terms, basis, q, dim, [&](Index r, Index c, cplx v) { out(r, c) += v; });
  return out;
}

SparseMatrix assemble_sparse(const std::vector<LocalTerm>& terms, const std::vector<Site>& basis,
                             int q) {
  check_basis(basis);
  const Index dim = checked_power(q, static_cast<int>(basis.size()));
  std::vector<Eigen::Triplet<cplx>> triplets;
  for_each_entry(terms, basis, q, dim,
                 [&](Index r, Index c, cplx v) { triplets.emplace_back(r, c, v); });
  SparseMatrix out(dim, dim);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace arealaw
