#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arealaw/lattice.hpp"
#include "arealaw/linalg.hpp"

namespace arealaw {

/// K_x: Hermitian operator on the sites within distance 1 of the anchor.
struct LocalTerm {
  Site anchor = 0;
  std::vector<Site> support;  // sorted, contains the anchor
  Matrix op;                  // q^|support| square, support order = factor order
};

enum class ModelKind { transverse_ising, heisenberg, random_two_local, diagonal_counting };

struct ModelSpec {
  ModelKind kind = ModelKind::transverse_ising;
  double coupling = 1.0;  // Ising ZZ strength
  double g = 1.0;         // transverse field
  double jx = 1.0, jy = 1.0, jz = 1.0, h = 0.0;
  double strength = 1.0;  // random-2-local norm per piece
  std::uint64_t seed = 1;
};

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

class LocalHamiltonian {
 public:
  LocalHamiltonian(Lattice lattice, std::vector<LocalTerm> terms, bool psd_shifted = false,
                   double total_shift = 0.0);

  const Lattice& lattice() const { return lattice_; }
  const std::vector<LocalTerm>& terms() const { return terms_; }
  /// max_x ||K_x||
  double J() const { return J_; }
  bool psd_shifted() const { return psd_shifted_; }
  /// Sum of identity shifts applied by psd_normalize (H_new = H_old + shift).
  double total_shift() const { return total_shift_; }
  /// Lieb-Robinson velocity 2 J 5^s.
  double lr_velocity() const;

 private:
  Lattice lattice_;
  std::vector<LocalTerm> terms_;
  double J_ = 0.0;
  bool psd_shifted_ = false;
  double total_shift_ = 0.0;
};

LocalHamiltonian build_model(const Lattice& lattice, const ModelSpec& model);

/// Builds a Hamiltonian from arbitrary one- and two-site pieces. Pieces are
/// merged into one term per anchor (the lexicographically smallest site).
struct Piece {
  std::vector<Site> sites;  // one or two sites at distance <= 1
  Matrix op;                // in the order of `sites`
};
LocalHamiltonian from_pieces(const Lattice& lattice, const std::vector<Piece>& pieces);

/// Shifts every term by minus its minimum eigenvalue.
LocalHamiltonian psd_normalize(const LocalHamiltonian& h);

struct HamiltonianPartition {
  Region X;
  std::vector<LocalTerm> inside;   // H_X
  std::vector<LocalTerm> outside;  // H_{X-bar}
  std::vector<LocalTerm> crossing; // H_1
  double norm_crossing = 0.0;      // ||H_1||, when computed
  double crossing_bound = 0.0;     // J 3^s |dX|
  bool norm_computed = false;
};

/// Splits the terms by support. With compute_norm the boundary interaction
/// norm is evaluated on the smallest region holding H_1 and compared against
/// J 3^s |dX|; a violation throws NumericError.
HamiltonianPartition partition(const LocalHamiltonian& h, const Region& X,
                               bool compute_norm = true, int dense_cap = 14);

/// Terms whose support lies entirely in the region.
std::vector<LocalTerm> terms_inside(const LocalHamiltonian& h, const Region& region);

/// Default dense limit on the number of sites (q = 2 gives dimension 16384).
inline constexpr int kDefaultDenseCap = 14;

/// Dense matrix of sum of terms on the tensor space of `basis` (sorted sites).
Matrix assemble(const std::vector<LocalTerm>& terms, const std::vector<Site>& basis, int q,
                int dense_cap = kDefaultDenseCap);
SparseMatrix assemble_sparse(const std::vector<LocalTerm>& terms, const std::vector<Site>& basis,
                             int q);

/// Dense single-site Pauli matrices (q = 2).
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace arealaw
