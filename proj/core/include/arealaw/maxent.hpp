#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arealaw/entropy.hpp"

namespace arealaw {

enum class RegionShape { arbitrary, cubic };

struct MaxEntInputs {
  AreaLawConstants constants;
  double size_R = 0.0;
  double boundary_R = 0.0;
  RegionShape shape = RegionShape::arbitrary;
  double side = 0.0;  // sites per axis, cubic shape only
  int l_max = 0;      // 0 picks l0 + ceil(10 xi ln|R|)
};

/// theta(l) = 4 c1 / (l - xi ln|R|)^nu
double maxent_theta(const MaxEntInputs& in, int l);
/// Leading part of ln Theta(l) (the O(ln|R|) term is dropped).
double maxent_log_Theta(const MaxEntInputs& in, int l);

struct MaxEntBlock {
  int l = 0;
  double theta = 0.0;
  double log_Theta = 0.0;
  double log_size = 0.0;  // ln(Theta(l) - Theta(l-1)), or ln Theta(l0) for the first block
  double mass = 0.0;
};

struct MaxEntBlocks {
  int l0 = 0;
  int l_max = 0;
  double residual = 0.0;  // theta(l_max), folded into the last shell
  std::vector<MaxEntBlock> blocks;
  double entropy = 0.0;
  double derivation_bound = 0.0;  // sum m_b (ln Theta(l_b) - ln m_b)
  double leading = 0.0;           // Result 1 (arbitrary) or Result 2 (cubic)
  double remainder = 0.0;         // derivation_bound - leading
  double constraint_margin = 0.0; // min_l [cumulative(Theta(l)) - (1 - theta(l))]
  double truc_margin = 0.0;       // min_l [c1 2^{nu+3}/(l - xi ln|R|)^{nu+1} - (theta(l-1) - theta(l))]
};

/// Block-uniform maximum-entropy distribution under the eigenvalue constraints.
MaxEntBlocks maxent_blocks(const MaxEntInputs& in);

/// True when cumulative block masses satisfy every constraint (tolerance tol).
bool maxent_feasible(const MaxEntBlocks& b, const std::vector<double>& masses, double tol = 1e-12);

struct FeasibleSample {
  int accepted = 0;
  int rejected = 0;
  double max_entropy = 0.0;
  double min_gap = 0.0;  // min over samples of (blocks entropy - sample entropy)
};

/// Random feasible distributions on the same support: mass moved to earlier blocks,
/// multiplicative jitter with rejection, and random non-uniform splits inside blocks.
FeasibleSample sample_feasible(const MaxEntBlocks& b, int count, std::uint64_t seed);

}  // namespace arealaw
