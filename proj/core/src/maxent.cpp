#include "arealaw/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "arealaw/errors.hpp"

namespace arealaw {

namespace {

double block_entropy(double mass, double log_size) {
  return mass > 0.0 ? mass * (log_size - std::log(mass)) : 0.0;
}

}  // namespace

double maxent_theta(const MaxEntInputs& in, int l) {
  const auto& k = in.constants;
  const double denom = l - k.xi * std::log(in.size_R);
  if (!(denom > 0.0)) throw DomainError("maxent_theta: l must exceed xi ln|R|");
  return 4.0 * k.c1 / std::pow(denom, k.nu);
}

double maxent_log_Theta(const MaxEntInputs& in, int l) {
  const auto& k = in.constants;
  const double coupling = k.gamma * 2.0 * k.J * std::pow(3.0, k.s) + k.eta;
  const double lnq = std::log(static_cast<double>(k.q));
  if (in.shape == RegionShape::arbitrary) {
    const double w = 5.0 * l;
    return in.boundary_R * 2.0 * k.s * std::pow(w, k.s - 1) * coupling *
               std::log(k.tau * in.size_R * std::pow(w, k.s)) +
           in.boundary_R * std::pow(w, k.s) * lnq;
  }
  if (!(in.side > 0.0)) throw ParameterError("maxent_log_Theta: cubic shape needs a side length");
  const double f = 1.0 + 4.0 * l / in.side;
  return in.boundary_R * std::pow(f, k.s - 1) * coupling *
             std::log(k.tau * in.size_R * std::pow(f, k.s)) +
         in.boundary_R * std::pow(f, k.s - 1) * 2.0 * l * lnq;
}

MaxEntBlocks maxent_blocks(const MaxEntInputs& in) {
  const auto& k = in.constants;
  if (!(k.nu > k.s)) throw ParameterError("maxent_blocks: need nu > s");
  if (!(in.size_R > 1.0)) throw DomainError("maxent_blocks: need |R| > 1");
  const double a = k.xi * std::log(in.size_R);

  MaxEntBlocks out;
  // the constraints are stated for l >= 5
  out.l0 = std::max(5, static_cast<int>(std::ceil(2.0 * a)));
  out.l_max = in.l_max > 0 ? in.l_max : out.l0 + static_cast<int>(std::ceil(10.0 * a));
  if (out.l_max <= out.l0) throw ParameterError("maxent_blocks: l_max must exceed l0");
  const double theta0 = maxent_theta(in, out.l0);
  if (theta0 > 1.0) {
    throw DomainError("maxent_blocks: region too small, theta(l0) = " + format_number(theta0));
  }
  const double log_Theta0 = maxent_log_Theta(in, out.l0);
  if (log_Theta0 < 0.0) throw DomainError("maxent_blocks: Theta(l0) < 1");

  out.blocks.push_back({out.l0, theta0, log_Theta0, log_Theta0, 1.0 - theta0});
  for (int l = out.l0 + 1; l <= out.l_max; ++l) {
    MaxEntBlock b;
    b.l = l;
    b.theta = maxent_theta(in, l);
    b.log_Theta = maxent_log_Theta(in, l);
    const MaxEntBlock& prev = out.blocks.back();
    if (!(b.log_Theta > prev.log_Theta) || !(b.theta < prev.theta)) {
      throw NumericError("maxent_blocks: Theta or theta not monotone at l = " + std::to_string(l));
    }
    b.log_size = b.log_Theta + std::log1p(-std::exp(prev.log_Theta - b.log_Theta));
    b.mass = prev.theta - b.theta;
    out.blocks.push_back(b);
  }
  out.residual = out.blocks.back().theta;
  out.blocks.back().mass += out.residual;

  double cumulative = 0.0;
  out.constraint_margin = INFINITY;
  out.truc_margin = INFINITY;
  for (std::size_t i = 0; i < out.blocks.size(); ++i) {
    const MaxEntBlock& b = out.blocks[i];
    cumulative += b.mass;
    out.constraint_margin = std::min(out.constraint_margin, cumulative - (1.0 - b.theta));
    out.entropy += block_entropy(b.mass, b.log_size);
    out.derivation_bound += block_entropy(b.mass, b.log_Theta);
    if (i > 0) {
      const double drop = out.blocks[i - 1].theta - b.theta;
      const double cap = k.c1 * std::pow(2.0, k.nu + 3.0) / std::pow(b.l - a, k.nu + 1.0);
      out.truc_margin = std::min(out.truc_margin, cap - drop);
    }
  }
  out.leading = in.shape == RegionShape::arbitrary ? result1_leading(k, in.size_R, in.boundary_R)
                                                   : result2_leading(k, in.size_R, in.boundary_R);
  out.remainder = out.derivation_bound - out.leading;
  return out;
}

bool maxent_feasible(const MaxEntBlocks& b, const std::vector<double>& masses, double tol) {
  if (masses.size() != b.blocks.size()) return false;
  double cumulative = 0.0;
  double total = 0.0;
  for (double m : masses) {
    if (m < 0.0) return false;
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-9) return false;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    cumulative += masses[i];
    if (cumulative < 1.0 - b.blocks[i].theta - tol) return false;
  }
  return true;
}

FeasibleSample sample_feasible(const MaxEntBlocks& b, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t nb = b.blocks.size();

  FeasibleSample out;
  out.max_entropy = -INFINITY;
  out.min_gap = INFINITY;
  while (out.accepted < count) {
    std::vector<double> m(nb);
    for (std::size_t i = 0; i < nb; ++i) m[i] = b.blocks[i].mass;

    // moving mass earlier only raises cumulative sums
    const double f = unit(rng);
    for (std::size_t i = 1; i < nb; ++i) {
      const double u = unit(rng);
      const double moved = f * u * u * m[i];
      const std::size_t j = static_cast<std::size_t>(unit(rng) * static_cast<double>(i));
      m[i] -= moved;
      m[std::min(j, i - 1)] += moved;
    }
    // multiplicative jitter can push mass late; those proposals are rejected
    const double eps = 0.02 * unit(rng);
    double total = 0.0;
    for (auto& x : m) total += (x *= 1.0 + eps * (2.0 * unit(rng) - 1.0));
    for (auto& x : m) x /= total;
    if (!maxent_feasible(b, m)) {
      if (++out.rejected > 1000 * std::max(count, 1)) {
        throw NumericError("sample_feasible: acceptance rate below 1/1000");
      }
      continue;
    }

    double entropy = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      const double ls = b.blocks[i].log_size;
      if (unit(rng) < 0.5 || m[i] <= 0.0) {
        entropy += block_entropy(m[i], ls);
        continue;
      }
      const double rho = 0.01 + 0.98 * unit(rng);  // share of the block's indices
      const double kappa = unit(rng);              // share of the block's mass
      entropy += block_entropy(kappa * m[i], ls + std::log(rho)) +
                 block_entropy((1.0 - kappa) * m[i], ls + std::log1p(-rho));
    }
    ++out.accepted;
    out.max_entropy = std::max(out.max_entropy, entropy);
    out.min_gap = std::min(out.min_gap, b.entropy - entropy);
  }
  return out;
}

}  // namespace arealaw
