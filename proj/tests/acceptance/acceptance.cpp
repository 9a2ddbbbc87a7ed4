// Acceptance suite: one line per criterion, exit status 1 when any selected criterion fails.
// Usage: acceptance [criterion]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "arealaw/dynamics.hpp"
#include "arealaw/entropy.hpp"
#include "arealaw/harness.hpp"
#include "arealaw/maxent.hpp"

using namespace arealaw;

namespace {

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "" : "FAILED ") + what);
  }
  void note(const std::string& what) { notes.push_back(what); }
};

std::string fmt(double x, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

const ScenarioResult& scenario(const std::string& yaml) {
  static std::map<std::string, ScenarioResult> memo;
  auto it = memo.find(yaml);
  if (it == memo.end()) it = memo.emplace(yaml, execute(parse_config(yaml))).first;
  return it->second;
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

// Every check whose name contains one of the fragments must pass; at least one must exist.
void require_checks(Verdict& v, const ScenarioResult& r, const std::vector<std::string>& fragments,
                    const std::string& label, bool strictly_positive = false) {
  std::size_t count = 0, failed = 0;
  double worst = INFINITY;
  std::string first_failure;
  for (const auto& c : r.checks) {
    if (std::none_of(fragments.begin(), fragments.end(), [&](const std::string& f) { return contains(c.check, f); }))
      continue;
    ++count;
    worst = std::min(worst, c.margin());
    const bool ok = c.pass && (!strictly_positive || c.margin() > 0.0);
    if (!ok) {
      ++failed;
      if (first_failure.empty()) first_failure = c.check + " (margin " + fmt(c.margin()) + ")";
    }
  }
  std::string what = label + ": " + std::to_string(count - failed) + "/" + std::to_string(count) +
                     " pass, worst margin " + fmt(worst);
  if (!first_failure.empty()) what += ", first failure " + first_failure;
  v.require(count > 0 && failed == 0, what);
}

// ---------------------------------------------------------------- scenario texts

const char* kFrustration =
    "scenario: frustration\nseed: 1\nmodel: {kind: tfi, g: 2.0}\nlattice: {extents: [10]}\n"
    "params: {sizes: [8, 10], g_values: [1.5, 2.0], min_size: 2, margin: 2, slack: 1.0e-9}\n";

const char* kLightcone =
    "scenario: lightcone\nseed: 1\nmodel: {kind: tfi, g: 2.0}\nlattice: {extents: [10]}\n"
    "params: {distances: [2, 4, 6], points: 20, vt_min: 0.01, operator: z, slack: 1.0e-9}\n";

const char* kFilterLR =
    "scenario: qfilter\nseed: 1\nmodel: {kind: tfi, g: 2.0}\nlattice: {extents: [10]}\n"
    "regions: {X: {interval: [0, 7]}, R: {interval: [0, 2]}}\n"
    "params: {l: 5, sigma_rule: lieb_robinson, excited_states: 3, quadrature: false}\n";

const char* kFilterTail =
    "scenario: qfilter\nseed: 1\nmodel: {kind: tfi, g: 2.0}\nlattice: {extents: [10]}\n"
    "regions: {X: {interval: [0, 7]}, R: {interval: [0, 2]}}\n"
    "params: {l: 5, sigma_rule: gaussian_tail, excited_states: 3, quadrature: false}\n";

const char* kFilterQuadrature =
    "scenario: qfilter\nseed: 1\nmodel: {kind: tfi, g: 2.0}\nlattice: {extents: [6]}\n"
    "regions: {X: {interval: [0, 3]}, R: {interval: [0, 1]}}\n"
    "params: {l: 5, sigma_rule: gaussian_tail, quadrature: true, ladder: 8, ladder_sigma: 1.0}\n";

const char* kDos =
    "scenario: dos-fit\nseed: 1\nmodel: {kind: diagonal-counting}\nlattice: {extents: [10]}\n"
    "params: {region_sizes: [3, 4, 5, 6, 7, 8, 9, 10]}\n";

std::string support_text(int center) {
  return "scenario: support\nseed: 1\nmodel: {kind: tfi, g: 2.0}\nlattice: {extents: [10]}\n"
         "regions: {R: {center: " + std::to_string(center) + "}}\n"
         "params: {l: 5, mode: exponential, block_sizes: [1, 2], dos_sizes: [4, 6, 8]}\n";
}

const char* kRg =
    "scenario: rg\nseed: 1\nmodel: {kind: tfi, g: 2.0}\nlattice: {extents: [8]}\n"
    "regions: {R: {interval: [2, 5]}, X: {interval: [1, 6]}}\n"
    "params: {offsets: [0, 0.5, 1, 2, 3, 4, 6, 8], paper_threshold: true}\n";

const char* kEntropy =
    "scenario: entropy-scaling\nseed: 1\nmodel: {kind: tfi, g: 2.0}\nlattice: {extents: [12]}\n"
    "params: {sizes: [8, 10, 12], block_sizes: [1, 2, 3], mode: polynomial, dos_sizes: [4, 6, 8], "
    "entropy_cap: 1.0}\n";

const char* kExcited =
    "scenario: excited\nseed: 1\nmodel: {kind: tfi, g: 2.0}\nlattice: {extents: [8]}\n"
    "params: {states: 3, amplitudes: equal, block_sizes: [1, 2, 3], mode: polynomial, dos_sizes: [4, 6, 8]}\n";

// ---------------------------------------------------------------- criteria

Verdict c1_frustration() {
  Verdict v;
  const auto& r = scenario(kFrustration);
  require_checks(v, r, {"e0 <= <H_X>", "<H_X> <= e0 + J 3^s |dX|"}, "g in {1.5, 2}, N in {8, 10}");
  return v;
}

Verdict c2_lightcone() {
  Verdict v;
  const auto& r = scenario(kLightcone);
  require_checks(v, r, {"LR bound"}, "N=10, d in {2,4,6}, 20 points");
  std::size_t vac = 0;
  for (const auto& c : r.checks) vac += c.vacuous;
  v.note(std::to_string(vac) + " points vacuous (bound >= 2)");
  return v;
}

Verdict c3_filter() {
  Verdict v;
  const auto& r = scenario(kFilterLR);
  require_checks(v, r, {"||Q Psi0 - M Psi0||"}, "Q Psi0 = M Psi0 (N=10)");
  require_checks(v, r, {"step profile error"}, "step profile n=1..3 (N=10)");
  const auto& q = scenario(kFilterQuadrature);
  require_checks(v, q, {"||Q_quad - Q_spec|| <= 5e-3"}, "default quadrature (N=6)");
  require_checks(v, q, {"error(dt/2)"}, "halving ladder");
  return v;
}

Verdict c4_lemmas() {
  Verdict v;
  for (const auto& [text, label] : {std::pair{kFilterLR, "lieb_robinson"}, std::pair{kFilterTail, "gaussian_tail"}}) {
    const auto& r = scenario(text);
    require_checks(v, r, {"lemma1:", "lemma3(", "jbp:", "||Qtilde|| <= 1"}, std::string(label) + " literal");
    require_checks(v, r, {"lemma3(a)", "jbp:", "lemma3(b)", "lemma3(c)"}, std::string(label) + " strict",
                   true);
  }
  return v;
}

Verdict c5_lemma2() {
  Verdict v;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto hermitian = [&] {
    Matrix a(8, 8);
    for (Index i = 0; i < 8; ++i)
      for (Index j = 0; j < 8; ++j) a(i, j) = cplx(normal(rng), normal(rng));
    return Matrix((a + a.adjoint()) / 2.0);
  };
  int failed = 0;
  double worst = INFINITY;
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix H = hermitian(), X = hermitian(), Y = hermitian();
    const double t = 0.1 + 1.9 * unit(rng);
    const auto rep = lemma2_check(H, X, Y, t, 1e-6);
    worst = std::min(worst, rep.rhs - rep.lhs);
    if (!rep.pass) ++failed;
  }
  v.require(failed == 0, "100 random 3-qubit triples: " + std::to_string(100 - failed) +
                             "/100 pass, smallest rhs - lhs " + fmt(worst));
  return v;
}

Verdict c6_dos() {
  Verdict v;
  const auto& r = scenario(kDos);
  require_checks(v, r, {"|Omega(e) - expected| = 0"}, "Omega(e) exact, N=3..10");
  require_checks(v, r, {"binomial(N,e) <= N^e"}, "|X|^e dominates the degeneracy");
  return v;
}

Verdict c7_maxent() {
  Verdict v;
  std::size_t instances = 0, bad_constraint = 0, bad_sample = 0, bad_closed = 0;
  double worst_constraint = INFINITY, worst_sample = INFINITY, worst_closed = INFINITY;
  std::uint64_t seed = 1;
  for (auto shape : {RegionShape::arbitrary, RegionShape::cubic})
    for (int s : {1, 2})
      for (double xi : {0.5, 1.0, 2.0})
        for (double dnu : {1.0, 2.0})
          for (double c1 : {0.05, 0.5})
            for (double size : {64.0, 576.0, 4096.0})
              for (auto [gamma, eta] : {std::pair{0.2, 0.05}, std::pair{1.0, 0.5}}) {
                MaxEntInputs in;
                in.constants.c1 = c1;
                in.constants.xi = xi;
                in.constants.nu = s + dnu;
                in.constants.gamma = gamma;
                in.constants.eta = eta;
                in.constants.s = s;
                in.size_R = size;
                in.shape = shape;
                in.side = std::pow(size, 1.0 / s);
                in.boundary_R = s == 1 ? 2.0 : 4.0 * in.side;
                const auto b = maxent_blocks(in);
                const auto sample = sample_feasible(b, 1000, seed++);
                const double closed = b.leading + b.remainder;
                ++instances;
                worst_constraint = std::min(worst_constraint, b.constraint_margin);
                worst_sample = std::min(worst_sample, sample.min_gap);
                worst_closed = std::min(worst_closed, closed - b.entropy);
                bad_constraint += b.constraint_margin < -1e-12;
                bad_sample += sample.min_gap < -1e-10;
                bad_closed += b.entropy > closed + 1e-10;
              }
  v.require(bad_constraint == 0, "constraints at every l on " + std::to_string(instances) +
                                     " constant sets, worst margin " + fmt(worst_constraint));
  v.require(bad_sample == 0, "entropy >= 1000 feasible samples each, smallest gap " + fmt(worst_sample));
  v.require(bad_closed == 0, "entropy <= leading + remainder, smallest gap " + fmt(worst_closed));
  return v;
}

Verdict c8_simple() {
  Verdict v;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int failed = 0;
  double worst = INFINITY;
  for (int i = 0; i < 50; ++i) {
    const double c3 = 5.0 * unit(rng);
    const long N = 2 + static_cast<long>(std::pow(10.0, 4.0 * unit(rng)));
    const double closed = 2.0 * c3 + std::numbers::pi * std::numbers::pi / (6.0 * std::numbers::e);
    const double value = simple_bound_oracle(c3, N).value;
    worst = std::min(worst, closed - value);
    if (value > closed + 1e-6) ++failed;
  }
  v.require(failed == 0, "50 random (c3, N): optimizer <= 2 c3 + pi^2/(6e), smallest gap " + fmt(worst));

  double grid_err = 0.0;
  for (double c3 : {0.05, 0.15, 0.3, 0.45, 0.55, 0.7})
    grid_err = std::max(grid_err, std::abs(simple_bound_oracle(c3, 3).value - simplex_grid_oracle(c3)));
  v.require(grid_err <= 1e-4, "N=3 optimizer vs simplex grid, max difference " + fmt(grid_err));

  AreaLawConstants k;
  k.J = 1.0;
  k.s = 1;
  k.gamma = 0.5;
  k.eta = 0.1;
  k.tau = 1.0;
  k.c2 = 2.0;
  // 6 ln 100 + 0.4 + 2 ln 2 + pi^2/(6e)
  const double hand = 30.0224529023;
  const double closed = simple_bound(k, 100.0, 2.0);
  v.require(std::abs(closed - hand) <= 1e-9, "hand-evaluated instance " + fmt(closed, 12) + " vs " + fmt(hand, 12));
  return v;
}

Verdict c9_support() {
  Verdict v;
  for (int center : {2, 3}) {
    const auto& r = scenario(support_text(center));
    require_checks(v, r, {"<P> >= 1 - 4 Gamma"}, "|R|=" + std::to_string(center) + " weight");
    require_checks(v, r, {"ln rank P <= ln bound", "rank P <= q^|R|"}, "|R|=" + std::to_string(center) + " rank");
    for (const auto& c : r.checks) {
      if (contains(c.check, "<P> >=")) v.note(c.note);
      if (contains(c.check, "ln rank P")) v.note(std::string("rank bound ") + (c.vacuous ? "vacuous" : "with content"));
    }
  }
  return v;
}

Verdict c10_rg() {
  Verdict v;
  const auto& r = scenario(kRg);
  require_checks(v, r, {"when P = I"}, "fidelity 1 at P = I");
  require_checks(v, r, {"non-decreasing"}, "monotone in the threshold");
  require_checks(v, r, {"fidelity >= 1 - sum(1 - <P>) - 1e-6"}, "fidelity >= <P> - 1e-6");
  return v;
}

Verdict c11_entropy() {
  Verdict v;
  const auto& r = scenario(kEntropy);
  require_checks(v, r, {"S <= 1 nat"}, "half-chain S < 1 nat, N in {8,10,12}");
  require_checks(v, r, {"Result 2"}, "S <= Result 2 with fitted constants");
  const auto& e = scenario(kExcited);
  require_checks(v, e, {"excited-state bound"}, "excited superposition of 3 levels");
  return v;
}

struct Criterion {
  int id;
  const char* title;
  double limit_seconds;
  Verdict (*fn)();
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, "frustration", 60, c1_frustration},     {2, "light cone", 120, c2_lightcone},
      {3, "filter identity", 300, c3_filter},     {4, "lemma 1/3", 300, c4_lemmas},
      {5, "lemma 2", 120, c5_lemma2},             {6, "density of states", 30, c6_dos},
      {7, "block max-entropy", 120, c7_maxent},   {8, "simple bound", 60, c8_simple},
      {9, "support projector", 300, c9_support},  {10, "rg", 120, c10_rg},
      {11, "entropy scaling", 600, c11_entropy},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  bool all_pass = true;
  for (const auto& c : criteria()) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.fn();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.require(dt < c.limit_seconds, "runtime " + fmt(dt, 3) + " s < " + fmt(c.limit_seconds) + " s");
    all_pass = all_pass && v.pass;
    std::printf("criterion %2d %-18s %s\n", c.id, c.title, v.pass ? "PASS" : "FAIL");
    for (const auto& n : v.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
