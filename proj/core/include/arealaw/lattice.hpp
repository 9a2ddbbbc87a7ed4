#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace arealaw {

enum class Boundary { open, periodic };

struct LatticeSpec {
  int s = 1;
  std::vector<int> extents;
  std::vector<Boundary> boundary;  // one flag per axis
  int q = 2;
};

/// Sites are linear indices in row-major (lexicographic) coordinate order.
using Site = int;
using Coords = std::vector<int>;

/// Distance to an empty set.
inline constexpr int kInfiniteDistance = std::numeric_limits<int>::max();

class Lattice {
 public:
  explicit Lattice(LatticeSpec spec);

  static Lattice chain(int n, Boundary b = Boundary::open, int q = 2);

  const LatticeSpec& spec() const { return spec_; }
  int s() const { return spec_.s; }
  int q() const { return spec_.q; }
  int num_sites() const { return num_sites_; }
  bool contains(Site x) const { return x >= 0 && x < num_sites_; }

  Coords coords(Site x) const;
  Site index(const Coords& c) const;

  /// Chebyshev distance with per-axis wraparound on periodic axes.
  int distance(Site x, Site y) const;

  bool operator==(const Lattice& other) const;

 private:
  LatticeSpec spec_;
  int num_sites_ = 0;
};

/// Sorted, duplicate-free site subset of a lattice.
class Region {
 public:
  Region() = default;
  Region(const Lattice& lattice, std::vector<Site> sites);

  static Region all(const Lattice& lattice);
  /// Axis-aligned box lo..hi (inclusive) per axis.
  static Region box(const Lattice& lattice, const Coords& lo, const Coords& hi);
  static Region interval(const Lattice& lattice, int lo, int hi);

  const std::vector<Site>& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  bool contains(Site x) const;
  std::string describe() const;

  bool operator==(const Region& other) const { return sites_ == other.sites_; }

 private:
  std::vector<Site> sites_;
};

Region set_union(const Lattice& lattice, const Region& a, const Region& b);
Region set_difference(const Lattice& lattice, const Region& a, const Region& b);
bool is_subset(const Region& a, const Region& b);
bool disjoint(const Region& a, const Region& b);

int site_distance(const Lattice& lattice, Site x, Site y);
/// min over y in r of d(x, y); kInfiniteDistance when r is empty.
int distance_to(const Lattice& lattice, Site x, const Region& r);
int region_distance(const Lattice& lattice, const Region& a, const Region& b);

Region exterior(const Lattice& lattice, const Region& x);
/// {x in X : d(x, exterior) = 1}
Region boundary(const Lattice& lattice, const Region& x);
/// {x in X : d(x, exterior) <= width}
Region shell(const Lattice& lattice, const Region& x, int width);
/// {x : d(x, R) <= radius}
Region neighborhood(const Lattice& lattice, const Region& r, int radius);

struct Geometry {
  int l = 5;
  Region R;
  Region X;          // extended region, distance <= 2l from R
  Region exterior;   // of X
  Region boundary;   // of X
  Region shell;      // of X, width l
  Region boundary_R;
  Region X_minus_R;
  bool clipped = false;  // the 2l neighborhood was cut by the lattice
};

/// Extended-region geometry around R with margin l (l >= 5).
Geometry region_geometry(const Lattice& lattice, const Region& R, int l);

struct GeometryReport {
  int l = 0;
  std::size_t size_X = 0;
  std::size_t size_boundary_X = 0;
  std::size_t size_X_minus_R = 0;
  std::size_t size_boundary_R = 0;
  std::size_t size_R = 0;
  bool clipped = false;

  double bound_X = 0.0;           // |R| (5l)^s
  double bound_boundary_X = 0.0;  // |dR| 2s (5l)^(s-1)
  double bound_X_minus_R = 0.0;   // |dR| (5l)^s
  bool holds_X = false;
  bool holds_boundary_X = false;
  bool holds_X_minus_R = false;

  // Hypercube closed forms, evaluated with side length = sites per axis.
  bool is_box = false;
  double box_side = 0.0;
  std::optional<double> box_X;           // |R| (1 + 4l/L)^s
  std::optional<double> box_boundary_X;  // |dR| (1 + 4l/L)^(s-1)
  std::optional<double> box_X_minus_R;   // |dX| 2l (upper bound)

  bool all_hold() const { return holds_X && holds_boundary_X && holds_X_minus_R; }
};

GeometryReport geometry_bounds_check(const Lattice& lattice, const Region& R, int l);
GeometryReport geometry_bounds_check(const Lattice& lattice, const Geometry& g);

}  // namespace arealaw
