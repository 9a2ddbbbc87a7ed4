#include "arealaw/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iterator>
#include <sstream>

#include "arealaw/errors.hpp"

namespace arealaw {

Lattice::Lattice(LatticeSpec spec) : spec_(std::move(spec)) {
  if (spec_.s < 1) throw ParameterError("lattice: dimension s must be >= 1");
  if (spec_.q < 2) throw ParameterError("lattice: local dimension q must be >= 2");
  if (static_cast<int>(spec_.extents.size()) != spec_.s) {
    throw ParameterError("lattice: need one extent per axis");
  }
  if (spec_.boundary.empty()) spec_.boundary.assign(spec_.extents.size(), Boundary::open);
  if (spec_.boundary.size() != spec_.extents.size()) {
    throw ParameterError("lattice: need one boundary flag per axis");
  }
  long long n = 1;
  for (int e : spec_.extents) {
    if (e < 1) throw ParameterError("lattice: extents must be positive");
    n *= e;
    if (n > 1'000'000) throw CapacityError("lattice: more than 10^6 sites");
  }
  num_sites_ = static_cast<int>(n);
}

Lattice Lattice::chain(int n, Boundary b, int q) {
  return Lattice(LatticeSpec{1, {n}, {b}, q});
}

Coords Lattice::coords(Site x) const {
  if (!contains(x)) throw DomainError("site " + std::to_string(x) + " is not in the lattice");
  Coords c(spec_.extents.size());
  for (int axis = spec_.s - 1; axis >= 0; --axis) {
    c[axis] = x % spec_.extents[axis];
    x /= spec_.extents[axis];
  }
  return c;
}

Site Lattice::index(const Coords& c) const {
  if (static_cast<int>(c.size()) != spec_.s) throw DomainError("coordinate arity mismatch");
  Site x = 0;
  for (int axis = 0; axis < spec_.s; ++axis) {
    if (c[axis] < 0 || c[axis] >= spec_.extents[axis]) {
      throw DomainError("coordinate outside the lattice on axis " + std::to_string(axis));
    }
    x = x * spec_.extents[axis] + c[axis];
  }
  return x;
}

int Lattice::distance(Site x, Site y) const {
  const Coords a = coords(x);
  const Coords b = coords(y);
  int d = 0;
  for (int axis = 0; axis < spec_.s; ++axis) {
    int delta = std::abs(a[axis] - b[axis]);
    if (spec_.boundary[axis] == Boundary::periodic) {
      delta = std::min(delta, spec_.extents[axis] - delta);
    }
    d = std::max(d, delta);
  }
  return d;
}

bool Lattice::operator==(const Lattice& other) const {
  return spec_.s == other.spec_.s && spec_.q == other.spec_.q &&
         spec_.extents == other.spec_.extents && spec_.boundary == other.spec_.boundary;
}

Region::Region(const Lattice& lattice, std::vector<Site> sites) : sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  if (std::adjacent_find(sites_.begin(), sites_.end()) != sites_.end()) {
    throw DomainError("region has duplicate sites");
  }
  for (Site x : sites_) {
    if (!lattice.contains(x)) {
      throw DomainError("region site " + std::to_string(x) + " is not in the lattice");
    }
  }
}

Region Region::all(const Lattice& lattice) {
  std::vector<Site> s(static_cast<std::size_t>(lattice.num_sites()));
  for (int i = 0; i < lattice.num_sites(); ++i) s[static_cast<std::size_t>(i)] = i;
  return Region(lattice, std::move(s));
}

Region Region::box(const Lattice& lattice, const Coords& lo, const Coords& hi) {
  if (static_cast<int>(lo.size()) != lattice.s() || static_cast<int>(hi.size()) != lattice.s()) {
    throw DomainError("box corners need one coordinate per axis");
  }
  std::vector<Site> sites;
  for (Site x = 0; x < lattice.num_sites(); ++x) {
    const Coords c = lattice.coords(x);
    bool inside = true;
    for (int axis = 0; axis < lattice.s() && inside; ++axis) {
      inside = c[axis] >= lo[axis] && c[axis] <= hi[axis];
    }
    if (inside) sites.push_back(x);
  }
  for (int axis = 0; axis < lattice.s(); ++axis) {
    if (lo[axis] < 0 || hi[axis] >= lattice.spec().extents[axis] || lo[axis] > hi[axis]) {
      throw DomainError("box corner outside the lattice on axis " + std::to_string(axis));
    }
  }
  return Region(lattice, std::move(sites));
}

Region Region::interval(const Lattice& lattice, int lo, int hi) {
  std::vector<Site> sites;
  for (int x = lo; x <= hi; ++x) sites.push_back(x);
  return Region(lattice, std::move(sites));
}

bool Region::contains(Site x) const { return std::binary_search(sites_.begin(), sites_.end(), x); }

std::string Region::describe() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < sites_.size(); ++i) os << (i ? "," : "") << sites_[i];
  os << '}';
  return os.str();
}

Region set_union(const Lattice& lattice, const Region& a, const Region& b) {
  std::vector<Site> out;
  std::set_union(a.sites().begin(), a.sites().end(), b.sites().begin(), b.sites().end(),
                 std::back_inserter(out));
  return Region(lattice, std::move(out));
}

Region set_difference(const Lattice& lattice, const Region& a, const Region& b) {
  std::vector<Site> out;
  std::set_difference(a.sites().begin(), a.sites().end(), b.sites().begin(), b.sites().end(),
                      std::back_inserter(out));
  return Region(lattice, std::move(out));
}

bool is_subset(const Region& a, const Region& b) {
  return std::includes(b.sites().begin(), b.sites().end(), a.sites().begin(), a.sites().end());
}

bool disjoint(const Region& a, const Region& b) {
  for (Site x : a.sites())
    if (b.contains(x)) return false;
  return true;
}

int site_distance(const Lattice& lattice, Site x, Site y) { return lattice.distance(x, y); }

int distance_to(const Lattice& lattice, Site x, const Region& r) {
  int best = kInfiniteDistance;
  for (Site y : r.sites()) best = std::min(best, lattice.distance(x, y));
  return best;
}

int region_distance(const Lattice& lattice, const Region& a, const Region& b) {
  int best = kInfiniteDistance;
  for (Site x : a.sites()) best = std::min(best, distance_to(lattice, x, b));
  return best;
}

Region exterior(const Lattice& lattice, const Region& x) {
  return set_difference(lattice, Region::all(lattice), x);
}

Region boundary(const Lattice& lattice, const Region& x) {
  const Region ext = exterior(lattice, x);
  std::vector<Site> out;
  for (Site s : x.sites())
    if (distance_to(lattice, s, ext) == 1) out.push_back(s);
  return Region(lattice, std::move(out));
}

Region shell(const Lattice& lattice, const Region& x, int width) {
  const Region ext = exterior(lattice, x);
  std::vector<Site> out;
  for (Site s : x.sites())
    if (distance_to(lattice, s, ext) <= width) out.push_back(s);
  return Region(lattice, std::move(out));
}

Region neighborhood(const Lattice& lattice, const Region& r, int radius) {
  std::vector<Site> out;
  for (Site x = 0; x < lattice.num_sites(); ++x)
    if (distance_to(lattice, x, r) <= radius) out.push_back(x);
  return Region(lattice, std::move(out));
}

namespace {

bool neighborhood_clipped(const Lattice& lattice, const Region& r, int radius) {
  const auto& spec = lattice.spec();
  for (int axis = 0; axis < spec.s; ++axis) {
    const int extent = spec.extents[axis];
    if (spec.boundary[axis] == Boundary::periodic) {
      if (2 * radius + 1 > extent) return true;
      continue;
    }
    for (Site x : r.sites()) {
      const int c = lattice.coords(x)[axis];
      if (c - radius < 0 || c + radius >= extent) return true;
    }
  }
  return false;
}

}  // namespace

Geometry region_geometry(const Lattice& lattice, const Region& R, int l) {
  if (l < 5) throw ParameterError("region_geometry: margin l must be >= 5, got " + std::to_string(l));
  if (R.empty()) throw DomainError("region_geometry: R is empty");
  Geometry g;
  g.l = l;
  g.R = R;
  g.X = neighborhood(lattice, R, 2 * l);
  g.exterior = exterior(lattice, g.X);
  g.boundary = boundary(lattice, g.X);
  g.shell = shell(lattice, g.X, l);
  g.boundary_R = boundary(lattice, R);
  g.X_minus_R = set_difference(lattice, g.X, R);
  g.clipped = neighborhood_clipped(lattice, R, 2 * l);
  return g;
}

GeometryReport geometry_bounds_check(const Lattice& lattice, const Region& R, int l) {
  return geometry_bounds_check(lattice, region_geometry(lattice, R, l));
}

GeometryReport geometry_bounds_check(const Lattice& lattice, const Geometry& g) {
  GeometryReport rep;
  const int s = lattice.s();
  const double l = g.l;
  rep.l = g.l;
  rep.size_X = g.X.size();
  rep.size_boundary_X = g.boundary.size();
  rep.size_X_minus_R = g.X_minus_R.size();
  rep.size_boundary_R = g.boundary_R.size();
  rep.size_R = g.R.size();
  rep.clipped = g.clipped;

  const double cube = std::pow(5.0 * l, s);
  rep.bound_X = static_cast<double>(rep.size_R) * cube;
  rep.bound_boundary_X =
      static_cast<double>(rep.size_boundary_R) * 2.0 * s * std::pow(5.0 * l, s - 1);
  rep.bound_X_minus_R = static_cast<double>(rep.size_boundary_R) * cube;
  rep.holds_X = static_cast<double>(rep.size_X) <= rep.bound_X;
  rep.holds_boundary_X = static_cast<double>(rep.size_boundary_X) <= rep.bound_boundary_X;
  rep.holds_X_minus_R = static_cast<double>(rep.size_X_minus_R) <= rep.bound_X_minus_R;

  // hypercube: R equals the box spanned by its coordinates, equal sides
  Coords lo(static_cast<std::size_t>(s), kInfiniteDistance);
  Coords hi(static_cast<std::size_t>(s), -1);
  for (Site x : g.R.sites()) {
    const Coords c = lattice.coords(x);
    for (int a = 0; a < s; ++a) {
      lo[a] = std::min(lo[a], c[a]);
      hi[a] = std::max(hi[a], c[a]);
    }
  }
  long long box_sites = 1;
  bool equal_sides = true;
  for (int a = 0; a < s; ++a) {
    box_sites *= hi[a] - lo[a] + 1;
    equal_sides = equal_sides && (hi[a] - lo[a] == hi[0] - lo[0]);
  }
  rep.is_box = equal_sides && box_sites == static_cast<long long>(g.R.size());
  if (rep.is_box) {
    const double L = hi[0] - lo[0] + 1;
    rep.box_side = L;
    const double grow = 1.0 + 4.0 * l / L;
    rep.box_X = static_cast<double>(rep.size_R) * std::pow(grow, s);
    rep.box_boundary_X = static_cast<double>(rep.size_boundary_R) * std::pow(grow, s - 1);
    rep.box_X_minus_R = static_cast<double>(rep.size_boundary_X) * 2.0 * l;
  }
  return rep;
}

}  // namespace arealaw
