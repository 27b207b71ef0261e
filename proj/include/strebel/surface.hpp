#pragma once
// Flat cylinder decompositions of marked surfaces.
//
// A decomposition records the combinatorics of a surface swept out by
// horizontal cylinders: each cylinder has a core label, a circumference and a
// modulus, cylinder boundaries are partitioned into arcs, and arcs are glued
// in pairs.  Validation checks the structural invariants; similarity decides
// whether two decompositions share core curves and gluing combinatorics, the
// precondition for a finite asymptotic distance between their rays.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace strebel {

// One flat cylinder: label identifies the core curve class across
// decompositions, circumference is measured in the flat metric.
struct Cylinder {
  std::string label;
  double circumference = 1.0;
  double modulus = 1.0;
};

// An arc on a cylinder boundary circle, in arc length.  side is 1 or 2;
// the arc covers [start, start + length) and never wraps past the seam.
struct BoundaryArc {
  std::string cylinder;
  int side = 1;
  double start = 0.0;
  double length = 0.0;
};

// Two arcs of equal length identified isometrically.
struct GluingPair {
  BoundaryArc first;
  BoundaryArc second;
};

// A zero or simple pole of the underlying differential.  order -1 marks a
// puncture; order 0 a regular marked point; order n >= 1 a zero where n + 2
// horizontal separatrices meet.
struct CriticalPoint {
  int order = 0;
};

struct CylinderDecomposition {
  int genus = 0;
  int punctures = 0;
  bool unit_norm = false;
  std::vector<Cylinder> cylinders;
  std::vector<GluingPair> gluings;
  std::vector<CriticalPoint> critical_points;

  std::optional<std::size_t> index_of(const std::string& label) const {
    for (std::size_t i = 0; i < cylinders.size(); ++i)
      if (cylinders[i].label == label) return i;
    return std::nullopt;
  }
};

// The ordered core-curve labels of a decomposition.
struct CurveSystem {
  std::vector<std::string> ids;
};

inline CurveSystem curve_system(const CylinderDecomposition& spec) {
  CurveSystem cs;
  cs.ids.reserve(spec.cylinders.size());
  for (const auto& c : spec.cylinders) cs.ids.push_back(c.label);
  return cs;
}

// Validation result.  errors block downstream use; warnings flag suspicious
// but admissible data (e.g. an order sum that a closed-surface count would
// reject, which marked test configurations are allowed to violate).
struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool valid() const { return errors.empty(); }
  std::string summary() const {
    std::ostringstream os;
    for (const auto& e : errors) os << "error: " << e << '\n';
    for (const auto& w : warnings) os << "warning: " << w << '\n';
    return os.str();
  }
};

namespace detail {

inline std::string arc_str(const BoundaryArc& a) {
  std::ostringstream os;
  os << a.cylinder << "/side" << a.side << "[" << a.start << ","
     << a.start + a.length << ")";
  return os.str();
}

inline bool same_arc(const BoundaryArc& a, const BoundaryArc& b) {
  return a.cylinder == b.cylinder && a.side == b.side && a.start == b.start &&
         a.length == b.length;
}

}  // namespace detail

inline ValidationReport validate(const CylinderDecomposition& spec) {
  ValidationReport rep;
  auto fail = [&rep](const std::string& msg) { rep.errors.push_back(msg); };

  if (spec.genus < 0) fail("genus must be non-negative");
  if (spec.punctures < 0) fail("puncture count must be non-negative");
  if (3 * spec.genus - 3 + spec.punctures <= 0)
    fail("surface type must satisfy 3g - 3 + n > 0");

  if (spec.cylinders.empty()) fail("decomposition needs at least one cylinder");

  std::set<std::string> labels;
  for (const auto& c : spec.cylinders) {
    if (c.label.empty()) fail("cylinder label must be non-empty");
    if (!labels.insert(c.label).second)
      fail("duplicate cylinder label '" + c.label + "'");
    if (!(c.circumference > 0.0))
      fail("cylinder '" + c.label + "': circumference must be positive");
    if (!(c.modulus > 0.0))
      fail("cylinder '" + c.label + "': modulus must be positive");
  }

  // Arc well-formedness, the fixed-point-free pairing, and per-side coverage.
  const double tol = 1e-9;
  std::map<std::pair<std::string, int>, std::vector<const BoundaryArc*>> by_side;
  auto check_arc = [&](const BoundaryArc& a) -> bool {
    auto idx = spec.index_of(a.cylinder);
    if (!idx) {
      fail("gluing references unknown cylinder '" + a.cylinder + "'");
      return false;
    }
    if (a.side != 1 && a.side != 2) {
      fail("gluing side must be 1 or 2 on cylinder '" + a.cylinder + "'");
      return false;
    }
    const double c = spec.cylinders[*idx].circumference;
    if (!(a.length > 0.0) || a.start < -tol || a.start + a.length > c + tol) {
      fail("arc out of range: " + detail::arc_str(a));
      return false;
    }
    by_side[{a.cylinder, a.side}].push_back(&a);
    return true;
  };

  for (const auto& g : spec.gluings) {
    bool ok1 = check_arc(g.first);
    bool ok2 = check_arc(g.second);
    if (ok1 && ok2) {
      if (std::abs(g.first.length - g.second.length) > tol)
        fail("interval length mismatch: " + detail::arc_str(g.first) + " vs " +
             detail::arc_str(g.second));
      if (detail::same_arc(g.first, g.second))
        fail("arc glued to itself: " + detail::arc_str(g.first));
    }
  }

  // Each boundary circle must be covered exactly once by its glued arcs.
  for (std::size_t i = 0; i < spec.cylinders.size(); ++i) {
    for (int side = 1; side <= 2; ++side) {
      const auto key = std::make_pair(spec.cylinders[i].label, side);
      auto it = by_side.find(key);
      std::vector<const BoundaryArc*> arcs =
          it == by_side.end() ? std::vector<const BoundaryArc*>{} : it->second;
      std::sort(arcs.begin(), arcs.end(),
                [](const BoundaryArc* a, const BoundaryArc* b) {
                  return a->start < b->start;
                });
      double covered = 0.0;
      bool overlap = false;
      for (const auto* a : arcs) {
        if (a->start < covered - tol) overlap = true;
        covered = std::max(covered, a->start + a->length);
      }
      std::ostringstream where;
      where << spec.cylinders[i].label << "/side" << side;
      if (overlap) fail("overlapping arcs on " + where.str());
      double total = 0.0;
      for (const auto* a : arcs) total += a->length;
      if (std::abs(total - spec.cylinders[i].circumference) > 1e-6)
        fail("arcs on " + where.str() + " do not cover the boundary circle");
    }
  }

  // Critical point bookkeeping.  Punctures carry order -1.
  int order_sum = 0;
  int poles = 0;
  for (const auto& p : spec.critical_points) {
    if (p.order < -1) fail("critical point order must be >= -1");
    order_sum += p.order;
    if (p.order == -1) ++poles;
  }
  if (poles != spec.punctures) {
    std::ostringstream os;
    os << "expected " << spec.punctures << " order -1 points, found " << poles;
    fail(os.str());
  }
  if (order_sum != 4 * spec.genus - 4) {
    std::ostringstream os;
    os << "order sum " << order_sum << " does not match 4g-4 = "
       << 4 * spec.genus - 4;
    rep.warnings.push_back(os.str());
  }

  if (spec.unit_norm) {
    double norm = 0.0;
    for (const auto& c : spec.cylinders)
      norm += c.modulus * c.circumference * c.circumference;
    if (std::abs(norm - 1.0) > 1e-9) {
      std::ostringstream os;
      os << "unit-norm flag set but sum m_j c_j^2 = " << norm;
      fail(os.str());
    }
  }
  return rep;
}

// Natural local coordinate at a critical point of order n: the chart
// zeta = (2 / (n + 2)) z^((n + 2) / 2), principal branch with arg z in
// (-pi, pi].  Each angular sector of width 2 pi / (n + 2) maps onto a half
// plane, so sector boundary rays land on the real axis.
inline std::complex<double> critical_chart(int order, std::complex<double> z) {
  if (order < -1)
    throw std::invalid_argument("critical_chart: order must be >= -1");
  if (z == std::complex<double>(0.0, 0.0) && order % 2 != 0)
    throw std::invalid_argument(
        "critical_chart: z = 0 is a branch point for odd order");
  const double p = (order + 2) / 2.0;
  if (z == std::complex<double>(0.0, 0.0))
    return std::complex<double>(0.0, 0.0);
  double r = std::abs(z);
  double th = std::arg(z);
  if (th <= -std::numbers::pi) th += 2.0 * std::numbers::pi;  // enforce (-pi, pi]
  const double scale = 2.0 / (order + 2);
  return std::polar(scale * std::pow(r, p), p * th);
}

// ---- similarity -----------------------------------------------------------

// A boundary disk of the limit surface: one side of one pinched cylinder.
struct DiskId {
  std::string cylinder;
  int side = 1;
  friend bool operator<(const DiskId& a, const DiskId& b) {
    return std::tie(a.cylinder, a.side) < std::tie(b.cylinder, b.side);
  }
  friend bool operator==(const DiskId& a, const DiskId& b) {
    return a.cylinder == b.cylinder && a.side == b.side;
  }
};

// Connected components of the side-gluing graph: vertices are the 2k
// cylinder sides, edges join sides that share a gluing pair.  Components are
// returned sorted by their smallest disk id, disks sorted within.
inline std::vector<std::vector<DiskId>> disk_components(
    const CylinderDecomposition& spec) {
  std::vector<DiskId> disks;
  for (const auto& c : spec.cylinders)
    for (int side = 1; side <= 2; ++side) disks.push_back({c.label, side});
  std::sort(disks.begin(), disks.end());

  auto find_index = [&](const DiskId& d) {
    return static_cast<std::size_t>(
        std::lower_bound(disks.begin(), disks.end(), d) - disks.begin());
  };

  // Union-find over disk indices.
  std::vector<std::size_t> parent(disks.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto root = [&](std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  for (const auto& g : spec.gluings) {
    DiskId a{g.first.cylinder, g.first.side};
    DiskId b{g.second.cylinder, g.second.side};
    std::size_t ra = root(find_index(a));
    std::size_t rb = root(find_index(b));
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }

  std::map<std::size_t, std::vector<DiskId>> groups;
  for (std::size_t i = 0; i < disks.size(); ++i)
    groups[root(i)].push_back(disks[i]);
  std::vector<std::vector<DiskId>> out;
  out.reserve(groups.size());
  for (auto& [r, v] : groups) out.push_back(std::move(v));
  // map iteration is ordered by root index, which is the smallest member,
  // and disks were inserted in sorted order.
  return out;
}

// A matched pair of decompositions whose rays stay at bounded distance.
// curve_match and component_match are index maps from left to right.
// end_distance is the distance between the limit points in the quotient
// metric on the limit strata; it is an input, supplied with the pair.
struct SimilarPair {
  CylinderDecomposition left;
  CylinderDecomposition right;
  std::vector<std::pair<std::size_t, std::size_t>> curve_match;
  std::vector<std::pair<std::size_t, std::size_t>> component_match;
  std::optional<double> end_distance;

  std::size_t cylinder_count() const { return curve_match.size(); }
  double left_modulus(std::size_t i) const {
    return left.cylinders[curve_match[i].first].modulus;
  }
  double right_modulus(std::size_t i) const {
    return right.cylinders[curve_match[i].second].modulus;
  }
};

struct NotSimilar {
  std::string reason;
};

using SimilarityOutcome = std::variant<SimilarPair, NotSimilar>;

// Decide similarity: both specs valid, same core labels, and the label/side
// preserving bijection of disks must carry gluing-graph components onto
// gluing-graph components.  Interval counts and lengths are deliberately not
// compared; only the component structure matters for the limit surfaces.
inline SimilarityOutcome check_similar(const CylinderDecomposition& a,
                                       const CylinderDecomposition& b) {
  auto ra = validate(a);
  if (!ra.valid())
    throw std::invalid_argument("check_similar: left spec invalid:\n" +
                                ra.summary());
  auto rb = validate(b);
  if (!rb.valid())
    throw std::invalid_argument("check_similar: right spec invalid:\n" +
                                rb.summary());

  if (a.cylinders.size() != b.cylinders.size())
    return NotSimilar{"cylinder counts differ"};

  std::vector<std::pair<std::size_t, std::size_t>> match;
  for (std::size_t i = 0; i < a.cylinders.size(); ++i) {
    auto j = b.index_of(a.cylinders[i].label);
    if (!j)
      return NotSimilar{"core label '" + a.cylinders[i].label +
                        "' missing on the right"};
    match.emplace_back(i, *j);
  }

  const auto comps_a = disk_components(a);
  const auto comps_b = disk_components(b);
  if (comps_a.size() != comps_b.size())
    return NotSimilar{"gluing graphs incompatible: component counts differ"};

  std::vector<std::pair<std::size_t, std::size_t>> comp_match;
  std::vector<bool> used(comps_b.size(), false);
  for (std::size_t i = 0; i < comps_a.size(); ++i) {
    // Labels are shared, so the image of a left component is itself a disk
    // set; it must equal some right component exactly.
    bool found = false;
    for (std::size_t j = 0; j < comps_b.size(); ++j) {
      if (used[j]) continue;
      if (comps_a[i] == comps_b[j]) {
        comp_match.emplace_back(i, j);
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found)
      return NotSimilar{"gluing graphs incompatible: component structure differs"};
  }

  SimilarPair pair;
  pair.left = a;
  pair.right = b;
  pair.curve_match = std::move(match);
  pair.component_match = std::move(comp_match);
  return pair;
}

}  // namespace strebel
