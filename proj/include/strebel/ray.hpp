#pragma once
// The geodesic ray generated by a cylinder decomposition.
//
// At time t every cylinder of modulus m is stretched to modulus e^{2t} m; in
// the unit-disk model of a cylinder half this turns the annulus
// {e^{-m pi} <= |z| < 1} into {e^{-e^{2t} m pi} <= |z| < 1} by the radial
// stretch r -> r^{e^{2t}}.  Inner radii underflow long before t gets large
// (e^{-e^{2t} pi} hits double range near t = 2.9 for m = 1), so states carry
// the log inner radius L(t) = -e^{2t} m pi as the canonical field and expose
// the raw radius only as a convenience.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "strebel/surface.hpp"

namespace strebel {

struct RayCylinderState {
  std::string label;
  double base_modulus = 1.0;     // modulus at t = 0
  double scaled_modulus = 1.0;   // e^{2t} * base_modulus
  double log_inner_radius = 0.0; // L(t) = -e^{2t} * base_modulus * pi

  // May underflow to zero for large t; L(t) is the field to trust.
  double inner_radius() const { return std::exp(log_inner_radius); }
};

struct RayPoint {
  double t = 0.0;
  std::vector<RayCylinderState> cylinders;
};

inline RayPoint ray_point(const CylinderDecomposition& spec, double t) {
  if (t < 0.0) throw std::domain_error("ray_point: t must be non-negative");
  auto rep = validate(spec);
  if (!rep.valid())
    throw std::invalid_argument("ray_point: invalid spec:\n" + rep.summary());
  RayPoint p;
  p.t = t;
  const double growth = std::exp(2.0 * t);
  p.cylinders.reserve(spec.cylinders.size());
  for (const auto& c : spec.cylinders) {
    RayCylinderState s;
    s.label = c.label;
    s.base_modulus = c.modulus;
    s.scaled_modulus = c.modulus * growth;
    s.log_inner_radius = -std::numbers::pi * s.scaled_modulus;
    p.cylinders.push_back(std::move(s));
  }
  return p;
}

// Advance a ray point by dt.  Flowing is time addition, so flowing s then t
// lands bit-for-bit on ray_point(spec, s + t).
inline RayPoint flow(const CylinderDecomposition& spec, const RayPoint& p,
                     double dt) {
  return ray_point(spec, p.t + dt);
}

// The radial stretch on a cylinder half in the unit-disk model.
inline double radial_stretch(double t, double r) {
  if (!(r > 0.0 && r < 1.0))
    throw std::domain_error("radial_stretch: r must lie in (0, 1)");
  return std::exp(std::exp(2.0 * t) * std::log(r));
}

// The affine map K^{-1/2} x + i K^{1/2} y realizing a ray segment.
struct AffineStretch {
  double K = 1.0;
  std::complex<double> apply(std::complex<double> z) const {
    return {z.real() / std::sqrt(K), z.imag() * std::sqrt(K)};
  }
  double dilatation() const { return K; }
  double half_log_dilatation() const { return 0.5 * std::log(K); }
};

// Teichmueller map between the time-s and time-t points of one ray.
inline AffineStretch segment_stretch(double s, double t) {
  return AffineStretch{std::exp(2.0 * std::abs(s - t))};
}

// Distance along a single ray.  Rays are unit speed: d(r(s), r(t)) = |s - t|.
inline double ray_distance(double s, double t) { return std::abs(s - t); }

// The limit at t = infinity: every core curve is pinched to a node, and the
// cylinder halves become punctured disks glued along the arcs they already
// shared at finite time.  Components are the connected pieces of the glued
// disk complex, ordered by smallest contained disk id.
struct NodedLimit {
  struct Node {
    std::string cylinder;  // the pinched core curve
  };
  struct Component {
    std::vector<DiskId> disks;        // sorted
    std::vector<GluingPair> gluings;  // the arcs glued inside this component
  };
  std::vector<Node> nodes;
  std::vector<Component> components;
};

inline NodedLimit limit_point(const CylinderDecomposition& spec) {
  auto rep = validate(spec);
  if (!rep.valid())
    throw std::invalid_argument("limit_point: invalid spec:\n" + rep.summary());
  NodedLimit lim;
  lim.nodes.reserve(spec.cylinders.size());
  for (const auto& c : spec.cylinders) lim.nodes.push_back({c.label});

  for (auto& disks : disk_components(spec)) {
    NodedLimit::Component comp;
    comp.disks = std::move(disks);
    for (const auto& g : spec.gluings) {
      DiskId d{g.first.cylinder, g.first.side};
      if (std::binary_search(comp.disks.begin(), comp.disks.end(), d))
        comp.gluings.push_back(g);
    }
    lim.components.push_back(std::move(comp));
  }
  return lim;
}

}  // namespace strebel
