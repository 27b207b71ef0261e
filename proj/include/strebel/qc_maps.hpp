#pragma once
// Quasiconformal interpolation between pinching annuli.
//
// A cylinder of base modulus m sits at ray time t as the annulus
// {delta(t) <= |z| < 1} with log delta(t) = -e^{2t} m pi.  To compare against
// a cylinder whose modulus grows M times as fast (M = m'/m), the comparison
// map is assembled from three pieces per cylinder side:
//
//   inner  (delta <= |z| <= Delta):  rescales the log-radius affinely so the
//          inner boundary circle lands on radius delta^M while the outer edge
//          matches c z; dilatation has the closed form below and tends to
//          (M - M^X)/(1 - M^X) as t grows.
//   blend  (Delta <= |z| <= 2 Delta): Q(z) = c z + phi(|z|) psi(z) with
//          phi(r) = r/Delta - 1, bridging linearly into the boundary germ
//          c z + psi(z) of the outer diffeomorphism; its dilatation tends
//          to 1 because |psi| = O(Delta^2) on the band.
//   outer  (beyond 2 Delta): the end diffeomorphism itself, carried only
//          through its dilatation bound and its boundary germ.
//
// Here Delta(t) = delta(t)^{M^X} for a fixed exponent X < 0; choosing X below
// log(eps / (M + eps - 1)) / log M keeps the inner limit under M + eps.  All
// inner-map arithmetic runs in log coordinates w = log z, where the map is
// affine, so nothing underflows no matter how deep the annulus is.
//
// The node map straightens a neighborhood of a node: it is the identity on
// the inner square [0, eps^2]^2, a controlled vertical shear elsewhere on
// [0, eps]^2, mirrored across the imaginary axis, and matches x + i(1+eps) y
// on the outer boundary.  Its dilatation tends to 1 with eps.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "strebel/beltrami.hpp"
#include "strebel/surface.hpp"

namespace strebel {

namespace detail {

inline double principal_arg(std::complex<double> c, int side) {
  double th = std::arg(c);
  const double pi = std::numbers::pi;
  if (side == 2) {
    if (th >= pi) th -= 2.0 * pi;  // side 2 convention: [-pi, pi)
  } else {
    if (th <= -pi) th += 2.0 * pi;  // side 1 convention: (-pi, pi]
  }
  return th;
}

}  // namespace detail

// ---- piecewise maps --------------------------------------------------------

struct Region {
  enum class Kind { ring, rect };
  Kind kind = Kind::ring;
  double r_lo = 0.0, r_hi = 0.0;            // ring radii
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;  // rectangle corners

  static Region ring(double lo, double hi) {
    Region r;
    r.kind = Kind::ring;
    r.r_lo = lo;
    r.r_hi = hi;
    return r;
  }
  static Region rect(double x0, double x1, double y0, double y1) {
    Region r;
    r.kind = Kind::rect;
    r.x0 = x0;
    r.x1 = x1;
    r.y0 = y0;
    r.y1 = y1;
    return r;
  }
  bool contains(std::complex<double> z, double tol = 1e-9) const {
    if (kind == Kind::ring) {
      double r = std::abs(z);
      double slack = tol * r_hi;
      return r >= r_lo - slack && r <= r_hi + slack;
    }
    double sx = tol * (x1 - x0 + 1.0), sy = tol * (y1 - y0 + 1.0);
    return z.real() >= x0 - sx && z.real() <= x1 + sx && z.imag() >= y0 - sy &&
           z.imag() <= y1 + sy;
  }
};

struct Piece {
  std::string name;
  Region region;
  ComplexMap map;
};

// A map defined piece by piece on a tiled domain.  Adjacent pieces are
// required to agree on shared boundaries; check_seams verifies it.
struct PiecewiseMap {
  std::vector<Piece> pieces;

  std::complex<double> operator()(std::complex<double> z) const {
    for (const auto& p : pieces)
      if (p.region.contains(z)) return p.map(z);
    throw std::domain_error("PiecewiseMap: point outside every piece");
  }
};

struct SeamReport {
  double max_mismatch = 0.0;
  std::size_t seams = 0;
  std::size_t samples = 0;
};

// Sample every shared piece boundary and record the worst disagreement
// between the two closed-form pieces meeting there.
inline SeamReport check_seams(const PiecewiseMap& pm, int samples_per_seam = 1000) {
  SeamReport rep;
  auto record = [&rep](double d) {
    if (d > rep.max_mismatch) rep.max_mismatch = d;
    ++rep.samples;
  };
  const double rel = 1e-12;
  for (std::size_t i = 0; i < pm.pieces.size(); ++i) {
    for (std::size_t j = i + 1; j < pm.pieces.size(); ++j) {
      const auto& a = pm.pieces[i];
      const auto& b = pm.pieces[j];
      if (a.region.kind == Region::Kind::ring &&
          b.region.kind == Region::Kind::ring) {
        double r = 0.0;
        if (std::abs(a.region.r_hi - b.region.r_lo) <= rel * b.region.r_lo)
          r = a.region.r_hi;
        else if (std::abs(b.region.r_hi - a.region.r_lo) <= rel * a.region.r_lo)
          r = b.region.r_hi;
        else
          continue;
        ++rep.seams;
        for (int k = 0; k < samples_per_seam; ++k) {
          double th = 2.0 * std::numbers::pi * (k + 0.5) / samples_per_seam;
          auto z = std::polar(r, th);
          record(std::abs(a.map(z) - b.map(z)));
        }
      } else if (a.region.kind == Region::Kind::rect &&
                 b.region.kind == Region::Kind::rect) {
        // vertical seam x = const
        auto vseam = [&](const Region& l, const Region& r2) -> bool {
          if (std::abs(l.x1 - r2.x0) > rel * (std::abs(l.x1) + 1.0)) return false;
          double lo = std::max(l.y0, r2.y0), hi = std::min(l.y1, r2.y1);
          if (!(hi - lo > 0.0)) return false;
          ++rep.seams;
          for (int k = 0; k < samples_per_seam; ++k) {
            double y = lo + (hi - lo) * (k + 0.5) / samples_per_seam;
            std::complex<double> z(l.x1, y);
            record(std::abs(a.map(z) - b.map(z)));
          }
          return true;
        };
        auto hseam = [&](const Region& dn, const Region& up) -> bool {
          if (std::abs(dn.y1 - up.y0) > rel * (std::abs(dn.y1) + 1.0)) return false;
          double lo = std::max(dn.x0, up.x0), hi = std::min(dn.x1, up.x1);
          if (!(hi - lo > 0.0)) return false;
          ++rep.seams;
          for (int k = 0; k < samples_per_seam; ++k) {
            double x = lo + (hi - lo) * (k + 0.5) / samples_per_seam;
            std::complex<double> z(x, dn.y1);
            record(std::abs(a.map(z) - b.map(z)));
          }
          return true;
        };
        if (!vseam(a.region, b.region) && !vseam(b.region, a.region)) {
          if (!hseam(a.region, b.region)) hseam(b.region, a.region);
        }
      }
    }
  }
  return rep;
}

// ---- interpolation parameters ---------------------------------------------

struct InterpolationParams {
  double modulus_ratio = 2.0;               // M = m'/m
  double collar_exponent = -1.0;            // X < 0
  std::complex<double> leading_coeff = 1.0; // c, the outer germ's linear term
  std::vector<std::complex<double>> series_tail;  // psi coefficients, z^2 up
  double eps = 0.25;                        // target slack eps'
  double base_modulus = 1.0;                // m
  int side = 1;                             // twist-angle convention, 1 or 2

  double ratio_power() const {              // M^X
    return std::exp(collar_exponent * std::log(modulus_ratio));
  }
  double log_inner_radius(double t) const { // log delta(t)
    return -std::exp(2.0 * t) * base_modulus * std::numbers::pi;
  }
  double log_collar_radius(double t) const { // log Delta(t)
    return ratio_power() * log_inner_radius(t);
  }
  std::complex<double> log_leading_coeff() const {
    return {std::log(std::abs(leading_coeff)),
            detail::principal_arg(leading_coeff, side)};
  }

  ValidationReport validate() const {
    ValidationReport rep;
    if (!(modulus_ratio > 0.0))
      rep.errors.push_back("modulus ratio must be positive");
    if (!(std::abs(leading_coeff) > 0.0))
      rep.errors.push_back("leading coefficient must be nonzero");
    if (!(eps > 0.0 && eps < 1.0))
      rep.errors.push_back("eps must lie in (0, 1)");
    if (!(base_modulus > 0.0))
      rep.errors.push_back("base modulus must be positive");
    if (modulus_ratio > 1.0) {
      if (!(collar_exponent < 0.0))
        rep.errors.push_back("collar exponent must be negative");
      const double bound = std::log(eps / (modulus_ratio + eps - 1.0)) /
                           std::log(modulus_ratio);
      // Exponents above the bound still define a map but forfeit the
      // K < M + eps guarantee; several reference fixtures do exactly that.
      if (!(collar_exponent < bound))
        rep.warnings.push_back(
            "collar exponent does not meet the eps-slack bound; limit "
            "dilatation may exceed modulus_ratio + eps");
    }
    return rep;
  }
};

// Largest admissible-by-a-factor-2 exponent: B is the exact bound for the
// limit dilatation to stay under M + eps, and 2B sits strictly below it.
inline double choose_exponent(double modulus_ratio, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("choose_exponent: eps must lie in (0, 1)");
  if (!(modulus_ratio > 1.0))
    throw std::domain_error(
        "choose_exponent: ratio must exceed 1; take the reciprocal and swap sides");
  const double bound = std::log(eps / (modulus_ratio + eps - 1.0)) /
                       std::log(modulus_ratio);
  return 2.0 * bound;
}

// Earliest time from which the image annulus is genuinely nested: the inner
// image radius delta^M must drop below |c| Delta.  Equivalent to
// log delta(t) < log|c| / (M - M^X).
inline double threshold_time(const InterpolationParams& p) {
  if (!(p.modulus_ratio > 1.0))
    throw std::domain_error("threshold_time: requires modulus ratio > 1");
  const double gap = p.modulus_ratio - p.ratio_power();
  const double r = std::log(std::abs(p.leading_coeff)) / gap;
  if (r >= 0.0) return 0.0;
  const double t = 0.5 * std::log(-r / (p.base_modulus * std::numbers::pi));
  return t > 0.0 ? t : 0.0;
}

// ---- inner map -------------------------------------------------------------

// Inner map in log coordinates.  With u = Re w, Ld = log delta(t),
// LD = log Delta(t) and a = (1 - M)/(1 - M^X):
//
//     W(w) = w + a (LD - u) + log(c) (u - Ld) / (LD - Ld),
//
// an affine map of the log-annulus.  At u = Ld it reduces to
// w + (M - 1) Ld (the radial rescale delta^{M-1} z); at u = LD it is
// w + log c (the linear match c z).
inline std::complex<double> inner_map_log(const InterpolationParams& p,
                                          double t,
                                          std::complex<double> log_z) {
  if (!(p.modulus_ratio > 1.0))
    throw std::domain_error("inner_map_log: requires modulus ratio > 1");
  const double ld = p.log_inner_radius(t);
  const double lD = p.log_collar_radius(t);
  const double u = log_z.real();
  const double slack = 1e-9 * std::abs(ld);
  if (u < ld - slack || u > lD + slack)
    throw std::domain_error("inner_map_log: log-radius outside [log delta, log Delta]");
  const double mx = p.ratio_power();
  const double a = (1.0 - p.modulus_ratio) / (1.0 - mx);
  return log_z + a * (lD - u) + p.log_leading_coeff() * ((u - ld) / (lD - ld));
}

// Linear-coordinate wrapper; only usable while delta(t) is representable.
inline std::complex<double> inner_map(const InterpolationParams& p, double t,
                                      std::complex<double> z) {
  if (z == std::complex<double>(0.0, 0.0))
    throw std::domain_error("inner_map: z = 0");
  if (p.log_inner_radius(t) < -700.0)
    throw std::domain_error(
        "inner_map: annulus too deep for linear coordinates; use inner_map_log");
  return std::exp(inner_map_log(p, t, std::log(z)));
}

struct InnerDilatation {
  double value = 1.0;  // K at this t
  double limit = 1.0;  // t -> infinity limit, (M - M^X)/(1 - M^X)
};

// Closed-form dilatation of the inner map.  Writing
// A = alpha/2 + log(c) / (2 (M^X - 1) log delta(t)) with
// alpha = (M - 1)/(1 - M^X), the affine log-coordinate form gives
// K = (|A + 1| + |A|) / (|A + 1| - |A|).
inline InnerDilatation inner_dilatation(const InterpolationParams& p, double t) {
  if (!(p.modulus_ratio > 1.0))
    throw std::domain_error("inner_dilatation: requires modulus ratio > 1");
  const double mx = p.ratio_power();
  const double alpha = (p.modulus_ratio - 1.0) / (1.0 - mx);
  const std::complex<double> A =
      0.5 * alpha +
      p.log_leading_coeff() / (2.0 * (mx - 1.0) * p.log_inner_radius(t));
  const double hi = std::abs(A + 1.0);
  const double lo = std::abs(A);
  const double den = hi - lo;
  if (!(den > 1e-15 * (hi + lo)))
    throw std::domain_error(
        "inner_dilatation: singular configuration, |A + 1| <= |A|");
  InnerDilatation d;
  d.value = (hi + lo) / den;
  d.limit = 1.0 + alpha;
  return d;
}

// ---- blend map -------------------------------------------------------------

namespace detail {

// Tail data rescaled to the unit band: on |zeta| in [1, 2] with z = Delta zeta
// the tail psi(z) = sum c_i z^i becomes sum d_i zeta^i with
// d_i = c_i Delta^{i-1} (note one power of Delta is divided back out so that
// psi(z) / Delta = sum d_i zeta^i).  Underflow of Delta^{i-1} is harmless: it
// reproduces the vanishing of the tail exactly.
inline std::vector<std::complex<double>> scaled_tail(
    const std::vector<std::complex<double>>& tail, double log_collar) {
  std::vector<std::complex<double>> d(tail.size());
  for (std::size_t k = 0; k < tail.size(); ++k) {
    const double i = static_cast<double>(k + 2);
    d[k] = tail[k] * std::exp((i - 1.0) * log_collar);
  }
  return d;
}

inline std::complex<double> tail_eval(
    const std::vector<std::complex<double>>& d, std::complex<double> zeta) {
  // sum d_k zeta^{k+2}, Horner from the top
  std::complex<double> acc = 0.0;
  for (std::size_t k = d.size(); k-- > 0;) acc = acc * zeta + d[k];
  return acc * zeta * zeta;
}

inline std::complex<double> tail_deriv(
    const std::vector<std::complex<double>>& d, std::complex<double> zeta) {
  // sum (k+2) d_k zeta^{k+1}
  std::complex<double> acc = 0.0;
  for (std::size_t k = d.size(); k-- > 0;)
    acc = acc * zeta + (static_cast<double>(k) + 2.0) * d[k];
  return acc * zeta;
}

}  // namespace detail

// Q(z) = c z + phi(|z|) psi(z) with phi(r) = r/Delta - 1 on Delta <= |z| <= 2 Delta.
inline std::complex<double> blend_map(const InterpolationParams& p, double t,
                                      std::complex<double> z) {
  const double lD = p.log_collar_radius(t);
  if (lD < -600.0)
    throw std::domain_error(
        "blend_map: collar radius underflows at this t; evaluate at moderate t");
  const double Delta = std::exp(lD);
  const double r = std::abs(z);
  if (r < Delta * (1.0 - 1e-9) || r > 2.0 * Delta * (1.0 + 1e-9))
    throw std::domain_error("blend_map: |z| outside [Delta, 2 Delta]");
  std::complex<double> psi = 0.0;
  for (std::size_t k = p.series_tail.size(); k-- > 0;)
    psi = psi * z + p.series_tail[k];
  psi *= z * z;
  return p.leading_coeff * z + (r / Delta - 1.0) * psi;
}

struct BlendDerivatives {
  std::complex<double> d_z;
  std::complex<double> d_zbar;
};

// Wirtinger derivatives of the blend map at z = Delta zeta, |zeta| in [1, 2]:
//   d_zbar Q = e^{i arg z} psi(z) / (2 Delta)
//   d_z    Q = c + e^{-i arg z} psi(z) / (2 Delta) + phi(|z|) psi'(z)
// evaluated through the rescaled tail so only Delta^{i-1} factors appear.
inline BlendDerivatives blend_derivatives(
    std::complex<double> c, const std::vector<std::complex<double>>& tail,
    double log_collar, std::complex<double> zeta) {
  const auto d = detail::scaled_tail(tail, log_collar);
  const std::complex<double> half_s = 0.5 * detail::tail_eval(d, zeta);
  const std::complex<double> phase = std::polar(1.0, std::arg(zeta));
  BlendDerivatives out;
  out.d_zbar = phase * half_s;
  out.d_z = c + half_s / phase +
            (std::abs(zeta) - 1.0) * detail::tail_deriv(d, zeta);
  return out;
}

// Supremum of the blend dilatation over the band, sampled on an
// (nr + 1) x ntheta polar grid of the rescaled annulus 1 <= |zeta| <= 2.
inline double blend_sup_dilatation(std::complex<double> c,
                                   const std::vector<std::complex<double>>& tail,
                                   double log_collar, int nr = 48,
                                   int ntheta = 96) {
  if (tail.empty()) return 1.0;
  const auto d = detail::scaled_tail(tail, log_collar);
  double sup = 1.0;
  for (int i = 0; i <= nr; ++i) {
    const double r = 1.0 + static_cast<double>(i) / nr;
    for (int j = 0; j < ntheta; ++j) {
      const double th = 2.0 * std::numbers::pi * j / ntheta;
      const std::complex<double> zeta = std::polar(r, th);
      const std::complex<double> half_s = 0.5 * detail::tail_eval(d, zeta);
      const std::complex<double> phase = std::polar(1.0, th);
      const std::complex<double> dz =
          c + half_s / phase + (r - 1.0) * detail::tail_deriv(d, zeta);
      const std::complex<double> dzb = phase * half_s;
      const double num = std::abs(dzb), den = std::abs(dz);
      if (!(num < den))
        throw std::domain_error(
            "blend_sup_dilatation: |mu| >= 1 on the band; Delta too large");
      const double mu = num / den;
      const double K = (1.0 + mu) / (1.0 - mu);
      if (K > sup) sup = K;
    }
  }
  return sup;
}

inline double blend_sup_dilatation(const InterpolationParams& p, double t,
                                   int nr = 48, int ntheta = 96) {
  return blend_sup_dilatation(p.leading_coeff, p.series_tail,
                              p.log_collar_radius(t), nr, ntheta);
}

// Bound constant for the band: C = max_{|z| <= 2 Delta} |psi(z)| / Delta^2,
// so that |psi| <= C Delta^2 there and sup K <= 1 + 5 C Delta for small Delta.
inline double blend_tail_bound(const std::vector<std::complex<double>>& tail,
                               double log_collar) {
  double C = 0.0;
  for (std::size_t k = 0; k < tail.size(); ++k) {
    const double i = static_cast<double>(k + 2);
    C += std::abs(tail[k]) * std::pow(2.0, i) * std::exp((i - 2.0) * log_collar);
  }
  return C;
}

// Assembled comparison map on one cylinder side, in linear coordinates.
// Requires moderate t so the radii are representable.  The outer piece is the
// boundary germ c z + psi(z), carried on a thin ring past 2 Delta.
inline PiecewiseMap interpolation_pieces(const InterpolationParams& p, double t) {
  const double ld = p.log_inner_radius(t);
  if (ld < -700.0)
    throw std::domain_error("interpolation_pieces: annulus too deep for linear coordinates");
  const double delta = std::exp(ld);
  const double Delta = std::exp(p.log_collar_radius(t));
  PiecewiseMap pm;
  pm.pieces.push_back(
      {"inner", Region::ring(delta, Delta),
       [p, t](std::complex<double> z) { return inner_map(p, t, z); }});
  pm.pieces.push_back(
      {"blend", Region::ring(Delta, 2.0 * Delta),
       [p, t](std::complex<double> z) { return blend_map(p, t, z); }});
  const double outer_hi = std::min(4.0 * Delta, 1.0);
  pm.pieces.push_back({"outer-germ", Region::ring(2.0 * Delta, outer_hi),
                       [p](std::complex<double> z) {
                         std::complex<double> psi = 0.0;
                         for (std::size_t k = p.series_tail.size(); k-- > 0;)
                           psi = psi * z + p.series_tail[k];
                         psi *= z * z;
                         return p.leading_coeff * z + psi;
                       }});
  return pm;
}

// ---- node map --------------------------------------------------------------

namespace detail {

// Vertical displacement of the node map on the right half 0 <= x, y <= eps.
// Piece indices: 1 inner square, 2 left band, 3 lower band, 4 outer square.
inline double node_shear(double eps, int piece, double x, double y) {
  const double e2 = eps * eps;
  switch (piece) {
    case 1:
      return y;
    case 2:
      return (y - eps * e2) / (1.0 - eps);
    case 3:
      return ((x + 1.0 - eps - e2) / (1.0 - eps)) * y;
    case 4: {
      const double num =
          (1.0 - e2 - eps * (x + 1.0 - eps - e2)) * y + e2 * (x - eps);
      return num / ((1.0 - eps) * (1.0 - eps));
    }
    default:
      throw std::logic_error("node_shear: bad piece index");
  }
}

inline int node_piece(double eps, double x, double y) {
  const double e2 = eps * eps;
  if (x <= e2) return y <= e2 ? 1 : 2;
  return y <= e2 ? 3 : 4;
}

}  // namespace detail

// The node-straightening map on [-eps, eps] x [0, eps] minus the origin.
// Identity on |x| <= eps^2, y <= eps^2; mirrored evenly across x = 0;
// equal to x + i (1 + eps) y on the outer boundary.
inline std::complex<double> node_map(double eps, std::complex<double> z) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("node_map: eps must lie in (0, 1)");
  if (z == std::complex<double>(0.0, 0.0))
    throw std::domain_error("node_map: the node itself is excluded");
  const double x = z.real(), y = z.imag();
  const double ax = std::abs(x);
  const double slack = 1e-12 * eps;
  if (ax > eps + slack || y < -slack || y > eps + slack)
    throw std::domain_error("node_map: point outside [-eps, eps] x [0, eps]");
  const int piece = detail::node_piece(eps, ax, y);
  if (piece == 1) return z;  // bit-exact identity near the node
  return {x, detail::node_shear(eps, piece, ax, y)};
}

// The node map as explicit pieces (right half cases 1..4 plus mirrors), for
// seam verification and grid pushforwards.
inline PiecewiseMap node_map_pieces(double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("node_map_pieces: eps must lie in (0, 1)");
  const double e2 = eps * eps;
  PiecewiseMap pm;
  struct Band {
    int piece;
    double x0, x1, y0, y1;
  };
  const Band bands[] = {{1, 0.0, e2, 0.0, e2},
                        {2, 0.0, e2, e2, eps},
                        {3, e2, eps, 0.0, e2},
                        {4, e2, eps, e2, eps}};
  for (int sign = +1; sign >= -1; sign -= 2) {
    for (const auto& b : bands) {
      Region reg = sign > 0 ? Region::rect(b.x0, b.x1, b.y0, b.y1)
                            : Region::rect(-b.x1, -b.x0, b.y0, b.y1);
      std::string name = std::string(sign > 0 ? "right-" : "left-") +
                         std::to_string(b.piece);
      int piece = b.piece;
      pm.pieces.push_back({name, reg, [eps, piece](std::complex<double> z) {
                             return std::complex<double>(
                                 z.real(), detail::node_shear(eps, piece,
                                                              std::abs(z.real()),
                                                              z.imag()));
                           }});
    }
  }
  return pm;
}

// Numeric sup of the node-map dilatation: finite differences on an n x n
// grid inside each piece, stepping well clear of the seams.
inline double node_map_sup_dilatation(double eps, int n = 32) {
  const auto pm = node_map_pieces(eps);
  double sup = 1.0;
  for (const auto& piece : pm.pieces) {
    const auto& r = piece.region;
    const double w = r.x1 - r.x0, h = r.y1 - r.y0;
    const double step = 1e-5 * std::min(w, h);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const std::complex<double> z(r.x0 + w * (i + 0.5) / n,
                                     r.y0 + h * (j + 0.5) / n);
        if (std::abs(z) < 4.0 * step) continue;  // skip the excluded origin
        const double K = beltrami_numeric(piece.map, z, step).dilatation;
        if (K > sup) sup = K;
      }
    }
  }
  return sup;
}

// ---- assembled comparison map ---------------------------------------------

// Raw twist audit: the two side twist angles must cancel short of a full
// turn, otherwise the assembled map leaves the intended homotopy class.
inline void twist_audit(double arg_side1, double arg_side2) {
  if (!(std::abs(arg_side1 + arg_side2) < 2.0 * std::numbers::pi))
    throw std::domain_error(
        "twist audit failed: side twist angles add to a full turn or more");
}

struct TransitionInput {
  std::string label;
  double modulus_ratio = 1.0;  // m'_j / m_j
  double base_modulus = 1.0;   // m_j
  double eps = 0.25;
  std::optional<double> exponent_override;
  std::complex<double> coeff_side1 = 1.0, coeff_side2 = 1.0;
  std::vector<std::complex<double>> tail_side1, tail_side2;
  double outer_dilatation_side1 = 1.0, outer_dilatation_side2 = 1.0;  // K(h)
};

struct SideDilatation {
  double inner = 1.0;  // K of the inner piece at this t
  double blend = 1.0;  // sampled sup over the blend band
  double outer = 1.0;  // K of the end diffeomorphism (input)
};

struct AssembledDilatation {
  double total = 1.0;     // max over all pieces of all sides
  double half_log = 0.0;  // (1/2) log total, the distance bound at this t
  std::vector<std::array<SideDilatation, 2>> per_cylinder;
  std::vector<double> twist_angle;  // arg c^1 + arg c^2 per cylinder
};

// Dilatation summary of the comparison map at time t.  Ratios below one are
// handled by running the construction from the other ray (reciprocal ratio,
// the deeper annulus supplies the base modulus); ratio one needs no
// interpolation and contributes only the end dilatations.
inline AssembledDilatation assemble_dilatation(
    const std::vector<TransitionInput>& cylinders, double t) {
  if (cylinders.empty())
    throw std::invalid_argument("assemble_dilatation: no cylinders");
  if (t < 0.0) throw std::domain_error("assemble_dilatation: t must be >= 0");
  AssembledDilatation out;
  for (const auto& cyl : cylinders) {
    if (!(cyl.modulus_ratio > 0.0))
      throw std::domain_error("assemble_dilatation: ratio must be positive");
    const double th1 = detail::principal_arg(cyl.coeff_side1, 1);
    const double th2 = detail::principal_arg(cyl.coeff_side2, 2);
    twist_audit(th1, th2);
    out.twist_angle.push_back(th1 + th2);

    std::array<SideDilatation, 2> sides;
    const bool trivial = std::abs(cyl.modulus_ratio - 1.0) <= 1e-12;
    const double ratio = cyl.modulus_ratio > 1.0 ? cyl.modulus_ratio
                                                 : 1.0 / cyl.modulus_ratio;
    const double deep_modulus = cyl.modulus_ratio > 1.0
                                    ? cyl.base_modulus
                                    : cyl.base_modulus * cyl.modulus_ratio;
    for (int s = 0; s < 2; ++s) {
      SideDilatation side;
      side.outer =
          s == 0 ? cyl.outer_dilatation_side1 : cyl.outer_dilatation_side2;
      if (!(side.outer >= 1.0))
        throw std::domain_error("assemble_dilatation: K(h) must be >= 1");
      if (!trivial) {
        InterpolationParams p;
        p.modulus_ratio = ratio;
        p.collar_exponent = cyl.exponent_override
                                ? *cyl.exponent_override
                                : choose_exponent(ratio, cyl.eps);
        p.leading_coeff = s == 0 ? cyl.coeff_side1 : cyl.coeff_side2;
        p.series_tail = s == 0 ? cyl.tail_side1 : cyl.tail_side2;
        p.eps = cyl.eps;
        p.base_modulus = deep_modulus;
        p.side = s + 1;
        const double t_min = threshold_time(p);
        if (t < t_min)
          throw std::domain_error(
              "assemble_dilatation: t below threshold time for cylinder '" +
              cyl.label + "'");
        side.inner = inner_dilatation(p, t).value;
        side.blend = blend_sup_dilatation(p, t);
      }
      sides[s] = side;
      out.total = std::max({out.total, side.inner, side.blend, side.outer});
    }
    out.per_cylinder.push_back(sides);
  }
  out.half_log = 0.5 * std::log(out.total);
  return out;
}

}  // namespace strebel
