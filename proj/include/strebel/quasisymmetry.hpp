#pragma once
// Quasisymmetry quotients of boundary maps and the cross ratio on the
// extended plane.
//
// For an increasing map f of the real line the quotient at (x, t) is
//
//     Q(x, t) = (f(x + t) - f(x)) / (f(x) - f(x - t)),
//
// and f is quasisymmetric when sup over x, t of max(Q, 1/Q) is finite.  The
// supremum search scans a dyadic grid chosen so that x, t, x + t and x - t
// are all exact doubles; on such triples the quotient for the identity, or
// any map that happens to take exact values there, is computed without a
// single rounding, and the reported supremum for affine maps is exactly 1.
// Sample points whose spacing fails to be exactly equal on both sides are
// skipped rather than polluting the supremum with round-off.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace strebel {

using RealMap = std::function<double(double)>;

namespace detail {

struct Triple {
  double x_plus;
  double x_minus;
};

// Snap the probe to an exactly equally spaced triple.  The spacing actually
// used is tau = fl(x + t) - x; the triple is accepted only when x - tau is
// exact as well, so both gaps agree to the last bit.
inline std::optional<Triple> snapped_triple(double x, double t) {
  const double xp = x + t;
  const double tau = xp - x;
  if (!(tau > 0.0) || !std::isfinite(tau)) return std::nullopt;
  const double xm = x - tau;
  if (x - xm != tau) return std::nullopt;
  return Triple{xp, xm};
}

inline double quotient_on_triple(const RealMap& f, double x, const Triple& tr) {
  const double num = f(tr.x_plus) - f(x);
  const double den = f(x) - f(tr.x_minus);
  if (num == 0.0 || den == 0.0)
    throw std::domain_error("quasisymmetry: map is not strictly monotone");
  if ((num > 0.0) != (den > 0.0))
    throw std::domain_error("quasisymmetry: map is not monotone at the probe");
  return num / den;
}

}  // namespace detail

// Quotient at a single probe.  Negative t gives the reciprocal of the
// positive-t quotient, as the definition implies; t = 0 is rejected.
inline double quasisymmetry_quotient(const RealMap& f, double x, double t) {
  if (t == 0.0 || !std::isfinite(t))
    throw std::invalid_argument("quasisymmetry_quotient: t must be nonzero and finite");
  const double step = std::abs(t);
  const auto tr = detail::snapped_triple(x, step);
  if (!tr) {
    // Spacing not representable around x; fall back to the raw formula.
    const double num = f(x + step) - f(x);
    const double den = f(x) - f(x - step);
    if (num == 0.0 || den == 0.0 || (num > 0.0) != (den > 0.0))
      throw std::domain_error("quasisymmetry: map is not strictly monotone");
    return t > 0.0 ? num / den : den / num;
  }
  const double q = detail::quotient_on_triple(f, x, *tr);
  return t > 0.0 ? q : 1.0 / q;
}

struct QsSearchOptions {
  int octave_lo = -10;   // probe scales from 2^octave_lo ...
  int octave_hi = 9;     // ... through 2^octave_hi
  bool refine = true;    // polish the best grid sample by golden section
  int refine_rounds = 3;
  int refine_iters = 120;
};

struct QsSupremum {
  double value = 1.0;
  double arg_x = 0.0;   // probe attaining the supremum
  double arg_t = 0.0;
  std::size_t samples = 0;
  std::size_t skipped = 0;
};

namespace detail {

inline double symmetric_quotient(const RealMap& f, double x, double t,
                                 bool* ok = nullptr) {
  const auto tr = snapped_triple(x, t);
  if (!tr) {
    if (ok) *ok = false;
    return 1.0;
  }
  if (ok) *ok = true;
  const double q = quotient_on_triple(f, x, *tr);
  return q > 1.0 ? q : 1.0 / q;
}

}  // namespace detail

// Supremum of max(Q, 1/Q) over a two-sided dyadic grid of probes.  Octave k
// contributes base points +-(1 + i/8) 2^k for i = 0..4 and spacings
// (1 + i/16) 2^k for i = 0..9; every such value, and every sum or difference
// of a base point and a spacing across the octave range, is an exact double.
// Golden-section refinement around the best sample only runs when the grid
// already shows a quotient above one, so exact-affine inputs report 1 exactly.
inline QsSupremum quasisymmetry_sup(const RealMap& f,
                                    const QsSearchOptions& opt = {}) {
  if (opt.octave_hi < opt.octave_lo)
    throw std::invalid_argument("quasisymmetry_sup: empty octave range");
  std::vector<double> xs, ts;
  for (int k = opt.octave_lo; k <= opt.octave_hi; ++k) {
    const double scale = std::ldexp(1.0, k);
    for (int i = 0; i <= 4; ++i) {
      const double v = (1.0 + i / 8.0) * scale;
      xs.push_back(v);
      xs.push_back(-v);
    }
    for (int i = 0; i <= 9; ++i) ts.push_back((1.0 + i / 16.0) * scale);
  }
  QsSupremum best;
  best.arg_x = xs.front();
  best.arg_t = ts.front();
  for (double x : xs) {
    for (double t : ts) {
      bool ok = false;
      const double q = detail::symmetric_quotient(f, x, t, &ok);
      ++best.samples;
      if (!ok) {
        ++best.skipped;
        continue;
      }
      if (q > best.value) {
        best.value = q;
        best.arg_x = x;
        best.arg_t = t;
      }
    }
  }
  if (!opt.refine || !(best.value > 1.0 + 1e-12)) return best;

  // Coordinate-wise golden-section polish; skipped probes simply do not
  // update the incumbent.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto polish = [&](double lo, double hi,
                    const std::function<double(double)>& g,
                    double* arg) {
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double gc = g(c), gd = g(d);
    for (int it = 0; it < opt.refine_iters; ++it) {
      if (gc > gd) {
        b = d;
        d = c;
        gd = gc;
        c = b - inv_phi * (b - a);
        gc = g(c);
      } else {
        a = c;
        c = d;
        gc = gd;
        d = a + inv_phi * (b - a);
        gd = g(d);
      }
    }
    const double m = 0.5 * (a + b);
    const double gm = g(m);
    if (gm > best.value) {
      best.value = gm;
      *arg = m;
    }
  };
  for (int round = 0; round < opt.refine_rounds; ++round) {
    polish(best.arg_t * 0.5, best.arg_t * 2.0,
           [&](double t) { return detail::symmetric_quotient(f, best.arg_x, t); },
           &best.arg_t);
    const double lo = best.arg_x - 0.5 * best.arg_t;
    const double hi = best.arg_x + 0.5 * best.arg_t;
    polish(lo, hi,
           [&](double x) { return detail::symmetric_quotient(f, x, best.arg_t); },
           &best.arg_x);
  }
  return best;
}

// ---- cross ratio on the extended plane --------------------------------------

struct ExtComplex {
  std::complex<double> value{0.0, 0.0};
  bool infinite = false;

  ExtComplex() = default;
  ExtComplex(std::complex<double> v) : value(v) {}
  ExtComplex(double v) : value(v, 0.0) {}
  static ExtComplex infinity() {
    ExtComplex e;
    e.infinite = true;
    return e;
  }
  bool operator==(const ExtComplex& o) const {
    if (infinite || o.infinite) return infinite && o.infinite;
    return value == o.value;
  }
};

// (z1 - z2)(z3 - z4) / ((z1 - z3)(z2 - z4)), with the usual limit rules when
// exactly one argument is the point at infinity.  Degenerate quadruples where
// the formula reads 0/0 are rejected.
inline ExtComplex cross_ratio(const ExtComplex& z1, const ExtComplex& z2,
                              const ExtComplex& z3, const ExtComplex& z4) {
  const int at_inf = (z1.infinite ? 1 : 0) + (z2.infinite ? 1 : 0) +
                     (z3.infinite ? 1 : 0) + (z4.infinite ? 1 : 0);
  if (at_inf > 1)
    throw std::invalid_argument("cross_ratio: repeated point at infinity");
  auto finite_ratio = [](std::complex<double> num,
                         std::complex<double> den) -> ExtComplex {
    if (den == std::complex<double>(0.0, 0.0)) {
      if (num == std::complex<double>(0.0, 0.0))
        throw std::invalid_argument("cross_ratio: degenerate quadruple");
      return ExtComplex::infinity();
    }
    return ExtComplex(num / den);
  };
  if (z1.infinite) return finite_ratio(z3.value - z4.value, z2.value - z4.value);
  if (z2.infinite) return finite_ratio(-(z3.value - z4.value), z1.value - z3.value);
  if (z3.infinite) return finite_ratio(-(z1.value - z2.value), z2.value - z4.value);
  if (z4.infinite) return finite_ratio(z1.value - z2.value, z1.value - z3.value);
  return finite_ratio((z1.value - z2.value) * (z3.value - z4.value),
                      (z1.value - z3.value) * (z2.value - z4.value));
}

}  // namespace strebel
