#pragma once
// Conformal modulus oracle: analytic values for rectangles and round annuli,
// and a discrete Dirichlet-energy solver that also handles the image of a
// domain under an arbitrary orientation-preserving map via the pullback
// metric.
//
// Conventions.  A quad of width a and height b with the horizontal sides
// marked has modulus a/b; with the vertical sides marked, b/a.  An annulus
// r_in <= |z| <= 1 has modulus log(1/r_in) / (2 pi).  In both cases the
// discrete solver minimizes the Dirichlet energy of a potential that is 0 on
// one marked boundary and 1 on the other; the quad modulus equals that
// energy, the annulus modulus its reciprocal.
//
// The annulus is solved in log-polar coordinates (rho, theta), where the
// round metric is conformally flat, so the grid is a periodic rectangle and
// arbitrarily thin annuli cost nothing.  Energies use bilinear elements with
// a symmetric four-point rule per cell (points pulled 1/8 of the cell in
// from the corners); the rule is exact for constant-coefficient linear
// minimizers, which makes the solver exact, up to solver tolerance, on
// rectangles, round annuli, and any map that is affine in the grid
// coordinates.
//
// For a mapped domain the cell metric comes from the Wirtinger derivatives
// p = df/dz, q = df/dzbar measured by central differences: the pushed grid
// tangents are A = p z_i + q conj(z)_i and B likewise for the j direction,
// giving the first fundamental form G and the coefficient matrix
// adj(G) / |det|.  A vanishing or sign-flipping determinant means the map
// folds the grid and is rejected.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "strebel/beltrami.hpp"

namespace strebel {

struct SolverError : std::runtime_error {
  double residual;
  int iterations;
  SolverError(const std::string& what, double res, int iters)
      : std::runtime_error(what), residual(res), iterations(iters) {}
};

struct Sym2 {
  double m11 = 1.0, m12 = 0.0, m22 = 1.0;
};

struct GridDomain {
  enum class Kind { quad, annulus };
  enum class Marked { horizontal, vertical };
  Kind kind = Kind::annulus;
  double width = 1.0, height = 1.0;  // quad extents
  Marked marked = Marked::horizontal;
  double inner_radius = 0.5;  // annulus; the outer radius is fixed at 1

  static GridDomain quad(double a, double b, Marked m) {
    GridDomain d;
    d.kind = Kind::quad;
    d.width = a;
    d.height = b;
    d.marked = m;
    return d;
  }
  static GridDomain annulus(double r_in) {
    GridDomain d;
    d.kind = Kind::annulus;
    d.inner_radius = r_in;
    return d;
  }
};

inline void check_domain(const GridDomain& d) {
  if (d.kind == GridDomain::Kind::quad) {
    if (!(d.width > 0.0) || !(d.height > 0.0))
      throw std::invalid_argument("quad domain needs positive width and height");
  } else {
    if (!(d.inner_radius > 0.0 && d.inner_radius < 1.0))
      throw std::invalid_argument("annulus inner radius must lie in (0, 1)");
  }
}

inline double quad_modulus_analytic(const GridDomain& d) {
  check_domain(d);
  if (d.kind != GridDomain::Kind::quad)
    throw std::invalid_argument("quad_modulus_analytic: domain is not a quad");
  return d.marked == GridDomain::Marked::horizontal ? d.width / d.height
                                                    : d.height / d.width;
}

inline double annulus_modulus_analytic(const GridDomain& d) {
  check_domain(d);
  if (d.kind != GridDomain::Kind::annulus)
    throw std::invalid_argument("annulus_modulus_analytic: domain is not an annulus");
  return -std::log(d.inner_radius) / (2.0 * std::numbers::pi);
}

namespace detail {

struct EnergyGrid {
  int ni = 0, nj = 0;   // cells along the connecting / transverse directions
  bool periodic = false;  // wrap the j direction (annulus)
  double h_i = 0.0, h_j = 0.0;
  double lo_i = 0.0, lo_j = 0.0;

  int cols() const { return periodic ? nj : nj + 1; }
  int nodes() const { return (ni + 1) * cols(); }
  int node(int i, int j) const {
    if (periodic) j %= nj;
    return i * cols() + j;
  }
};

inline EnergyGrid make_grid(const GridDomain& d, int resolution) {
  if (resolution < 8)
    throw std::invalid_argument("grid resolution must be at least 8");
  EnergyGrid g;
  if (d.kind == GridDomain::Kind::annulus) {
    const double len = -std::log(d.inner_radius);
    g.ni = resolution;
    g.h_i = len / g.ni;
    g.lo_i = std::log(d.inner_radius);
    g.periodic = true;
    g.nj = std::max<int>(8, static_cast<int>(std::llround(2.0 * std::numbers::pi / g.h_i)));
    g.h_j = 2.0 * std::numbers::pi / g.nj;
    g.lo_j = 0.0;
  } else {
    const bool horiz = d.marked == GridDomain::Marked::horizontal;
    const double i_len = horiz ? d.height : d.width;
    const double j_len = horiz ? d.width : d.height;
    g.ni = resolution;
    g.h_i = i_len / g.ni;
    g.periodic = false;
    g.nj = std::max<int>(4, static_cast<int>(std::llround(j_len / g.h_i)));
    g.h_j = j_len / g.nj;
    g.lo_i = g.lo_j = 0.0;
  }
  return g;
}

// Quadrature sample offsets inside the unit cell, one per corner, pulled in
// by 1/8 of the cell so that mapped-metric evaluation never needs to step
// outside the domain.
inline constexpr double kSampleLo = 0.125;
inline constexpr double kSampleHi = 0.875;

struct CellRule {
  // d(grad_i u)/d(node) and d(grad_j u)/d(node) at each sample, node order
  // (0,0), (1,0), (0,1), (1,1); sample order the same corner order.
  double gi[4][4];
  double gj[4][4];
};

inline CellRule make_rule(double h_i, double h_j) {
  CellRule r;
  for (int q = 0; q < 4; ++q) {
    const double X = (q & 1) ? kSampleHi : kSampleLo;  // along i
    const double Y = (q & 2) ? kSampleHi : kSampleLo;  // along j
    r.gi[q][0] = -(1.0 - Y) / h_i;
    r.gi[q][1] = (1.0 - Y) / h_i;
    r.gi[q][2] = -Y / h_i;
    r.gi[q][3] = Y / h_i;
    r.gj[q][0] = -(1.0 - X) / h_j;
    r.gj[q][1] = -X / h_j;
    r.gj[q][2] = (1.0 - X) / h_j;
    r.gj[q][3] = X / h_j;
  }
  return r;
}

// Minimize the energy sum over cells of (h_i h_j / 4) sum_q grad^T M_q grad
// subject to u = 0 at i = 0 and u = 1 at i = ni, by Jacobi-preconditioned
// conjugate gradients on the free nodes.  `metric` holds 4 entries per cell
// in corner order, or is null for the identity.
inline double min_dirichlet_energy(const EnergyGrid& g,
                                   const std::vector<Sym2>* metric,
                                   double tol = 1e-10, int max_iter = 0) {
  const int N = g.nodes();
  if (max_iter <= 0) max_iter = 200 * (g.ni + g.nj) + 4000;
  const CellRule rule = make_rule(g.h_i, g.h_j);
  const double w = g.h_i * g.h_j / 4.0;
  static const Sym2 kIdentity{};

  auto cell_metric = [&](int ci, int cj, int q) -> const Sym2& {
    if (!metric) return kIdentity;
    return (*metric)[(static_cast<std::size_t>(ci) * g.nj + cj) * 4 + q];
  };
  auto gather = [&](int ci, int cj, int n[4]) {
    n[0] = g.node(ci, cj);
    n[1] = g.node(ci + 1, cj);
    n[2] = g.node(ci, cj + 1);
    n[3] = g.node(ci + 1, cj + 1);
  };

  // apply the energy gradient operator (2x the stiffness matrix action)
  auto apply = [&](const std::vector<double>& u, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    int n[4];
    for (int ci = 0; ci < g.ni; ++ci) {
      for (int cj = 0; cj < g.nj; ++cj) {
        gather(ci, cj, n);
        const double uv[4] = {u[n[0]], u[n[1]], u[n[2]], u[n[3]]};
        for (int q = 0; q < 4; ++q) {
          double gx = 0.0, gy = 0.0;
          for (int k = 0; k < 4; ++k) {
            gx += rule.gi[q][k] * uv[k];
            gy += rule.gj[q][k] * uv[k];
          }
          const Sym2& m = cell_metric(ci, cj, q);
          const double fx = 2.0 * w * (m.m11 * gx + m.m12 * gy);
          const double fy = 2.0 * w * (m.m12 * gx + m.m22 * gy);
          for (int k = 0; k < 4; ++k)
            out[n[k]] += fx * rule.gi[q][k] + fy * rule.gj[q][k];
        }
      }
    }
  };
  auto energy = [&](const std::vector<double>& u) {
    double e = 0.0;
    int n[4];
    for (int ci = 0; ci < g.ni; ++ci) {
      for (int cj = 0; cj < g.nj; ++cj) {
        gather(ci, cj, n);
        const double uv[4] = {u[n[0]], u[n[1]], u[n[2]], u[n[3]]};
        for (int q = 0; q < 4; ++q) {
          double gx = 0.0, gy = 0.0;
          for (int k = 0; k < 4; ++k) {
            gx += rule.gi[q][k] * uv[k];
            gy += rule.gj[q][k] * uv[k];
          }
          const Sym2& m = cell_metric(ci, cj, q);
          e += w * (m.m11 * gx * gx + 2.0 * m.m12 * gx * gy + m.m22 * gy * gy);
        }
      }
    }
    return e;
  };

  auto fixed = [&](int node) {
    const int i = node / g.cols();
    return i == 0 || i == g.ni;
  };

  std::vector<double> u(N, 0.0);
  for (int i = 0; i <= g.ni; ++i)
    for (int j = 0; j < g.cols(); ++j)
      u[g.node(i, j)] = static_cast<double>(i) / g.ni;

  std::vector<double> diag(N, 0.0);
  {
    int n[4];
    for (int ci = 0; ci < g.ni; ++ci) {
      for (int cj = 0; cj < g.nj; ++cj) {
        gather(ci, cj, n);
        for (int q = 0; q < 4; ++q) {
          const Sym2& m = cell_metric(ci, cj, q);
          for (int k = 0; k < 4; ++k) {
            const double a = rule.gi[q][k], b = rule.gj[q][k];
            diag[n[k]] += 2.0 * w * (m.m11 * a * a + 2.0 * m.m12 * a * b + m.m22 * b * b);
          }
        }
      }
    }
    for (int k = 0; k < N; ++k)
      if (fixed(k) || !(diag[k] > 0.0)) diag[k] = 1.0;
  }

  std::vector<double> r(N, 0.0), z(N, 0.0), p(N, 0.0), Ap(N, 0.0);
  apply(u, Ap);
  double r0 = 0.0;
  for (int k = 0; k < N; ++k) {
    r[k] = fixed(k) ? 0.0 : -Ap[k];
    r0 += r[k] * r[k];
  }
  r0 = std::sqrt(r0);
  if (r0 == 0.0) return energy(u);

  double rz = 0.0;
  for (int k = 0; k < N; ++k) {
    z[k] = r[k] / diag[k];
    p[k] = z[k];
    rz += r[k] * z[k];
  }
  for (int it = 0; it < max_iter; ++it) {
    apply(p, Ap);
    double pAp = 0.0;
    for (int k = 0; k < N; ++k)
      if (!fixed(k)) pAp += p[k] * Ap[k];
    if (!(pAp > 0.0))
      throw SolverError("energy solver lost positive definiteness", 1.0, it);
    const double alpha = rz / pAp;
    double rn2 = 0.0;
    for (int k = 0; k < N; ++k) {
      if (fixed(k)) continue;
      u[k] += alpha * p[k];
      r[k] -= alpha * Ap[k];
      rn2 += r[k] * r[k];
    }
    if (std::sqrt(rn2) <= tol * r0) return energy(u);
    double rz_new = 0.0;
    for (int k = 0; k < N; ++k) {
      z[k] = r[k] / diag[k];
      rz_new += r[k] * z[k];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int k = 0; k < N; ++k) p[k] = fixed(k) ? 0.0 : z[k] + beta * p[k];
  }
  double rn2 = 0.0;
  for (int k = 0; k < N; ++k) rn2 += r[k] * r[k];
  throw SolverError("energy solver failed to reach tolerance",
                    std::sqrt(rn2) / r0, max_iter);
}

// Pullback metric of a mapped domain, sampled at the quadrature points.
inline std::vector<Sym2> pushforward_metric(const ComplexMap& f,
                                            const GridDomain& d,
                                            const EnergyGrid& g) {
  std::vector<Sym2> metric(static_cast<std::size_t>(g.ni) * g.nj * 4);
  const double scale =
      d.kind == GridDomain::Kind::annulus ? 1.0 : std::max(d.width, d.height);
  const bool horiz = d.marked == GridDomain::Marked::horizontal;
  int det_sign = 0;
  for (int ci = 0; ci < g.ni; ++ci) {
    for (int cj = 0; cj < g.nj; ++cj) {
      for (int q = 0; q < 4; ++q) {
        const double X = (q & 1) ? kSampleHi : kSampleLo;
        const double Y = (q & 2) ? kSampleHi : kSampleLo;
        const double gi = g.lo_i + (ci + X) * g.h_i;
        const double gj = g.lo_j + (cj + Y) * g.h_j;
        std::complex<double> z;
        if (d.kind == GridDomain::Kind::annulus)
          z = std::polar(std::exp(gi), gj);
        else if (horiz)
          z = std::complex<double>(gj, gi);  // grid i runs along y
        else
          z = std::complex<double>(gi, gj);
        const double h = 1e-5 * std::max(std::abs(z), 1e-2 * scale);
        const BeltramiSample s = beltrami_numeric(f, z, h);
        std::complex<double> A, B;
        if (d.kind == GridDomain::Kind::annulus) {
          A = s.d_z * z + s.d_zbar * std::conj(z);
          B = std::complex<double>(0.0, 1.0) *
              (s.d_z * z - s.d_zbar * std::conj(z));
        } else if (horiz) {
          A = std::complex<double>(0.0, 1.0) * (s.d_z - s.d_zbar);
          B = s.d_z + s.d_zbar;
        } else {
          A = s.d_z + s.d_zbar;
          B = std::complex<double>(0.0, 1.0) * (s.d_z - s.d_zbar);
        }
        const double g_ii = std::norm(A);
        const double g_ij = (std::conj(A) * B).real();
        const double g_jj = std::norm(B);
        const double det = (std::conj(A) * B).imag();
        if (det == 0.0)
          throw std::domain_error("pushforward metric is degenerate on the grid");
        const int sign = det > 0.0 ? 1 : -1;
        if (det_sign == 0) det_sign = sign;
        if (sign != det_sign)
          throw std::domain_error("map folds the grid: determinant changes sign");
        const double ad = std::abs(det);
        metric[(static_cast<std::size_t>(ci) * g.nj + cj) * 4 + q] =
            Sym2{g_jj / ad, -g_ij / ad, g_ii / ad};
      }
    }
  }
  return metric;
}

}  // namespace detail

struct DiscreteModulus {
  double value = 0.0;
  double err_est = 0.0;  // Richardson estimate from the half-resolution solve
  int resolution = 0;
};

struct AnnulusResult {
  double analytic = 0.0;
  std::optional<DiscreteModulus> discrete;
  bool analytic_only() const { return !discrete.has_value(); }
};

namespace detail {

inline double modulus_from_energy(const GridDomain& d, double energy) {
  if (!(energy > 0.0))
    throw std::domain_error("modulus solver produced non-positive energy");
  return d.kind == GridDomain::Kind::quad ? energy : 1.0 / energy;
}

inline DiscreteModulus solve_pair(const GridDomain& d, int resolution,
                                  double tol, const ComplexMap* f) {
  auto one = [&](int res) {
    const EnergyGrid g = make_grid(d, res);
    if (f) {
      const auto metric = pushforward_metric(*f, d, g);
      return modulus_from_energy(d, min_dirichlet_energy(g, &metric, tol));
    }
    return modulus_from_energy(d, min_dirichlet_energy(g, nullptr, tol));
  };
  DiscreteModulus out;
  out.resolution = resolution;
  out.value = one(resolution);
  const int coarse = std::max(8, resolution / 2);
  if (coarse < resolution)
    out.err_est = std::abs(out.value - one(coarse)) / 3.0;
  return out;
}

}  // namespace detail

// Discrete modulus of an unmapped quad (mostly a solver self-check; the
// analytic value is width/height or its reciprocal).
inline DiscreteModulus quad_modulus(const GridDomain& d, int resolution = 32,
                                    double tol = 1e-10) {
  check_domain(d);
  if (d.kind != GridDomain::Kind::quad)
    throw std::invalid_argument("quad_modulus: domain is not a quad");
  return detail::solve_pair(d, resolution, tol, nullptr);
}

// Analytic modulus of a round annulus plus, when the annulus is not too
// thin to be worth gridding, the discrete value as a cross-check.
inline AnnulusResult annulus_modulus(const GridDomain& d, int resolution = 32,
                                     double tol = 1e-10) {
  check_domain(d);
  if (d.kind != GridDomain::Kind::annulus)
    throw std::invalid_argument("annulus_modulus: domain is not an annulus");
  AnnulusResult out;
  out.analytic = annulus_modulus_analytic(d);
  if (d.inner_radius > 1e-8)
    out.discrete = detail::solve_pair(d, resolution, tol, nullptr);
  return out;
}

// Modulus of the image of the domain under an orientation-preserving map,
// computed on the domain grid with the pullback metric.
inline DiscreteModulus pushforward_modulus(const ComplexMap& f,
                                           const GridDomain& d,
                                           int resolution = 32,
                                           double tol = 1e-10) {
  check_domain(d);
  return detail::solve_pair(d, resolution, tol, &f);
}

}  // namespace strebel
