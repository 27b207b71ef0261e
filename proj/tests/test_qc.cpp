#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "strebel/beltrami.hpp"
#include "strebel/qc_maps.hpp"
#include "strebel/ray.hpp"

using namespace strebel;
using doctest::Approx;
using cplx = std::complex<double>;

namespace {

InterpolationParams reference_params() {
  InterpolationParams p;
  p.modulus_ratio = 2.0;
  p.collar_exponent = -1.0;
  p.leading_coeff = 1.0;
  p.eps = 0.25;
  p.base_modulus = 1.0;
  return p;
}

}  // namespace

// ---- finite-difference Beltrami --------------------------------------------

TEST_CASE("beltrami of an affine stretch") {
  AffineStretch s{3.0};
  auto f = [&s](cplx z) { return s.apply(z); };
  auto b = beltrami_numeric(f, {1.0, 2.0}, 1e-5);
  CHECK(b.dilatation == Approx(3.0).epsilon(1e-9));
  CHECK(b.mu.real() == Approx(-0.5).epsilon(1e-9));
  CHECK(b.mu.imag() == Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(b.jacobian == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("beltrami rejects orientation reversal") {
  auto conj = [](cplx z) { return std::conj(z); };
  CHECK_THROWS_AS(beltrami_numeric(conj, {0.3, 0.4}, 1e-5), std::domain_error);
  CHECK_THROWS_AS(beltrami_numeric(conj, {0.3, 0.4}, 0.0), std::domain_error);
}

TEST_CASE("beltrami_stable accepts smooth maps and refuses rough ones") {
  auto smooth = [](cplx z) { return z + 0.1 * std::conj(z) * std::conj(z); };
  const cplx z0{0.5, 0.3};
  auto b = beltrami_stable(smooth, z0, 1e-4, 1e-6);
  const cplx mu_exact = 0.2 * std::conj(z0);
  CHECK(std::abs(b.mu - mu_exact) < 1e-6);

  // an oscillation far below the step size defeats the difference quotient
  auto rough = [](cplx z) { return z + 0.05 * std::cos(50.0 * z.real()); };
  CHECK_THROWS_AS(beltrami_stable(rough, {0.3, 0.4}, 0.5, 1e-9),
                  std::runtime_error);
}

// ---- collar exponent and threshold time ------------------------------------

TEST_CASE("choose_exponent frozen values") {
  CHECK(choose_exponent(2.0, 0.5) == Approx(-3.1699250014423126).epsilon(1e-14));
  CHECK(choose_exponent(2.0, 0.25) == Approx(-4.643856189774724).epsilon(1e-14));
  CHECK(choose_exponent(1.0001, 0.5) ==
        Approx(-3.999800029995177).epsilon(1e-12));

  CHECK_THROWS_AS(choose_exponent(2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(choose_exponent(2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(choose_exponent(2.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(choose_exponent(1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(choose_exponent(0.5, 0.5), std::domain_error);
}

TEST_CASE("parameter validation") {
  auto p = reference_params();
  // exponent -1 misses the slack bound for ratio 2, eps 0.25: warn, not fail
  auto rep = p.validate();
  CHECK(rep.valid());
  REQUIRE(rep.warnings.size() == 1);
  CHECK(rep.warnings[0].find("eps-slack bound") != std::string::npos);

  p.collar_exponent = choose_exponent(2.0, 0.25);
  CHECK(p.validate().warnings.empty());
  CHECK(p.ratio_power() == Approx(0.04).epsilon(1e-12));

  p.modulus_ratio = -1.0;
  CHECK_FALSE(p.validate().valid());
  p = reference_params();
  p.leading_coeff = 0.0;
  CHECK_FALSE(p.validate().valid());
  p = reference_params();
  p.eps = 1.0;
  CHECK_FALSE(p.validate().valid());
  p = reference_params();
  p.base_modulus = 0.0;
  CHECK_FALSE(p.validate().valid());
}

TEST_CASE("threshold_time frozen values and behaviour") {
  auto p = reference_params();
  p.leading_coeff = 0.1;
  p.base_modulus = 0.1;
  CHECK(threshold_time(p) == Approx(0.7932112721422184).epsilon(1e-13));

  p = reference_params();
  p.leading_coeff = 0.001;
  const double t_min = threshold_time(p);
  CHECK(t_min == Approx(0.19122486997925045).epsilon(1e-13));

  // below the threshold the closed-form dilatation is singular
  CHECK_THROWS_AS(inner_dilatation(p, 0.0), std::domain_error);
  CHECK_THROWS_AS(inner_dilatation(p, 0.9 * t_min), std::domain_error);
  CHECK(inner_dilatation(p, 1.1 * t_min).value >= 1.0);

  // |c| >= 1 never constrains the start time
  p.leading_coeff = 2.0;
  CHECK(threshold_time(p) == 0.0);

  p.modulus_ratio = 0.5;
  CHECK_THROWS_AS(threshold_time(p), std::domain_error);
}

// ---- inner map ---------------------------------------------------------------

TEST_CASE("inner map boundary values") {
  auto p = reference_params();
  p.leading_coeff = std::polar(0.8, std::numbers::pi / 4.0);
  const double t = 0.0;
  const double delta = std::exp(p.log_inner_radius(t));
  const double Delta = std::exp(p.log_collar_radius(t));

  for (int k = 0; k < 16; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 16.0;
    // inner edge: pure radial rescale by delta^(ratio - 1) = delta
    const cplx zi = std::polar(delta, th);
    CHECK(std::abs(inner_map(p, t, zi) - delta * zi) < 1e-12 * delta * delta);
    // collar edge: the linear germ c z
    const cplx zo = std::polar(Delta, th);
    CHECK(std::abs(inner_map(p, t, zo) - p.leading_coeff * zo) < 1e-12 * Delta);
  }
}

TEST_CASE("inner map rejects points off the collar annulus") {
  auto p = reference_params();
  const double ld = p.log_inner_radius(0.0);
  CHECK_THROWS_AS(inner_map_log(p, 0.0, cplx(ld - 1.0, 0.0)), std::domain_error);
  CHECK_THROWS_AS(inner_map_log(p, 0.0, cplx(0.5 * ld + 1.0, 0.0)),
                  std::domain_error);
  CHECK_THROWS_AS(inner_map(p, 0.0, cplx(0.0, 0.0)), std::domain_error);

  p.modulus_ratio = 0.5;
  CHECK_THROWS_AS(inner_map_log(p, 0.0, cplx(ld, 0.0)), std::domain_error);
}

TEST_CASE("log form carries on when linear coordinates underflow") {
  auto p = reference_params();
  const double t = 4.0;  // log delta ~ -9362, far past double range
  CHECK_THROWS_AS(inner_map(p, t, cplx(1e-300, 0.0)), std::domain_error);
  const double ld = p.log_inner_radius(t);
  const cplx w(ld, 0.3);
  const cplx W = inner_map_log(p, t, w);
  // at the inner edge the displacement is (ratio - 1) log delta
  CHECK(W.real() == Approx(2.0 * ld).epsilon(1e-12));
  CHECK(W.imag() == Approx(0.3).epsilon(1e-12));
}

TEST_CASE("inner dilatation is the constant 3 for the reference data") {
  auto p = reference_params();
  for (int t = 1; t <= 10; ++t) {
    const auto d = inner_dilatation(p, static_cast<double>(t));
    CHECK(std::abs(d.value - 3.0) <= 1e-12);
    CHECK(std::abs(d.value - d.limit) <= 1e-12);
  }
}

TEST_CASE("inner dilatation limit under the chosen exponent") {
  auto p = reference_params();
  p.collar_exponent = choose_exponent(2.0, 0.25);
  const auto d = inner_dilatation(p, 5.0);
  CHECK(d.limit == Approx(2.0416666666666665).epsilon(1e-12));
  // the guarantee bought by choose_exponent: limit < ratio + eps
  CHECK(d.limit < 2.0 + 0.25);
}

TEST_CASE("inner dilatation with a rotating coefficient") {
  auto p = reference_params();
  p.leading_coeff = cplx(0.0, 1.0);
  const double frozen[6] = {3.006866404589646,    3.0001257978261124,
                            3.000002304079411,    3.0000000422006905,
                            3.000000000772932,    3.0000000000141567};
  double prev = 4.0;
  for (int t = 1; t <= 6; ++t) {
    const double k = inner_dilatation(p, static_cast<double>(t)).value;
    CHECK(k == Approx(frozen[t - 1]).epsilon(1e-9));
    CHECK(k > 3.0);
    CHECK(k < prev);
    prev = k;
  }
}

TEST_CASE("closed-form inner dilatation matches finite differences") {
  auto p = reference_params();
  p.leading_coeff = std::polar(0.8, 0.6);
  const double t = 0.0;
  const double k_closed = inner_dilatation(p, t).value;
  const double r = std::exp(0.5 * (p.log_inner_radius(t) + p.log_collar_radius(t)));
  auto f = [&p, t](cplx z) { return inner_map(p, t, z); };
  for (int j = 0; j < 8; ++j) {
    const cplx z = std::polar(r, 2.0 * std::numbers::pi * j / 8.0);
    const auto b = beltrami_numeric(f, z, 1e-6 * r);
    CHECK(b.dilatation == Approx(k_closed).epsilon(1e-5));
  }
}

// ---- blend map ---------------------------------------------------------------

TEST_CASE("blend map boundary values") {
  auto p = reference_params();
  p.leading_coeff = cplx(0.9, 0.2);
  p.series_tail = {cplx(1.0, 0.0)};  // psi(z) = z^2
  const double t = 0.0;
  const double Delta = std::exp(p.log_collar_radius(t));
  for (int k = 0; k < 16; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 16.0;
    const cplx zi = std::polar(Delta, th);
    CHECK(std::abs(blend_map(p, t, zi) - p.leading_coeff * zi) < 1e-12 * Delta);
    const cplx zo = std::polar(2.0 * Delta, th);
    const cplx germ = p.leading_coeff * zo + zo * zo;
    CHECK(std::abs(blend_map(p, t, zo) - germ) < 1e-12 * Delta);
  }
  CHECK_THROWS_AS(blend_map(p, t, std::polar(0.5 * Delta, 1.0)),
                  std::domain_error);
  CHECK_THROWS_AS(blend_map(p, t, std::polar(3.0 * Delta, 1.0)),
                  std::domain_error);
  CHECK_THROWS_AS(blend_map(p, 3.0, cplx(1e-200, 0.0)), std::domain_error);
}

TEST_CASE("blend derivatives match finite differences") {
  const cplx c(0.9, 0.1);
  const std::vector<cplx> tail = {cplx(0.3, 0.0), cplx(0.0, 0.1)};
  auto p = reference_params();
  p.leading_coeff = c;
  p.series_tail = tail;
  const double t = 0.0;
  const double lD = p.log_collar_radius(t);
  const double Delta = std::exp(lD);

  const cplx zeta = std::polar(1.4, 0.7);
  const auto an = blend_derivatives(c, tail, lD, zeta);
  auto f = [&p, t](cplx z) { return blend_map(p, t, z); };
  const auto fd = beltrami_numeric(f, Delta * zeta, 1e-6 * Delta);
  CHECK(std::abs(an.d_z - fd.d_z) < 1e-6 * std::abs(an.d_z));
  CHECK(std::abs(an.d_zbar - fd.d_zbar) < 1e-6 * std::abs(an.d_z));
}

TEST_CASE("blend sup dilatation for the quadratic tail") {
  // frozen sup values for psi(z) = z^2, c = 1; the maximum sits at the outer
  // band edge on the negative axis, a grid point of the polar sampling
  const double collar[4] = {1e-1, 1e-2, 1e-3, 1e-4};
  const double frozen[4] = {3.0, 1.0434782608695652, 1.004032258064516,
                            1.0004003202562048};
  double prev = 1e9;
  for (int i = 0; i < 4; ++i) {
    const double sup =
        blend_sup_dilatation(cplx(1.0, 0.0), {cplx(1.0, 0.0)},
                             std::log(collar[i]));
    CHECK(sup == Approx(frozen[i]).epsilon(1e-9));
    CHECK(sup < prev);
    prev = sup;

    // the closed-form band bound holds once the collar is genuinely small
    if (collar[i] <= 1e-2) {
      const double C = blend_tail_bound({cplx(1.0, 0.0)}, std::log(collar[i]));
      CHECK(sup <= 1.0 + 5.0 * C * collar[i]);
    }
  }
}

TEST_CASE("blend sup edge cases") {
  CHECK(blend_sup_dilatation(cplx(1.0, 0.0), {}, std::log(0.1)) == 1.0);
  // scaled tail underflows to zero gracefully far down the ray
  CHECK(blend_sup_dilatation(cplx(1.0, 0.0), {cplx(1.0, 0.0)}, -10000.0) == 1.0);
  // a tail overwhelming the linear term is rejected
  CHECK_THROWS_AS(blend_sup_dilatation(cplx(0.01, 0.0), {cplx(1.0, 0.0)},
                                       std::log(0.5)),
                  std::domain_error);
}

// ---- assembled pieces and seams ---------------------------------------------

TEST_CASE("interpolation pieces agree on their seams") {
  auto p = reference_params();
  p.leading_coeff = cplx(0.9, 0.2);
  p.series_tail = {cplx(0.4, 0.0), cplx(0.0, 0.2)};
  const auto pm = interpolation_pieces(p, 0.0);
  REQUIRE(pm.pieces.size() == 3);
  const auto rep = check_seams(pm, 1000);
  CHECK(rep.seams == 2);
  CHECK(rep.samples == 2000);
  CHECK(rep.max_mismatch <= 1e-12);

  // dispatch covers the union and rejects the outside
  const double Delta = std::exp(p.log_collar_radius(0.0));
  CHECK_NOTHROW(pm(std::polar(1.5 * Delta, 2.0)));
  CHECK_THROWS_AS(pm(std::polar(8.0 * Delta + 1.0, 2.0)), std::domain_error);
}

// ---- node map ----------------------------------------------------------------

TEST_CASE("node map pieces and frozen value") {
  // identity near the node, bit for bit
  const cplx z1(0.005, 0.003);
  CHECK(node_map(0.1, z1) == z1);
  CHECK(node_map(0.1, cplx(0.01, 0.01)) == cplx(0.01, 0.01));

  // outer block value frozen from the closed form
  const cplx w = node_map(0.1, cplx(0.05, 0.05));
  CHECK(w.real() == 0.05);
  CHECK(w.imag() == Approx(0.05469135802469136).epsilon(1e-15));

  // even in x
  const cplx wm = node_map(0.1, cplx(-0.05, 0.05));
  CHECK(wm.real() == -0.05);
  CHECK(wm.imag() == w.imag());
}

TEST_CASE("node map matches the stretched outer boundary") {
  const double eps = 0.25;
  for (int k = 0; k <= 20; ++k) {
    const double s = static_cast<double>(k) / 20.0;
    // top edge y = eps
    const double x = -eps + 2.0 * eps * s;
    const cplx top = node_map(eps, cplx(x, eps));
    CHECK(std::abs(top - cplx(x, (1.0 + eps) * eps)) < 1e-12);
    // side edges x = +-eps (omit the excluded corner at y = 0 on no side;
    // y > 0 throughout)
    const double y = eps * (0.05 + 0.95 * s);
    for (double sx : {-eps, eps}) {
      const cplx side = node_map(eps, cplx(sx, y));
      CHECK(std::abs(side - cplx(sx, (1.0 + eps) * y)) < 1e-12);
    }
  }
}

TEST_CASE("node map mirror symmetry") {
  const double eps = 0.2;
  for (int i = 1; i <= 8; ++i) {
    for (int j = 1; j <= 8; ++j) {
      const double x = eps * i / 8.0;
      const double y = eps * j / 8.0;
      const cplx right = node_map(eps, cplx(x, y));
      const cplx left = node_map(eps, cplx(-x, y));
      CHECK(left.real() == -right.real());
      CHECK(left.imag() == right.imag());
    }
  }
}

TEST_CASE("node map domain checks") {
  CHECK_THROWS_AS(node_map(0.0, cplx(0.1, 0.1)), std::invalid_argument);
  CHECK_THROWS_AS(node_map(1.0, cplx(0.1, 0.1)), std::invalid_argument);
  CHECK_THROWS_AS(node_map(0.1, cplx(0.0, 0.0)), std::domain_error);
  CHECK_THROWS_AS(node_map(0.1, cplx(0.2, 0.05)), std::domain_error);
  CHECK_THROWS_AS(node_map(0.1, cplx(0.05, -0.01)), std::domain_error);
  CHECK_THROWS_AS(node_map(0.1, cplx(0.05, 0.2)), std::domain_error);
}

TEST_CASE("node map pieces tile the strip and agree on seams") {
  const auto pm = node_map_pieces(0.2);
  REQUIRE(pm.pieces.size() == 8);
  const auto rep = check_seams(pm, 1000);
  CHECK(rep.seams == 10);
  CHECK(rep.samples == 10000);
  CHECK(rep.max_mismatch <= 1e-12);

  // piecewise dispatch agrees with the direct map off the seams
  for (int i = 0; i < 7; ++i) {
    const cplx z(-0.19 + 0.055 * i, 0.013 + 0.021 * i);
    CHECK(std::abs(pm(z) - node_map(0.2, z)) == 0.0);
  }
}

TEST_CASE("node map dilatation stays within the linear budget") {
  // frozen sups from a dense finite-difference sweep; the 32 x 32 cell-centre
  // scan lands close but never above
  const double eps_list[4] = {0.2, 0.1, 0.05, 0.01};
  const double frozen[4] = {1.2553626617983817, 1.1116640533276352,
                            1.0526921080144152, 1.0101012626290047};
  for (int i = 0; i < 4; ++i) {
    const double sup = node_map_sup_dilatation(eps_list[i]);
    CHECK(std::abs(sup - frozen[i]) < 0.01);
    CHECK(sup - 1.0 <= 5.0 * eps_list[i]);
  }
}

// ---- twists and the assembled dilatation --------------------------------------

TEST_CASE("twist conventions") {
  CHECK(detail::principal_arg(cplx(-1.0, 0.0), 1) == Approx(std::numbers::pi));
  CHECK(detail::principal_arg(cplx(-1.0, 0.0), 2) == Approx(-std::numbers::pi));
  CHECK(detail::principal_arg(cplx(1.0, 0.0), 1) == 0.0);

  CHECK_NOTHROW(twist_audit(std::numbers::pi, -std::numbers::pi));
  CHECK_NOTHROW(twist_audit(1.0, 2.0));
  CHECK_THROWS_AS(twist_audit(3.2, 3.2), std::domain_error);
  CHECK_THROWS_AS(twist_audit(-3.2, -3.2), std::domain_error);
}

TEST_CASE("assembled dilatation on the reference cylinder") {
  TransitionInput cyl;
  cyl.label = "A";
  cyl.modulus_ratio = 2.0;
  cyl.base_modulus = 1.0;
  cyl.eps = 0.25;
  cyl.exponent_override = -1.0;
  const auto out = assemble_dilatation({cyl}, 1.0);
  REQUIRE(out.per_cylinder.size() == 1);
  CHECK(out.total == Approx(3.0).epsilon(1e-12));
  CHECK(out.half_log == Approx(0.5 * std::log(3.0)).epsilon(1e-12));
  for (int s = 0; s < 2; ++s) {
    CHECK(out.per_cylinder[0][s].inner == Approx(3.0).epsilon(1e-12));
    CHECK(out.per_cylinder[0][s].blend == 1.0);
    CHECK(out.per_cylinder[0][s].outer == 1.0);
  }
  CHECK(out.twist_angle[0] == 0.0);
}

TEST_CASE("ratio one contributes only the end dilatations") {
  TransitionInput cyl;
  cyl.label = "flat";
  cyl.modulus_ratio = 1.0;
  cyl.outer_dilatation_side1 = 1.7;
  const auto out = assemble_dilatation({cyl}, 0.0);
  CHECK(out.total == 1.7);
  CHECK(out.per_cylinder[0][0].inner == 1.0);
  CHECK(out.per_cylinder[0][0].blend == 1.0);
}

TEST_CASE("shrinking cylinders run the construction from the other ray") {
  TransitionInput grow;
  grow.label = "g";
  grow.modulus_ratio = 2.0;
  grow.base_modulus = 1.0;
  TransitionInput shrink;
  shrink.label = "s";
  shrink.modulus_ratio = 0.5;
  shrink.base_modulus = 2.0;  // deeper annulus is 2 * 0.5 = 1, as above
  const auto a = assemble_dilatation({grow}, 2.0);
  const auto b = assemble_dilatation({shrink}, 2.0);
  CHECK(a.total == b.total);
  CHECK(a.per_cylinder[0][0].inner == b.per_cylinder[0][0].inner);
  CHECK(a.per_cylinder[0][0].blend == b.per_cylinder[0][0].blend);
}

TEST_CASE("assembled dilatation rejects bad input") {
  CHECK_THROWS_AS(assemble_dilatation({}, 1.0), std::invalid_argument);

  TransitionInput cyl;
  cyl.label = "A";
  cyl.modulus_ratio = 2.0;
  CHECK_THROWS_AS(assemble_dilatation({cyl}, -1.0), std::domain_error);

  cyl.modulus_ratio = -2.0;
  CHECK_THROWS_AS(assemble_dilatation({cyl}, 1.0), std::domain_error);

  cyl.modulus_ratio = 2.0;
  cyl.outer_dilatation_side1 = 0.5;
  CHECK_THROWS_AS(assemble_dilatation({cyl}, 1.0), std::domain_error);

  cyl.outer_dilatation_side1 = 1.0;
  cyl.coeff_side1 = 0.001;
  cyl.exponent_override = -1.0;
  CHECK_THROWS_WITH_AS(
      assemble_dilatation({cyl}, 0.1),
      "assemble_dilatation: t below threshold time for cylinder 'A'",
      std::domain_error);
}
