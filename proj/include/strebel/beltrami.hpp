#pragma once
// Finite-difference Beltrami coefficients.
//
// For a map f sampled near z, central differences give the Wirtinger
// derivatives
//     d_z f   = (f_x - i f_y) / 2,      d_zbar f = (f_x + i f_y) / 2,
// from which mu = d_zbar f / d_z f, the dilatation K = (1+|mu|)/(1-|mu|) and
// the jacobian |d_z f|^2 - |d_zbar f|^2 follow.  This is the module's
// independent check on every closed-form dilatation: it never reuses the
// analytic derivative formulas.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

namespace strebel {

using ComplexMap = std::function<std::complex<double>(std::complex<double>)>;

struct BeltramiSample {
  std::complex<double> d_z;
  std::complex<double> d_zbar;
  std::complex<double> mu;
  double dilatation = 1.0;
  double jacobian = 0.0;
};

inline BeltramiSample beltrami_numeric(const ComplexMap& f,
                                       std::complex<double> z, double h) {
  if (!(h > 0.0)) throw std::domain_error("beltrami_numeric: step must be positive");
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> fx = (f(z + h) - f(z - h)) / (2.0 * h);
  const std::complex<double> fy = (f(z + i * h) - f(z - i * h)) / (2.0 * h);
  BeltramiSample s;
  s.d_z = 0.5 * (fx - i * fy);
  s.d_zbar = 0.5 * (fx + i * fy);
  s.jacobian = std::norm(s.d_z) - std::norm(s.d_zbar);
  if (!(std::abs(s.d_zbar) < std::abs(s.d_z)))
    throw std::domain_error(
        "beltrami_numeric: |mu| >= 1, map is not orientation preserving here");
  s.mu = s.d_zbar / s.d_z;
  const double am = std::abs(s.mu);
  s.dilatation = (1.0 + am) / (1.0 - am);
  return s;
}

// Same, but cross-checked at steps h and h/2.  The halved-step value is
// returned; disagreement beyond 10x the target tolerance means the sample
// cannot be trusted at this step size and is refused.
inline BeltramiSample beltrami_stable(const ComplexMap& f,
                                      std::complex<double> z, double h,
                                      double target_tol) {
  BeltramiSample coarse = beltrami_numeric(f, z, h);
  BeltramiSample fine = beltrami_numeric(f, z, 0.5 * h);
  const double drift =
      std::abs(fine.dilatation - coarse.dilatation) / fine.dilatation;
  if (drift > 10.0 * target_tol)
    throw std::runtime_error(
        "beltrami_stable: step-halving check failed; derivative estimate unstable");
  return fine;
}

}  // namespace strebel
