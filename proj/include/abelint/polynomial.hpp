#pragma once

#include <utility>
#include <vector>

#include "abelint/scalars.hpp"

namespace abelint {

// Polynomials are stored as Eigen vectors of complex coefficients in
// ascending degree: p(x) = c[0] + c[1] x + ... + c[n] x^n.

/// Horner evaluation; works for real or complex arguments.
template <typename Scalar>
Scalar polyval(const VecC& c, Scalar x) {
    Scalar r = Scalar(0);
    for (Eigen::Index k = c.size() - 1; k >= 0; --k) r = r * x + Scalar(c[k]);
    return r;
}

VecC polyder(const VecC& c);

/// Coefficients of s -> p(x0 + s) (Taylor shift by repeated synthetic division).
VecC taylor_shift(const VecC& c, Complex x0);

/// Divide p by (x - root); returns {quotient, remainder}.
std::pair<VecC, Complex> deflate(const VecC& c, Complex root);

/// True if every coefficient has negligible imaginary part relative to the
/// largest coefficient magnitude.
bool has_real_coeffs(const VecC& c, Real tol = 1e-13);

/// All roots of p via companion-matrix eigenvalues followed by one Newton
/// polish per root.  Conjugate pairs of real-coefficient polynomials are
/// symmetrized exactly; output is sorted lexicographically by
/// (real part, imaginary part).
VecC poly_roots(const VecC& c);

/// Largest root magnitude scale used for residual tolerances.
Real poly_scale(const VecC& c, Complex h);

}  // namespace abelint
