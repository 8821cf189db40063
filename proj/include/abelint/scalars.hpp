#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace abelint {

using Real = double;
using Complex = std::complex<Real>;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;

inline constexpr Real kDefaultRelTol = 1e-10;
inline constexpr Real kCurveMembershipTol = 1e-10;
inline constexpr Real kConjPairTol = 1e-9;

/// Thrown when an iterative scheme fails to converge or a quadrature
/// cannot be set up (bracketing, contour separation, branch tracing).
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when an asserted bound from the underlying theory is violated
/// by a computed result.  Never swallowed: a violation is the most
/// interesting outcome a run can have.
struct bound_violation : std::runtime_error {
    explicit bound_violation(const std::string& what) : std::runtime_error(what) {}
};

inline bool near(Real a, Real b, Real tol) { return std::abs(a - b) <= tol; }

inline Real rel_diff(Complex a, Complex b) {
    Real s = std::max(std::abs(a), std::abs(b));
    return s == 0 ? 0 : std::abs(a - b) / s;
}

}  // namespace abelint
