#pragma once

#include <array>
#include <string>

#include "abelint/polynomial.hpp"
#include "abelint/scalars.hpp"

namespace abelint {

// H(x,y) = yFactor * y^2 + P(x).  The quintic normal form uses
// yFactor = 1/2 with P' (x) = x (x-mu) (x-lambda) (x-1); the center
// families use yFactor = 1 with P(x) = x^2 (1 + a1 x + ... + a_{n-2} x^{n-2}).

enum class ParameterCase { Real, Complex };

struct ParameterPoint {
    Complex lambda{0.0, 0.0};
    Complex mu{0.0, 0.0};
    ParameterCase kind = ParameterCase::Real;

    static ParameterPoint make_real(Real lambda, Real mu);
    static ParameterPoint make_complex(Complex lambda);

    /// Checks the case invariants: real => 0 <= mu <= lambda <= 1 with zero
    /// imaginary parts; complex => mu = conj(lambda), Im lambda != 0.
    bool valid(std::string* why = nullptr) const;
};

struct CriticalValues {
    Complex h0, hMu, hLambda, h1;
};

struct HamiltonianModel {
    Real yFactor = 0.5;
    VecC pCoeffs;                          // ascending degree
    std::array<VecC, 5> deriv;             // deriv[j] = coefficients of P^(j)
    std::vector<Complex> criticalPoints;   // {0, mu, lambda, 1} for the normal form
    CriticalValues criticalValues{};
    ParameterPoint params{};               // meaningful for the normal form only
    bool isNormalForm = false;

    Complex P(Complex x) const { return polyval(pCoeffs, x); }
    Complex dP(int j, Complex x) const { return polyval(deriv[j], x); }
};

struct CenterFamilyModel {
    int degree = 4;    // n >= 4
    VecR a;            // a1 ... a_{n-2}
    int genus() const { return (degree - 1) / 2; }
    bool valid(std::string* why = nullptr) const;
};

/// Quintic normal form for a parameter point; fills critical data.
HamiltonianModel build_normal_form(const ParameterPoint& p);

/// H = y^2 + x^2 (1 + a1 x + ... + a_{n-2} x^{n-2}).
HamiltonianModel build_center_family(const CenterFamilyModel& cf);

/// Closed-form critical values, cross-checked against P(x_c).
CriticalValues critical_values(const HamiltonianModel& m);

/// The five (degree-many) roots of P(x) = h, multiset-complete, sorted by
/// (real, imaginary) with exact conjugate symmetrization.
VecC solve_level(const HamiltonianModel& m, Complex h);

struct DerivativeSet {
    Complex P, dP, d2P, d3P, d4P;
};

DerivativeSet derivatives(const HamiltonianModel& m, Complex x);

}  // namespace abelint
