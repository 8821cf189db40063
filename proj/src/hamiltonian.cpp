#include "abelint/hamiltonian.hpp"

#include <cmath>

namespace abelint {

ParameterPoint ParameterPoint::make_real(Real lambda, Real mu) {
    ParameterPoint p;
    p.lambda = Complex(lambda, 0);
    p.mu = Complex(mu, 0);
    p.kind = ParameterCase::Real;
    return p;
}

ParameterPoint ParameterPoint::make_complex(Complex lambda) {
    ParameterPoint p;
    p.lambda = lambda;
    p.mu = std::conj(lambda);
    p.kind = ParameterCase::Complex;
    return p;
}

bool ParameterPoint::valid(std::string* why) const {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (kind == ParameterCase::Real) {
        if (lambda.imag() != 0 || mu.imag() != 0)
            return fail("real case requires real lambda, mu");
        Real l = lambda.real(), m = mu.real();
        if (!(0 <= m && m <= l && l <= 1))
            return fail("real case requires 0 <= mu <= lambda <= 1");
        return true;
    }
    if (lambda.imag() == 0) return fail("complex case requires Im lambda != 0");
    if (std::abs(mu - std::conj(lambda)) > 1e-14 * (1 + std::abs(lambda)))
        return fail("complex case requires mu = conj(lambda)");
    return true;
}

bool CenterFamilyModel::valid(std::string* why) const {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (degree < 4) return fail("center family requires degree n >= 4");
    if (a.size() != degree - 2) return fail("expected n-2 coefficients a1..a_{n-2}");
    if (a[a.size() - 1] == 0) return fail("a_{n-2} must be nonzero");
    if (genus() < 2) return fail("genus must be >= 2");
    return true;
}

namespace {

void fill_derivatives(HamiltonianModel& m) {
    m.deriv[0] = m.pCoeffs;
    for (int j = 1; j < 5; ++j) m.deriv[j] = polyder(m.deriv[j - 1]);
}

}  // namespace

HamiltonianModel build_normal_form(const ParameterPoint& p) {
    std::string why;
    if (!p.valid(&why)) throw std::invalid_argument("build_normal_form: " + why);
    const Complex l = p.lambda, u = p.mu;
    HamiltonianModel m;
    m.yFactor = 0.5;
    m.pCoeffs = VecC(6);
    m.pCoeffs << Complex(0), Complex(0), -l * u / 2.0, (l + u + l * u) / 3.0,
        -(1.0 + l + u) / 4.0, Complex(0.2);
    fill_derivatives(m);
    m.criticalPoints = {Complex(0), u, l, Complex(1)};
    m.params = p;
    m.isNormalForm = true;
    m.criticalValues = critical_values(m);
    return m;
}

HamiltonianModel build_center_family(const CenterFamilyModel& cf) {
    std::string why;
    if (!cf.valid(&why)) throw std::invalid_argument("build_center_family: " + why);
    HamiltonianModel m;
    m.yFactor = 1.0;
    m.pCoeffs = VecC::Zero(cf.degree + 1);
    m.pCoeffs[2] = 1.0;
    for (int k = 0; k < cf.a.size(); ++k) m.pCoeffs[3 + k] = cf.a[k];
    fill_derivatives(m);
    m.criticalPoints = {Complex(0)};
    m.isNormalForm = false;
    m.criticalValues = CriticalValues{};
    return m;
}

CriticalValues critical_values(const HamiltonianModel& m) {
    if (!m.isNormalForm)
        throw std::invalid_argument("critical_values: requires the quintic normal form");
    const Complex l = m.params.lambda, u = m.params.mu;
    CriticalValues cv;
    cv.h0 = 0.0;
    cv.h1 = -(3.0 - 5.0 * l - 5.0 * u + 10.0 * l * u) / 60.0;
    cv.hLambda = -(l * l * l / 60.0) * (3.0 * l * l - 5.0 * l * u - 5.0 * l + 10.0 * u);
    cv.hMu = -(u * u * u / 60.0) * (3.0 * u * u - 5.0 * l * u - 5.0 * u + 10.0 * l);
    // cross-check the closed forms against direct evaluation
    const Complex at[4] = {cv.h0, cv.hMu, cv.hLambda, cv.h1};
    for (int j = 0; j < 4; ++j) {
        Complex direct = polyval(m.pCoeffs, m.criticalPoints[j]);
        if (std::abs(direct - at[j]) > 1e-12 * poly_scale(m.pCoeffs, at[j]))
            throw numerical_error("critical_values: closed form disagrees with P(x_c)");
    }
    return cv;
}

VecC solve_level(const HamiltonianModel& m, Complex h) {
    VecC c = m.pCoeffs;
    c[0] -= h;
    VecC roots = poly_roots(c);
    const Real tol = 1e-8 * poly_scale(m.pCoeffs, h);
    for (Eigen::Index k = 0; k < roots.size(); ++k) {
        Complex resid = polyval(m.pCoeffs, roots[k]) - h;
        Real rscale = std::max(Real(1), std::pow(std::abs(roots[k]), Real(c.size() - 1)));
        if (std::abs(resid) > tol * rscale)
            throw numerical_error("solve_level: root residual " + std::to_string(std::abs(resid)));
    }
    return roots;
}

DerivativeSet derivatives(const HamiltonianModel& m, Complex x) {
    return {m.dP(0, x), m.dP(1, x), m.dP(2, x), m.dP(3, x), m.dP(4, x)};
}

}  // namespace abelint
