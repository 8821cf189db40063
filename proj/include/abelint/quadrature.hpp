#pragma once

#include <functional>
#include <vector>

#include "abelint/bifurcation.hpp"
#include "abelint/hamiltonian.hpp"

namespace abelint {

enum class IntegralMethod { RealOval, RCurve, ComplexContour };

const char* to_string(IntegralMethod m);

struct QuadratureOptions {
    Real relTol = kDefaultRelTol;
    int maxNodes = 1 << 16;
    int minNodes = 32;
};

struct IntegralSample {
    Complex h;
    int k = 0;
    Complex value;
    Real errorEstimate = 0;
    IntegralMethod method = IntegralMethod::RealOval;
    bool converged = true;
};

/// Endpoints alpha < beta of the oval x-projection at energy h in Sigma(a):
/// the component of {P <= h} carrying the oval.
std::pair<Real, Real> oval_endpoints(const HamiltonianModel& m, const PeriodAnnulus& a, Real h);

/// I_k(h) = oint x^k dx/y over the real oval, via Gauss-Chebyshev nodes in
/// the weight 1/sqrt((x-alpha)(beta-x)) after deflating the bracketing roots.
IntegralSample abelian_integral(const HamiltonianModel& m, const PeriodAnnulus& a, Real h, int k,
                                const QuadratureOptions& opts = {});

/// Same quadrature for oint G(x) dx/y with a polynomial numerator (single
/// pass, shared nodes).
IntegralSample abelian_integral_combo(const HamiltonianModel& m, const PeriodAnnulus& a, Real h,
                                      const VecR& gCoeffs, const QuadratureOptions& opts = {});

struct RBranch {
    std::vector<Real> y, x;  // samples along the branch, y strictly increasing
    Real yMax = 0;           // = Im beta(h)
    Real xAtYMax = 0;
};

/// Branch of R(x,y) = P'(x) - y^2 P'''(x)/6 + y^4/5 = 0 through the center,
/// traced in y up to the height where Q(x(y),y) = h.  Normal form only.
RBranch trace_R_branch(const HamiltonianModel& m, const PeriodAnnulus& a, Real h,
                       const QuadratureOptions& opts = {});

/// Analytic continuation of I_0 below the center level:
/// I_0(h) = 2 sqrt(2) int_0^{y_h} dy / sqrt(Q(x(y),y) - h).
IntegralSample continued_integral(const HamiltonianModel& m, const PeriodAnnulus& a, Real h,
                                  const QuadratureOptions& opts = {});

/// oint x^k dx/y over a positively-oriented circle enclosing exactly the two
/// designated roots of P(x) = h, with y = sqrt((h-P)/yFactor) tracked
/// continuously around the contour.
Complex complex_cycle_integral(const HamiltonianModel& m, Complex h, Complex p1, Complex p2, int k,
                               const QuadratureOptions& opts = {}, Real* errEstimate = nullptr);

/// Analytic continuation of the oval cycle from Sigma across h_s and along
/// the h-plane: tracks the branch-point pair and the sign of the cycle
/// integrals so that sampled values form one continuous determination.
class CycleTracker {
  public:
    CycleTracker(const HamiltonianModel& m, const PeriodAnnulus& a,
                 const QuadratureOptions& opts = {});

    /// Continue to a real target h > h_s; the first crossing detours around
    /// h_s through the upper half plane (the "+" determination).
    void continue_to_real(Real target);

    /// Walk a path of complex energies (each leg subdivided adaptively).
    void walk(Complex target);

    /// Sign-fixed cycle integral at the current h.
    Complex integral(int k, Real* errEstimate = nullptr) const;

    /// Cheap fixed-order probe of oint x^k dx/y (used for winding samples).
    Complex probe(int k) const;

    Complex h() const { return h_; }
    std::pair<Complex, Complex> branch_pair() const { return {p1_, p2_}; }
    Real hs() const { return hs_; }

  private:
    void step_to(Complex target);
    void cross_cut(Real target);

    const HamiltonianModel& m_;
    QuadratureOptions opts_;
    Real hs_, hc_;
    Complex h_;
    Complex p1_, p2_;
    Real sign_ = 1;
    Complex probe0_;  // last I_0 probe, for sign continuity
    bool crossed_ = false;
};

struct DeltaResult {
    Real h = 0;
    Complex delta;   // det of the two-determination period matrix
    Real imF = 0;    // Im(I1+/I0+) = delta / (2 i |I0|^2)
    Complex I0plus, I1plus;
    Real errorEstimate = 0;
};

/// Delta(h) for real h > h_s on an exceptional annulus; h must be regular.
DeltaResult delta_determinant(const HamiltonianModel& m, const PeriodAnnulus& a, Real h,
                              const QuadratureOptions& opts = {});

/// Delta on an ascending grid, sharing one continuation pass.
std::vector<DeltaResult> delta_grid(const HamiltonianModel& m, const PeriodAnnulus& a,
                                    const VecR& hs, const QuadratureOptions& opts = {});

struct DeltaCritical {
    Real hstar = 0;
    Complex x0;           // double root: the saddle on the critical level
    Complex contour;      // limit of delta_determinant at h*
    Complex residue;      // reciprocity-law evaluation on the normalized elliptic curve
    Real matchError = 0;  // min over sign of |contour -+ residue| / |residue|
};

/// The degenerate case: h* in (h_s, oo) a critical value of H, evaluated by
/// both the contour limit and the elliptic residue formula.
DeltaCritical delta_at_critical(const HamiltonianModel& m, const PeriodAnnulus& a, Real hstar,
                                const QuadratureOptions& opts = {});

enum class WindingTarget { I0, I1, F };

struct WindingPiece {
    std::string name;
    Real dArg = 0;
    int samples = 0;
};

struct WindingReport {
    std::vector<WindingPiece> pieces;
    Real total = 0;
    Real closureError = 0;  // |f(end) - f(start)| / |f(start)| around the loop
};

/// Argument increase of I_0, I_1 or F = alpha0 + I1/I0 along the positively
/// oriented boundary of D_r = C minus [h_s, oo) minus {|h-h_s|<r} minus
/// {|h|>1/r}.
WindingReport winding(const HamiltonianModel& m, const PeriodAnnulus& a, Real r,
                      WindingTarget target = WindingTarget::I0, Real alpha0 = 0,
                      const QuadratureOptions& opts = {});

}  // namespace abelint
