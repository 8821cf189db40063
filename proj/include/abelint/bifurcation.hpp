#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "abelint/hamiltonian.hpp"

namespace abelint {

enum class AnnulusKind { O1, OMu, OE };
enum class Terminator { SaddleLoop, HeteroclinicLoop, CuspidalLoop, EightLoopBoundary };

const char* to_string(AnnulusKind k);
const char* to_string(Terminator t);

struct PeriodAnnulus {
    AnnulusKind kind = AnnulusKind::O1;
    std::optional<Complex> center;   // absent for OE
    Real hc = 0, hs = 0;             // maximal interval Sigma = (hc, hs)
    Terminator terminator = Terminator::SaddleLoop;  // at the hs end
    Real saddleX = 0;                                // x_s at the hs end
    bool exceptional = false;

    // OE only: its lower end is a polycycle too (the eight or cuspidal loop).
    std::optional<Terminator> lowerTerminator;
    Real lowerSaddleX = 0;

    Real length() const { return hs - hc; }
    bool contains(Real h) const { return hc < h && h < hs; }
};

enum class Region {
    RealAboveGamma,
    RealBelowGamma,
    RealDegenerate,
    ComplexLeftBranch,
    ComplexRightBranch,
    ComplexBetweenBranches,
    OnCurve
};

const char* to_string(Region r);

struct RegionReport {
    Region region = Region::RealAboveGamma;
    std::string detail;                  // boundary / curve id for degenerate cases
    std::vector<PeriodAnnulus> annuli;
    std::string criticalOrdering;        // e.g. "h1<hmu<hlam<h0"
    Eigen::Matrix4i dynkin;              // indices: delta0, delta1, deltaLambda, deltaMu
    bool dynkinValid = false;
};

/// mu on the curve gamma (h_lambda = h_0) at given real lambda.
Real gamma_mu(Real lambda);

/// mu on gamma_c (F'(h_mu) sign change) at given real lambda; the lower root.
Real gamma_c_mu(Real lambda);

/// Signed hyperbola residual (Im l)^2 - 5 Re l (Re l - 1); zero on Gamma.
Real hyperbola_residual(Complex lambda);

RegionReport classify(const ParameterPoint& p);

const PeriodAnnulus& find_annulus(const RegionReport& r, AnnulusKind k);

bool exceptional(const ParameterPoint& p, const PeriodAnnulus& a);

/// Intersection-number magnitudes of the four vanishing-cycle families,
/// indexed (delta0, delta1, deltaLambda, deltaMu).  Throws on degenerate
/// regions where the diagram is not defined.
Eigen::Matrix4i dynkin(Region region);

enum class CurveId { Gamma, Hyperbola, GammaCReal, GammaCComplex, GammaS };

CurveId parse_curve_id(const std::string& name);
const char* to_string(CurveId id);

/// mu on gamma_s (I1(h_lambda) = lambda I0(h_lambda)) at given lambda,
/// located by bisection in mu between gamma and the diagonal.
Real gamma_s_mu(Real lambda);

/// phi(h_lambda) = I1(h_lambda) - lambda I0(h_lambda) over the eight loop,
/// evaluated from the incomplete elliptic form.
Real gamma_s_phi(Real lambda, Real mu);

std::vector<ParameterPoint> curve_samples(CurveId id, int n);

void write_curves_csv(std::ostream& os, CurveId id, const std::vector<ParameterPoint>& pts);

/// Test oracle: counts oval families from sign scans of P alone.
int count_annuli_bruteforce(const ParameterPoint& p);

}  // namespace abelint
