#include "abelint/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "abelint/gauss.hpp"

namespace abelint {

const char* to_string(AnnulusKind k) {
    switch (k) {
        case AnnulusKind::O1: return "O1";
        case AnnulusKind::OMu: return "OMu";
        case AnnulusKind::OE: return "OE";
    }
    return "?";
}

const char* to_string(Terminator t) {
    switch (t) {
        case Terminator::SaddleLoop: return "SaddleLoop";
        case Terminator::HeteroclinicLoop: return "HeteroclinicLoop";
        case Terminator::CuspidalLoop: return "CuspidalLoop";
        case Terminator::EightLoopBoundary: return "EightLoopBoundary";
    }
    return "?";
}

const char* to_string(Region r) {
    switch (r) {
        case Region::RealAboveGamma: return "RealAboveGamma";
        case Region::RealBelowGamma: return "RealBelowGamma";
        case Region::RealDegenerate: return "RealDegenerate";
        case Region::ComplexLeftBranch: return "ComplexLeftBranch";
        case Region::ComplexRightBranch: return "ComplexRightBranch";
        case Region::ComplexBetweenBranches: return "ComplexBetweenBranches";
        case Region::OnCurve: return "OnCurve";
    }
    return "?";
}

Real gamma_mu(Real lambda) { return (3 * lambda * lambda - 5 * lambda) / (5 * (lambda - 2)); }

Real gamma_c_mu(Real lambda) {
    return ((1 + lambda) - std::sqrt(lambda * lambda - lambda + 1)) / 3.0;
}

Real hyperbola_residual(Complex lambda) {
    Real a = lambda.real(), b = lambda.imag();
    return b * b - 5 * a * (a - 1);
}

namespace {

std::string ordering_string(const CriticalValues& cv) {
    struct Item {
        Real v;
        const char* name;
    };
    std::vector<Item> it = {{cv.h1.real(), "h1"},
                            {cv.hMu.real(), "hmu"},
                            {cv.hLambda.real(), "hlam"},
                            {cv.h0.real(), "h0"}};
    std::stable_sort(it.begin(), it.end(), [](const Item& a, const Item& b) { return a.v < b.v; });
    std::ostringstream os;
    for (size_t j = 0; j < it.size(); ++j) {
        if (j) os << (near(it[j].v, it[j - 1].v, 1e-14 + 1e-12 * std::abs(it[j].v)) ? "=" : "<");
        os << it[j].name;
    }
    return os.str();
}

Eigen::Matrix4i diagram_from_edges(std::initializer_list<std::pair<int, int>> edges) {
    Eigen::Matrix4i m = Eigen::Matrix4i::Zero();
    for (auto [i, j] : edges) {
        m(i, j) = 1;
        m(j, i) = 1;
    }
    return m;
}

}  // namespace

Eigen::Matrix4i dynkin(Region region) {
    // index order: 0 = delta0, 1 = delta1, 2 = deltaLambda, 3 = deltaMu
    switch (region) {
        case Region::RealAboveGamma:
        case Region::RealBelowGamma:
            // path delta1 - deltaLambda - deltaMu - delta0; independent of the
            // ordering of the critical values
            return diagram_from_edges({{1, 2}, {2, 3}, {3, 0}});
        case Region::ComplexLeftBranch:
            return diagram_from_edges({{1, 0}, {0, 2}, {0, 3}, {2, 3}});
        case Region::ComplexRightBranch:
            return diagram_from_edges({{0, 1}, {1, 2}, {1, 3}, {2, 3}});
        case Region::ComplexBetweenBranches:
            return diagram_from_edges({{0, 2}, {2, 1}, {1, 3}, {3, 0}, {0, 1}});
        default:
            throw std::invalid_argument(
                "dynkin: diagram undefined for degenerate/on-curve parameters");
    }
}

RegionReport classify(const ParameterPoint& p) {
    std::string why;
    if (!p.valid(&why)) throw std::invalid_argument("classify: " + why);
    HamiltonianModel m = build_normal_form(p);
    const CriticalValues cv = m.criticalValues;
    RegionReport rep;
    rep.criticalOrdering = ordering_string(cv);

    const Real tol = kCurveMembershipTol;
    if (p.kind == ParameterCase::Real) {
        const Real l = p.lambda.real(), u = p.mu.real();
        const Real h1 = cv.h1.real(), hl = cv.hLambda.real(), hm = cv.hMu.real();

        bool onBoundary = u < tol || l - u < tol || 1 - l < tol;
        bool onGamma = !onBoundary && std::abs(u - gamma_mu(l)) < tol;
        bool cusp = !(u < tol) && l - u < tol;

        if (onBoundary) {
            rep.region = Region::RealDegenerate;
            rep.detail = u < tol ? "mu=0" : (cusp ? "mu=lambda" : "lambda=1");
        } else if (onGamma) {
            rep.region = Region::OnCurve;
            rep.detail = "gamma";
        } else {
            rep.region = u > gamma_mu(l) ? Region::RealAboveGamma : Region::RealBelowGamma;
            rep.dynkin = dynkin(rep.region);
            rep.dynkinValid = true;
        }

        const bool eight = hl < 0;  // h_lambda < h_0 = 0
        // O1 around (1,0): present unless the center merged into the cusp at lambda=1
        if (1 - l >= tol) {
            PeriodAnnulus a;
            a.kind = AnnulusKind::O1;
            a.center = Complex(1, 0);
            a.hc = h1;
            a.hs = hl;
            a.saddleX = l;
            a.terminator = cusp ? Terminator::CuspidalLoop
                                : (eight ? Terminator::EightLoopBoundary : Terminator::SaddleLoop);
            a.exceptional = true;
            rep.annuli.push_back(a);
        }
        // OMu around (mu,0): needs 0 < mu < lambda
        if (u >= tol && !cusp) {
            PeriodAnnulus a;
            a.kind = AnnulusKind::OMu;
            a.center = Complex(u, 0);
            a.hc = hm;
            a.hs = std::min(Real(0), hl);
            if (onGamma) {
                a.terminator = Terminator::HeteroclinicLoop;
                a.saddleX = l;
            } else if (eight) {
                a.terminator = Terminator::EightLoopBoundary;
                a.saddleX = l;
            } else {
                a.terminator = Terminator::SaddleLoop;
                a.saddleX = 0;
            }
            rep.annuli.push_back(a);
        }
        // OE around the eight (or cuspidal) loop: needs h_lambda < h_0
        if (eight && !onGamma) {
            PeriodAnnulus a;
            a.kind = AnnulusKind::OE;
            a.hc = hl;
            a.hs = 0;
            a.terminator = Terminator::SaddleLoop;
            a.saddleX = 0;
            a.lowerTerminator = cusp ? Terminator::CuspidalLoop : Terminator::EightLoopBoundary;
            a.lowerSaddleX = l;
            rep.annuli.push_back(a);
        }
    } else {
        const Real s = hyperbola_residual(p.lambda);
        const Real a = p.lambda.real();
        // approximate parameter-space distance to Gamma
        Real grad = std::hypot(5 - 10 * a, 2 * p.lambda.imag()) + 1;
        if (std::abs(s) / grad < tol) {
            rep.region = Region::OnCurve;
            rep.detail = "Gamma";
        } else if (s < 0 && a < 0) {
            rep.region = Region::ComplexLeftBranch;
        } else if (s < 0 && a > 1) {
            rep.region = Region::ComplexRightBranch;
        } else {
            rep.region = Region::ComplexBetweenBranches;
        }
        if (rep.region != Region::OnCurve) {
            rep.dynkin = dynkin(rep.region);
            rep.dynkinValid = true;
        }
        PeriodAnnulus a1;
        a1.kind = AnnulusKind::O1;
        a1.center = Complex(1, 0);
        a1.hc = cv.h1.real();
        a1.hs = 0;
        a1.terminator = Terminator::SaddleLoop;
        a1.saddleX = 0;
        a1.exceptional = rep.region == Region::ComplexLeftBranch;
        rep.annuli.push_back(a1);
    }
    return rep;
}

const PeriodAnnulus& find_annulus(const RegionReport& r, AnnulusKind k) {
    for (const auto& a : r.annuli)
        if (a.kind == k) return a;
    throw std::invalid_argument(std::string("annulus ") + to_string(k) +
                                " not present for these parameters");
}

bool exceptional(const ParameterPoint& p, const PeriodAnnulus& a) {
    if (a.kind != AnnulusKind::O1) return false;
    if (p.kind == ParameterCase::Real) return true;
    return hyperbola_residual(p.lambda) < 0 && p.lambda.real() < 0;
}

CurveId parse_curve_id(const std::string& name) {
    if (name == "gamma") return CurveId::Gamma;
    if (name == "Gamma" || name == "hyperbola") return CurveId::Hyperbola;
    if (name == "gamma_c_real") return CurveId::GammaCReal;
    if (name == "gamma_c_complex") return CurveId::GammaCComplex;
    if (name == "gamma_s") return CurveId::GammaS;
    throw std::invalid_argument("unknown curve id: " + name);
}

const char* to_string(CurveId id) {
    switch (id) {
        case CurveId::Gamma: return "gamma";
        case CurveId::Hyperbola: return "Gamma";
        case CurveId::GammaCReal: return "gamma_c_real";
        case CurveId::GammaCComplex: return "gamma_c_complex";
        case CurveId::GammaS: return "gamma_s";
    }
    return "?";
}

Real gamma_s_phi(Real lambda, Real mu) {
    ParameterPoint p = ParameterPoint::make_real(lambda, mu);
    HamiltonianModel m = build_normal_form(p);
    const Real hl = m.criticalValues.hLambda.real();
    if (hl >= 0)
        throw numerical_error("gamma_s_phi: no eight loop (h_lambda >= h_0); point not above gamma");
    VecC roots = solve_level(m, hl);
    // drop the double root at lambda: the two roots closest to it
    std::vector<Real> xs;
    std::vector<std::pair<Real, int>> byDist;
    for (int k = 0; k < roots.size(); ++k)
        byDist.push_back({std::abs(roots[k] - Complex(lambda, 0)), k});
    std::sort(byDist.begin(), byDist.end());
    for (int k = 0; k < roots.size(); ++k) {
        if (k == byDist[0].second || k == byDist[1].second) continue;
        if (std::abs(roots[k].imag()) > 1e-7)
            throw numerical_error("gamma_s_phi: non-real simple roots on the eight-loop level");
        xs.push_back(roots[k].real());
    }
    std::sort(xs.begin(), xs.end());
    const Real x1 = xs[0], x2 = xs[1], x3 = xs[2];
    auto pfun = [&](Real x) { return (x - x1) * (x - x2) * (x3 - x); };

    // int_lambda^{x3} dx/sqrt(p), endpoint singularity absorbed by x = x3 - u^2
    Real A = gauss_legendre(0.0, std::sqrt(x3 - lambda), [&](Real u) {
        Real x = x3 - u * u;
        return 2.0 / std::sqrt((x - x1) * (x - x2));
    });
    // int_{x2}^lambda dx/sqrt(p), x = x2 + u^2
    Real B = gauss_legendre(0.0, std::sqrt(lambda - x2), [&](Real u) {
        Real x = x2 + u * u;
        return 2.0 / std::sqrt((x - x1) * (x3 - x));
    });
    return std::sqrt(10.0) * (A - B);
}

Real gamma_s_mu(Real lambda) {
    if (!(lambda > 0 && lambda < 1))
        throw std::invalid_argument("gamma_s_mu: lambda must be inside (0,1)");
    Real lo = gamma_mu(lambda), hi = lambda;
    Real span = hi - lo;
    lo += 1e-7 * span;
    hi -= 1e-7 * span;
    Real flo = gamma_s_phi(lambda, lo);
    Real fhi = gamma_s_phi(lambda, hi);
    if (flo >= 0 || fhi <= 0)
        throw numerical_error("gamma_s_mu: bisection bracket failure at lambda=" +
                              std::to_string(lambda));
    for (int it = 0; it < 80 && hi - lo > 1e-14; ++it) {
        Real mid = 0.5 * (lo + hi);
        (gamma_s_phi(lambda, mid) < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<ParameterPoint> curve_samples(CurveId id, int n) {
    if (n < 2) throw std::invalid_argument("curve_samples: n >= 2 required");
    std::vector<ParameterPoint> out;
    out.reserve(n);
    switch (id) {
        case CurveId::Gamma:
            for (int j = 0; j < n; ++j) {
                Real l = Real(j) / (n - 1);
                out.push_back(ParameterPoint::make_real(l, gamma_mu(l)));
            }
            break;
        case CurveId::Hyperbola:
            // both branches: lambda = (1 -+ cosh s)/2 + i (sqrt5/2) sinh s
            for (int j = 0; j < n; ++j) {
                Real s = -2.0 + 4.0 * Real(j) / (n - 1);
                Real branch = (j % 2 == 0) ? -1.0 : 1.0;
                Complex l(0.5 + 0.5 * branch * std::cosh(s), 0.5 * std::sqrt(5.0) * std::sinh(s));
                if (l.imag() == 0) l.imag(1e-12);
                out.push_back(ParameterPoint::make_complex(l));
            }
            break;
        case CurveId::GammaCReal:
            for (int j = 0; j < n; ++j) {
                Real u = (1.0 / 3.0) * Real(j) / (n - 1);
                Real l = (u < 0.5) ? (3 * u * u - 2 * u) / (2 * u - 1) : 1.0;
                out.push_back(ParameterPoint::make_real(std::min(l, 1.0), u));
            }
            break;
        case CurveId::GammaCComplex:
            for (int j = 0; j < n; ++j) {
                Real th = 2 * M_PI * Real(j) / n;
                Complex l = Complex(2, 0) + std::polar(1.0, th);
                if (std::abs(l.imag()) < 1e-12) l.imag(1e-12);
                out.push_back(ParameterPoint::make_complex(l));
            }
            break;
        case CurveId::GammaS:
            for (int j = 0; j < n; ++j) {
                Real l = 0.02 + 0.96 * Real(j) / (n - 1);
                out.push_back(ParameterPoint::make_real(l, gamma_s_mu(l)));
            }
            break;
    }
    return out;
}

void write_curves_csv(std::ostream& os, CurveId id, const std::vector<ParameterPoint>& pts) {
    os << "curve,re_lambda,im_lambda,mu\n";
    for (const auto& p : pts)
        os << to_string(id) << ',' << p.lambda.real() << ',' << p.lambda.imag() << ','
           << p.mu.real() << '\n';
}

int count_annuli_bruteforce(const ParameterPoint& p) {
    HamiltonianModel m = build_normal_form(p);
    // real critical points of P and center test P'' > 0
    VecC croots = poly_roots(m.deriv[1]);
    std::vector<Real> centers;
    for (int k = 0; k < croots.size(); ++k) {
        if (std::abs(croots[k].imag()) > 1e-9) continue;
        Real x = croots[k].real();
        if (m.dP(2, x).real() > 1e-12) centers.push_back(x);
    }
    int count = int(centers.size());
    if (centers.size() == 2) {
        // an oval family around both centers exists iff some level set has a
        // component covering them both
        Real hl = m.criticalValues.hLambda.real();
        if (hl < 0) {
            Real h = 0.5 * hl;  // between h_lambda and h_0
            VecC r = solve_level(m, h);
            std::vector<Real> re;
            for (int k = 0; k < r.size(); ++k)
                if (std::abs(r[k].imag()) < 1e-9) re.push_back(r[k].real());
            std::sort(re.begin(), re.end());
            for (size_t j = 0; j + 1 < re.size(); ++j) {
                Real lo = re[j], hi = re[j + 1];
                if (m.P(Complex(0.5 * (lo + hi), 0)).real() < h && lo < centers[0] &&
                    hi > centers[1])
                    ++count;
            }
        }
    }
    return count;
}

}  // namespace abelint
