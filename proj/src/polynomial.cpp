#include "abelint/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace abelint {

VecC polyder(const VecC& c) {
    if (c.size() <= 1) return VecC::Zero(1);
    VecC d(c.size() - 1);
    for (Eigen::Index k = 1; k < c.size(); ++k) d[k - 1] = Real(k) * c[k];
    return d;
}

VecC taylor_shift(const VecC& c, Complex x0) {
    // repeated synthetic division; afterwards b[j] = p^(j)(x0)/j!
    VecC b = c;
    const Eigen::Index n = c.size() - 1;
    for (Eigen::Index j = 0; j <= n; ++j)
        for (Eigen::Index k = n - 1; k >= j; --k) b[k] += x0 * b[k + 1];
    return b;
}

std::pair<VecC, Complex> deflate(const VecC& c, Complex root) {
    const Eigen::Index n = c.size() - 1;
    VecC q = VecC::Zero(std::max<Eigen::Index>(n, 1));
    Complex acc = c[n];
    for (Eigen::Index k = n - 1; k >= 0; --k) {
        q[k] = acc;
        acc = c[k] + acc * root;
    }
    return {q, acc};
}

bool has_real_coeffs(const VecC& c, Real tol) {
    Real scale = 0;
    for (Eigen::Index k = 0; k < c.size(); ++k) scale = std::max(scale, std::abs(c[k]));
    if (scale == 0) return true;
    for (Eigen::Index k = 0; k < c.size(); ++k)
        if (std::abs(c[k].imag()) > tol * scale) return false;
    return true;
}

Real poly_scale(const VecC& c, Complex h) {
    Real s = std::abs(h);
    for (Eigen::Index k = 0; k < c.size(); ++k) s = std::max(s, std::abs(c[k]));
    return std::max(s, Real(1));
}

namespace {

void newton_polish(const VecC& c, const VecC& dc, Complex& r) {
    Complex p = polyval(c, r);
    Complex dp = polyval(dc, r);
    if (std::abs(dp) > 0) {
        Complex step = p / dp;
        if (std::abs(step) < 0.1 * (1.0 + std::abs(r))) r -= step;
    }
}

void symmetrize_conjugates(std::vector<Complex>& roots) {
    const Real tol = kConjPairTol;
    std::vector<bool> used(roots.size(), false);
    for (size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        Real scale = std::max(Real(1), std::abs(roots[i]));
        if (std::abs(roots[i].imag()) <= 1e-11 * scale) {
            roots[i].imag(0.0);
            used[i] = true;
            continue;
        }
        size_t best = i;
        Real bestd = tol * scale;
        for (size_t j = i + 1; j < roots.size(); ++j) {
            if (used[j]) continue;
            Real d = std::abs(std::conj(roots[j]) - roots[i]);
            if (d < bestd) {
                bestd = d;
                best = j;
            }
        }
        if (best != i) {
            Complex m = 0.5 * (roots[i] + std::conj(roots[best]));
            roots[i] = m;
            roots[best] = std::conj(m);
            used[i] = used[best] = true;
        } else if (std::abs(roots[i].imag()) <= tol * scale) {
            roots[i].imag(0.0);
            used[i] = true;
        }
    }
}

}  // namespace

VecC poly_roots(const VecC& c) {
    Eigen::Index n = c.size() - 1;
    while (n > 0 && std::abs(c[n]) == 0) --n;
    if (n < 1) throw numerical_error("poly_roots: constant polynomial");
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) comp(k, n - 1) = -c[k] / c[n];
    for (Eigen::Index k = 1; k < n; ++k) comp(k, k - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    if (es.info() != Eigen::Success) throw numerical_error("poly_roots: eigensolver failed");

    VecC dc = polyder(c.head(n + 1));
    std::vector<Complex> roots(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        roots[k] = es.eigenvalues()[k];
        newton_polish(c, dc, roots[k]);
    }
    if (has_real_coeffs(c)) symmetrize_conjugates(roots);
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    VecC out(n);
    for (Eigen::Index k = 0; k < n; ++k) out[k] = roots[k];
    return out;
}

}  // namespace abelint
