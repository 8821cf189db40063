#pragma once

#include <cmath>
#include <vector>

#include "abelint/scalars.hpp"

namespace abelint {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1,1],
/// computed once per n by Newton iteration and cached.
const std::pair<std::vector<Real>, std::vector<Real>>& legendre_rule(int n);

/// Fixed-order panel evaluation.
template <typename F>
auto gauss_legendre_panel(Real a, Real b, F&& f, int n = 40) -> decltype(f(a)) {
    const auto& [xs, ws] = legendre_rule(n);
    using V = decltype(f(a));
    V acc = V(0);
    const Real mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int j = 0; j < n; ++j) acc += ws[j] * f(mid + half * xs[j]);
    return acc * half;
}

/// Adaptive bisection driven by the difference between a whole-panel value
/// and the sum over two halves.  Suited to smooth integrands; endpoint
/// singularities must be substituted away by the caller.
template <typename F>
auto gauss_legendre(Real a, Real b, F&& f, Real relTol = 1e-12, int maxDepth = 24,
                    Real* errEst = nullptr) -> decltype(f(a)) {
    using V = decltype(f(a));
    struct Seg {
        Real a, b;
        V whole;
        int depth;
    };
    V total = V(0);
    Real err = 0;
    std::vector<Seg> stack{{a, b, gauss_legendre_panel(a, b, f), 0}};
    const Real scale0 = std::abs(stack.front().whole) + 1e-300;
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        Real mid = 0.5 * (s.a + s.b);
        V left = gauss_legendre_panel(s.a, mid, f);
        V right = gauss_legendre_panel(mid, s.b, f);
        Real delta = std::abs(left + right - s.whole);
        if (delta <= relTol * scale0 || s.depth >= maxDepth) {
            total += left + right;
            err += delta;
        } else {
            stack.push_back({s.a, mid, left, s.depth + 1});
            stack.push_back({mid, s.b, right, s.depth + 1});
        }
    }
    if (errEst) *errEst = err;
    return total;
}

}  // namespace abelint
