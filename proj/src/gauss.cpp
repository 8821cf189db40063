#include "abelint/gauss.hpp"

#include <map>
#include <mutex>

namespace abelint {

namespace {

std::pair<std::vector<Real>, std::vector<Real>> make_rule(int n) {
    std::vector<Real> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton from the Chebyshev-based initial guess
        Real z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        Real pp = 0;
        for (int it = 0; it < 100; ++it) {
            Real p0 = 1, p1 = 0;
            for (int j = 0; j < n; ++j) {
                Real p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
            }
            pp = n * (z * p0 - p1) / (z * z - 1);
            Real dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1 - z * z) * pp * pp);
    }
    return {x, w};
}

}  // namespace

const std::pair<std::vector<Real>, std::vector<Real>>& legendre_rule(int n) {
    static std::map<int, std::pair<std::vector<Real>, std::vector<Real>>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
    return it->second;
}

}  // namespace abelint
