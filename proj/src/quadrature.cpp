#include "casimir/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"

namespace casimir {

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0 && rel_tol < 1.0))
        throw input_error("quadrature rel_tol must lie in (0, 1)");
    if (max_levels < 4)
        throw input_error("quadrature max_levels must be >= 4");
}

namespace {

// Legendre nodes by Newton iteration on P_n, standard recurrence.
GaussRule build_rule(int n) {
    GaussRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Tricomi initial guess
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        // map [-1,1] -> (0,1)
        rule.x[i] = 0.5 * (1.0 - z);
        rule.x[n - 1 - i] = 0.5 * (1.0 + z);
        double w = 1.0 / ((1.0 - z * z) * pp * pp); // = 2/((1-z^2) pp^2) * 1/2
        rule.w[i] = w;
        rule.w[n - 1 - i] = w;
    }
    return rule;
}

} // namespace

std::shared_ptr<const GaussRule> gauss_rule(int n) {
    if (n < 1) throw input_error("gauss_rule: n must be >= 1");
    static std::mutex mtx;
    static std::map<int, std::shared_ptr<const GaussRule>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    auto rule = std::make_shared<const GaussRule>(build_rule(n));
    cache.emplace(n, rule);
    return rule;
}

MappedNode map_to_halfline(XiTransform t, double scale, double u) {
    if (t == XiTransform::Rational) {
        const double om = 1.0 - u;
        return {scale * u / om, scale / (om * om)};
    }
    const double om = 1.0 - u;
    return {-scale * std::log(om), scale / om};
}

} // namespace casimir
