#include "casimir/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "casimir/errors.hpp"

namespace casimir {

PowerLawFit power_law_fit(const std::vector<XY>& points) {
    if (points.size() < 3) throw input_error("power_law_fit: needs >= 3 points");
    const std::size_t n = points.size();
    double sx = 0.0, sy = 0.0;
    for (const auto& p : points) {
        if (!(p.x > 0.0) || !(p.y > 0.0))
            throw input_error("power_law_fit: all points must be positive");
        sx += std::log(p.x);
        sy += std::log(p.y);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : points) {
        const double dx = std::log(p.x) - mx;
        const double dy = std::log(p.y) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw input_error("power_law_fit: collinear x values (underdetermined)");

    PowerLawFit fit;
    fit.exponent = sxy / sxx;
    const double intercept = my - fit.exponent * mx;
    fit.prefactor = std::exp(intercept);

    double ssr = 0.0;
    for (const auto& p : points) {
        const double r = std::log(p.y) - (intercept + fit.exponent * std::log(p.x));
        ssr += r * r;
    }
    const double s2 = n > 2 ? ssr / (n - 2) : 0.0;
    fit.sigma_exponent = std::sqrt(s2 / sxx);
    fit.sigma_prefactor = fit.prefactor * std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
    fit.r_squared = syy > 0.0 ? std::max(0.0, 1.0 - ssr / syy) : (ssr == 0.0 ? 1.0 : 0.0);
    return fit;
}

std::vector<RhoPoint> ratio_rho(const ForceCurve& measured, const ForceCurve& pfa,
                                double floor_threshold) {
    measured.validate();
    pfa.validate();
    if (measured.samples.size() != pfa.samples.size())
        throw input_error("ratio_rho: curves have different sample counts");
    if (!(floor_threshold >= 0.0)) throw input_error("ratio_rho: floor must be >= 0");
    std::vector<RhoPoint> out;
    out.reserve(measured.samples.size());
    for (std::size_t i = 0; i < measured.samples.size(); ++i) {
        const auto& m = measured.samples[i];
        const auto& p = pfa.samples[i];
        const double dref = std::max(std::abs(m.d), std::abs(p.d));
        if (std::abs(m.d - p.d) > 1e-9 * std::max(dref, 1e-30))
            throw input_error("ratio_rho: d grids differ");
        RhoPoint r;
        r.d = m.d;
        if (std::abs(p.F) < floor_threshold) {
            r.unbounded = true;
        } else {
            r.rho = m.F / p.F;
        }
        out.push_back(r);
    }
    return out;
}

namespace {

// piecewise-linear interpolant of F_grad
double grad_at(const ForceCurve& c, double d) {
    const auto& s = c.samples;
    if (d <= s.front().d) return s.front().F_grad;
    if (d >= s.back().d) return s.back().F_grad;
    std::size_t i = 0;
    while (i + 1 < s.size() && s[i + 1].d < d) ++i;
    const double t = (d - s[i].d) / (s[i + 1].d - s[i].d);
    return s[i].F_grad + t * (s[i + 1].F_grad - s[i].F_grad);
}

double grad_integral(const ForceCurve& c, double a, double b) {
    // trapezoid on the interpolant, breaking at interior sample points
    const auto& s = c.samples;
    double sum = 0.0;
    double x0 = a, y0 = grad_at(c, a);
    for (const auto& p : s) {
        if (p.d <= a || p.d >= b) continue;
        sum += 0.5 * (y0 + p.F_grad) * (p.d - x0);
        x0 = p.d;
        y0 = p.F_grad;
    }
    sum += 0.5 * (y0 + grad_at(c, b)) * (b - x0);
    return sum;
}

} // namespace

PeakStats peak_stats(const ForceCurve& curve) {
    curve.validate();
    if (!curve.discontinuities.empty())
        throw input_error("peak_stats: curve carries a discontinuity record "
                          "(delta-like jump, no finite peak)");
    const auto& s = curve.samples;
    if (s.size() < 3) throw input_error("peak_stats: needs >= 3 samples");

    std::size_t imax = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i].F_grad > s[imax].F_grad) imax = i;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (i != imax && s[i].F_grad == s[imax].F_grad)
            throw input_error("peak_stats: global maximum is not unique");
    if (imax == 0 || imax + 1 == s.size())
        throw input_error("peak_stats: maximum at an endpoint; peak not captured by the grid");

    // parabola through the three samples around the maximum
    const double x0 = s[imax - 1].d, x1 = s[imax].d, x2 = s[imax + 1].d;
    const double y0 = s[imax - 1].F_grad, y1 = s[imax].F_grad, y2 = s[imax + 1].F_grad;
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curv = (d12 - d01) / (x2 - x0); // half the second derivative
    PeakStats st;
    if (curv < 0.0) {
        st.location = 0.5 * (x0 + x1) - d01 / (2.0 * curv);
        st.location = std::clamp(st.location, x0, x2);
        st.height = y0 + d01 * (st.location - x0) + curv * (st.location - x0) * (st.location - x1);
    } else {
        st.location = x1;
        st.height = y1;
    }
    if (!(st.height > 0.0)) throw input_error("peak_stats: peak height must be > 0");

    // FWHM by linear crossing interpolation on both flanks
    const double half = 0.5 * st.height;
    double left = s.front().d, right = s.back().d;
    bool found_left = false, found_right = false;
    for (std::size_t i = imax; i-- > 0;) {
        if (s[i].F_grad < half) {
            const double t = (half - s[i].F_grad) / (s[i + 1].F_grad - s[i].F_grad);
            left = s[i].d + t * (s[i + 1].d - s[i].d);
            found_left = true;
            break;
        }
    }
    for (std::size_t i = imax + 1; i < s.size(); ++i) {
        if (s[i].F_grad < half) {
            const double t = (s[i - 1].F_grad - half) / (s[i - 1].F_grad - s[i].F_grad);
            right = s[i - 1].d + t * (s[i].d - s[i - 1].d);
            found_right = true;
            break;
        }
    }
    if (!found_left || !found_right)
        throw input_error("peak_stats: half maximum not reached inside the curve");
    st.fwhm = right - left;

    // asymmetry over the largest symmetric window about the location
    const double w = std::min(st.location - s.front().d, s.back().d - st.location);
    const double lhs = grad_integral(curve, st.location - w, st.location);
    const double rhs = grad_integral(curve, st.location, st.location + w);
    const double total = std::abs(lhs + rhs);
    st.asymmetry = total > 0.0 ? std::abs(lhs - rhs) / total : 0.0;
    st.asymmetry = std::min(1.0, st.asymmetry);
    return st;
}

} // namespace casimir
