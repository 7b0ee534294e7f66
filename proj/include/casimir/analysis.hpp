// Power-law fits, the PFA-deviation ratio rho, and gradient-peak statistics.
#ifndef CASIMIR_ANALYSIS_HPP
#define CASIMIR_ANALYSIS_HPP

#include <vector>

#include "casimir/force_curve.hpp"

namespace casimir {

struct PowerLawFit {
    double exponent = 0.0;
    double sigma_exponent = 0.0;
    double prefactor = 0.0; // y at x = 1
    double sigma_prefactor = 0.0;
    double r_squared = 0.0;
};

struct XY {
    double x;
    double y;
};

// OLS on (ln x, ln y); exponent = slope. All points must be positive.
PowerLawFit power_law_fit(const std::vector<XY>& points);

struct RhoPoint {
    double d = 0.0;
    double rho = 0.0;
    bool unbounded = false; // |F_pfa| below the floor threshold
};

// rho(d) = F_measured(d) / F_pfa(d) on a shared d grid.
std::vector<RhoPoint> ratio_rho(const ForceCurve& measured, const ForceCurve& pfa,
                                double floor_threshold);

struct PeakStats {
    double height = 0.0;    // N/m
    double location = 0.0;  // m
    double fwhm = 0.0;      // m
    double asymmetry = 0.0; // |int left - int right| / total about the location
};

// Statistics of the unique interior global maximum of F_grad: height and
// location by 3-point parabolic interpolation, FWHM by linear crossing
// interpolation, asymmetry over the largest symmetric window around the
// peak. Curves carrying discontinuity records have no finite peak and are
// rejected.
PeakStats peak_stats(const ForceCurve& curve);

} // namespace casimir

#endif
