// Sampled force/force-gradient curves shared by the PFA, PAA and
// calibration pipelines.
#ifndef CASIMIR_FORCE_CURVE_HPP
#define CASIMIR_FORCE_CURVE_HPP

#include <vector>

namespace casimir {

enum class PerUnit { Cell, Length };

struct ForceSample {
    double d = 0.0;          // m
    double F = 0.0;          // N (per unit, see ForceCurve::per_unit)
    double F_grad = 0.0;     // N/m
    double sigma_F = 0.0;    // N
    double sigma_grad = 0.0; // N/m
};

// A jump in F too sharp for the sample grid (the ideal-rectangle PFA force
// step at d = s), reported instead of a divergent gradient sample.
struct Discontinuity {
    double d = 0.0;
    double height = 0.0; // N
};

struct ForceCurve {
    std::vector<ForceSample> samples;
    PerUnit per_unit = PerUnit::Cell;
    int n_cells = 30;
    std::vector<Discontinuity> discontinuities;

    void validate() const; // d strictly increasing, sigmas >= 0
};

// Rescales between per-unit-cell and per-unit-length values using the cell
// thickness (per cell = per length * t).
ForceCurve convert_per_unit(const ForceCurve& curve, PerUnit target, double thickness);

} // namespace casimir

#endif
