// Proximity-force approximation: plate-plate law lookup, energy per unit
// cell from the gap profiles, force curves by finite differences, and the
// region-III plateau closed form.
#ifndef CASIMIR_PFA_HPP
#define CASIMIR_PFA_HPP

#include "casimir/force_curve.hpp"
#include "casimir/geometry.hpp"
#include "casimir/lifshitz.hpp"

namespace casimir {

// Plate-plate energy per unit area E_pp(gap). PerfectMetal uses the closed
// form; dielectric models are tabulated once on a log-spaced gap grid
// (256 points over [10 nm, 5 um]) with monotone-cubic log-log interpolation
// and power-law extrapolation outside the table.
class PlatePlateLaw {
public:
    PlatePlateLaw(const DielectricModel& model, const QuadratureSpec& quad = {});

    double energy(double gap) const; // J/m^2, negative
    const DielectricModel& model() const { return model_; }
    bool tabulated() const { return !table_x_.empty(); }

    static constexpr int table_points = 256;
    static constexpr double table_min = 10e-9;
    static constexpr double table_max = 5e-6;

private:
    DielectricModel model_;
    bool zero_ = false;           // vacuum-like model, E identically 0
    std::vector<double> table_x_; // ln gap
    std::vector<double> table_y_; // ln(-E)
    std::vector<double> table_m_; // Hermite slopes
};

struct PfaOptions {
    int n_samples = 2048;  // gap-profile resolution
    double delta_d = 1e-9; // finite-difference step for F = -dE/dd
};

// E(d) = t [ sum_x E_pp(gap_y(x)) dx + sum_y E_pp(gap_x(y)) dy ]
double pfa_energy(const Scene& scene, const PlatePlateLaw& law, int n_samples = 2048);
double pfa_energy(const Scene& scene, const DielectricModel& model,
                  const QuadratureSpec& quad = {}, int n_samples = 2048);

// F(d) = -dE/dd by central differences (one-sided at d < delta_d).
ForceCurve pfa_force_curve(const Scene& scene_at_zero, const std::vector<double>& d_grid,
                           const PlatePlateLaw& law, const PfaOptions& opt = {});
ForceCurve pfa_force_curve(const Scene& scene_at_zero, const std::vector<double>& d_grid,
                           const DielectricModel& model, const QuadratureSpec& quad = {},
                           const PfaOptions& opt = {});

// Fills F_grad by differencing F. For curves from an ideal rectangular scene
// the stage-II force step is emitted as a discontinuity record (height =
// plateau force) and the neighbouring samples use one-sided differences that
// do not straddle d = s.
ForceCurve pfa_gradient(ForceCurve curve);

// Region-III plateau: 2 t pi^2 hbar c/(720 g^3) for PerfectMetal, otherwise
// 2 t |E_pp(g)| from the Lifshitz law.
double pfa_plateau_force(const GratingSpec& spec, const DielectricModel& model,
                         const QuadratureSpec& quad = {});

namespace reference {
// Serial plain-loop force sweep, bit-identical to pfa_force_curve.
ForceCurve pfa_force_curve(const Scene& scene_at_zero, const std::vector<double>& d_grid,
                           const PlatePlateLaw& law, const PfaOptions& opt = {});
} // namespace reference

} // namespace casimir

#endif
