// Pairwise-additive approximation: the retarded two-atom kernel with the
// Clausius-Mossotti factor, volume integration over prism cross-sections,
// and a brute-force voxel summation oracle.
#ifndef CASIMIR_PAA_HPP
#define CASIMIR_PAA_HPP

#include <vector>

#include "casimir/force_curve.hpp"
#include "casimir/geometry.hpp"
#include "casimir/materials.hpp"

namespace casimir {

struct PaaQuadSpec {
    int surface_refine = 2; // uniform triangle-subdivision depth
    int z_nodes = 48;       // Gauss nodes for the thickness convolution
    int xi_nodes = 64;      // Gauss nodes for the frequency integral
    double rel_tol = 1e-3;  // target accuracy of the spatial integration
    enum class Mode { Adaptive, Fixed } mode = Mode::Adaptive;

    void validate() const;
};

// K(r) = (hbar/pi) (3/4pi)^2 int_0^inf dxi f(xi)^2
//        [3/r^6 + (xi/c) 6/r^5 + (xi/c)^2 5/r^4 + (xi/c)^3 2/r^3
//         + (xi/c)^4 / r^2] exp(-2 xi r / c),      f = (eps-1)/(eps+2).
// Positive; the pair energy density is -K. Rational map scaled by c/(2r).
double pair_kernel(const DielectricModel& model, double r, int xi_nodes = 64);

// Log-log tables of K(r) and of the thickness-convolved column kernel
//   W(rho) = 2 int_0^t (t - z) K(sqrt(rho^2 + z^2)) dz
// for one (model, thickness) pair. Built once per sweep, then read-only.
class PaaContext {
public:
    PaaContext(const DielectricModel& model, double thickness, const PaaQuadSpec& quad = {});

    double kernel(double r) const;
    double column_kernel(double rho) const;
    double thickness() const { return thickness_; }
    bool zero() const { return zero_; } // vacuum model: K identically 0

private:
    double thickness_;
    bool zero_ = false;
    std::vector<double> kx_, ky_, km_; // ln r -> ln K
    std::vector<double> wx_, wy_, wm_; // ln rho -> ln W
};

// U(d) = -int_A d2r int_B d2r' W(|r - r'|) over the fixed cell and the
// movable cell with periodic images within +/-2 periods. Spatial integration
// triangulates both cells and applies a 7-point Gauss rule per triangle
// pair, subdividing near-field pairs until they are admissible.
double paa_energy(const Scene& scene, const PaaContext& ctx, const PaaQuadSpec& quad = {});
double paa_energy(const Scene& scene, const DielectricModel& model,
                  const PaaQuadSpec& quad = {});

// F = -dU/dd by central differences (step delta_d), gradient by a second
// differentiation of the sampled F.
ForceCurve paa_force_curve(const Scene& scene_at_zero, const std::vector<double>& d_grid,
                           const DielectricModel& model, const PaaQuadSpec& quad = {},
                           double delta_d = 1e-9);

// Oracle: rasterizes both cross-sections into n_grid x n_grid cells,
// midpoint-samples z into n_grid slabs on both prisms, and directly sums
// -K(r) over all voxel pairs. Guarded at 1e8 pairs.
double paa_bruteforce_energy(const Scene& scene, const DielectricModel& model, int n_grid,
                             int xi_nodes = 64);

namespace reference {
double paa_energy(const Scene& scene, const PaaContext& ctx, const PaaQuadSpec& quad = {});
} // namespace reference

} // namespace casimir

#endif
