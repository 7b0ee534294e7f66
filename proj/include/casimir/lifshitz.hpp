// Zero-temperature parallel-plate Casimir energy per unit area and pressure:
// perfect-metal closed forms and the imaginary-frequency double integral for
// dielectric half-spaces. Attractive values are negative.
#ifndef CASIMIR_LIFSHITZ_HPP
#define CASIMIR_LIFSHITZ_HPP

#include "casimir/materials.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

// -pi^2 hbar c / (720 a^3)
double pm_energy_per_area(double a);

// -pi^2 hbar c / (240 a^4)
double pm_pressure(double a);

// E(a) = hbar/(4 pi^2) int_0^inf dxi int_0^inf k dk
//        sum_p ln(1 - r_p^2 exp(-2 kappa a)),
// kappa = sqrt(k^2 + xi^2/c^2), kappa1 = sqrt(k^2 + eps(i xi) xi^2/c^2),
// r_TM = (eps kappa - kappa1)/(eps kappa + kappa1),
// r_TE = (kappa - kappa1)/(kappa + kappa1); r_p^2 = 1 for PerfectMetal.
// Tensor Gauss-Legendre on rational/log-mapped axes, node count doubled
// until successive estimates agree to quad.rel_tol.
double lifshitz_energy_per_area(const DielectricModel& model, double a,
                                const QuadratureSpec& quad = {});

// -dE/da from the analytically differentiated integrand.
double lifshitz_pressure(const DielectricModel& model, double a,
                         const QuadratureSpec& quad = {});

namespace reference {
// Serial plain-loop implementations, bit-identical to the parallel kernels.
double lifshitz_energy_per_area(const DielectricModel& model, double a,
                                const QuadratureSpec& quad = {});
double lifshitz_pressure(const DielectricModel& model, double a,
                         const QuadratureSpec& quad = {});
} // namespace reference

} // namespace casimir

#endif
