// Physical constants (CODATA 2018), SI units throughout.
#ifndef CASIMIR_CONSTANTS_HPP
#define CASIMIR_CONSTANTS_HPP

namespace casimir {

struct PhysicalConstants {
    double hbar;      // J s
    double c;         // m/s
    double eps0;      // F/m
    double e_charge;  // C
    double m_e;       // kg
};

inline constexpr PhysicalConstants constants{
    1.054571817e-34,
    299792458.0,
    8.8541878128e-12,
    1.602176634e-19,
    9.1093837015e-31,
};

inline constexpr double pi = 3.14159265358979323846;

} // namespace casimir

#endif
