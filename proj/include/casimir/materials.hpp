// Dielectric response at imaginary frequency and transport-derived Drude
// parameters for doped silicon.
#ifndef CASIMIR_MATERIALS_HPP
#define CASIMIR_MATERIALS_HPP

namespace casimir {

enum class DielectricKind { PerfectMetal, LorentzDrude, ConstantEps };

// eps(i xi) = eps_inf + eps_static_term / (1 + xi^2/omega0^2)
//           + omega_p^2 / (xi (xi + gamma))
//
// PerfectMetal is the eps -> inf limit (reflectivity 1, CM factor 1).
// ConstantEps is a frequency-independent test/reference material.
struct DielectricModel {
    DielectricKind kind = DielectricKind::PerfectMetal;
    double eps_inf = 1.0;
    double eps_static_term = 0.0;
    double omega0 = 0.0;  // rad/s
    double omega_p = 0.0; // rad/s
    double gamma = 0.0;   // rad/s
    double eps_const = 1.0;

    static DielectricModel perfect_metal();
    static DielectricModel lorentz_drude(double eps_inf, double eps_static_term,
                                         double omega0, double omega_p, double gamma);
    static DielectricModel constant_eps(double eps);
    // Doped-silicon Lorentz-Drude parameters used throughout:
    // eps_inf 1.035, static term 11.87 - 1.035, omega0 6.6e15,
    // omega_p 2.37e14, gamma 6.45e13 (all rad/s).
    static DielectricModel paper_silicon();

    void validate() const;
};

// eps(i xi). PerfectMetal returns +inf, consumed only by cm_factor and the
// Lifshitz reflection coefficients. xi <= 0 is a domain error for
// LorentzDrude: the xi -> 0 Drude divergence is handled by the integrands'
// limit logic, never by direct evaluation.
double epsilon_iw(const DielectricModel& model, double xi);

// Clausius-Mossotti factor (eps - 1)/(eps + 2) in (0, 1]; exactly 1 for
// PerfectMetal, 0 for vacuum.
double cm_factor(const DielectricModel& model, double xi);

struct TransportInputs {
    double carrier_density;       // m^-3
    double resistivity;           // Ohm m
    double effective_mass_ratio;  // m*/m_e
};

struct DrudeParams {
    double omega_p; // rad/s
    double gamma;   // rad/s
};

// omega_p = sqrt(n e^2 / (eps0 m*)),  gamma = n e^2 rho / m*
DrudeParams drude_from_transport(const TransportInputs& in);

} // namespace casimir

#endif
