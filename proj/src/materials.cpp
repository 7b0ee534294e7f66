#include "casimir/materials.hpp"

#include <cmath>
#include <limits>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"

namespace casimir {

DielectricModel DielectricModel::perfect_metal() {
    DielectricModel m;
    m.kind = DielectricKind::PerfectMetal;
    return m;
}

DielectricModel DielectricModel::lorentz_drude(double eps_inf, double eps_static_term,
                                               double omega0, double omega_p, double gamma) {
    DielectricModel m;
    m.kind = DielectricKind::LorentzDrude;
    m.eps_inf = eps_inf;
    m.eps_static_term = eps_static_term;
    m.omega0 = omega0;
    m.omega_p = omega_p;
    m.gamma = gamma;
    m.validate();
    return m;
}

DielectricModel DielectricModel::constant_eps(double eps) {
    DielectricModel m;
    m.kind = DielectricKind::ConstantEps;
    m.eps_const = eps;
    m.validate();
    return m;
}

DielectricModel DielectricModel::paper_silicon() {
    return lorentz_drude(1.035, 11.87 - 1.035, 6.6e15, 2.37e14, 6.45e13);
}

void DielectricModel::validate() const {
    switch (kind) {
    case DielectricKind::PerfectMetal:
        return;
    case DielectricKind::LorentzDrude:
        if (!(omega0 > 0.0) || !(omega_p > 0.0) || !(gamma > 0.0))
            throw input_error("LorentzDrude: omega0, omega_p, gamma must be > 0");
        if (!(eps_inf >= 1.0))
            throw input_error("LorentzDrude: eps_inf must be >= 1");
        if (!(eps_static_term >= 0.0) || !std::isfinite(eps_static_term))
            throw input_error("LorentzDrude: static term must be finite and >= 0");
        return;
    case DielectricKind::ConstantEps:
        if (!(eps_const >= 1.0) || !std::isfinite(eps_const))
            throw input_error("ConstantEps: eps must be finite and >= 1");
        return;
    }
}

double epsilon_iw(const DielectricModel& model, double xi) {
    switch (model.kind) {
    case DielectricKind::PerfectMetal:
        return std::numeric_limits<double>::infinity();
    case DielectricKind::ConstantEps:
        return model.eps_const;
    case DielectricKind::LorentzDrude:
        break;
    }
    if (!(xi > 0.0))
        throw input_error("epsilon_iw: xi must be > 0 for LorentzDrude "
                          "(the xi -> 0 Drude divergence is handled by limit logic)");
    const double lorentz = model.eps_static_term / (1.0 + xi * xi / (model.omega0 * model.omega0));
    const double drude = model.omega_p * model.omega_p / (xi * (xi + model.gamma));
    return model.eps_inf + lorentz + drude;
}

double cm_factor(const DielectricModel& model, double xi) {
    if (model.kind == DielectricKind::PerfectMetal) return 1.0;
    const double eps = epsilon_iw(model, xi);
    return (eps - 1.0) / (eps + 2.0);
}

DrudeParams drude_from_transport(const TransportInputs& in) {
    if (!(in.carrier_density > 0.0) || !std::isfinite(in.carrier_density) ||
        !(in.resistivity > 0.0) || !std::isfinite(in.resistivity) ||
        !(in.effective_mass_ratio > 0.0) || !std::isfinite(in.effective_mass_ratio))
        throw input_error("drude_from_transport: inputs must be finite and > 0");
    const double ne2 = in.carrier_density * constants.e_charge * constants.e_charge;
    const double m_eff = in.effective_mass_ratio * constants.m_e;
    return {std::sqrt(ne2 / (constants.eps0 * m_eff)), ne2 * in.resistivity / m_eff};
}

} // namespace casimir
