#include "casimir/force_curve.hpp"

#include "casimir/errors.hpp"

namespace casimir {

void ForceCurve::validate() const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (i > 0 && !(s.d > samples[i - 1].d))
            throw input_error("force curve: d must be strictly increasing");
        if (s.sigma_F < 0.0 || s.sigma_grad < 0.0)
            throw input_error("force curve: sigmas must be >= 0");
    }
}

ForceCurve convert_per_unit(const ForceCurve& curve, PerUnit target, double thickness) {
    if (!(thickness > 0.0)) throw input_error("convert_per_unit: thickness must be > 0");
    if (curve.per_unit == target) return curve;
    const double f = target == PerUnit::Cell ? thickness : 1.0 / thickness;
    ForceCurve out = curve;
    out.per_unit = target;
    for (auto& s : out.samples) {
        s.F *= f;
        s.F_grad *= f;
        s.sigma_F *= f;
        s.sigma_grad *= f;
    }
    for (auto& d : out.discontinuities) d.height *= f;
    return out;
}

} // namespace casimir
