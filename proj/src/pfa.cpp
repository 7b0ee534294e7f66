#include "casimir/pfa.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"
#include "casimir/parallel.hpp"

namespace casimir {

PlatePlateLaw::PlatePlateLaw(const DielectricModel& model, const QuadratureSpec& quad)
    : model_(model) {
    model_.validate();
    if (model_.kind == DielectricKind::PerfectMetal) return;

    // vacuum-like models produce no force at all; skip the log-space table
    if (std::abs(reference::lifshitz_energy_per_area(model_, table_min, quad)) == 0.0) {
        zero_ = true;
        return;
    }

    const int n = table_points;
    const double x0 = std::log(table_min);
    const double h = (std::log(table_max) - x0) / (n - 1);
    table_x_.resize(n);
    table_y_.resize(n);
    parallel_for(n, [&](std::size_t i) {
        table_x_[i] = x0 + i * h;
        const double gap = std::exp(table_x_[i]);
        table_y_[i] = std::log(-reference::lifshitz_energy_per_area(model_, gap, quad));
    });
    // centered Hermite slopes, one-sided at the ends
    table_m_.resize(n);
    table_m_[0] = (table_y_[1] - table_y_[0]) / h;
    table_m_[n - 1] = (table_y_[n - 1] - table_y_[n - 2]) / h;
    for (int i = 1; i < n - 1; ++i)
        table_m_[i] = (table_y_[i + 1] - table_y_[i - 1]) / (2.0 * h);
}

double PlatePlateLaw::energy(double gap) const {
    if (!(gap > 0.0)) throw input_error("plate law: gap must be > 0");
    if (model_.kind == DielectricKind::PerfectMetal) return pm_energy_per_area(gap);
    if (zero_) return 0.0;

    const double x = std::log(gap);
    const int n = static_cast<int>(table_x_.size());
    const double h = table_x_[1] - table_x_[0];
    if (x <= table_x_.front())
        return -std::exp(table_y_.front() + table_m_.front() * (x - table_x_.front()));
    if (x >= table_x_.back())
        return -std::exp(table_y_.back() + table_m_.back() * (x - table_x_.back()));
    const int i = std::min(static_cast<int>((x - table_x_.front()) / h), n - 2);
    const double t = (x - table_x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double y = (2 * t3 - 3 * t2 + 1) * table_y_[i] + (t3 - 2 * t2 + t) * h * table_m_[i] +
                     (-2 * t3 + 3 * t2) * table_y_[i + 1] + (t3 - t2) * h * table_m_[i + 1];
    return -std::exp(y);
}

double pfa_energy(const Scene& scene, const PlatePlateLaw& law, int n_samples) {
    const GapProfiles prof = gap_profiles(scene, n_samples);
    double vertical = 0.0;
    for (const auto& s : prof.vertical) vertical += law.energy(s.gap);
    double lateral = 0.0;
    for (const auto& s : prof.lateral) lateral += law.energy(s.gap);
    return scene.thickness * (vertical * prof.dx + lateral * prof.dy);
}

double pfa_energy(const Scene& scene, const DielectricModel& model, const QuadratureSpec& quad,
                  int n_samples) {
    return pfa_energy(scene, PlatePlateLaw(model, quad), n_samples);
}

namespace {

// d-grid sweeps run in parallel; exceptions are captured per slot and the
// one at the smallest displacement is rethrown.
struct SlotError {
    int kind = 0; // 1 input, 2 convergence, 3 contact
    double d = 0.0;
    std::string msg;
};

ForceCurve curve_impl(const Scene& scene_at_zero, const std::vector<double>& d_grid,
                      const PlatePlateLaw& law, const PfaOptions& opt, bool parallel) {
    if (d_grid.empty()) throw input_error("pfa_force_curve: empty d grid");
    for (std::size_t i = 0; i < d_grid.size(); ++i) {
        if (!(d_grid[i] >= 0.0)) throw input_error("pfa_force_curve: d must be >= 0");
        if (i > 0 && !(d_grid[i] > d_grid[i - 1]))
            throw input_error("pfa_force_curve: d grid must be strictly increasing");
    }
    const double dd = opt.delta_d;
    const std::size_t n = d_grid.size();
    std::vector<double> force(n, 0.0);
    std::vector<SlotError> errs(n);

    auto slot = [&](std::size_t i) {
        try {
            const double d = d_grid[i];
            const double lo = d >= dd ? d - dd : d;
            const double hi = d + dd;
            const double e_lo = pfa_energy(scene_at_zero.with_displacement(lo), law, opt.n_samples);
            const double e_hi = pfa_energy(scene_at_zero.with_displacement(hi), law, opt.n_samples);
            force[i] = -(e_hi - e_lo) / (hi - lo);
        } catch (const contact_error& e) {
            errs[i] = {3, e.displacement, e.what()};
        } catch (const convergence_error& e) {
            errs[i] = {2, d_grid[i], e.what()};
        } catch (const std::exception& e) {
            errs[i] = {1, d_grid[i], e.what()};
        }
    };
    if (parallel)
        parallel_for(n, slot);
    else
        for (std::size_t i = 0; i < n; ++i) slot(i);

    for (const auto& e : errs) {
        if (e.kind == 3) throw contact_error(e.msg, e.d);
        if (e.kind == 2) throw convergence_error(e.msg, 0.0, 0.0);
        if (e.kind == 1) throw input_error(e.msg);
    }

    ForceCurve curve;
    curve.per_unit = PerUnit::Cell;
    curve.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) curve.samples[i] = {d_grid[i], force[i], 0.0, 0.0, 0.0};

    // ideal rectangles: the lateral term switches on at d = s; record the
    // step height so gradients never difference across it
    if (scene_at_zero.ideal) {
        const GratingSpec& spec = *scene_at_zero.ideal;
        const double s = spec.tip_gap;
        if (d_grid.front() < s && d_grid.back() > s) {
            const double height =
                2.0 * spec.thickness * std::abs(law.energy(spec.lateral_gap()));
            curve.discontinuities.push_back({s, height});
        }
    }
    return curve;
}

} // namespace

ForceCurve pfa_force_curve(const Scene& scene_at_zero, const std::vector<double>& d_grid,
                           const PlatePlateLaw& law, const PfaOptions& opt) {
    return curve_impl(scene_at_zero, d_grid, law, opt, true);
}

ForceCurve pfa_force_curve(const Scene& scene_at_zero, const std::vector<double>& d_grid,
                           const DielectricModel& model, const QuadratureSpec& quad,
                           const PfaOptions& opt) {
    return curve_impl(scene_at_zero, d_grid, PlatePlateLaw(model, quad), opt, true);
}

ForceCurve pfa_gradient(ForceCurve curve) {
    curve.validate();
    const auto& s = curve.samples;
    const std::size_t n = s.size();
    if (n < 3) throw input_error("pfa_gradient: needs at least 3 samples");

    auto blocked = [&](double lo, double hi) {
        for (const auto& disc : curve.discontinuities)
            if (lo < disc.d && disc.d <= hi) return true;
        return false;
    };
    auto one_sided = [&](std::size_t from, std::size_t to) {
        return (s[to].F - s[from].F) / (s[to].d - s[from].d);
    };

    std::vector<double> grad(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const bool has_left = i > 0 && !blocked(s[i - 1].d, s[i].d);
        const bool has_right = i + 1 < n && !blocked(s[i].d, s[i + 1].d);
        if (has_left && has_right)
            grad[i] = (s[i + 1].F - s[i - 1].F) / (s[i + 1].d - s[i - 1].d);
        else if (has_right)
            grad[i] = one_sided(i, i + 1);
        else if (has_left)
            grad[i] = one_sided(i - 1, i);
        else
            grad[i] = 0.0; // isolated between jumps; the record carries the step
    }
    for (std::size_t i = 0; i < n; ++i) curve.samples[i].F_grad = grad[i];
    return curve;
}

double pfa_plateau_force(const GratingSpec& spec, const DielectricModel& model,
                         const QuadratureSpec& quad) {
    spec.validate();
    const double g = spec.lateral_gap();
    if (model.kind == DielectricKind::PerfectMetal)
        return 2.0 * spec.thickness * pi * pi * constants.hbar * constants.c / (720.0 * g * g * g);
    return 2.0 * spec.thickness * std::abs(lifshitz_energy_per_area(model, g, quad));
}

namespace reference {

ForceCurve pfa_force_curve(const Scene& scene_at_zero, const std::vector<double>& d_grid,
                           const PlatePlateLaw& law, const PfaOptions& opt) {
    return curve_impl(scene_at_zero, d_grid, law, opt, false);
}

} // namespace reference

} // namespace casimir
