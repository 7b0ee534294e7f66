#include "casimir/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"

namespace casimir {

void SensorModel::validate() const {
    if (!(omega_r > 0.0)) throw input_error("SensorModel: omega_r must be > 0");
    if (!(q_factor > 0.0)) throw input_error("SensorModel: q_factor must be > 0");
    if (!(k_sensor < 0.0)) throw input_error("SensorModel: k_sensor must be < 0");
    if (!(alpha_actuator > 0.0)) throw input_error("SensorModel: alpha_actuator must be > 0");
}

SensorModel SensorModel::paper() {
    return {2.0 * pi * 1.02e6, 91581.5, -1.05e-6, 8.73e-9};
}

// ---------------------------------------------------------------------------
// parabola fit

ParabolaFit fit_parabola(const std::vector<ParabolaPoint>& points) {
    std::set<double> distinct;
    for (const auto& p : points) distinct.insert(p.v_e);
    if (distinct.size() < 3)
        throw input_error("fit_parabola: needs >= 3 distinct V_e values");

    bool all_weighted = true;
    for (const auto& p : points) {
        if (p.sigma < 0.0) throw input_error("fit_parabola: sigma must be >= 0");
        if (p.sigma == 0.0) all_weighted = false;
    }

    // normal equations for (c0, c1, c2) in dw = c0 + c1 V + c2 V^2
    double S[3][3] = {};
    double b[3] = {};
    for (const auto& p : points) {
        const double w = all_weighted ? 1.0 / (p.sigma * p.sigma) : 1.0;
        const double basis[3] = {1.0, p.v_e, p.v_e * p.v_e};
        for (int i = 0; i < 3; ++i) {
            b[i] += w * basis[i] * p.delta_omega;
            for (int j = 0; j < 3; ++j) S[i][j] += w * basis[i] * basis[j];
        }
    }
    // invert the symmetric 3x3 by adjugate
    double inv[3][3];
    const double det = S[0][0] * (S[1][1] * S[2][2] - S[1][2] * S[2][1]) -
                       S[0][1] * (S[1][0] * S[2][2] - S[1][2] * S[2][0]) +
                       S[0][2] * (S[1][0] * S[2][1] - S[1][1] * S[2][0]);
    if (det == 0.0 || !std::isfinite(det))
        throw input_error("fit_parabola: singular normal equations");
    inv[0][0] = (S[1][1] * S[2][2] - S[1][2] * S[2][1]) / det;
    inv[0][1] = (S[0][2] * S[2][1] - S[0][1] * S[2][2]) / det;
    inv[0][2] = (S[0][1] * S[1][2] - S[0][2] * S[1][1]) / det;
    inv[1][0] = inv[0][1];
    inv[1][1] = (S[0][0] * S[2][2] - S[0][2] * S[2][0]) / det;
    inv[1][2] = (S[0][2] * S[1][0] - S[0][0] * S[1][2]) / det;
    inv[2][0] = inv[0][2];
    inv[2][1] = inv[1][2];
    inv[2][2] = (S[0][0] * S[1][1] - S[0][1] * S[1][0]) / det;

    double c[3] = {};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) c[i] += inv[i][j] * b[j];

    // coefficient covariance; for unweighted fits scale by residual variance
    double cov[3][3];
    double scale = 1.0;
    if (!all_weighted) {
        double ssr = 0.0;
        for (const auto& p : points) {
            const double fit = c[0] + c[1] * p.v_e + c[2] * p.v_e * p.v_e;
            ssr += (p.delta_omega - fit) * (p.delta_omega - fit);
        }
        const int dof = static_cast<int>(points.size()) - 3;
        scale = dof > 0 ? ssr / dof : 0.0;
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) cov[i][j] = scale * inv[i][j];

    ParabolaFit fit;
    fit.curvature = c[2];
    fit.sigma_curvature = std::sqrt(std::max(0.0, cov[2][2]));
    // numerically-flat data: curvature at rounding level counts as zero
    double ve2_min = points[0].v_e * points[0].v_e, ve2_max = ve2_min, dw_scale = 0.0;
    for (const auto& p : points) {
        ve2_min = std::min(ve2_min, p.v_e * p.v_e);
        ve2_max = std::max(ve2_max, p.v_e * p.v_e);
        dw_scale = std::max(dw_scale, std::abs(p.delta_omega));
    }
    const double floor =
        ve2_max > ve2_min ? 1e-10 * dw_scale / (ve2_max - ve2_min) : 0.0;
    fit.degenerate = std::abs(fit.curvature) <= fit.sigma_curvature + floor;

    if (c[2] != 0.0) {
        fit.v0 = -c[1] / (2.0 * c[2]);
        fit.offset = c[0] - c[1] * c[1] / (4.0 * c[2]);
        // delta-method propagation through (A, V0, B)
        const double jv0[3] = {0.0, -1.0 / (2.0 * c[2]), c[1] / (2.0 * c[2] * c[2])};
        const double jb[3] = {1.0, -c[1] / (2.0 * c[2]), c[1] * c[1] / (4.0 * c[2] * c[2])};
        double sv0 = 0.0, sb = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                sv0 += jv0[i] * cov[i][j] * jv0[j];
                sb += jb[i] * cov[i][j] * jb[j];
            }
        fit.sigma_v0 = std::sqrt(std::max(0.0, sv0));
        fit.sigma_offset = std::sqrt(std::max(0.0, sb));
    } else {
        fit.degenerate = true;
        fit.v0 = 0.0;
        fit.offset = c[0];
        fit.sigma_v0 = std::numeric_limits<double>::infinity();
        fit.sigma_offset = std::sqrt(std::max(0.0, cov[0][0]));
    }
    return fit;
}

// ---------------------------------------------------------------------------
// electrostatic stand-in

namespace {

// C^3 smoothstep: s(0)=0, s(1)=1, s'..s''' vanish at both ends, so the
// blended capacitance keeps beta = C''/2 continuously differentiable.
double step7(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double x4 = x * x * x * x;
    return x4 * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x);
}

double step7_d1(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double x3 = x * x * x;
    return x3 * (140.0 - 420.0 * x + 420.0 * x * x - 140.0 * x3);
}

double step7_d2(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double x2 = x * x;
    return x2 * (420.0 - 1680.0 * x + 2100.0 * x2 - 840.0 * x2 * x);
}

// antiderivative of step7 with Q(y <= 0) = 0; Q(y >= 1) = y - 1/2
double step7_int(double y) {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return y - 0.5;
    const double y5 = y * y * y * y * y;
    return y5 * (7.0 - 14.0 * y + 10.0 * y * y - 2.5 * y * y * y);
}

} // namespace

BetaModel::BetaModel(const GratingSpec& spec, double turn_on_width, double plate_margin)
    : spec_(spec), w_on_(turn_on_width), margin_(plate_margin) {
    spec_.validate();
    if (!(w_on_ > 0.0) || !(margin_ > 0.0))
        throw input_error("BetaModel: window constants must be > 0");
    contact_ = spec_.tip_gap + spec_.finger_length;
}

void BetaModel::check(double d) const {
    if (!(d >= 0.0)) throw input_error("BetaModel: d must be >= 0");
    if (d >= contact_)
        throw input_error("BetaModel: displacement at or past contact D0");
}

double BetaModel::cap(double d) const {
    check(d);
    const double eps0 = constants.eps0;
    const double t = spec_.thickness, g = spec_.lateral_gap();
    const double s = spec_.tip_gap, h = spec_.finger_length;
    const double side = (2.0 * eps0 * t / g) * w_on_ *
                        step7_int((d - s) / w_on_ + 0.5);
    const double bg = eps0 * (2.0 * g * t) / (s + 2.0 * h - d);
    const double u = (d - (contact_ - 2.0 * margin_)) / margin_;
    const double plate = step7(u) * eps0 * (2.0 * spec_.finger_width * t) / (contact_ - d);
    return side + bg + plate;
}

double BetaModel::cap_prime(double d) const {
    check(d);
    const double eps0 = constants.eps0;
    const double t = spec_.thickness, g = spec_.lateral_gap();
    const double s = spec_.tip_gap, h = spec_.finger_length;
    const double side = (2.0 * eps0 * t / g) * step7((d - s) / w_on_ + 0.5);
    const double a = s + 2.0 * h - d;
    const double bg = eps0 * (2.0 * g * t) / (a * a);
    const double u = (d - (contact_ - 2.0 * margin_)) / margin_;
    const double b = contact_ - d;
    const double kp = eps0 * 2.0 * spec_.finger_width * t;
    const double plate = step7_d1(u) / margin_ * kp / b + step7(u) * kp / (b * b);
    return side + bg + plate;
}

double BetaModel::beta(double d) const {
    check(d);
    const double eps0 = constants.eps0;
    const double t = spec_.thickness, g = spec_.lateral_gap();
    const double s = spec_.tip_gap, h = spec_.finger_length;
    const double side = (eps0 * t / g) * step7_d1((d - s) / w_on_ + 0.5) / w_on_;
    const double a = s + 2.0 * h - d;
    const double bg = eps0 * g * t / (a * a * a);
    const double u = (d - (contact_ - 2.0 * margin_)) / margin_;
    const double b = contact_ - d;
    const double kp = eps0 * 2.0 * spec_.finger_width * t;
    const double plate = 0.5 * (step7_d2(u) / (margin_ * margin_) * kp / b +
                                2.0 * step7_d1(u) / margin_ * kp / (b * b) +
                                step7(u) * 2.0 * kp / (b * b * b));
    return side + bg + plate;
}

double beta_model(const GratingSpec& spec, double d) { return BetaModel(spec).beta(d); }

// ---------------------------------------------------------------------------
// alpha/k extraction

CalibrationResult calibrate_alpha_k(const std::vector<MeasurementRecord>& dataset,
                                    const std::function<double(double)>& beta_ref,
                                    const CalibrateOptions& opt) {
    std::map<double, std::vector<ParabolaPoint>> groups;
    for (const auto& r : dataset)
        groups[r.v_comb].push_back({r.v_e, r.delta_omega, r.sigma_omega});
    if (groups.size() < 5)
        throw input_error("calibrate_alpha_k: needs >= 5 distinct V_comb values");

    struct GroupFit {
        double v_comb;
        ParabolaFit fit;
    };
    std::vector<GroupFit> fits;
    int excluded = 0;
    for (const auto& [v_comb, pts] : groups) {
        ParabolaFit f = fit_parabola(pts);
        if (f.degenerate) {
            ++excluded;
            continue;
        }
        fits.push_back({v_comb, f});
    }
    if (fits.size() < 2)
        throw input_error("calibrate_alpha_k: fewer than 2 non-degenerate parabolas");

    // k enters the residual k A_i - beta(alpha V_i^2) linearly and is
    // profiled out. The raw profiled cost sum beta^2 (1 - r^2) shrinks with
    // the overall beta scale, which hands the minimum to arbitrarily small
    // alpha; the scale-free form 1 - r^2 (r = correlation between the fitted
    // curvatures and beta(alpha V^2)) has its minimum where the shapes
    // match, which is the fit the measurement procedure describes. alpha
    // values pushing any point outside the reference model's domain (e.g.
    // past contact) are infeasible.
    auto cost_and_k = [&](double alpha, double& k_out) {
        double saa = 0.0, sab = 0.0, sbb = 0.0;
        try {
            for (const auto& gf : fits) {
                const double a = gf.fit.curvature;
                const double beta = beta_ref(alpha * gf.v_comb * gf.v_comb);
                saa += a * a;
                sab += a * beta;
                sbb += beta * beta;
            }
        } catch (const std::exception&) {
            k_out = 0.0;
            return std::numeric_limits<double>::infinity();
        }
        k_out = saa > 0.0 ? sab / saa : 0.0;
        if (!(saa > 0.0) || !(sbb > 0.0)) return 1.0;
        return 1.0 - (sab * sab) / (saa * sbb);
    };

    if (!(opt.alpha_min > 0.0) || !(opt.alpha_max > opt.alpha_min) || opt.scan_points < 8)
        throw input_error("calibrate_alpha_k: bad search options");

    double best_alpha = opt.alpha_min, best_cost = std::numeric_limits<double>::infinity();
    const double lmin = std::log(opt.alpha_min), lmax = std::log(opt.alpha_max);
    for (int i = 0; i < opt.scan_points; ++i) {
        const double alpha = std::exp(lmin + (lmax - lmin) * i / (opt.scan_points - 1));
        double k_tmp;
        const double cost = cost_and_k(alpha, k_tmp);
        if (cost < best_cost) {
            best_cost = cost;
            best_alpha = alpha;
        }
    }
    // golden-section refinement on log(alpha)
    {
        const double step = (lmax - lmin) / (opt.scan_points - 1);
        double lo = std::log(best_alpha) - step, hi = std::log(best_alpha) + step;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double k_tmp;
        double f1 = cost_and_k(std::exp(x1), k_tmp), f2 = cost_and_k(std::exp(x2), k_tmp);
        for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = cost_and_k(std::exp(x1), k_tmp);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = cost_and_k(std::exp(x2), k_tmp);
            }
        }
        best_alpha = std::exp(0.5 * (lo + hi));
        best_cost = cost_and_k(best_alpha, k_tmp);
    }

    CalibrationResult res;
    res.alpha = best_alpha;
    cost_and_k(best_alpha, res.k);
    res.degenerate_excluded = excluded;

    // covariance from the Jacobian at the optimum
    {
        const int n = static_cast<int>(fits.size());
        double jtj[2][2] = {};
        double ssr = 0.0;
        for (const auto& gf : fits) {
            const double v2 = gf.v_comb * gf.v_comb;
            const double d = res.alpha * v2;
            const double delta = std::max(1e-12, 1e-6 * d);
            const double dbeta = (beta_ref(d + delta) - beta_ref(d - delta)) / (2.0 * delta);
            const double ja = -dbeta * v2; // d r / d alpha
            const double jk = gf.fit.curvature;
            const double r = res.k * gf.fit.curvature - beta_ref(d);
            ssr += r * r;
            jtj[0][0] += ja * ja;
            jtj[0][1] += ja * jk;
            jtj[1][1] += jk * jk;
        }
        jtj[1][0] = jtj[0][1];
        const double det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
        const double s2 = n > 2 ? ssr / (n - 2) : 0.0;
        if (det > 0.0) {
            res.sigma_alpha = std::sqrt(std::max(0.0, s2 * jtj[1][1] / det));
            res.sigma_k = std::sqrt(std::max(0.0, s2 * jtj[0][0] / det));
            res.cov_alpha_k = -s2 * jtj[0][1] / det;
        }
    }

    for (const auto& gf : fits) {
        const double d = res.alpha * gf.v_comb * gf.v_comb;
        res.v0_table.push_back({d, gf.fit.v0, gf.fit.sigma_v0});
        res.beta_table.push_back({d, beta_ref(d)});
    }
    std::sort(res.v0_table.begin(), res.v0_table.end(),
              [](const V0Entry& a, const V0Entry& b) { return a.d < b.d; });
    std::sort(res.beta_table.begin(), res.beta_table.end(),
              [](const BetaEntry& a, const BetaEntry& b) { return a.d < b.d; });
    return res;
}

// ---------------------------------------------------------------------------
// virtual experiment

std::vector<MeasurementRecord> synthesize_dataset(
    const SensorModel& truth, const std::function<double(double)>& v0_profile,
    const std::function<double(double)>& force_grad_model,
    const std::function<double(double)>& beta_ref, const std::vector<double>& v_combs,
    const std::vector<double>& v_es, double noise, std::uint64_t seed) {
    truth.validate();
    if (v_combs.empty() || v_es.empty())
        throw input_error("synthesize_dataset: empty voltage grid");
    if (!(noise >= 0.0)) throw input_error("synthesize_dataset: noise must be >= 0");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<MeasurementRecord> out;
    out.reserve(v_combs.size() * v_es.size());
    for (double vc : v_combs) {
        const double d = truth.alpha_actuator * vc * vc;
        const double beta = beta_ref(d); // throws past contact
        const double v0 = v0_profile(d);
        const double fc = force_grad_model(d);
        for (double ve : v_es) {
            const double dv = ve - v0;
            double dw = (beta * dv * dv + fc) / truth.k_sensor;
            if (noise > 0.0) dw += noise * gauss(rng);
            out.push_back({vc, ve, dw, noise});
        }
    }
    return out;
}

ForceCurve integrate_gradient(const ForceCurve& curve) {
    curve.validate();
    const auto& s = curve.samples;
    if (s.size() < 2) throw input_error("integrate_gradient: needs >= 2 samples");

    ForceCurve out = curve;
    out.samples[0].F = 0.0;
    out.samples[0].sigma_F = 0.0;
    double var = 0.0;
    for (std::size_t j = 1; j < s.size(); ++j) {
        const double dd = s[j].d - s[j - 1].d;
        double step = 0.5 * (s[j - 1].F_grad + s[j].F_grad) * dd;
        // recorded force jumps are not part of the sampled gradient; add
        // them back when the interval crosses one
        for (const auto& disc : curve.discontinuities)
            if (s[j - 1].d < disc.d && disc.d <= s[j].d) step += disc.height;
        out.samples[j].F = out.samples[j - 1].F + step;
        var += s[j].sigma_grad * s[j].sigma_grad * dd * dd;
        out.samples[j].sigma_F = std::sqrt(var);
    }
    return out;
}

} // namespace casimir
