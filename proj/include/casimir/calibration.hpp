// Electrostatic calibration pipeline: parabola fits of frequency shift vs
// probe voltage, actuator/sensor constant extraction against a reference
// electrostatic gradient, gradient-to-force integration, and the virtual
// experiment synthesizer that closes the loop.
#ifndef CASIMIR_CALIBRATION_HPP
#define CASIMIR_CALIBRATION_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "casimir/force_curve.hpp"
#include "casimir/geometry.hpp"

namespace casimir {

struct MeasurementRecord {
    double v_comb;      // V
    double v_e;         // V
    double delta_omega; // rad/s
    double sigma_omega; // rad/s
};

// d = alpha V_comb^2; F' = k * delta_omega (k < 0).
struct SensorModel {
    double omega_r;        // rad/s
    double q_factor;       // dimensionless
    double k_sensor;       // N m^-1 s rad^-1, < 0
    double alpha_actuator; // m/V^2

    void validate() const;
    static SensorModel paper(); // 2 pi 1.02 MHz, Q 91581.5, k -1.05e-6, alpha 8.73 nm/V^2
};

struct ParabolaPoint {
    double v_e;
    double delta_omega;
    double sigma;
};

struct ParabolaFit {
    double curvature = 0.0; // rad s^-1 V^-2
    double v0 = 0.0;        // V
    double offset = 0.0;    // rad/s
    double sigma_curvature = 0.0;
    double sigma_v0 = 0.0;
    double sigma_offset = 0.0;
    bool degenerate = false; // |curvature| <= sigma_curvature
};

// Weighted least squares of dw = A (V_e - V0)^2 + B via the linear basis
// (1, V_e, V_e^2), then completion of the square with covariance
// propagation. Needs >= 3 distinct V_e values.
ParabolaFit fit_parabola(const std::vector<ParabolaPoint>& points);

// Analytic stand-in for the electrostatic gradient coefficient
// beta(d) = C''(d)/2 per unit cell. Capacitance model:
//   sidewall term linear in the smoothed overlap length (zero curvature in
//   region III, a smooth turn-on bump around d = s),
//   a weak far-plate background,
//   and a gated parallel-plate approach term diverging at contact D0 = s+h.
class BetaModel {
public:
    explicit BetaModel(const GratingSpec& spec, double turn_on_width = 100e-9,
                       double plate_margin = 0.43e-6);

    double contact() const { return contact_; } // D0
    double cap(double d) const;        // F per unit cell
    double cap_prime(double d) const;  // F/m
    double beta(double d) const;       // N m^-1 V^-2

private:
    void check(double d) const;
    GratingSpec spec_;
    double w_on_;
    double margin_;
    double contact_;
};

double beta_model(const GratingSpec& spec, double d);

struct V0Entry {
    double d;
    double v0;
    double sigma_v0;
};

struct BetaEntry {
    double d;
    double beta;
};

struct CalibrationResult {
    double alpha = 0.0; // m/V^2
    double sigma_alpha = 0.0;
    double k = 0.0; // N m^-1 s rad^-1
    double sigma_k = 0.0;
    double cov_alpha_k = 0.0;
    std::vector<V0Entry> v0_table;   // d strictly increasing
    std::vector<BetaEntry> beta_table;
    int degenerate_excluded = 0;
};

struct CalibrateOptions {
    double alpha_min = 1e-11; // m/V^2 search bracket
    double alpha_max = 1e-6;
    int scan_points = 400;
};

// Per-V_comb parabola fits give curvatures A_i = beta(alpha V_i^2)/k and
// residual voltages; (alpha, k) minimize sum_i [k A_i - beta_ref(alpha
// V_i^2)]^2. k enters linearly and is profiled out; alpha is found by a
// deterministic log-grid scan plus golden-section refinement.
CalibrationResult calibrate_alpha_k(const std::vector<MeasurementRecord>& dataset,
                                    const std::function<double(double)>& beta_ref,
                                    const CalibrateOptions& opt = {});

// dw = (1/k)[beta_ref(alpha V_comb^2)(V_e - V0(d))^2 + F'_c(alpha V_comb^2)]
//      + Gaussian(0, noise), seeded deterministic noise stream.
std::vector<MeasurementRecord> synthesize_dataset(
    const SensorModel& truth, const std::function<double(double)>& v0_profile,
    const std::function<double(double)>& force_grad_model,
    const std::function<double(double)>& beta_ref, const std::vector<double>& v_combs,
    const std::vector<double>& v_es, double noise, std::uint64_t seed);

// Trapezoidal cumulative integral of F_grad with F(d0) = 0 and the
// independent-error model sigma_F^2(d_j) = sum_{i<=j} sigma_grad_i^2 dd_i^2.
ForceCurve integrate_gradient(const ForceCurve& curve);

} // namespace casimir

#endif
