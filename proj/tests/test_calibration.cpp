#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "casimir/calibration.hpp"
#include "casimir/errors.hpp"
#include "casimir/pfa.hpp"

using namespace casimir;

namespace {

const GratingSpec paper = GratingSpec::paper();

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

std::vector<ParabolaPoint> exact_parabola(double a, double v0, double b, double sigma) {
    std::vector<ParabolaPoint> pts;
    for (double v : linspace(-0.5, 0.5, 11))
        pts.push_back({v, a * (v - v0) * (v - v0) + b, sigma});
    return pts;
}

// displacement grid of the virtual experiment: cluster around the
// interpenetration bump and in the stage-IV rise, as in the measured runs
std::vector<double> vcomb_grid(double alpha) {
    std::vector<double> v;
    for (double d : {0.39e-6, 0.41e-6, 0.43e-6, 0.45e-6, 0.47e-6,
                     1.45e-6, 1.52e-6, 1.59e-6, 1.66e-6, 1.73e-6})
        v.push_back(std::sqrt(d / alpha));
    return v;
}

double v0_profile(double d) { return 5e-3 + 45e-3 * d / 1.93e-6; }

double fc_model(double d) {
    const double x = (d - 430e-9) / 80e-9;
    return 3e-5 * std::exp(-0.5 * x * x);
}

} // namespace

TEST_CASE("parabola fit recovers exact quadratic data") {
    const auto fit = fit_parabola(exact_parabola(-2.0, 0.01, 5.0, 0.0));
    CHECK(fit.curvature == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(fit.v0 == doctest::Approx(0.01).epsilon(1e-8));
    CHECK(fit.offset == doctest::Approx(5.0).epsilon(1e-10));
    CHECK_FALSE(fit.degenerate);
}

TEST_CASE("parabola fit needs three distinct abscissae") {
    std::vector<ParabolaPoint> two = {{0.0, 1.0, 0.0}, {1.0, 2.0, 0.0}, {1.0, 2.0, 0.0}};
    CHECK_THROWS_AS(fit_parabola(two), input_error);
}

TEST_CASE("flat data is flagged degenerate") {
    std::vector<ParabolaPoint> flat;
    for (double v : linspace(-0.5, 0.5, 9)) flat.push_back({v, 3.0, 0.0});
    const auto fit = fit_parabola(flat);
    CHECK(fit.degenerate);
}

TEST_CASE("v0 estimator is unbiased within a tenth of its sigma") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double sigma = 0.05;
    double sum_v0 = 0.0, sum_sigma = 0.0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        auto pts = exact_parabola(-2.0, 0.01, 5.0, sigma);
        for (auto& p : pts) p.delta_omega += sigma * gauss(rng);
        const auto fit = fit_parabola(pts);
        sum_v0 += fit.v0;
        sum_sigma += fit.sigma_v0;
    }
    const double bias = std::abs(sum_v0 / trials - 0.01);
    CHECK(bias < sum_sigma / trials / 10.0);
}

TEST_CASE("v0 is invariant under a common frequency offset") {
    auto pts = exact_parabola(-1.7, 0.023, 2.0, 0.0);
    const auto base = fit_parabola(pts);
    for (auto& p : pts) p.delta_omega += 123.456;
    const auto shifted = fit_parabola(pts);
    CHECK(shifted.v0 == doctest::Approx(base.v0).epsilon(1e-10));
    CHECK(shifted.curvature == doctest::Approx(base.curvature).epsilon(1e-10));
    CHECK(shifted.offset == doctest::Approx(base.offset + 123.456).epsilon(1e-10));
}

TEST_CASE("beta model: near-zero mid-range, plate-law divergence, smoothness") {
    const BetaModel model(paper);
    const double d0 = model.contact();
    CHECK(d0 == doctest::Approx(1.93e-6));

    CHECK(std::abs(model.beta(1.0e-6)) < 0.01 * std::abs(model.beta(1.6e-6)));

    // (D0 - d)^-3 growth close to contact
    const double b1 = model.beta(d0 - 1e-9);
    const double b2 = model.beta(d0 - 2e-9);
    CHECK(b1 / b2 == doctest::Approx(8.0).epsilon(0.05));

    CHECK_THROWS_AS(model.beta(d0), input_error);
    CHECK_THROWS_AS(model.beta(-1e-9), input_error);

    // beta = C''/2 against finite differences of C'
    for (double d : {0.2e-6, 0.44e-6, 1.2e-6, 1.55e-6, 1.8e-6}) {
        const double h = 1e-11;
        const double fd = (model.cap_prime(d + h) - model.cap_prime(d - h)) / (2.0 * h);
        CHECK(model.beta(d) == doctest::Approx(0.5 * fd).epsilon(1e-4));
        const double fd_c = (model.cap(d + h) - model.cap(d - h)) / (2.0 * h);
        CHECK(model.cap_prime(d) == doctest::Approx(fd_c).epsilon(1e-4));
    }
}

TEST_CASE("noiseless synthesis and calibration round-trip to 1e-6") {
    const SensorModel truth = SensorModel::paper();
    const BetaModel beta(paper);
    const auto beta_ref = [&](double d) { return beta.beta(d); };
    const auto data = synthesize_dataset(truth, v0_profile, fc_model, beta_ref,
                                         vcomb_grid(truth.alpha_actuator),
                                         linspace(-0.5, 0.5, 21), 0.0, 1);
    const auto res = calibrate_alpha_k(data, beta_ref);
    CHECK(res.alpha == doctest::Approx(truth.alpha_actuator).epsilon(1e-6));
    CHECK(res.k == doctest::Approx(truth.k_sensor).epsilon(1e-6));
    CHECK(res.degenerate_excluded == 0);
    REQUIRE(res.v0_table.size() == 10);
    for (std::size_t i = 1; i < res.v0_table.size(); ++i)
        CHECK(res.v0_table[i].d > res.v0_table[i - 1].d);
    for (const auto& e : res.v0_table)
        CHECK(e.v0 == doctest::Approx(v0_profile(e.d)).epsilon(1e-6));
}

TEST_CASE("calibration holds to 2% under 1% multiplicative noise") {
    const SensorModel truth = SensorModel::paper();
    const BetaModel beta(paper);
    const auto beta_ref = [&](double d) { return beta.beta(d); };
    auto data = synthesize_dataset(truth, v0_profile, fc_model, beta_ref,
                                   vcomb_grid(truth.alpha_actuator),
                                   linspace(-0.5, 0.5, 21), 0.0, 1);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& r : data) r.delta_omega *= 1.0 + 0.01 * gauss(rng);
    const auto res = calibrate_alpha_k(data, beta_ref);
    CHECK(res.alpha == doctest::Approx(truth.alpha_actuator).epsilon(0.02));
    CHECK(res.k == doctest::Approx(truth.k_sensor).epsilon(0.02));
}

TEST_CASE("calibration is invariant under record order") {
    const SensorModel truth = SensorModel::paper();
    const BetaModel beta(paper);
    const auto beta_ref = [&](double d) { return beta.beta(d); };
    auto data = synthesize_dataset(truth, v0_profile, fc_model, beta_ref,
                                   vcomb_grid(truth.alpha_actuator),
                                   linspace(-0.5, 0.5, 21), 0.5, 7);
    const auto a = calibrate_alpha_k(data, beta_ref);
    std::mt19937_64 rng(1);
    std::shuffle(data.begin(), data.end(), rng);
    const auto b = calibrate_alpha_k(data, beta_ref);
    CHECK(a.alpha == doctest::Approx(b.alpha).epsilon(1e-12));
    CHECK(a.k == doctest::Approx(b.k).epsilon(1e-12));
}

TEST_CASE("underdetermined datasets are rejected") {
    const SensorModel truth = SensorModel::paper();
    const BetaModel beta(paper);
    const auto beta_ref = [&](double d) { return beta.beta(d); };
    const auto data = synthesize_dataset(truth, v0_profile, fc_model, beta_ref, {10.0},
                                         linspace(-0.5, 0.5, 21), 0.0, 1);
    CHECK_THROWS_AS(calibrate_alpha_k(data, beta_ref), input_error);
}

TEST_CASE("synthesizer: null experiment, exact parabolas, determinism") {
    const SensorModel truth = SensorModel::paper();
    const BetaModel beta(paper);
    const auto beta_ref = [&](double d) { return beta.beta(d); };

    // V_e pinned at V0 and no voltage-independent force: every shift is zero
    const auto v0_const = [](double) { return 0.02; };
    const auto zero = [](double) { return 0.0; };
    const auto null_data = synthesize_dataset(truth, v0_const, zero, beta_ref, {8.0, 9.0},
                                              {0.02}, 0.0, 3);
    for (const auto& r : null_data) CHECK(r.delta_omega == 0.0);

    // zero noise at fixed d: exactly parabolic in V_e
    const auto data = synthesize_dataset(truth, v0_profile, fc_model, beta_ref, {9.0},
                                         linspace(-0.4, 0.4, 9), 0.0, 3);
    std::vector<ParabolaPoint> pts;
    for (const auto& r : data) pts.push_back({r.v_e, r.delta_omega, 0.0});
    const auto fit = fit_parabola(pts);
    const double d = truth.alpha_actuator * 81.0;
    CHECK(fit.curvature == doctest::Approx(beta.beta(d) / truth.k_sensor).epsilon(1e-9));
    CHECK(fit.v0 == doctest::Approx(v0_profile(d)).epsilon(1e-9));

    // seeded noise stream is reproducible
    const auto n1 = synthesize_dataset(truth, v0_profile, fc_model, beta_ref, {8.0, 9.0},
                                       linspace(-0.4, 0.4, 9), 0.5, 11);
    const auto n2 = synthesize_dataset(truth, v0_profile, fc_model, beta_ref, {8.0, 9.0},
                                       linspace(-0.4, 0.4, 9), 0.5, 11);
    const auto n3 = synthesize_dataset(truth, v0_profile, fc_model, beta_ref, {8.0, 9.0},
                                       linspace(-0.4, 0.4, 9), 0.5, 12);
    REQUIRE(n1.size() == n2.size());
    bool all_equal = true, any_diff = false;
    for (std::size_t i = 0; i < n1.size(); ++i) {
        all_equal = all_equal && n1[i].delta_omega == n2[i].delta_omega;
        any_diff = any_diff || n1[i].delta_omega != n3[i].delta_omega;
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("gradient integration: exact constant, monotone sigma, grid artifact") {
    ForceCurve c;
    const double g = 2.5e-5, sigma = 1e-7;
    for (int i = 0; i <= 20; ++i) c.samples.push_back({i * 1e-8, 0.0, g, 0.0, sigma});
    const ForceCurve f = integrate_gradient(c);
    CHECK(f.samples.back().F == doctest::Approx(g * 20e-8).epsilon(1e-12));
    for (std::size_t i = 1; i < f.samples.size(); ++i)
        CHECK(f.samples[i].sigma_F >= f.samples[i - 1].sigma_F);

    // halving the grid with per-point sigma halved moves sigma_F by < 30%
    ForceCurve fine;
    for (int i = 0; i <= 40; ++i) fine.samples.push_back({i * 0.5e-8, 0.0, g, 0.0, 0.5 * sigma});
    const ForceCurve ff = integrate_gradient(fine);
    CHECK(ff.samples.back().sigma_F ==
          doctest::Approx(f.samples.back().sigma_F).epsilon(0.30));

    ForceCurve one;
    one.samples.push_back({0.0, 0.0, 1.0, 0.0, 0.0});
    CHECK_THROWS_AS(integrate_gradient(one), input_error);
}

TEST_CASE("integrating the pfa gradient reproduces the pfa force away from the jump") {
    const PlatePlateLaw law(DielectricModel::perfect_metal());
    const Scene scene = rect_unit_cell(paper);
    std::vector<double> grid = linspace(0.6e-6, 1.7e-6, 45);
    const ForceCurve curve = pfa_gradient(pfa_force_curve(scene, grid, law));
    ForceCurve reinteg = integrate_gradient(curve);
    // anchor the integration constant at the first sample
    const double offset = curve.samples.front().F - reinteg.samples.front().F;
    for (std::size_t i = 0; i < curve.samples.size(); ++i) {
        const double expect = curve.samples[i].F;
        CHECK(reinteg.samples[i].F + offset == doctest::Approx(expect).epsilon(0.01));
    }
}

TEST_CASE("sensor model validation") {
    SensorModel bad = SensorModel::paper();
    bad.k_sensor = 1.0;
    CHECK_THROWS_AS(bad.validate(), input_error);
    bad = SensorModel::paper();
    bad.alpha_actuator = 0.0;
    CHECK_THROWS_AS(bad.validate(), input_error);
}
