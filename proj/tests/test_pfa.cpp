#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "casimir/constants.hpp"
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
} // namespace

TEST_CASE("plateau closed form and scaling") {
    const auto pm = DielectricModel::perfect_metal();
    const double g = paper.lateral_gap();
    const double expected =
        2.0 * paper.thickness * pi * pi * constants.hbar * constants.c / (720.0 * g * g * g);
    const double plateau = pfa_plateau_force(paper, pm);
    CHECK(plateau == doctest::Approx(expected).epsilon(1e-12));
    CHECK(plateau == doctest::Approx(2.87e-12).epsilon(5e-3));

    GratingSpec doubled = paper; // g -> 2g
    doubled.finger_width = 0.5 * paper.period - 2.0 * g;
    CHECK(pfa_plateau_force(doubled, pm) == doctest::Approx(plateau / 8.0).epsilon(1e-12));
}

TEST_CASE("silicon plateau uses the lifshitz plate law") {
    const auto si = DielectricModel::paper_silicon();
    QuadratureSpec quad;
    quad.rel_tol = 1e-6;
    // frozen from an independent evaluation of the double integral
    CHECK(pfa_plateau_force(paper, si, quad) == doctest::Approx(8.113e-13).epsilon(2e-3));
}

TEST_CASE("region III energy decomposes into lateral and small vertical parts") {
    const auto pm = DielectricModel::perfect_metal();
    const PlatePlateLaw law(pm);
    const Scene scene = rect_unit_cell(paper);
    const double d = 1.0e-6;
    const double s = paper.tip_gap, h = paper.finger_length, t = paper.thickness;
    const double w = paper.finger_width, g = paper.lateral_gap();

    const double e = pfa_energy(scene.with_displacement(d), law);
    const double lateral = 2.0 * t * (d - s) * pm_energy_per_area(g);
    const double vertical = t * (2.0 * w * pm_energy_per_area(s + h - d) +
                                 2.0 * g * pm_energy_per_area(s + 2 * h - d));
    CHECK(e == doctest::Approx(lateral + vertical).epsilon(2e-3));
    CHECK(std::abs(vertical) < 0.02 * std::abs(lateral));
}

TEST_CASE("energy at d = 0 is negligible; lateral term exactly absent below s") {
    const PlatePlateLaw law(DielectricModel::perfect_metal());
    const Scene scene = rect_unit_cell(paper);
    CHECK(std::abs(pfa_energy(scene, law)) < 1e-21);

    const double d = 300e-9;
    const double s = paper.tip_gap, h = paper.finger_length, t = paper.thickness;
    const double w = paper.finger_width, g = paper.lateral_gap();
    const double e = pfa_energy(scene.with_displacement(d), law);
    const double vertical_only = t * (2.0 * w * pm_energy_per_area(s + h - d) +
                                      2.0 * g * pm_energy_per_area(s + 2 * h - d));
    CHECK(e == doctest::Approx(vertical_only).epsilon(5e-3));
}

TEST_CASE("force curve: plateau, near-zero stage I, rising stage IV") {
    const auto pm = DielectricModel::perfect_metal();
    const PlatePlateLaw law(pm);
    const Scene scene = rect_unit_cell(paper);
    const auto grid = linspace(0.0, 1.8e-6, 90);
    const ForceCurve curve = pfa_force_curve(scene, grid, law);
    curve.validate();
    REQUIRE(curve.samples.size() == 90);

    const double plateau = pfa_plateau_force(paper, pm);
    double f_mid = 0.0, f_300 = 0.0, f_16 = 0.0, f_17 = 0.0;
    for (const auto& smp : curve.samples) {
        if (std::abs(smp.d - 965e-9) < 11e-9) f_mid = smp.F;
        if (std::abs(smp.d - 300e-9) < 11e-9) f_300 = smp.F;
        if (std::abs(smp.d - 1.6e-6) < 11e-9) f_16 = smp.F;
        if (std::abs(smp.d - 1.7e-6) < 11e-9) f_17 = smp.F;
    }
    CHECK(f_mid == doctest::Approx(plateau).epsilon(5e-3));
    CHECK(std::abs(f_300) < 0.02 * plateau);
    CHECK(f_16 > plateau);
    CHECK(f_17 > f_16);

    REQUIRE(curve.discontinuities.size() == 1);
    CHECK(curve.discontinuities[0].d == doctest::Approx(paper.tip_gap));
    CHECK(curve.discontinuities[0].height == doctest::Approx(plateau).epsilon(1e-9));
}

TEST_CASE("curve force equals the energy finite difference at random d") {
    const auto pm = DielectricModel::perfect_metal();
    const PlatePlateLaw law(pm);
    const Scene scene = rect_unit_cell(paper);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pick(0.55e-6, 1.4e-6);
    std::vector<double> grid;
    for (int i = 0; i < 5; ++i) grid.push_back(pick(rng));
    std::sort(grid.begin(), grid.end());
    const ForceCurve curve = pfa_force_curve(scene, grid, law);
    const PfaOptions opt;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = grid[i];
        const double fd = -(pfa_energy(scene.with_displacement(d + opt.delta_d), law) -
                            pfa_energy(scene.with_displacement(d - opt.delta_d), law)) /
                          (2.0 * opt.delta_d);
        CHECK(curve.samples[i].F == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("profile refinement changes the energy by < 0.1%") {
    const PlatePlateLaw law(DielectricModel::perfect_metal());
    const Scene scene = rect_unit_cell(paper).with_displacement(1.0e-6);
    const double e1 = pfa_energy(scene, law, 1024);
    const double e2 = pfa_energy(scene, law, 2048);
    CHECK(std::abs(e2 - e1) < 1e-3 * std::abs(e2));
}

TEST_CASE("gradient of a constant plateau is zero; stage IV tail is monotone") {
    ForceCurve flat;
    for (int i = 0; i < 7; ++i) flat.samples.push_back({i * 1e-8, 3e-12, 0, 0, 0});
    const ForceCurve g = pfa_gradient(flat);
    for (const auto& s : g.samples) CHECK(s.F_grad == 0.0);

    const PlatePlateLaw law(DielectricModel::perfect_metal());
    const Scene scene = rect_unit_cell(paper);
    const auto grid = linspace(1.5e-6, 1.8e-6, 16);
    const ForceCurve tail = pfa_gradient(pfa_force_curve(scene, grid, law));
    for (const auto& s : tail.samples) CHECK(s.F_grad > 0.0);

    ForceCurve two;
    two.samples.push_back({0.0, 0, 0, 0, 0});
    two.samples.push_back({1e-9, 0, 0, 0, 0});
    CHECK_THROWS_AS(pfa_gradient(two), input_error);
}

TEST_CASE("gradient differences never straddle the recorded jump") {
    const PlatePlateLaw law(DielectricModel::perfect_metal());
    const Scene scene = rect_unit_cell(paper);
    const auto grid = linspace(0.0, 1.8e-6, 90);
    const ForceCurve curve = pfa_gradient(pfa_force_curve(scene, grid, law));
    REQUIRE(curve.discontinuities.size() == 1);
    const double plateau = pfa_plateau_force(paper, DielectricModel::perfect_metal());
    // without the record, samples next to d = s would see a ~1e5 N/m spike
    for (const auto& s : curve.samples)
        if (s.d < 1.45e-6) CHECK(std::abs(s.F_grad) < 0.05 * plateau / 20e-9);
}

TEST_CASE("plateau force from the curve matches the closed form within 0.5%") {
    const auto pm = DielectricModel::perfect_metal();
    const PlatePlateLaw law(pm);
    const Scene scene = rect_unit_cell(paper);
    const auto grid = linspace(0.55e-6, 1.4e-6, 18);
    const ForceCurve curve = pfa_force_curve(scene, grid, law);
    double fmin = curve.samples[0].F;
    for (const auto& s : curve.samples) fmin = std::min(fmin, s.F);
    CHECK(fmin == doctest::Approx(pfa_plateau_force(paper, pm)).epsilon(5e-3));
}

TEST_CASE("plate-law table matches direct quadrature at random gaps") {
    const auto si = DielectricModel::paper_silicon();
    QuadratureSpec build;
    build.rel_tol = 1e-5;
    const PlatePlateLaw law(si, build);
    QuadratureSpec tight;
    tight.rel_tol = 1e-6;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pick(std::log(15e-9), std::log(4e-6));
    for (int i = 0; i < 20; ++i) {
        const double gap = std::exp(pick(rng));
        const double direct = lifshitz_energy_per_area(si, gap, tight);
        CHECK(law.energy(gap) == doctest::Approx(direct).epsilon(1e-4));
    }
}

TEST_CASE("contact inside the grid names the offending displacement") {
    const PlatePlateLaw law(DielectricModel::perfect_metal());
    const Scene scene = rect_unit_cell(paper);
    const auto grid = linspace(1.8e-6, 1.95e-6, 4);
    try {
        pfa_force_curve(scene, grid, law);
        FAIL("expected contact_error");
    } catch (const contact_error& e) {
        CHECK(e.displacement > 1.85e-6);
    }
}

TEST_CASE("digitized boundary offsets bracket the nominal force") {
    const PlatePlateLaw law(DielectricModel::perfect_metal());
    const Scene nominal =
        load_geometry(std::string(CASIMIR_FIXTURES_DIR) + "/unit1.geom").with_displacement(1e-6);
    auto offset_scene = [&](double delta) {
        Scene s = nominal;
        s.fixed = offset_boundary(nominal.fixed, delta);
        s.movable = offset_boundary(nominal.movable, delta);
        return s;
    };
    const double f0 = -(pfa_energy(offset_scene(0.0).with_displacement(1.001e-6), law) -
                        pfa_energy(offset_scene(0.0).with_displacement(0.999e-6), law)) /
                      2e-9;
    const double f_grow = -(pfa_energy(offset_scene(2.5e-9).with_displacement(1.001e-6), law) -
                            pfa_energy(offset_scene(2.5e-9).with_displacement(0.999e-6), law)) /
                          2e-9;
    const double f_shrink = -(pfa_energy(offset_scene(-2.5e-9).with_displacement(1.001e-6), law) -
                              pfa_energy(offset_scene(-2.5e-9).with_displacement(0.999e-6), law)) /
                            2e-9;
    CHECK(f_grow > f0);   // expanded boundaries close the gaps
    CHECK(f_shrink < f0); // shrunk boundaries open them
}

TEST_CASE("per-unit conversion") {
    ForceCurve c;
    c.samples.push_back({1e-7, 2.58e-12, 2.58e-6, 0, 0});
    c.per_unit = PerUnit::Cell;
    const ForceCurve per_len = convert_per_unit(c, PerUnit::Length, 2.58e-6);
    CHECK(per_len.samples[0].F == doctest::Approx(1e-6).epsilon(1e-12));
    const ForceCurve back = convert_per_unit(per_len, PerUnit::Cell, 2.58e-6);
    CHECK(back.samples[0].F == doctest::Approx(c.samples[0].F).epsilon(1e-12));
}
