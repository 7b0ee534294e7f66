// Command-line surface for the grating Casimir toolkit. Emits versioned CSV
// curves and summary reports; every command is deterministic for a given
// set of flags, input files and seed, independent of --threads.
//
// Exit codes: 0 success, 2 input error, 3 convergence error, 4 contact error.
#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "casimir/analysis.hpp"
#include "casimir/calibration.hpp"
#include "casimir/csv.hpp"
#include "casimir/errors.hpp"
#include "casimir/geometry.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/paa.hpp"
#include "casimir/parallel.hpp"
#include "casimir/pfa.hpp"

using namespace casimir;

namespace {

struct GeometryOpts {
    std::string geometry_path;
    bool ideal = false;
    std::string preset;
    double period = 2.0e-6;
    double finger_width = 908e-9;
    double finger_length = 1.5e-6;
    double thickness = 2.58e-6;
    double tip_gap = 430e-9;
};

struct SweepOpts {
    double d_min = 0.0;
    double d_max = 1.8e-6;
    int steps = 90;
};

GratingSpec spec_from(const GeometryOpts& g) {
    if (g.preset == "paper") return GratingSpec::paper();
    return {g.period, g.finger_width, g.finger_length, g.thickness, g.tip_gap};
}

Scene scene_from(const GeometryOpts& g) {
    if (!g.geometry_path.empty()) {
        Scene s = load_geometry(g.geometry_path);
        s.thickness = g.thickness;
        return s;
    }
    return rect_unit_cell(spec_from(g));
}

DielectricModel material_from(const std::string& name, const GeometryOpts& g) {
    std::string m = name;
    if (m.empty()) m = g.preset == "paper" ? "silicon" : "pm";
    if (m == "pm") return DielectricModel::perfect_metal();
    if (m == "silicon") return DielectricModel::paper_silicon();
    std::ifstream f(m);
    if (!f) throw input_error("cannot open material file: " + m);
    nlohmann::json j;
    try {
        f >> j;
        return DielectricModel::lorentz_drude(j.at("eps_inf").get<double>(),
                                              j.at("eps_static_term").get<double>(),
                                              j.at("omega0").get<double>(),
                                              j.at("omega_p").get<double>(),
                                              j.at("gamma").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw input_error("malformed material file " + m + ": " + e.what());
    }
}

std::vector<double> d_grid(const SweepOpts& s) {
    if (s.steps < 2) throw input_error("--steps must be >= 2");
    if (!(s.d_min < s.d_max)) throw input_error("--d-min must be below --d-max");
    std::vector<double> grid(s.steps);
    for (int i = 0; i < s.steps; ++i)
        grid[i] = s.d_min + (s.d_max - s.d_min) * i / (s.steps - 1);
    return grid;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw input_error("cannot open output file: " + path);
    f << content;
}

void add_threads_flag(CLI::App* cmd, int& threads) {
    cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
}

void add_geometry_flags(CLI::App* cmd, GeometryOpts& g) {
    cmd->add_option("--geometry", g.geometry_path, "geometry file (see README for the format)");
    cmd->add_flag("--ideal", g.ideal, "ideal rectangular gratings from the spec flags");
    cmd->add_option("--preset", g.preset, "named parameter preset")
        ->check(CLI::IsMember({"paper"}));
    cmd->add_option("--period", g.period, "grating period p [m]");
    cmd->add_option("--finger-width", g.finger_width, "finger width w [m]");
    cmd->add_option("--finger-length", g.finger_length, "finger length h [m]");
    cmd->add_option("--thickness", g.thickness, "device thickness t [m]");
    cmd->add_option("--tip-gap", g.tip_gap, "initial tip separation s [m]");
}

void add_sweep_flags(CLI::App* cmd, SweepOpts& s) {
    cmd->add_option("--d-min", s.d_min, "first displacement [m]");
    cmd->add_option("--d-max", s.d_max, "last displacement [m]");
    cmd->add_option("--steps", s.steps, "number of displacement samples");
}

int run(int argc, char** argv) {
    CLI::App app{"Casimir force toolkit for interpenetrating rectangular gratings"};
    app.set_version_flag("--version", std::string("casimir-gratings v") + kToolVersion);
    app.require_subcommand(1);

    int threads = 0;

    // ---- pfa ----------------------------------------------------------
    auto* pfa_cmd = app.add_subcommand("pfa", "proximity-force-approximation force curve");
    GeometryOpts pfa_geom;
    SweepOpts pfa_sweep;
    std::string pfa_material, pfa_out = "-";
    double pfa_rel_tol = 1e-4;
    int pfa_samples = 2048;
    add_geometry_flags(pfa_cmd, pfa_geom);
    add_sweep_flags(pfa_cmd, pfa_sweep);
    pfa_cmd->add_option("--material", pfa_material, "pm | silicon | <model.json>");
    pfa_cmd->add_option("--rel-tol", pfa_rel_tol, "plate-law quadrature tolerance");
    pfa_cmd->add_option("--profile-samples", pfa_samples, "gap-profile resolution");
    pfa_cmd->add_option("--out", pfa_out, "output CSV path (- for stdout)");

    // ---- paa ----------------------------------------------------------
    auto* paa_cmd = app.add_subcommand("paa", "pairwise-additive-approximation force curve");
    GeometryOpts paa_geom;
    SweepOpts paa_sweep;
    paa_sweep.steps = 40;
    std::string paa_material, paa_out = "-";
    PaaQuadSpec paa_quad;
    std::string paa_mode = "adaptive";
    add_geometry_flags(paa_cmd, paa_geom);
    add_sweep_flags(paa_cmd, paa_sweep);
    paa_cmd->add_option("--material", paa_material, "pm | silicon | <model.json>");
    paa_cmd->add_option("--rel-tol", paa_quad.rel_tol, "spatial integration tolerance");
    paa_cmd->add_option("--surface-refine", paa_quad.surface_refine, "triangle subdivision depth");
    paa_cmd->add_option("--z-nodes", paa_quad.z_nodes, "thickness-convolution nodes");
    paa_cmd->add_option("--xi-nodes", paa_quad.xi_nodes, "frequency-integral nodes");
    paa_cmd->add_option("--paa-mode", paa_mode, "adaptive | fixed")
        ->check(CLI::IsMember({"adaptive", "fixed"}));
    paa_cmd->add_option("--out", paa_out, "output CSV path (- for stdout)");

    // ---- lifshitz -----------------------------------------------------
    auto* lif_cmd = app.add_subcommand("lifshitz", "parallel-plate energy and pressure");
    std::string lif_material = "pm", lif_out = "-";
    double lif_gap = 0.0, lif_rel_tol = 1e-4;
    SweepOpts lif_sweep;
    lif_sweep.d_min = 50e-9;
    lif_sweep.d_max = 1e-6;
    lif_sweep.steps = 20;
    GeometryOpts lif_geom;
    lif_cmd->add_option("--gap", lif_gap, "single separation [m] (otherwise sweeps)");
    lif_cmd->add_option("--d-min", lif_sweep.d_min, "sweep start [m]");
    lif_cmd->add_option("--d-max", lif_sweep.d_max, "sweep end [m]");
    lif_cmd->add_option("--steps", lif_sweep.steps, "sweep samples");
    lif_cmd->add_option("--material", lif_material, "pm | silicon | <model.json>");
    lif_cmd->add_option("--rel-tol", lif_rel_tol, "quadrature tolerance");
    lif_cmd->add_option("--out", lif_out, "output CSV path (- for stdout)");

    // ---- calibrate ----------------------------------------------------
    auto* cal_cmd = app.add_subcommand("calibrate", "recover alpha, k and V0 from measurements");
    GeometryOpts cal_geom;
    cal_geom.preset = "paper";
    std::string cal_data, cal_out = "-";
    add_geometry_flags(cal_cmd, cal_geom);
    cal_cmd->add_option("--data", cal_data, "measurement CSV")->required();
    cal_cmd->add_option("--out", cal_out, "output CSV path (- for stdout)");

    // ---- synth --------------------------------------------------------
    auto* syn_cmd = app.add_subcommand("synth", "synthesize a virtual measurement dataset");
    GeometryOpts syn_geom;
    syn_geom.preset = "paper";
    std::string syn_out = "-";
    double syn_alpha = 8.73e-9, syn_k = -1.05e-6, syn_noise = 0.5;
    double syn_vc_min = 6.0, syn_vc_max = 14.0;
    int syn_vc_steps = 10;
    double syn_ve_min = -0.5, syn_ve_max = 0.5;
    int syn_ve_steps = 21;
    double syn_v0_min = 5e-3, syn_v0_max = 50e-3, syn_fc_amp = 3e-5;
    std::uint64_t syn_seed = 1;
    add_geometry_flags(syn_cmd, syn_geom);
    syn_cmd->add_option("--alpha", syn_alpha, "actuator constant [m/V^2]");
    syn_cmd->add_option("--k", syn_k, "sensor constant [N/m/(rad/s)], negative");
    syn_cmd->add_option("--noise", syn_noise, "frequency-shift noise [rad/s]");
    syn_cmd->add_option("--vcomb-min", syn_vc_min, "lowest comb voltage [V]");
    syn_cmd->add_option("--vcomb-max", syn_vc_max, "highest comb voltage [V]");
    syn_cmd->add_option("--vcomb-steps", syn_vc_steps, "number of comb voltages");
    syn_cmd->add_option("--ve-min", syn_ve_min, "lowest probe voltage [V]");
    syn_cmd->add_option("--ve-max", syn_ve_max, "highest probe voltage [V]");
    syn_cmd->add_option("--ve-steps", syn_ve_steps, "number of probe voltages");
    syn_cmd->add_option("--v0-min", syn_v0_min, "residual-voltage range start [V]");
    syn_cmd->add_option("--v0-max", syn_v0_max, "residual-voltage range end [V]");
    syn_cmd->add_option("--fc-amp", syn_fc_amp, "voltage-independent gradient amplitude [N/m]");
    syn_cmd->add_option("--seed", syn_seed, "noise stream seed");
    syn_cmd->add_option("--out", syn_out, "output CSV path (- for stdout)");

    // ---- sweep-g ------------------------------------------------------
    auto* swg_cmd = app.add_subcommand("sweep-g", "power-law study vs the lateral gap g");
    GeometryOpts swg_geom;
    swg_geom.preset = "paper";
    std::string swg_material, swg_quantity = "plateau", swg_out = "-";
    double swg_g_min = 60e-9, swg_g_max = 600e-9;
    int swg_count = 25;
    add_geometry_flags(swg_cmd, swg_geom);
    swg_cmd->add_option("--material", swg_material, "pm | silicon | <model.json>");
    swg_cmd->add_option("--g-min", swg_g_min, "smallest lateral gap [m]");
    swg_cmd->add_option("--g-max", swg_g_max, "largest lateral gap [m]");
    swg_cmd->add_option("--count", swg_count, "number of gap samples");
    swg_cmd->add_option("--quantity", swg_quantity, "plateau | paa-peak")
        ->check(CLI::IsMember({"plateau", "paa-peak"}));
    swg_cmd->add_option("--out", swg_out, "output CSV path (- for stdout)");

    // ---- fit-powerlaw -------------------------------------------------
    auto* fit_cmd = app.add_subcommand("fit-powerlaw", "log-log power-law fit of a 2-column CSV");
    std::string fit_in, fit_out = "-";
    fit_cmd->add_option("--in", fit_in, "input CSV with x,y columns")->required();
    fit_cmd->add_option("--out", fit_out, "output path (- for stdout)");

    // ---- rho ----------------------------------------------------------
    auto* rho_cmd = app.add_subcommand("rho", "ratio of a measured curve to a PFA curve");
    std::string rho_measured, rho_pfa, rho_out = "-";
    double rho_floor = -1.0;
    rho_cmd->add_option("--measured", rho_measured, "numerator force-curve CSV")->required();
    rho_cmd->add_option("--pfa", rho_pfa, "denominator force-curve CSV")->required();
    rho_cmd->add_option("--floor", rho_floor,
                        "|F_pfa| floor below which rho is unbounded "
                        "(default 1e-3 x the denominator's largest |F|)");
    rho_cmd->add_option("--out", rho_out, "output CSV path (- for stdout)");

    for (CLI::App* cmd : {pfa_cmd, paa_cmd, lif_cmd, cal_cmd, syn_cmd, swg_cmd, fit_cmd, rho_cmd})
        add_threads_flag(cmd, threads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // flag errors are input errors
    }
    set_threads(threads);

    if (pfa_cmd->parsed()) {
        const Scene scene = scene_from(pfa_geom);
        QuadratureSpec quad;
        quad.rel_tol = pfa_rel_tol;
        const PlatePlateLaw law(material_from(pfa_material, pfa_geom), quad);
        PfaOptions opt;
        opt.n_samples = pfa_samples;
        ForceCurve curve = pfa_force_curve(scene, d_grid(pfa_sweep), law, opt);
        if (curve.samples.size() >= 3) curve = pfa_gradient(std::move(curve));
        std::ostringstream out;
        write_force_curve(out, curve, "pfa");
        write_output(pfa_out, out.str());
        return 0;
    }

    if (paa_cmd->parsed()) {
        const Scene scene = scene_from(paa_geom);
        paa_quad.mode =
            paa_mode == "fixed" ? PaaQuadSpec::Mode::Fixed : PaaQuadSpec::Mode::Adaptive;
        const ForceCurve curve = paa_force_curve(scene, d_grid(paa_sweep),
                                                 material_from(paa_material, paa_geom), paa_quad);
        std::ostringstream out;
        write_force_curve(out, curve, "paa");
        write_output(paa_out, out.str());
        return 0;
    }

    if (lif_cmd->parsed()) {
        const DielectricModel model = material_from(lif_material, lif_geom);
        QuadratureSpec quad;
        quad.rel_tol = lif_rel_tol;
        std::vector<double> gaps;
        if (lif_gap > 0.0)
            gaps.push_back(lif_gap);
        else
            gaps = d_grid(lif_sweep);
        std::ostringstream out;
        out << csv_header("lifshitz");
        out << "a_m,E_J_per_m2,P_Pa\n";
        for (double a : gaps)
            out << fmt_g17(a) << "," << fmt_g17(lifshitz_energy_per_area(model, a, quad)) << ","
                << fmt_g17(lifshitz_pressure(model, a, quad)) << "\n";
        write_output(lif_out, out.str());
        return 0;
    }

    if (cal_cmd->parsed()) {
        std::ifstream f(cal_data);
        if (!f) throw input_error("cannot open measurement file: " + cal_data);
        const auto records = read_measurements(f);
        const BetaModel beta(spec_from(cal_geom));
        const auto result = calibrate_alpha_k(records, [&](double d) { return beta.beta(d); });
        std::ostringstream out;
        write_calibration(out, result, "calibrate");
        write_output(cal_out, out.str());
        return 0;
    }

    if (syn_cmd->parsed()) {
        const GratingSpec spec = spec_from(syn_geom);
        const BetaModel beta(spec);
        SensorModel truth = SensorModel::paper();
        truth.alpha_actuator = syn_alpha;
        truth.k_sensor = syn_k;
        truth.validate();
        if (syn_vc_steps < 1 || syn_ve_steps < 1) throw input_error("voltage steps must be >= 1");
        std::vector<double> vcs(syn_vc_steps), ves(syn_ve_steps);
        for (int i = 0; i < syn_vc_steps; ++i)
            vcs[i] = syn_vc_steps == 1 ? syn_vc_min
                                       : syn_vc_min + (syn_vc_max - syn_vc_min) * i /
                                                          (syn_vc_steps - 1);
        for (int i = 0; i < syn_ve_steps; ++i)
            ves[i] = syn_ve_steps == 1 ? syn_ve_min
                                       : syn_ve_min + (syn_ve_max - syn_ve_min) * i /
                                                          (syn_ve_steps - 1);
        const double contact = spec.tip_gap + spec.finger_length;
        const double s = spec.tip_gap;
        const auto v0_profile = [&](double d) {
            return syn_v0_min + (syn_v0_max - syn_v0_min) * d / contact;
        };
        const auto fc = [&](double d) {
            const double x = (d - s) / 80e-9;
            return syn_fc_amp * std::exp(-0.5 * x * x);
        };
        const auto records = synthesize_dataset(
            truth, v0_profile, fc, [&](double d) { return beta.beta(d); }, vcs, ves, syn_noise,
            syn_seed);
        std::ostringstream out;
        write_measurements(out, records, "synth");
        write_output(syn_out, out.str());
        return 0;
    }

    if (swg_cmd->parsed()) {
        const GratingSpec base = spec_from(swg_geom);
        if (!(swg_g_min > 0.0) || !(swg_g_max > swg_g_min) || swg_count < 3)
            throw input_error("sweep-g: need 0 < g-min < g-max and count >= 3");
        std::vector<XY> pts;
        std::ostringstream rows;
        if (swg_quantity == "plateau") {
            const DielectricModel model =
                swg_material.empty() ? DielectricModel::perfect_metal()
                                     : material_from(swg_material, swg_geom);
            for (int i = 0; i < swg_count; ++i) {
                const double g =
                    swg_g_min * std::pow(swg_g_max / swg_g_min, double(i) / (swg_count - 1));
                GratingSpec spec = base;
                spec.finger_width = 0.5 * spec.period - g;
                spec.validate();
                pts.push_back({g, pfa_plateau_force(spec, model)});
                rows << fmt_g17(g) << "," << fmt_g17(pts.back().y) << "\n";
            }
        } else {
            // square-block study: 3 um x 3 um cross-sections, s = 500 nm,
            // perfect metal by default, force-gradient peak height per g
            const DielectricModel model =
                swg_material.empty() ? DielectricModel::perfect_metal()
                                     : material_from(swg_material, swg_geom);
            PaaQuadSpec quad;
            quad.surface_refine = 1;
            quad.xi_nodes = 48;
            quad.z_nodes = 32;
            const double side = 3e-6, s0 = 500e-9, period = 20e-6;
            for (int i = 0; i < swg_count; ++i) {
                const double g =
                    swg_g_min * std::pow(swg_g_max / swg_g_min, double(i) / (swg_count - 1));
                std::vector<Vec2> fixed = {{0.5 * period + 0.5 * g, s0},
                                           {0.5 * period + 0.5 * g + side, s0},
                                           {0.5 * period + 0.5 * g + side, s0 + side},
                                           {0.5 * period + 0.5 * g, s0 + side}};
                std::vector<Vec2> movable = {{0.5 * period - 0.5 * g - side, -side},
                                             {0.5 * period - 0.5 * g, -side},
                                             {0.5 * period - 0.5 * g, 0.0},
                                             {0.5 * period - 0.5 * g - side, 0.0}};
                Scene scene{PolygonUnitCell(fixed, period, CellLabel::Fixed),
                            PolygonUnitCell(movable, period, CellLabel::Movable),
                            0.0, 0.5 * period, base.thickness, std::nullopt};
                std::vector<double> grid;
                for (int j = 0; j < 17; ++j) grid.push_back(s0 - 160e-9 + j * 25e-9);
                const ForceCurve curve = paa_force_curve(scene, grid, model, quad);
                const PeakStats peak = peak_stats(curve);
                pts.push_back({g, peak.height});
                rows << fmt_g17(g) << "," << fmt_g17(peak.height) << "\n";
            }
        }
        const PowerLawFit fit = power_law_fit(pts);
        std::ostringstream out;
        out << csv_header("sweep-g");
        out << "# quantity " << swg_quantity << "\n";
        out << "# exponent " << fmt_g17(fit.exponent) << " sigma " << fmt_g17(fit.sigma_exponent)
            << "\n";
        out << "# prefactor " << fmt_g17(fit.prefactor) << " sigma "
            << fmt_g17(fit.sigma_prefactor) << "\n";
        out << "# r_squared " << fmt_g17(fit.r_squared) << "\n";
        out << (swg_quantity == "plateau" ? "g_m,F_N\n" : "g_m,H_N_per_m\n");
        out << rows.str();
        write_output(swg_out, out.str());
        return 0;
    }

    if (fit_cmd->parsed()) {
        std::ifstream f(fit_in);
        if (!f) throw input_error("cannot open input file: " + fit_in);
        const auto pts = read_xy(f);
        const PowerLawFit fit = power_law_fit(pts);
        std::ostringstream out;
        out << csv_header("fit-powerlaw");
        out << "exponent,sigma_exponent,prefactor,sigma_prefactor,r_squared\n";
        out << fmt_g17(fit.exponent) << "," << fmt_g17(fit.sigma_exponent) << ","
            << fmt_g17(fit.prefactor) << "," << fmt_g17(fit.sigma_prefactor) << ","
            << fmt_g17(fit.r_squared) << "\n";
        write_output(fit_out, out.str());
        return 0;
    }

    if (rho_cmd->parsed()) {
        std::ifstream fm(rho_measured);
        if (!fm) throw input_error("cannot open file: " + rho_measured);
        std::ifstream fp(rho_pfa);
        if (!fp) throw input_error("cannot open file: " + rho_pfa);
        const ForceCurve measured = read_force_curve(fm);
        const ForceCurve pfa = read_force_curve(fp);
        double floor = rho_floor;
        if (floor < 0.0) {
            // default: 1e-3 of the denominator curve's plateau, taken as its
            // largest |F| (flat after interpenetration for these gratings)
            double fmax = 0.0;
            for (const auto& s : pfa.samples) fmax = std::max(fmax, std::abs(s.F));
            floor = 1e-3 * fmax;
        }
        const auto rho = ratio_rho(measured, pfa, floor);
        std::ostringstream out;
        write_rho(out, rho, "rho");
        write_output(rho_out, out.str());
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const contact_error& e) {
        std::cerr << "contact error: " << e.what()
                  << " (d = " << fmt_g17(e.displacement) << " m)\n";
        return 4;
    } catch (const convergence_error& e) {
        std::cerr << "convergence error: " << e.what() << " (last estimates "
                  << fmt_g17(e.last_estimate) << ", " << fmt_g17(e.previous_estimate) << ")\n";
        return 3;
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
