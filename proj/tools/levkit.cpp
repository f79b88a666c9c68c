// levkit command-line interface: field maps, energy landscapes, equilibrium
// search, stochastic simulation, ringdowns, PSD estimation, FIR tools, PSD
// fitting, and the reproduction pipelines.
//
// Exit codes: 0 success, 1 validation error, 2 numeric failure (instability
// or non-convergence in a context where it is an error).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "levkit/constants.hpp"
#include "levkit/dynamics.hpp"
#include "levkit/fitting.hpp"
#include "levkit/io.hpp"
#include "levkit/levitation.hpp"
#include "levkit/magnetics.hpp"
#include "levkit/materials.hpp"
#include "levkit/parallel.hpp"
#include "levkit/pipelines.hpp"
#include "levkit/signal.hpp"
#include "levkit/spectra.hpp"

using nlohmann::json;
using namespace levkit;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumeric = 2;

struct GlobalOptions {
    std::string format = "json";
    int jobs = default_jobs();
};

void emit(const GlobalOptions& global, const json& doc) {
    if (global.format == "csv") {
        for (const auto& [key, value] : doc.items()) {
            std::cout << key << ',' << (value.is_string() ? value.get<std::string>()
                                                          : value.dump())
                      << '\n';
        }
    } else {
        std::cout << doc.dump(2) << '\n';
    }
}

// "lo:hi" -> pair
std::pair<double, double> parse_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument("expected lo:hi, got '" + text + "'");
    }
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) out.push_back(std::stod(cell));
    if (out.empty()) throw std::invalid_argument("expected a comma-separated list");
    return out;
}

// name=value / name=lo:hi option lists for the fit constraints
void parse_fixed(const std::vector<std::string>& items, fitting::FitConstraints& constraints) {
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("expected name=value, got '" + item + "'");
        }
        constraints.fixed[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }
}

void parse_bounds(const std::vector<std::string>& items, fitting::FitConstraints& constraints) {
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("expected name=lo:hi, got '" + item + "'");
        }
        constraints.bounds[item.substr(0, eq)] = parse_range(item.substr(eq + 1));
    }
}

json effective_config(const CLI::App* sub) {
    json out = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_lnames().empty() ? "" : opt->get_lnames()[0];
        if (name.empty() || name == "help" || name == "config" || name == "dump-config") {
            continue;
        }
        const auto results = opt->results();
        if (opt->get_expected_min() == 0) {  // flag
            out[name] = opt->count() > 0;
        } else if (results.size() == 1) {
            out[name] = results[0];
        } else if (results.size() > 1) {
            out[name] = results;
        } else if (!opt->get_default_str().empty()) {
            out[name] = opt->get_default_str();
        }
    }
    return out;
}

std::string provenance(const CLI::App* sub) { return io::config_hash(effective_config(sub)); }

// ---- subcommand handlers -------------------------------------------------

int cmd_field(const CLI::App* sub, const GlobalOptions& global, double d, double m,
              const std::string& origin, const std::string& spacing, std::size_t nx,
              std::size_t ny, std::size_t nz, const std::string& units,
              const std::string& out_path) {
    magnetics::MagnetArraySpec spec;
    spec.magnet_side = d;
    spec.magnetization = m;

    magnetics::FieldGrid grid;
    const auto o = parse_list(origin);
    const auto s = parse_list(spacing);
    if (o.size() != 3 || s.size() != 3) {
        throw std::invalid_argument("origin and spacing need three components");
    }
    grid.origin = {o[0], o[1], o[2]};
    grid.spacing = {s[0], s[1], s[2]};
    grid.nx = nx;
    grid.ny = ny;
    grid.nz = nz;

    const auto unit_mode = units == "dimensionless" ? magnetics::FieldUnits::dimensionless
                                                    : magnetics::FieldUnits::si;
    const auto samples = magnetics::field_map(spec, grid, unit_mode, {}, global.jobs);
    io::write_field_map_csv(out_path, samples, provenance(sub));

    std::size_t singular = 0;
    for (const auto& sample : samples) singular += sample.singular ? 1 : 0;
    emit(global, {{"samples", samples.size()}, {"singular", singular}, {"file", out_path}});
    return 0;
}

int cmd_landscape(const CLI::App* sub, const GlobalOptions& global, const std::string& material,
                  double length_nd, const std::string& z_range, const std::string& phi_range,
                  std::size_t z_steps, std::size_t phi_steps, int quad_order, double d, double m,
                  const std::string& out_path) {
    magnetics::MagnetArraySpec array;
    array.magnet_side = d;
    array.magnetization = m;
    const auto preset = levitation::find_material(material);
    const auto scales = levitation::NondimensionalScales::from(preset.plate, array);

    levitation::EnergyOptions opt;
    opt.quad_order = quad_order;
    const auto [z_lo, z_hi] = parse_range(z_range);
    const auto [phi_lo, phi_hi] = parse_range(phi_range);
    auto land = levitation::landscape(scales, length_nd, z_lo, z_hi, z_steps, phi_lo, phi_hi,
                                      phi_steps, opt, global.jobs);
    land.material = material;
    io::write_landscape_csv(out_path, land, provenance(sub));
    emit(global, {{"material", material},
                  {"L_tilde", length_nd},
                  {"cells", land.values.size()},
                  {"file", out_path}});
    return 0;
}

int cmd_equilibrium(const CLI::App* sub, const GlobalOptions& global,
                    const std::string& material, double length_nd, const std::string& z_range,
                    int quad_order, double d, double m, const std::string& out_path) {
    magnetics::MagnetArraySpec array;
    array.magnet_side = d;
    array.magnetization = m;
    const auto preset = levitation::find_material(material);
    const auto scales = levitation::NondimensionalScales::from(preset.plate, array);

    levitation::SearchBox box;
    std::tie(box.height_lo, box.height_hi) = parse_range(z_range);
    levitation::EquilibriumOptions opt;
    opt.energy.quad_order = quad_order;
    const auto eq = levitation::equilibrium(scales, length_nd, box, opt);

    const json doc = {{"material", material},   {"L_tilde", length_nd},
                      {"z_tilde", eq.height_nd}, {"phi", eq.rotation},
                      {"U_tilde", eq.energy_nd}, {"config_hash", provenance(sub)}};
    if (!out_path.empty()) io::write_json(out_path, doc);
    emit(global, doc);
    return 0;
}

struct SimCli {
    double f0 = 18.9;
    double mass = 50e-6;
    double temperature = 300.0;
    double gamma = -1.0;
    double gamma_nd = -1.0;
    double gain_v = 0.0;
    double gain_v_nd = -1.0;
    double gain_x_nd = 0.0;
    double tau = -1.0;
    double tau_nd = -1.0;
    double duration_periods = 2000.0;
    double dt_periods = 0.01;
    std::uint64_t seed = 1;
    double x0 = 0.0;
    double v0 = 0.0;
    std::string out_path;
};

int cmd_simulate(const CLI::App* sub, const GlobalOptions& global, const SimCli& cli) {
    dynamics::OscillatorParams osc;
    osc.f0 = cli.f0;
    osc.mass = cli.mass;
    osc.temperature = cli.temperature;
    osc.gamma = cli.gamma_nd >= 0.0 ? cli.gamma_nd * cli.f0 : std::max(cli.gamma, 0.0);

    dynamics::FeedbackParams fb;
    fb.gain_v = cli.gain_v_nd >= 0.0 ? cli.gain_v_nd * cli.f0 : cli.gain_v;
    fb.gain_x = cli.gain_x_nd * cli.f0;
    fb.delay = cli.tau_nd >= 0.0 ? cli.tau_nd / cli.f0 : std::max(cli.tau, 0.0);

    const double dt = cli.dt_periods / cli.f0;
    const double duration = cli.duration_periods / cli.f0;
    const auto outcome = dynamics::simulate(osc, fb, dt, duration, cli.seed, cli.x0, cli.v0);

    const bool blew = outcome.status == dynamics::SimStatus::blew_up;
    if (!cli.out_path.empty()) {
        io::write_trajectory_csv(cli.out_path, outcome.trajectory, provenance(sub),
                                 {{"f0_hz", osc.f0},
                                  {"gamma_hz", osc.gamma},
                                  {"mass_kg", osc.mass},
                                  {"temperature_k", osc.temperature},
                                  {"gain_v_hz", fb.gain_v},
                                  {"gain_x_hz", fb.gain_x},
                                  {"tau_s", fb.delay},
                                  {"status", blew ? "blew_up" : "completed"}});
    }
    emit(global, {{"status", blew ? "blew_up" : "completed"},
                  {"samples", outcome.trajectory.x.size()},
                  {"max_abs_x_tilde", outcome.max_abs_x_nd},
                  {"blow_time_s", outcome.blow_time},
                  {"file", cli.out_path}});
    return blew ? kExitNumeric : 0;
}

int cmd_ringdown(const CLI::App* sub, const GlobalOptions& global, double f0, double kappa,
                 double mass, double x0, double duration, double dt_periods,
                 const std::string& out_path, bool fit) {
    dynamics::OscillatorParams osc;
    osc.f0 = f0;
    osc.gamma = 2.0 * kappa;  // EOM damping from the amplitude decay constant
    osc.mass = mass;
    osc.temperature = 0.0;
    const auto traj = dynamics::ringdown(osc, x0, duration, dt_periods / f0);
    if (!out_path.empty()) {
        io::write_trajectory_csv(out_path, traj, provenance(sub),
                                 {{"f0_hz", f0}, {"kappa_hz", kappa}, {"x0_m", x0}});
    }
    json doc = {{"samples", traj.x.size()}, {"file", out_path}};
    if (fit) {
        const auto res = dynamics::fit_ringdown(traj);
        doc["kappa_hz"] = res.decay_rate;
        doc["f0_hz"] = res.frequency;
        doc["q_factor"] = res.q_factor;
        doc["amplitude_m"] = res.amplitude;
        doc["undamped"] = res.undamped;
    }
    emit(global, doc);
    return 0;
}

int cmd_psd(const CLI::App* sub, const GlobalOptions& global, const std::string& in_path,
            std::size_t nperseg, double overlap, const std::string& window, int decimate_factor,
            const std::string& out_path) {
    auto traj = io::read_trajectory_csv(in_path);
    if (decimate_factor > 1) traj = signal::decimate(traj, decimate_factor);
    const auto spectrum = signal::welch_psd(traj, nperseg, overlap, window);
    io::write_spectrum_csv(out_path, spectrum, provenance(sub));
    emit(global, {{"bins", spectrum.frequency.size()},
                  {"resolution_hz", spectrum.frequency[1] - spectrum.frequency[0]},
                  {"file", out_path}});
    return 0;
}

int cmd_filter_design(const CLI::App* sub, const GlobalOptions& global, int n, double fs,
                      const std::string& band, double report_delay_at,
                      const std::string& out_path) {
    const auto [f_lo, f_hi] = parse_range(band);
    const auto filter = signal::design_bandpass(n, fs, f_lo, f_hi);
    if (!out_path.empty()) io::write_filter(out_path, filter, provenance(sub));

    double dc = 0.0;
    for (double c : filter.coefficients) dc += c;
    json doc = {{"length", filter.length()},
                {"fs_hz", fs},
                {"band_low_hz", f_lo},
                {"band_high_hz", f_hi},
                {"dc_gain", dc},
                {"file", out_path}};
    if (report_delay_at > 0.0) {
        doc["delay_periods"] = signal::group_delay_periods(filter, report_delay_at);
        doc["delay_at_hz"] = report_delay_at;
    }
    emit(global, doc);
    return 0;
}

int cmd_filter_apply(const CLI::App* sub, const GlobalOptions& global,
                     const std::string& filter_path, const std::string& in_path,
                     double extra_delay, double gain, double dc_shift,
                     const std::string& out_path) {
    const auto filter = io::read_filter(filter_path);
    const auto traj = io::read_trajectory_csv(in_path);
    const auto out = signal::apply_filter(filter, traj, extra_delay, gain, dc_shift);
    io::write_trajectory_csv(out_path, out, provenance(sub),
                             {{"filter", filter_path}, {"extra_delay_samples", extra_delay}});
    emit(global,
         {{"samples", out.x.size()}, {"warmup_samples", out.warmup}, {"file", out_path}});
    return 0;
}

json fit_result_json(const fitting::FitResult& res) {
    json doc = {{"scale", res.scale},
                {"scale_err", res.scale_err},
                {"gamma_hz", res.gamma},
                {"gamma_err", res.gamma_err},
                {"f0_hz", res.f0},
                {"f0_err", res.f0_err},
                {"area", res.area},
                {"area_err", res.area_err},
                {"residual_norm", res.residual_norm},
                {"iterations", res.iterations}};
    if (res.has_feedback) {
        doc["tau_s"] = res.tau;
        doc["tau_err"] = res.tau_err;
        doc["tau_periods"] = res.tau_periods();
        doc["gamma_v_hz"] = res.gain_v;
        doc["gamma_v_err"] = res.gain_v_err;
    }
    return doc;
}

int cmd_fit(const CLI::App* sub, const GlobalOptions& global, const std::string& in_path,
            const std::string& band, const std::string& model,
            const std::vector<std::string>& fixed, const std::vector<std::string>& bounds,
            const std::vector<std::string>& inits, const std::string& out_path) {
    const auto spectrum = io::read_spectrum_csv(in_path);
    const auto [f_lo, f_hi] = parse_range(band);

    fitting::FitConstraints constraints;
    parse_fixed(fixed, constraints);
    parse_bounds(bounds, constraints);
    constraints.validate();

    fitting::InitialGuess init;
    for (const auto& item : inits) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("expected name=value, got '" + item + "'");
        }
        const std::string name = item.substr(0, eq);
        const double value = std::stod(item.substr(eq + 1));
        if (name == "scale") init.scale = value;
        else if (name == "gamma") init.gamma = value;
        else if (name == "f0") init.f0 = value;
        else if (name == "tau") init.tau = value;
        else if (name == "gain_v") init.gain_v = value;
        else throw std::invalid_argument("unknown init parameter: " + name);
    }

    fitting::FitResult res;
    if (model == "thermal") {
        res = fitting::fit_thermal(spectrum, f_lo, f_hi, init, constraints);
    } else {
        res = fitting::fit_delayed(spectrum, f_lo, f_hi, constraints, init);
    }

    if (!out_path.empty()) {
        io::write_text(out_path, "# config_hash=" + provenance(sub) + "\n" +
                                     fitting::fit_report_csv({res}));
    }
    emit(global, fit_result_json(res));
    return 0;
}

int cmd_temperature(const GlobalOptions& global, double area_fb, double area_ref, double t_ref,
                    const std::string& band) {
    const auto [f_lo, f_hi] = parse_range(band);
    const auto rep = spectra::temperature_report(area_fb, area_ref, t_ref, f_lo, f_hi);
    emit(global, {{"t_eff_k", rep.t_eff},
                  {"t_ratio_log10", rep.t_ratio},
                  {"area", rep.area},
                  {"area_ref", rep.area_ref},
                  {"f_min_hz", rep.f_min},
                  {"f_max_hz", rep.f_max}});
    return 0;
}

int cmd_sweep_delay(const GlobalOptions& global, pipelines::DelaySweepConfig config) {
    config.jobs = global.jobs;
    const auto result = pipelines::run_delay_sweep(config);
    std::size_t unstable = 0;
    for (const auto& marker : result.markers) unstable += marker.blew_up ? 1 : 0;
    emit(global, {{"grid_points", result.tau_grid.size()},
                  {"markers", result.markers.size()},
                  {"unstable_markers", unstable},
                  {"out_dir", config.out_dir}});
    return 0;
}

int cmd_cool_study(const GlobalOptions& global, pipelines::CoolingStudyConfig config) {
    config.jobs = global.jobs;
    const auto result = pipelines::run_cooling_study(config);
    json rows = json::array();
    for (const auto& row : result.rows) {
        rows.push_back({{"gain_v_hz", row.scenario.gain_v_hz},
                        {"tau_periods", row.scenario.tau_periods},
                        {"status", row.blew_up ? "blew_up" : "completed"},
                        {"t_eff_k", row.blew_up ? json() : json(row.t_eff)}});
    }
    emit(global, {{"reference_gamma_hz", result.reference.gamma},
                  {"reference_area", result.reference_area},
                  {"rows", rows},
                  {"out_dir", config.out_dir}});
    return 0;
}

int cmd_orientation_study(const GlobalOptions& global,
                          pipelines::OrientationStudyConfig config) {
    config.jobs = global.jobs;
    const auto rows = pipelines::run_orientation_study(config);
    json out = json::array();
    for (const auto& row : rows) {
        out.push_back({{"material", row.material},
                       {"L_tilde", row.length_nd},
                       {"z_tilde", row.height_nd},
                       {"phi", row.rotation}});
    }
    emit(global, {{"rows", out}, {"out_dir", config.out_dir}});
    return 0;
}

// ---- config-override plumbing ---------------------------------------------

std::vector<std::string> inject_config(const std::vector<std::string>& args, CLI::App& app) {
    // locate "--config <path>" anywhere after the subcommand name
    std::string config_path;
    std::string subcommand;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (subcommand.empty() && !args[i].empty() && args[i][0] != '-') {
            subcommand = args[i];
        }
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path.empty() || subcommand.empty()) return args;

    const json overrides = io::read_json(config_path);
    if (!overrides.is_object()) {
        throw std::invalid_argument("config file must hold a JSON object");
    }
    CLI::App* sub = app.get_subcommand_no_throw(subcommand);
    if (sub == nullptr) return args;

    std::vector<std::string> tokens;
    for (const auto& [key, value] : overrides.items()) {
        if (sub->get_option_no_throw("--" + key) == nullptr) {
            throw std::invalid_argument("config key '" + key + "' is not an option of '" +
                                        subcommand + "'");
        }
        if (value.is_boolean()) {
            if (value.get<bool>()) tokens.push_back("--" + key);
        } else if (value.is_string()) {
            tokens.push_back("--" + key + "=" + value.get<std::string>());
        } else {
            tokens.push_back("--" + key + "=" + value.dump());
        }
    }

    // config tokens go right after the subcommand so explicit flags win
    std::vector<std::string> merged;
    for (const auto& arg : args) {
        merged.push_back(arg);
        if (arg == subcommand) {
            merged.insert(merged.end(), tokens.begin(), tokens.end());
        }
    }
    return merged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation and analysis toolkit for diamagnetically levitated plate resonators"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--format", global.format, "stdout format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    app.add_option("--jobs", global.jobs, "worker threads for grid evaluations")
        ->capture_default_str();

    // every subcommand accepts --config (JSON overrides, validated against
    // the option schema) and --dump-config (print the effective values)
    auto add_common = [&](CLI::App* sub) {
        sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        sub->add_option("--config", "JSON file with option overrides");
        sub->add_flag("--dump-config", "print the effective configuration and exit");
    };

    // field
    auto* field = app.add_subcommand("field", "checkerboard field map to CSV");
    add_common(field);
    double field_d = 12.7e-3, field_m = 1.1e6;
    std::string field_origin = "0,0,0.00635", field_spacing = "0.001,0.001,0";
    std::size_t field_nx = 16, field_ny = 16, field_nz = 1;
    std::string field_units = "si", field_out = "field_map.csv";
    field->add_option("--d", field_d, "magnet side length [m]")->capture_default_str();
    field->add_option("--magnetization", field_m, "magnetization [A/m]")->capture_default_str();
    field->add_option("--origin", field_origin, "grid origin x,y,z [m]")->capture_default_str();
    field->add_option("--spacing", field_spacing, "grid spacing dx,dy,dz [m]")
        ->capture_default_str();
    field->add_option("--nx", field_nx)->capture_default_str();
    field->add_option("--ny", field_ny)->capture_default_str();
    field->add_option("--nz", field_nz)->capture_default_str();
    field->add_option("--units", field_units, "si or dimensionless")
        ->check(CLI::IsMember({"si", "dimensionless"}))
        ->capture_default_str();
    field->add_option("-o,--output", field_out)->capture_default_str();

    // landscape
    auto* landscape = app.add_subcommand("landscape", "dimensionless energy landscape to CSV");
    add_common(landscape);
    std::string land_material = "hopg_supp", land_z = "0.01:0.6", land_phi = "-0.3927:1.9635";
    double land_length = 0.75, land_d = 12.7e-3, land_m = 1.1e6;
    std::size_t land_z_steps = 45, land_phi_steps = 41;
    int land_quad = 32;
    std::string land_out = "landscape.csv";
    landscape->add_option("--material", land_material)->capture_default_str();
    landscape->add_option("--L-tilde", land_length, "plate side / magnet side")
        ->capture_default_str();
    landscape->add_option("--z-range", land_z, "z_tilde range lo:hi")->capture_default_str();
    landscape->add_option("--phi-range", land_phi, "rotation range lo:hi [rad]")
        ->capture_default_str();
    landscape->add_option("--z-steps", land_z_steps)->capture_default_str();
    landscape->add_option("--phi-steps", land_phi_steps)->capture_default_str();
    landscape->add_option("--quad-order", land_quad)->capture_default_str();
    landscape->add_option("--d", land_d, "magnet side length [m]")->capture_default_str();
    landscape->add_option("--magnetization", land_m)->capture_default_str();
    landscape->add_option("-o,--output", land_out)->capture_default_str();

    // equilibrium
    auto* equilibrium = app.add_subcommand("equilibrium", "minimum of the energy landscape");
    add_common(equilibrium);
    std::string eq_material = "hopg_supp", eq_z = "0.01:0.6", eq_out;
    double eq_length = 0.75, eq_d = 12.7e-3, eq_m = 1.1e6;
    int eq_quad = 32;
    equilibrium->add_option("--material", eq_material)->capture_default_str();
    equilibrium->add_option("--L-tilde", eq_length)->capture_default_str();
    equilibrium->add_option("--z-range", eq_z)->capture_default_str();
    equilibrium->add_option("--quad-order", eq_quad)->capture_default_str();
    equilibrium->add_option("--d", eq_d)->capture_default_str();
    equilibrium->add_option("--magnetization", eq_m)->capture_default_str();
    equilibrium->add_option("-o,--output", eq_out, "also write the JSON result here");

    // simulate
    auto* simulate = app.add_subcommand("simulate",
                                        "thermally driven oscillator with delayed feedback");
    add_common(simulate);
    SimCli sim;
    simulate->add_option("--f0", sim.f0, "natural frequency [Hz]")->capture_default_str();
    simulate->add_option("--mass", sim.mass, "[kg]")->capture_default_str();
    simulate->add_option("--temperature", sim.temperature, "[K]")->capture_default_str();
    simulate->add_option("--gamma", sim.gamma, "EOM damping [Hz]");
    simulate->add_option("--gamma-tilde", sim.gamma_nd, "gamma / f0");
    simulate->add_option("--gammav", sim.gain_v, "velocity feedback gain [Hz]");
    simulate->add_option("--gammav-tilde", sim.gain_v_nd, "gain_v / f0");
    simulate->add_option("--gammax-tilde", sim.gain_x_nd, "gain_x / f0");
    simulate->add_option("--tau", sim.tau, "feedback delay [s]");
    simulate->add_option("--tau-tilde", sim.tau_nd, "delay in oscillation periods");
    simulate->add_option("--periods", sim.duration_periods, "duration in periods")
        ->capture_default_str();
    simulate->add_option("--dt-periods", sim.dt_periods, "step in periods")
        ->capture_default_str();
    simulate->add_option("--seed", sim.seed)->capture_default_str();
    simulate->add_option("--x0", sim.x0, "[m]")->capture_default_str();
    simulate->add_option("--v0", sim.v0, "[m/s]")->capture_default_str();
    simulate->add_option("-o,--output", sim.out_path, "trajectory CSV (t,x,v)");

    // ringdown
    auto* ringdown = app.add_subcommand("ringdown", "deterministic free decay");
    add_common(ringdown);
    double rd_f0 = 18.961, rd_kappa = 3.7e-4, rd_mass = 50e-6, rd_x0 = 1e-6, rd_duration = 120.0,
           rd_dt = 0.01;
    std::string rd_out;
    bool rd_fit = false;
    ringdown->add_option("--f0", rd_f0, "[Hz]")->capture_default_str();
    ringdown->add_option("--kappa", rd_kappa, "amplitude decay constant [Hz]")
        ->capture_default_str();
    ringdown->add_option("--mass", rd_mass)->capture_default_str();
    ringdown->add_option("--x0", rd_x0, "[m]")->capture_default_str();
    ringdown->add_option("--duration", rd_duration, "[s]")->capture_default_str();
    ringdown->add_option("--dt-periods", rd_dt)->capture_default_str();
    ringdown->add_option("-o,--output", rd_out, "trajectory CSV");
    ringdown->add_flag("--fit", rd_fit, "fit the envelope and report Q");

    // psd
    auto* psd = app.add_subcommand("psd", "Welch PSD of a trajectory CSV");
    add_common(psd);
    std::string psd_in, psd_out = "spectrum.csv", psd_window = "hann";
    std::size_t psd_nperseg = 16384;
    double psd_overlap = 0.5;
    int psd_decimate = 1;
    psd->add_option("-i,--input", psd_in, "trajectory CSV")->required();
    psd->add_option("--nperseg", psd_nperseg)->capture_default_str();
    psd->add_option("--overlap", psd_overlap)->capture_default_str();
    psd->add_option("--window", psd_window)->capture_default_str();
    psd->add_option("--decimate", psd_decimate, "decimation factor before Welch")
        ->capture_default_str();
    psd->add_option("-o,--output", psd_out)->capture_default_str();

    // filter-design
    auto* filter_design = app.add_subcommand("filter-design", "windowed-sinc FIR bandpass");
    add_common(filter_design);
    int fd_n = 1001;
    double fd_fs = 1250.0, fd_delay_at = 0.0;
    std::string fd_band = "18:23", fd_out;
    filter_design->add_option("--n", fd_n, "odd tap count")->capture_default_str();
    filter_design->add_option("--fs", fd_fs, "[Hz]")->capture_default_str();
    filter_design->add_option("--band", fd_band, "passband lo:hi [Hz]")->capture_default_str();
    filter_design->add_option("--report-delay-at", fd_delay_at,
                              "report the group delay in periods of this frequency [Hz]");
    filter_design->add_option("-o,--output", fd_out, "coefficient CSV (+ .json metadata)");

    // filter-apply
    auto* filter_apply = app.add_subcommand("filter-apply", "convolve a trajectory with a filter");
    add_common(filter_apply);
    std::string fa_filter, fa_in, fa_out = "filtered.csv";
    double fa_delay = 0.0, fa_gain = 1.0, fa_shift = 0.0;
    filter_apply->add_option("--filter", fa_filter, "coefficient CSV from filter-design")
        ->required();
    filter_apply->add_option("-i,--input", fa_in, "trajectory CSV")->required();
    filter_apply->add_option("--extra-delay-samples", fa_delay)->capture_default_str();
    filter_apply->add_option("--gain", fa_gain)->capture_default_str();
    filter_apply->add_option("--dc-shift", fa_shift)->capture_default_str();
    filter_apply->add_option("-o,--output", fa_out)->capture_default_str();

    // fit
    auto* fit = app.add_subcommand("fit", "nonlinear least squares on a PSD");
    add_common(fit);
    std::string fit_in, fit_band = "13.9:23.9", fit_model = "thermal", fit_out;
    std::vector<std::string> fit_fixed, fit_bounds, fit_init;
    fit->add_option("-i,--input", fit_in, "spectrum CSV")->required();
    fit->add_option("--band", fit_band, "fit band lo:hi [Hz]")->capture_default_str();
    fit->add_option("--model", fit_model)->check(CLI::IsMember({"thermal", "delayed"}))
        ->capture_default_str();
    fit->add_option("--fix", fit_fixed, "name=value, repeatable")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    fit->add_option("--bound", fit_bounds, "name=lo:hi, repeatable")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    fit->add_option("--init", fit_init, "name=value, repeatable")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    fit->add_option("-o,--output", fit_out, "single-row report CSV");

    // temperature
    auto* temperature = app.add_subcommand("temperature", "area-ratio effective temperature");
    add_common(temperature);
    double t_area_fb = 0.0, t_area_ref = 0.0, t_ref = 300.0;
    std::string t_band = "13.9:23.9";
    temperature->add_option("--area-fb", t_area_fb, "area under the feedback-on PSD [m^2]")
        ->required();
    temperature->add_option("--area-ref", t_area_ref, "area under the reference PSD [m^2]")
        ->required();
    temperature->add_option("--t-ref", t_ref, "reference bath temperature [K]")
        ->capture_default_str();
    temperature->add_option("--band", t_band, "integration band lo:hi [Hz]")
        ->capture_default_str();

    // sweep-delay
    auto* sweep = app.add_subcommand("sweep-delay", "analytic T_ratio curve + sim markers");
    add_common(sweep);
    pipelines::DelaySweepConfig sweep_config;
    std::string sweep_markers = "0,0.8,1,1.2,2,2.2,3,0.5,1.5";
    sweep->add_option("--gamma-tilde", sweep_config.gamma_nd)->capture_default_str();
    sweep->add_option("--gammav-tilde", sweep_config.gain_v_nd)->capture_default_str();
    sweep->add_option("--tau-lo", sweep_config.tau_lo)->capture_default_str();
    sweep->add_option("--tau-hi", sweep_config.tau_hi)->capture_default_str();
    sweep->add_option("--tau-step", sweep_config.tau_step)->capture_default_str();
    sweep->add_option("--markers", sweep_markers, "tau values for simulation markers")
        ->capture_default_str();
    sweep->add_option("--periods", sweep_config.duration_periods)->capture_default_str();
    sweep->add_option("--seed", sweep_config.seed)->capture_default_str();
    sweep->add_option("--out-dir", sweep_config.out_dir)->capture_default_str();

    // cool-study
    auto* cool = app.add_subcommand("cool-study", "simulate, fit, and report temperatures");
    add_common(cool);
    pipelines::CoolingStudyConfig cool_config;
    bool cool_high_q = false;
    std::string cool_gains = "0.75", cool_taus = "8,10,12,7.9,8.1";
    cool->add_option("--f0", cool_config.f0)->capture_default_str();
    cool->add_option("--mass", cool_config.mass)->capture_default_str();
    cool->add_option("--temperature", cool_config.temperature)->capture_default_str();
    cool->add_option("--gamma-tilde", cool_config.gamma_nd)->capture_default_str();
    cool->add_flag("--high-q", cool_high_q,
                   "paper-scale damping (gamma_tilde 3.7e-5); long runtimes");
    cool->add_option("--gains", cool_gains, "feedback gains [Hz], comma list")
        ->capture_default_str();
    cool->add_option("--taus", cool_taus, "delays in periods, comma list")
        ->capture_default_str();
    cool->add_option("--periods", cool_config.duration_periods)->capture_default_str();
    cool->add_option("--nperseg", cool_config.nperseg)->capture_default_str();
    cool->add_option("--decimate", cool_config.decimate_factor)->capture_default_str();
    cool->add_option("--seed", cool_config.seed)->capture_default_str();
    cool->add_option("--out-dir", cool_config.out_dir)->capture_default_str();

    // orientation-study
    auto* orient = app.add_subcommand("orientation-study",
                                      "landscapes and equilibria for the material presets");
    add_common(orient);
    pipelines::OrientationStudyConfig orient_config;
    std::string orient_materials = "hopg_supp,composite,composite_equal_density";
    std::string orient_lengths = "0.5,0.75,1.0";
    orient->add_option("--materials", orient_materials)->capture_default_str();
    orient->add_option("--lengths", orient_lengths, "L_tilde values")->capture_default_str();
    orient->add_option("--quad-order", orient_config.quad_order)->capture_default_str();
    orient->add_option("--z-steps", orient_config.height_steps)->capture_default_str();
    orient->add_option("--phi-steps", orient_config.rotation_steps)->capture_default_str();
    orient->add_option("--out-dir", orient_config.out_dir)->capture_default_str();

    // ---- parse with config injection, dispatch with the exit-code contract
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = inject_config(args, app);
        std::vector<std::string> full;
        full.emplace_back(argv[0]);
        full.insert(full.end(), args.begin(), args.end());
        std::vector<char*> ptrs;
        ptrs.reserve(full.size());
        for (auto& arg : full) ptrs.push_back(arg.data());
        app.parse(static_cast<int>(ptrs.size()), ptrs.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }

    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--dump-config") > 0) {
        std::cout << effective_config(sub).dump(2) << '\n';
        return 0;
    }

    try {
        if (sub == field) {
            return cmd_field(field, global, field_d, field_m, field_origin, field_spacing,
                             field_nx, field_ny, field_nz, field_units, field_out);
        }
        if (sub == landscape) {
            return cmd_landscape(landscape, global, land_material, land_length, land_z, land_phi,
                                 land_z_steps, land_phi_steps, land_quad, land_d, land_m,
                                 land_out);
        }
        if (sub == equilibrium) {
            return cmd_equilibrium(equilibrium, global, eq_material, eq_length, eq_z, eq_quad,
                                   eq_d, eq_m, eq_out);
        }
        if (sub == simulate) return cmd_simulate(simulate, global, sim);
        if (sub == ringdown) {
            return cmd_ringdown(ringdown, global, rd_f0, rd_kappa, rd_mass, rd_x0, rd_duration,
                                rd_dt, rd_out, rd_fit);
        }
        if (sub == psd) {
            return cmd_psd(psd, global, psd_in, psd_nperseg, psd_overlap, psd_window,
                           psd_decimate, psd_out);
        }
        if (sub == filter_design) {
            return cmd_filter_design(filter_design, global, fd_n, fd_fs, fd_band, fd_delay_at,
                                     fd_out);
        }
        if (sub == filter_apply) {
            return cmd_filter_apply(filter_apply, global, fa_filter, fa_in, fa_delay, fa_gain,
                                    fa_shift, fa_out);
        }
        if (sub == fit) {
            return cmd_fit(fit, global, fit_in, fit_band, fit_model, fit_fixed, fit_bounds,
                           fit_init, fit_out);
        }
        if (sub == temperature) {
            return cmd_temperature(global, t_area_fb, t_area_ref, t_ref, t_band);
        }
        if (sub == sweep) {
            sweep_config.marker_taus = parse_list(sweep_markers);
            return cmd_sweep_delay(global, sweep_config);
        }
        if (sub == cool) {
            cool_config.high_q = cool_high_q;
            cool_config.scenarios.clear();
            for (double gain : parse_list(cool_gains)) {
                for (double tau : parse_list(cool_taus)) {
                    cool_config.scenarios.push_back({gain, tau});
                }
            }
            return cmd_cool_study(global, cool_config);
        }
        if (sub == orient) {
            orient_config.materials.clear();
            std::istringstream in(orient_materials);
            std::string name;
            while (std::getline(in, name, ',')) orient_config.materials.push_back(name);
            orient_config.lengths_nd = parse_list(orient_lengths);
            return cmd_orientation_study(global, orient_config);
        }
    } catch (const magnetics::EdgeSingularity& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const levitation::QuadratureDivergence& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const levitation::NoMinimumInBox& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const fitting::NoConvergence& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const spectra::NoPeak& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitValidation;
}
