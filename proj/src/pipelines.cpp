#include "levkit/pipelines.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "levkit/constants.hpp"
#include "levkit/io.hpp"
#include "levkit/materials.hpp"

namespace levkit::pipelines {

using constants::pi;
using constants::two_pi;

namespace {

double distance_to_class(double phi, double offset) {
    // distance to {offset + n*pi/2}
    const double period = 0.5 * pi;
    const double d = std::fmod(std::abs(phi - offset), period);
    return std::min(d, period - d);
}

std::filesystem::path ensure_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    std::filesystem::create_directories(p);
    return p;
}

// provenance hash over the scientific inputs only: where the files land and
// how many threads ran must not change their contents
std::string content_hash(nlohmann::json config) {
    config.erase("out_dir");
    config.erase("jobs");
    return io::config_hash(config);
}

}  // namespace

nlohmann::json OrientationStudyConfig::to_json() const {
    return {{"materials", materials},
            {"lengths_nd", lengths_nd},
            {"height_lo", height_lo},
            {"height_hi", height_hi},
            {"height_steps", height_steps},
            {"rotation_steps", rotation_steps},
            {"quad_order", quad_order},
            {"magnet_side", magnet_side},
            {"magnetization", magnetization},
            {"out_dir", out_dir},
            {"jobs", jobs}};
}

OrientationStudyConfig OrientationStudyConfig::from_json(const nlohmann::json& j) {
    OrientationStudyConfig c;
    c.materials = j.value("materials", c.materials);
    c.lengths_nd = j.value("lengths_nd", c.lengths_nd);
    c.height_lo = j.value("height_lo", c.height_lo);
    c.height_hi = j.value("height_hi", c.height_hi);
    c.height_steps = j.value("height_steps", c.height_steps);
    c.rotation_steps = j.value("rotation_steps", c.rotation_steps);
    c.quad_order = j.value("quad_order", c.quad_order);
    c.magnet_side = j.value("magnet_side", c.magnet_side);
    c.magnetization = j.value("magnetization", c.magnetization);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.jobs = j.value("jobs", c.jobs);
    return c;
}

std::vector<OrientationRow> run_orientation_study(const OrientationStudyConfig& config) {
    const auto out_dir = ensure_dir(config.out_dir);
    const std::string hash = content_hash(config.to_json());

    magnetics::MagnetArraySpec array;
    array.magnet_side = config.magnet_side;
    array.magnetization = config.magnetization;

    levitation::EnergyOptions energy;
    energy.quad_order = config.quad_order;

    std::vector<OrientationRow> rows;
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& name : config.materials) {
        const auto material = levitation::find_material(name);
        const auto scales = levitation::NondimensionalScales::from(material.plate, array);
        for (double length : config.lengths_nd) {
            const auto land = levitation::landscape(
                scales, length, config.height_lo, config.height_hi, config.height_steps,
                -pi / 8.0, pi / 2.0 + pi / 8.0, config.rotation_steps, energy, config.jobs);
            levitation::EnergyLandscape named = land;
            named.material = name;

            std::ostringstream fname;
            fname << "landscape_" << name << "_L" << length << ".csv";
            io::write_landscape_csv((out_dir / fname.str()).string(), named, hash);

            levitation::SearchBox box;
            box.height_lo = config.height_lo;
            box.height_hi = config.height_hi;
            levitation::EquilibriumOptions eq_opt;
            eq_opt.energy = energy;
            const auto eq = levitation::equilibrium(scales, length, box, eq_opt);

            OrientationRow row;
            row.material = name;
            row.length_nd = length;
            row.height_nd = eq.height_nd;
            row.rotation = eq.rotation;
            row.energy_nd = eq.energy_nd;
            row.dist_to_aligned = distance_to_class(eq.rotation, 0.0);
            row.dist_to_diagonal = distance_to_class(eq.rotation, 0.25 * pi);
            rows.push_back(row);

            summary.push_back({{"material", name},
                               {"L_tilde", length},
                               {"z_tilde", eq.height_nd},
                               {"phi", eq.rotation},
                               {"U_tilde", eq.energy_nd},
                               {"dist_to_aligned", row.dist_to_aligned},
                               {"dist_to_diagonal", row.dist_to_diagonal}});
        }
    }
    io::write_json((out_dir / "equilibrium_summary.json").string(),
                   {{"config_hash", hash}, {"rows", summary}});
    return rows;
}

nlohmann::json CoolingStudyConfig::to_json() const {
    nlohmann::json sc = nlohmann::json::array();
    for (const auto& s : scenarios) {
        sc.push_back({{"gain_v_hz", s.gain_v_hz}, {"tau_periods", s.tau_periods}});
    }
    return {{"f0", f0},
            {"mass", mass},
            {"temperature", temperature},
            {"gamma_nd", gamma_nd},
            {"high_q", high_q},
            {"scenarios", sc},
            {"duration_periods", duration_periods},
            {"dt_periods", dt_periods},
            {"seed", seed},
            {"band_half_width_hz", band_half_width_hz},
            {"decimate_factor", decimate_factor},
            {"nperseg", nperseg},
            {"out_dir", out_dir},
            {"jobs", jobs}};
}

CoolingStudyConfig CoolingStudyConfig::from_json(const nlohmann::json& j) {
    CoolingStudyConfig c;
    c.f0 = j.value("f0", c.f0);
    c.mass = j.value("mass", c.mass);
    c.temperature = j.value("temperature", c.temperature);
    c.gamma_nd = j.value("gamma_nd", c.gamma_nd);
    c.high_q = j.value("high_q", c.high_q);
    if (j.contains("scenarios")) {
        c.scenarios.clear();
        for (const auto& s : j["scenarios"]) {
            c.scenarios.push_back({s.at("gain_v_hz").get<double>(),
                                   s.at("tau_periods").get<double>()});
        }
    }
    c.duration_periods = j.value("duration_periods", c.duration_periods);
    c.dt_periods = j.value("dt_periods", c.dt_periods);
    c.seed = j.value("seed", c.seed);
    c.band_half_width_hz = j.value("band_half_width_hz", c.band_half_width_hz);
    c.decimate_factor = j.value("decimate_factor", c.decimate_factor);
    c.nperseg = j.value("nperseg", c.nperseg);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.jobs = j.value("jobs", c.jobs);
    return c;
}

CoolingStudyResult run_cooling_study(const CoolingStudyConfig& config) {
    const auto out_dir = ensure_dir(config.out_dir);
    const std::string hash = content_hash(config.to_json());

    dynamics::OscillatorParams osc;
    osc.f0 = config.f0;
    osc.gamma = config.gamma_nd_effective() * config.f0;
    osc.mass = config.mass;
    osc.temperature = config.temperature;

    const double dt = config.dt_periods / config.f0;
    const double duration = config.duration_periods / config.f0;
    const double f_lo = config.f0 - config.band_half_width_hz;
    const double f_hi = config.f0 + config.band_half_width_hz;

    auto spectrum_of = [&](const dynamics::SimOutcome& outcome) {
        dynamics::Trajectory stationary = outcome.trajectory;
        const std::size_t burn = outcome.suggested_burn_in;
        stationary.x.erase(stationary.x.begin(),
                           stationary.x.begin() + static_cast<std::ptrdiff_t>(burn));
        if (stationary.has_velocity()) {
            stationary.v.erase(stationary.v.begin(),
                               stationary.v.begin() + static_cast<std::ptrdiff_t>(burn));
        }
        return signal::welch_psd(signal::decimate(stationary, config.decimate_factor),
                                 config.nperseg);
    };

    CoolingStudyResult result;

    // Feedback-off reference: fixes gamma for all feedback-on fits and sets
    // the reference area for the temperature ratio.
    const auto ref_outcome =
        dynamics::simulate(osc, dynamics::FeedbackParams{}, dt, duration, config.seed);
    if (ref_outcome.status != dynamics::SimStatus::completed) {
        throw std::runtime_error("cooling study: reference run blew up");
    }
    const auto ref_spectrum = spectrum_of(ref_outcome);
    io::write_spectrum_csv((out_dir / "psd_reference.csv").string(), ref_spectrum, hash);
    result.reference = fitting::fit_thermal(ref_spectrum, f_lo, f_hi);
    result.reference_area = result.reference.area;

    std::vector<fitting::FitResult> table{result.reference};
    nlohmann::json temps = nlohmann::json::array();
    std::uint64_t seed = config.seed;
    for (const auto& scenario : config.scenarios) {
        ++seed;
        dynamics::FeedbackParams fb;
        fb.gain_v = scenario.gain_v_hz;
        fb.delay = scenario.tau_periods / config.f0;

        CoolingRow row;
        row.scenario = scenario;
        const auto outcome = dynamics::simulate(osc, fb, dt, duration, seed);
        if (outcome.status != dynamics::SimStatus::completed) {
            row.blew_up = true;
            temps.push_back({{"gain_v_hz", scenario.gain_v_hz},
                             {"tau_periods", scenario.tau_periods},
                             {"status", "blew_up"}});
            result.rows.push_back(row);
            continue;
        }
        const auto spectrum = spectrum_of(outcome);
        std::ostringstream fname;
        fname << "psd_gv" << scenario.gain_v_hz << "_tau" << scenario.tau_periods << ".csv";
        io::write_spectrum_csv((out_dir / fname.str()).string(), spectrum, hash);

        fitting::FitConstraints constraints;
        constraints.fixed["gamma"] = result.reference.gamma;
        fitting::InitialGuess init;
        init.tau = fb.delay;
        init.gain_v = fb.gain_v;
        init.f0 = config.f0;
        row.fit = fitting::fit_delayed(spectrum, f_lo, f_hi, constraints, init);
        row.area = row.fit.area;
        row.t_eff =
            spectra::effective_temperature(row.area, result.reference_area, config.temperature);
        table.push_back(row.fit);
        temps.push_back({{"gain_v_hz", scenario.gain_v_hz},
                         {"tau_periods", scenario.tau_periods},
                         {"status", "completed"},
                         {"area", row.area},
                         {"t_eff_k", row.t_eff}});
        result.rows.push_back(row);
    }

    io::write_text((out_dir / "fit_table.csv").string(),
                   "# config_hash=" + hash + "\n" + fitting::fit_report_csv(table));
    io::write_json((out_dir / "temperature_report.json").string(),
                   {{"config_hash", hash},
                    {"reference_area", result.reference_area},
                    {"bath_temperature_k", config.temperature},
                    {"rows", temps}});
    return result;
}

nlohmann::json DelaySweepConfig::to_json() const {
    return {{"gamma_nd", gamma_nd},
            {"gain_v_nd", gain_v_nd},
            {"tau_lo", tau_lo},
            {"tau_hi", tau_hi},
            {"tau_step", tau_step},
            {"marker_taus", marker_taus},
            {"f0", f0},
            {"mass", mass},
            {"temperature", temperature},
            {"duration_periods", duration_periods},
            {"dt_periods", dt_periods},
            {"seed", seed},
            {"band_half_width_hz", band_half_width_hz},
            {"nperseg", nperseg},
            {"out_dir", out_dir},
            {"jobs", jobs}};
}

DelaySweepConfig DelaySweepConfig::from_json(const nlohmann::json& j) {
    DelaySweepConfig c;
    c.gamma_nd = j.value("gamma_nd", c.gamma_nd);
    c.gain_v_nd = j.value("gain_v_nd", c.gain_v_nd);
    c.tau_lo = j.value("tau_lo", c.tau_lo);
    c.tau_hi = j.value("tau_hi", c.tau_hi);
    c.tau_step = j.value("tau_step", c.tau_step);
    c.marker_taus = j.value("marker_taus", c.marker_taus);
    c.f0 = j.value("f0", c.f0);
    c.mass = j.value("mass", c.mass);
    c.temperature = j.value("temperature", c.temperature);
    c.duration_periods = j.value("duration_periods", c.duration_periods);
    c.dt_periods = j.value("dt_periods", c.dt_periods);
    c.seed = j.value("seed", c.seed);
    c.band_half_width_hz = j.value("band_half_width_hz", c.band_half_width_hz);
    c.nperseg = j.value("nperseg", c.nperseg);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.jobs = j.value("jobs", c.jobs);
    return c;
}

DelaySweepResult run_delay_sweep(const DelaySweepConfig& config) {
    const auto out_dir = ensure_dir(config.out_dir);
    const std::string hash = content_hash(config.to_json());

    const spectra::Band band{two_pi * (1.0 - config.band_half_width_hz / config.f0),
                             two_pi * (1.0 + config.band_half_width_hz / config.f0)};

    DelaySweepResult result;
    for (double tau = config.tau_lo; tau <= config.tau_hi + 1e-12; tau += config.tau_step) {
        result.tau_grid.push_back(tau);
        result.t_ratio_analytic.push_back(
            spectra::t_ratio(config.gamma_nd, config.gain_v_nd, tau, band));
        result.within_validity.push_back(spectra::delay_within_validity(tau));
    }
    {
        std::ostringstream csv;
        csv.precision(17);
        csv << "# config_hash=" << hash << "\n";
        csv << "tau_tilde,t_ratio\n";
        for (std::size_t i = 0; i < result.tau_grid.size(); ++i) {
            csv << result.tau_grid[i] << ',' << result.t_ratio_analytic[i] << '\n';
        }
        io::write_text((out_dir / "t_ratio_analytic.csv").string(), csv.str());
    }

    // Simulation markers: band power relative to the zero-delay run.
    dynamics::OscillatorParams osc;
    osc.f0 = config.f0;
    osc.gamma = config.gamma_nd * config.f0;
    osc.mass = config.mass;
    osc.temperature = config.temperature;
    const double dt = config.dt_periods / config.f0;
    const double duration = config.duration_periods / config.f0;
    const double f_lo = config.f0 - config.band_half_width_hz;
    const double f_hi = config.f0 + config.band_half_width_hz;

    auto band_power_of = [&](double tau_periods, std::uint64_t seed, bool& blew) {
        dynamics::FeedbackParams fb;
        fb.gain_v = config.gain_v_nd * config.f0;
        fb.delay = tau_periods / config.f0;
        const auto outcome = dynamics::simulate(osc, fb, dt, duration, seed);
        blew = outcome.status != dynamics::SimStatus::completed;
        if (blew) return 0.0;
        dynamics::Trajectory stationary = outcome.trajectory;
        const auto burn = static_cast<std::ptrdiff_t>(outcome.suggested_burn_in);
        stationary.x.erase(stationary.x.begin(), stationary.x.begin() + burn);
        if (stationary.has_velocity()) {
            stationary.v.erase(stationary.v.begin(), stationary.v.begin() + burn);
        }
        const auto spec = signal::welch_psd(stationary, config.nperseg);
        return signal::band_power(spec, f_lo, f_hi);
    };

    bool ref_blew = false;
    const double ref_power = band_power_of(0.0, config.seed, ref_blew);
    if (ref_blew || !(ref_power > 0.0)) {
        throw std::runtime_error("delay sweep: zero-delay reference run failed");
    }

    std::ostringstream marker_csv;
    marker_csv.precision(17);
    marker_csv << "# config_hash=" << hash << "\n";
    marker_csv << "tau_tilde,t_ratio,status\n";
    std::uint64_t seed = config.seed;
    for (double tau : config.marker_taus) {
        ++seed;
        DelayMarker marker;
        marker.tau_periods = tau;
        bool blew = false;
        const double power = band_power_of(tau, seed, blew);
        marker.blew_up = blew;
        if (!blew) {
            marker.t_ratio = std::log10(power / ref_power);
            marker_csv << tau << ',' << marker.t_ratio << ",completed\n";
        } else {
            marker_csv << tau << ",,blew_up\n";
        }
        result.markers.push_back(marker);
    }
    io::write_text((out_dir / "t_ratio_markers.csv").string(), marker_csv.str());
    return result;
}

}  // namespace levkit::pipelines
