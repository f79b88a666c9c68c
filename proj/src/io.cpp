#include "levkit/io.hpp"

#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>

namespace levkit::io {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

void write_hash_comment(std::ofstream& out, const std::string& hash) {
    if (!hash.empty()) out << "# config_hash=" << hash << "\n";
}

bool next_data_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        return true;
    }
    return false;
}

std::vector<double> split_numbers(const std::string& line) {
    std::vector<double> out;
    std::string cell;
    std::istringstream row(line);
    while (std::getline(row, cell, ',')) {
        out.push_back(cell.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(cell));
    }
    return out;
}

}  // namespace

std::string config_hash(const nlohmann::json& config) {
    const std::string dump = config.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

void write_field_map_csv(const std::string& path,
                         const std::vector<magnetics::FieldSample>& samples,
                         const std::string& hash) {
    auto out = open_out(path);
    write_hash_comment(out, hash);
    out << "x,y,z,Bx,By,Bz,units\n";
    for (const auto& s : samples) {
        const char* units =
            s.units == magnetics::FieldUnits::si ? "SI" : "dimensionless";
        out << s.position.x << ',' << s.position.y << ',' << s.position.z << ',' << s.field.x
            << ',' << s.field.y << ',' << s.field.z << ',' << units << '\n';
    }
}

void write_landscape_csv(const std::string& path, const levitation::EnergyLandscape& landscape,
                         const std::string& hash) {
    auto out = open_out(path);
    write_hash_comment(out, hash);
    out << "z_tilde,phi,U_tilde\n";
    for (std::size_t i = 0; i < landscape.height_nd.size(); ++i) {
        for (std::size_t j = 0; j < landscape.rotation.size(); ++j) {
            out << landscape.height_nd[i] << ',' << landscape.rotation[j] << ','
                << landscape.at(i, j) << '\n';
        }
    }
}

void write_trajectory_csv(const std::string& path, const dynamics::Trajectory& traj,
                          const std::string& hash, const nlohmann::json& sidecar_extra) {
    auto out = open_out(path);
    write_hash_comment(out, hash);
    const bool with_v = traj.has_velocity();
    out << (with_v ? "t,x,v\n" : "t,x\n");
    const double dt = 1.0 / traj.sample_rate;
    for (std::size_t i = 0; i < traj.x.size(); ++i) {
        out << traj.start_time + dt * static_cast<double>(i) << ',' << traj.x[i];
        if (with_v) out << ',' << traj.v[i];
        out << '\n';
    }

    nlohmann::json side = {{"sample_rate_hz", traj.sample_rate},
                           {"start_time_s", traj.start_time},
                           {"seed", traj.seed},
                           {"warmup_samples", traj.warmup},
                           {"samples", traj.x.size()},
                           {"has_velocity", with_v}};
    if (!hash.empty()) side["config_hash"] = hash;
    if (!sidecar_extra.is_null()) side["params"] = sidecar_extra;
    write_json(path + ".json", side);
}

dynamics::Trajectory read_trajectory_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!next_data_line(in, line)) throw std::runtime_error("empty trajectory file: " + path);
    const bool with_v = line.find(",v") != std::string::npos;

    dynamics::Trajectory traj;
    double t0 = 0.0, t1 = 0.0;
    std::size_t rows = 0;
    while (next_data_line(in, line)) {
        const auto nums = split_numbers(line);
        if (nums.size() < 2) continue;
        if (rows == 0) t0 = nums[0];
        t1 = nums[0];
        traj.x.push_back(nums[1]);
        if (with_v && nums.size() > 2) traj.v.push_back(nums[2]);
        ++rows;
    }
    if (rows < 2) throw std::runtime_error("trajectory needs at least 2 samples: " + path);
    traj.start_time = t0;
    traj.sample_rate = static_cast<double>(rows - 1) / (t1 - t0);

    std::ifstream side(path + ".json");
    if (side) {
        nlohmann::json doc = nlohmann::json::parse(side);
        if (doc.contains("sample_rate_hz")) traj.sample_rate = doc["sample_rate_hz"];
        if (doc.contains("seed")) traj.seed = doc["seed"];
        if (doc.contains("warmup_samples")) traj.warmup = doc["warmup_samples"];
    }
    return traj;
}

void write_spectrum_csv(const std::string& path, const signal::Spectrum& spectrum,
                        const std::string& hash) {
    auto out = open_out(path);
    write_hash_comment(out, hash);
    out << "f_hz,psd\n";
    for (std::size_t i = 0; i < spectrum.frequency.size(); ++i) {
        out << spectrum.frequency[i] << ',' << spectrum.psd[i] << '\n';
    }
}

signal::Spectrum read_spectrum_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!next_data_line(in, line)) throw std::runtime_error("empty spectrum file: " + path);
    signal::Spectrum spec;
    while (next_data_line(in, line)) {
        const auto nums = split_numbers(line);
        if (nums.size() < 2) continue;
        spec.frequency.push_back(nums[0]);
        spec.psd.push_back(nums[1]);
    }
    if (spec.frequency.size() < 2) throw std::runtime_error("spectrum too short: " + path);
    spec.sample_rate = 2.0 * spec.frequency.back();
    return spec;
}

void write_filter(const std::string& csv_path, const signal::FirFilter& filter,
                  const std::string& hash) {
    auto out = open_out(csv_path);
    write_hash_comment(out, hash);
    out << "coefficient\n";
    for (double c : filter.coefficients) out << c << '\n';

    nlohmann::json side = {{"sample_rate_hz", filter.sample_rate},
                           {"band_low_hz", filter.band_low},
                           {"band_high_hz", filter.band_high},
                           {"window", filter.window},
                           {"length", filter.coefficients.size()}};
    if (!hash.empty()) side["config_hash"] = hash;
    write_json(csv_path + ".json", side);
}

signal::FirFilter read_filter(const std::string& csv_path) {
    auto in = open_in(csv_path);
    std::string line;
    if (!next_data_line(in, line)) throw std::runtime_error("empty filter file: " + csv_path);
    signal::FirFilter filter;
    while (next_data_line(in, line)) {
        filter.coefficients.push_back(std::stod(line));
    }
    nlohmann::json doc = read_json(csv_path + ".json");
    filter.sample_rate = doc.at("sample_rate_hz");
    filter.band_low = doc.value("band_low_hz", 0.0);
    filter.band_high = doc.value("band_high_hz", 0.0);
    filter.window = doc.value("window", "hamming");
    return filter;
}

void write_text(const std::string& path, const std::string& content) {
    auto out = open_out(path);
    out << content;
}

std::string read_text(const std::string& path) {
    auto in = open_in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_json(const std::string& path, const nlohmann::json& doc) {
    auto out = open_out(path);
    out << doc.dump(2) << "\n";
}

nlohmann::json read_json(const std::string& path) {
    auto in = open_in(path);
    return nlohmann::json::parse(in);
}

}  // namespace levkit::io
