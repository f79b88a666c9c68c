#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include "levkit/io.hpp"

using namespace levkit;
using Catch::Approx;

namespace {

std::string temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "levkit_io_tests";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

}  // namespace

TEST_CASE("config hash is stable and key-order sensitive content hash", "[io]") {
    const nlohmann::json a = {{"f0", 18.9}, {"seed", 1}};
    const nlohmann::json b = {{"f0", 18.9}, {"seed", 1}};
    const nlohmann::json c = {{"f0", 18.9}, {"seed", 2}};
    CHECK(io::config_hash(a) == io::config_hash(b));
    CHECK(io::config_hash(a) != io::config_hash(c));
    CHECK(io::config_hash(a).size() > 4);
}

TEST_CASE("trajectory CSV and sidecar round-trip", "[io]") {
    dynamics::Trajectory traj;
    traj.sample_rate = 1890.0;
    traj.seed = 42;
    traj.warmup = 7;
    for (int i = 0; i < 64; ++i) {
        traj.x.push_back(std::sin(0.1 * i) * 1e-6);
        traj.v.push_back(std::cos(0.1 * i) * 1e-4);
    }
    const auto path = temp_path("traj.csv");
    io::write_trajectory_csv(path, traj, "deadbeef", {{"f0", 18.9}});

    const auto loaded = io::read_trajectory_csv(path);
    REQUIRE(loaded.x.size() == traj.x.size());
    CHECK(loaded.sample_rate == Approx(traj.sample_rate).epsilon(1e-12));
    CHECK(loaded.seed == traj.seed);
    CHECK(loaded.warmup == traj.warmup);
    for (std::size_t i = 0; i < traj.x.size(); i += 13) {
        CHECK(loaded.x[i] == Approx(traj.x[i]).margin(1e-21));
        CHECK(loaded.v[i] == Approx(traj.v[i]).margin(1e-19));
    }

    // hash comment present
    const auto text = io::read_text(path);
    CHECK(text.rfind("# config_hash=deadbeef\n", 0) == 0);
    CHECK(text.find("\r") == std::string::npos);
}

TEST_CASE("spectrum CSV round-trip", "[io]") {
    signal::Spectrum spec;
    spec.sample_rate = 1000.0;
    for (int k = 0; k <= 32; ++k) {
        spec.frequency.push_back(500.0 * k / 32.0);
        spec.psd.push_back(1e-12 / (1.0 + k));
    }
    const auto path = temp_path("spec.csv");
    io::write_spectrum_csv(path, spec, "cafe");
    const auto loaded = io::read_spectrum_csv(path);
    REQUIRE(loaded.frequency.size() == spec.frequency.size());
    CHECK(loaded.sample_rate == Approx(1000.0));
    for (std::size_t i = 0; i < spec.psd.size(); ++i) {
        CHECK(loaded.psd[i] == spec.psd[i]);
    }
}

TEST_CASE("filter CSV plus metadata round-trip", "[io]") {
    const auto filter = signal::design_bandpass(101, 1250.0, 18.0, 23.0);
    const auto path = temp_path("filter.csv");
    io::write_filter(path, filter, "f00d");
    const auto loaded = io::read_filter(path);
    REQUIRE(loaded.coefficients.size() == filter.coefficients.size());
    CHECK(loaded.sample_rate == filter.sample_rate);
    CHECK(loaded.band_low == filter.band_low);
    CHECK(loaded.band_high == filter.band_high);
    for (std::size_t i = 0; i < filter.coefficients.size(); ++i) {
        CHECK(loaded.coefficients[i] == filter.coefficients[i]);
    }
}

TEST_CASE("field map CSV carries the units column", "[io]") {
    magnetics::MagnetArraySpec array;
    magnetics::FieldGrid grid;
    grid.origin = {0.0, 0.0, 0.01};
    grid.spacing = {0.001, 0.0, 0.0};
    grid.nx = 3;
    const auto samples = magnetics::field_map(array, grid);
    const auto path = temp_path("field.csv");
    io::write_field_map_csv(path, samples, "beef");
    const auto text = io::read_text(path);
    CHECK(text.find("x,y,z,Bx,By,Bz,units") != std::string::npos);
    CHECK(text.find(",SI") != std::string::npos);
}

TEST_CASE("landscape CSV has the fixed header", "[io]") {
    levitation::EnergyLandscape land;
    land.height_nd = {0.1, 0.2};
    land.rotation = {0.0, 0.5};
    land.values = {1.0, 2.0, 3.0, 4.0};
    const auto path = temp_path("land.csv");
    io::write_landscape_csv(path, land, "");
    const auto text = io::read_text(path);
    CHECK(text.rfind("z_tilde,phi,U_tilde\n", 0) == 0);
    CHECK(text.find(",0.5,4") != std::string::npos);
}
