#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "levkit/constants.hpp"
#include "levkit/levitation.hpp"
#include "levkit/materials.hpp"

using namespace levkit;
using Catch::Approx;
namespace lev = levkit::levitation;

namespace {

const double kPi = constants::pi;

magnetics::MagnetArraySpec default_array() { return {}; }

lev::NondimensionalScales scales_for(const std::string& material) {
    return lev::NondimensionalScales::from(lev::find_material(material).plate, default_array());
}

lev::EnergyOptions fast_energy(int order = 16) {
    lev::EnergyOptions opt;
    opt.quad_order = order;
    return opt;
}

}  // namespace

TEST_CASE("gravitational energy is rho L^2 delta g z", "[levitation]") {
    lev::PlateSpec plate{1e-2, 1e-3, 1000.0, -1e-6, -1e-6, -1e-6};
    CHECK(lev::gravitational_energy(plate, 0.0) == 0.0);
    CHECK(lev::gravitational_energy(plate, 1e-3) == Approx(9.80665e-7).epsilon(1e-12));

    lev::PlateSpec thick = plate;
    thick.thickness *= 2.0;
    CHECK(lev::gravitational_energy(thick, 1e-3) ==
          Approx(2.0 * lev::gravitational_energy(plate, 1e-3)).epsilon(1e-12));
}

TEST_CASE("plate spec invariants are enforced", "[levitation]") {
    lev::PlateSpec bad{1e-2, 1e-3, 1000.0, -1e-6, -2e-6, -1e-6};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.chi_y = bad.chi_x;
    bad.chi_z = +1e-6;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.chi_z = -1e-6;
    bad.density = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("magnetic energy decays far above the array", "[levitation]") {
    const auto array = default_array();
    const auto plate = lev::find_material("hopg_supp").plate;
    const double low = lev::magnetic_energy(plate, {0.1 * array.magnet_side, 0.0}, array,
                                            fast_energy());
    const double high = lev::magnetic_energy(plate, {100.0 * array.magnet_side, 0.0}, array,
                                             fast_energy());
    CHECK(std::abs(high) < 1e-6 * std::abs(low));
}

TEST_CASE("isotropic plate energy is pi/2 periodic in rotation", "[levitation]") {
    const auto array = default_array();
    auto plate = lev::find_material("composite").plate;
    const double z = 0.15 * array.magnet_side;
    const double u0 = lev::magnetic_energy(plate, {z, 0.31}, array, fast_energy());
    const double u1 = lev::magnetic_energy(plate, {z, 0.31 + kPi / 2.0}, array, fast_energy());
    CHECK(u1 == Approx(u0).epsilon(1e-12));
}

TEST_CASE("oriented plate prefers the diagonal at fixed height", "[levitation]") {
    // chi = -(85, 85, 450)e-6 at fixed z: the diagonal orientation has the
    // lower magnetic energy
    const auto scales = scales_for("hopg_supp");
    const double z = 0.09;
    const double aligned =
        lev::dimensionless_magnetic_energy(0.75, z, 0.0, scales.chi_ratio_xy, fast_energy());
    const double diagonal = lev::dimensionless_magnetic_energy(0.75, z, kPi / 4.0,
                                                               scales.chi_ratio_xy, fast_energy());
    CHECK(diagonal < aligned);
}

TEST_CASE("SI and dimensionless energy paths agree", "[levitation]") {
    const auto array = default_array();
    for (const char* name : {"hopg_supp", "composite"}) {
        const auto plate = lev::find_material(name).plate;
        const auto scales = lev::NondimensionalScales::from(plate, array);
        const double length_nd = plate.side_length / array.magnet_side;
        for (double z_nd : {0.08, 0.2}) {
            for (double phi : {0.0, 0.3, kPi / 4.0}) {
                const double u_si = lev::total_energy(
                    plate, {z_nd * array.magnet_side, phi}, array, fast_energy());
                const double u_nd =
                    lev::dimensionless_energy(length_nd, z_nd, phi, scales, fast_energy());
                CHECK(u_si / scales.energy_scale == Approx(u_nd).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("dimensionless energy is independent of plate thickness", "[levitation]") {
    const auto array = default_array();
    auto plate = lev::find_material("hopg_supp").plate;
    auto thick = plate;
    thick.thickness = 10.0 * plate.thickness;

    const auto s1 = lev::NondimensionalScales::from(plate, array);
    const auto s2 = lev::NondimensionalScales::from(thick, array);
    // height must clear half the 10x thickness
    const double z = 0.35 * array.magnet_side;
    const double u1 = lev::total_energy(plate, {z, 0.5}, array, fast_energy()) / s1.energy_scale;
    const double u2 = lev::total_energy(thick, {z, 0.5}, array, fast_energy()) / s2.energy_scale;
    CHECK(u2 == Approx(u1).epsilon(1e-10));
}

TEST_CASE("through-thickness quadrature stays close to the mid-plane value", "[levitation]") {
    const auto array = default_array();
    const auto plate = lev::find_material("composite").plate;
    auto mid = fast_energy();
    auto full = fast_energy();
    full.through_thickness = true;
    const lev::PlateConfiguration config{0.1 * array.magnet_side, 0.2};
    const double u_mid = lev::magnetic_energy(plate, config, array, mid);
    const double u_full = lev::magnetic_energy(plate, config, array, full);
    CHECK(u_full != u_mid);
    CHECK(u_full == Approx(u_mid).epsilon(0.02));
}

TEST_CASE("quadrature order convergence", "[levitation]") {
    const auto scales = scales_for("hopg_supp");
    const double u8 = lev::dimensionless_energy(0.75, 0.09, kPi / 4.0, scales, fast_energy(8));
    const double u16 = lev::dimensionless_energy(0.75, 0.09, kPi / 4.0, scales, fast_energy(16));
    const double u32 = lev::dimensionless_energy(0.75, 0.09, kPi / 4.0, scales, fast_energy(32));
    const double u64 = lev::dimensionless_energy(0.75, 0.09, kPi / 4.0, scales, fast_energy(64));
    CHECK(std::abs(u32 - u16) < std::abs(u16 - u8));
    CHECK(std::abs(u64 - u32) < 1e-6 * std::abs(u64));
}

TEST_CASE("equilibrium orientation classes", "[levitation][slow]") {
    lev::EquilibriumOptions opt;
    opt.energy = fast_energy(16);

    const auto hopg = lev::equilibrium(scales_for("hopg_supp"), 0.75, {}, opt);
    CHECK(std::abs(hopg.rotation - kPi / 4.0) < 1e-2);

    const auto comp = lev::equilibrium(scales_for("composite"), 0.75, {}, opt);
    const double dist_aligned = std::min(comp.rotation, std::abs(kPi / 2.0 - comp.rotation));
    CHECK(dist_aligned < 1e-2);

    // the composite levitates lower at equal slab length
    CHECK(comp.height_nd < hopg.height_nd);
}

TEST_CASE("argmin class is invariant under susceptibility rescaling", "[levitation][slow]") {
    const auto array = default_array();
    lev::EquilibriumOptions opt;
    opt.energy = fast_energy(12);

    auto plate = lev::find_material("hopg_supp").plate;
    plate.chi_x *= 0.7;
    plate.chi_y *= 0.7;
    plate.chi_z *= 0.7;
    const auto scaled = lev::NondimensionalScales::from(plate, array);
    const auto eq = lev::equilibrium(scaled, 0.75, {}, opt);
    CHECK(std::abs(eq.rotation - kPi / 4.0) < 1e-2);
}

TEST_CASE("equilibrium rejects boxes without an interior minimum", "[levitation]") {
    lev::SearchBox box;
    box.height_lo = 0.35;
    box.height_hi = 0.6;  // energy is monotone increasing here: minimum on the edge
    lev::EquilibriumOptions opt;
    opt.energy = fast_energy(8);
    CHECK_THROWS_AS(lev::equilibrium(scales_for("hopg_supp"), 0.75, box, opt),
                    lev::NoMinimumInBox);
}

TEST_CASE("landscape agrees with the refined equilibrium", "[levitation][slow]") {
    const auto scales = scales_for("hopg_supp");
    const auto land = lev::landscape(scales, 0.75, 0.02, 0.3, 29, -kPi / 8.0,
                                     kPi / 2.0 + kPi / 8.0, 31, fast_energy(12));

    std::size_t imin = 0, jmin = 0;
    double best = land.at(0, 0);
    for (std::size_t i = 0; i < land.height_nd.size(); ++i) {
        for (std::size_t j = 0; j < land.rotation.size(); ++j) {
            if (land.at(i, j) < best) {
                best = land.at(i, j);
                imin = i;
                jmin = j;
            }
        }
    }
    lev::EquilibriumOptions opt;
    opt.energy = fast_energy(12);
    lev::SearchBox box;
    box.height_lo = 0.02;
    box.height_hi = 0.3;
    const auto eq = lev::equilibrium(scales, 0.75, box, opt);

    const double dz = land.height_nd[1] - land.height_nd[0];
    const double dphi = land.rotation[1] - land.rotation[0];
    CHECK(std::abs(land.height_nd[imin] - eq.height_nd) <= dz);
    CHECK(std::abs(lev::canonical_rotation(land.rotation[jmin]) - eq.rotation) <= dphi);
}

TEST_CASE("landscape is symmetric under phi -> pi/2 - phi", "[levitation]") {
    const auto scales = scales_for("composite");
    const auto land =
        lev::landscape(scales, 0.6, 0.05, 0.2, 4, 0.0, kPi / 2.0, 9, fast_energy(12));
    const std::size_t n = land.rotation.size();
    for (std::size_t i = 0; i < land.height_nd.size(); ++i) {
        for (std::size_t j = 0; j < n / 2; ++j) {
            CHECK(land.at(i, j) == Approx(land.at(i, n - 1 - j)).epsilon(1e-10));
        }
    }
}

TEST_CASE("effective susceptibility straight average", "[levitation]") {
    CHECK(lev::effective_susceptibility(-85e-6, -450e-6) == Approx(-206.6667e-6).epsilon(1e-4));
    // halved out-of-plane component
    CHECK(lev::effective_susceptibility(-85e-6, -225e-6) == Approx(-131.6667e-6).epsilon(1e-4));
    // isotropic fixed point
    CHECK(lev::effective_susceptibility(-3e-6, -3e-6) == Approx(-3e-6).epsilon(1e-12));
    CHECK_THROWS_AS(lev::effective_susceptibility(1e-6, -1e-6), std::invalid_argument);
}

TEST_CASE("material presets resolve", "[levitation]") {
    CHECK(lev::find_material("hopg_supp").plate.density == 2700.0);
    CHECK(lev::find_material("hopg_main").plate.density == 2070.0);
    CHECK(lev::find_material("composite").plate.chi_z == -120e-6);
    CHECK(lev::find_material("composite_measured").plate.chi_z == -218e-6);
    CHECK(lev::find_material("composite_equal_density").plate.density == 2700.0);
    CHECK_THROWS_AS(lev::find_material("unobtanium"), std::invalid_argument);
}
