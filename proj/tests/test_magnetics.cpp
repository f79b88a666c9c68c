#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "levkit/constants.hpp"
#include "levkit/magnetics.hpp"
#include "oracles.hpp"

using namespace levkit;
using Catch::Approx;
namespace mag = levkit::magnetics;

namespace {

// random point outside the cube with clearance from the surface AND from the
// twelve edge lines (including their extensions, where single closed-form
// terms degenerate even though the summed field is finite)
Vec3 random_external_point(testing::TestRng& rng, double clearance = 0.25) {
    while (true) {
        const Vec3 p{rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5)};
        const double ax = std::abs(p.x), ay = std::abs(p.y), az = std::abs(p.z);
        if (std::max({ax, ay, az}) < 0.5 + clearance) continue;
        const auto line_dist = [](double a, double b) {
            return std::hypot(std::abs(a) - 0.5, std::abs(b) - 0.5);
        };
        if (line_dist(p.x, p.y) < clearance || line_dist(p.y, p.z) < clearance ||
            line_dist(p.x, p.z) < clearance) {
            continue;
        }
        return p;
    }
}

}  // namespace

TEST_CASE("unit cube field is zero transverse on the axis", "[magnetics]") {
    const Vec3 b = mag::unit_cube_field({0.0, 0.0, 1.0});
    CHECK(b.x == Approx(0.0).margin(1e-15));
    CHECK(b.y == Approx(0.0).margin(1e-15));
    CHECK(b.z > 0.0);
}

TEST_CASE("far field approaches the dipole asymptote", "[magnetics]") {
    // total moment M D^3 -> on-axis Bz = mu0 M / (2 pi z_nd^3)
    const Vec3 b = mag::unit_cube_field({0.0, 0.0, 10.0});
    const double dipole = 1.0 / (2.0 * constants::pi * 1e3);
    CHECK(b.z / dipole == Approx(1.0).epsilon(0.01));
}

TEST_CASE("unit cube field matches the dipole-grid oracle", "[magnetics]") {
    const Vec3 p{0.3, 0.2, 0.8};
    const Vec3 closed = mag::unit_cube_field(p);
    const Vec3 oracle = testing::dipole_grid_field(p, 100);
    const double scale = norm(oracle);
    CHECK(std::abs(closed.x - oracle.x) / scale < 1e-4);
    CHECK(std::abs(closed.y - oracle.y) / scale < 1e-4);
    CHECK(std::abs(closed.z - oracle.z) / scale < 1e-4);

    testing::TestRng rng(7);
    for (int trial = 0; trial < 12; ++trial) {
        const Vec3 q = random_external_point(rng);
        const Vec3 c = mag::unit_cube_field(q);
        const Vec3 o = testing::dipole_grid_field(q, 60);
        const double s = std::max(norm(o), 1e-12);
        INFO("point (" << q.x << ", " << q.y << ", " << q.z << ")");
        CHECK(std::abs(c.x - o.x) / s < 2e-4);
        CHECK(std::abs(c.y - o.y) / s < 2e-4);
        CHECK(std::abs(c.z - o.z) / s < 2e-4);
    }
}

TEST_CASE("mirror symmetries of the cube field", "[magnetics]") {
    testing::TestRng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec3 p = random_external_point(rng, 0.1);
        const Vec3 b = mag::unit_cube_field(p);
        const Vec3 bx = mag::unit_cube_field({-p.x, p.y, p.z});
        const Vec3 by = mag::unit_cube_field({p.x, -p.y, p.z});

        // Bx odd in x, even in y; Bz even in both
        CHECK(bx.x == Approx(-b.x).margin(1e-12));
        CHECK(by.x == Approx(b.x).margin(1e-12));
        CHECK(bx.z == Approx(b.z).margin(1e-12));
        CHECK(by.z == Approx(b.z).margin(1e-12));
        // the y component is the x component with axes swapped
        const Vec3 swapped = mag::unit_cube_field({p.y, p.x, p.z});
        CHECK(b.y == Approx(swapped.x).margin(1e-12));
    }
}

TEST_CASE("field is divergence- and curl-free outside the magnet", "[magnetics]") {
    testing::TestRng rng(13);
    const double h = 1e-4;
    for (int trial = 0; trial < 8; ++trial) {
        const Vec3 p = random_external_point(rng);
        auto b = [&](double dx, double dy, double dz) {
            return mag::unit_cube_field({p.x + dx, p.y + dy, p.z + dz});
        };
        const double scale = std::max(norm(b(0, 0, 0)), 1e-12);

        const double div = (b(h, 0, 0).x - b(-h, 0, 0).x + b(0, h, 0).y - b(0, -h, 0).y +
                            b(0, 0, h).z - b(0, 0, -h).z) /
                           (2.0 * h);
        CHECK(std::abs(div) / scale < 1e-5);

        const double curl_x = (b(0, h, 0).z - b(0, -h, 0).z - b(0, 0, h).y + b(0, 0, -h).y) /
                              (2.0 * h);
        const double curl_y = (b(0, 0, h).x - b(0, 0, -h).x - b(h, 0, 0).z + b(-h, 0, 0).z) /
                              (2.0 * h);
        const double curl_z = (b(h, 0, 0).y - b(-h, 0, 0).y - b(0, h, 0).x + b(0, -h, 0).x) /
                              (2.0 * h);
        CHECK(std::abs(curl_x) / scale < 1e-5);
        CHECK(std::abs(curl_y) / scale < 1e-5);
        CHECK(std::abs(curl_z) / scale < 1e-5);
    }
}

TEST_CASE("edge exclusion raises EdgeSingularity", "[magnetics]") {
    // on an edge of the cube: x = z = -1/2 within the face span
    CHECK_THROWS_AS(mag::unit_cube_field({-0.5, 0.0, -0.5}), mag::EdgeSingularity);
}

TEST_CASE("checkerboard axis and reflection antisymmetry", "[magnetics]") {
    mag::MagnetArraySpec spec;
    const double d = spec.magnet_side;

    for (double z : {0.2, 0.5, 1.0}) {
        const Vec3 b = mag::array_field(spec, {0.0, 0.0, z * d});
        CHECK(std::abs(b.z) < 1e-12);
    }

    const Vec3 a = mag::array_field(spec, {0.3 * d, 0.1 * d, 0.4 * d});
    const Vec3 mx = mag::array_field(spec, {-0.3 * d, 0.1 * d, 0.4 * d});
    const Vec3 my = mag::array_field(spec, {0.3 * d, -0.1 * d, 0.4 * d});
    CHECK(mx.z == Approx(-a.z).margin(1e-12 * std::abs(a.z) + 1e-18));
    CHECK(my.z == Approx(-a.z).margin(1e-12 * std::abs(a.z) + 1e-18));
}

TEST_CASE("array field equals the four-magnet superposition", "[magnetics]") {
    mag::MagnetArraySpec spec;
    const double d = spec.magnet_side;
    const Vec3 p{0.25 * d, 0.25 * d, 0.5 * d};

    Vec3 manual;
    for (const auto& magnet : spec.magnets()) {
        manual += mag::cuboid_field(magnet, p);
    }
    const Vec3 combined = mag::array_field(spec, p);
    const double scale = norm(manual);
    CHECK(std::abs(combined.x - manual.x) <= 1e-12 * scale);
    CHECK(std::abs(combined.y - manual.y) <= 1e-12 * scale);
    CHECK(std::abs(combined.z - manual.z) <= 1e-12 * scale);
}

TEST_CASE("array far field decays like a local multipole", "[magnetics]") {
    // the alternating array has no net moment; check |B| at 10 D is tiny
    mag::MagnetArraySpec spec;
    const double d = spec.magnet_side;
    const double near = norm(mag::array_field(spec, {0.25 * d, 0.25 * d, 0.1 * d}));
    const double far = norm(mag::array_field(spec, {0.25 * d, 0.25 * d, 10.0 * d}));
    CHECK(far < 1e-6 * near);
}

TEST_CASE("field map preserves grid order and flags singular points", "[magnetics]") {
    mag::MagnetArraySpec spec;
    const double d = spec.magnet_side;

    SECTION("single point equals array_field") {
        mag::FieldGrid grid;
        grid.origin = {0.1 * d, 0.2 * d, 0.5 * d};
        const auto samples = mag::field_map(spec, grid);
        REQUIRE(samples.size() == 1);
        const Vec3 direct = mag::array_field(spec, grid.origin);
        CHECK(samples[0].field.x == direct.x);
        CHECK(samples[0].field.y == direct.y);
        CHECK(samples[0].field.z == direct.z);
    }

    SECTION("symmetric 2x2 grid about the axis obeys the rotation antisymmetry") {
        mag::FieldGrid grid;
        grid.origin = {-0.2 * d, -0.2 * d, 0.4 * d};
        grid.spacing = {0.4 * d, 0.4 * d, 0.0};
        grid.nx = grid.ny = 2;
        const auto samples = mag::field_map(spec, grid);
        REQUIRE(samples.size() == 4);
        // 90-degree rotation maps the grid to itself and flips polarity:
        // (x,y) -> (-y,x), Bz -> -Bz
        const double bz00 = samples[0].field.z;  // (-,-)
        const double bz01 = samples[1].field.z;  // (-,+)
        const double bz10 = samples[2].field.z;  // (+,-)
        const double bz11 = samples[3].field.z;  // (+,+)
        CHECK(bz01 == Approx(-bz00).margin(1e-15 + 1e-12 * std::abs(bz00)));
        CHECK(bz10 == Approx(-bz00).margin(1e-15 + 1e-12 * std::abs(bz00)));
        CHECK(bz11 == Approx(bz00).margin(1e-15 + 1e-12 * std::abs(bz00)));
    }

    SECTION("parallel evaluation is order-stable") {
        mag::FieldGrid grid;
        grid.origin = {-0.4 * d, -0.3 * d, 0.3 * d};
        grid.spacing = {0.07 * d, 0.06 * d, 0.05 * d};
        grid.nx = 5;
        grid.ny = 4;
        grid.nz = 3;
        const auto serial = mag::field_map(spec, grid, mag::FieldUnits::si, {}, 1);
        const auto threaded = mag::field_map(spec, grid, mag::FieldUnits::si, {}, 4);
        REQUIRE(serial.size() == threaded.size());
        for (std::size_t i = 0; i < serial.size(); ++i) {
            CHECK(serial[i].field.x == threaded[i].field.x);
            CHECK(serial[i].field.y == threaded[i].field.y);
            CHECK(serial[i].field.z == threaded[i].field.z);
        }
    }
}

TEST_CASE("divergence of the emitted field map vanishes", "[magnetics]") {
    // 64x64 patch at z = 0.5 D with two auxiliary planes for the z-derivative;
    // the tolerance is 1e-6 * max|B| / spacing
    mag::MagnetArraySpec spec;
    const double d = spec.magnet_side;
    const double step = 0.0019 * d;

    mag::FieldGrid grid;
    grid.nx = 64;
    grid.ny = 64;
    grid.nz = 3;
    grid.spacing = {step, step, step};
    grid.origin = {0.05 * d, 0.03 * d, 0.5 * d - step};

    const auto samples = mag::field_map(spec, grid);
    double max_b = 0.0;
    for (const auto& s : samples) max_b = std::max(max_b, norm(s.field));

    auto at = [&](std::size_t i, std::size_t j, std::size_t k) -> const Vec3& {
        return samples[(i * grid.ny + j) * grid.nz + k].field;
    };
    double max_div = 0.0;
    for (std::size_t i = 1; i + 1 < grid.nx; ++i) {
        for (std::size_t j = 1; j + 1 < grid.ny; ++j) {
            const double div = (at(i + 1, j, 1).x - at(i - 1, j, 1).x +
                                at(i, j + 1, 1).y - at(i, j - 1, 1).y +
                                at(i, j, 2).z - at(i, j, 0).z) /
                               (2.0 * step);
            max_div = std::max(max_div, std::abs(div));
        }
    }
    CHECK(max_div < 1e-6 * max_b / step);
}
