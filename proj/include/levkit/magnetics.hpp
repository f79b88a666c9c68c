#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "levkit/vec3.hpp"

namespace levkit::magnetics {

/// Thrown when an evaluation point falls inside the exclusion zone around a
/// magnet edge, where the closed-form field expressions degenerate.
struct EdgeSingularity : std::runtime_error {
    explicit EdgeSingularity(const std::string& what) : std::runtime_error(what) {}
};

struct FieldOptions {
    /// Exclusion distance around cube edges, in units of the cube side.
    /// Points inside raise EdgeSingularity instead of returning a clamped
    /// value, which would silently corrupt downstream quadrature.
    double edge_epsilon = 1e-9;
};

/// Field of a unit cube magnetized along +z, in units of mu0*M.
/// Valid strictly outside the closed cube [-1/2,1/2]^3; inside, the returned
/// quantity is not the B field and the caller must not rely on it.
Vec3 unit_cube_field(const Vec3& r, const FieldOptions& opt = {});

struct CuboidMagnet {
    double side_length = 0.0;    ///< D [m]
    double magnetization = 0.0;  ///< M [A/m]
    Vec3 center;                 ///< [m]
    int polarity = +1;           ///< magnetization along polarity * z_hat
    void validate() const;
};

/// Field of one cuboid magnet in tesla.
Vec3 cuboid_field(const CuboidMagnet& magnet, const Vec3& r, const FieldOptions& opt = {});

/// 2x2 checkerboard of cuboid magnets with alternating polarity.
/// Centers sit at (+-D/2, +-D/2, -D/2) so the top faces form the plane z = 0;
/// polarity is +1 for the (+,+)/(-,-) diagonal and -1 for the other.
struct MagnetArraySpec {
    double magnet_side = 12.7e-3;   ///< D [m]
    double magnetization = 1.1e6;   ///< M [A/m]; N52 default, Br/mu0 ~ 1.4 T / mu0
    std::array<CuboidMagnet, 4> magnets() const;
    void validate() const;
};

/// Checkerboard field in tesla; r in meters, array frame (top faces at z=0).
Vec3 array_field(const MagnetArraySpec& spec, const Vec3& r, const FieldOptions& opt = {});

/// Checkerboard field of the unit-side array: lengths in D, field in mu0*M.
Vec3 array_field_nd(const Vec3& r, const FieldOptions& opt = {});

enum class FieldUnits { dimensionless, si };

struct FieldSample {
    Vec3 position;
    Vec3 field;
    FieldUnits units = FieldUnits::si;
    bool singular = false;  ///< point fell inside an edge exclusion zone
};

/// Rectangular evaluation lattice. Points are ordered row-major over
/// (ix, iy, iz) with iz fastest.
struct FieldGrid {
    Vec3 origin;
    Vec3 spacing;
    std::size_t nx = 1, ny = 1, nz = 1;

    std::size_t size() const { return nx * ny * nz; }
    Vec3 point(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return {origin.x + spacing.x * static_cast<double>(ix),
                origin.y + spacing.y * static_cast<double>(iy),
                origin.z + spacing.z * static_cast<double>(iz)};
    }
};

/// One sample per grid point, in grid order. Edge singularities are recorded
/// per sample (field set to NaN, singular flag set) rather than aborting.
/// Deterministic and order-stable for any jobs count.
std::vector<FieldSample> field_map(const MagnetArraySpec& spec, const FieldGrid& grid,
                                   FieldUnits units = FieldUnits::si,
                                   const FieldOptions& opt = {}, int jobs = 1);

}  // namespace levkit::magnetics
