#include "levkit/magnetics.hpp"

#include <cmath>
#include <limits>

#include "levkit/constants.hpp"
#include "levkit/parallel.hpp"

namespace levkit::magnetics {

namespace {

constexpr double quarter_pi_inv = 1.0 / (4.0 * constants::pi);

// Distance to the two y-faces combined with the face offset:
//   g(v) = sqrt(a^2 + v^2 + c^2) - v,  v = y -+ 1/2,  a = x + 1/2,  c = z + 1/2.
// The log-ratio building block is F2 = g(y - 1/2) / g(y + 1/2).
//
// For v > 0, g suffers catastrophic cancellation near the line a = c = 0, so
// the algebraic identity g = (a^2 + c^2)/(R + v) is used there. When the two
// faces straddle v = 0 the rho^2 factors no longer cancel inside the ratio
// and the genuine edge-log divergence remains; that case carries the
// edge-exclusion guard.
double face_log_ratio(double x, double y, double z, double eps) {
    const double a = x + 0.5;
    const double c = z + 0.5;
    const double vm = y - 0.5;
    const double vp = y + 0.5;
    const double rho2 = a * a + c * c;
    const double rm = std::sqrt(rho2 + vm * vm);
    const double rp = std::sqrt(rho2 + vp * vp);
    if (vm > 0.0) {
        // both v positive: rho^2 cancels exactly
        return (rp + vp) / (rm + vm);
    }
    if (vp <= 0.0) {
        // both negative: direct form has no cancellation
        return (rm - vm) / (rp - vp);
    }
    // straddling: rho -> 0 is the physical edge (or its in-span segment)
    if (rho2 < eps * eps) {
        throw EdgeSingularity("field point within edge exclusion zone");
    }
    return (rm - vm) * (rp + vp) / rho2;
}

// Corner solid-angle term: arctan[(x+1/2)(y+1/2) / ((z+1/2) R)].
// Principal branch on purpose: atan2 would wrap by pi in the column over each
// face and shift Bz by a spurious constant (fails the far-field dipole limit).
// IEEE division gives +-inf -> atan -> +-pi/2 on the face planes; the true
// 0/0 set is the edge lines, guarded below.
double corner_angle(double x, double y, double z, double eps) {
    const double a = x + 0.5;
    const double b = y + 0.5;
    const double c = z + 0.5;
    const double r = std::sqrt(a * a + b * b + c * c);
    const double num = a * b;
    const double den = c * r;
    if (std::abs(den) < eps && std::abs(num) < eps) {
        throw EdgeSingularity("field point within edge exclusion zone");
    }
    return std::atan(num / den);
}

}  // namespace

Vec3 unit_cube_field(const Vec3& r, const FieldOptions& opt) {
    const double eps = opt.edge_epsilon;
    const double x = r.x, y = r.y, z = r.z;

    const double bx = quarter_pi_inv *
                      std::log(face_log_ratio(-x, y, -z, eps) * face_log_ratio(x, y, z, eps) /
                               (face_log_ratio(x, y, -z, eps) * face_log_ratio(-x, y, z, eps)));
    const double by = quarter_pi_inv *
                      std::log(face_log_ratio(-y, x, -z, eps) * face_log_ratio(y, x, z, eps) /
                               (face_log_ratio(y, x, -z, eps) * face_log_ratio(-y, x, z, eps)));
    const double bz = -quarter_pi_inv *
                      (corner_angle(-x, y, z, eps) + corner_angle(-x, y, -z, eps) +
                       corner_angle(-x, -y, z, eps) + corner_angle(-x, -y, -z, eps) +
                       corner_angle(x, y, z, eps) + corner_angle(x, y, -z, eps) +
                       corner_angle(x, -y, z, eps) + corner_angle(x, -y, -z, eps));
    return {bx, by, bz};
}

void CuboidMagnet::validate() const {
    if (!(side_length > 0.0)) throw std::invalid_argument("CuboidMagnet: side_length must be > 0");
    if (!(magnetization > 0.0))
        throw std::invalid_argument("CuboidMagnet: magnetization must be > 0");
    if (polarity != 1 && polarity != -1)
        throw std::invalid_argument("CuboidMagnet: polarity must be +1 or -1");
}

Vec3 cuboid_field(const CuboidMagnet& magnet, const Vec3& r, const FieldOptions& opt) {
    magnet.validate();
    const double inv_d = 1.0 / magnet.side_length;
    const Vec3 local = (r - magnet.center) * inv_d;
    const double scale =
        constants::mu0 * magnet.magnetization * static_cast<double>(magnet.polarity);
    return scale * unit_cube_field(local, opt);
}

std::array<CuboidMagnet, 4> MagnetArraySpec::magnets() const {
    const double d = magnet_side;
    std::array<CuboidMagnet, 4> out;
    int idx = 0;
    for (double sx : {-0.5, 0.5}) {
        for (double sy : {-0.5, 0.5}) {
            out[idx].side_length = d;
            out[idx].magnetization = magnetization;
            out[idx].center = {sx * d, sy * d, -0.5 * d};
            out[idx].polarity = (sx * sy > 0.0) ? +1 : -1;
            ++idx;
        }
    }
    return out;
}

void MagnetArraySpec::validate() const {
    if (!(magnet_side > 0.0)) throw std::invalid_argument("MagnetArraySpec: magnet_side must be > 0");
    if (!(magnetization > 0.0))
        throw std::invalid_argument("MagnetArraySpec: magnetization must be > 0");
}

Vec3 array_field(const MagnetArraySpec& spec, const Vec3& r, const FieldOptions& opt) {
    spec.validate();
    Vec3 total;
    for (const auto& magnet : spec.magnets()) {
        total += cuboid_field(magnet, r, opt);
    }
    return total;
}

Vec3 array_field_nd(const Vec3& r, const FieldOptions& opt) {
    Vec3 total;
    for (double sx : {-0.5, 0.5}) {
        for (double sy : {-0.5, 0.5}) {
            const double pol = (sx * sy > 0.0) ? 1.0 : -1.0;
            total += pol * unit_cube_field({r.x - sx, r.y - sy, r.z + 0.5}, opt);
        }
    }
    return total;
}

std::vector<FieldSample> field_map(const MagnetArraySpec& spec, const FieldGrid& grid,
                                   FieldUnits units, const FieldOptions& opt, int jobs) {
    spec.validate();
    if (grid.size() == 0) throw std::invalid_argument("field_map: empty grid");

    std::vector<FieldSample> samples(grid.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    parallel_for(grid.size(), jobs, [&](std::size_t linear) {
        const std::size_t iz = linear % grid.nz;
        const std::size_t iy = (linear / grid.nz) % grid.ny;
        const std::size_t ix = linear / (grid.nz * grid.ny);
        const Vec3 p = grid.point(ix, iy, iz);
        FieldSample s;
        s.position = p;
        s.units = units;
        try {
            s.field = (units == FieldUnits::si)
                          ? array_field(spec, p, opt)
                          : array_field_nd(p, opt);
        } catch (const EdgeSingularity&) {
            s.field = {nan, nan, nan};
            s.singular = true;
        }
        samples[linear] = s;
    });
    return samples;
}

}  // namespace levkit::magnetics
