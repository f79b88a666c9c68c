#include "oracles.hpp"

#include <cmath>

#include "levkit/constants.hpp"

namespace levkit::testing {

Vec3 dipole_grid_field(const Vec3& r, int n) {
    const double cell_moment = 1.0 / (static_cast<double>(n) * n * n);
    const double pref = cell_moment / (4.0 * constants::pi);
    Vec3 total;
    for (int i = 0; i < n; ++i) {
        const double cx = (i + 0.5) / n - 0.5;
        for (int j = 0; j < n; ++j) {
            const double cy = (j + 0.5) / n - 0.5;
            for (int k = 0; k < n; ++k) {
                const double cz = (k + 0.5) / n - 0.5;
                const double dx = r.x - cx;
                const double dy = r.y - cy;
                const double dz = r.z - cz;
                const double d2 = dx * dx + dy * dy + dz * dz;
                const double inv_d = 1.0 / std::sqrt(d2);
                const double inv_d3 = inv_d * inv_d * inv_d;
                const double mu = dz * inv_d;  // cos(angle to z)
                total.x += pref * inv_d3 * 3.0 * mu * dx * inv_d;
                total.y += pref * inv_d3 * 3.0 * mu * dy * inv_d;
                total.z += pref * inv_d3 * (3.0 * mu * dz * inv_d - 1.0);
            }
        }
    }
    return total;
}

double TestRng::uniform(double lo, double hi) {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    const double u = static_cast<double>(z >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

}  // namespace levkit::testing
