#include "levkit/levitation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "levkit/constants.hpp"
#include "levkit/parallel.hpp"
#include "levkit/quadrature.hpp"

namespace levkit::levitation {

namespace {

using quadrature::gauss_legendre;

// Tensor-product Gauss-Legendre over the rotated square footprint.
// `field` evaluates the (dimensionless or SI) array field at a 3D point.
double footprint_integral(double side, double height, double rotation, double chi_ratio_xy,
                          const EnergyOptions& opt,
                          const std::function<Vec3(const Vec3&)>& field, double thickness) {
    const auto rule = gauss_legendre(opt.quad_order);
    const double half = 0.5 * side;
    const double cos_phi = std::cos(rotation);
    const double sin_phi = std::sin(rotation);

    // Through-thickness sampling: mid-plane by default, 3-point Gauss otherwise.
    std::vector<double> z_nodes{height};
    std::vector<double> z_weights{1.0};
    if (opt.through_thickness) {
        const double h = 0.5 * thickness * std::sqrt(3.0 / 5.0);
        z_nodes = {height - h, height, height + h};
        z_weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    }

    double total = 0.0;
    try {
        for (std::size_t iz = 0; iz < z_nodes.size(); ++iz) {
            double plane = 0.0;
            for (int i = 0; i < opt.quad_order; ++i) {
                const double s = half * rule.nodes[i];
                for (int j = 0; j < opt.quad_order; ++j) {
                    const double t = half * rule.nodes[j];
                    const Vec3 p{cos_phi * s - sin_phi * t, sin_phi * s + cos_phi * t,
                                 z_nodes[iz]};
                    const Vec3 b = field(p);
                    plane += rule.weights[i] * rule.weights[j] *
                             (chi_ratio_xy * (b.x * b.x + b.y * b.y) + b.z * b.z);
                }
            }
            total += z_weights[iz] * plane;
        }
    } catch (const magnetics::EdgeSingularity& e) {
        throw QuadratureDivergence(std::string("quadrature node hit a field singularity: ") +
                                   e.what());
    }
    return total * half * half;
}

}  // namespace

void PlateSpec::validate() const {
    if (!(side_length > 0.0) || !(thickness > 0.0) || !(density > 0.0)) {
        throw std::invalid_argument("PlateSpec: side_length, thickness, density must be > 0");
    }
    if (chi_x > 0.0 || chi_y > 0.0 || chi_z > 0.0) {
        throw std::invalid_argument("PlateSpec: susceptibilities must be <= 0 (diamagnet)");
    }
    if (chi_x != chi_y) {
        throw std::invalid_argument("PlateSpec: model assumes chi_x == chi_y");
    }
}

NondimensionalScales NondimensionalScales::from(const PlateSpec& plate,
                                                const magnetics::MagnetArraySpec& array,
                                                double chi_z_reference) {
    plate.validate();
    array.validate();
    if (!(chi_z_reference < 0.0)) {
        throw std::invalid_argument("NondimensionalScales: chi_z_reference must be < 0");
    }
    const double mu0_m2 = constants::mu0 * array.magnetization * array.magnetization;
    const double abs_ref = std::abs(chi_z_reference);

    NondimensionalScales s;
    s.chi_z_reference = chi_z_reference;
    s.energy_scale = abs_ref * mu0_m2 * plate.thickness * array.magnet_side * array.magnet_side;
    s.effective_gravity =
        plate.density * constants::g_standard * array.magnet_side / (mu0_m2 * abs_ref);
    s.strength = plate.chi_z / chi_z_reference;
    s.chi_ratio_xy = plate.chi_x / plate.chi_z;
    return s;
}

double magnetic_energy(const PlateSpec& plate, const PlateConfiguration& config,
                       const magnetics::MagnetArraySpec& array, const EnergyOptions& opt) {
    plate.validate();
    array.validate();
    if (!(config.height > 0.5 * plate.thickness)) {
        throw std::invalid_argument("magnetic_energy: plate must sit fully above the magnets");
    }
    if (opt.quad_order < 2) {
        throw std::invalid_argument("magnetic_energy: quad_order must be >= 2");
    }
    const double chi_ratio = plate.chi_x / plate.chi_z;  // both negative -> positive ratio
    const double integral = footprint_integral(
        plate.side_length, config.height, config.rotation, chi_ratio, opt,
        [&](const Vec3& p) { return array_field(array, p, opt.field); }, plate.thickness);
    // -(delta / 2 mu0) * integral of [chi_xy (Bx^2+By^2) + chi_z Bz^2]
    // with the chi_z factored out of the integrand above.
    return -(plate.thickness / (2.0 * constants::mu0)) * plate.chi_z * integral;
}

double gravitational_energy(const PlateSpec& plate, double height) {
    plate.validate();
    return plate.density * plate.side_length * plate.side_length * plate.thickness *
           constants::g_standard * height;
}

double total_energy(const PlateSpec& plate, const PlateConfiguration& config,
                    const magnetics::MagnetArraySpec& array, const EnergyOptions& opt) {
    return magnetic_energy(plate, config, array, opt) +
           gravitational_energy(plate, config.height);
}

double dimensionless_magnetic_energy(double length_nd, double height_nd, double rotation,
                                     double chi_ratio_xy, const EnergyOptions& opt) {
    if (!(height_nd > 0.0)) {
        throw std::invalid_argument("dimensionless_magnetic_energy: height must be > 0");
    }
    if (opt.quad_order < 2) {
        throw std::invalid_argument("dimensionless_magnetic_energy: quad_order must be >= 2");
    }
    const double integral = footprint_integral(
        length_nd, height_nd, rotation, chi_ratio_xy, opt,
        [&](const Vec3& p) { return magnetics::array_field_nd(p, opt.field); },
        /*thickness=*/0.0);
    return 0.5 * integral;
}

double dimensionless_energy(double length_nd, double height_nd, double rotation,
                            const NondimensionalScales& scales, const EnergyOptions& opt) {
    return scales.strength *
               dimensionless_magnetic_energy(length_nd, height_nd, rotation,
                                             scales.chi_ratio_xy, opt) +
           scales.effective_gravity * length_nd * length_nd * height_nd;
}

double canonical_rotation(double rotation) {
    const double period = 0.5 * constants::pi;
    double phi = std::fmod(rotation, period);
    if (phi < 0.0) phi += period;
    return phi;
}

namespace {

// Golden-section minimization on [lo, hi].
template <typename F>
double golden_min(F&& f, double lo, double hi, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

Equilibrium equilibrium(const NondimensionalScales& scales, double length_nd,
                        const SearchBox& box, const EquilibriumOptions& opt) {
    if (!(box.height_lo > 0.0) || !(box.height_hi > box.height_lo) ||
        !(box.rotation_hi > box.rotation_lo)) {
        throw std::invalid_argument("equilibrium: invalid search box");
    }
    const int nz = std::max(opt.coarse_height_steps, 4);
    const int nphi = std::max(opt.coarse_rotation_steps, 4);

    auto energy = [&](double z, double phi) {
        return dimensionless_energy(length_nd, z, phi, scales, opt.energy);
    };

    double best = std::numeric_limits<double>::infinity();
    int best_i = 0, best_j = 0;
    for (int i = 0; i < nz; ++i) {
        const double z = box.height_lo + (box.height_hi - box.height_lo) * i / (nz - 1.0);
        for (int j = 0; j < nphi; ++j) {
            const double phi =
                box.rotation_lo + (box.rotation_hi - box.rotation_lo) * j / (nphi - 1.0);
            const double u = energy(z, phi);
            if (u < best) {
                best = u;
                best_i = i;
                best_j = j;
            }
        }
    }
    if (best_i == 0 || best_i == nz - 1) {
        throw NoMinimumInBox("equilibrium: coarse minimum on the height boundary");
    }
    if (best_j == 0 || best_j == nphi - 1) {
        throw NoMinimumInBox("equilibrium: coarse minimum on the rotation boundary");
    }

    const double dz = (box.height_hi - box.height_lo) / (nz - 1.0);
    const double dphi = (box.rotation_hi - box.rotation_lo) / (nphi - 1.0);
    double z = box.height_lo + dz * best_i;
    double phi = box.rotation_lo + dphi * best_j;
    double wz = dz, wphi = dphi;

    // Alternate per-axis golden-section passes, shrinking the bracket.
    for (int pass = 0; pass < 30; ++pass) {
        const double z_prev = z, phi_prev = phi;
        z = golden_min([&](double zz) { return energy(zz, phi); },
                       std::max(box.height_lo, z - wz), std::min(box.height_hi, z + wz),
                       opt.height_tol * 0.5);
        phi = golden_min([&](double pp) { return energy(z, pp); },
                         std::max(box.rotation_lo, phi - wphi),
                         std::min(box.rotation_hi, phi + wphi), opt.rotation_tol * 0.5);
        wz = std::max(4.0 * std::abs(z - z_prev), 4.0 * opt.height_tol);
        wphi = std::max(4.0 * std::abs(phi - phi_prev), 4.0 * opt.rotation_tol);
        if (std::abs(z - z_prev) < opt.height_tol && std::abs(phi - phi_prev) < opt.rotation_tol) {
            break;
        }
    }

    Equilibrium eq;
    eq.height_nd = z;
    eq.rotation = canonical_rotation(phi);
    eq.energy_nd = energy(z, phi);
    return eq;
}

EnergyLandscape landscape(const NondimensionalScales& scales, double length_nd,
                          double height_lo, double height_hi, std::size_t height_steps,
                          double rotation_lo, double rotation_hi, std::size_t rotation_steps,
                          const EnergyOptions& opt, int jobs) {
    if (!(height_lo > 0.0) || !(height_hi > height_lo) || height_steps < 2 ||
        !(rotation_hi > rotation_lo) || rotation_steps < 2) {
        throw std::invalid_argument("landscape: invalid ranges");
    }
    EnergyLandscape out;
    out.length_nd = length_nd;
    out.quad_order = opt.quad_order;
    out.height_nd.resize(height_steps);
    out.rotation.resize(rotation_steps);
    for (std::size_t i = 0; i < height_steps; ++i) {
        out.height_nd[i] = height_lo + (height_hi - height_lo) * i / (height_steps - 1.0);
    }
    for (std::size_t j = 0; j < rotation_steps; ++j) {
        out.rotation[j] = rotation_lo + (rotation_hi - rotation_lo) * j / (rotation_steps - 1.0);
    }
    out.values.assign(height_steps * rotation_steps,
                      std::numeric_limits<double>::quiet_NaN());
    parallel_for(out.values.size(), jobs, [&](std::size_t linear) {
        const std::size_t i = linear / rotation_steps;
        const std::size_t j = linear % rotation_steps;
        try {
            out.values[linear] =
                dimensionless_energy(length_nd, out.height_nd[i], out.rotation[j], scales, opt);
        } catch (const QuadratureDivergence&) {
            // recorded per cell as NaN, the map is not aborted
        }
    });
    return out;
}

double effective_susceptibility(double chi_parallel, double chi_perpendicular) {
    if (chi_parallel > 0.0 || chi_perpendicular > 0.0) {
        throw std::invalid_argument("effective_susceptibility: inputs must be <= 0");
    }
    return chi_perpendicular / 3.0 + 2.0 * chi_parallel / 3.0;
}

}  // namespace levkit::levitation
