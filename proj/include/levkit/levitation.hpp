#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "levkit/magnetics.hpp"

namespace levkit::levitation {

/// A quadrature node landed inside a field exclusion zone.
struct QuadratureDivergence : std::runtime_error {
    explicit QuadratureDivergence(const std::string& what) : std::runtime_error(what) {}
};

/// The coarse scan's minimum sits on the search-box boundary.
struct NoMinimumInBox : std::runtime_error {
    explicit NoMinimumInBox(const std::string& what) : std::runtime_error(what) {}
};

/// Thin square plate with a diagonal (anisotropic) susceptibility tensor.
/// The model assumes in-plane isotropy: chi_x == chi_y.
struct PlateSpec {
    double side_length = 0.0;  ///< L [m]
    double thickness = 0.0;    ///< delta [m]
    double density = 0.0;      ///< rho [kg/m^3]
    double chi_x = 0.0;        ///< dimensionless, <= 0
    double chi_y = 0.0;
    double chi_z = 0.0;
    void validate() const;
};

struct PlateConfiguration {
    double height = 0.0;    ///< center-of-mass height above the magnet top surface [m]
    double rotation = 0.0;  ///< about the vertical axis [rad]; 0 = aligned with the magnets
};

/// Scales that reduce the potential to the dimensionless form
///   U_nd = strength * U_B_nd + effective_gravity * L_nd^2 * z_nd.
struct NondimensionalScales {
    double energy_scale = 0.0;       ///< |chi_z0| mu0 M^2 delta D^2 [J]
    double effective_gravity = 0.0;  ///< rho g D / (mu0 M^2 |chi_z0|)
    double strength = 0.0;           ///< chi_z / chi_z0 (1 for the reference material)
    double chi_ratio_xy = 0.0;       ///< chi_xy / chi_z
    double chi_z_reference = 0.0;    ///< chi_z0, the reference out-of-plane susceptibility

    static NondimensionalScales from(const PlateSpec& plate, const magnetics::MagnetArraySpec& array,
                                     double chi_z_reference = -450e-6);
};

struct EnergyOptions {
    int quad_order = 32;             ///< Gauss-Legendre points per axis on the footprint
    bool through_thickness = false;  ///< 3-point thickness quadrature instead of mid-plane
    magnetics::FieldOptions field;
};

/// Magnetic potential energy of the plate over the array [J], thin-plate
/// approximation (field sampled at mid-thickness unless through_thickness).
double magnetic_energy(const PlateSpec& plate, const PlateConfiguration& config,
                       const magnetics::MagnetArraySpec& array, const EnergyOptions& opt = {});

/// rho L^2 delta g z, independent of orientation.
double gravitational_energy(const PlateSpec& plate, double height);

double total_energy(const PlateSpec& plate, const PlateConfiguration& config,
                    const magnetics::MagnetArraySpec& array, const EnergyOptions& opt = {});

/// Dimensionless magnetic energy of a unit-frame plate (positive-sign
/// convention; the susceptibility ratio is positive for diamagnets).
double dimensionless_magnetic_energy(double length_nd, double height_nd, double rotation,
                                     double chi_ratio_xy, const EnergyOptions& opt = {});

/// U_nd = strength * U_B_nd + effective_gravity * length_nd^2 * height_nd.
/// Independent of the plate thickness by construction.
double dimensionless_energy(double length_nd, double height_nd, double rotation,
                            const NondimensionalScales& scales, const EnergyOptions& opt = {});

struct SearchBox {
    double height_lo = 0.01;
    double height_hi = 0.6;
    double rotation_lo = -0.39269908169872414;  // -pi/8
    double rotation_hi = 1.9634954084936207;    // pi/2 + pi/8
};

struct Equilibrium {
    double height_nd = 0.0;   ///< z* / D
    double rotation = 0.0;    ///< phi* in the canonical branch [0, pi/2)
    double energy_nd = 0.0;   ///< U_nd at the minimum
};

struct EquilibriumOptions {
    EnergyOptions energy;
    int coarse_height_steps = 25;
    int coarse_rotation_steps = 33;
    double height_tol = 1e-4;
    double rotation_tol = 1e-3;
};

/// Grid scan over the box followed by alternating golden-section refinement
/// per axis. Throws NoMinimumInBox if the coarse minimum lies on the boundary.
Equilibrium equilibrium(const NondimensionalScales& scales, double length_nd,
                        const SearchBox& box = {}, const EquilibriumOptions& opt = {});

struct EnergyLandscape {
    std::vector<double> height_nd;  ///< strictly increasing
    std::vector<double> rotation;   ///< strictly increasing
    std::vector<double> values;     ///< row-major, rotation index fastest
    double length_nd = 0.0;
    int quad_order = 0;
    std::string material;

    double at(std::size_t iz, std::size_t iphi) const {
        return values[iz * rotation.size() + iphi];
    }
};

EnergyLandscape landscape(const NondimensionalScales& scales, double length_nd,
                          double height_lo, double height_hi, std::size_t height_steps,
                          double rotation_lo, double rotation_hi, std::size_t rotation_steps,
                          const EnergyOptions& opt = {}, int jobs = 1);

/// Orientation average for randomly oriented grains:
/// chi_eff = chi_perpendicular/3 + 2*chi_parallel/3.
double effective_susceptibility(double chi_parallel, double chi_perpendicular);

/// Maps an angle to [0, pi/2), the fundamental domain of the array symmetry.
double canonical_rotation(double rotation);

}  // namespace levkit::levitation
