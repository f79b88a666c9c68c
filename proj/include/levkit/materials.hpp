#pragma once

#include <string>
#include <vector>

#include "levkit/levitation.hpp"

namespace levkit::levitation {

struct MaterialPreset {
    std::string name;
    PlateSpec plate;
    std::string notes;
};

/// Built-in presets:
///   hopg_supp               pyrolytic graphite, rho 2700 (default HOPG)
///   hopg_main               pyrolytic graphite, rho 2070 (the other printed value)
///   composite               silica-coated graphite/wax, chi -120e-6 isotropic
///   composite_measured      powder-VSM susceptibility -218e-6 isotropic
///   composite_volume_frac   volume-fraction estimate -90.2e-6 isotropic
///   composite_equal_density composite susceptibility at HOPG density
const std::vector<MaterialPreset>& builtin_materials();

/// Looks the name up in $LEVKIT_CONFIG_DIR/materials.json when set, then in
/// the built-ins. Throws std::invalid_argument for unknown names.
MaterialPreset find_material(const std::string& name);

std::vector<MaterialPreset> load_materials_json(const std::string& path);
void write_materials_json(const std::string& path, const std::vector<MaterialPreset>& presets);

}  // namespace levkit::levitation
