#include "levkit/materials.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace levkit::levitation {

namespace {

MaterialPreset make(const std::string& name, double side, double thick, double rho, double chi_xy,
                    double chi_z, const std::string& notes) {
    MaterialPreset p;
    p.name = name;
    p.plate = PlateSpec{side, thick, rho, chi_xy, chi_xy, chi_z};
    p.notes = notes;
    return p;
}

}  // namespace

const std::vector<MaterialPreset>& builtin_materials() {
    static const std::vector<MaterialPreset> presets = {
        make("hopg_supp", 12.4e-3, 0.7e-3, 2700.0, -85e-6, -450e-6,
             "pyrolytic graphite; both printed densities kept as presets, this one is the "
             "landscape default"),
        make("hopg_main", 12.4e-3, 0.7e-3, 2070.0, -85e-6, -450e-6,
             "pyrolytic graphite at the lower printed density"),
        make("composite", 7.9e-3, 0.53e-3, 1442.0, -120e-6, -120e-6,
             "coated-graphite/wax composite, isotropic susceptibility"),
        make("composite_measured", 7.9e-3, 0.53e-3, 1442.0, -218e-6, -218e-6,
             "isotropic susceptibility from the powder VSM measurement"),
        make("composite_volume_frac", 7.9e-3, 0.53e-3, 1442.0, -90.2e-6, -90.2e-6,
             "isotropic susceptibility from the volume-fraction estimate"),
        make("composite_equal_density", 7.9e-3, 0.53e-3, 2700.0, -120e-6, -120e-6,
             "composite susceptibility at pyrolytic-graphite density, for the "
             "magnetics-only comparison"),
    };
    return presets;
}

std::vector<MaterialPreset> load_materials_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open materials file: " + path);
    nlohmann::json doc = nlohmann::json::parse(in);
    if (!doc.is_array()) throw std::invalid_argument("materials file must be a JSON array");

    std::vector<MaterialPreset> out;
    for (const auto& item : doc) {
        MaterialPreset p;
        p.name = item.at("name").get<std::string>();
        p.plate.side_length = item.at("side_length_m").get<double>();
        p.plate.thickness = item.at("thickness_m").get<double>();
        p.plate.density = item.at("density_kg_m3").get<double>();
        p.plate.chi_x = item.at("chi_x").get<double>();
        p.plate.chi_y = item.at("chi_y").get<double>();
        p.plate.chi_z = item.at("chi_z").get<double>();
        if (item.contains("notes")) p.notes = item["notes"].get<std::string>();
        p.plate.validate();
        out.push_back(std::move(p));
    }
    return out;
}

void write_materials_json(const std::string& path, const std::vector<MaterialPreset>& presets) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& p : presets) {
        doc.push_back({{"name", p.name},
                       {"side_length_m", p.plate.side_length},
                       {"thickness_m", p.plate.thickness},
                       {"density_kg_m3", p.plate.density},
                       {"chi_x", p.plate.chi_x},
                       {"chi_y", p.plate.chi_y},
                       {"chi_z", p.plate.chi_z},
                       {"notes", p.notes}});
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write materials file: " + path);
    out << doc.dump(2) << "\n";
}

MaterialPreset find_material(const std::string& name) {
    if (const char* dir = std::getenv("LEVKIT_CONFIG_DIR")) {
        const auto path = std::filesystem::path(dir) / "materials.json";
        if (std::filesystem::exists(path)) {
            for (const auto& p : load_materials_json(path.string())) {
                if (p.name == name) return p;
            }
        }
    }
    for (const auto& p : builtin_materials()) {
        if (p.name == name) return p;
    }
    throw std::invalid_argument("unknown material preset: " + name);
}

}  // namespace levkit::levitation
