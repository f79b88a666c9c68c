#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "levkit/dynamics.hpp"
#include "levkit/levitation.hpp"
#include "levkit/magnetics.hpp"
#include "levkit/signal.hpp"

namespace levkit::io {

/// FNV-1a hash of the canonical JSON dump, as a hex string. Stamped into
/// every output file for provenance ("# config_hash=..." comment line in
/// CSVs, "config_hash" field in JSON documents).
std::string config_hash(const nlohmann::json& config);

/// All CSVs are UTF-8, LF line endings, '.' decimal separator regardless of
/// locale; readers skip leading '#' comment lines.

void write_field_map_csv(const std::string& path,
                         const std::vector<magnetics::FieldSample>& samples,
                         const std::string& hash = {});

void write_landscape_csv(const std::string& path, const levitation::EnergyLandscape& landscape,
                         const std::string& hash = {});

/// Columns t,x[,v]; metadata (sample rate, seed, params) goes to the JSON
/// sidecar `<path>.json`.
void write_trajectory_csv(const std::string& path, const dynamics::Trajectory& traj,
                          const std::string& hash = {},
                          const nlohmann::json& sidecar_extra = {});
dynamics::Trajectory read_trajectory_csv(const std::string& path);

void write_spectrum_csv(const std::string& path, const signal::Spectrum& spectrum,
                        const std::string& hash = {});
signal::Spectrum read_spectrum_csv(const std::string& path);

/// Coefficients in a one-column CSV; design metadata in `<path>.json`.
void write_filter(const std::string& csv_path, const signal::FirFilter& filter,
                  const std::string& hash = {});
signal::FirFilter read_filter(const std::string& csv_path);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::string& path);

}  // namespace levkit::io
