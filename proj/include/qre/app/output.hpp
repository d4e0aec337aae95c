#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "qre/app/config.hpp"
#include "qre/app/pipeline.hpp"

namespace qre::app {

inline constexpr const char* kToolVersion = "0.3.0";

// Nested rows of [re, im] pairs.
[[nodiscard]] nlohmann::json matrix_json(const CMatrix& m);
// Throws Error(ConfigError) on malformed input.
[[nodiscard]] CMatrix matrix_from_json(const nlohmann::json& j, const char* what);

[[nodiscard]] nlohmann::json estimator_json(const Design& d);

void write_estimator_file(const std::filesystem::path& path, const DesignSet& set);

// Replaces A_K, B_K, C_K (and S when present) of every design whose label
// appears in the file.
void load_estimator_file(const std::filesystem::path& path, DesignSet& set);

// omega_rad_s,mag_abs,mag_db,label
void write_bode_csv(const std::filesystem::path& path, const std::vector<BodeCurve>& curves);

// delta,hinf_classical,hinf_coherent followed by max/min/spread rows.
void write_sweep_csv(const std::filesystem::path& path, const SweepTable& table);

// Config, grids and tool version; `extra` is merged at the top level.
void write_meta(const std::filesystem::path& path, const RunConfig& cfg, const std::string& command,
                const nlohmann::json& extra = nlohmann::json::object());

[[nodiscard]] std::string format_number(double x);

} // namespace qre::app
