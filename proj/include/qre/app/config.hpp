#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "qre/hinf_synth.hpp"
#include "qre/linalg.hpp"

namespace qre::app {

enum class RunTopology {
    classical,
    coherent_classical,
    classical_fb,
    coherent_classical_fb,
};

[[nodiscard]] std::string_view to_string(RunTopology t) noexcept;
[[nodiscard]] bool uses_feedback(RunTopology t) noexcept;
[[nodiscard]] bool uses_controller(RunTopology t) noexcept;

// Single-mode squeezer parameters. `kappa2` is only meaningful for the
// feedback plant/controller, where `kappa` plays the role of kappa1.
struct SqueezerParams {
    double  beta   = 0.0;
    double  kappa  = 0.0;
    double  kappa2 = 0.0;
    Complex chi    = 0.0;
};

struct GridSpec {
    double      lo = 0.0;
    double      hi = 0.0;
    std::size_t n  = 0;
};

struct RunConfig {
    std::string                   name = "custom";
    RunTopology                   topology = RunTopology::classical;
    SqueezerParams                plant;
    std::vector<double>           estimand; // L row
    std::optional<SqueezerParams> controller;
    std::vector<double>           homodyne_rad;
    double                        mu           = 0.0;
    double                        delta_design = -1.0;
    double                        gamma        = 0.0;
    double                        eps1         = 0.0;
    double                        eps2         = 0.0;
    BkScaling                     gain         = BkScaling::inverse_gamma_squared;
    bool                          strict_pr    = false;
    GridSpec                      frequency{1e-2, 1e2, 400};
    GridSpec                      sweep{-1.0, 1.0, 21};

    [[nodiscard]] std::vector<double> frequency_grid() const;
    [[nodiscard]] std::vector<double> sweep_grid() const;
};

// All parse and range failures throw Error(ConfigError).
[[nodiscard]] RunConfig parse_config(const nlohmann::json& j);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

// Inverse of parse_config; angles are written back in degrees.
[[nodiscard]] nlohmann::json to_json(const RunConfig& cfg);

// fig3/fig4: single-input squeezer with a squeezer controller.
// fig6/fig7: squeezer with coherent feedback.
[[nodiscard]] std::optional<RunConfig> preset(std::string_view name);
[[nodiscard]] const std::vector<std::string>& preset_names();

} // namespace qre::app
