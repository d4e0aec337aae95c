#include "qre/app/config.hpp"

#include "qre/analysis.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace qre::app {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

constexpr double kDeg = std::numbers::pi / 180.0;

const json& field(const json& j, const char* key) {
    if (!j.contains(key)) fail(std::string("missing field '") + key + "'");
    return j.at(key);
}

double number(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number()) fail(std::string("field '") + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(std::string("field '") + key + "' is not finite");
    return x;
}

double number_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? number(j, key) : fallback;
}

// A complex value is either a number or a [re, im] pair.
Complex complex_value(const json& v, const char* key) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    fail(std::string("field '") + key + "' must be a number or [re, im]");
}

std::vector<double> number_list(const json& v, const char* key) {
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array() || v.empty()) fail(std::string("field '") + key + "' must be a non-empty list of numbers");
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number()) fail(std::string("field '") + key + "' must contain numbers only");
        out.push_back(e.get<double>());
    }
    return out;
}

RunTopology parse_topology(const std::string& s) {
    if (s == "classical") return RunTopology::classical;
    if (s == "coherent_classical") return RunTopology::coherent_classical;
    if (s == "classical_fb") return RunTopology::classical_fb;
    if (s == "coherent_classical_fb") return RunTopology::coherent_classical_fb;
    fail("unknown topology '" + s + "'");
}

SqueezerParams parse_squeezer(const json& j, bool feedback, const char* what) {
    if (!j.is_object()) fail(std::string(what) + " must be an object");
    SqueezerParams p;
    p.beta = number(j, "beta");
    if (feedback) {
        p.kappa  = number(j, "kappa1");
        p.kappa2 = number(j, "kappa2");
        if (p.kappa < 0.0 || p.kappa2 < 0.0) fail(std::string(what) + ": kappa1, kappa2 must be >= 0");
    } else {
        p.kappa = number(j, "kappa");
        if (!(p.kappa > 0.0)) fail(std::string(what) + ": kappa must be > 0");
    }
    if (!(p.beta > 0.0)) fail(std::string(what) + ": beta must be > 0");
    p.chi = j.contains("chi") ? complex_value(j.at("chi"), "chi") : Complex{};
    return p;
}

GridSpec parse_grid(const json& j, const char* what, GridSpec fallback) {
    if (!j.is_object()) fail(std::string(what) + " must be an object");
    GridSpec g;
    g.lo = number_or(j, "lo", fallback.lo);
    g.hi = number_or(j, "hi", fallback.hi);
    if (j.contains("n")) {
        if (!j.at("n").is_number_integer() || j.at("n").get<long long>() < 1)
            fail(std::string(what) + ".n must be a positive integer");
        g.n = j.at("n").get<std::size_t>();
    } else {
        g.n = fallback.n;
    }
    if (g.hi < g.lo) fail(std::string(what) + ": hi < lo");
    return g;
}

json squeezer_json(const SqueezerParams& p, bool feedback) {
    json j;
    j["beta"] = p.beta;
    if (feedback) {
        j["kappa1"] = p.kappa;
        j["kappa2"] = p.kappa2;
    } else {
        j["kappa"] = p.kappa;
    }
    j["chi"] = json::array({p.chi.real(), p.chi.imag()});
    return j;
}

RunConfig squeezer_setup(std::string name) {
    RunConfig c;
    c.name         = std::move(name);
    c.topology     = RunTopology::coherent_classical;
    c.plant        = {4.0, 4.0, 0.0, 0.5};
    c.estimand     = {0.1, -0.1};
    c.controller   = SqueezerParams{4.0, 4.0, 0.0, -1.0};
    c.homodyne_rad = {10.0 * kDeg};
    c.mu           = 0.1;
    c.delta_design = -1.0;
    c.gamma        = 0.65;
    c.eps1         = 0.19;
    c.eps2         = 0.81;
    return c;
}

RunConfig feedback_setup(std::string name) {
    RunConfig c;
    c.name         = std::move(name);
    c.topology     = RunTopology::coherent_classical_fb;
    c.plant        = {4.0, 2.0, 2.0, -1.0};
    c.estimand     = {0.1, -0.1};
    c.controller   = SqueezerParams{4.0, 2.0, 2.0, 0.5};
    c.homodyne_rad = {80.0 * kDeg};
    c.mu           = 0.1;
    c.delta_design = -1.0;
    c.gamma        = 0.65;
    c.eps1         = 0.2;
    c.eps2         = 0.6;
    return c;
}

} // namespace

std::string_view to_string(RunTopology t) noexcept {
    switch (t) {
        case RunTopology::classical: return "classical";
        case RunTopology::coherent_classical: return "coherent_classical";
        case RunTopology::classical_fb: return "classical_fb";
        case RunTopology::coherent_classical_fb: return "coherent_classical_fb";
    }
    return "?";
}

bool uses_feedback(RunTopology t) noexcept {
    return t == RunTopology::classical_fb || t == RunTopology::coherent_classical_fb;
}

bool uses_controller(RunTopology t) noexcept {
    return t == RunTopology::coherent_classical || t == RunTopology::coherent_classical_fb;
}

std::vector<double> RunConfig::frequency_grid() const {
    if (!(frequency.lo > 0.0)) fail("frequency grid needs lo > 0");
    return log_grid(frequency.lo, frequency.hi, frequency.n);
}

std::vector<double> RunConfig::sweep_grid() const { return linear_grid(sweep.lo, sweep.hi, sweep.n); }

RunConfig parse_config(const json& j) {
    if (!j.is_object()) fail("config must be a JSON object");
    RunConfig c;
    if (j.contains("name")) {
        if (!j.at("name").is_string()) fail("field 'name' must be a string");
        c.name = j.at("name").get<std::string>();
    }
    const json& topo = field(j, "topology");
    if (!topo.is_string()) fail("field 'topology' must be a string");
    c.topology = parse_topology(topo.get<std::string>());
    const bool fb = uses_feedback(c.topology);

    const json& plant = field(j, "plant");
    c.plant           = parse_squeezer(plant, fb, "plant");
    c.estimand        = plant.contains("L") ? number_list(plant.at("L"), "L") : std::vector<double>{0.1, -0.1};
    if (c.estimand.size() != 2) fail("plant.L must have 2 entries");

    if (j.contains("controller")) {
        c.controller = parse_squeezer(j.at("controller"), fb, "controller");
    } else if (uses_controller(c.topology)) {
        fail("topology '" + std::string(to_string(c.topology)) + "' needs a 'controller' block");
    }

    for (double deg : number_list(field(j, "homodyne_deg"), "homodyne_deg")) {
        if (!std::isfinite(deg)) fail("homodyne angle is not finite");
        c.homodyne_rad.push_back(deg * kDeg);
    }
    if (c.homodyne_rad.size() != 1) fail("homodyne_deg must hold one angle per output field (1)");

    c.mu = j.contains("uncertainty") ? number(j.at("uncertainty"), "mu") : 0.0;
    if (!(c.mu >= 0.0 && c.mu < 1.0)) fail("uncertainty.mu must lie in [0, 1)");
    c.delta_design = number_or(j, "delta_design", -1.0);
    if (std::abs(c.delta_design) > 1.0) fail("delta_design must lie in [-1, 1]");

    c.gamma = number(j, "gamma");
    c.eps1  = number(j, "eps1");
    c.eps2  = number(j, "eps2");
    if (!(c.gamma > 0.0 && c.eps1 > 0.0 && c.eps2 > 0.0)) fail("gamma, eps1, eps2 must be > 0");

    if (j.contains("gain_convention")) {
        const json& g = j.at("gain_convention");
        const auto parsed = g.is_string() ? parse_bk_scaling(g.get<std::string>()) : std::nullopt;
        if (!parsed) fail("gain_convention must be 'gamma_squared' or 'inverse_gamma_squared'");
        c.gain = *parsed;
    }
    if (j.contains("strict_pr")) {
        if (!j.at("strict_pr").is_boolean()) fail("strict_pr must be a boolean");
        c.strict_pr = j.at("strict_pr").get<bool>();
    }
    if (j.contains("frequency_grid")) c.frequency = parse_grid(j.at("frequency_grid"), "frequency_grid", c.frequency);
    if (!(c.frequency.lo > 0.0)) fail("frequency_grid.lo must be > 0");
    if (j.contains("sweep_grid")) c.sweep = parse_grid(j.at("sweep_grid"), "sweep_grid", c.sweep);
    if (c.sweep.lo < -1.0 || c.sweep.hi > 1.0) fail("sweep_grid must lie within [-1, 1]");
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail("invalid JSON in '" + path.string() + "': " + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& c) {
    const bool fb = uses_feedback(c.topology);
    json j;
    j["name"]     = c.name;
    j["topology"] = std::string(to_string(c.topology));
    j["plant"]    = squeezer_json(c.plant, fb);
    j["plant"]["L"] = c.estimand;
    if (c.controller) j["controller"] = squeezer_json(*c.controller, fb);
    json deg = json::array();
    for (double r : c.homodyne_rad) deg.push_back(r / kDeg);
    j["homodyne_deg"]    = deg;
    j["uncertainty"]     = {{"mu", c.mu}};
    j["delta_design"]    = c.delta_design;
    j["gamma"]           = c.gamma;
    j["eps1"]            = c.eps1;
    j["eps2"]            = c.eps2;
    j["gain_convention"] = std::string(to_string(c.gain));
    j["strict_pr"]       = c.strict_pr;
    j["frequency_grid"]  = {{"lo", c.frequency.lo}, {"hi", c.frequency.hi}, {"n", c.frequency.n}, {"spacing", "log"}};
    j["sweep_grid"]      = {{"lo", c.sweep.lo}, {"hi", c.sweep.hi}, {"n", c.sweep.n}, {"spacing", "linear"}};
    return j;
}

std::optional<RunConfig> preset(std::string_view name) {
    if (name == "fig3" || name == "fig4") return squeezer_setup(std::string(name));
    if (name == "fig6" || name == "fig7") return feedback_setup(std::string(name));
    return std::nullopt;
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fig3", "fig4", "fig6", "fig7"};
    return names;
}

} // namespace qre::app
