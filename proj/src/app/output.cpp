#include "qre/app/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace qre::app {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::ofstream open_for_write(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path.string() + "'");
    return out;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out = open_for_write(path);
    out << j.dump(2) << '\n';
}

} // namespace

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

json matrix_json(const CMatrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(row);
    }
    return rows;
}

CMatrix matrix_from_json(const json& j, const char* what) {
    auto bad = [what]() { return Error(ErrorCode::ConfigError, std::string("malformed matrix '") + what + "'"); };
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw bad();
    const auto rows = static_cast<Index>(j.size());
    const auto cols = static_cast<Index>(j[0].size());
    CMatrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw bad();
        for (Index c = 0; c < cols; ++c) {
            const json& e = row[static_cast<std::size_t>(c)];
            if (e.is_number()) {
                m(r, c) = e.get<double>();
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
            } else {
                throw bad();
            }
        }
    }
    if (!all_finite(m)) throw bad();
    return m;
}

json estimator_json(const Design& d) {
    const Estimator& e = d.estimator;
    json j;
    j["label"]             = d.label;
    j["A_K"]               = matrix_json(e.A_K);
    j["B_K"]               = matrix_json(e.B_K);
    j["C_K"]               = matrix_json(e.C_K);
    j["S"]                 = matrix_json(e.S);
    j["gamma"]             = e.gamma;
    j["eps1"]              = e.eps1;
    j["eps2"]              = e.eps2;
    j["gain_convention"]   = std::string(to_string(e.options.gain));
    j["x_residual"]        = e.x_residual;
    j["y_residual"]        = e.y_residual;
    j["x_care_residual"]   = e.X.residual;
    j["y_care_residual"]   = e.Y.residual;
    j["coupling_norm"]     = e.coupling_norm;
    j["spectral_abscissa"] = e.spectral_abscissa;
    j["stable"]            = e.stable;
    j["physically_realizable"] = d.physically_realizable;
    return j;
}

void write_estimator_file(const fs::path& path, const DesignSet& set) {
    json j;
    j["topology"] = std::string(to_string(set.topology));
    j["primary"]  = set.primary().label;
    json list     = json::array();
    for (const Design* d : set.all()) list.push_back(estimator_json(*d));
    j["estimators"] = list;
    write_json(path, j);
}

void load_estimator_file(const fs::path& path, DesignSet& set) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open estimator file '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, "invalid JSON in '" + path.string() + "': " + e.what());
    }
    if (!j.contains("estimators") || !j.at("estimators").is_array())
        throw Error(ErrorCode::ConfigError, "estimator file needs an 'estimators' list");
    for (const json& e : j.at("estimators")) {
        if (!e.contains("label") || !e.at("label").is_string())
            throw Error(ErrorCode::ConfigError, "estimator entry without a label");
        Design* d = set.find(e.at("label").get<std::string>());
        if (!d) continue;
        for (const char* key : {"A_K", "B_K", "C_K"})
            if (!e.contains(key)) throw Error(ErrorCode::ConfigError, std::string("estimator entry misses ") + key);
        Estimator& est = d->estimator;
        est.A_K = matrix_from_json(e.at("A_K"), "A_K");
        est.B_K = matrix_from_json(e.at("B_K"), "B_K");
        est.C_K = matrix_from_json(e.at("C_K"), "C_K");
        if (e.contains("S")) est.S = matrix_from_json(e.at("S"), "S");
        est.spectral_abscissa = spectral_abscissa(est.A_K);
        est.stable            = est.spectral_abscissa < 0.0;
    }
}

void write_bode_csv(const fs::path& path, const std::vector<BodeCurve>& curves) {
    std::ofstream out = open_for_write(path);
    out << "omega_rad_s,mag_abs,mag_db,label\n";
    for (const BodeCurve& c : curves) {
        for (std::size_t i = 0; i < c.omegas.size(); ++i) {
            const double mag = c.magnitudes[i];
            out << format_number(c.omegas[i]) << ',' << format_number(mag) << ','
                << format_number(20.0 * std::log10(mag)) << ',' << c.label << '\n';
        }
    }
}

void write_sweep_csv(const fs::path& path, const SweepTable& t) {
    std::ofstream out = open_for_write(path);
    out << "delta,hinf_classical,hinf_coherent\n";
    const bool coh = t.coherent.has_value();
    for (std::size_t i = 0; i < t.classical.deltas.size(); ++i) {
        out << format_number(t.classical.deltas[i]) << ',' << format_number(t.classical.norms[i]) << ',';
        if (coh) out << format_number(t.coherent->norms[i]);
        out << '\n';
    }
    auto summary = [&](const char* name, auto reduce) {
        out << name << ',' << format_number(reduce(t.classical.norms)) << ',';
        if (coh) out << format_number(reduce(t.coherent->norms));
        out << '\n';
    };
    summary("max", [](const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); });
    summary("min", [](const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); });
    summary("spread", [](const std::vector<double>& v) { return spread(v); });
}

void write_meta(const fs::path& path, const RunConfig& cfg, const std::string& command, const json& extra) {
    json j;
    j["tool"]    = "qre";
    j["version"] = kToolVersion;
    j["command"] = command;
    j["config"]  = to_json(cfg);
    j["grids"]   = {{"frequency_rad_s", cfg.frequency_grid()}, {"delta", cfg.sweep_grid()}};
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    write_json(path, j);
}

} // namespace qre::app
