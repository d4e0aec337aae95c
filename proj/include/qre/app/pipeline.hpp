#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qre/analysis.hpp"
#include "qre/app/config.hpp"
#include "qre/hinf_synth.hpp"

namespace qre::app {

// A synthesized estimator together with the (uncertain) system it observes.
struct Design {
    std::string      label; // "classical" or "coherent"
    Estimator        estimator;
    CMatrix          A, B, C, D, L;
    UncertaintyModel uncertainty;
    bool             physically_realizable = false;

    // Closed-loop disturbance-to-error system for the A-field channel.
    [[nodiscard]] StateSpace error_system(double delta) const;
};

struct DesignSet {
    Design                classical;
    std::optional<Design> coherent;
    RunTopology           topology = RunTopology::classical;

    [[nodiscard]] const Design& primary() const { return coherent ? *coherent : classical; }
    [[nodiscard]] std::vector<const Design*> all() const;
    [[nodiscard]] Design* find(const std::string& label);
};

[[nodiscard]] SynthesisOptions synthesis_options(const RunConfig& cfg, bool require_stable);

// Classical filter for the plant alone; coherent filter for plant + controller
// whenever the config carries controller parameters.
[[nodiscard]] DesignSet synthesize_designs(const RunConfig& cfg, const SynthesisOptions& opts);

struct BodeCurve {
    std::string         label;
    std::vector<double> omegas;
    std::vector<double> magnitudes;
    PeakGain            peak;
};

[[nodiscard]] BodeCurve bode_curve(const Design& d, double delta, const std::vector<double>& omegas,
                                   NormKind kind, double rel_tol);

struct SweepTable {
    SweepResult                classical;
    std::optional<SweepResult> coherent;
};

[[nodiscard]] SweepTable sweep_designs(const DesignSet& set, const std::vector<double>& deltas, NormKind kind,
                                       double rel_tol);

// max - min over a sweep column.
[[nodiscard]] double spread(const std::vector<double>& v);

} // namespace qre::app
