#include "qre/app/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "qre/augmentation.hpp"
#include "qre/quantum_model.hpp"
#include "qre/uncertainty.hpp"

namespace qre::app {

namespace {

CMatrix estimand_row(const RunConfig& cfg) {
    CMatrix l(1, static_cast<Index>(cfg.estimand.size()));
    for (std::size_t i = 0; i < cfg.estimand.size(); ++i) l(0, static_cast<Index>(i)) = cfg.estimand[i];
    return l;
}

Realizability mode(const RunConfig& cfg) { return cfg.strict_pr ? Realizability::strict : Realizability::permissive; }

QuantumPlant make_plant(const RunConfig& cfg) {
    const SqueezerParams& p = cfg.plant;
    if (uses_feedback(cfg.topology))
        return feedback_squeezer_plant(p.beta, p.kappa, p.kappa2, p.chi, estimand_row(cfg), mode(cfg));
    return squeezer_plant(p.beta, p.kappa, p.chi, estimand_row(cfg), mode(cfg));
}

CoherentController make_controller(const RunConfig& cfg) {
    const SqueezerParams& c = *cfg.controller;
    if (uses_feedback(cfg.topology))
        return feedback_squeezer_controller(c.beta, c.kappa, c.kappa2, c.chi, mode(cfg));
    return squeezer_controller(c.beta, c.kappa, c.chi, mode(cfg));
}

// dB acts on the disturbance columns only; the control input is not uncertain.
CMatrix padded_input_delta(const CMatrix& db, Index total_cols) {
    CMatrix out = zeros(db.rows(), total_cols);
    out.leftCols(db.cols()) = db;
    return out;
}

} // namespace

StateSpace Design::error_system(double delta) const {
    DeltaTriple d = evaluate_deltas(uncertainty, delta);
    d.dB          = padded_input_delta(d.dB, B.cols());
    return closed_loop_error_system(A, B, C, D, L, d, estimator, Channel::field(1));
}

std::vector<const Design*> DesignSet::all() const {
    std::vector<const Design*> out{&classical};
    if (coherent) out.push_back(&*coherent);
    return out;
}

Design* DesignSet::find(const std::string& label) {
    if (label == classical.label) return &classical;
    if (coherent && label == coherent->label) return &*coherent;
    return nullptr;
}

SynthesisOptions synthesis_options(const RunConfig& cfg, bool require_stable) {
    SynthesisOptions o;
    o.gain           = cfg.gain;
    o.require_stable = require_stable;
    return o;
}

DesignSet synthesize_designs(const RunConfig& cfg, const SynthesisOptions& opts) {
    const QuantumPlant     plant = make_plant(cfg);
    const double           alpha = std::sqrt(cfg.plant.kappa);
    const UncertaintyModel u     = squeezer_uncertainty(alpha, cfg.mu);
    const CMatrix          S     = homodyne_matrix({cfg.homodyne_rad});
    const bool             fb    = uses_feedback(cfg.topology);

    DesignSet set;
    set.topology = cfg.topology;

    Design& cls = set.classical;
    cls.label   = "classical";
    const ScaledProblem p = fb ? assemble_feedback_classical(plant, u, S, cfg.gamma, cfg.eps1, cfg.eps2)
                               : assemble_classical(plant, u, S, cfg.gamma, cfg.eps1, cfg.eps2);
    cls.estimator             = synthesize(p, opts);
    cls.A                     = plant.A.realization();
    cls.B                     = plant.B_full();
    cls.C                     = plant.C.realization();
    cls.D                     = plant.D_full();
    cls.L                     = plant.L;
    cls.uncertainty           = u;
    cls.physically_realizable = plant.physically_realizable;

    if (!cfg.controller) return set;

    const CoherentController ctrl = make_controller(cfg);
    const Topology topo = fb ? Topology::feedback : Topology::no_feedback;
    const AugmentedSystem aug = fb ? augment_feedback(plant, ctrl) : augment(plant, ctrl);
    const AugmentedUncertainty au = lift_uncertainty(u, plant, ctrl, topo);

    Design coh;
    coh.label                 = "coherent";
    coh.estimator             = synthesize(assemble_augmented(aug, au, S, cfg.gamma, cfg.eps1, cfg.eps2), opts);
    coh.A                     = aug.A;
    coh.B                     = aug.B;
    coh.C                     = aug.C;
    coh.D                     = aug.D;
    coh.L                     = aug.L;
    coh.uncertainty           = au;
    coh.physically_realizable = plant.physically_realizable && ctrl.physically_realizable;
    set.coherent              = std::move(coh);
    return set;
}

BodeCurve bode_curve(const Design& d, double delta, const std::vector<double>& omegas, NormKind kind,
                     double rel_tol) {
    const StateSpace ss = d.error_system(delta);
    BodeCurve c;
    c.label  = d.label;
    c.omegas = omegas;
    c.peak   = kind == NormKind::hinf ? hinf_norm(ss, rel_tol) : peak_gain(ss, rel_tol);
    for (const CMatrix& g : frequency_response(ss, omegas)) c.magnitudes.push_back(max_singular_value(g));
    return c;
}

SweepTable sweep_designs(const DesignSet& set, const std::vector<double>& deltas, NormKind kind, double rel_tol) {
    auto run = [&](const Design& d) {
        return delta_sweep([&d](double delta) { return d.error_system(delta); }, deltas, d.label, kind, rel_tol);
    };
    SweepTable t{run(set.classical), std::nullopt};
    if (set.coherent) t.coherent = run(*set.coherent);
    return t;
}

double spread(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

} // namespace qre::app
