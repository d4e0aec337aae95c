#include "qre/app/commands.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <sstream>

#include "qre/app/output.hpp"
#include "qre/app/pipeline.hpp"

namespace qre::app {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::DomainError:
        case ErrorCode::ScalingTooLarge:
        case ErrorCode::NotPhysicallyRealizable:
        case ErrorCode::WrongTopology:
        case ErrorCode::ShapeMismatch:
        case ErrorCode::NonFinite:
            return kExitConfig;
        case ErrorCode::UnstableSystem:
        case ErrorCode::ImaginaryAxisPole:
        case ErrorCode::SingularAtFrequency:
        case ErrorCode::ChannelOutOfRange:
            return kExitAnalysis;
        default:
            return kExitSynthesis;
    }
}

RunConfig resolve_config(const CommandOptions& opts) {
    RunConfig cfg;
    if (opts.preset) {
        auto p = preset(*opts.preset);
        if (!p) {
            std::string names;
            for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
            throw Error(ErrorCode::ConfigError, "unknown preset '" + *opts.preset + "' (known: " + names + ")");
        }
        cfg = *p;
    } else if (opts.config) {
        cfg = load_config(*opts.config);
    } else {
        throw Error(ErrorCode::ConfigError, "either --config or --preset is required");
    }
    if (opts.strict_pr) cfg.strict_pr = true;
    if (!(opts.tol > 0.0 && opts.tol < 1.0)) throw Error(ErrorCode::ConfigError, "--tol must lie in (0, 1)");
    return cfg;
}

namespace {

// Runs `body`, translating library errors into exit codes.
int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const Error& e) {
        const int code = exit_code_for(e.code());
        if (code == kExitAnalysis)
            err << "error: unstable closed loop: " << e.what() << '\n';
        else
            err << "error: " << e.what() << '\n';
        return code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

DesignSet prepare(const RunConfig& cfg, const CommandOptions& opts, bool stable_synthesis) {
    DesignSet set = synthesize_designs(cfg, synthesis_options(cfg, stable_synthesis));
    if (opts.estimator_file) load_estimator_file(*opts.estimator_file, set);
    return set;
}

NormKind norm_kind(const CommandOptions& opts) { return opts.require_stable ? NormKind::hinf : NormKind::peak; }

void report(std::ostream& out, const Design& d) {
    const Estimator& e = d.estimator;
    out << d.label << ": X residual " << format_number(e.x_residual) << ", Y residual "
        << format_number(e.y_residual) << ", spectral abscissa " << format_number(e.spectral_abscissa)
        << (e.stable ? " (stable)" : " (unstable)") << ", coupling norm " << format_number(e.coupling_norm)
        << '\n';
}

std::vector<BodeCurve> bode_all(const DesignSet& set, const RunConfig& cfg, const CommandOptions& opts) {
    std::vector<BodeCurve> curves;
    for (const Design* d : set.all())
        curves.push_back(bode_curve(*d, cfg.delta_design, cfg.frequency_grid(), norm_kind(opts), opts.tol));
    return curves;
}

json peaks_json(const std::vector<BodeCurve>& curves) {
    json j = json::object();
    for (const BodeCurve& c : curves)
        j[c.label] = {{"value", c.peak.value}, {"omega", c.peak.omega}, {"upper", c.peak.upper},
                      {"stable", c.peak.stable}};
    return j;
}

Assertion residual_assertion(const DesignSet& set) {
    double worst = 0.0;
    for (const Design* d : set.all())
        worst = std::max({worst, d->estimator.x_residual, d->estimator.y_residual});
    return {"Riccati residuals <= 1e-8", worst <= 1e-8, "worst " + format_number(worst)};
}

Assertion dominance_at_design(const std::vector<BodeCurve>& curves, double delta) {
    std::ostringstream name;
    name << "coherent H-infinity norm < classical at delta=" << format_number(delta);
    if (curves.size() < 2) return {name.str(), false, "no coherent design"};
    const double cls = curves[0].peak.value;
    const double coh = curves[1].peak.value;
    return {name.str(), coh < cls, "classical " + format_number(cls) + ", coherent " + format_number(coh)};
}

Assertion dominance_everywhere(const SweepTable& t) {
    const std::string name = "coherent norm < classical norm at every delta";
    if (!t.coherent) return {name, false, "no coherent design"};
    for (std::size_t i = 0; i < t.classical.norms.size(); ++i) {
        if (!(t.coherent->norms[i] < t.classical.norms[i]))
            return {name, false, "violated at delta=" + format_number(t.classical.deltas[i])};
    }
    return {name, true, format_number(static_cast<double>(t.classical.norms.size())) + " points"};
}

Assertion spread_reduction(const SweepTable& t) {
    const std::string name = "spread(coherent) < spread(classical)";
    if (!t.coherent) return {name, false, "no coherent design"};
    const double cls = spread(t.classical.norms);
    const double coh = spread(t.coherent->norms);
    return {name, coh < cls, "classical " + format_number(cls) + ", coherent " + format_number(coh)};
}

} // namespace

int run_synthesize(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = resolve_config(opts);
        const DesignSet set = prepare(cfg, opts, opts.require_stable);
        for (const Design* d : set.all()) report(out, *d);
        write_estimator_file(opts.out / "estimator.json", set);
        write_meta(opts.out / "meta.json", cfg, "synthesize");
        out << "wrote " << (opts.out / "estimator.json").string() << '\n';
        return kExitOk;
    });
}

int run_bode(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = resolve_config(opts);
        const DesignSet set = prepare(cfg, opts, false);
        const auto curves   = bode_all(set, cfg, opts);
        write_bode_csv(opts.out / "bode.csv", curves);
        write_meta(opts.out / "meta.json", cfg, "bode", {{"peaks", peaks_json(curves)}});
        for (const BodeCurve& c : curves)
            out << c.label << ": peak " << format_number(c.peak.value) << " at omega " << format_number(c.peak.omega)
                << '\n';
        return kExitOk;
    });
}

int run_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg  = resolve_config(opts);
        const DesignSet set  = prepare(cfg, opts, false);
        const SweepTable tab = sweep_designs(set, cfg.sweep_grid(), norm_kind(opts), opts.tol);
        write_sweep_csv(opts.out / "sweep.csv", tab);
        write_meta(opts.out / "meta.json", cfg, "sweep");
        out << "classical spread " << format_number(spread(tab.classical.norms));
        if (tab.coherent) out << ", coherent spread " << format_number(spread(tab.coherent->norms));
        out << '\n';
        return kExitOk;
    });
}

int run_reproduce(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (!opts.preset) throw Error(ErrorCode::ConfigError, "reproduce needs a preset (fig3, fig4, fig6, fig7)");
        const RunConfig cfg = resolve_config(opts);
        const DesignSet set = prepare(cfg, opts, false);
        write_estimator_file(opts.out / "estimator.json", set);

        std::vector<Assertion> checks{residual_assertion(set)};
        json extra = json::object();
        if (cfg.name == "fig3" || cfg.name == "fig6") {
            const auto curves = bode_all(set, cfg, opts);
            write_bode_csv(opts.out / "bode.csv", curves);
            extra["peaks"] = peaks_json(curves);
            checks.push_back(dominance_at_design(curves, cfg.delta_design));
        } else {
            const SweepTable tab = sweep_designs(set, cfg.sweep_grid(), norm_kind(opts), opts.tol);
            write_sweep_csv(opts.out / "sweep.csv", tab);
            checks.push_back(dominance_everywhere(tab));
            if (cfg.name == "fig7") checks.push_back(spread_reduction(tab));
        }

        json results = json::array();
        const Assertion* first_failure = nullptr;
        for (const Assertion& a : checks) {
            out << (a.pass ? "PASS " : "FAIL ") << a.name << " (" << a.detail << ")\n";
            results.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
            if (!a.pass && !first_failure) first_failure = &a;
        }
        extra["assertions"] = results;
        write_meta(opts.out / "meta.json", cfg, "reproduce", extra);
        if (first_failure) {
            err << "acceptance failed: " << first_failure->name << '\n';
            return kExitAcceptance;
        }
        return kExitOk;
    });
}

} // namespace qre::app
