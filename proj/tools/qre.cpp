#include <iostream>

#include "CLI11.hpp"

#include "qre/app/commands.hpp"

using namespace qre::app;

int main(int argc, char** argv) {
    CLI::App app{"Robust H-infinity estimation for uncertain linear quantum systems"};
    app.require_subcommand(1);

    CommandOptions opts;
    std::string    config, out = ".", preset_name, estimator;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "JSON run configuration");
        sub->add_option("--preset", preset_name, "fig3, fig4, fig6 or fig7");
        sub->add_option("--out", out, "output directory");
        sub->add_flag("--strict-pr", opts.strict_pr, "reject physically unrealizable squeezers");
        sub->add_option("--tol", opts.tol, "relative tolerance of the norm bisection");
        sub->add_flag("--require-stable", opts.require_stable, "fail on unstable estimators or loops");
        sub->add_option("--estimator", estimator, "estimator.json overriding the synthesized filters");
    };

    auto* synth = app.add_subcommand("synthesize", "synthesize estimators and write estimator.json");
    auto* bode  = app.add_subcommand("bode", "error frequency response at the design point");
    auto* sweep = app.add_subcommand("sweep", "peak error gain across the uncertainty window");
    auto* repro = app.add_subcommand("reproduce", "run a preset and check its assertions");
    for (auto* sub : {synth, bode, sweep, repro}) add_common(sub);
    repro->add_option("name", preset_name, "preset name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    if (!config.empty()) opts.config = config;
    if (!preset_name.empty()) opts.preset = preset_name;
    if (!estimator.empty()) opts.estimator_file = estimator;
    opts.out = out;

    if (synth->parsed()) return run_synthesize(opts, std::cout, std::cerr);
    if (bode->parsed()) return run_bode(opts, std::cout, std::cerr);
    if (sweep->parsed()) return run_sweep(opts, std::cout, std::cerr);
    return run_reproduce(opts, std::cout, std::cerr);
}
