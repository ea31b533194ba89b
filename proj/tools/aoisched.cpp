// aoisched: command-line front end for the experiment presets.
//
//   aoisched run table1 --T 1000000 --seed 7 --out out/table1
//   aoisched run fig4 --N 5,10,20,40
//   aoisched run custom --spec net.json
//   aoisched --preset fig5 --reps 10

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aoisched/experiments.hpp"

namespace {

void add_common(CLI::App& app, aoi::ExperimentOptions& o) {
    app.add_option("--spec", o.spec_path, "network spec JSON (custom preset)");
    app.add_option("--T", o.horizon, "simulation horizon in slots (default: 1e6 for table1, 1e5 otherwise)");
    app.add_option("--seed", o.seed, "base seed")->capture_default_str();
    app.add_option("--reps", o.replications, "replications per configuration (default: 1 for table1, 10 otherwise)");
    app.add_option("--out", o.out_dir, "output directory")->capture_default_str();
    app.add_option("--X", o.truncation, "truncation override for every sensor (default: automatic)");
    app.add_option("--dual-step", o.dual.initial_step, "initial subgradient step")->capture_default_str();
    app.add_option("--dual-shrink", o.dual.shrink, "step shrink factor on a sign change")->capture_default_str();
    app.add_option("--dual-eps", o.dual.step_tol, "stop when the step falls below this")->capture_default_str();
    app.add_option("--dual-max", o.dual.max_evaluations, "subgradient evaluation budget")->capture_default_str();
    app.add_option("--N", o.sizes, "comma-separated network sizes (fig4, fig5)")->delimiter(',');
    app.add_option("--budget-fraction", o.budget_fraction, "table1/fig3 budget as a fraction of sum eta*omega")
        ->capture_default_str();
    app.add_flag("--trace", o.trace, "dump a per-slot trace of the first simulated configuration");
    app.add_flag("--quiet", o.quiet, "no progress output");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Age-of-information scheduling under power and bandwidth limits"};
    app.set_version_flag("--version", aoi::kToolVersion);
    aoi::ExperimentOptions top;
    aoi::ExperimentOptions sub;
    app.add_option("--preset", top.preset, "table1 | fig3 | fig4 | fig5 | custom")
        ->check(CLI::IsMember({"table1", "fig3", "fig4", "fig5", "custom"}));
    add_common(app, top);

    CLI::App* run = app.add_subcommand("run", "run a preset and write CSV files plus manifest.json");
    run->add_option("preset", sub.preset, "table1 | fig3 | fig4 | fig5 | custom")
        ->required()
        ->check(CLI::IsMember({"table1", "fig3", "fig4", "fig5", "custom"}));
    add_common(*run, sub);

    CLI11_PARSE(app, argc, argv);

    aoi::ExperimentOptions& o = run->parsed() ? sub : top;
    if (o.preset.empty()) {
        std::cerr << app.help();
        return 2;
    }
    try {
        const aoi::ExperimentResult res = aoi::run_experiment(o);
        for (const auto& f : res.files) std::cout << o.out_dir << "/" << f << "\n";
        std::cout << o.out_dir << "/manifest.json\n";
    } catch (const aoi::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
