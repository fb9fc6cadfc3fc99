// Command-line runner for the verification scenarios.

#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "csoc/cli.hpp"

namespace {

std::string defaults_text() {
    std::ostringstream os;
    os << "Defaults (config file format, every key can be set with --set section.key=value):\n\n"
       << csoc::cli::ScenarioConfig{}.to_ini();
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    using csoc::cli::ScenarioConfig;

    CLI::App app{"csoc: complex stochastic optimal control scenario runner"};
    app.footer(defaults_text());
    app.set_version_flag("--version", csoc::cli::library_version());
    app.require_subcommand(1);

    std::string scenario, config_file, out_dir;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    std::size_t n_paths = 0, n_steps = 0, probes = 0, jobs = 0;
    double d_tau = 0.0;
    std::string metric;

    auto* run = app.add_subcommand("run", "Run one scenario or all of them");
    std::string names = "all";
    for (const auto& n : csoc::cli::scenario_names()) names += ", " + n;
    run->add_option("scenario", scenario, "Scenario name: " + names)->required();
    run->add_option("-c,--config", config_file, "Config file; flags override its values");
    auto* o_seed = run->add_option("--seed", seed, "RNG seed");
    auto* o_paths = run->add_option("--n-paths", n_paths, "Path count; sample count for the moments scenario");
    auto* o_steps = run->add_option("--n-steps", n_steps, "Euler-Maruyama steps per path");
    auto* o_dtau = run->add_option("--d-tau", d_tau, "Proper-time step");
    auto* o_probes = run->add_option("--probes", probes, "Probe count for the field checks");
    auto* o_jobs = run->add_option("-j,--jobs", jobs, "Worker threads for paths and probes");
    auto* o_metric = run->add_option("--metric", metric, "minus-plus or plus-minus");
    auto* o_out = run->add_option("-o,--out", out_dir, "Output directory (default: the config file value, else $CSOC_OUTPUT_DIR, else csoc-out)");
    run->add_option("--set", sets, "Override any config key, e.g. --set physics.q=0.5");

    auto* config = app.add_subcommand("config", "Print the default config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : csoc::cli::kConfigError;
    }

    if (config->parsed()) {
        std::cout << ScenarioConfig{}.to_ini();
        return 0;
    }

    ScenarioConfig cfg;
    try {
        if (!config_file.empty()) cfg = ScenarioConfig::from_file(config_file);
        else if (const char* env = std::getenv("CSOC_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
        cfg.scenario = scenario;
        if (*o_seed) cfg.seed = seed;
        if (*o_paths) (scenario == "moments" ? cfg.n_samples : cfg.n_paths) = n_paths;
        if (*o_steps) cfg.n_steps = n_steps;
        if (*o_dtau) cfg.d_tau = d_tau;
        if (*o_probes) cfg.probes = probes;
        if (*o_jobs) cfg.jobs = jobs;
        if (*o_metric) cfg.metric = metric;
        if (*o_out) cfg.output_dir = out_dir;
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw csoc::cli::ConfigError("--set expects section.key=value, got '" + s + "'");
            csoc::cli::apply_override(cfg, s.substr(0, eq), s.substr(eq + 1));
        }
    } catch (const csoc::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return csoc::cli::kConfigError;
    }
    return csoc::cli::run(cfg, std::cerr);
}
