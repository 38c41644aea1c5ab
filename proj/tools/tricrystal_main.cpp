#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tricrystal/commands.hpp"
#include "tricrystal/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo sampler and rigidity checks for triangular crystals with vacancies"};
    app.set_version_flag("--version", std::string(tricrystal::kVersion));
    app.require_subcommand(1);

    std::string config;
    tricrystal::SimulateOptions sim_options;

    auto* simulate = app.add_subcommand("simulate", "run chains and write samples, checkpoints and a summary");
    simulate->add_option("config", config, "configuration file (key = value)")->required();
    simulate->add_flag("--resume", sim_options.resume, "continue from the checkpoints in the output directory");
    simulate->add_option("--stop-at-sweep", sim_options.stop_at_sweep,
                         "stop each chain after this many total sweeps (checkpoint written)");

    auto* verify = app.add_subcommand("verify", "identity and inequality suites");
    verify->add_option("config", config, "configuration file")->required();

    auto* scan = app.add_subcommand("scan", "grid over beta (and m) with error bars");
    scan->add_option("config", config, "configuration file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : tricrystal::kExitValidation;
    }

    if (*simulate) {
        return tricrystal::cmd_simulate(config, sim_options, std::cout, std::cerr);
    }
    if (*verify) {
        return tricrystal::cmd_verify(config, std::cout, std::cerr);
    }
    return tricrystal::cmd_scan(config, std::cout, std::cerr);
}
