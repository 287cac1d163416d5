#include <string>

#include <CLI11.hpp>

#include "rod/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Magnetic rod hierarchy: integration, reduction and sections"};
    app.require_subcommand(1);

    std::string sim_cfg, red_cfg, poi_cfg, lax_cfg;
    std::string suite = "all";

    CLI::App* sim = app.add_subcommand(
        "simulate", "Integrate a field hierarchy state and track its invariants");
    sim->add_option("-c,--config", sim_cfg, "JSON configuration file")->required();

    CLI::App* red = app.add_subcommand(
        "reduce", "Integrate the canonical (Euler-angle) form of the level-2 system");
    red->add_option("-c,--config", red_cfg, "JSON configuration file")->required();

    CLI::App* poi = app.add_subcommand(
        "poincare", "Record section crossings of reduced orbits");
    poi->add_option("-c,--config", poi_cfg, "JSON configuration file")->required();

    CLI::App* lax = app.add_subcommand(
        "lax-check", "Validate the spectral-parameter formulation on random states");
    lax->add_option("-c,--config", lax_cfg, "JSON configuration file")->required();

    CLI::App* ver = app.add_subcommand("verify", "Run built-in consistency suites");
    ver->add_option("-s,--suite", suite,
                    "bracket, canonical, lax, align, roundtrip or all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad command line counts as a config problem
    }

    if (sim->parsed()) return rod::cmd_simulate(sim_cfg);
    if (red->parsed()) return rod::cmd_reduce(red_cfg);
    if (poi->parsed()) return rod::cmd_poincare(poi_cfg);
    if (lax->parsed()) return rod::cmd_laxcheck(lax_cfg);
    return rod::cmd_verify(suite);
}
