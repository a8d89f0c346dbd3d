// ghostsim: batch front end for the coincidence imaging toolkit.
//
//   ghostsim solve --scenario s.ini
//   ghostsim image --scenario s.ini --out results/
//   ghostsim mc    --scenario s.ini --out results/ --seed 7
//   ghostsim rays  --scenario s.ini --out results/
//   ghostsim dual  --scenario s.ini --out results/ --allow-defocus

#include <iostream>

#include <CLI11.hpp>

#include "ghost/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Coincidence (ghost) imaging simulator"};
    app.require_subcommand(1);

    ghost::CommandOptions opt;
    std::uint64_t seed = 0;

    const std::pair<const char*, const char*> verbs[] = {
        {"solve", "Solve the coincidence imaging equation for each source branch"},
        {"image", "Wave-optics ghost image profiles (CSV)"},
        {"mc", "Monte-Carlo thermal-light correlation (CSV)"},
        {"rays", "Ray-construction diagrams (SVG)"},
        {"dual", "Both branches of a dual source on one setup (CSV)"},
    };
    for (const auto& [name, help] : verbs) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--scenario", opt.scenario, "Scenario file (INI)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "Existing output directory")->capture_default_str();
        sub->add_option("--seed", seed, "Random seed, overrides the scenario");
        sub->add_flag("--allow-defocus", opt.allow_defocus, "Image planes that do not satisfy the imaging equation");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    if (chosen->count("--seed")) opt.seed = seed;
    return ghost::run_command(chosen->get_name(), opt, std::cout, std::cerr);
}
