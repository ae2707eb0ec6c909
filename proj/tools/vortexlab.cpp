// vortexlab command-line tool.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vortexlab/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"vortexlab: vortex-patch regularity diagnostics"};
    app.require_subcommand(1);
    app.fallthrough();
    unsigned threads = 0;
    std::uint64_t seed = 1;
    app.add_option("--threads", threads, "worker threads (default 1)");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides the scenario seed)");

    std::string scenario, out_dir = "out", suite, run_dir;
    std::size_t budget = 2000;

    auto* sim = app.add_subcommand("simulate", "run a scenario and write diagnostics.csv, trajectories.csv");
    sim->add_option("--scenario", scenario, "scenario file")->required();
    sim->add_option("--out", out_dir, "output directory");

    auto* ver = app.add_subcommand("verify", "closed-form and identity checks for a scenario");
    ver->add_option("--suite", suite, "stationary | identities")->required();
    ver->add_option("--scenario", scenario, "scenario file")->required();

    auto* lem = app.add_subcommand("lemmas", "random-ensemble lemma checks");
    lem->add_option("--budget", budget, "ensemble size (0 = no checks)");

    auto* rep = app.add_subcommand("report", "plot data from a simulate output directory");
    rep->add_option("--run", run_dir, "simulate output directory (default: --out)");
    rep->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (threads > 0) vortexlab::set_worker_threads(threads);
        auto load = [&] {
            auto s = vortexlab::load_scenario(scenario);
            if (seed_opt->count() > 0) s.seed = seed;
            return s;
        };
        if (*sim) return vortexlab::cmd_simulate(load(), out_dir, std::cerr);
        if (*ver) return vortexlab::cmd_verify(load(), suite, std::cout);
        if (*lem) return vortexlab::cmd_lemmas(budget, seed, std::cout);
        if (*rep) return vortexlab::cmd_report(run_dir.empty() ? out_dir : run_dir, out_dir, std::cerr);
    } catch (const vortexlab::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const vortexlab::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
