// Command-line front end. The experiment (and its parameters) come from a
// configuration file; --out/--workers/--seed override the file.
// Exit codes: 0 success, 1 a gated check failed, 2 usage or configuration
// problem, 3 simulation budget exceeded.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rwrs/config.hpp"
#include "rwrs/experiments.hpp"
#include "rwrs/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"random walk in random scenery laboratory"};
    std::string config_path;
    app.add_option("--config", config_path, "experiment configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    std::string out_dir;
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    unsigned workers = 0;
    auto* wopt = app.add_option("--workers", workers, "worker threads (overrides the config)");
    std::uint64_t seed = 0;
    auto* sopt = app.add_option("--seed", seed, "random seed (overrides the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        rwrs::ExperimentConfig cfg = rwrs::parse_config(rwrs::read_text_file(config_path));
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (wopt->count() > 0) cfg.workers = workers;
        if (sopt->count() > 0) cfg.seed = seed;
        return rwrs::run_experiment(cfg, std::cout);
    } catch (const rwrs::BudgetError& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const rwrs::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
