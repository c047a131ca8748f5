#include <cstdint>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "obscert/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"obscert: certified final-state observability constants and "
                 "spectral verification experiments"};

    std::string config_path;
    obscert::cli::RunOptions opts;
    opts.out_dir = ".";
    std::uint64_t seed = 0;

    app.add_option("-c,--config", config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("-o,--out", opts.out_dir, "output directory (created if missing)");
    auto* seed_opt = app.add_option("-s,--seed", seed, "override the config seed");
    app.add_option("-t,--threads", opts.threads,
                   "worker threads (default: OBSCERT_THREADS env var, else 1)");

    CLI11_PARSE(app, argc, argv);

    opts.seed = seed;
    opts.seed_override = seed_opt->count() > 0;
    return obscert::cli::run_experiment_file(config_path, opts);
}
