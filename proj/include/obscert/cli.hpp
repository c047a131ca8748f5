#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace obscert::cli {

// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kInvalidConfig = 2,
    kHypothesisViolation = 3,
    kNonConvergence = 4,
    kIoError = 5,
};

struct RunOptions {
    std::filesystem::path out_dir;
    std::uint64_t seed = 0;
    bool seed_override = false;  // --seed given on the command line
    int threads = 0;             // 0 = leave as configured
};

// Validates the experiment config (unknown fields rejected), dispatches to the
// modules, writes CSV/JSON artifacts plus a run manifest into out_dir.
// Returns an ExitCode; never throws.
int run_experiment(const nlohmann::json& config, const RunOptions& opts);

int run_experiment_file(const std::filesystem::path& config_path, const RunOptions& opts);

}  // namespace obscert::cli
