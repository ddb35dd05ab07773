#pragma once

#include <filesystem>
#include <ostream>
#include <string_view>

#include "experiments/config.hpp"

namespace experiments {

enum ExitCode : int {
    kExitSuccess = 0,
    kExitConfigError = 2,
    kExitConvergenceGaps = 3,
    kExitNumericFailure = 4,
};

// Each command writes its artifacts under `out` and returns an exit code.
// Configuration and numeric errors propagate as exceptions; run_command maps
// them to exit codes.

// Random restarts (free transmission) or masked random restarts (fixed
// transmission) on config.target. Writes result.json and restarts.csv.
int cmd_optimize(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
// Anchor restarts, then grid continuation. Writes sweep.csv and summary.json.
int cmd_sweep(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
// Perturbation study on the robustness row of a sweep.csv or on a
// result.json. Writes robustness.csv and robustness.json.
int cmd_robustness(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
// Writes wigner.csv and wigner.json.
int cmd_wigner(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
// Analytic vs central-difference loss gradient at random points. Writes
// gradcheck.json.
int cmd_gradcheck(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);

int run_command(std::string_view name, const RunConfig& config, const std::filesystem::path& out,
                std::ostream& log);

// Denominator floor of the gradient relative error
// |g_a - g_fd| / max(|g_a|, |g_fd|, floor).
inline constexpr double kGradientRelativeFloor = 1e-4;

}  // namespace experiments
