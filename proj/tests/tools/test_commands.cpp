#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <sstream>

#include "experiments/artifacts.hpp"
#include "experiments/commands.hpp"
#include "experiments/config.hpp"
#include "test_support.hpp"

using namespace experiments;
using testing_support::kPi;
using testing_support::read_file;
using testing_support::TempDir;

namespace {

// 3 x 3 grid at a small cutoff; fast enough for unit tests.
RunConfig small_sweep_config() {
    return parse_config(R"({
        "schema_version": 1, "seed": 2, "cutoff": 12,
        "grid": {"r": {"min": 0.10, "max": 0.14, "step": 0.02}, "xi_db": {"min": 3, "max": 4, "step": 0.5},
                 "anchor": {"r": 0.12, "xi_db": 3.5}},
        "optimizer": {"anchor_restarts": 4},
        "robustness": {"xi_db": 3.5, "trials": 6}
    })");
}

}  // namespace

TEST(Commands, OptimizeBalancedTargetFindsKnownOptimum) {
    TempDir dir("optimize");
    const RunConfig config = parse_config(R"({"schema_version": 1, "seed": 3, "optimizer": {"restarts": 10}})");
    std::ostringstream log;
    ASSERT_EQ(run_command("optimize", config, dir.path(), log), kExitSuccess) << log.str();
    const nlohmann::json doc = read_json(dir.path() / "result.json");
    const nlohmann::json& r = doc["result"];
    EXPECT_GE(r["fidelity"].get<double>(), 0.97);
    EXPECT_NEAR(r["norm_coefficient"].get<double>(), 0.517, 0.02);
    EXPECT_NEAR(r["parameters"]["beta_abs"]["value"].get<double>(), 0.18, 0.03);
    EXPECT_NEAR(r["parameters"]["phi_beta"]["pi_multiple"].get<double>(), 0.5, 0.02);
    EXPECT_TRUE(r["parameters"]["phi_bs"]["fixed"].get<bool>());
    EXPECT_NEAR(r["transmission"].get<double>(), 0.5, 1e-12);
    EXPECT_EQ(read_csv(dir.path() / "restarts.csv").rows.size(), 10u);
}

TEST(Commands, SweepWritesEveryCellAndIsReproducible) {
    TempDir a("sweep-a");
    TempDir b("sweep-b");
    const RunConfig config = small_sweep_config();
    std::ostringstream log;
    ASSERT_EQ(run_command("sweep", config, a.path(), log), kExitSuccess) << log.str();
    ASSERT_EQ(run_command("sweep", config, b.path(), log), kExitSuccess) << log.str();
    const CsvTable table = read_csv(a.path() / "sweep.csv");
    EXPECT_EQ(table.header, (std::vector<std::string>{"r", "xi_dB", "fidelity", "detection_probability", "alpha",
                                                      "phi_bs", "theta", "xi_abs", "phi_xi", "beta_abs",
                                                      "phi_beta", "converged", "iterations", "seed"}));
    ASSERT_EQ(table.rows.size(), 9u);
    EXPECT_EQ(table.rows[0][0], "0.1");
    EXPECT_EQ(table.rows[1][1], "3.5");
    for (const auto& row : table.rows) EXPECT_EQ(row[table.column("converged")], "true");
    EXPECT_EQ(read_file(a.path() / "sweep.csv"), read_file(b.path() / "sweep.csv"));
    EXPECT_EQ(read_json(a.path() / "summary.json")["status"], "complete");

    ASSERT_EQ(run_command("robustness", config, a.path(), log), kExitSuccess) << log.str();
    const CsvTable robust = read_csv(a.path() / "robustness.csv");
    EXPECT_EQ(robust.header, (std::vector<std::string>{"r", "trial", "fidelity"}));
    EXPECT_EQ(robust.rows.size(), 18u);
    const nlohmann::json summary = read_json(a.path() / "robustness.json");
    for (const auto& row : summary["rows"]) {
        EXPECT_LE(row["max"].get<double>(), row["unperturbed_fidelity"].get<double>() + 1e-6);
    }
}

TEST(Commands, RobustnessWithoutSourceIsAConfigError) {
    TempDir dir("robust-missing");
    std::ostringstream log;
    EXPECT_EQ(run_command("robustness", small_sweep_config(), dir.path(), log), kExitConfigError);
    EXPECT_NE(log.str().find("expected artifact not found"), std::string::npos) << log.str();
}

TEST(Commands, WignerOfVacuumPeaksAtTwoOverPi) {
    TempDir dir("wigner");
    const RunConfig config = parse_config(
        R"({"schema_version": 1, "cutoff": 10, "wigner": {"state": "vacuum", "q": {"min": -1, "max": 1, "points": 21},
            "p": {"min": -1, "max": 1, "points": 21}}})");
    std::ostringstream log;
    ASSERT_EQ(run_command("wigner", config, dir.path(), log), kExitSuccess) << log.str();
    const CsvTable table = read_csv(dir.path() / "wigner.csv");
    ASSERT_EQ(table.rows.size(), 441u);
    const auto& centre = table.rows[10 * 21 + 10];
    EXPECT_EQ(centre[0], "0");
    EXPECT_EQ(centre[1], "0");
    EXPECT_NEAR(std::stod(centre[2]), 2.0 / kPi, 1e-6);
}

TEST(Commands, GradcheckAtSmallCutoffIsFastAndPasses) {
    TempDir dir("gradcheck");
    const RunConfig config = parse_config(R"({"schema_version": 1, "cutoff": 8})");
    std::ostringstream log;
    const auto start = std::chrono::steady_clock::now();
    ASSERT_EQ(run_command("gradcheck", config, dir.path(), log), kExitSuccess) << log.str();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_LT(seconds, 5.0);
    const nlohmann::json doc = read_json(dir.path() / "gradcheck.json");
    EXPECT_TRUE(doc["passed"].get<bool>());
    for (const auto& [name, error] : doc["max_relative_error"].items()) EXPECT_LT(error.get<double>(), 1e-5) << name;
}

TEST(Commands, StrictTargetTailIsANumericFailure) {
    TempDir dir("strict");
    RunConfig config = parse_config(R"({"schema_version": 1, "strict": true, "wigner": {"q": {"points": 3}, "p": {"points": 3}}})");
    std::ostringstream log;
    EXPECT_EQ(run_command("wigner", config, dir.path(), log), kExitNumericFailure) << log.str();
}

TEST(Commands, UnknownCommandIsAConfigError) {
    TempDir dir("unknown");
    std::ostringstream log;
    EXPECT_EQ(run_command("plot", RunConfig{}, dir.path(), log), kExitConfigError);
}
