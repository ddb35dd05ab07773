#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cubicgen/error.hpp"
#include "experiments/commands.hpp"
#include "experiments/config.hpp"

namespace {

struct Flags {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> cutoff;
    bool strict = false;
    std::optional<int> threads;
};

void add_common(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--config", flags.config, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--seed", flags.seed, "master seed (overrides config)");
    cmd->add_option("--cutoff", flags.cutoff, "Fock cutoff per mode (overrides config)")->check(CLI::Range(2, 400));
    cmd->add_flag("--strict", flags.strict, "treat truncation warnings as errors");
    cmd->add_option("--threads", flags.threads, "worker threads (overrides config)")->check(CLI::Range(1, 1024));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heralded cubic phase state generation: optimization and sweeps"};
    app.require_subcommand(1);
    Flags flags;
    const char* names[] = {"optimize", "sweep", "robustness", "wigner", "gradcheck"};
    const char* help[] = {
        "optimize the interferometer for one target state",
        "continuation sweep over a grid of target states",
        "perturbation study of stored optima",
        "export a Wigner function grid",
        "compare analytic and finite-difference gradients",
    };
    for (int i = 0; i < 5; ++i) add_common(app.add_subcommand(names[i], help[i]), flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : experiments::kExitConfigError;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    experiments::RunConfig config;
    try {
        if (!flags.config.empty()) config = experiments::load_config(flags.config);
        if (flags.seed) config.seed = *flags.seed;
        if (flags.cutoff) config.cutoff = *flags.cutoff;
        if (flags.strict) config.strict = true;
        if (flags.threads) config.threads = *flags.threads;
        config.validate();
        std::filesystem::create_directories(flags.out);
    } catch (const cubicgen::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return experiments::kExitConfigError;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return experiments::kExitConfigError;
    }
    return experiments::run_command(command, config, flags.out, std::cerr);
}
