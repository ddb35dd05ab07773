#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cubicgen/optimizer.hpp"

namespace experiments {

inline constexpr int kSchemaVersion = 1;

// Inclusive arithmetic range min, min + step, ..., max.
struct AxisSpec {
    double min = 0.0;
    double max = 0.0;
    double step = 1.0;

    std::vector<double> values() const;
    // Index of `value` on the axis, or -1 when it is not a grid point.
    long index_of(double value) const;
};

// `points` evenly spaced samples over [min, max].
struct SampleAxis {
    double min = -5.0;
    double max = 5.0;
    int points = 201;
};

enum class TransmissionMode { Free, Fixed };
enum class WignerState { Target, Vacuum, Result };

struct RunConfig {
    std::uint64_t seed = 0;
    int cutoff = 30;
    bool strict = false;
    int threads = 1;

    cubicgen::TargetSpec target{0.15, 5.0};

    TransmissionMode transmission = TransmissionMode::Fixed;
    double transmission_value = 0.5;

    AxisSpec r_axis{0.05, 0.30, 0.005};
    AxisSpec xi_axis{3.0, 7.0, 0.25};
    cubicgen::TargetSpec anchor{0.15, 5.0};

    cubicgen::ParamBounds bounds = cubicgen::ParamBounds::defaults();
    int max_iterations = 500;
    double gradient_tolerance = 1e-8;
    double loss_tolerance = 1e-12;
    int history = 10;
    int restarts = 50;
    int anchor_restarts = 20;
    cubicgen::GradientMode gradient = cubicgen::GradientMode::Analytic;
    double finite_difference_step = 1e-6;

    double epsilon = 0.02;
    int trials = 50;
    double robustness_xi_db = 5.0;
    std::string robustness_source = "sweep.csv";
    cubicgen::PerturbationMode perturbation = cubicgen::PerturbationMode::Multiplicative;

    WignerState wigner_state = WignerState::Target;
    std::string wigner_source = "result.json";
    SampleAxis wigner_q;
    SampleAxis wigner_p;

    int gradcheck_points = 20;
    double gradcheck_step = 1e-5;
    double gradcheck_threshold = 1e-5;

    // Throws cubicgen::ConfigError naming the offending field.
    void validate() const;
    cubicgen::OptConfig optimizer_config() const;
    // Fully resolved configuration in the input schema.
    nlohmann::json to_json() const;
};

// Parses a JSON config. Missing fields keep their defaults; unknown fields,
// type mismatches and out-of-range values are errors of the form
// "<source>:<line>: <field>: <message>".
RunConfig parse_config(std::string_view text, std::string_view source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

}  // namespace experiments
