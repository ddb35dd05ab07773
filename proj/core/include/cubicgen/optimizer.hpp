#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cubicgen/circuit.hpp"
#include "cubicgen/params.hpp"
#include "cubicgen/states.hpp"

namespace cubicgen {

struct TargetSpec {
    double r = 0.15;      // cubicity
    double xi_db = 5.0;   // squeezing in dB
    void validate() const;
    friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

struct ParamBounds {
    ParamVector::Values lower{};
    ParamVector::Values upper{};
    // alpha in [-2, 2], phi_bs in [0, pi/2], angles in [0, 2pi],
    // |xi| in [0, 1.5], |beta| in [0, 3].
    static ParamBounds defaults();
    bool contains(Param p, double value) const;
};

enum class GradientMode { Analytic, FiniteDifference };

struct OptConfig {
    ParamBounds bounds = ParamBounds::defaults();
    int max_iterations = 500;
    double gradient_tolerance = 1e-8;
    double loss_tolerance = 1e-12;
    int history = 10;
    std::uint64_t seed = 0;
    // Parameters held fixed; their values come from x0 (minimize) or from
    // fixed_values (random starts).
    ParamVector::Mask fixed_mask{};
    ParamVector::Values fixed_values{};
    GradientMode gradient = GradientMode::Analytic;
    double finite_difference_step = 1e-6;
    int cutoff = 30;
    bool strict = false;
    // Re-evaluate every optimum at cutoff + 5 and flag fidelity changes of
    // kCutoffTolerance or more.
    bool check_cutoff = true;
    int threads = 1;

    void fix(Param p, double value);
    void fix_transmission(double transmission) { fix(Param::PhiBs, transmission_to_phi_bs(transmission)); }
    void validate() const;
};

inline constexpr double kCutoffTolerance = 1e-6;
inline constexpr int kCutoffCheckIncrement = 5;

// Target state plus the two-mode space it is compared in. Immutable and safe
// to share between threads.
class Problem {
public:
    Problem(TargetSpec target, int cutoff, bool strict = false);

    const TargetSpec& target() const { return target_; }
    const FockSpace& space() const { return space_; }
    const TargetState& target_state() const { return target_state_; }

    // Infidelity and analytic gradient. A degenerate projection returns the
    // sentinel loss 1 with a zero gradient and `degenerate` set.
    GradientBundle loss_and_grad(const ParamVector& x) const;
    // Central finite differences of the infidelity (one-sided at bounds that
    // would make a magnitude negative).
    GradientBundle loss_and_fd_grad(const ParamVector& x, double step) const;
    double loss(const ParamVector& x) const;
    double fidelity(const ParamVector& x) const { return 1.0 - loss(x); }

private:
    TargetSpec target_;
    FockSpace space_;
    TargetState target_state_;
};

GradientBundle loss_and_grad(const ParamVector& x, const TargetSpec& target, const FockSpace& space);

struct OptResult {
    ParamVector x_opt;
    double fidelity = 0.0;
    double detection_probability = 0.0;
    double norm_coefficient = 0.0;
    std::vector<double> loss_history;
    bool converged = false;
    int iterations = 0;
    int evaluations = 0;
    std::uint64_t seed = 0;
    std::string stop_reason;
    double target_tail_mass = 0.0;
    double cutoff_check_delta = std::numeric_limits<double>::quiet_NaN();
    bool cutoff_converged = true;

    double loss() const { return 1.0 - fidelity; }
};

// Bounded quasi-Newton descent on the infidelity from x0. Deterministic for a
// given (x0, config).
OptResult minimize(const ParamVector& x0, const Problem& problem, const OptConfig& config);
OptResult minimize(const ParamVector& x0, const TargetSpec& target, const OptConfig& config);

// Uniform sample inside the bounds; fixed parameters take config.fixed_values.
ParamVector sample_start(const OptConfig& config, std::uint64_t stream);

struct RestartOutcome {
    OptResult best;
    std::size_t best_index = 0;
    std::vector<OptResult> all;  // in start order
};

// n_starts independent minimizations from sample_start(config,
// stream_seed(config.seed, i)). Throws NumericError if every start ends on a
// degenerate projection.
RestartOutcome random_restart(const Problem& problem, int n_starts, const OptConfig& config);
RestartOutcome random_restart(const TargetSpec& target, int n_starts, const OptConfig& config);

// Warm-started chain: result i seeds result i + 1. A step that does not
// converge is kept in the output, and the chain continues from the last
// converged optimum.
std::vector<OptResult> continuation(std::span<const TargetSpec> targets, const ParamVector& x_seed,
                                    const OptConfig& config);

struct ContinuationGrid {
    std::vector<double> r_values;
    std::vector<double> xi_values;
    // results[xi_index * r_values.size() + r_index]
    std::vector<OptResult> results;

    const OptResult& at(std::size_t r_index, std::size_t xi_index) const {
        return results[xi_index * r_values.size() + r_index];
    }
    bool has_gaps() const;
};

// Continuation over a 2-D target grid, starting at the anchor cell from
// x_anchor: first along r on the anchor's xi row (both directions), then along
// xi from that row for every r. Column chains run on config.threads workers.
ContinuationGrid continuation_grid(const std::vector<double>& r_values, const std::vector<double>& xi_values,
                                   std::size_t anchor_r, std::size_t anchor_xi, const ParamVector& x_anchor,
                                   const OptConfig& config);

enum class PerturbationMode { Multiplicative, Additive };

// Fidelity after independent uniform errors u in [-epsilon, epsilon] on every
// free parameter: x -> x (1 + u) (multiplicative) or x -> x + u (additive).
// No re-optimization. Degenerate projections count as fidelity 0.
std::vector<double> perturbation_study(const ParamVector& x_opt, const Problem& problem, double epsilon, int trials,
                                       std::uint64_t seed, PerturbationMode mode = PerturbationMode::Multiplicative);

}  // namespace cubicgen
