#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace cubicgen {

struct BoundedLbfgsOptions {
    int history = 10;
    int max_iterations = 500;
    // Stop when the infinity norm of the projected gradient drops below this.
    double gradient_tolerance = 1e-8;
    // Stop when (f_k - f_{k+1}) / max(|f_k|, |f_{k+1}|, 1) drops below this.
    double loss_tolerance = 1e-12;
    int max_line_search_steps = 40;
    double armijo = 1e-4;
};

enum class StopReason { GradientTolerance, LossTolerance, MaxIterations, LineSearchFailed };

std::string_view stop_reason_name(StopReason reason);

struct BoundedLbfgsResult {
    std::vector<double> x;
    double loss = 0.0;
    std::vector<double> gradient;
    // Loss at the start point followed by the loss after every accepted step.
    std::vector<double> loss_history;
    int iterations = 0;
    int evaluations = 0;
    StopReason reason = StopReason::MaxIterations;
    bool converged = false;
};

// Writes the gradient into `grad` and returns the loss.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

// Box-constrained limited-memory BFGS. Variables sitting on a bound with the
// gradient pointing outward are frozen for the step; the remaining ones follow
// the two-loop quasi-Newton direction, and the step is projected back into the
// box during a backtracking Armijo search. Variables with lower == upper stay
// fixed for the whole run.
//
// A line search that cannot decrease the loss ends the run; it counts as
// converged only if the projected gradient is already below 1e-5.
// Throws NumericError on a non-finite loss or gradient, naming the last
// finite point.
BoundedLbfgsResult minimize_bounded(const Objective& objective, std::vector<double> x0,
                                    std::span<const double> lower, std::span<const double> upper,
                                    const BoundedLbfgsOptions& options = {});

}  // namespace cubicgen
