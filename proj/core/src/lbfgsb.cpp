#include "cubicgen/lbfgsb.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "cubicgen/error.hpp"

namespace cubicgen {
namespace {

constexpr double kLineSearchConvergedGradient = 1e-5;

struct Correction {
    std::vector<double> s;
    std::vector<double> y;
    double rho;
};

double dot(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

std::string describe(std::span<const double> x) {
    std::ostringstream out;
    out.precision(17);
    out << '[';
    for (std::size_t i = 0; i < x.size(); ++i) out << (i ? ", " : "") << x[i];
    out << ']';
    return out.str();
}

class Evaluator {
public:
    Evaluator(const Objective& objective, std::size_t n) : objective_(objective), grad_(n) {}

    double operator()(std::span<const double> x, std::vector<double>& grad, std::span<const double> last_good) {
        ++count_;
        const double f = objective_(x, grad_);
        if (!std::isfinite(f) || !std::all_of(grad_.begin(), grad_.end(), [](double g) { return std::isfinite(g); })) {
            throw NumericError("bounded L-BFGS: non-finite loss or gradient at " + describe(x) +
                               "; last finite point " + describe(last_good));
        }
        grad = grad_;
        return f;
    }

    int count() const { return count_; }

private:
    const Objective& objective_;
    std::vector<double> grad_;
    int count_ = 0;
};

}  // namespace

std::string_view stop_reason_name(StopReason reason) {
    switch (reason) {
        case StopReason::GradientTolerance: return "gradient_tolerance";
        case StopReason::LossTolerance: return "loss_tolerance";
        case StopReason::MaxIterations: return "max_iterations";
        case StopReason::LineSearchFailed: return "line_search_failed";
    }
    return "unknown";
}

BoundedLbfgsResult minimize_bounded(const Objective& objective, std::vector<double> x0,
                                    std::span<const double> lower, std::span<const double> upper,
                                    const BoundedLbfgsOptions& options) {
    const std::size_t n = x0.size();
    if (lower.size() != n || upper.size() != n) {
        throw ConfigError("minimize_bounded: bound sizes do not match the start point");
    }
    if (options.history < 1 || options.max_iterations < 0 || !(options.gradient_tolerance > 0.0) ||
        !(options.loss_tolerance > 0.0)) {
        throw ConfigError("minimize_bounded: invalid options");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lower[i] <= upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i])) {
            throw ConfigError("minimize_bounded: invalid bounds for variable " + std::to_string(i));
        }
    }

    auto project = [&](std::vector<double>& x) {
        for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
    };
    auto projected_gradient_norm = [&](const std::vector<double>& x, const std::vector<double>& g) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double moved = std::clamp(x[i] - g[i], lower[i], upper[i]) - x[i];
            m = std::max(m, std::abs(moved));
        }
        return m;
    };

    project(x0);
    Evaluator evaluate(objective, n);
    BoundedLbfgsResult result;
    result.x = std::move(x0);
    std::vector<double> g(n);
    double f = evaluate(result.x, g, result.x);
    result.loss_history.push_back(f);

    std::deque<Correction> memory;
    std::vector<double> direction(n), q(n), alpha_k;
    std::vector<double> x_trial(n), g_trial(n);
    std::vector<bool> active(n);

    for (;;) {
        if (projected_gradient_norm(result.x, g) < options.gradient_tolerance) {
            result.reason = StopReason::GradientTolerance;
            break;
        }
        if (result.iterations >= options.max_iterations) {
            result.reason = StopReason::MaxIterations;
            break;
        }

        for (std::size_t i = 0; i < n; ++i) {
            active[i] = lower[i] == upper[i] || (result.x[i] <= lower[i] && g[i] > 0.0) ||
                        (result.x[i] >= upper[i] && g[i] < 0.0);
        }

        // Two-loop recursion on the free variables.
        for (std::size_t i = 0; i < n; ++i) q[i] = active[i] ? 0.0 : g[i];
        alpha_k.assign(memory.size(), 0.0);
        for (std::size_t k = memory.size(); k-- > 0;) {
            alpha_k[k] = memory[k].rho * dot(memory[k].s, q);
            for (std::size_t i = 0; i < n; ++i) q[i] -= alpha_k[k] * memory[k].y[i];
        }
        double gamma = 1.0;
        if (!memory.empty()) {
            const auto& last = memory.back();
            gamma = dot(last.s, last.y) / dot(last.y, last.y);
        }
        for (std::size_t i = 0; i < n; ++i) q[i] *= gamma;
        for (std::size_t k = 0; k < memory.size(); ++k) {
            const double beta = memory[k].rho * dot(memory[k].y, q);
            for (std::size_t i = 0; i < n; ++i) q[i] += (alpha_k[k] - beta) * memory[k].s[i];
        }
        for (std::size_t i = 0; i < n; ++i) direction[i] = active[i] ? 0.0 : -q[i];

        double slope = dot(direction, g);
        if (!(slope < 0.0)) {
            memory.clear();
            for (std::size_t i = 0; i < n; ++i) direction[i] = active[i] ? 0.0 : -g[i];
            slope = dot(direction, g);
        }

        // Without curvature information the first trial moves a unit distance.
        double step = memory.empty() ? 1.0 / std::max(std::sqrt(dot(direction, direction)), 1e-300) : 1.0;
        bool accepted = false;
        double f_trial = f;
        for (int ls = 0; ls < options.max_line_search_steps; ++ls) {
            for (std::size_t i = 0; i < n; ++i) x_trial[i] = result.x[i] + step * direction[i];
            project(x_trial);
            double predicted = 0.0;
            for (std::size_t i = 0; i < n; ++i) predicted += g[i] * (x_trial[i] - result.x[i]);
            if (predicted >= 0.0) {
                step *= 0.5;
                continue;
            }
            f_trial = evaluate(x_trial, g_trial, result.x);
            if (f_trial <= f + options.armijo * predicted) {
                accepted = true;
                break;
            }
            // Safeguarded quadratic backtrack.
            const double denom = 2.0 * (f_trial - f - predicted);
            double next = denom > 0.0 ? -predicted / denom * step : 0.5 * step;
            step = std::clamp(next, 0.1 * step, 0.5 * step);
        }
        if (!accepted) {
            if (!memory.empty()) {
                memory.clear();
                continue;
            }
            result.reason = StopReason::LineSearchFailed;
            break;
        }

        Correction c{std::vector<double>(n), std::vector<double>(n), 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            c.s[i] = x_trial[i] - result.x[i];
            c.y[i] = g_trial[i] - g[i];
        }
        const double sy = dot(c.s, c.y);
        const double yy = dot(c.y, c.y);
        if (sy > 1e-12 * yy && sy > 0.0) {
            c.rho = 1.0 / sy;
            memory.push_back(std::move(c));
            if (memory.size() > static_cast<std::size_t>(options.history)) memory.pop_front();
        }

        const double f_previous = f;
        result.x = x_trial;
        g = g_trial;
        f = f_trial;
        ++result.iterations;
        result.loss_history.push_back(f);

        const double scale = std::max({std::abs(f_previous), std::abs(f), 1.0});
        if ((f_previous - f) / scale < options.loss_tolerance) {
            result.reason = StopReason::LossTolerance;
            break;
        }
    }

    result.loss = f;
    result.gradient = g;
    result.evaluations = evaluate.count();
    switch (result.reason) {
        case StopReason::GradientTolerance:
        case StopReason::LossTolerance: result.converged = true; break;
        case StopReason::LineSearchFailed:
            result.converged = projected_gradient_norm(result.x, g) < kLineSearchConvergedGradient;
            break;
        case StopReason::MaxIterations: result.converged = false; break;
    }
    return result;
}

}  // namespace cubicgen
