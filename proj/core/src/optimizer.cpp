#include "cubicgen/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cubicgen/error.hpp"
#include "cubicgen/lbfgsb.hpp"
#include "cubicgen/rng.hpp"
#include "cubicgen/worker_pool.hpp"

namespace cubicgen {
namespace {

ParamVector with_values(const ParamVector& like, std::span<const double> values) {
    ParamVector::Values v{};
    std::copy(values.begin(), values.end(), v.begin());
    return ParamVector(v, like.fixed_mask());
}

}  // namespace

void TargetSpec::validate() const {
    if (!std::isfinite(r) || !std::isfinite(xi_db)) {
        throw ConfigError("target: r and xi_dB must be finite");
    }
    if (r < 0.0 || xi_db < 0.0) {
        throw ConfigError("target: r and xi_dB must be >= 0");
    }
}

ParamBounds ParamBounds::defaults() {
    constexpr double pi = std::numbers::pi;
    ParamBounds b;
    b.lower = {-2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    b.upper = {2.0, pi / 2.0, 2.0 * pi, 1.5, 2.0 * pi, 3.0, 2.0 * pi};
    return b;
}

bool ParamBounds::contains(Param p, double value) const {
    const auto i = static_cast<std::size_t>(p);
    return value >= lower[i] && value <= upper[i];
}

void OptConfig::fix(Param p, double value) {
    fixed_mask[static_cast<std::size_t>(p)] = true;
    fixed_values[static_cast<std::size_t>(p)] = value;
}

void OptConfig::validate() const {
    for (Param p : kAllParams) {
        const auto i = static_cast<std::size_t>(p);
        if (!std::isfinite(bounds.lower[i]) || !std::isfinite(bounds.upper[i]) || bounds.lower[i] > bounds.upper[i]) {
            throw ConfigError("optimizer bounds for " + std::string(param_name(p)) + " are invalid");
        }
    }
    if (bounds.lower[static_cast<std::size_t>(Param::XiAbs)] < 0.0 ||
        bounds.lower[static_cast<std::size_t>(Param::BetaAbs)] < 0.0) {
        throw ConfigError("optimizer bounds: magnitudes must have lower bound >= 0");
    }
    if (max_iterations < 0) throw ConfigError("optimizer.max_iterations must be >= 0");
    if (!(gradient_tolerance > 0.0)) throw ConfigError("optimizer.gradient_tolerance must be > 0");
    if (!(loss_tolerance > 0.0)) throw ConfigError("optimizer.loss_tolerance must be > 0");
    if (history < 1) throw ConfigError("optimizer.history must be >= 1");
    if (!(finite_difference_step > 0.0)) throw ConfigError("optimizer.finite_difference_step must be > 0");
    if (cutoff < kInputPhotons) throw ConfigError("cutoff must be >= 2");
    if (threads < 1) throw ConfigError("threads must be >= 1");
}

Problem::Problem(TargetSpec target, int cutoff, bool strict)
    : target_(target),
      space_(FockSpace::two_mode(cutoff)),
      target_state_([&] {
          target.validate();
          return cubic_phase_target(target.r, target.xi_db, FockSpace::single(cutoff), strict);
      }()) {}

GradientBundle Problem::loss_and_grad(const ParamVector& x) const {
    try {
        return projected_state_gradient(x, target_state_.state, space_);
    } catch (const DegenerateProjection&) {
        GradientBundle sentinel;
        sentinel.degenerate = true;
        return sentinel;
    }
}

double Problem::loss(const ParamVector& x) const {
    try {
        return 1.0 - evaluate_fidelity(x, target_state_.state, space_);
    } catch (const DegenerateProjection&) {
        return 1.0;
    }
}

GradientBundle Problem::loss_and_fd_grad(const ParamVector& x, double step) const {
    GradientBundle bundle;
    try {
        const ProjectedOutput out = heralded_output(x, space_);
        bundle.fidelity = cubicgen::fidelity(out.state, target_state_.state);
        bundle.loss = 1.0 - bundle.fidelity;
        bundle.detection_probability = out.detection_probability;
        bundle.norm_coefficient = out.norm_coefficient;
    } catch (const DegenerateProjection&) {
        bundle.degenerate = true;
        return bundle;
    }
    for (Param p : kAllParams) {
        if (x.is_fixed(p)) continue;
        ParamVector plus = x;
        ParamVector minus = x;
        plus[p] += step;
        minus[p] -= step;
        const bool magnitude = p == Param::XiAbs || p == Param::BetaAbs;
        if (magnitude && minus[p] < 0.0) {
            bundle.grad[static_cast<std::size_t>(p)] = (loss(plus) - bundle.loss) / step;
        } else {
            bundle.grad[static_cast<std::size_t>(p)] = (loss(plus) - loss(minus)) / (2.0 * step);
        }
    }
    return bundle;
}

GradientBundle loss_and_grad(const ParamVector& x, const TargetSpec& target, const FockSpace& space) {
    space.require_modes(2, "loss_and_grad");
    return Problem(target, space.cutoff()).loss_and_grad(x);
}

OptResult minimize(const ParamVector& x0, const Problem& problem, const OptConfig& config) {
    config.validate();
    x0.validate();
    if (problem.space().cutoff() != config.cutoff) {
        throw ConfigError("minimize: problem cutoff differs from config.cutoff");
    }

    ParamVector start = x0;
    for (Param p : kAllParams) {
        if (config.fixed_mask[static_cast<std::size_t>(p)]) start.set_fixed(p);
    }

    std::vector<double> lower(kParamCount), upper(kParamCount), values(kParamCount);
    for (Param p : kAllParams) {
        const auto i = static_cast<std::size_t>(p);
        values[i] = start[p];
        if (start.is_fixed(p)) {
            lower[i] = upper[i] = start[p];
        } else {
            if (!config.bounds.contains(p, start[p])) {
                std::ostringstream msg;
                msg << "minimize: start value " << start[p] << " for " << param_name(p) << " is outside ["
                    << config.bounds.lower[i] << ", " << config.bounds.upper[i] << "]";
                throw ConfigError(msg.str());
            }
            lower[i] = config.bounds.lower[i];
            upper[i] = config.bounds.upper[i];
        }
    }

    const Objective objective = [&](std::span<const double> x, std::span<double> grad) {
        const ParamVector point = with_values(start, x);
        const GradientBundle b = config.gradient == GradientMode::Analytic
                                     ? problem.loss_and_grad(point)
                                     : problem.loss_and_fd_grad(point, config.finite_difference_step);
        std::copy(b.grad.begin(), b.grad.end(), grad.begin());
        return b.loss;
    };

    BoundedLbfgsOptions options;
    options.history = config.history;
    options.max_iterations = config.max_iterations;
    options.gradient_tolerance = config.gradient_tolerance;
    options.loss_tolerance = config.loss_tolerance;
    const BoundedLbfgsResult run = minimize_bounded(objective, values, lower, upper, options);

    OptResult result;
    result.x_opt = with_values(start, run.x);
    // Free angles on the 2 pi end of their range map to 0, so equivalent
    // optima share one representation.
    const ParamVector canonical = result.x_opt.canonical();
    for (Param p : kAllParams) {
        if (!result.x_opt.is_fixed(p) && config.bounds.contains(p, canonical[p])) result.x_opt[p] = canonical[p];
    }
    result.fidelity = 1.0 - run.loss;
    result.loss_history = run.loss_history;
    result.converged = run.converged;
    result.iterations = run.iterations;
    result.evaluations = run.evaluations;
    result.seed = config.seed;
    result.stop_reason = std::string(stop_reason_name(run.reason));
    result.target_tail_mass = problem.target_state().tail_mass;
    try {
        const ProjectedOutput out = heralded_output(result.x_opt, problem.space());
        result.detection_probability = out.detection_probability;
        result.norm_coefficient = out.norm_coefficient;
    } catch (const DegenerateProjection&) {
        result.converged = false;
        result.stop_reason = "degenerate_projection";
    }

    if (config.check_cutoff) {
        const Problem finer(problem.target(), config.cutoff + kCutoffCheckIncrement, config.strict);
        result.cutoff_check_delta = std::abs(finer.fidelity(result.x_opt) - result.fidelity);
        result.cutoff_converged = result.cutoff_check_delta < kCutoffTolerance;
        if (config.strict && !result.cutoff_converged) {
            std::ostringstream msg;
            msg << "fidelity changes by " << result.cutoff_check_delta << " between cutoff " << config.cutoff
                << " and " << config.cutoff + kCutoffCheckIncrement << "; increase the cutoff";
            throw NumericError(msg.str());
        }
    }
    return result;
}

OptResult minimize(const ParamVector& x0, const TargetSpec& target, const OptConfig& config) {
    const Problem problem(target, config.cutoff, config.strict);
    return minimize(x0, problem, config);
}

ParamVector sample_start(const OptConfig& config, std::uint64_t stream) {
    Rng rng(stream);
    ParamVector x;
    for (Param p : kAllParams) {
        const auto i = static_cast<std::size_t>(p);
        // Draw for every parameter so a start does not depend on the mask.
        const double draw = rng.uniform(config.bounds.lower[i], config.bounds.upper[i]);
        if (config.fixed_mask[i]) {
            x[p] = config.fixed_values[i];
            x.set_fixed(p);
        } else {
            x[p] = draw;
        }
    }
    return x;
}

RestartOutcome random_restart(const Problem& problem, int n_starts, const OptConfig& config) {
    if (n_starts < 1) throw ConfigError("random_restart: n_starts must be >= 1");
    config.validate();
    OptConfig per_start = config;
    per_start.check_cutoff = false;

    RestartOutcome outcome;
    outcome.all.resize(static_cast<std::size_t>(n_starts));
    parallel_for(outcome.all.size(), config.threads, [&](std::size_t i) {
        OptConfig local = per_start;
        local.seed = stream_seed(config.seed, i);
        outcome.all[i] = minimize(sample_start(config, local.seed), problem, local);
    });

    bool any = false;
    for (std::size_t i = 0; i < outcome.all.size(); ++i) {
        const OptResult& r = outcome.all[i];
        if (r.stop_reason == "degenerate_projection") continue;
        if (!any || r.fidelity > outcome.all[outcome.best_index].fidelity) {
            outcome.best_index = i;
            any = true;
        }
    }
    if (!any) {
        std::ostringstream msg;
        msg << "random_restart: all " << n_starts << " starts ended on a degenerate projection (seeds";
        for (const auto& r : outcome.all) msg << ' ' << r.seed;
        msg << ')';
        throw NumericError(msg.str());
    }
    outcome.best = outcome.all[outcome.best_index];
    if (config.check_cutoff) {
        // Re-run the cutoff check on the winner only.
        OptConfig check = config;
        check.max_iterations = 0;
        check.seed = outcome.best.seed;
        OptResult verified = minimize(outcome.best.x_opt, problem, check);
        outcome.best.cutoff_check_delta = verified.cutoff_check_delta;
        outcome.best.cutoff_converged = verified.cutoff_converged;
    }
    return outcome;
}

RestartOutcome random_restart(const TargetSpec& target, int n_starts, const OptConfig& config) {
    const Problem problem(target, config.cutoff, config.strict);
    return random_restart(problem, n_starts, config);
}

std::vector<OptResult> continuation(std::span<const TargetSpec> targets, const ParamVector& x_seed,
                                    const OptConfig& config) {
    std::vector<OptResult> out;
    out.reserve(targets.size());
    ParamVector start = x_seed;
    for (const TargetSpec& t : targets) {
        const Problem problem(t, config.cutoff, config.strict);
        OptResult r = minimize(start, problem, config);
        if (r.converged) start = r.x_opt;
        out.push_back(std::move(r));
    }
    return out;
}

bool ContinuationGrid::has_gaps() const {
    return std::any_of(results.begin(), results.end(), [](const OptResult& r) { return !r.converged; });
}

ContinuationGrid continuation_grid(const std::vector<double>& r_values, const std::vector<double>& xi_values,
                                   std::size_t anchor_r, std::size_t anchor_xi, const ParamVector& x_anchor,
                                   const OptConfig& config) {
    if (r_values.empty() || xi_values.empty()) throw ConfigError("continuation_grid: empty axis");
    if (anchor_r >= r_values.size() || anchor_xi >= xi_values.size()) {
        throw ConfigError("continuation_grid: anchor outside the grid");
    }
    const std::size_t nr = r_values.size();
    const std::size_t nxi = xi_values.size();
    ContinuationGrid grid{r_values, xi_values, std::vector<OptResult>(nr * nxi)};

    auto run_chain = [&](const std::vector<std::pair<std::size_t, std::size_t>>& cells, const ParamVector& seed) {
        std::vector<TargetSpec> targets;
        targets.reserve(cells.size());
        for (auto [ri, xi] : cells) targets.push_back({r_values[ri], xi_values[xi]});
        auto results = continuation(targets, seed, config);
        for (std::size_t k = 0; k < cells.size(); ++k) {
            grid.results[cells[k].second * nr + cells[k].first] = std::move(results[k]);
        }
    };
    auto seed_from = [&](std::size_t ri, std::size_t xi) {
        const OptResult& r = grid.results[xi * nr + ri];
        return r.x_opt;
    };

    // Anchor row: the anchor itself first, then outward in r.
    {
        std::vector<std::pair<std::size_t, std::size_t>> right;
        for (std::size_t ri = anchor_r; ri < nr; ++ri) right.emplace_back(ri, anchor_xi);
        run_chain(right, x_anchor);
        std::vector<std::pair<std::size_t, std::size_t>> left;
        for (std::size_t ri = anchor_r; ri-- > 0;) left.emplace_back(ri, anchor_xi);
        if (!left.empty()) run_chain(left, seed_from(anchor_r, anchor_xi));
    }

    // Columns: outward in xi from the anchor row, one pair of chains per r.
    parallel_for(nr, config.threads, [&](std::size_t ri) {
        const ParamVector seed = seed_from(ri, anchor_xi);
        std::vector<std::pair<std::size_t, std::size_t>> up;
        for (std::size_t xi = anchor_xi + 1; xi < nxi; ++xi) up.emplace_back(ri, xi);
        if (!up.empty()) run_chain(up, seed);
        std::vector<std::pair<std::size_t, std::size_t>> down;
        for (std::size_t xi = anchor_xi; xi-- > 0;) down.emplace_back(ri, xi);
        if (!down.empty()) run_chain(down, seed);
    });
    return grid;
}

std::vector<double> perturbation_study(const ParamVector& x_opt, const Problem& problem, double epsilon, int trials,
                                       std::uint64_t seed, PerturbationMode mode) {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("perturbation_study: epsilon must be >= 0");
    if (trials < 1) throw ConfigError("perturbation_study: trials must be >= 1");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(trials));
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        ParamVector x = x_opt;
        for (Param p : kAllParams) {
            const double u = rng.uniform(-epsilon, epsilon);
            if (x.is_fixed(p)) continue;
            x[p] = mode == PerturbationMode::Multiplicative ? x[p] * (1.0 + u) : x[p] + u;
            if ((p == Param::XiAbs || p == Param::BetaAbs) && x[p] < 0.0) x[p] = 0.0;
        }
        out.push_back(problem.fidelity(x));
    }
    return out;
}

}  // namespace cubicgen
