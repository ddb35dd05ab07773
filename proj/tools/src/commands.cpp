#include "experiments/commands.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "cubicgen/error.hpp"
#include "cubicgen/rng.hpp"
#include "cubicgen/wigner.hpp"
#include "cubicgen/worker_pool.hpp"
#include "experiments/artifacts.hpp"

namespace experiments {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using cubicgen::ConfigError;
using cubicgen::NumericError;
using cubicgen::OptResult;
using cubicgen::Param;
using cubicgen::ParamVector;
using cubicgen::TargetSpec;

fs::path resolve(const fs::path& out, const std::string& source) {
    const fs::path p(source);
    return p.is_absolute() ? p : out / p;
}

std::string bool_text(bool v) { return v ? "true" : "false"; }

void warn_tail(const cubicgen::Problem& problem, int cutoff, std::ostream& log) {
    const double tail = problem.target_state().tail_mass;
    if (tail >= cubicgen::kTailMassWarning) {
        log << "warning: target (r=" << problem.target().r << ", xi_dB=" << problem.target().xi_db
            << ") keeps tail mass " << tail << " in the top Fock levels at cutoff " << cutoff << '\n';
    }
}

void warn_cutoff(const OptResult& result, int cutoff, std::ostream& log) {
    if (!result.cutoff_converged) {
        log << "warning: fidelity changes by " << result.cutoff_check_delta << " between cutoff " << cutoff
            << " and " << cutoff + cubicgen::kCutoffCheckIncrement << '\n';
    }
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse " + what + " value '" + text + "'");
    }
}

const std::vector<std::string> kSweepHeader = {
    "r",     "xi_dB",  "fidelity", "detection_probability", "alpha",     "phi_bs",     "theta",
    "xi_abs", "phi_xi", "beta_abs", "phi_beta",              "converged", "iterations", "seed"};

std::vector<std::string> sweep_row(double r, double xi_db, const OptResult& res) {
    std::vector<std::string> row{format_number(r), format_number(xi_db), format_number(res.fidelity),
                                 format_number(res.detection_probability)};
    for (double v : res.x_opt.values()) row.push_back(format_number(v));
    row.push_back(bool_text(res.converged));
    row.push_back(std::to_string(res.iterations));
    row.push_back(std::to_string(res.seed));
    return row;
}

}  // namespace

int cmd_optimize(const RunConfig& config, const fs::path& out, std::ostream& log) {
    config.validate();
    const cubicgen::OptConfig opt = config.optimizer_config();
    const cubicgen::Problem problem(config.target, config.cutoff, config.strict);
    warn_tail(problem, config.cutoff, log);

    const cubicgen::RestartOutcome outcome = cubicgen::random_restart(problem, config.restarts, opt);
    const OptResult& best = outcome.best;
    warn_cutoff(best, config.cutoff, log);

    const json resolved = config.to_json();
    CsvTable restarts{{"r", "trial", "fidelity"}, {}};
    for (std::size_t i = 0; i < outcome.all.size(); ++i) {
        restarts.rows.push_back(
            {format_number(config.target.r), std::to_string(i), format_number(outcome.all[i].fidelity)});
    }
    write_csv(out / "restarts.csv", restarts, "restarts", resolved, config.seed);

    json doc = {{"schema_version", kSchemaVersion}, {"command", "optimize"}, {"seed", config.seed},
                {"config", resolved}};
    doc["result"] = result_to_json(best, config.target);
    doc["restarts"] = {{"count", config.restarts},
                       {"best_index", outcome.best_index},
                       {"converged", std::count_if(outcome.all.begin(), outcome.all.end(),
                                                   [](const OptResult& r) { return r.converged; })}};
    write_json(out / "result.json", doc);

    log << "optimize: fidelity " << best.fidelity << ", detection probability " << best.detection_probability
        << ", N " << best.norm_coefficient << " (" << (best.converged ? "converged" : "not converged") << ")\n";
    return best.converged ? kExitSuccess : kExitConvergenceGaps;
}

int cmd_sweep(const RunConfig& config, const fs::path& out, std::ostream& log) {
    config.validate();
    const cubicgen::OptConfig opt = config.optimizer_config();
    const std::vector<double> r_values = config.r_axis.values();
    const std::vector<double> xi_values = config.xi_axis.values();
    const auto anchor_r = static_cast<std::size_t>(config.r_axis.index_of(config.anchor.r));
    const auto anchor_xi = static_cast<std::size_t>(config.xi_axis.index_of(config.anchor.xi_db));
    const TargetSpec anchor{r_values[anchor_r], xi_values[anchor_xi]};

    cubicgen::OptConfig anchor_opt = opt;
    anchor_opt.check_cutoff = false;
    const cubicgen::RestartOutcome seed_run = cubicgen::random_restart(anchor, config.anchor_restarts, anchor_opt);
    if (!seed_run.best.converged) {
        log << "warning: anchor restarts did not converge; continuing from the best start\n";
    }
    const cubicgen::ContinuationGrid grid =
        cubicgen::continuation_grid(r_values, xi_values, anchor_r, anchor_xi, seed_run.best.x_opt, opt);

    CsvTable table{kSweepHeader, {}};
    json gaps = json::array();
    json cutoff_failures = json::array();
    double min_f = 1.0;
    double max_f = 0.0;
    for (std::size_t ri = 0; ri < r_values.size(); ++ri) {
        for (std::size_t xi = 0; xi < xi_values.size(); ++xi) {
            const OptResult& res = grid.at(ri, xi);
            table.rows.push_back(sweep_row(r_values[ri], xi_values[xi], res));
            min_f = std::min(min_f, res.fidelity);
            max_f = std::max(max_f, res.fidelity);
            const json cell = {{"r", r_values[ri]}, {"xi_dB", xi_values[xi]}};
            if (!res.converged) gaps.push_back(cell);
            if (!res.cutoff_converged) {
                cutoff_failures.push_back({{"r", r_values[ri]}, {"xi_dB", xi_values[xi]},
                                           {"delta", res.cutoff_check_delta}});
            }
        }
    }
    const json resolved = config.to_json();
    write_csv(out / "sweep.csv", table, "sweep", resolved, config.seed);

    const bool complete = gaps.empty();
    json summary = {{"schema_version", kSchemaVersion},
                    {"command", "sweep"},
                    {"seed", config.seed},
                    {"config", resolved},
                    {"grid", {{"r_points", r_values.size()}, {"xi_points", xi_values.size()}}},
                    {"min_fidelity", min_f},
                    {"max_fidelity", max_f},
                    {"anchor", result_to_json(grid.at(anchor_r, anchor_xi), anchor)},
                    {"status", complete ? "complete" : "complete_with_gaps"},
                    {"gaps", gaps},
                    {"cutoff_check_failures", cutoff_failures}};
    write_json(out / "summary.json", summary);

    if (!cutoff_failures.empty()) {
        log << "warning: " << cutoff_failures.size() << " of " << grid.results.size()
            << " cells change fidelity by >= " << cubicgen::kCutoffTolerance << " at cutoff "
            << config.cutoff + cubicgen::kCutoffCheckIncrement << '\n';
    }
    log << "sweep: " << grid.results.size() << " cells, fidelity in [" << min_f << ", " << max_f << "], "
        << gaps.size() << " gaps\n";
    return complete ? kExitSuccess : kExitConvergenceGaps;
}

int cmd_robustness(const RunConfig& config, const fs::path& out, std::ostream& log) {
    config.validate();
    const fs::path source = resolve(out, config.robustness_source);

    struct Point {
        TargetSpec target;
        ParamVector x;
    };
    std::vector<Point> points;
    if (source.extension() == ".json") {
        const json doc = read_json(source);
        if (!doc.contains("result")) throw ConfigError(source.string() + ": missing 'result'");
        const json& result = doc.at("result");
        const TargetSpec target{result.at("target").at("r").get<double>(), result.at("target").at("xi_db").get<double>()};
        points.push_back({target, params_from_json(result.at("parameters"))});
    } else {
        const CsvTable table = read_csv(source);
        const std::size_t r_col = table.column("r");
        const std::size_t xi_col = table.column("xi_dB");
        std::array<std::size_t, cubicgen::kParamCount> x_cols{};
        for (Param p : cubicgen::kAllParams) {
            x_cols[static_cast<std::size_t>(p)] = table.column(cubicgen::param_name(p));
        }
        for (const auto& row : table.rows) {
            const double xi_db = parse_number(row[xi_col], "xi_dB");
            if (std::abs(xi_db - config.robustness_xi_db) > 1e-9) continue;
            ParamVector x;
            for (Param p : cubicgen::kAllParams) {
                x[p] = parse_number(row[x_cols[static_cast<std::size_t>(p)]], std::string(cubicgen::param_name(p)));
            }
            points.push_back({{parse_number(row[r_col], "r"), xi_db}, x});
        }
        if (points.empty()) {
            throw ConfigError(source.string() + ": no rows with xi_dB = " + format_number(config.robustness_xi_db));
        }
    }
    // Parameters held fixed during optimization are not perturbed.
    if (config.transmission == TransmissionMode::Fixed) {
        for (auto& pt : points) pt.x.set_fixed(Param::PhiBs);
    }

    std::vector<std::vector<double>> samples(points.size());
    std::vector<double> unperturbed(points.size());
    cubicgen::parallel_for(points.size(), config.threads, [&](std::size_t i) {
        const cubicgen::Problem problem(points[i].target, config.cutoff, config.strict);
        unperturbed[i] = problem.fidelity(points[i].x);
        samples[i] = cubicgen::perturbation_study(points[i].x, problem, config.epsilon, config.trials,
                                                  cubicgen::stream_seed(config.seed, i), config.perturbation);
    });

    CsvTable table{{"r", "trial", "fidelity"}, {}};
    json rows = json::array();
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t t = 0; t < samples[i].size(); ++t) {
            table.rows.push_back({format_number(points[i].target.r), std::to_string(t), format_number(samples[i][t])});
        }
        const auto [lo, hi] = std::minmax_element(samples[i].begin(), samples[i].end());
        rows.push_back({{"r", points[i].target.r},
                        {"xi_dB", points[i].target.xi_db},
                        {"unperturbed_fidelity", unperturbed[i]},
                        {"min", *lo},
                        {"max", *hi},
                        {"mean", std::accumulate(samples[i].begin(), samples[i].end(), 0.0) /
                                     static_cast<double>(samples[i].size())},
                        {"std", sample_std(samples[i])}});
    }
    const json resolved = config.to_json();
    write_csv(out / "robustness.csv", table, "robustness", resolved, config.seed);
    write_json(out / "robustness.json", {{"schema_version", kSchemaVersion},
                                         {"command", "robustness"},
                                         {"seed", config.seed},
                                         {"config", resolved},
                                         {"source", source.string()},
                                         {"rows", rows}});
    log << "robustness: " << points.size() << " points x " << config.trials << " trials\n";
    return kExitSuccess;
}

int cmd_wigner(const RunConfig& config, const fs::path& out, std::ostream& log) {
    config.validate();
    const cubicgen::FockSpace single = cubicgen::FockSpace::single(config.cutoff);
    json state_info;
    cubicgen::StateVector state = cubicgen::fock_state(single, 0);
    switch (config.wigner_state) {
        case WignerState::Vacuum: state_info = {{"kind", "vacuum"}}; break;
        case WignerState::Target: {
            const cubicgen::TargetState t =
                cubicgen::cubic_phase_target(config.target.r, config.target.xi_db, single, config.strict);
            if (t.tail_mass >= cubicgen::kTailMassWarning) {
                log << "warning: target tail mass " << t.tail_mass << " at cutoff " << config.cutoff << '\n';
            }
            state = t.state;
            state_info = {{"kind", "target"}, {"r", config.target.r}, {"xi_db", config.target.xi_db}};
            break;
        }
        case WignerState::Result: {
            const fs::path source = resolve(out, config.wigner_source);
            const json doc = read_json(source);
            if (!doc.contains("result")) throw ConfigError(source.string() + ": missing 'result'");
            const ParamVector x = params_from_json(doc.at("result").at("parameters"));
            state = cubicgen::heralded_output(x, cubicgen::FockSpace::two_mode(config.cutoff)).state;
            state_info = {{"kind", "result"}, {"source", source.string()}};
            break;
        }
    }

    const auto q = cubicgen::linspace(config.wigner_q.min, config.wigner_q.max, config.wigner_q.points);
    const auto p = cubicgen::linspace(config.wigner_p.min, config.wigner_p.max, config.wigner_p.points);
    const cubicgen::WignerGrid grid = cubicgen::wigner(state, q, p);

    CsvTable table{{"q", "p", "w"}, {}};
    table.rows.reserve(q.size() * p.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        for (std::size_t j = 0; j < p.size(); ++j) {
            table.rows.push_back({format_number(q[i]), format_number(p[j]),
                                  format_number(grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))});
        }
    }
    const json resolved = config.to_json();
    write_csv(out / "wigner.csv", table, "wigner", resolved, config.seed);
    const double integral = (q.size() > 1 && p.size() > 1) ? grid.integral() : 0.0;
    write_json(out / "wigner.json", {{"schema_version", kSchemaVersion},
                                     {"command", "wigner"},
                                     {"seed", config.seed},
                                     {"config", resolved},
                                     {"state", state_info},
                                     {"integral", integral},
                                     {"min", grid.values.minCoeff()},
                                     {"max", grid.values.maxCoeff()}});
    log << "wigner: " << q.size() << "x" << p.size() << " grid, integral " << integral << ", min "
        << grid.values.minCoeff() << '\n';
    return kExitSuccess;
}

int cmd_gradcheck(const RunConfig& config, const fs::path& out, std::ostream& log) {
    config.validate();
    const cubicgen::Problem problem(config.target, config.cutoff, config.strict);
    cubicgen::OptConfig sampling;  // all parameters free, default bounds
    sampling.bounds = config.bounds;
    // Keep magnitudes clear of zero so central differences stay in the domain.
    const double magnitude_floor = 10.0 * config.gradcheck_step;

    const auto n = static_cast<std::size_t>(config.gradcheck_points);
    std::vector<ParamVector> points(n);
    std::vector<cubicgen::GradientBundle> analytic(n), numeric(n);
    cubicgen::parallel_for(n, config.threads, [&](std::size_t k) {
        ParamVector x = cubicgen::sample_start(sampling, cubicgen::stream_seed(config.seed, k));
        x[Param::XiAbs] = std::max(x[Param::XiAbs], magnitude_floor);
        x[Param::BetaAbs] = std::max(x[Param::BetaAbs], magnitude_floor);
        points[k] = x;
        analytic[k] = problem.loss_and_grad(x);
        numeric[k] = problem.loss_and_fd_grad(x, config.gradcheck_step);
        if (analytic[k].degenerate || numeric[k].degenerate) {
            throw NumericError("gradcheck: degenerate projection at point " + std::to_string(k));
        }
    });

    json max_error = json::object();
    json worst = json::object();
    bool passed = true;
    for (Param p : cubicgen::kAllParams) {
        const auto i = static_cast<std::size_t>(p);
        double max_rel = 0.0;
        std::size_t at = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const double a = analytic[k].grad[i];
            const double f = numeric[k].grad[i];
            if (!std::isfinite(a) || !std::isfinite(f)) {
                throw NumericError("gradcheck: non-finite gradient for " + std::string(cubicgen::param_name(p)) +
                                   " at point " + std::to_string(k));
            }
            const double rel = std::abs(a - f) / std::max({std::abs(a), std::abs(f), kGradientRelativeFloor});
            if (rel > max_rel) {
                max_rel = rel;
                at = k;
            }
        }
        const std::string name(cubicgen::param_name(p));
        max_error[name] = max_rel;
        worst[name] = {{"point", at},
                       {"analytic", analytic[at].grad[i]},
                       {"finite_difference", numeric[at].grad[i]},
                       {"parameters", params_to_json(points[at])}};
        if (max_rel > config.gradcheck_threshold) {
            passed = false;
            log << "gradcheck: " << name << " relative error " << max_rel << " at point " << at << '\n';
        }
    }
    const json resolved = config.to_json();
    write_json(out / "gradcheck.json", {{"schema_version", kSchemaVersion},
                                        {"command", "gradcheck"},
                                        {"seed", config.seed},
                                        {"config", resolved},
                                        {"points", n},
                                        {"step", config.gradcheck_step},
                                        {"relative_error_floor", kGradientRelativeFloor},
                                        {"threshold", config.gradcheck_threshold},
                                        {"max_relative_error", max_error},
                                        {"worst", worst},
                                        {"passed", passed}});
    log << "gradcheck: " << (passed ? "passed" : "FAILED") << '\n';
    return passed ? kExitSuccess : kExitNumericFailure;
}

int run_command(std::string_view name, const RunConfig& config, const fs::path& out, std::ostream& log) {
    try {
        if (name == "optimize") return cmd_optimize(config, out, log);
        if (name == "sweep") return cmd_sweep(config, out, log);
        if (name == "robustness") return cmd_robustness(config, out, log);
        if (name == "wigner") return cmd_wigner(config, out, log);
        if (name == "gradcheck") return cmd_gradcheck(config, out, log);
        log << "error: unknown command '" << name << "'\n";
        return kExitConfigError;
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const NumericError& e) {
        log << "error: " << e.what() << '\n';
        return kExitNumericFailure;
    } catch (const nlohmann::json::exception& e) {
        log << "error: malformed artifact: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::filesystem::filesystem_error& e) {
        log << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
}

}  // namespace experiments
