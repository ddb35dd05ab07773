#include "experiments/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "cubicgen/error.hpp"

namespace experiments {
namespace {

using nlohmann::json;
using cubicgen::ConfigError;
using cubicgen::Param;

std::size_t line_at(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Walks the config text and the parsed document together so that every
// error can point at the line holding the offending key.
class Reader {
public:
    Reader(std::string_view text, std::string_view source) : text_(text), source_(source) {}

    [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& message) const {
        std::ostringstream out;
        out << source_;
        if (const std::size_t line = line_of(path); line > 0) out << ':' << line;
        out << ": " << dotted(path) << ": " << message;
        throw ConfigError(out.str());
    }

    void require_object(const json& node, const std::vector<std::string>& path) const {
        if (!node.is_object()) fail(path, "expected an object");
    }

    void allow_only(const json& node, const std::vector<std::string>& path,
                    std::initializer_list<std::string_view> keys) const {
        for (const auto& [key, value] : node.items()) {
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
                auto child = path;
                child.push_back(key);
                fail(child, "unknown field");
            }
        }
    }

    const json* child(const json& node, const std::vector<std::string>& path, const std::string& key) const {
        require_object(node, path);
        const auto it = node.find(key);
        return it == node.end() ? nullptr : &*it;
    }

    void number(const json& node, std::vector<std::string> path, const std::string& key, double& out) const {
        if (const json* v = child(node, path, key)) {
            path.push_back(key);
            if (!v->is_number()) fail(path, "expected a number");
            out = v->get<double>();
            if (!std::isfinite(out)) fail(path, "must be finite");
        }
    }

    void integer(const json& node, std::vector<std::string> path, const std::string& key, int& out) const {
        if (const json* v = child(node, path, key)) {
            path.push_back(key);
            if (!v->is_number_integer()) fail(path, "expected an integer");
            const auto value = v->get<long long>();
            if (value < -1000000000LL || value > 1000000000LL) fail(path, "integer out of range");
            out = static_cast<int>(value);
        }
    }

    void unsigned64(const json& node, std::vector<std::string> path, const std::string& key,
                    std::uint64_t& out) const {
        if (const json* v = child(node, path, key)) {
            path.push_back(key);
            if (!v->is_number_unsigned()) fail(path, "expected a non-negative integer");
            out = v->get<std::uint64_t>();
        }
    }

    void boolean(const json& node, std::vector<std::string> path, const std::string& key, bool& out) const {
        if (const json* v = child(node, path, key)) {
            path.push_back(key);
            if (!v->is_boolean()) fail(path, "expected true or false");
            out = v->get<bool>();
        }
    }

    void string(const json& node, std::vector<std::string> path, const std::string& key, std::string& out) const {
        if (const json* v = child(node, path, key)) {
            path.push_back(key);
            if (!v->is_string()) fail(path, "expected a string");
            out = v->get<std::string>();
        }
    }

private:
    static std::string dotted(const std::vector<std::string>& path) {
        std::string out;
        for (const auto& p : path) out += (out.empty() ? "" : ".") + p;
        return out.empty() ? "<root>" : out;
    }

    // Line of the innermost key found by searching each path component after
    // the previous one; 0 when the key is absent from the text.
    std::size_t line_of(const std::vector<std::string>& path) const {
        std::size_t pos = 0;
        std::size_t found_any = std::string_view::npos;
        for (const auto& key : path) {
            const std::string quoted = '"' + key + '"';
            const std::size_t at = text_.find(quoted, pos);
            if (at == std::string_view::npos) break;
            pos = at + quoted.size();
            found_any = at;
        }
        return found_any == std::string_view::npos ? 0 : line_at(text_, found_any);
    }

    std::string_view text_;
    std::string_view source_;
};

void read_axis(const Reader& in, const json& root, const std::vector<std::string>& parent, const std::string& key,
               AxisSpec& axis) {
    const json* node = in.child(root, parent, key);
    if (!node) return;
    auto path = parent;
    path.push_back(key);
    in.require_object(*node, path);
    in.allow_only(*node, path, {"min", "max", "step"});
    in.number(*node, path, "min", axis.min);
    in.number(*node, path, "max", axis.max);
    in.number(*node, path, "step", axis.step);
    if (!(axis.step > 0.0)) {
        path.push_back("step");
        in.fail(path, "must be > 0");
    }
    if (axis.max < axis.min) in.fail(path, "range is empty (max < min)");
}

void read_sample_axis(const Reader& in, const json& root, const std::vector<std::string>& parent,
                      const std::string& key, SampleAxis& axis) {
    const json* node = in.child(root, parent, key);
    if (!node) return;
    auto path = parent;
    path.push_back(key);
    in.require_object(*node, path);
    in.allow_only(*node, path, {"min", "max", "points"});
    in.number(*node, path, "min", axis.min);
    in.number(*node, path, "max", axis.max);
    in.integer(*node, path, "points", axis.points);
    if (axis.points < 1) {
        path.push_back("points");
        in.fail(path, "must be >= 1");
    }
    if (axis.max < axis.min) in.fail(path, "range is empty (max < min)");
}

void read_target(const Reader& in, const json& root, const std::vector<std::string>& parent, const std::string& key,
                 cubicgen::TargetSpec& target) {
    const json* node = in.child(root, parent, key);
    if (!node) return;
    auto path = parent;
    path.push_back(key);
    in.require_object(*node, path);
    in.allow_only(*node, path, {"r", "xi_db"});
    in.number(*node, path, "r", target.r);
    in.number(*node, path, "xi_db", target.xi_db);
    if (target.r < 0.0) {
        path.push_back("r");
        in.fail(path, "must be >= 0");
    }
    if (target.xi_db < 0.0) {
        path.push_back("xi_db");
        in.fail(path, "must be >= 0");
    }
}

template <typename Enum>
Enum read_choice(const Reader& in, const json& node, const std::vector<std::string>& path, const std::string& key,
                 Enum current, std::initializer_list<std::pair<std::string_view, Enum>> choices) {
    std::string text;
    for (const auto& [name, value] : choices) {
        if (value == current) text = std::string(name);
    }
    in.string(node, path, key, text);
    for (const auto& [name, value] : choices) {
        if (name == text) return value;
    }
    auto child = path;
    child.push_back(key);
    std::string options;
    for (const auto& [name, value] : choices) options += (options.empty() ? "" : ", ") + std::string(name);
    in.fail(child, "expected one of: " + options);
}

std::string_view gradient_name(cubicgen::GradientMode mode) {
    return mode == cubicgen::GradientMode::Analytic ? "analytic" : "finite_difference";
}

std::string_view perturbation_name(cubicgen::PerturbationMode mode) {
    return mode == cubicgen::PerturbationMode::Multiplicative ? "multiplicative" : "additive";
}

std::string_view wigner_state_name(WignerState s) {
    switch (s) {
        case WignerState::Target: return "target";
        case WignerState::Vacuum: return "vacuum";
        case WignerState::Result: return "result";
    }
    return "target";
}

}  // namespace

std::vector<double> AxisSpec::values() const {
    // Tolerate rounding in (max - min) / step.
    const auto count = static_cast<long>(std::floor((max - min) / step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) out.push_back(min + static_cast<double>(i) * step);
    return out;
}

long AxisSpec::index_of(double value) const {
    const auto v = values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::abs(v[i] - value) <= 1e-9 * std::max(1.0, std::abs(value))) return static_cast<long>(i);
    }
    return -1;
}

void RunConfig::validate() const {
    auto bad = [](const std::string& field, const std::string& message) {
        throw ConfigError(field + ": " + message);
    };
    if (cutoff < cubicgen::kInputPhotons) bad("cutoff", "must be >= 2");
    if (threads < 1) bad("threads", "must be >= 1");
    if (transmission == TransmissionMode::Fixed && !(transmission_value > 0.0 && transmission_value <= 1.0)) {
        bad("transmission.value", "must lie in (0, 1]");
    }
    if (!(r_axis.step > 0.0) || r_axis.max < r_axis.min) bad("grid.r", "invalid range");
    if (!(xi_axis.step > 0.0) || xi_axis.max < xi_axis.min) bad("grid.xi_db", "invalid range");
    if (r_axis.min < 0.0 || xi_axis.min < 0.0) bad("grid", "r and xi_db must be >= 0");
    if (r_axis.index_of(anchor.r) < 0 || xi_axis.index_of(anchor.xi_db) < 0) {
        bad("grid.anchor", "anchor is not a grid point");
    }
    if (restarts < 1) bad("optimizer.restarts", "must be >= 1");
    if (anchor_restarts < 1) bad("optimizer.anchor_restarts", "must be >= 1");
    if (!(epsilon >= 0.0)) bad("robustness.epsilon", "must be >= 0");
    if (trials < 1) bad("robustness.trials", "must be >= 1");
    if (gradcheck_points < 1) bad("gradcheck.points", "must be >= 1");
    if (!(gradcheck_step > 0.0)) bad("gradcheck.step", "must be > 0");
    if (!(gradcheck_threshold > 0.0)) bad("gradcheck.threshold", "must be > 0");
    try {
        optimizer_config().validate();
    } catch (const ConfigError& e) {
        bad("optimizer", e.what());
    }
}

cubicgen::OptConfig RunConfig::optimizer_config() const {
    cubicgen::OptConfig c;
    c.bounds = bounds;
    c.max_iterations = max_iterations;
    c.gradient_tolerance = gradient_tolerance;
    c.loss_tolerance = loss_tolerance;
    c.history = history;
    c.seed = seed;
    c.gradient = gradient;
    c.finite_difference_step = finite_difference_step;
    c.cutoff = cutoff;
    c.strict = strict;
    c.threads = threads;
    if (transmission == TransmissionMode::Fixed) c.fix_transmission(transmission_value);
    return c;
}

nlohmann::json RunConfig::to_json() const {
    json bounds_json = json::object();
    for (Param p : cubicgen::kAllParams) {
        const auto i = static_cast<std::size_t>(p);
        bounds_json[std::string(cubicgen::param_name(p))] = {bounds.lower[i], bounds.upper[i]};
    }
    json transmission_json = {{"mode", transmission == TransmissionMode::Free ? "free" : "fixed"}};
    if (transmission == TransmissionMode::Fixed) transmission_json["value"] = transmission_value;
    auto axis = [](const AxisSpec& a) { return json{{"min", a.min}, {"max", a.max}, {"step", a.step}}; };
    auto samples = [](const SampleAxis& a) { return json{{"min", a.min}, {"max", a.max}, {"points", a.points}}; };
    return {
        {"schema_version", kSchemaVersion},
        {"seed", seed},
        {"cutoff", cutoff},
        {"strict", strict},
        {"threads", threads},
        {"target", {{"r", target.r}, {"xi_db", target.xi_db}}},
        {"transmission", transmission_json},
        {"grid", {{"r", axis(r_axis)}, {"xi_db", axis(xi_axis)}, {"anchor", {{"r", anchor.r}, {"xi_db", anchor.xi_db}}}}},
        {"optimizer",
         {{"max_iterations", max_iterations},
          {"gradient_tolerance", gradient_tolerance},
          {"loss_tolerance", loss_tolerance},
          {"history", history},
          {"restarts", restarts},
          {"anchor_restarts", anchor_restarts},
          {"gradient", gradient_name(gradient)},
          {"finite_difference_step", finite_difference_step},
          {"bounds", bounds_json}}},
        {"robustness",
         {{"epsilon", epsilon},
          {"trials", trials},
          {"xi_db", robustness_xi_db},
          {"source", robustness_source},
          {"perturbation", perturbation_name(perturbation)}}},
        {"wigner",
         {{"state", wigner_state_name(wigner_state)},
          {"source", wigner_source},
          {"q", samples(wigner_q)},
          {"p", samples(wigner_p)}}},
        {"gradcheck", {{"points", gradcheck_points}, {"step", gradcheck_step}, {"threshold", gradcheck_threshold}}},
    };
}

RunConfig parse_config(std::string_view text, std::string_view source) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        std::ostringstream out;
        out << source << ':' << line_at(text, e.byte == 0 ? 0 : e.byte - 1) << ": malformed JSON: " << e.what();
        throw ConfigError(out.str());
    }
    const Reader in(text, source);
    const std::vector<std::string> top;
    in.require_object(root, top);
    in.allow_only(root, top,
                  {"schema_version", "seed", "cutoff", "strict", "threads", "target", "transmission", "grid",
                   "optimizer", "robustness", "wigner", "gradcheck"});

    int version = 0;
    if (!root.contains("schema_version")) in.fail({"schema_version"}, "missing (expected 1)");
    in.integer(root, top, "schema_version", version);
    if (version != kSchemaVersion) {
        in.fail({"schema_version"}, "unsupported version " + std::to_string(version) + " (expected 1)");
    }

    RunConfig c;
    in.unsigned64(root, top, "seed", c.seed);
    in.integer(root, top, "cutoff", c.cutoff);
    if (c.cutoff < cubicgen::kInputPhotons) in.fail({"cutoff"}, "must be >= 2");
    in.boolean(root, top, "strict", c.strict);
    in.integer(root, top, "threads", c.threads);
    if (c.threads < 1) in.fail({"threads"}, "must be >= 1");
    read_target(in, root, top, "target", c.target);

    if (const json* t = in.child(root, top, "transmission")) {
        const std::vector<std::string> path{"transmission"};
        in.require_object(*t, path);
        in.allow_only(*t, path, {"mode", "value"});
        c.transmission = read_choice(in, *t, path, "mode", c.transmission,
                                     {{"free", TransmissionMode::Free}, {"fixed", TransmissionMode::Fixed}});
        in.number(*t, path, "value", c.transmission_value);
        if (c.transmission == TransmissionMode::Fixed && !(c.transmission_value > 0.0 && c.transmission_value <= 1.0)) {
            in.fail({"transmission", "value"}, "must lie in (0, 1]");
        }
    }

    if (const json* g = in.child(root, top, "grid")) {
        const std::vector<std::string> path{"grid"};
        in.require_object(*g, path);
        in.allow_only(*g, path, {"r", "xi_db", "anchor"});
        read_axis(in, *g, path, "r", c.r_axis);
        read_axis(in, *g, path, "xi_db", c.xi_axis);
        read_target(in, *g, path, "anchor", c.anchor);
        if (c.r_axis.index_of(c.anchor.r) < 0 || c.xi_axis.index_of(c.anchor.xi_db) < 0) {
            in.fail({"grid", "anchor"}, "anchor is not a grid point");
        }
    }

    if (const json* o = in.child(root, top, "optimizer")) {
        const std::vector<std::string> path{"optimizer"};
        in.require_object(*o, path);
        in.allow_only(*o, path,
                      {"max_iterations", "gradient_tolerance", "loss_tolerance", "history", "restarts",
                       "anchor_restarts", "gradient", "finite_difference_step", "bounds"});
        in.integer(*o, path, "max_iterations", c.max_iterations);
        in.number(*o, path, "gradient_tolerance", c.gradient_tolerance);
        in.number(*o, path, "loss_tolerance", c.loss_tolerance);
        in.integer(*o, path, "history", c.history);
        in.integer(*o, path, "restarts", c.restarts);
        in.integer(*o, path, "anchor_restarts", c.anchor_restarts);
        c.gradient = read_choice(in, *o, path, "gradient", c.gradient,
                                 {{"analytic", cubicgen::GradientMode::Analytic},
                                  {"finite_difference", cubicgen::GradientMode::FiniteDifference}});
        in.number(*o, path, "finite_difference_step", c.finite_difference_step);
        if (c.max_iterations < 0) in.fail({"optimizer", "max_iterations"}, "must be >= 0");
        if (!(c.gradient_tolerance > 0.0)) in.fail({"optimizer", "gradient_tolerance"}, "must be > 0");
        if (!(c.loss_tolerance > 0.0)) in.fail({"optimizer", "loss_tolerance"}, "must be > 0");
        if (c.history < 1) in.fail({"optimizer", "history"}, "must be >= 1");
        if (c.restarts < 1) in.fail({"optimizer", "restarts"}, "must be >= 1");
        if (c.anchor_restarts < 1) in.fail({"optimizer", "anchor_restarts"}, "must be >= 1");
        if (!(c.finite_difference_step > 0.0)) in.fail({"optimizer", "finite_difference_step"}, "must be > 0");
        if (const json* b = in.child(*o, path, "bounds")) {
            const std::vector<std::string> bpath{"optimizer", "bounds"};
            in.require_object(*b, bpath);
            for (const auto& [key, value] : b->items()) {
                auto field = bpath;
                field.push_back(key);
                const auto match = std::find_if(cubicgen::kAllParams.begin(), cubicgen::kAllParams.end(),
                                                [&](Param p) { return cubicgen::param_name(p) == key; });
                if (match == cubicgen::kAllParams.end()) in.fail(field, "unknown parameter");
                if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
                    in.fail(field, "expected [lower, upper]");
                }
                const double lo = value[0].get<double>();
                const double hi = value[1].get<double>();
                if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) in.fail(field, "need finite lower <= upper");
                const bool magnitude = *match == Param::XiAbs || *match == Param::BetaAbs;
                if (magnitude && lo < 0.0) in.fail(field, "magnitude bounds must be >= 0");
                const auto i = static_cast<std::size_t>(*match);
                c.bounds.lower[i] = lo;
                c.bounds.upper[i] = hi;
            }
        }
    }

    if (const json* r = in.child(root, top, "robustness")) {
        const std::vector<std::string> path{"robustness"};
        in.require_object(*r, path);
        in.allow_only(*r, path, {"epsilon", "trials", "xi_db", "source", "perturbation"});
        in.number(*r, path, "epsilon", c.epsilon);
        in.integer(*r, path, "trials", c.trials);
        in.number(*r, path, "xi_db", c.robustness_xi_db);
        in.string(*r, path, "source", c.robustness_source);
        c.perturbation = read_choice(in, *r, path, "perturbation", c.perturbation,
                                     {{"multiplicative", cubicgen::PerturbationMode::Multiplicative},
                                      {"additive", cubicgen::PerturbationMode::Additive}});
        if (!(c.epsilon >= 0.0)) in.fail({"robustness", "epsilon"}, "must be >= 0");
        if (c.trials < 1) in.fail({"robustness", "trials"}, "must be >= 1");
    }

    if (const json* w = in.child(root, top, "wigner")) {
        const std::vector<std::string> path{"wigner"};
        in.require_object(*w, path);
        in.allow_only(*w, path, {"state", "source", "q", "p"});
        c.wigner_state = read_choice(in, *w, path, "state", c.wigner_state,
                                     {{"target", WignerState::Target},
                                      {"vacuum", WignerState::Vacuum},
                                      {"result", WignerState::Result}});
        in.string(*w, path, "source", c.wigner_source);
        read_sample_axis(in, *w, path, "q", c.wigner_q);
        read_sample_axis(in, *w, path, "p", c.wigner_p);
    }

    if (const json* g = in.child(root, top, "gradcheck")) {
        const std::vector<std::string> path{"gradcheck"};
        in.require_object(*g, path);
        in.allow_only(*g, path, {"points", "step", "threshold"});
        in.integer(*g, path, "points", c.gradcheck_points);
        in.number(*g, path, "step", c.gradcheck_step);
        in.number(*g, path, "threshold", c.gradcheck_threshold);
        if (c.gradcheck_points < 1) in.fail({"gradcheck", "points"}, "must be >= 1");
        if (!(c.gradcheck_step > 0.0)) in.fail({"gradcheck", "step"}, "must be > 0");
        if (!(c.gradcheck_threshold > 0.0)) in.fail({"gradcheck", "threshold"}, "must be > 0");
    }

    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream text;
    text << file.rdbuf();
    return parse_config(text.str(), path.string());
}

}  // namespace experiments
