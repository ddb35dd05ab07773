#include "experiments/artifacts.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cubicgen/error.hpp"

namespace experiments {
namespace {

using nlohmann::json;
using cubicgen::ConfigError;
using cubicgen::Param;

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (value == 0.0) value = 0.0;  // drop the sign of -0
    std::array<char, 32> buffer{};
    std::snprintf(buffer.data(), buffer.size(), "%.10g", value);
    return buffer.data();
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ConfigError("CSV is missing column '" + std::string(name) + "'");
}

void write_csv(const std::filesystem::path& path, const CsvTable& table, std::string_view kind,
               const nlohmann::json& config, std::uint64_t seed) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << "# cubicgen " << kind << " schema_version=1\n";
    out << "# seed=" << seed << '\n';
    out << "# config=" << config.dump() << '\n';
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
    if (!out) throw ConfigError("failed writing " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("expected artifact not found: " + path.string());
    CsvTable table;
    std::string line;
    bool have_header = false;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto fields = split_line(line);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw ConfigError(path.string() + ":" + std::to_string(line_number) + ": expected " +
                              std::to_string(table.header.size()) + " fields, found " +
                              std::to_string(fields.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    if (!have_header) throw ConfigError(path.string() + ": no CSV header");
    return table;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& document) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << document.dump(2) << '\n';
    if (!out) throw ConfigError("failed writing " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("expected artifact not found: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": malformed JSON: " + e.what());
    }
}

nlohmann::json params_to_json(const cubicgen::ParamVector& x) {
    json out = json::object();
    for (Param p : cubicgen::kAllParams) {
        json entry = {{"fixed", x.is_fixed(p)}};
        if (cubicgen::is_angle(p)) {
            entry["radians"] = x[p];
            entry["pi_multiple"] = x[p] / std::numbers::pi;
        } else {
            entry["value"] = x[p];
        }
        out[std::string(cubicgen::param_name(p))] = std::move(entry);
    }
    return out;
}

cubicgen::ParamVector params_from_json(const nlohmann::json& node) {
    cubicgen::ParamVector x;
    for (Param p : cubicgen::kAllParams) {
        const std::string name(cubicgen::param_name(p));
        if (!node.contains(name)) throw ConfigError("parameters: missing '" + name + "'");
        const json& entry = node.at(name);
        const char* key = cubicgen::is_angle(p) ? "radians" : "value";
        if (!entry.contains(key) || !entry.at(key).is_number()) {
            throw ConfigError("parameters." + name + ": missing numeric '" + key + "'");
        }
        x[p] = entry.at(key).get<double>();
        if (entry.value("fixed", false)) x.set_fixed(p);
    }
    x.validate();
    return x;
}

nlohmann::json result_to_json(const cubicgen::OptResult& result, const cubicgen::TargetSpec& target) {
    return {
        {"target", {{"r", target.r}, {"xi_db", target.xi_db}}},
        {"parameters", params_to_json(result.x_opt)},
        {"fidelity", result.fidelity},
        {"detection_probability", result.detection_probability},
        {"norm_coefficient", result.norm_coefficient},
        {"transmission", cubicgen::phi_bs_to_transmission(result.x_opt.phi_bs())},
        {"converged", result.converged},
        {"iterations", result.iterations},
        {"evaluations", result.evaluations},
        {"stop_reason", result.stop_reason},
        {"seed", result.seed},
        {"target_tail_mass", result.target_tail_mass},
        {"cutoff_check", {{"delta", finite_or_null(result.cutoff_check_delta)}, {"passed", result.cutoff_converged}}},
        {"loss_history", result.loss_history},
    };
}

}  // namespace experiments
