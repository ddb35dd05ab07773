#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cubicgen/optimizer.hpp"

namespace experiments {

// Fixed CSV number format: 10 significant digits.
std::string format_number(double value);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column position by name; throws ConfigError naming the column.
    std::size_t column(std::string_view name) const;
};

// Writes '#'-prefixed metadata lines (artifact kind, schema version, master
// seed, resolved config as one-line JSON), then the header and rows.
void write_csv(const std::filesystem::path& path, const CsvTable& table, std::string_view kind,
               const nlohmann::json& config, std::uint64_t seed);
// Skips '#' lines; the first remaining line is the header. Throws ConfigError
// naming the expected file when it is missing or malformed.
CsvTable read_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& document);
nlohmann::json read_json(const std::filesystem::path& path);

// Angles carry both radians and multiples of pi; alpha and the magnitudes
// carry "value". Every entry records whether it was held fixed.
nlohmann::json params_to_json(const cubicgen::ParamVector& x);
cubicgen::ParamVector params_from_json(const nlohmann::json& node);

nlohmann::json result_to_json(const cubicgen::OptResult& result, const cubicgen::TargetSpec& target);

}  // namespace experiments
