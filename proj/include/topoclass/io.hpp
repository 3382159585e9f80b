#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace topoclass::io {

// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

std::string read_text(const std::filesystem::path& path);
// Creates parent directories as needed.
void write_text(const std::filesystem::path& path, std::string_view text);

// Parses JSON text; failures become ParseError with 1-based line/column.
nlohmann::json parse_json(std::string_view text);
nlohmann::json read_json(const std::filesystem::path& path);
// Pretty-printed with two-space indent and a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace topoclass::io
