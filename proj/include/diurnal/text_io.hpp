/**
 * @file text_io.hpp
 * @brief Minimal CSV field handling and round-trip number formatting.
 */
#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace diurnal::io {

/// Splits one CSV line. Double-quoted fields may contain commas; `""` is an escaped quote.
std::vector<std::string> split_csv(std::string_view line);

/// Quotes a field only when it contains a comma, quote or newline.
std::string csv_field(std::string_view text);

std::string_view trim(std::string_view text);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

/// Opens a file for writing, creating parent directories. Throws ErrorKind::Io on failure.
std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

}  // namespace diurnal::io
