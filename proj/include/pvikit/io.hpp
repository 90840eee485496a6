#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pvikit::io {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it into place, so readers
// never observe a partially written artifact.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t v);

// Shortest text that parses back to the same double.
std::string format_double(double v);

double parse_double(std::string_view s);

// Minimal RFC 4180 CSV: fields containing a comma, quote or newline are quoted.
std::string csv_escape(std::string_view field);

std::string csv_row(const std::vector<std::string>& fields);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view content);

}  // namespace pvikit::io
