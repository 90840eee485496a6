#include "pvikit/runtime.hpp"

#include <stdexcept>

#include "pvikit/io.hpp"

namespace pvikit {

void record_runtime(std::vector<RuntimeRecord>& log, std::string variant, double r, std::string phase,
                    double wall_seconds) {
  if (!(wall_seconds >= 0.0)) throw std::invalid_argument("wall_seconds must be non-negative");
  log.push_back({std::move(variant), r, std::move(phase), wall_seconds});
}

std::string runtime_csv(std::span<const RuntimeRecord> records) {
  std::string out = "variant,r,phase,seconds\n";
  for (const auto& rec : records) {
    out += io::csv_row({rec.variant, io::format_double(rec.r), rec.phase, io::format_double(rec.seconds)});
  }
  return out;
}

std::vector<RuntimeRecord> parse_runtime_csv(std::string_view content) {
  const auto table = io::parse_csv(content);
  const auto c_variant = table.column("variant");
  const auto c_r = table.column("r");
  const auto c_phase = table.column("phase");
  const auto c_seconds = table.column("seconds");
  std::vector<RuntimeRecord> out;
  for (const auto& row : table.rows) {
    out.push_back({row[c_variant], io::parse_double(row[c_r]), row[c_phase], io::parse_double(row[c_seconds])});
  }
  return out;
}

}  // namespace pvikit
