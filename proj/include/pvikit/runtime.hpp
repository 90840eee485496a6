#pragma once

#include <chrono>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pvikit {

struct RuntimeRecord {
  std::string variant;
  double r = 0.0;
  std::string phase;  // pvi_compute | train_cm | train_eim | evaluate
  double seconds = 0.0;

  bool operator==(const RuntimeRecord&) const = default;
};

// Appends one record; throws std::invalid_argument for negative seconds.
void record_runtime(std::vector<RuntimeRecord>& log, std::string variant, double r, std::string phase,
                    double wall_seconds);

std::string runtime_csv(std::span<const RuntimeRecord> records);
std::vector<RuntimeRecord> parse_runtime_csv(std::string_view content);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace pvikit
