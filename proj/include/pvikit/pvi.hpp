#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pvikit/corpus.hpp"
#include "pvikit/family.hpp"

namespace pvikit {

// Pointwise V-information of one instance, in bits.
struct PviRecord {
  std::size_t original_index = 0;
  double null_log2prob = 0.0;  // log2 g[null](y)
  double cond_log2prob = 0.0;  // log2 g'[x](y)
  double pvi = 0.0;            // cond_log2prob - null_log2prob

  bool operator==(const PviRecord&) const = default;
};

struct InfoSummary {
  double h_v_y = 0.0;            // V-entropy
  double h_v_y_given_x = 0.0;    // conditional V-entropy
  double i_v = 0.0;              // V-information
  double mean_pvi = 0.0;
  std::size_t n = 0;
};

// One record per instance, in dataset order. The null model is queried on
// the empty input regardless of the instance text.
std::vector<PviRecord> compute_pvi(const Model& g_cond, const Model& g_null, const Dataset& dataset);

InfoSummary summarize(std::span<const PviRecord> records);

enum class RankOrder { descending_pvi, ascending_pvi };

// Original indices sorted by PVI; ties go to the lower original index in
// both directions.
std::vector<std::size_t> rank_by_difficulty(std::span<const PviRecord> records, RankOrder order);

struct HardInstance {
  LabeledInstance instance;
  double pvi = 0.0;
};

// The k lowest-PVI instances, ascending by PVI.
std::vector<HardInstance> hardest_k(std::span<const PviRecord> records, const Dataset& dataset,
                                    std::size_t k);

struct Histogram {
  std::vector<double> edges;  // num_bins + 1 values
  std::vector<std::size_t> counts;
};

// Equal-width bins over [lo, hi]; values outside are clipped into the end
// bins. Without a range, the observed min/max are used.
Histogram pvi_histogram(std::span<const PviRecord> records, std::size_t num_bins,
                        std::optional<std::pair<double, double>> range = std::nullopt);

struct PviRun {
  Model g_cond;
  Model g_null;
  std::vector<PviRecord> records;
};

// Trains g' on `train` and g on its null view, then scores `target`.
PviRun run_pvi(const Dataset& train, const Dataset& target, const Hyperparams& hp);

std::string pvi_csv(std::span<const PviRecord> records);
std::vector<PviRecord> parse_pvi_csv(std::string_view content);
std::string pvi_jsonl(std::span<const PviRecord> records);

}  // namespace pvikit
