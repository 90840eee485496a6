#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pvikit/corpus.hpp"
#include "pvikit/family.hpp"
#include "pvikit/pvi.hpp"

namespace pvikit {

enum class Ordering { easy_first, hard_first, original };

std::string_view to_string(Ordering o);
Ordering ordering_from_string(std::string_view s);

struct StageReport {
  Ordering ordering = Ordering::easy_first;
  double r = 0.0;
  std::size_t subset_size = 0;
  double accuracy = 0.0;
  double precision_micro = 0.0;
  double recall_micro = 0.0;
  double f1_micro = 0.0;
  double train_seconds = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const StageReport&) const = default;
};

// easy_first: descending PVI; hard_first: ascending PVI; original: input
// order. Ties always go to the lower original index.
Dataset curriculum_order(const Dataset& train, std::span<const PviRecord> records, Ordering ordering);

struct CurriculumOptions {
  std::size_t jobs = 1;
  // Initialize each stage from the previous stage's model (forces jobs = 1).
  bool warm_start = false;
  bool measure_time = true;
  // Sees the original indices each stage consumed, in batch order.
  std::function<void(double r, const std::vector<std::size_t>& stream)> on_stream;
};

struct CurriculumResult {
  std::vector<StageReport> stages;  // in ratio order
  std::vector<PviRecord> pvi;
};

// Scores the full training set, then for every ratio keeps the hardest
// floor(m(1-r)) instances (dropping the easiest r*m), arranges them by
// `ordering`, trains a fresh model without shuffling and evaluates it.
CurriculumResult progressive_train(const Dataset& train, const Dataset& test, std::span<const double> ratios,
                                   Ordering ordering, const Hyperparams& hp, const CurriculumOptions& options = {});

// Same, with precomputed PVI records for `train`.
CurriculumResult progressive_train(const Dataset& train, const Dataset& test, std::span<const PviRecord> records,
                                   std::span<const double> ratios, Ordering ordering, const Hyperparams& hp,
                                   const CurriculumOptions& options = {});

struct StageSummary {
  Ordering ordering = Ordering::easy_first;
  double r = 0.0;
  std::size_t runs = 0;
  double accuracy_mean = 0.0, accuracy_std = 0.0;
  double precision_mean = 0.0, precision_std = 0.0;
  double recall_mean = 0.0, recall_std = 0.0;
  double f1_mean = 0.0, f1_std = 0.0;
};

// Mean and sample standard deviation per (ordering, r) over seeds.
std::vector<StageSummary> summarize_stages(std::span<const StageReport> reports);

std::string stage_csv(std::span<const StageReport> reports);
std::vector<StageReport> parse_stage_csv(std::string_view content);
std::string stage_summary_csv(std::span<const StageSummary> rows);

}  // namespace pvikit
