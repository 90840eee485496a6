#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pvikit/corpus.hpp"
#include "pvikit/pvi.hpp"
#include "pvikit/reduction.hpp"
#include "pvikit/runtime.hpp"

namespace pvikit {

enum class LengthUnit { scalars, tokens };

std::string_view to_string(LengthUnit u);
LengthUnit length_unit_from_string(std::string_view s);

std::size_t text_length(std::string_view s, LengthUnit unit);

struct LengthRow {
  std::string label;
  std::size_t min = 0;
  std::size_t max = 0;
  std::size_t median = 0;  // lower middle for even counts
  double mean = 0.0;

  bool operator==(const LengthRow&) const = default;
};

struct LengthStats {
  std::vector<LengthRow> rows;        // label order
  std::vector<std::string> warnings;  // one per omitted (empty) label
};

// Hypothesis lengths per label. Labels with no instances are omitted.
LengthStats length_stats(const Dataset& dataset, LengthUnit unit, const LabelSet& labels = {});

struct BucketProportions {
  std::vector<std::size_t> upper_edges;
  std::vector<std::string> edge_labels;  // upper_edges.size() + 1 buckets
  std::vector<std::string> labels;
  std::vector<std::vector<double>> proportions;  // [label][bucket]
};

inline const std::vector<std::size_t> kDefaultBucketEdges{10, 15, 20, 25, 30};

// Buckets are <=e0, e0+1..e1, ..., >=ek+1. Edges must be strictly increasing.
std::vector<std::string> bucket_labels(std::span<const std::size_t> upper_edges);

BucketProportions bucket_proportions(const Dataset& dataset, std::span<const std::size_t> upper_edges,
                                     LengthUnit unit, const LabelSet& labels = {});

std::string length_stats_csv(const LengthStats& stats);
std::vector<LengthRow> parse_length_stats_csv(std::string_view content);

std::string bucket_csv(const BucketProportions& buckets);

struct BucketRow {
  std::string label;
  std::string edge_label;
  double proportion = 0.0;

  bool operator==(const BucketRow&) const = default;
};

std::vector<BucketRow> parse_bucket_csv(std::string_view content);

// Scatter of seconds against r, one colour per phase. Always has axes.
std::string emit_runtime_plot(std::span<const RuntimeRecord> records);

// cm_accuracy against r, one series per variant (and strategy, when more
// than one is present). Series with a single point get a marker only.
std::string emit_accuracy_plot(std::span<const SweepPoint> points);

std::string emit_histogram_plot(const Histogram& histogram);

}  // namespace pvikit
