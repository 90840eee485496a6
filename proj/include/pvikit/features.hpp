#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace pvikit {

// Sparse bag of hashed character n-grams. Entries are sorted by bucket and
// never hold a zero weight.
struct FeatureVector {
  std::vector<std::pair<std::uint32_t, double>> entries;

  bool empty() const { return entries.empty(); }
  double total_weight() const;

  bool operator==(const FeatureVector&) const = default;
};

// Character n-grams over Unicode scalars, extracted from premise and
// hypothesis separately (each field hashes with its own salt) into
// 2^hash_bits buckets with count weights.
FeatureVector featurize(std::string_view premise, std::string_view hypothesis, unsigned hash_bits,
                        const std::vector<unsigned>& ngram_orders);

}  // namespace pvikit
