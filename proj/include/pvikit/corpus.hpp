#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pvikit {

using Label = std::uint32_t;

// Ordered class names; position in the list is the class index.
struct LabelSet {
  std::vector<std::string> names{"entailment", "neutral", "contradiction"};

  std::size_t size() const { return names.size(); }
  // Throws std::out_of_range for unknown names.
  Label index_of(std::string_view name) const;
  const std::string& name_of(Label label) const { return names.at(label); }
};

struct LabeledInstance {
  std::size_t original_index = 0;
  std::string premise;
  std::string hypothesis;
  Label label = 0;

  bool operator==(const LabeledInstance&) const = default;
};

enum class Provenance { original, imbalanced, noisy, synthetic, null_view, subset };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

struct Dataset {
  std::vector<LabeledInstance> instances;
  std::size_t num_classes = 3;
  Provenance provenance = Provenance::original;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }
  std::vector<std::size_t> class_counts() const;

  bool operator==(const Dataset&) const = default;
};

// Checks labels < num_classes and original_index uniqueness; throws
// std::invalid_argument on violation.
void validate(const Dataset& dataset);

enum class Format { jsonl, tsv };

Format format_from_string(std::string_view s);
std::string_view to_string(Format f);

// Parses dataset text. `source` names the origin in error messages.
Dataset parse_dataset(std::string_view content, Format format, const LabelSet& labels,
                      const std::string& source = "<memory>");

Dataset load_dataset(const std::filesystem::path& path, Format format, const LabelSet& labels);

std::string serialize_dataset(const Dataset& dataset, Format format, const LabelSet& labels);

void write_dataset(const std::filesystem::path& path, const Dataset& dataset, Format format,
                   const LabelSet& labels);

struct FilterResult {
  Dataset dataset;
  std::map<std::string, std::size_t> removed;  // reason -> count
};

// Drops instances with an empty premise/hypothesis ("empty_field") or a
// control character in either field ("control_char").
FilterResult filter_invalid(const Dataset& dataset);

Dataset to_null_view(const Dataset& dataset);

enum class Corruption { char_swap, char_delete, punctuation_insert, token_shuffle, duplicate_fragment };

std::string_view to_string(Corruption c);
Corruption corruption_from_string(std::string_view s);

struct NoiseSpec {
  double replacement_ratio = 0.1;
  std::uint64_t seed = 1;
  std::vector<Corruption> kinds{Corruption::char_swap, Corruption::char_delete,
                                Corruption::punctuation_insert, Corruption::token_shuffle,
                                Corruption::duplicate_fragment};
};

// Rewrites exactly round(ratio * m) instances, chosen uniformly without
// replacement; every chosen instance is guaranteed to differ from its input.
Dataset inject_noise(const Dataset& dataset, const NoiseSpec& spec);

// Keeps round(fraction_c * count_c) instances of each class c. Throws if a
// populated class would be emptied.
Dataset make_imbalanced(const Dataset& dataset, std::span<const double> class_keep_fractions,
                        std::uint64_t seed);

enum class Tier { easy, medium, hard };

std::string_view to_string(Tier t);

struct SyntheticSpec {
  std::size_t num_instances = 3000;
  std::size_t num_classes = 3;
  double easy = 0.5;
  double medium = 0.3;
  double hard = 0.2;
  std::uint64_t seed = 1;
  // Share of hard instances carrying a decoy: the keyword of a class drawn
  // independently of the label. The remaining hard instances are filler only.
  double hard_decoy_rate = 0.5;
};

struct SyntheticCorpus {
  Dataset dataset;
  std::vector<Tier> tiers;  // parallel to dataset.instances
};

// Easy labels are fixed by a per-class keyword in the hypothesis. Medium
// labels are fixed only by the co-occurrence of a premise marker and a
// hypothesis marker, each of which is ambiguous between two classes. Hard
// labels are statistically independent of the text.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

}  // namespace pvikit
