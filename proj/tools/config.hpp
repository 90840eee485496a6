#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pvikit/corpus.hpp"
#include "pvikit/curriculum.hpp"
#include "pvikit/family.hpp"
#include "pvikit/reduction.hpp"
#include "pvikit/report.hpp"

namespace pvikit::cli {

// Bad flags or config values; reported with exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KeySpec {
  std::string section;
  std::string key;
  std::string default_value;
  std::string help;
};

const std::vector<KeySpec>& config_keys();

// Raw key -> value strings, every key present.
class RawConfig {
 public:
  RawConfig();

  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;

  // INI (sections optional) or a run manifest written by a previous run.
  // Returns the manifest's command name, or "" for INI files.
  std::string merge_file(const std::filesystem::path& path);

  nlohmann::ordered_json to_json() const;
  std::string to_ini() const;

 private:
  std::map<std::string, std::string> values_;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::filesystem::path out_dir;
  std::size_t jobs = 1;
  Format format = Format::jsonl;
  bool measure_time = false;

  std::filesystem::path train, test, eval, out;
  LabelSet labels;
  bool filter = true;

  Hyperparams hp;

  std::vector<double> ratios;  // empty: command default
  Strategy strategy = Strategy::pvi;
  Variant variant = Variant::original;
  Ordering ordering = Ordering::easy_first;
  std::size_t seeds = 1;
  bool warm_start = false;
  bool derived_seeds = false;
  std::uint64_t random_seed = 1;

  SyntheticSpec synthetic;
  std::size_t test_size = 1000;
  std::uint64_t test_seed_offset = 1000;

  VariantSpec variant_spec;

  LengthUnit unit = LengthUnit::scalars;
  std::vector<std::size_t> bucket_edges;
  std::size_t hist_bins = 20;
  std::size_t hardest_k = 10;
  std::filesystem::path sweep_csv, runtime_csv, pvi_csv;
};

// Typed view; throws UsageError for malformed values.
RunConfig resolve(const RawConfig& raw);

}  // namespace pvikit::cli
