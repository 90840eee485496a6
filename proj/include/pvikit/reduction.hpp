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
#include "pvikit/runtime.hpp"

namespace pvikit {

enum class Variant { original, imbalanced, noisy };
enum class Strategy { pvi, pvi_balanced, random };

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view s);
std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

// floor(m * (1 - r)), with r validated to lie in [0, 1).
std::size_t subset_size(std::size_t m, double r);

struct SweepPoint {
  Variant variant = Variant::original;
  Strategy strategy = Strategy::pvi;
  double r = 0.0;
  std::size_t subset_size = 0;
  double cm_accuracy = 0.0;
  double eim_accuracy = 0.0;
  double train_seconds = 0.0;      // classifier (CM) training
  double eim_train_seconds = 0.0;  // empty-input model training
  double evaluate_seconds = 0.0;
  bool balanced = false;
  std::uint64_t seed = 0;

  bool operator==(const SweepPoint&) const = default;
};

// Removes the easiest r*m instances: sorts by PVI descending (ties by
// original index), keeps the last floor(m(1-r)) entries and restores
// original-index order.
Dataset select_subset(const Dataset& train, std::span<const PviRecord> records, double r);

// select_subset applied within each class.
Dataset balanced_select(const Dataset& train, std::span<const PviRecord> records, double r);

// Uniform sample of floor(m(1-r)) instances in original-index order.
Dataset random_select(const Dataset& train, double r, std::uint64_t seed);

struct VariantSpec {
  NoiseSpec noise;
  std::vector<double> keep_fractions{1.0, 0.6, 0.3};
  std::uint64_t imbalance_seed = 1;
};

Dataset make_variant(const Dataset& train, Variant variant, const VariantSpec& spec);

struct SweepOptions {
  std::size_t jobs = 1;
  // Seed each point with hp.seed + point index instead of hp.seed.
  bool derived_seeds = false;
  // Record wall-clock seconds; when false every timing field is written as 0.
  bool measure_time = true;
  std::uint64_t random_seed = 1;  // for Strategy::random
  // Observes the classifier trained at each ratio (called from worker threads).
  std::function<void(double r, const Model& cm)> on_model;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // in ratio order
  std::vector<RuntimeRecord> runtime;
  std::vector<PviRecord> pvi;  // empty for Strategy::random
};

// Static reduction: score the full (variant) training set once, then for
// every ratio train a fresh classifier and a fresh empty-input model on the
// reduced subset and evaluate both on `test`. r = 0 is always included.
SweepResult static_sweep(const Dataset& train, const Dataset& test, std::span<const double> ratios,
                         Variant variant, Strategy strategy, const Hyperparams& hp,
                         const SweepOptions& options = {});

std::string sweep_csv(std::span<const SweepPoint> points);
std::vector<SweepPoint> parse_sweep_csv(std::string_view content);

}  // namespace pvikit
