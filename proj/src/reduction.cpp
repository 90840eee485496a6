#include "pvikit/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "pvikit/io.hpp"
#include "pvikit/parallel.hpp"
#include "pvikit/random.hpp"

namespace pvikit {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::original: return "original";
    case Variant::imbalanced: return "imbalanced";
    case Variant::noisy: return "noisy";
  }
  return "original";
}

Variant variant_from_string(std::string_view s) {
  for (auto v : {Variant::original, Variant::imbalanced, Variant::noisy}) {
    if (to_string(v) == s) return v;
  }
  throw std::invalid_argument("unknown variant '" + std::string(s) + "'");
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::pvi: return "pvi";
    case Strategy::pvi_balanced: return "pvi_balanced";
    case Strategy::random: return "random";
  }
  return "pvi";
}

Strategy strategy_from_string(std::string_view s) {
  for (auto v : {Strategy::pvi, Strategy::pvi_balanced, Strategy::random}) {
    if (to_string(v) == s) return v;
  }
  throw std::invalid_argument("unknown strategy '" + std::string(s) + "'");
}

std::size_t subset_size(std::size_t m, double r) {
  if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("reduction ratio must lie in [0, 1)");
  const double exact = static_cast<double>(m) * (1.0 - r);
  // Decimal ratios such as 0.7 are not representable; snap products that
  // land within rounding error of an integer before truncating.
  const double nearest = std::round(exact);
  if (std::abs(exact - nearest) <= 1e-9 * std::max(1.0, exact)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::floor(exact));
}

namespace {

// Maps original_index -> position in the dataset and checks that the
// records cover exactly the dataset's indices.
std::map<std::size_t, std::size_t> index_positions(const Dataset& train, std::span<const PviRecord> records) {
  std::map<std::size_t, std::size_t> pos;
  for (std::size_t i = 0; i < train.size(); ++i) pos[train.instances[i].original_index] = i;
  if (pos.size() != train.size()) throw std::invalid_argument("dataset has duplicate original indices");
  if (records.size() != train.size()) {
    throw std::invalid_argument("PVI records (" + std::to_string(records.size()) +
                                ") do not match dataset size (" + std::to_string(train.size()) + ")");
  }
  std::map<std::size_t, bool> seen;
  for (const auto& r : records) {
    if (!pos.contains(r.original_index) || seen[r.original_index]) {
      throw std::invalid_argument("PVI records do not cover the dataset's indices");
    }
    seen[r.original_index] = true;
  }
  return pos;
}

Dataset gather_sorted(const Dataset& train, const std::map<std::size_t, std::size_t>& pos,
                      std::vector<std::size_t> kept) {
  std::sort(kept.begin(), kept.end());
  Dataset out;
  out.num_classes = train.num_classes;
  out.provenance = Provenance::subset;
  out.instances.reserve(kept.size());
  for (std::size_t idx : kept) out.instances.push_back(train.instances[pos.at(idx)]);
  return out;
}

}  // namespace

Dataset select_subset(const Dataset& train, std::span<const PviRecord> records, double r) {
  const auto keep = subset_size(train.size(), r);
  const auto pos = index_positions(train, records);
  const auto ranked = rank_by_difficulty(records, RankOrder::descending_pvi);
  return gather_sorted(train, pos, std::vector<std::size_t>(ranked.end() - static_cast<std::ptrdiff_t>(keep),
                                                            ranked.end()));
}

Dataset balanced_select(const Dataset& train, std::span<const PviRecord> records, double r) {
  subset_size(train.size(), r);
  const auto pos = index_positions(train, records);
  std::vector<std::vector<PviRecord>> per_class(train.num_classes);
  for (const auto& rec : records) per_class.at(train.instances[pos.at(rec.original_index)].label).push_back(rec);
  std::vector<std::size_t> kept;
  for (const auto& cls : per_class) {
    const auto keep = subset_size(cls.size(), r);
    const auto ranked = rank_by_difficulty(cls, RankOrder::descending_pvi);
    kept.insert(kept.end(), ranked.end() - static_cast<std::ptrdiff_t>(keep), ranked.end());
  }
  return gather_sorted(train, pos, std::move(kept));
}

Dataset random_select(const Dataset& train, double r, std::uint64_t seed) {
  const auto keep = subset_size(train.size(), r);
  Rng rng(seed);
  Dataset out;
  out.num_classes = train.num_classes;
  out.provenance = Provenance::subset;
  std::vector<std::pair<std::size_t, std::size_t>> chosen;  // (original_index, position)
  for (std::size_t p : rng.sample_positions(train.size(), keep)) {
    chosen.emplace_back(train.instances[p].original_index, p);
  }
  std::sort(chosen.begin(), chosen.end());
  for (const auto& [idx, p] : chosen) out.instances.push_back(train.instances[p]);
  return out;
}

Dataset make_variant(const Dataset& train, Variant variant, const VariantSpec& spec) {
  switch (variant) {
    case Variant::original: return train;
    case Variant::imbalanced: {
      Dataset out = make_imbalanced(train, spec.keep_fractions, spec.imbalance_seed);
      out.provenance = Provenance::imbalanced;
      return out;
    }
    case Variant::noisy: {
      Dataset out = inject_noise(train, spec.noise);
      out.provenance = Provenance::noisy;
      return out;
    }
  }
  return train;
}

SweepResult static_sweep(const Dataset& train, const Dataset& test, std::span<const double> ratios,
                         Variant variant, Strategy strategy, const Hyperparams& hp,
                         const SweepOptions& options) {
  hp.validate();
  if (train.empty() || test.empty()) throw std::invalid_argument("sweep needs non-empty train and test sets");
  if (train.num_classes != test.num_classes) throw std::invalid_argument("train and test class counts differ");
  std::vector<double> grid{0.0};
  for (double r : ratios) {
    subset_size(train.size(), r);
    grid.push_back(r);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const std::string variant_name(to_string(variant));
  auto clock = [&](const Stopwatch& sw) { return options.measure_time ? sw.seconds() : 0.0; };

  SweepResult result;
  if (strategy != Strategy::random) {
    Stopwatch sw;
    result.pvi = run_pvi(train, train, hp).records;
    record_runtime(result.runtime, variant_name, 0.0, "pvi_compute", clock(sw));
  }

  const Dataset null_test = to_null_view(test);
  result.points.resize(grid.size());
  std::vector<std::vector<RuntimeRecord>> point_runtime(grid.size());
  parallel_for(grid.size(), options.jobs, [&](std::size_t i) {
    const double r = grid[i];
    Dataset subset;
    switch (strategy) {
      case Strategy::pvi: subset = select_subset(train, result.pvi, r); break;
      case Strategy::pvi_balanced: subset = balanced_select(train, result.pvi, r); break;
      case Strategy::random: subset = random_select(train, r, options.random_seed); break;
    }
    Hyperparams point_hp = hp;
    if (options.derived_seeds) point_hp.seed = hp.seed + i;

    SweepPoint& pt = result.points[i];
    pt.variant = variant;
    pt.strategy = strategy;
    pt.r = r;
    pt.subset_size = subset.size();
    pt.balanced = strategy == Strategy::pvi_balanced;
    pt.seed = point_hp.seed;

    Stopwatch cm_sw;
    const Model cm = pvikit::train(subset, point_hp).model;
    pt.train_seconds = clock(cm_sw);

    Stopwatch eim_sw;
    const Model eim = pvikit::train(to_null_view(subset), point_hp).model;
    pt.eim_train_seconds = clock(eim_sw);

    Stopwatch eval_sw;
    pt.cm_accuracy = evaluate(cm, test).accuracy;
    pt.eim_accuracy = evaluate(eim, null_test).accuracy;
    pt.evaluate_seconds = clock(eval_sw);

    if (options.on_model) options.on_model(r, cm);

    auto& rt = point_runtime[i];
    record_runtime(rt, variant_name, r, "train_cm", pt.train_seconds);
    record_runtime(rt, variant_name, r, "train_eim", pt.eim_train_seconds);
    record_runtime(rt, variant_name, r, "evaluate", pt.evaluate_seconds);
  });
  for (auto& rt : point_runtime) result.runtime.insert(result.runtime.end(), rt.begin(), rt.end());
  return result;
}

std::string sweep_csv(std::span<const SweepPoint> points) {
  std::string out = "variant,strategy,r,subset_size,cm_accuracy,eim_accuracy,train_seconds,seed\n";
  for (const auto& p : points) {
    out += io::csv_row({std::string(to_string(p.variant)), std::string(to_string(p.strategy)),
                        io::format_double(p.r), std::to_string(p.subset_size), io::format_double(p.cm_accuracy),
                        io::format_double(p.eim_accuracy), io::format_double(p.train_seconds),
                        std::to_string(p.seed)});
  }
  return out;
}

std::vector<SweepPoint> parse_sweep_csv(std::string_view content) {
  const auto table = io::parse_csv(content);
  const auto c_variant = table.column("variant");
  const auto c_strategy = table.column("strategy");
  const auto c_r = table.column("r");
  const auto c_size = table.column("subset_size");
  const auto c_cm = table.column("cm_accuracy");
  const auto c_eim = table.column("eim_accuracy");
  const auto c_secs = table.column("train_seconds");
  const auto c_seed = table.column("seed");
  std::vector<SweepPoint> out;
  for (const auto& row : table.rows) {
    SweepPoint p;
    p.variant = variant_from_string(row[c_variant]);
    p.strategy = strategy_from_string(row[c_strategy]);
    p.r = io::parse_double(row[c_r]);
    p.subset_size = std::stoull(row[c_size]);
    p.cm_accuracy = io::parse_double(row[c_cm]);
    p.eim_accuracy = io::parse_double(row[c_eim]);
    p.train_seconds = io::parse_double(row[c_secs]);
    p.seed = std::stoull(row[c_seed]);
    p.balanced = p.strategy == Strategy::pvi_balanced;
    out.push_back(p);
  }
  return out;
}

}  // namespace pvikit
