#include "pvikit/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "pvikit/io.hpp"
#include "pvikit/parallel.hpp"
#include "pvikit/reduction.hpp"
#include "pvikit/runtime.hpp"

namespace pvikit {

std::string_view to_string(Ordering o) {
  switch (o) {
    case Ordering::easy_first: return "easy_first";
    case Ordering::hard_first: return "hard_first";
    case Ordering::original: return "original";
  }
  return "easy_first";
}

Ordering ordering_from_string(std::string_view s) {
  for (auto o : {Ordering::easy_first, Ordering::hard_first, Ordering::original}) {
    if (to_string(o) == s) return o;
  }
  throw std::invalid_argument("unknown ordering '" + std::string(s) + "'");
}

namespace {

std::map<std::size_t, std::size_t> positions_checked(const Dataset& train, std::span<const PviRecord> records) {
  std::map<std::size_t, std::size_t> pos;
  for (std::size_t i = 0; i < train.size(); ++i) pos[train.instances[i].original_index] = i;
  if (pos.size() != train.size()) throw std::invalid_argument("dataset has duplicate original indices");
  if (records.size() != train.size()) throw std::invalid_argument("PVI records do not match the dataset");
  for (const auto& r : records) {
    if (!pos.contains(r.original_index)) {
      throw std::invalid_argument("PVI record index " + std::to_string(r.original_index) + " not in dataset");
    }
  }
  return pos;
}

Dataset gather(const Dataset& train, const std::map<std::size_t, std::size_t>& pos,
               std::span<const std::size_t> indices) {
  Dataset out;
  out.num_classes = train.num_classes;
  out.provenance = train.provenance;
  out.instances.reserve(indices.size());
  for (std::size_t idx : indices) out.instances.push_back(train.instances[pos.at(idx)]);
  return out;
}

}  // namespace

Dataset curriculum_order(const Dataset& train, std::span<const PviRecord> records, Ordering ordering) {
  const auto pos = positions_checked(train, records);
  if (ordering == Ordering::original) return train;
  const auto ranked = rank_by_difficulty(
      records, ordering == Ordering::easy_first ? RankOrder::descending_pvi : RankOrder::ascending_pvi);
  return gather(train, pos, ranked);
}

CurriculumResult progressive_train(const Dataset& train, const Dataset& test, std::span<const double> ratios,
                                   Ordering ordering, const Hyperparams& hp, const CurriculumOptions& options) {
  auto records = run_pvi(train, train, hp).records;
  return progressive_train(train, test, records, ratios, ordering, hp, options);
}

CurriculumResult progressive_train(const Dataset& train, const Dataset& test, std::span<const PviRecord> records,
                                   std::span<const double> ratios, Ordering ordering, const Hyperparams& hp,
                                   const CurriculumOptions& options) {
  hp.validate();
  if (train.empty() || test.empty()) throw std::invalid_argument("curriculum needs non-empty train and test sets");
  const auto pos = positions_checked(train, records);
  for (double r : ratios) subset_size(train.size(), r);

  CurriculumResult result;
  result.pvi.assign(records.begin(), records.end());
  const auto easy_first = rank_by_difficulty(records, RankOrder::descending_pvi);

  Hyperparams stage_hp = hp;
  stage_hp.preserve_order = true;

  std::vector<Model> models(ratios.size());
  result.stages.resize(ratios.size());
  auto run_stage = [&](std::size_t i) {
    const double r = ratios[i];
    const std::size_t keep = subset_size(train.size(), r);
    // Suffix of the descending list: the easiest r*m are dropped.
    std::vector<std::size_t> kept(easy_first.end() - static_cast<std::ptrdiff_t>(keep), easy_first.end());
    switch (ordering) {
      case Ordering::easy_first: break;
      case Ordering::hard_first: std::reverse(kept.begin(), kept.end()); break;
      case Ordering::original:
        std::sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) { return pos.at(a) < pos.at(b); });
        break;
    }
    const Dataset stage_data = gather(train, pos, kept);

    TrainOptions topts;
    if (options.warm_start && i > 0) topts.warm_start = &models[i - 1];
    std::vector<std::size_t> stream;
    if (options.on_stream) {
      topts.on_batch = [&](std::size_t, std::span<const std::size_t> batch) {
        for (std::size_t p : batch) stream.push_back(stage_data.instances[p].original_index);
      };
    }
    Stopwatch sw;
    models[i] = pvikit::train(stage_data, stage_hp, topts).model;
    const double secs = options.measure_time ? sw.seconds() : 0.0;
    if (options.on_stream) options.on_stream(r, stream);

    const auto eval = evaluate(models[i], test);
    result.stages[i] = StageReport{ordering,         r,                 keep,          eval.accuracy,
                                   eval.precision_micro, eval.recall_micro, eval.f1_micro, secs,
                                   hp.seed};
  };
  if (options.warm_start) {
    for (std::size_t i = 0; i < ratios.size(); ++i) run_stage(i);
  } else {
    parallel_for(ratios.size(), options.jobs, run_stage);
  }
  return result;
}

std::vector<StageSummary> summarize_stages(std::span<const StageReport> reports) {
  std::map<std::pair<int, double>, std::vector<const StageReport*>> groups;
  std::vector<std::pair<int, double>> key_order;
  for (const auto& rep : reports) {
    const std::pair<int, double> key{static_cast<int>(rep.ordering), rep.r};
    if (!groups.contains(key)) key_order.push_back(key);
    groups[key].push_back(&rep);
  }
  auto mean_std = [](const std::vector<const StageReport*>& g, double StageReport::*field) {
    double mean = 0.0;
    for (const auto* rep : g) mean += rep->*field;
    mean /= static_cast<double>(g.size());
    double var = 0.0;
    for (const auto* rep : g) var += (rep->*field - mean) * (rep->*field - mean);
    const double sd = g.size() > 1 ? std::sqrt(var / static_cast<double>(g.size() - 1)) : 0.0;
    return std::pair{mean, sd};
  };
  std::vector<StageSummary> out;
  for (const auto& key : key_order) {
    const auto& g = groups[key];
    StageSummary s;
    s.ordering = static_cast<Ordering>(key.first);
    s.r = key.second;
    s.runs = g.size();
    std::tie(s.accuracy_mean, s.accuracy_std) = mean_std(g, &StageReport::accuracy);
    std::tie(s.precision_mean, s.precision_std) = mean_std(g, &StageReport::precision_micro);
    std::tie(s.recall_mean, s.recall_std) = mean_std(g, &StageReport::recall_micro);
    std::tie(s.f1_mean, s.f1_std) = mean_std(g, &StageReport::f1_micro);
    out.push_back(s);
  }
  return out;
}

std::string stage_csv(std::span<const StageReport> reports) {
  std::string out = "ordering,r,subset_size,accuracy,precision,recall,f1,train_seconds,seed\n";
  for (const auto& s : reports) {
    out += io::csv_row({std::string(to_string(s.ordering)), io::format_double(s.r), std::to_string(s.subset_size),
                        io::format_double(s.accuracy), io::format_double(s.precision_micro),
                        io::format_double(s.recall_micro), io::format_double(s.f1_micro),
                        io::format_double(s.train_seconds), std::to_string(s.seed)});
  }
  return out;
}

std::vector<StageReport> parse_stage_csv(std::string_view content) {
  const auto t = io::parse_csv(content);
  const auto c_ord = t.column("ordering"), c_r = t.column("r"), c_size = t.column("subset_size");
  const auto c_acc = t.column("accuracy"), c_p = t.column("precision"), c_rec = t.column("recall");
  const auto c_f1 = t.column("f1"), c_secs = t.column("train_seconds"), c_seed = t.column("seed");
  std::vector<StageReport> out;
  for (const auto& row : t.rows) {
    out.push_back({ordering_from_string(row[c_ord]), io::parse_double(row[c_r]), std::stoull(row[c_size]),
                   io::parse_double(row[c_acc]), io::parse_double(row[c_p]), io::parse_double(row[c_rec]),
                   io::parse_double(row[c_f1]), io::parse_double(row[c_secs]), std::stoull(row[c_seed])});
  }
  return out;
}

std::string stage_summary_csv(std::span<const StageSummary> rows) {
  std::string out =
      "ordering,r,runs,accuracy_mean,accuracy_std,precision_mean,precision_std,recall_mean,recall_std,"
      "f1_mean,f1_std\n";
  for (const auto& s : rows) {
    out += io::csv_row({std::string(to_string(s.ordering)), io::format_double(s.r), std::to_string(s.runs),
                        io::format_double(s.accuracy_mean), io::format_double(s.accuracy_std),
                        io::format_double(s.precision_mean), io::format_double(s.precision_std),
                        io::format_double(s.recall_mean), io::format_double(s.recall_std),
                        io::format_double(s.f1_mean), io::format_double(s.f1_std)});
  }
  return out;
}

}  // namespace pvikit
