#include "pvikit/pvi.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "pvikit/io.hpp"

namespace pvikit {

std::vector<PviRecord> compute_pvi(const Model& g_cond, const Model& g_null, const Dataset& dataset) {
  if (g_cond.num_classes() != dataset.num_classes || g_null.num_classes() != dataset.num_classes) {
    throw std::invalid_argument("models and dataset disagree on the number of classes");
  }
  std::vector<PviRecord> records;
  records.reserve(dataset.size());
  for (const auto& inst : dataset.instances) {
    PviRecord r;
    r.original_index = inst.original_index;
    r.null_log2prob = log2_prob(g_null, "", "", inst.label);
    r.cond_log2prob = log2_prob(g_cond, inst.premise, inst.hypothesis, inst.label);
    r.pvi = r.cond_log2prob - r.null_log2prob;
    records.push_back(r);
  }
  return records;
}

InfoSummary summarize(std::span<const PviRecord> records) {
  if (records.empty()) throw std::invalid_argument("cannot summarize an empty record set");
  InfoSummary s;
  s.n = records.size();
  const double inv_n = 1.0 / static_cast<double>(s.n);
  double pvi_sum = 0.0;
  for (const auto& r : records) {
    s.h_v_y -= inv_n * r.null_log2prob;
    s.h_v_y_given_x -= inv_n * r.cond_log2prob;
    pvi_sum += r.pvi;
  }
  s.i_v = s.h_v_y - s.h_v_y_given_x;
  s.mean_pvi = pvi_sum * inv_n;
  return s;
}

std::vector<std::size_t> rank_by_difficulty(std::span<const PviRecord> records, RankOrder order) {
  std::vector<const PviRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [order](const PviRecord* a, const PviRecord* b) {
    if (a->pvi != b->pvi) return order == RankOrder::descending_pvi ? a->pvi > b->pvi : a->pvi < b->pvi;
    return a->original_index < b->original_index;
  });
  std::vector<std::size_t> out;
  out.reserve(sorted.size());
  for (const auto* r : sorted) out.push_back(r->original_index);
  return out;
}

std::vector<HardInstance> hardest_k(std::span<const PviRecord> records, const Dataset& dataset,
                                    std::size_t k) {
  if (k > records.size()) {
    throw std::invalid_argument("k = " + std::to_string(k) + " exceeds the " +
                                std::to_string(records.size()) + " available records");
  }
  std::map<std::size_t, const LabeledInstance*> by_index;
  for (const auto& inst : dataset.instances) by_index[inst.original_index] = &inst;
  std::map<std::size_t, double> pvi_of;
  for (const auto& r : records) pvi_of[r.original_index] = r.pvi;

  const auto ranked = rank_by_difficulty(records, RankOrder::ascending_pvi);
  std::vector<HardInstance> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto it = by_index.find(ranked[i]);
    if (it == by_index.end()) {
      throw std::invalid_argument("record index " + std::to_string(ranked[i]) + " not in dataset");
    }
    out.push_back({*it->second, pvi_of[ranked[i]]});
  }
  return out;
}

Histogram pvi_histogram(std::span<const PviRecord> records, std::size_t num_bins,
                        std::optional<std::pair<double, double>> range) {
  if (num_bins < 1) throw std::invalid_argument("num_bins must be at least 1");
  double lo = 0.0;
  double hi = 0.0;
  if (range) {
    std::tie(lo, hi) = *range;
    if (!(hi > lo)) throw std::invalid_argument("histogram range must satisfy lo < hi");
  } else if (!records.empty()) {
    const auto [mn, mx] = std::minmax_element(records.begin(), records.end(),
                                              [](const auto& a, const auto& b) { return a.pvi < b.pvi; });
    lo = mn->pvi;
    hi = mx->pvi;
  }
  if (!(hi > lo)) hi = lo + 1.0;

  Histogram h;
  const double width = (hi - lo) / static_cast<double>(num_bins);
  for (std::size_t b = 0; b <= num_bins; ++b) h.edges.push_back(lo + width * static_cast<double>(b));
  h.edges.back() = hi;
  h.counts.assign(num_bins, 0);
  for (const auto& r : records) {
    const double pos = (r.pvi - lo) / width;
    std::size_t bin = 0;
    if (pos >= static_cast<double>(num_bins)) {
      bin = num_bins - 1;
    } else if (pos > 0.0) {
      bin = static_cast<std::size_t>(pos);
    }
    ++h.counts[bin];
  }
  return h;
}

PviRun run_pvi(const Dataset& train, const Dataset& target, const Hyperparams& hp) {
  PviRun run{pvikit::train(train, hp).model, pvikit::train(to_null_view(train), hp).model, {}};
  run.records = compute_pvi(run.g_cond, run.g_null, target);
  return run;
}

std::string pvi_csv(std::span<const PviRecord> records) {
  std::string out = "original_index,null_log2prob,cond_log2prob,pvi\n";
  for (const auto& r : records) {
    out += io::csv_row({std::to_string(r.original_index), io::format_double(r.null_log2prob),
                        io::format_double(r.cond_log2prob), io::format_double(r.pvi)});
  }
  return out;
}

std::vector<PviRecord> parse_pvi_csv(std::string_view content) {
  const auto table = io::parse_csv(content);
  const auto c_idx = table.column("original_index");
  const auto c_null = table.column("null_log2prob");
  const auto c_cond = table.column("cond_log2prob");
  const auto c_pvi = table.column("pvi");
  std::vector<PviRecord> out;
  for (const auto& row : table.rows) {
    out.push_back({std::stoull(row[c_idx]), io::parse_double(row[c_null]), io::parse_double(row[c_cond]),
                   io::parse_double(row[c_pvi])});
  }
  return out;
}

std::string pvi_jsonl(std::span<const PviRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += "{\"original_index\":" + std::to_string(r.original_index) +
           ",\"null_log2prob\":" + io::format_double(r.null_log2prob) +
           ",\"cond_log2prob\":" + io::format_double(r.cond_log2prob) +
           ",\"pvi\":" + io::format_double(r.pvi) + "}\n";
  }
  return out;
}

}  // namespace pvikit
