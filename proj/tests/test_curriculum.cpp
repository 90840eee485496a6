#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <set>

#include "doctest.h"
#include "pvikit/curriculum.hpp"
#include "pvikit/reduction.hpp"

using namespace pvikit;

namespace {

Hyperparams quick_hp() {
  Hyperparams hp;
  hp.hash_bits = 12;
  return hp;
}

std::pair<Dataset, Dataset> quick_corpus(std::size_t m = 600) {
  SyntheticSpec spec;
  spec.num_instances = m;
  const auto train = generate_synthetic(spec).dataset;
  spec.num_instances = 300;
  spec.seed = 1001;
  return {train, generate_synthetic(spec).dataset};
}

Dataset tiny(std::size_t n) {
  Dataset d;
  d.num_classes = 3;
  for (std::size_t i = 0; i < n; ++i) d.instances.push_back({i, "p" + std::to_string(i), "h", static_cast<Label>(i % 3)});
  return d;
}

std::vector<std::size_t> indices(const Dataset& d) {
  std::vector<std::size_t> out;
  for (const auto& inst : d.instances) out.push_back(inst.original_index);
  return out;
}

}  // namespace

TEST_CASE("curriculum_order arranges by PVI") {
  const auto d = tiny(3);
  const std::vector<PviRecord> recs{{0, -1, -2, -1.0}, {1, -1, 2, 3.0}, {2, -1, -1, 0.0}};
  CHECK(indices(curriculum_order(d, recs, Ordering::easy_first)) == std::vector<std::size_t>{1, 2, 0});
  CHECK(indices(curriculum_order(d, recs, Ordering::hard_first)) == std::vector<std::size_t>{0, 2, 1});
  CHECK(curriculum_order(d, recs, Ordering::original) == d);

  auto sub = d;
  sub.provenance = Provenance::noisy;
  CHECK(curriculum_order(sub, recs, Ordering::easy_first).provenance == Provenance::noisy);

  const std::vector<PviRecord> tied{{0, 0, 0, 1.0}, {1, 0, 0, 1.0}, {2, 0, 0, 1.0}};
  CHECK(indices(curriculum_order(d, tied, Ordering::easy_first)) == std::vector<std::size_t>{0, 1, 2});

  const std::vector<PviRecord> missing{{0, 0, 0, 1.0}, {7, 0, 0, 1.0}, {2, 0, 0, 1.0}};
  CHECK_THROWS(curriculum_order(d, missing, Ordering::easy_first));
}

TEST_CASE("stage sizes follow floor arithmetic") {
  auto [train, test] = quick_corpus(1000);
  const std::vector<double> ratios{0.0, 0.1, 0.2, 0.3};
  CurriculumOptions opts;
  opts.measure_time = false;
  const auto res = progressive_train(train, test, ratios, Ordering::easy_first, quick_hp(), opts);
  std::vector<std::size_t> sizes;
  for (const auto& s : res.stages) sizes.push_back(s.subset_size);
  CHECK(sizes == std::vector<std::size_t>{1000, 900, 800, 700});
}

TEST_CASE("ratio zero with original ordering equals a baseline train") {
  auto [train, test] = quick_corpus();
  Hyperparams hp = quick_hp();
  const std::vector<double> zero{0.0};
  CurriculumOptions opts;
  opts.measure_time = false;
  const auto res = progressive_train(train, test, zero, Ordering::original, hp, opts);
  REQUIRE(res.stages.size() == 1);
  hp.preserve_order = true;
  const auto baseline = evaluate(pvikit::train(train, hp).model, test);
  CHECK(res.stages[0].accuracy == baseline.accuracy);
  CHECK(res.stages[0].f1_micro == baseline.f1_micro);
  CHECK(res.stages[0].subset_size == train.size());
}

TEST_CASE("stream monotonicity, nesting and micro identity") {
  auto [train, test] = quick_corpus();
  const std::vector<double> ratios{0.0, 0.1, 0.2, 0.3, 0.6};
  std::map<double, std::vector<std::size_t>> streams;
  std::mutex mu;
  CurriculumOptions opts;
  opts.measure_time = false;
  opts.on_stream = [&](double r, const std::vector<std::size_t>& stream) {
    std::lock_guard lock(mu);
    streams[r] = stream;
  };
  const auto hp = quick_hp();
  const auto res = progressive_train(train, test, ratios, Ordering::easy_first, hp, opts);

  std::map<std::size_t, double> pvi;
  for (const auto& r : res.pvi) pvi[r.original_index] = r.pvi;
  REQUIRE(streams.size() == ratios.size());
  for (const auto& [r, stream] : streams) {
    const std::size_t per_epoch = subset_size(train.size(), r);
    REQUIRE(stream.size() == per_epoch * hp.epochs);
    for (std::size_t e = 0; e < hp.epochs; ++e) {
      for (std::size_t i = e * per_epoch + 1; i < (e + 1) * per_epoch; ++i) {
        CHECK(pvi.at(stream[i - 1]) >= pvi.at(stream[i]));
      }
    }
  }
  for (std::size_t a = 0; a + 1 < ratios.size(); ++a) {
    const auto& big = streams[ratios[a]];
    const auto& small = streams[ratios[a + 1]];
    const std::set<std::size_t> outer(big.begin(), big.end());
    for (auto idx : small) CHECK(outer.contains(idx));
  }
  for (const auto& s : res.stages) {
    CHECK(std::abs(s.precision_micro - s.accuracy) <= 1e-12);
    CHECK(std::abs(s.recall_micro - s.accuracy) <= 1e-12);
    CHECK(std::abs(s.f1_micro - s.accuracy) <= 1e-12);
  }
}

TEST_CASE("hard_first and original streams") {
  auto [train, test] = quick_corpus();
  const std::vector<double> ratios{0.2};
  std::vector<std::size_t> hard_stream, orig_stream;
  CurriculumOptions opts;
  opts.on_stream = [&](double, const std::vector<std::size_t>& s) { hard_stream = s; };
  const auto res = progressive_train(train, test, ratios, Ordering::hard_first, quick_hp(), opts);
  std::map<std::size_t, double> pvi;
  for (const auto& r : res.pvi) pvi[r.original_index] = r.pvi;
  const std::size_t n = subset_size(train.size(), 0.2);
  for (std::size_t i = 1; i < n; ++i) CHECK(pvi.at(hard_stream[i - 1]) <= pvi.at(hard_stream[i]));

  opts.on_stream = [&](double, const std::vector<std::size_t>& s) { orig_stream = s; };
  progressive_train(train, test, res.pvi, ratios, Ordering::original, quick_hp(), opts);
  for (std::size_t i = 1; i < n; ++i) CHECK(orig_stream[i - 1] < orig_stream[i]);
  // Same kept set either way.
  CHECK(std::set<std::size_t>(hard_stream.begin(), hard_stream.begin() + n) ==
        std::set<std::size_t>(orig_stream.begin(), orig_stream.begin() + n));
}

TEST_CASE("curriculum runs are deterministic across thread counts") {
  auto [train, test] = quick_corpus();
  const std::vector<double> ratios{0.0, 0.1, 0.2, 0.3};
  CurriculumOptions one;
  one.measure_time = false;
  CurriculumOptions many = one;
  many.jobs = 4;
  const auto a = progressive_train(train, test, ratios, Ordering::easy_first, quick_hp(), one);
  const auto b = progressive_train(train, test, ratios, Ordering::easy_first, quick_hp(), one);
  const auto c = progressive_train(train, test, ratios, Ordering::easy_first, quick_hp(), many);
  CHECK(a.stages == b.stages);
  CHECK(a.stages == c.stages);
  CHECK(stage_csv(a.stages) == stage_csv(c.stages));
}

TEST_CASE("warm start chains stages") {
  auto [train, test] = quick_corpus();
  const std::vector<double> ratios{0.0, 0.3};
  CurriculumOptions cold;
  cold.measure_time = false;
  CurriculumOptions warm = cold;
  warm.warm_start = true;
  const auto a = progressive_train(train, test, ratios, Ordering::easy_first, quick_hp(), cold);
  const auto b = progressive_train(train, test, ratios, Ordering::easy_first, quick_hp(), warm);
  CHECK(a.stages[0] == b.stages[0]);
  CHECK(b.stages[1].subset_size == a.stages[1].subset_size);
}

TEST_CASE("stage CSV round trip and multi-seed summary") {
  std::vector<StageReport> reps;
  const double accs[] = {0.5, 0.6, 0.7};
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const double a = accs[seed - 1];
    reps.push_back({Ordering::easy_first, 0.0, 10, a, a, a, a, 0.0, seed});
    reps.push_back({Ordering::easy_first, 0.1, 9, a / 2, a / 2, a / 2, a / 2, 0.25, seed});
  }
  const auto csv = stage_csv(reps);
  CHECK(csv.rfind("ordering,r,subset_size,accuracy,precision,recall,f1,train_seconds,seed\n", 0) == 0);
  CHECK(parse_stage_csv(csv) == reps);

  const auto sum = summarize_stages(reps);
  REQUIRE(sum.size() == 2);
  CHECK(sum[0].r == 0.0);
  CHECK(sum[0].runs == 3);
  CHECK(sum[0].accuracy_mean == doctest::Approx(0.6));
  CHECK(sum[0].accuracy_std == doctest::Approx(0.1));
  CHECK(sum[1].f1_mean == doctest::Approx(0.3));
  CHECK(sum[1].f1_std == doctest::Approx(0.05));
  const auto scsv = stage_summary_csv(sum);
  CHECK(std::count(scsv.begin(), scsv.end(), '\n') == 3);

  const std::vector<StageReport> single{{Ordering::original, 0.2, 5, 0.4, 0.4, 0.4, 0.4, 0.0, 1}};
  CHECK(summarize_stages(single)[0].accuracy_std == 0.0);
  CHECK(ordering_from_string("hard_first") == Ordering::hard_first);
  CHECK_THROWS(ordering_from_string("random"));
}
