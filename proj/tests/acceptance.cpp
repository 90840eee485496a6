#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <span>
#include <sstream>
#include <string>

#include "pvikit/corpus.hpp"
#include "pvikit/curriculum.hpp"
#include "pvikit/family.hpp"
#include "pvikit/io.hpp"
#include "pvikit/pvi.hpp"
#include "pvikit/random.hpp"
#include "pvikit/reduction.hpp"

using namespace pvikit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::pair<SyntheticCorpus, SyntheticCorpus> corpus(std::size_t train_n, std::size_t test_n, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.num_instances = train_n;
  spec.seed = seed;
  auto train = generate_synthetic(spec);
  spec.num_instances = test_n;
  spec.seed = seed + 1000;
  return {std::move(train), generate_synthetic(spec)};
}

Dataset balanced_labels(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    d.instances.push_back({i, "p" + std::to_string(rng.below(1000)), "h" + std::to_string(rng.below(1000)),
                           static_cast<Label>(i % 3)});
  }
  return d;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return tv / 2;
}

// Mean of the last CSV column, read without the library's parser.
double csv_last_column_mean(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  double sum = 0.0;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    sum += std::strtod(line.substr(line.rfind(',') + 1).c_str(), nullptr);
    ++n;
  }
  return sum / static_cast<double>(n);
}

Outcome decomposition_identity() {
  const auto [train, test] = corpus(3000, 1000, 1);
  const auto run = run_pvi(train.dataset, test.dataset, Hyperparams{});
  const auto s = summarize(run.records);
  const double identity_err = std::abs(s.mean_pvi - (s.h_v_y - s.h_v_y_given_x));
  const double oracle_err = std::abs(s.i_v - csv_last_column_mean(pvi_csv(run.records)));
  return {identity_err <= 1e-9 && oracle_err <= 1e-9 && s.n == 1000,
          fmt("identity err %.2e, csv oracle err %.2e", identity_err, oracle_err)};
}

Outcome null_model_optimum() {
  const auto train = balanced_labels(3000, 5);
  const auto held_out = balanced_labels(3000, 6);
  const auto run = run_pvi(train, held_out, Hyperparams{});
  const std::vector<double> uniform(3, 1.0 / 3);
  double worst_tv = total_variation(predict_dist(run.g_null, "", ""), uniform);
  for (const auto& inst : held_out.instances) {
    worst_tv = std::max(worst_tv, total_variation(predict_dist(run.g_null, inst.premise, inst.hypothesis), uniform));
  }
  const double h_err = std::abs(summarize(run.records).h_v_y - std::log2(3.0));
  return {worst_tv <= 0.02 && h_err <= 0.05, fmt("tv %.4f, |h_v_y - log2 3| %.4f", worst_tv, h_err)};
}

const std::vector<double> kFullGrid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

Outcome balanced_eim_near_chance() {
  const auto [train, test] = corpus(5000, 1000, 1);
  SweepOptions opts;
  opts.measure_time = false;
  const auto res = static_sweep(train.dataset, test.dataset, kFullGrid, Variant::original, Strategy::pvi_balanced,
                                Hyperparams{}, opts);
  bool ok = res.points.size() == kFullGrid.size();
  double lo = 1.0, hi = 0.0;
  for (const auto& p : res.points) {
    lo = std::min(lo, p.eim_accuracy);
    hi = std::max(hi, p.eim_accuracy);
    ok = ok && p.balanced && p.eim_accuracy >= 0.29 && p.eim_accuracy <= 0.37;
  }
  return {ok, fmt("eim accuracy range [%.4f, %.4f]", lo, hi)};
}

const std::vector<double> kShapeGrid{0.0, 0.1, 0.2, 0.3, 0.9};

struct ShapeRuns {
  SweepResult first, second;
};

const ShapeRuns& shape_runs() {
  static const ShapeRuns runs = [] {
    ShapeRuns out;
    for (auto* slot : {&out.first, &out.second}) {
      const auto [train, test] = corpus(5000, 1000, 1);
      *slot = static_sweep(train.dataset, test.dataset, kShapeGrid, Variant::original, Strategy::pvi, Hyperparams{});
    }
    return out;
  }();
  return runs;
}

double cm_at(const SweepResult& res, double r) {
  for (const auto& p : res.points) {
    if (p.r == r) return p.cm_accuracy;
  }
  throw std::runtime_error("missing ratio");
}

Outcome table_shape() {
  const auto& runs = shape_runs();
  bool same = runs.first.points.size() == runs.second.points.size();
  for (std::size_t i = 0; same && i < runs.first.points.size(); ++i) {
    const auto& a = runs.first.points[i];
    const auto& b = runs.second.points[i];
    same = a.r == b.r && a.subset_size == b.subset_size && a.cm_accuracy == b.cm_accuracy &&
           a.eim_accuracy == b.eim_accuracy;
  }
  const double base = cm_at(runs.first, 0.0);
  double worst_gap = 0.0;
  for (double r : {0.1, 0.2, 0.3}) worst_gap = std::max(worst_gap, std::abs(cm_at(runs.first, r) - base));
  const double collapse = base - cm_at(runs.first, 0.9);
  return {same && worst_gap <= 0.02 && collapse >= 0.10,
          fmt("cm(0) %.4f, worst gap r<=0.3 %.4f, cm(0) - cm(0.9) %.4f", base, worst_gap, collapse) +
              (same ? ", rerun identical" : ", rerun differs")};
}

Outcome redundancy_witness() {
  const double eps_perf = 0.02;
  const auto& res = shape_runs().first;
  const double base = cm_at(res, 0.0);
  bool held = true;
  for (double r : {0.1, 0.2, 0.3}) held = held && base - cm_at(res, r) <= eps_perf;
  const bool violated = base - cm_at(res, 0.9) > eps_perf;
  return {held && violated, std::string("satisfied at r<=0.3: ") + (held ? "yes" : "no") +
                                ", violated at r=0.9: " + (violated ? "yes" : "no")};
}

// Mean cross-entropy (nats) plus (l2/2)||W||^2, straight from the parameter arrays.
double reference_objective(const Model& m, std::span<const Example> data, double l2) {
  const std::size_t C = m.num_classes();
  double total = 0.0;
  for (const auto& ex : data) {
    std::vector<double> z(m.bias().begin(), m.bias().end());
    for (const auto& [j, v] : ex.x.entries) {
      for (std::size_t c = 0; c < C; ++c) z[c] += m.weights()[j * C + c] * v;
    }
    const double mx = *std::max_element(z.begin(), z.end());
    double lse = 0.0;
    for (double v : z) lse += std::exp(v - mx);
    total += mx + std::log(lse) - z[ex.y];
  }
  double sq = 0.0;
  for (double w : m.weights()) sq += w * w;
  return total / static_cast<double>(data.size()) + 0.5 * l2 * sq;
}

Outcome gradient_check() {
  SyntheticSpec spec;
  spec.num_instances = 40;
  spec.seed = 3;
  const auto data = generate_synthetic(spec).dataset;
  Hyperparams hp;
  hp.hash_bits = 10;
  hp.l2 = 1e-3;
  const auto examples = featurize_dataset(data, hp);
  Model m(3, hp);
  Rng rng(13);
  for (auto& w : m.weights()) w = rng.uniform() - 0.5;
  for (auto& b : m.bias()) b = rng.uniform() - 0.5;
  const auto g = gradient(m, examples, hp.l2);

  std::vector<std::size_t> active;
  for (const auto& ex : examples) {
    for (const auto& [j, v] : ex.x.entries) {
      for (std::size_t c = 0; c < 3; ++c) active.push_back(j * 3 + c);
    }
  }
  const double h = 1e-5;
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const std::size_t idx = active[rng.below(active.size())];
    const double saved = m.weights()[idx];
    m.weights()[idx] = saved + h;
    const double up = reference_objective(m, examples, hp.l2);
    m.weights()[idx] = saved - h;
    const double down = reference_objective(m, examples, hp.l2);
    m.weights()[idx] = saved;
    const double numeric = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(numeric - g.weights[idx]) /
                                std::max(1e-8, std::abs(numeric) + std::abs(g.weights[idx])));
  }
  return {worst < 1e-4, fmt("worst relative error %.2e over 10 coordinates", worst)};
}

Outcome closure() {
  Rng rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t C = 2 + rng.below(5);
    std::vector<double> target(C);
    double sum = 0.0;
    for (auto& p : target) sum += (p = 0.01 + rng.uniform());
    for (auto& p : target) p /= sum;
    const auto model = constant_predictor(target);
    const std::string premise = trial == 0 ? "" : "premise " + std::to_string(rng.below(100000));
    const std::string hypothesis = trial == 0 ? "" : std::string(rng.below(40), 'a' + rng.below(26));
    const auto got = predict_dist(model, premise, hypothesis);
    for (std::size_t c = 0; c < C; ++c) worst = std::max(worst, std::abs(got[c] - target[c]));
  }
  return {worst <= 1e-9, fmt("worst deviation %.2e over 100 inputs", worst)};
}

Outcome subset_laws() {
  std::size_t mismatches = 0;
  for (std::size_t m = 0; m <= 10000; ++m) {
    for (std::size_t k = 0; k < 100; ++k) {
      if (subset_size(m, static_cast<double>(k) / 100.0) != m * (100 - k) / 100) ++mismatches;
    }
  }
  Rng rng(11);
  std::size_t oracle_failures = 0, order_failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Dataset d;
    std::vector<PviRecord> recs;
    for (std::size_t i = 0; i < 100; ++i) {
      const std::size_t idx = 3 * i + rng.below(3);
      d.instances.push_back({idx, "p", "h", static_cast<Label>(i % 3)});
      const double pvi = static_cast<double>(rng.below(40)) / 8.0 - 2.0;
      recs.push_back({idx, -1.0, pvi - 1.0, pvi});
    }
    const std::size_t k = rng.below(100);
    const double r = static_cast<double>(k) / 100.0;
    // Re-sort by hand: descending PVI, ascending index on ties; drop the first k.
    auto sorted = recs;
    for (std::size_t a = 0; a < sorted.size(); ++a) {
      for (std::size_t b = 0; b + 1 < sorted.size() - a; ++b) {
        const auto& x = sorted[b];
        const auto& y = sorted[b + 1];
        if (x.pvi < y.pvi || (x.pvi == y.pvi && x.original_index > y.original_index)) std::swap(sorted[b], sorted[b + 1]);
      }
    }
    std::set<std::size_t> expect;
    for (std::size_t i = k; i < 100; ++i) expect.insert(sorted[i].original_index);
    const auto sub = select_subset(d, recs, r);
    std::vector<std::size_t> got;
    for (const auto& inst : sub.instances) got.push_back(inst.original_index);
    if (std::set<std::size_t>(got.begin(), got.end()) != expect || got.size() != expect.size()) ++oracle_failures;
    for (std::size_t i = 1; i < got.size(); ++i) order_failures += got[i - 1] >= got[i];
  }
  return {mismatches == 0 && oracle_failures == 0 && order_failures == 0,
          fmt("size mismatches %.0f, oracle mismatches %.0f, order violations %.0f", static_cast<double>(mismatches),
              static_cast<double>(oracle_failures), static_cast<double>(order_failures))};
}

Outcome curriculum_properties() {
  const std::vector<double> ratios{0.0, 0.1, 0.2, 0.3};
  std::size_t monotone_violations = 0, nesting_violations = 0;
  double micro_err = 0.0, easy_sum = 0.0, orig_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto [train, test] = corpus(5000, 1000, seed);
    Hyperparams hp;
    hp.seed = seed;
    std::map<double, std::vector<std::size_t>> streams;
    std::mutex mu;
    CurriculumOptions opts;
    opts.measure_time = false;
    opts.on_stream = [&](double r, const std::vector<std::size_t>& s) {
      std::lock_guard lock(mu);
      streams[r] = s;
    };
    const auto easy = progressive_train(train.dataset, test.dataset, ratios, Ordering::easy_first, hp, opts);
    opts.on_stream = nullptr;
    const auto orig = progressive_train(train.dataset, test.dataset, easy.pvi, ratios, Ordering::original, hp, opts);

    std::map<std::size_t, double> pvi;
    for (const auto& rec : easy.pvi) pvi[rec.original_index] = rec.pvi;
    for (const auto& [r, stream] : streams) {
      const std::size_t per_epoch = subset_size(train.dataset.size(), r);
      for (std::size_t e = 0; e < hp.epochs; ++e) {
        for (std::size_t i = e * per_epoch + 1; i < (e + 1) * per_epoch; ++i) {
          monotone_violations += pvi.at(stream[i - 1]) < pvi.at(stream[i]);
        }
      }
    }
    for (std::size_t a = 0; a + 1 < ratios.size(); ++a) {
      const auto& outer_stream = streams[ratios[a]];
      const std::set<std::size_t> outer(outer_stream.begin(), outer_stream.end());
      for (auto idx : streams[ratios[a + 1]]) nesting_violations += !outer.contains(idx);
    }
    for (const auto* res : {&easy, &orig}) {
      for (const auto& s : res->stages) {
        micro_err = std::max({micro_err, std::abs(s.precision_micro - s.accuracy),
                              std::abs(s.recall_micro - s.accuracy), std::abs(s.f1_micro - s.accuracy)});
      }
    }
    easy_sum += easy.stages[0].accuracy;
    orig_sum += orig.stages[0].accuracy;
  }
  const double easy_mean = easy_sum / 3, orig_mean = orig_sum / 3;
  const bool ok = monotone_violations == 0 && nesting_violations == 0 && micro_err <= 1e-12 &&
                  easy_mean >= orig_mean - 0.005;
  return {ok, fmt("easy_first %.4f vs original %.4f at r=0, micro err %.1e", easy_mean, orig_mean, micro_err) +
                  fmt(", stream violations %.0f, nesting violations %.0f", static_cast<double>(monotone_violations),
                      static_cast<double>(nesting_violations))};
}

int run_cli(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && '" + PVIKIT_BIN + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = io::read_file(e.path());
  return out;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "pvikit_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string small = " --train-size 1000 --test-size 300";
  const std::string data = " --train g/train.jsonl --test g/test.jsonl";
  const std::vector<std::pair<std::string, std::string>> runs{
      {"gen", "gen --out-dir g --variant noisy" + small},
      {"pvi", "pvi --out-dir p --train g/train.jsonl --eval g/test.jsonl"},
      {"sweep", "sweep --out-dir s --jobs 2 --variant imbalanced" + data},
      {"curriculum", "curriculum --out-dir c --seeds 2" + data},
      {"stats", "stats --out-dir t --train g/train.jsonl"},
      {"report", "report --out-dir s"},
  };
  std::size_t compared = 0;
  std::string failure;
  for (const auto& [cmd, args] : runs) {
    const std::string dir = args.substr(args.find("--out-dir ") + 10, 1);
    if (run_cli(root, args) != 0) {
      failure = cmd + " failed";
      break;
    }
    const auto first = snapshot(root / dir);
    const auto manifest = root / (cmd + ".json");
    fs::copy_file(root / dir / (cmd + "_manifest.json"), manifest, fs::copy_options::overwrite_existing);
    if (run_cli(root, cmd + " --config " + manifest.filename().string()) != 0) {
      failure = cmd + " rerun failed";
      break;
    }
    const auto second = snapshot(root / dir);
    if (first != second) {
      failure = cmd + " outputs differ";
      break;
    }
    compared += first.size();
  }
  fs::remove_all(root);
  return {failure.empty(), failure.empty() ? fmt("%.0f files byte-identical across 6 commands",
                                                 static_cast<double>(compared))
                                           : failure};
}

Outcome runtime_shape() {
  const auto& runs = shape_runs();
  auto eim_seconds = [&](double r) {
    double best = 1e300;
    for (const auto* res : {&runs.first, &runs.second}) {
      for (const auto& p : res->points) {
        if (p.r == r) best = std::min(best, p.eim_train_seconds);
      }
    }
    return best;
  };
  const double full = eim_seconds(0.0), reduced = eim_seconds(0.9);
  return {reduced < full, fmt("eim train seconds %.4f at r=0, %.4f at r=0.9", full, reduced)};
}

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;  // 0 means no budget
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "pvi decomposition identity", 1, decomposition_identity},
      {2, "null model optimum", 5, null_model_optimum},
      {3, "balanced reduction keeps the empty-input model near chance", 120, balanced_eim_near_chance},
      {4, "reduction curve shape", 180, table_shape},
      {5, "redundancy threshold witness", 0, redundancy_witness},
      {6, "gradient check", 1, gradient_check},
      {7, "constant predictor closure", 0, closure},
      {8, "subset laws", 0, subset_laws},
      {9, "curriculum properties", 180, curriculum_properties},
      {10, "determinism", 0, determinism},
      {11, "runtime shape", 0, runtime_shape},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = c.budget_seconds == 0 || secs < c.budget_seconds;
    if (!in_budget) out.detail += fmt(", over budget of %.0f s", c.budget_seconds);
    const bool pass = out.pass && in_budget;
    failures += !pass;
    std::printf("%s %2d %s (%.2f s): %s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs, out.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
