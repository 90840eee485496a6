#include "commands.hpp"

#include <iostream>

#include "pvikit/errors.hpp"
#include "pvikit/io.hpp"
#include "pvikit/parallel.hpp"
#include "pvikit/runtime.hpp"

namespace pvikit::cli {

namespace fs = std::filesystem;

namespace {

std::string default_ratios(const std::string& command) {
  return command == "curriculum" ? "0,0.1,0.2,0.3" : "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
}

class Run {
 public:
  Run(std::string command, RawConfig raw) : command_(std::move(command)), raw_(std::move(raw)) {
    if ((command_ == "sweep" || command_ == "curriculum") && raw_.get("ratios").empty()) {
      raw_.set("ratios", default_ratios(command_));
    }
    cfg_ = resolve(raw_);
  }

  const RunConfig& cfg() const { return cfg_; }

  Format format_for(const fs::path& path) const {
    const auto ext = path.extension().string();
    if (ext == ".tsv") return Format::tsv;
    if (ext == ".jsonl" || ext == ".json") return Format::jsonl;
    return cfg_.format;
  }

  Dataset load(const fs::path& path, const std::string& role) {
    const std::string content = io::read_file(path);
    Dataset d = parse_dataset(content, format_for(path), cfg_.labels, path.string());
    auto& entry = datasets_[role];
    entry["path"] = path.string();
    entry["fnv1a64"] = io::hex64(io::fnv1a64(content));
    entry["instances"] = d.size();
    if (cfg_.filter) {
      auto filtered = filter_invalid(d);
      for (const auto& [reason, n] : filtered.removed) {
        entry["removed"][reason] = n;
        std::cerr << "warning: " << path.string() << ": dropped " << n << " instance(s) (" << reason << ")\n";
      }
      d = std::move(filtered.dataset);
    }
    if (d.empty()) throw DataError(path.string(), 0, "no usable instances");
    return d;
  }

  SyntheticCorpus synthesize(const std::string& role) {
    SyntheticSpec spec = cfg_.synthetic;
    if (role == "test") {
      spec.num_instances = cfg_.test_size;
      spec.seed = cfg_.seed + cfg_.test_seed_offset;
    }
    SyntheticCorpus corpus;
    try {
      corpus = generate_synthetic(spec);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("synthetic corpus: ") + e.what());
    }
    auto& entry = datasets_[role];
    entry["path"] = "";
    entry["synthetic_seed"] = spec.seed;
    entry["fnv1a64"] = io::hex64(io::fnv1a64(serialize_dataset(corpus.dataset, Format::jsonl, cfg_.labels)));
    entry["instances"] = corpus.dataset.size();
    return corpus;
  }

  // Train/test pair: both from files, or both generated.
  std::pair<Dataset, Dataset> train_test() {
    if (cfg_.train.empty() != cfg_.test.empty()) throw UsageError("give both --train and --test, or neither");
    if (cfg_.train.empty()) return {synthesize("train").dataset, synthesize("test").dataset};
    return {load(cfg_.train, "train"), load(cfg_.test, "test")};
  }

  Dataset train_only() { return cfg_.train.empty() ? synthesize("train").dataset : load(cfg_.train, "train"); }

  // Artifacts named by a bare file name land in out_dir; explicit paths are
  // taken as given.
  void output(const fs::path& name, std::string content, bool exact = false) {
    outputs_.emplace_back(exact ? name : cfg_.out_dir / name, std::move(content));
  }

  fs::path optional_input(const fs::path& configured, const char* file) const {
    if (!configured.empty()) return configured;
    const fs::path fallback = cfg_.out_dir / file;
    return fs::exists(fallback) ? fallback : fs::path{};
  }

  void finish() {
    fs::create_directories(cfg_.out_dir);
    nlohmann::ordered_json manifest;
    manifest["format"] = "pvikit-manifest";
    manifest["version"] = 1;
    manifest["command"] = command_;
    manifest["config"] = raw_.to_json();
    manifest["datasets"] = datasets_.empty() ? nlohmann::ordered_json::object() : datasets_;
    manifest["outputs"] = nlohmann::ordered_json::object();
    for (const auto& [path, content] : outputs_) {
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      io::write_file_atomic(path, content);
      const auto rel = path.lexically_relative(cfg_.out_dir);
      const bool inside = !rel.empty() && rel.begin()->string() != "..";
      manifest["outputs"][inside ? rel.generic_string() : path.generic_string()] = io::hex64(io::fnv1a64(content));
    }
    manifest["wall_clock_seconds"] = cfg_.measure_time ? clock_.seconds() : 0.0;
    io::write_file_atomic(cfg_.out_dir / (command_ + "_manifest.json"), manifest.dump(2) + "\n");
  }

 private:
  std::string command_;
  RawConfig raw_;
  RunConfig cfg_;
  nlohmann::ordered_json datasets_ = nlohmann::ordered_json::object();
  std::vector<std::pair<fs::path, std::string>> outputs_;
  Stopwatch clock_;
};

std::string ext(Format f) { return f == Format::tsv ? ".tsv" : ".jsonl"; }

// Dataset validation failures surface as data errors against the input file.
template <typename Fn>
auto on_data(const fs::path& source, Fn&& fn) {
  try {
    return fn();
  } catch (const DataError&) {
    throw;
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw DataError(source.string(), 0, e.what());
  } catch (const std::out_of_range& e) {
    throw DataError(source.string(), 0, e.what());
  }
}

void cmd_gen(Run& run) {
  const auto& c = run.cfg();
  const auto train = run.synthesize("train");
  const auto test = run.synthesize("test");
  run.output("train" + ext(c.format), serialize_dataset(train.dataset, c.format, c.labels));
  run.output("test" + ext(c.format), serialize_dataset(test.dataset, c.format, c.labels));
  std::string tiers = "original_index,tier\n";
  for (std::size_t i = 0; i < train.tiers.size(); ++i) {
    tiers += std::to_string(train.dataset.instances[i].original_index) + "," +
             std::string(to_string(train.tiers[i])) + "\n";
  }
  run.output("tiers.csv", tiers);
  if (c.variant != Variant::original) {
    const auto variant = on_data("train", [&] { return make_variant(train.dataset, c.variant, c.variant_spec); });
    run.output("train_" + std::string(to_string(c.variant)) + ext(c.format),
               serialize_dataset(variant, c.format, c.labels));
  }
}

void cmd_pvi(Run& run) {
  const auto& c = run.cfg();
  const Dataset train = run.train_only();
  const Dataset target = c.eval.empty() ? train : run.load(c.eval, "eval");
  const auto result = on_data(c.train, [&] { return run_pvi(train, target, c.hp); });
  if (c.out.empty()) {
    run.output("pvi.csv", pvi_csv(result.records));
  } else {
    run.output(c.out, pvi_csv(result.records), true);
  }

  const auto info = summarize(result.records);
  nlohmann::ordered_json summary;
  summary["n"] = info.n;
  summary["h_v_y"] = info.h_v_y;
  summary["h_v_y_given_x"] = info.h_v_y_given_x;
  summary["i_v"] = info.i_v;
  summary["mean_pvi"] = info.mean_pvi;
  run.output("pvi_summary.json", summary.dump(2) + "\n");

  const auto hard = hardest_k(result.records, target, std::min(c.hardest_k, result.records.size()));
  std::string hard_csv = "original_index,pvi,label,premise,hypothesis\n";
  for (const auto& h : hard) {
    hard_csv += io::csv_row({std::to_string(h.instance.original_index), io::format_double(h.pvi),
                             c.labels.name_of(h.instance.label), h.instance.premise, h.instance.hypothesis});
  }
  run.output("hardest.csv", hard_csv);
  run.output("pvi_hist.svg", emit_histogram_plot(pvi_histogram(result.records, c.hist_bins)));
}

void cmd_sweep(Run& run) {
  const auto& c = run.cfg();
  auto [train, test] = run.train_test();
  train = on_data(c.train, [&] { return make_variant(train, c.variant, c.variant_spec); });
  SweepOptions opts;
  opts.jobs = c.jobs;
  opts.derived_seeds = c.derived_seeds;
  opts.measure_time = c.measure_time;
  opts.random_seed = c.random_seed;
  const auto result = on_data(c.train, [&] {
    return static_sweep(train, test, c.ratios, c.variant, c.strategy, c.hp, opts);
  });
  run.output("sweep.csv", sweep_csv(result.points));
  run.output("runtime.csv", runtime_csv(result.runtime));
  if (!result.pvi.empty()) run.output("pvi.csv", pvi_csv(result.pvi));
  run.output("accuracy.svg", emit_accuracy_plot(result.points));
  run.output("runtime.svg", emit_runtime_plot(result.runtime));
}

void cmd_curriculum(Run& run) {
  const auto& c = run.cfg();
  const auto [train, test] = run.train_test();
  std::vector<std::vector<StageReport>> per_seed(c.seeds);
  CurriculumOptions opts;
  opts.warm_start = c.warm_start;
  opts.measure_time = c.measure_time;
  // Parallelism goes to seeds when there are several, otherwise to stages.
  opts.jobs = c.seeds > 1 ? 1 : c.jobs;
  on_data(c.train, [&] {
    parallel_for(c.seeds, c.jobs, [&](std::size_t i) {
      Hyperparams hp = c.hp;
      hp.seed = c.seed + i;
      per_seed[i] = progressive_train(train, test, c.ratios, c.ordering, hp, opts).stages;
    });
    return 0;
  });
  std::vector<StageReport> all;
  for (const auto& s : per_seed) all.insert(all.end(), s.begin(), s.end());
  run.output("curriculum.csv", stage_csv(all));
  run.output("curriculum_summary.csv", stage_summary_csv(summarize_stages(all)));
}

void cmd_stats(Run& run) {
  const auto& c = run.cfg();
  const Dataset data = run.train_only();
  const auto stats = on_data(c.train, [&] { return length_stats(data, c.unit, c.labels); });
  for (const auto& w : stats.warnings) std::cerr << "warning: " << w << "\n";
  run.output("stats.csv", length_stats_csv(stats));
  run.output("buckets.csv", bucket_csv(on_data(c.train, [&] {
               return bucket_proportions(data, c.bucket_edges, c.unit, c.labels);
             })));
}

void cmd_report(Run& run) {
  const auto& c = run.cfg();
  const auto sweep = run.optional_input(c.sweep_csv, "sweep.csv");
  const auto runtime = run.optional_input(c.runtime_csv, "runtime.csv");
  const auto pvi = run.optional_input(c.pvi_csv, "pvi.csv");
  if (sweep.empty() && runtime.empty() && pvi.empty()) {
    throw UsageError("report found no sweep.csv, runtime.csv or pvi.csv; pass --sweep, --runtime or --pvi");
  }
  if (!sweep.empty()) {
    const auto text = io::read_file(sweep);
    const auto points = on_data(sweep, [&] { return parse_sweep_csv(text); });
    if (points.empty()) throw DataError(sweep.string(), 0, "no sweep rows");
    run.output("accuracy.svg", emit_accuracy_plot(points));
  }
  if (!runtime.empty()) {
    const auto text = io::read_file(runtime);
    run.output("runtime.svg", emit_runtime_plot(on_data(runtime, [&] { return parse_runtime_csv(text); })));
  }
  if (!pvi.empty()) {
    const auto text = io::read_file(pvi);
    const auto records = on_data(pvi, [&] { return parse_pvi_csv(text); });
    if (records.empty()) throw DataError(pvi.string(), 0, "no PVI rows");
    run.output("pvi_hist.svg", emit_histogram_plot(pvi_histogram(records, c.hist_bins)));
  }
}

}  // namespace

void run_command(const std::string& command, const RawConfig& raw) {
  Run run(command, raw);
  if (command == "gen") {
    cmd_gen(run);
  } else if (command == "pvi") {
    cmd_pvi(run);
  } else if (command == "sweep") {
    cmd_sweep(run);
  } else if (command == "curriculum") {
    cmd_curriculum(run);
  } else if (command == "stats") {
    cmd_stats(run);
  } else if (command == "report") {
    cmd_report(run);
  } else {
    throw UsageError("unknown command '" + command + "'");
  }
  run.finish();
}

}  // namespace pvikit::cli
