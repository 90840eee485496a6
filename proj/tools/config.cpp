#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pvikit/errors.hpp"
#include "pvikit/io.hpp"

namespace pvikit::cli {

const std::vector<KeySpec>& config_keys() {
  static const std::vector<KeySpec> keys{
      {"run", "seed", "1", "base random seed"},
      {"run", "out_dir", "out", "directory receiving every artifact"},
      {"run", "jobs", "1", "worker threads across sweep points, stages or seeds"},
      {"run", "format", "jsonl", "dataset format when the extension does not say: jsonl|tsv"},
      {"run", "timing", "off", "measured|off; off writes 0 for every duration so reruns are byte-identical"},

      {"data", "train", "", "training set; empty means a generated synthetic corpus"},
      {"data", "test", "", "test set; empty means a generated synthetic corpus"},
      {"data", "eval", "", "set to score with PVI (default: the training set)"},
      {"data", "out", "", "PVI output path (default: <out_dir>/pvi.csv)"},
      {"data", "labels", "entailment,neutral,contradiction", "class names in index order"},
      {"data", "num_classes", "3", "number of classes; must match labels when both are set"},
      {"data", "filter", "true", "drop instances with empty fields or control characters"},

      {"model", "hash_bits", "16", "feature hash width in bits"},
      {"model", "ngram_orders", "1,2,3", "character n-gram orders"},
      {"model", "learning_rate", "0.03", "initial step size"},
      {"model", "schedule", "linear", "linear|constant learning-rate schedule"},
      {"model", "epochs", "2", "training epochs"},
      {"model", "batch_size", "32", "mini-batch size"},
      {"model", "l2", "1e-06", "L2 penalty on weights"},
      {"model", "prob_floor", "1e-12", "probability floor before log2"},

      {"experiment", "ratios", "", "reduction ratios (default 0..0.9 for sweep, 0..0.3 for curriculum)"},
      {"experiment", "strategy", "pvi", "pvi|pvi_balanced|random"},
      {"experiment", "variant", "original", "original|imbalanced|noisy"},
      {"experiment", "ordering", "easy_first", "easy_first|hard_first|original"},
      {"experiment", "seeds", "1", "curriculum runs; run i uses seed + i"},
      {"experiment", "warm_start", "false", "continue each curriculum stage from the previous model"},
      {"experiment", "derived_seeds", "false", "seed each sweep point with seed + point index"},
      {"experiment", "random_seed", "1", "seed for the random strategy"},

      {"synthetic", "train_size", "5000", "generated training instances"},
      {"synthetic", "test_size", "1000", "generated test instances"},
      {"synthetic", "test_seed_offset", "1000", "test corpus seed = seed + offset"},
      {"synthetic", "easy", "0.5", "share of easy instances"},
      {"synthetic", "medium", "0.3", "share of medium instances"},
      {"synthetic", "hard", "0.2", "share of hard instances"},
      {"synthetic", "decoy_rate", "0.5", "share of hard instances carrying a misleading keyword"},

      {"noise", "noise_ratio", "0.1", "share of instances corrupted in the noisy variant"},
      {"noise", "noise_seed", "1", "seed for noise injection"},
      {"noise", "noise_kinds", "char-swap,char-delete,punctuation-insert,token-shuffle,duplicate-fragment",
       "corruptions to draw from"},

      {"imbalance", "keep_fractions", "1,0.6,0.3", "per-class keep fraction in the imbalanced variant"},
      {"imbalance", "imbalance_seed", "1", "seed for class subsampling"},

      {"report", "unit", "scalars", "length unit: scalars|tokens"},
      {"report", "bucket_edges", "10,15,20,25,30", "upper edges of the length buckets"},
      {"report", "hist_bins", "20", "PVI histogram bins"},
      {"report", "hardest_k", "10", "hardest instances listed by pvi"},
      {"report", "sweep", "", "sweep CSV to plot (default: <out_dir>/sweep.csv if present)"},
      {"report", "runtime", "", "runtime CSV to plot (default: <out_dir>/runtime.csv if present)"},
      {"report", "pvi", "", "PVI CSV to plot (default: <out_dir>/pvi.csv if present)"},
  };
  return keys;
}

namespace {

const KeySpec* find_key(const std::string& key) {
  for (const auto& k : config_keys()) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    return io::parse_double(trim(v));
  } catch (const std::exception&) {
    throw UsageError(key + ": expected a number, got '" + v + "'");
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  const auto t = trim(v);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
    throw UsageError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  try {
    return std::stoull(t);
  } catch (const std::exception&) {
    throw UsageError(key + ": integer out of range: '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto t = trim(v);
  if (t == "true" || t == "1" || t == "on" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "off" || t == "no") return false;
  throw UsageError(key + ": expected true or false, got '" + v + "'");
}

template <typename Fn>
auto checked(const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(key + ": " + e.what());
  }
}

}  // namespace

RawConfig::RawConfig() {
  for (const auto& k : config_keys()) values_[k.key] = k.default_value;
}

void RawConfig::set(const std::string& key, const std::string& value) {
  if (!find_key(key)) throw UsageError("unknown config key '" + key + "'");
  values_[key] = value;
}

const std::string& RawConfig::get(const std::string& key) const { return values_.at(key); }

std::string RawConfig::merge_file(const std::filesystem::path& path) {
  const std::string content = io::read_file(path);
  const auto first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && content[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(content);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(path.string(), 0, std::string("invalid manifest: ") + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object()) {
      throw DataError(path.string(), 0, "manifest has no config object");
    }
    for (const auto& [section, body] : j["config"].items()) {
      for (const auto& [key, value] : body.items()) {
        if (!value.is_string()) throw DataError(path.string(), 0, "config value for '" + key + "' is not a string");
        set(key, value.get<std::string>());
      }
    }
    return j.value("command", "");
  }

  boost::property_tree::ptree tree;
  try {
    std::istringstream in(content);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw DataError(path.string(), e.line(), e.message());
  }
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      set(name, trim(node.data()));
      continue;
    }
    for (const auto& [key, leaf] : node) {
      const KeySpec* spec = find_key(key);
      if (!spec) throw UsageError(path.string() + ": unknown config key '" + key + "'");
      if (spec->section != name) {
        throw UsageError(path.string() + ": key '" + key + "' belongs in [" + spec->section + "], not [" + name + "]");
      }
      set(key, trim(leaf.data()));
    }
  }
  return "";
}

nlohmann::ordered_json RawConfig::to_json() const {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& k : config_keys()) out[k.section][k.key] = values_.at(k.key);
  return out;
}

std::string RawConfig::to_ini() const {
  std::string out, section;
  for (const auto& k : config_keys()) {
    if (k.section != section) {
      if (!section.empty()) out += "\n";
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += k.key + " = " + values_.at(k.key) + "\n";
  }
  return out;
}

RunConfig resolve(const RawConfig& raw) {
  RunConfig c;
  const auto& g = [&](const char* key) -> const std::string& { return raw.get(key); };

  c.seed = to_uint("seed", g("seed"));
  c.out_dir = g("out_dir");
  if (c.out_dir.empty()) throw UsageError("out_dir must not be empty");
  c.jobs = to_uint("jobs", g("jobs"));
  if (c.jobs == 0) throw UsageError("jobs must be at least 1");
  c.format = checked("format", [&] { return format_from_string(g("format")); });
  if (g("timing") == "measured") {
    c.measure_time = true;
  } else if (g("timing") != "off") {
    throw UsageError("timing: expected measured or off, got '" + g("timing") + "'");
  }

  c.train = g("train");
  c.test = g("test");
  c.eval = g("eval");
  c.out = g("out");
  const auto names = split_list(g("labels"));
  const auto num_classes = to_uint("num_classes", g("num_classes"));
  if (num_classes < 2) throw UsageError("num_classes must be at least 2");
  if (names.size() == num_classes) {
    c.labels.names = names;
  } else if (g("labels") == find_key("labels")->default_value) {
    c.labels.names.clear();
    for (std::size_t i = 0; i < num_classes; ++i) c.labels.names.push_back("class" + std::to_string(i));
  } else {
    throw UsageError("labels lists " + std::to_string(names.size()) + " names but num_classes is " +
                     std::to_string(num_classes));
  }
  c.filter = to_bool("filter", g("filter"));

  c.hp.hash_bits = static_cast<unsigned>(to_uint("hash_bits", g("hash_bits")));
  c.hp.ngram_orders.clear();
  for (const auto& o : split_list(g("ngram_orders"))) {
    c.hp.ngram_orders.push_back(static_cast<unsigned>(to_uint("ngram_orders", o)));
  }
  c.hp.learning_rate = to_double("learning_rate", g("learning_rate"));
  c.hp.schedule = checked("schedule", [&] { return lr_schedule_from_string(g("schedule")); });
  c.hp.epochs = to_uint("epochs", g("epochs"));
  c.hp.batch_size = to_uint("batch_size", g("batch_size"));
  c.hp.l2 = to_double("l2", g("l2"));
  c.hp.prob_floor = to_double("prob_floor", g("prob_floor"));
  c.hp.seed = c.seed;
  checked("model", [&] {
    c.hp.validate();
    return 0;
  });

  for (const auto& r : split_list(g("ratios"))) {
    const double v = to_double("ratios", r);
    checked("ratios", [&] { return subset_size(1, v); });
    c.ratios.push_back(v);
  }
  c.strategy = checked("strategy", [&] { return strategy_from_string(g("strategy")); });
  c.variant = checked("variant", [&] { return variant_from_string(g("variant")); });
  c.ordering = checked("ordering", [&] { return ordering_from_string(g("ordering")); });
  c.seeds = to_uint("seeds", g("seeds"));
  if (c.seeds == 0) throw UsageError("seeds must be at least 1");
  c.warm_start = to_bool("warm_start", g("warm_start"));
  c.derived_seeds = to_bool("derived_seeds", g("derived_seeds"));
  c.random_seed = to_uint("random_seed", g("random_seed"));

  c.synthetic.num_instances = to_uint("train_size", g("train_size"));
  c.synthetic.num_classes = c.labels.size();
  c.synthetic.easy = to_double("easy", g("easy"));
  c.synthetic.medium = to_double("medium", g("medium"));
  c.synthetic.hard = to_double("hard", g("hard"));
  c.synthetic.hard_decoy_rate = to_double("decoy_rate", g("decoy_rate"));
  c.synthetic.seed = c.seed;
  c.test_size = to_uint("test_size", g("test_size"));
  c.test_seed_offset = to_uint("test_seed_offset", g("test_seed_offset"));

  c.variant_spec.noise.replacement_ratio = to_double("noise_ratio", g("noise_ratio"));
  c.variant_spec.noise.seed = to_uint("noise_seed", g("noise_seed"));
  c.variant_spec.noise.kinds.clear();
  for (const auto& k : split_list(g("noise_kinds"))) {
    c.variant_spec.noise.kinds.push_back(checked("noise_kinds", [&] { return corruption_from_string(k); }));
  }
  c.variant_spec.keep_fractions.clear();
  for (const auto& f : split_list(g("keep_fractions"))) {
    c.variant_spec.keep_fractions.push_back(to_double("keep_fractions", f));
  }
  c.variant_spec.imbalance_seed = to_uint("imbalance_seed", g("imbalance_seed"));

  c.unit = checked("unit", [&] { return length_unit_from_string(g("unit")); });
  for (const auto& e : split_list(g("bucket_edges"))) c.bucket_edges.push_back(to_uint("bucket_edges", e));
  checked("bucket_edges", [&] { return bucket_labels(c.bucket_edges); });
  c.hist_bins = to_uint("hist_bins", g("hist_bins"));
  if (c.hist_bins == 0) throw UsageError("hist_bins must be at least 1");
  c.hardest_k = to_uint("hardest_k", g("hardest_k"));
  c.sweep_csv = g("sweep");
  c.runtime_csv = g("runtime");
  c.pvi_csv = g("pvi");
  return c;
}

}  // namespace pvikit::cli
