#include "pvikit/family.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pvikit/io.hpp"
#include "pvikit/random.hpp"

namespace pvikit {

std::string_view to_string(LrSchedule s) { return s == LrSchedule::linear ? "linear" : "constant"; }

LrSchedule lr_schedule_from_string(std::string_view s) {
  if (s == "linear") return LrSchedule::linear;
  if (s == "constant") return LrSchedule::constant;
  throw std::invalid_argument("unknown learning-rate schedule '" + std::string(s) + "'");
}

void Hyperparams::validate() const {
  if (hash_bits == 0 || hash_bits > 24) throw std::invalid_argument("hash_bits must be in [1, 24]");
  if (ngram_orders.empty()) throw std::invalid_argument("ngram_orders must not be empty");
  for (unsigned o : ngram_orders) {
    if (o == 0) throw std::invalid_argument("ngram orders must be positive");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be at least 1");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw std::invalid_argument("l2 must be non-negative");
  if (!(prob_floor > 0.0 && prob_floor < 1.0)) throw std::invalid_argument("prob_floor must lie in (0, 1)");
}

Model::Model(std::size_t num_classes, Hyperparams hp)
    : num_classes_(num_classes), hp_(std::move(hp)) {
  if (num_classes_ < 2) throw std::invalid_argument("a model needs at least 2 classes");
  hp_.validate();
  weights_.assign(dimension() * num_classes_, 0.0);
  bias_.assign(num_classes_, 0.0);
}

std::vector<double> Model::logits(const FeatureVector& x) const {
  std::vector<double> z(bias_.begin(), bias_.end());
  for (const auto& [j, v] : x.entries) {
    const double* w = &weights_[static_cast<std::size_t>(j) * num_classes_];
    for (std::size_t c = 0; c < num_classes_; ++c) z[c] += w[c] * v;
  }
  return z;
}

namespace {

// In-place softmax; returns log-sum-exp of the input.
double softmax_inplace(std::vector<double>& z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - zmax);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return zmax + std::log(sum);
}

double log_softmax_at(const std::vector<double>& z, std::size_t y) {
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - zmax);
  return z[y] - zmax - std::log(sum);
}

void check_labels(std::span<const Example> data, std::size_t num_classes) {
  for (const auto& ex : data) {
    if (ex.y >= num_classes) {
      throw std::invalid_argument("label " + std::to_string(ex.y) + " out of range for " +
                                  std::to_string(num_classes) + " classes");
    }
  }
}

}  // namespace

std::vector<Example> featurize_dataset(const Dataset& dataset, const Hyperparams& hp) {
  std::vector<Example> out;
  out.reserve(dataset.size());
  for (const auto& inst : dataset.instances) {
    out.push_back({featurize(inst.premise, inst.hypothesis, hp.hash_bits, hp.ngram_orders), inst.label});
  }
  return out;
}

TrainResult train(const Dataset& dataset, const Hyperparams& hp, const TrainOptions& options) {
  hp.validate();
  if (dataset.empty()) throw std::invalid_argument("cannot train on an empty dataset");
  const auto examples = featurize_dataset(dataset, hp);
  check_labels(examples, dataset.num_classes);

  TrainResult result;
  if (const Model* init = options.warm_start) {
    if (init->num_classes() != dataset.num_classes || init->hyperparams().hash_bits != hp.hash_bits ||
        init->hyperparams().ngram_orders != hp.ngram_orders) {
      throw std::invalid_argument("warm-start model is incompatible with the training setup");
    }
    result.model = Model(dataset.num_classes, hp);
    std::copy(init->weights().begin(), init->weights().end(), result.model.weights().begin());
    std::copy(init->bias().begin(), init->bias().end(), result.model.bias().begin());
  } else {
    result.model = Model(dataset.num_classes, hp);
  }
  Model& model = result.model;
  model.trained_on = dataset.provenance;

  const std::size_t m = examples.size();
  const std::size_t C = dataset.num_classes;
  auto weights = model.weights();
  auto bias = model.bias();
  const std::size_t steps_per_epoch = (m + hp.batch_size - 1) / hp.batch_size;
  const double total_steps = static_cast<double>(steps_per_epoch * hp.epochs);
  std::size_t step = 0;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(hp.seed);

  // Per-batch residuals (p - onehot) / N, computed at the pre-step parameters.
  std::vector<double> residual(hp.batch_size * C);
  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    if (!hp.preserve_order) rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < m; start += hp.batch_size) {
      const std::size_t end = std::min(m, start + hp.batch_size);
      const double inv_n = 1.0 / static_cast<double>(end - start);
      const double lr = hp.schedule == LrSchedule::linear
                            ? hp.learning_rate * (1.0 - static_cast<double>(step) / total_steps)
                            : hp.learning_rate;
      ++step;
      if (options.on_batch) options.on_batch(epoch, std::span<const std::size_t>(order).subspan(start, end - start));
      for (std::size_t b = start; b < end; ++b) {
        const auto& ex = examples[order[b]];
        auto z = model.logits(ex.x);
        const double target_logit = z[ex.y];
        loss_sum += softmax_inplace(z) - target_logit;
        double* r = &residual[(b - start) * C];
        for (std::size_t c = 0; c < C; ++c) r[c] = (z[c] - (c == ex.y ? 1.0 : 0.0)) * inv_n;
      }
      if (hp.l2 > 0.0) {
        const double decay = 1.0 - lr * hp.l2;
        for (double& w : weights) w *= decay;
      }
      for (std::size_t b = start; b < end; ++b) {
        const auto& ex = examples[order[b]];
        const double* r = &residual[(b - start) * C];
        for (const auto& [j, v] : ex.x.entries) {
          double* w = &weights[static_cast<std::size_t>(j) * C];
          for (std::size_t c = 0; c < C; ++c) w[c] -= lr * r[c] * v;
        }
        for (std::size_t c = 0; c < C; ++c) bias[c] -= lr * r[c];
      }
    }
    result.epoch_loss.push_back(loss_sum / static_cast<double>(m));
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw std::runtime_error("training diverged (non-finite weight)");
  }
  return result;
}

std::vector<double> predict_dist(const Model& model, std::string_view premise, std::string_view hypothesis) {
  const auto& hp = model.hyperparams();
  auto z = model.logits(featurize(premise, hypothesis, hp.hash_bits, hp.ngram_orders));
  softmax_inplace(z);
  return z;
}

double log2_prob(const Model& model, std::string_view premise, std::string_view hypothesis, Label label) {
  if (label >= model.num_classes()) throw std::invalid_argument("label out of range");
  const auto& hp = model.hyperparams();
  const auto z = model.logits(featurize(premise, hypothesis, hp.hash_bits, hp.ngram_orders));
  const double lp = log_softmax_at(z, label) / std::log(2.0);
  return std::max(lp, std::log2(hp.prob_floor));
}

Model constant_predictor(std::span<const double> dist, const Hyperparams& hp) {
  if (dist.size() < 2) throw std::invalid_argument("distribution needs at least 2 classes");
  double sum = 0.0;
  for (double p : dist) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("distribution entries must be positive");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("distribution must sum to 1");
  Model model(dist.size(), hp);
  for (std::size_t c = 0; c < dist.size(); ++c) model.bias()[c] = std::log(dist[c]);
  return model;
}

Label predict_label(const Model& model, std::string_view premise, std::string_view hypothesis) {
  const auto& hp = model.hyperparams();
  const auto z = model.logits(featurize(premise, hypothesis, hp.hash_bits, hp.ngram_orders));
  // max_element returns the first maximum, i.e. the lowest class index.
  return static_cast<Label>(std::max_element(z.begin(), z.end()) - z.begin());
}

EvalReport evaluate(const Model& model, const Dataset& dataset) {
  if (dataset.empty()) throw std::invalid_argument("cannot evaluate on an empty dataset");
  if (dataset.num_classes != model.num_classes()) {
    throw std::invalid_argument("model and dataset disagree on the number of classes");
  }
  EvalReport report;
  report.n = dataset.size();
  report.per_class.resize(model.num_classes());
  std::size_t correct = 0;
  for (const auto& inst : dataset.instances) {
    const Label pred = predict_label(model, inst.premise, inst.hypothesis);
    ++report.per_class.at(inst.label).support;
    ++report.per_class[pred].predicted;
    if (pred == inst.label) {
      ++report.per_class[pred].correct;
      ++correct;
    }
  }
  // Micro-averaged counts: every wrong prediction is one false positive
  // (for the predicted class) and one false negative (for the true class).
  const double tp = static_cast<double>(correct);
  const double fp = static_cast<double>(report.n - correct);
  const double fn = fp;
  report.accuracy = tp / static_cast<double>(report.n);
  report.precision_micro = tp / (tp + fp);
  report.recall_micro = tp / (tp + fn);
  report.f1_micro = (2.0 * tp) / (2.0 * tp + fp + fn);
  return report;
}

double objective(const Model& model, std::span<const Example> data, double l2) {
  if (data.empty()) throw std::invalid_argument("objective needs data");
  check_labels(data, model.num_classes());
  double loss = 0.0;
  for (const auto& ex : data) loss -= log_softmax_at(model.logits(ex.x), ex.y);
  loss /= static_cast<double>(data.size());
  double sq = 0.0;
  for (double w : model.weights()) sq += w * w;
  return loss + 0.5 * l2 * sq;
}

Gradient gradient(const Model& model, std::span<const Example> data, double l2) {
  if (data.empty()) throw std::invalid_argument("gradient needs data");
  check_labels(data, model.num_classes());
  const std::size_t C = model.num_classes();
  Gradient g;
  g.weights.assign(model.weights().size(), 0.0);
  g.bias.assign(C, 0.0);
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (const auto& ex : data) {
    auto z = model.logits(ex.x);
    softmax_inplace(z);
    for (std::size_t c = 0; c < C; ++c) {
      const double r = (z[c] - (c == ex.y ? 1.0 : 0.0)) * inv_n;
      g.bias[c] += r;
      for (const auto& [j, v] : ex.x.entries) g.weights[static_cast<std::size_t>(j) * C + c] += r * v;
    }
  }
  const auto w = model.weights();
  for (std::size_t i = 0; i < w.size(); ++i) g.weights[i] += l2 * w[i];
  return g;
}

namespace {

constexpr int kModelFormatVersion = 1;

nlohmann::ordered_json hyperparams_to_json(const Hyperparams& hp) {
  nlohmann::ordered_json j;
  j["hash_bits"] = hp.hash_bits;
  j["ngram_orders"] = hp.ngram_orders;
  j["learning_rate"] = hp.learning_rate;
  j["schedule"] = std::string(to_string(hp.schedule));
  j["epochs"] = hp.epochs;
  j["batch_size"] = hp.batch_size;
  j["l2"] = hp.l2;
  j["seed"] = hp.seed;
  j["prob_floor"] = hp.prob_floor;
  j["preserve_order"] = hp.preserve_order;
  return j;
}

Hyperparams hyperparams_from_json(const nlohmann::json& j) {
  Hyperparams hp;
  hp.hash_bits = j.at("hash_bits").get<unsigned>();
  hp.ngram_orders = j.at("ngram_orders").get<std::vector<unsigned>>();
  hp.learning_rate = j.at("learning_rate").get<double>();
  hp.schedule = lr_schedule_from_string(j.value("schedule", std::string("constant")));
  hp.epochs = j.at("epochs").get<std::size_t>();
  hp.batch_size = j.at("batch_size").get<std::size_t>();
  hp.l2 = j.at("l2").get<double>();
  hp.seed = j.at("seed").get<std::uint64_t>();
  hp.prob_floor = j.at("prob_floor").get<double>();
  hp.preserve_order = j.value("preserve_order", false);
  return hp;
}

}  // namespace

std::string model_to_json(const Model& model) {
  nlohmann::ordered_json j;
  j["format"] = "pvikit-model";
  j["version"] = kModelFormatVersion;
  j["num_classes"] = model.num_classes();
  j["trained_on"] = std::string(to_string(model.trained_on));
  j["hyperparams"] = hyperparams_to_json(model.hyperparams());
  j["bias"] = std::vector<double>(model.bias().begin(), model.bias().end());
  auto sparse = nlohmann::ordered_json::array();
  const std::size_t C = model.num_classes();
  const auto w = model.weights();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] != 0.0) sparse.push_back({i / C, i % C, w[i]});
  }
  j["weights"] = std::move(sparse);
  return j.dump() + "\n";
}

Model model_from_json(std::string_view json) {
  const auto j = nlohmann::json::parse(json);
  if (j.value("format", std::string()) != "pvikit-model") throw std::invalid_argument("not a pvikit model file");
  if (j.at("version").get<int>() != kModelFormatVersion) {
    throw std::invalid_argument("unsupported model format version");
  }
  Model model(j.at("num_classes").get<std::size_t>(), hyperparams_from_json(j.at("hyperparams")));
  model.trained_on = provenance_from_string(j.at("trained_on").get<std::string>());
  const auto bias = j.at("bias").get<std::vector<double>>();
  if (bias.size() != model.num_classes()) throw std::invalid_argument("bias length mismatch");
  std::copy(bias.begin(), bias.end(), model.bias().begin());
  for (const auto& entry : j.at("weights")) {
    const auto feature = entry.at(0).get<std::size_t>();
    const auto c = entry.at(1).get<std::size_t>();
    if (feature >= model.dimension() || c >= model.num_classes()) {
      throw std::invalid_argument("weight entry out of range");
    }
    model.weight(c, feature) = entry.at(2).get<double>();
  }
  return model;
}

void save_model(const std::filesystem::path& path, const Model& model) {
  io::write_file_atomic(path, model_to_json(model));
}

Model load_model(const std::filesystem::path& path) { return model_from_json(io::read_file(path)); }

}  // namespace pvikit
