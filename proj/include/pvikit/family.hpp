#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pvikit/corpus.hpp"
#include "pvikit/features.hpp"

namespace pvikit {

enum class LrSchedule { constant, linear };

std::string_view to_string(LrSchedule s);
LrSchedule lr_schedule_from_string(std::string_view s);

struct Hyperparams {
  unsigned hash_bits = 16;
  std::vector<unsigned> ngram_orders{1, 2, 3};
  double learning_rate = 0.03;
  // linear: the step size decays from learning_rate towards 0 over all steps.
  LrSchedule schedule = LrSchedule::linear;
  std::size_t epochs = 2;
  std::size_t batch_size = 32;
  double l2 = 1e-6;
  std::uint64_t seed = 1;
  double prob_floor = 1e-12;
  // Draw batches in dataset order instead of reshuffling every epoch.
  bool preserve_order = false;

  // Throws std::invalid_argument on out-of-range values.
  void validate() const;

  bool operator==(const Hyperparams&) const = default;
};

// Multinomial softmax classifier over hashed n-gram features. Weights are
// stored feature-major: weight(c, j) lives at weights[j * num_classes + c].
class Model {
 public:
  Model() = default;
  Model(std::size_t num_classes, Hyperparams hp);

  std::size_t num_classes() const { return num_classes_; }
  std::size_t dimension() const { return std::size_t{1} << hp_.hash_bits; }
  const Hyperparams& hyperparams() const { return hp_; }

  double weight(std::size_t c, std::size_t feature) const { return weights_[feature * num_classes_ + c]; }
  double& weight(std::size_t c, std::size_t feature) { return weights_[feature * num_classes_ + c]; }
  std::span<const double> weights() const { return weights_; }
  std::span<double> weights() { return weights_; }
  std::span<const double> bias() const { return bias_; }
  std::span<double> bias() { return bias_; }

  Provenance trained_on = Provenance::original;

  // Unnormalized class scores for a featurized input.
  std::vector<double> logits(const FeatureVector& x) const;

  bool operator==(const Model&) const = default;

 private:
  std::size_t num_classes_ = 0;
  Hyperparams hp_;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

struct TrainResult {
  Model model;
  std::vector<double> epoch_loss;  // mean cross-entropy (nats) per epoch
};

struct TrainOptions {
  // Start from these parameters instead of zeros.
  const Model* warm_start = nullptr;
  // Sees the dataset positions of every batch, in consumption order.
  std::function<void(std::size_t epoch, std::span<const std::size_t> batch)> on_batch;
};

// Mini-batch gradient descent on mean cross-entropy plus (l2/2)||W||^2.
TrainResult train(const Dataset& dataset, const Hyperparams& hp, const TrainOptions& options = {});

// Softmax over logits(featurize(premise, hypothesis)).
std::vector<double> predict_dist(const Model& model, std::string_view premise, std::string_view hypothesis);

// log2 of the label's probability, floored at log2(prob_floor).
double log2_prob(const Model& model, std::string_view premise, std::string_view hypothesis, Label label);

// A model whose output is `dist` for every input, including the null input.
Model constant_predictor(std::span<const double> dist, const Hyperparams& hp = {});

struct ClassCounts {
  std::size_t support = 0;
  std::size_t predicted = 0;
  std::size_t correct = 0;
};

struct EvalReport {
  std::size_t n = 0;
  double accuracy = 0.0;
  double precision_micro = 0.0;
  double recall_micro = 0.0;
  double f1_micro = 0.0;
  std::vector<ClassCounts> per_class;
};

// Argmax prediction with lowest-index tie-break.
Label predict_label(const Model& model, std::string_view premise, std::string_view hypothesis);

EvalReport evaluate(const Model& model, const Dataset& dataset);

// Full-batch objective and its gradient, used to verify the optimizer.
struct Example {
  FeatureVector x;
  Label y = 0;
};

std::vector<Example> featurize_dataset(const Dataset& dataset, const Hyperparams& hp);

double objective(const Model& model, std::span<const Example> data, double l2);

struct Gradient {
  std::vector<double> weights;  // same layout as Model::weights()
  std::vector<double> bias;
};

Gradient gradient(const Model& model, std::span<const Example> data, double l2);

// Versioned JSON form: hyperparameters, bias and the nonzero weights.
std::string model_to_json(const Model& model);
Model model_from_json(std::string_view json);
void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

}  // namespace pvikit
