#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "gala/kernels.hpp"
#include "gala/types.hpp"

namespace gala {

struct AnswerKey;

struct TrainConfig {
  int epochs = 20;
  std::vector<int> active_epochs{10, 12, 14, 16, 18};
  double learning_rate = 0.002;
  double momentum = 0.95;
  int batch_size = 64;
  int hidden_dim = 0;
  double target_loss_weight = 1.0;
  std::uint64_t rng_seed = 0;

  // `rounds` < 0 skips the schedule-length check.
  void validate(int rounds = -1) const;

  // `rounds` epochs evenly spaced over the second half of training, e.g.
  // 20 epochs / 5 rounds -> {10, 12, 14, 16, 18}.
  static std::vector<int> even_schedule(int epochs, int rounds);
};

// Momentum buffers, same layout as the model parameters.
struct OptimizerState {
  ModelState velocity;
  bool initialized = false;
};

struct TrainResult {
  ModelState model;
  std::vector<double> epoch_loss;  // mean minibatch objective per epoch
};

ModelState init_model(std::size_t input_dim, std::size_t hidden_dim, std::size_t n_classes,
                      std::uint64_t seed);

// Mini-batch SGD with momentum over epochs [from_epoch, to_epoch). Each step
// averages the cross-entropy over a chunk of labeled source rows and adds
// target_loss_weight times the mean over a proportional chunk of the selected
// target rows (labels read from ds.labels). Shuffles are seeded per epoch so
// splitting a run at any epoch reproduces the uninterrupted run when the same
// OptimizerState is threaded through.
TrainResult train_epochs(ModelState model, const Dataset& ds, const LabeledPool& pool, const TrainConfig& cfg,
                         int from_epoch, int to_epoch, OptimizerState* state = nullptr);

// Full objective: mean CE over labeled sources + weight x mean CE over
// selected targets.
double training_loss(const ModelState& model, const Dataset& ds, const LabeledPool& pool, double target_weight);

// Analytic gradient of training_loss, shaped like the model.
ModelState training_gradient(const ModelState& model, const Dataset& ds, const LabeledPool& pool,
                             double target_weight);

// Fraction of correct argmax predictions over rows of `domain` whose truth is
// known (dataset label, or the answer key for target rows).
double evaluate(const ModelState& model, const Dataset& ds, int domain, const AnswerKey* key = nullptr,
                Exec exec = Exec::parallel);

// Accuracy over an explicit row set with explicit labels.
double accuracy_on(const ModelState& model, const Matrix& inputs, std::span<const std::size_t> rows,
                   std::span<const int> labels, Exec exec = Exec::parallel);

nlohmann::json model_to_json(const ModelState& model);
ModelState model_from_json(const nlohmann::json& j);
void save_model(const ModelState& model, const std::filesystem::path& path);
ModelState load_model(const std::filesystem::path& path);

}  // namespace gala
