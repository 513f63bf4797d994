#pragma once

#include <optional>
#include <vector>

#include "gaitface/config.hpp"
#include "gaitface/metrics.hpp"
#include "gaitface/model.hpp"

namespace gaitface {

struct TrainConfig {
  ModelConfig model;
  double learning_rate = 1e-3;
  int epochs = 1000;     // >= 1; training stops at epochs or max_steps, whichever first
  int max_steps = 1000;  // 0 = no step cap
  int batch_size = 8;
  std::uint64_t seed = 42;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
  static TrainConfig from_config(const Config& cfg, int classes);
};

struct EpochStats {
  int epoch = 0;
  int steps = 0;        // cumulative optimizer steps at epoch end
  double mean_loss = 0.0;
  double train_accuracy = 0.0;  // over the epoch's batches
  double val_accuracy = -1.0;   // -1 when no validation set was given
};

struct TrainedModel {
  FusionModel model;  // final state
  TrainConfig config;
  std::vector<EpochStats> history;
  int total_steps = 0;
  // Populated only when a validation set is supplied.
  std::optional<FusionModel> best_model;
  int best_epoch = -1;
  double best_val_accuracy = -1.0;
};

// Mini-batch training over the composite graph: extractors -> attention ->
// fusion -> classifier. Deterministic for a fixed seed and thread count.
// A non-empty val_set enables per-epoch validation accuracy tracking and the
// best-epoch model snapshot.
TrainedModel train(const TrainConfig& config, const std::vector<Sample>& train_set,
                   const std::vector<Sample>& val_set = {});

// No-grad evaluation of every sample into EvalRecords.
std::vector<EvalRecord> evaluate_model(const FusionModel& model,
                                       const std::vector<Sample>& samples);

}  // namespace gaitface
