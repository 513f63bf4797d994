#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gaitface/config.hpp"
#include "gaitface/sample.hpp"
#include "gaitface/trainer.hpp"

namespace gaitface {

// Named hyperparameter ranges. INI form, one dimension per key:
//   [space]
//   train.learning_rate = log:1e-4:1e-1
//   model.attention_dim = int:32:256
//   train.batch_size    = cat:4,8,16
// Kinds: lin:<lo>:<hi> uniform real, log:<lo>:<hi> log-uniform real,
// int:<lo>:<hi> uniform integer (inclusive), cat:<v1>,<v2>,... categorical.
struct SearchSpace {
  struct Dimension {
    enum class Kind { linear, log, integer, categorical };
    std::string key;  // dotted config key
    Kind kind = Kind::linear;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::string> choices;
  };

  std::vector<Dimension> dims;

  static SearchSpace from_config(const Config& cfg);  // reads the [space] section
};

struct TrialResult {
  int trial = 0;
  Config config;
  double validation_accuracy = 0.0;
  double final_train_loss = 0.0;
};

struct SearchResult {
  Config best_config;
  int best_trial = 0;
  double best_accuracy = 0.0;
  std::vector<TrialResult> trials;
};

// Draws one configuration from the space; pluggable so smarter samplers can
// replace the seeded random default.
using Sampler =
    std::function<Config(const Config& base, const SearchSpace&, std::uint64_t trial_seed)>;

Config random_sampler(const Config& base, const SearchSpace& space, std::uint64_t trial_seed);

// Seeded random search: samples `trials` configs, trains each on train_set,
// scores validation accuracy on val_set, returns the best config with the
// full trial log. Ties keep the earliest trial.
SearchResult hyperparameter_search(const Config& base, const SearchSpace& space, int trials,
                                   std::uint64_t seed, int classes,
                                   const std::vector<Sample>& train_set,
                                   const std::vector<Sample>& val_set,
                                   const Sampler& sampler = random_sampler);

}  // namespace gaitface
