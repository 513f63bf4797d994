#include "gaitface/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gaitface/classifier.hpp"
#include "gaitface/errors.hpp"

namespace gaitface {

void TrainConfig::validate() const {
  model.validate();
  if (learning_rate <= 0.0) throw InvalidConfig("learning_rate must be positive");
  if (epochs < 1) throw InvalidConfig("epochs must be >= 1");
  if (max_steps < 0) throw InvalidConfig("max_steps must be >= 0");
  if (batch_size < 1) throw InvalidConfig("batch_size must be >= 1");
}

TrainConfig TrainConfig::from_config(const Config& cfg, int classes) {
  TrainConfig tc;
  tc.model = ModelConfig::from_config(cfg, classes);
  tc.learning_rate = cfg.get_double("train.learning_rate", 1e-3);
  tc.epochs = static_cast<int>(cfg.get_int("train.epochs", 1000));
  tc.max_steps = static_cast<int>(cfg.get_int("train.max_steps", 1000));
  tc.batch_size = static_cast<int>(cfg.get_int("train.batch_size", 8));
  tc.seed = static_cast<std::uint64_t>(cfg.get_int("train.seed", 42));
  tc.model.seed = tc.seed;
  tc.model.extractor.seed = tc.seed;
  tc.adam_beta1 = cfg.get_double("train.adam_beta1", 0.9);
  tc.adam_beta2 = cfg.get_double("train.adam_beta2", 0.999);
  tc.adam_eps = cfg.get_double("train.adam_eps", 1e-8);
  tc.validate();
  return tc;
}

namespace {

void adam_step(Param& p, const ad::Mat& grad, int t, const TrainConfig& cfg) {
  p.m = cfg.adam_beta1 * p.m + (1.0 - cfg.adam_beta1) * grad;
  p.v = cfg.adam_beta2 * p.v.array().matrix() +
        (1.0 - cfg.adam_beta2) * grad.cwiseProduct(grad);
  const double mc = 1.0 - std::pow(cfg.adam_beta1, t);
  const double vc = 1.0 - std::pow(cfg.adam_beta2, t);
  p.value.array() -= cfg.learning_rate * (p.m.array() / mc) /
                     ((p.v.array() / vc).sqrt() + cfg.adam_eps);
  // learnable score scale stays inside its (0, 1] contract
  if (p.name.size() > 7 && p.name.substr(p.name.size() - 7) == ".lambda")
    p.value(0, 0) = std::clamp(p.value(0, 0), 1e-6, 1.0);
}

}  // namespace

TrainedModel train(const TrainConfig& config, const std::vector<Sample>& train_set,
                   const std::vector<Sample>& val_set) {
  config.validate();
  if (train_set.empty()) throw InvalidConfig("training set is empty");

  TrainedModel result;
  result.config = config;
  result.model = FusionModel::init(config.model);
  FusionModel& model = result.model;

  std::vector<size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffle_rng(derive_seed(config.seed, "batch-shuffle"));

  const std::vector<Param*> params = model.active_params();
  int step = 0;
  bool stop = false;

  for (int epoch = 0; epoch < config.epochs && !stop; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    int epoch_batches = 0;
    long correct = 0, seen = 0;

    for (size_t start = 0; start < order.size() && !stop;
         start += static_cast<size_t>(config.batch_size)) {
      const size_t end =
          std::min(order.size(), start + static_cast<size_t>(config.batch_size));
      ad::Tape tape;
      ParamBinding bind(tape);

      ad::Var total;
      for (size_t i = start; i < end; ++i) {
        const Sample& sample = train_set[order[i]];
        ModelForward fwd = model_forward(tape, bind, model, sample);
        ad::Var loss = ad::cross_entropy(fwd.probs, sample.label);
        total = total.valid() ? ad::add(total, loss) : loss;
        ++seen;
        correct += predict_id(fwd.probs.value().col(0)) == sample.label ? 1 : 0;
      }
      ad::Var mean_loss = ad::scale(total, 1.0 / static_cast<double>(end - start));
      const double loss_value = mean_loss.scalar();
      if (!std::isfinite(loss_value))
        throw DivergenceDetected("non-finite loss at step " + std::to_string(step + 1));

      tape.backward(mean_loss);
      ++step;
      for (Param* p : params) {
        const ad::Mat* grad = bind.gradient(*p);
        if (grad != nullptr) adam_step(*p, *grad, step, config);
      }

      epoch_loss += loss_value;
      ++epoch_batches;
      if (config.max_steps > 0 && step >= config.max_steps) stop = true;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.steps = step;
    stats.mean_loss = epoch_batches > 0 ? epoch_loss / epoch_batches : 0.0;
    stats.train_accuracy =
        seen > 0 ? 100.0 * static_cast<double>(correct) / static_cast<double>(seen) : 0.0;
    if (!val_set.empty()) {
      long val_correct = 0;
      for (const Sample& sample : val_set)
        val_correct +=
            predict_id(predict_probabilities(model, sample)) == sample.label ? 1 : 0;
      stats.val_accuracy =
          100.0 * static_cast<double>(val_correct) / static_cast<double>(val_set.size());
      if (stats.val_accuracy > result.best_val_accuracy) {
        result.best_val_accuracy = stats.val_accuracy;
        result.best_epoch = epoch;
        result.best_model = model;
      }
    }
    result.history.push_back(stats);
  }

  result.total_steps = step;
  return result;
}

std::vector<EvalRecord> evaluate_model(const FusionModel& model,
                                       const std::vector<Sample>& samples) {
  std::vector<EvalRecord> records;
  records.reserve(samples.size());
  for (const Sample& sample : samples) {
    EvalRecord rec;
    rec.subject_id = sample.label;
    rec.probabilities = predict_probabilities(model, sample);
    rec.predicted_id = predict_id(rec.probabilities);
    rec.angle = sample.angle;
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace gaitface
