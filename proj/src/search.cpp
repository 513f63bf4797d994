#include "gaitface/search.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "gaitface/errors.hpp"
#include "gaitface/metrics.hpp"

namespace gaitface {

namespace {

SearchSpace::Dimension parse_dimension(const std::string& key, const std::string& spec) {
  SearchSpace::Dimension dim;
  dim.key = key;
  const size_t colon = spec.find(':');
  if (colon == std::string::npos)
    throw SchemaViolation("space entry " + key + " must be kind:args, got '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  const std::string args = spec.substr(colon + 1);
  auto parse_range = [&](double& lo, double& hi) {
    const size_t sep = args.find(':');
    if (sep == std::string::npos)
      throw SchemaViolation("space entry " + key + " needs lo:hi");
    lo = std::stod(args.substr(0, sep));
    hi = std::stod(args.substr(sep + 1));
    if (!(lo <= hi)) throw SchemaViolation("space entry " + key + " has lo > hi");
  };
  if (kind == "lin") {
    dim.kind = SearchSpace::Dimension::Kind::linear;
    parse_range(dim.lo, dim.hi);
  } else if (kind == "log") {
    dim.kind = SearchSpace::Dimension::Kind::log;
    parse_range(dim.lo, dim.hi);
    if (dim.lo <= 0.0) throw SchemaViolation("space entry " + key + ": log range needs lo > 0");
  } else if (kind == "int") {
    dim.kind = SearchSpace::Dimension::Kind::integer;
    parse_range(dim.lo, dim.hi);
  } else if (kind == "cat") {
    dim.kind = SearchSpace::Dimension::Kind::categorical;
    std::stringstream ss(args);
    std::string tok;
    while (std::getline(ss, tok, ',')) dim.choices.push_back(tok);
    if (dim.choices.empty())
      throw SchemaViolation("space entry " + key + " has no categories");
  } else {
    throw SchemaViolation("space entry " + key + " has unknown kind '" + kind + "'");
  }
  return dim;
}

}  // namespace

SearchSpace SearchSpace::from_config(const Config& cfg) {
  SearchSpace space;
  for (const auto& [key, value] : cfg.entries()) {
    if (key.rfind("space.", 0) != 0) continue;
    space.dims.push_back(parse_dimension(key.substr(6), value));
  }
  return space;
}

Config random_sampler(const Config& base, const SearchSpace& space,
                      std::uint64_t trial_seed) {
  std::mt19937_64 rng(trial_seed);
  Config cfg = base;
  for (const auto& dim : space.dims) {
    switch (dim.kind) {
      case SearchSpace::Dimension::Kind::linear: {
        std::uniform_real_distribution<double> dist(dim.lo, dim.hi);
        cfg.set(dim.key, std::to_string(dist(rng)));
        break;
      }
      case SearchSpace::Dimension::Kind::log: {
        std::uniform_real_distribution<double> dist(std::log(dim.lo), std::log(dim.hi));
        std::ostringstream os;
        os << std::exp(dist(rng));
        cfg.set(dim.key, os.str());
        break;
      }
      case SearchSpace::Dimension::Kind::integer: {
        std::uniform_int_distribution<long> dist(static_cast<long>(dim.lo),
                                                 static_cast<long>(dim.hi));
        cfg.set(dim.key, std::to_string(dist(rng)));
        break;
      }
      case SearchSpace::Dimension::Kind::categorical: {
        std::uniform_int_distribution<size_t> dist(0, dim.choices.size() - 1);
        cfg.set(dim.key, dim.choices[dist(rng)]);
        break;
      }
    }
  }
  return cfg;
}

SearchResult hyperparameter_search(const Config& base, const SearchSpace& space, int trials,
                                   std::uint64_t seed, int classes,
                                   const std::vector<Sample>& train_set,
                                   const std::vector<Sample>& val_set,
                                   const Sampler& sampler) {
  if (space.dims.empty()) throw EmptySpace("search space has no dimensions");
  if (trials < 1) throw EmptySpace("search needs at least one trial");
  if (train_set.empty() || val_set.empty())
    throw InvalidConfig("search needs non-empty train and validation sets");

  SearchResult result;
  result.best_trial = -1;
  for (int trial = 0; trial < trials; ++trial) {
    Config candidate =
        sampler(base, space, derive_seed(seed, "trial-" + std::to_string(trial)));
    TrainConfig tc = TrainConfig::from_config(candidate, classes);
    TrainedModel trained = train(tc, train_set);
    const std::vector<EvalRecord> records = evaluate_model(trained.model, val_set);

    TrialResult tr;
    tr.trial = trial;
    tr.config = candidate;
    tr.validation_accuracy = accuracy(records);
    tr.final_train_loss = trained.history.empty() ? 0.0 : trained.history.back().mean_loss;
    if (result.best_trial < 0 || tr.validation_accuracy > result.best_accuracy) {
      result.best_trial = trial;
      result.best_accuracy = tr.validation_accuracy;
      result.best_config = candidate;
    }
    result.trials.push_back(std::move(tr));
  }
  return result;
}

}  // namespace gaitface
