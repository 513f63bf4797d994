#include <doctest.h>

#include "gaitface/errors.hpp"
#include "gaitface/search.hpp"
#include "gaitface/synthetic.hpp"
#include "gaitface/trainer.hpp"

using namespace gaitface;

namespace {

// small but separable: 5 classes, 16x16, L=6
SyntheticSpec quick_spec(std::uint64_t seed = 7) {
  SyntheticSpec spec;
  spec.classes = 5;
  spec.sequences_per_class = 8;
  spec.frames = 6;
  spec.height = 16;
  spec.width = 16;
  spec.seed = seed;
  return spec;
}

TrainConfig quick_config(FusionStrategy strategy, std::uint64_t seed = 42) {
  TrainConfig tc;
  tc.model.strategy = strategy;
  tc.model.extractor.layers = {{3, 3, 1}, {4, 3, 1}};
  tc.model.extractor.out_dim = 16;
  tc.model.extractor.input_h = 16;
  tc.model.extractor.input_w = 16;
  tc.model.frames = 6;
  tc.model.attention_dim = 12;
  tc.model.classes = 5;
  tc.model.seed = seed;
  tc.model.extractor.seed = seed;
  tc.learning_rate = 3e-3;
  tc.epochs = 40;
  tc.max_steps = 120;
  tc.batch_size = 8;
  tc.seed = seed;
  return tc;
}

}  // namespace

TEST_CASE("training on a separable synthetic set reaches 99% train accuracy") {
  auto [train_set, test_set] = make_synthetic_clips(quick_spec());
  TrainedModel trained = train(quick_config(FusionStrategy::adaptive), train_set);
  REQUIRE(!trained.history.empty());

  const std::vector<EvalRecord> records = evaluate_model(trained.model, train_set);
  CHECK(accuracy(records) >= 99.0);
}

TEST_CASE("training is deterministic for a fixed seed") {
  auto [train_set, test_set] = make_synthetic_clips(quick_spec());
  TrainConfig cfg = quick_config(FusionStrategy::adaptive);
  cfg.max_steps = 20;
  cfg.epochs = 5;
  TrainedModel a = train(cfg, train_set);
  TrainedModel b = train(cfg, train_set);
  REQUIRE(a.history.size() == b.history.size());
  CHECK(a.history.back().mean_loss == b.history.back().mean_loss);  // bitwise
  CHECK(a.total_steps == b.total_steps);

  cfg.seed = 43;
  cfg.model.seed = 43;
  cfg.model.extractor.seed = 43;
  TrainedModel c = train(cfg, train_set);
  CHECK(c.history.back().mean_loss != a.history.back().mean_loss);
}

TEST_CASE("training loss trends down on the separable set") {
  auto [train_set, test_set] = make_synthetic_clips(quick_spec());
  TrainConfig cfg = quick_config(FusionStrategy::adaptive);
  cfg.max_steps = 100;
  TrainedModel trained = train(cfg, train_set);
  REQUIRE(trained.history.size() >= 5);
  // non-increasing up to a 5-epoch tolerance window: every epoch's loss must
  // undercut the minimum seen 5 epochs earlier
  const auto& h = trained.history;
  for (size_t i = 5; i < h.size(); ++i) {
    double best_before = 1e300;
    for (size_t j = 0; j + 5 <= i; ++j) best_before = std::min(best_before, h[j].mean_loss);
    CHECK(h[i].mean_loss <= best_before + 1e-9);
  }
  CHECK(h.back().mean_loss < h.front().mean_loss);
}

TEST_CASE("invalid train configs are rejected") {
  TrainConfig cfg = quick_config(FusionStrategy::adaptive);
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg = quick_config(FusionStrategy::adaptive);
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg = quick_config(FusionStrategy::adaptive);
  CHECK_THROWS_AS(train(cfg, {}), InvalidConfig);
}

TEST_CASE("unimodal strategies train through the single-modality path") {
  auto [train_set, test_set] = make_synthetic_clips(quick_spec());
  for (FusionStrategy s : {FusionStrategy::face_only, FusionStrategy::gait_only}) {
    TrainConfig cfg = quick_config(s);
    cfg.max_steps = 60;
    TrainedModel trained = train(cfg, train_set);
    const std::vector<EvalRecord> records = evaluate_model(trained.model, train_set);
    CHECK(accuracy(records) > 60.0);  // single clean modality should separate
  }
}

TEST_CASE("random search picks the config that can actually learn") {
  auto [train_set, test_set] = make_synthetic_clips(quick_spec(9));
  Config base = Config::from_string(R"(
[model]
height = 16
width = 16
feature_dim = 16
attention_dim = 12
conv_filters = 3,4
frames = 6

[fusion]
strategy = adaptive

[train]
batch_size = 8
max_steps = 40
epochs = 40
seed = 11
)");

  SUBCASE("single-point space returns that point, trials logged") {
    Config spaced = base;
    spaced.set("space.train.learning_rate", "cat:0.003");
    SearchSpace space = SearchSpace::from_config(spaced);
    SearchResult result =
        hyperparameter_search(base, space, 3, 5, 5, train_set, test_set);
    CHECK(result.trials.size() == 3);
    for (const auto& t : result.trials)
      CHECK(t.config.get_double("train.learning_rate", 0) == doctest::Approx(0.003));
    CHECK(result.best_config.get_double("train.learning_rate", 0) ==
          doctest::Approx(0.003));
  }

  SUBCASE("two-point space: vanishing learning rate loses") {
    Config spaced = base;
    spaced.set("space.train.learning_rate", "cat:1e-12,0.003");
    SearchSpace space = SearchSpace::from_config(spaced);
    // enough trials to sample both categories
    SearchResult result =
        hyperparameter_search(base, space, 6, 17, 5, train_set, test_set);
    bool saw_both = false;
    for (const auto& t : result.trials)
      if (t.config.get_string("train.learning_rate", "") == "1e-12") saw_both = true;
    REQUIRE(saw_both);
    CHECK(result.best_config.get_double("train.learning_rate", 0) ==
          doctest::Approx(0.003));
  }

  SUBCASE("degenerate searches are rejected") {
    SearchSpace empty;
    CHECK_THROWS_AS(hyperparameter_search(base, empty, 3, 1, 5, train_set, test_set),
                    EmptySpace);
    Config spaced = base;
    spaced.set("space.train.learning_rate", "cat:0.003");
    SearchSpace space = SearchSpace::from_config(spaced);
    CHECK_THROWS_AS(hyperparameter_search(base, space, 0, 1, 5, train_set, test_set),
                    EmptySpace);
  }
}

TEST_CASE("trial sampling respects range kinds") {
  Config base = Config::from_string("[train]\nseed = 1\n");
  Config spaced = base;
  spaced.set("space.a.lin", "lin:2.0:3.0");
  spaced.set("space.a.log", "log:1e-4:1e-1");
  spaced.set("space.a.int", "int:4:8");
  spaced.set("space.a.cat", "cat:x,y");
  SearchSpace space = SearchSpace::from_config(spaced);
  REQUIRE(space.dims.size() == 4);
  for (std::uint64_t s = 0; s < 50; ++s) {
    Config sample = random_sampler(base, space, s);
    const double lin = sample.get_double("a.lin", -1);
    CHECK(lin >= 2.0);
    CHECK(lin <= 3.0);
    const double lg = sample.get_double("a.log", -1);
    CHECK(lg >= 1e-4);
    CHECK(lg <= 1e-1);
    const long iv = sample.get_int("a.int", -1);
    CHECK(iv >= 4);
    CHECK(iv <= 8);
    const std::string cat = sample.get_string("a.cat", "");
    CHECK((cat == "x" || cat == "y"));
  }
}
