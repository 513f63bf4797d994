// Command-line pipeline driver: prepare clip stores from a dataset manifest,
// train and evaluate fusion models, run hyperparameter search, aggregate
// reports. Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaitface/clip_store.hpp"
#include "gaitface/errors.hpp"
#include "gaitface/face_crop.hpp"
#include "gaitface/gait_cycle.hpp"
#include "gaitface/manifest.hpp"
#include "gaitface/model.hpp"
#include "gaitface/report.hpp"
#include "gaitface/search.hpp"
#include "gaitface/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gaitface;

namespace {

// Usage-class failure distinct from runtime errors; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

Config load_config_with_overrides(const std::string& path,
                                  const std::vector<std::string>& overrides) {
  Config cfg = path.empty() ? Config{} : Config::from_file(path);
  for (const auto& assignment : overrides) cfg.set_override(assignment);
  if (const char* seed_env = std::getenv("FUSION_SEED")) {
    if (*seed_env != '\0') cfg.set("train.seed", seed_env);
  }
  return cfg;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw UnwritableOutput("cannot write " + path.string());
  out << content;
}

// ---------------------------------------------------------------------------
// prepare
// ---------------------------------------------------------------------------

struct PrepareArgs {
  std::string manifest;
  std::string keypoints_dir;
  std::string keypoint_cmd;
  std::string out_dir;
  std::string config_path;
  std::vector<std::string> overrides;
  bool dump_signal = false;
};

int run_prepare(const PrepareArgs& args) {
  const Config cfg = load_config_with_overrides(args.config_path, args.overrides);
  const int frames = static_cast<int>(cfg.get_int("model.frames", 24));
  const int height = static_cast<int>(cfg.get_int("model.height", 128));
  const int width = static_cast<int>(cfg.get_int("model.width", 128));
  const int smooth_window = static_cast<int>(cfg.get_int("gait.smooth_window", 5));

  FaceCropOptions crop_options;
  crop_options.scale = cfg.get_double("face.crop_scale", 3.0);
  crop_options.visibility_threshold = cfg.get_double("face.visibility_threshold", 0.5);
  crop_options.target_h = height;
  crop_options.target_w = width;

  DatasetManifest manifest = load_manifest(args.manifest);
  std::error_code ec;
  fs::create_directories(args.out_dir, ec);
  if (ec) throw UnwritableOutput("cannot create " + args.out_dir);

  std::vector<StoreEntry> entries;
  int failures = 0;
  for (const SequenceRecord& record : manifest.all_sequences()) {
    const std::string tag = record.tag();
    try {
      LoadedSequence sequence = load_frames(record);

      AspectSignal signal = aspect_ratio_signal(sequence.silhouette_masks);
      if (args.dump_signal)
        dump_signal_csv((fs::path(args.out_dir) / (tag + "_signal.csv")).string(), signal,
                        smooth_window);
      std::vector<int> minima = detect_local_minima(signal, smooth_window);

      std::vector<GrayscaleFrame> gait_frames;
      gait_frames.reserve(sequence.silhouette_masks.size());
      for (size_t i = 0; i < sequence.silhouette_masks.size(); ++i) {
        GrayscaleFrame frame = preprocess_mask(sequence.silhouette_masks[i], height, width);
        frame.source_index = static_cast<int>(i);
        gait_frames.push_back(std::move(frame));
      }
      GaitCycle cycle = extract_gait_cycle(gait_frames, minima, frames);

      std::unique_ptr<KeypointProvider> provider;
      if (!args.keypoint_cmd.empty()) {
        provider = std::make_unique<ExternalProcessProvider>(args.keypoint_cmd);
      } else {
        const fs::path sidecar = fs::path(args.keypoints_dir) / (tag + ".jsonl");
        provider = std::make_unique<FileKeypointProvider>(sidecar.string());
      }
      ClipTensor face_clip = build_face_clip(sequence, cycle.start_frame, cycle.end_frame,
                                             frames, *provider, crop_options);

      StoreEntry entry;
      entry.tag = tag;
      entry.subject_id = record.subject_id;
      entry.angle_degrees = angle_degrees(record.angle);
      entry.sequence_index = record.sequence_index;
      entry.cycle_start = cycle.start_frame;
      entry.cycle_end = cycle.end_frame;
      write_store_entry(args.out_dir, entry, cycle.clip, face_clip);
      entries.push_back(entry);
    } catch (const Error& e) {
      ++failures;
      std::cerr << "prepare: sequence " << tag << " failed: " << e.what() << "\n";
    }
  }

  write_store_index(args.out_dir, manifest.class_count(), entries);
  std::cout << "prepared " << entries.size() << " of " << manifest.sequence_count()
            << " sequences into " << args.out_dir;
  if (failures > 0) std::cout << " (" << failures << " failed)";
  std::cout << "\n";
  return entries.empty() ? 1 : 0;
}

// ---------------------------------------------------------------------------
// train (the full experiment: fit, evaluate on the test split, report)
// ---------------------------------------------------------------------------

void write_history_json(const TrainedModel& trained, const fs::path& path) {
  json hist = json::array();
  for (const EpochStats& e : trained.history) {
    json row;
    row["epoch"] = e.epoch;
    row["steps"] = e.steps;
    row["mean_loss"] = e.mean_loss;
    row["train_accuracy"] = e.train_accuracy;
    if (e.val_accuracy >= 0.0) row["val_accuracy"] = e.val_accuracy;
    hist.push_back(row);
  }
  write_text_file(path, hist.dump(2) + "\n");
}

struct TrainArgs {
  std::string config_path;
  std::string data_dir;
  std::string out_dir;
  std::vector<std::string> overrides;
};

int run_train(const TrainArgs& args) {
  Config cfg = load_config_with_overrides(args.config_path, args.overrides);
  ClipStore store = ClipStore::open(args.data_dir);
  auto [train_set, test_set] = store.load_split();
  if (train_set.empty()) throw DataPreparationFailure("store has no training sequences");

  TrainConfig tc;
  try {
    tc = TrainConfig::from_config(cfg, store.class_count);
  } catch (const InvalidConfig& e) {
    throw UsageError(e.what());
  }

  // optional validation holdout from the tail of the training set
  const double val_fraction = cfg.get_double("train.validation_fraction", 0.0);
  std::vector<Sample> fit_set = train_set, val_set;
  if (val_fraction > 0.0) {
    const auto held =
        static_cast<size_t>(static_cast<double>(train_set.size()) * val_fraction);
    if (held > 0 && held < train_set.size()) {
      val_set.assign(train_set.end() - static_cast<long>(held), train_set.end());
      fit_set.assign(train_set.begin(), train_set.end() - static_cast<long>(held));
    }
  }

  std::cout << "training strategy=" << to_string(tc.model.strategy) << " on "
            << fit_set.size() << " sequences (K=" << store.class_count << ")\n";
  TrainedModel trained = train(tc, fit_set, val_set);

  fs::create_directories(args.out_dir);
  save_model(trained.model, (fs::path(args.out_dir) / "checkpoint").string());
  if (trained.best_model)
    save_model(*trained.best_model, (fs::path(args.out_dir) / "checkpoint_best").string());
  write_history_json(trained, fs::path(args.out_dir) / "history.json");
  write_text_file(fs::path(args.out_dir) / "config_snapshot.ini", cfg.to_ini());
  json run;
  run["verb"] = "train";
  run["seed"] = tc.seed;
  run["strategy"] = to_string(tc.model.strategy);
  run["total_steps"] = trained.total_steps;
  run["final_train_loss"] =
      trained.history.empty() ? 0.0 : trained.history.back().mean_loss;
  write_text_file(fs::path(args.out_dir) / "run.json", run.dump(2) + "\n");

  if (!test_set.empty()) {
    const std::vector<EvalRecord> records = evaluate_model(trained.model, test_set);
    EvalSummary summary =
        summarize(to_string(tc.model.strategy), records, store.class_count);
    write_summary_json(summary, (fs::path(args.out_dir) / "summary.json").string());
    std::map<std::string, EvalSummary> summaries{{summary.model_name, summary}};
    emit_report(summaries, (fs::path(args.out_dir) / "results").string(), std::cout);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string model_dir;
  std::string data_dir;
  std::string out_dir;
  std::string split = "test";
};

int run_evaluate(const EvaluateArgs& args) {
  FusionModel model = load_model(args.model_dir);
  ClipStore store = ClipStore::open(args.data_dir);
  auto [train_set, test_set] = store.load_split();
  std::vector<Sample> subject_set;
  if (args.split == "test")
    subject_set = std::move(test_set);
  else if (args.split == "train")
    subject_set = std::move(train_set);
  else if (args.split == "all")
    subject_set = store.load_all();
  else
    throw UsageError("--split must be train, test or all");
  if (subject_set.empty()) throw DataPreparationFailure("selected split is empty");

  const std::vector<EvalRecord> records = evaluate_model(model, subject_set);
  EvalSummary summary =
      summarize(to_string(model.config.strategy), records, model.config.classes);
  fs::create_directories(args.out_dir);
  write_summary_json(summary, (fs::path(args.out_dir) / "summary.json").string());
  std::map<std::string, EvalSummary> summaries{{summary.model_name, summary}};
  emit_report(summaries, (fs::path(args.out_dir) / "results").string(), std::cout);
  return 0;
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

struct SearchArgs {
  std::string config_path;
  std::string space_path;
  std::string data_dir;
  std::string out_dir;
  int trials = 10;
  std::vector<std::string> overrides;
};

int run_search(const SearchArgs& args) {
  Config base = load_config_with_overrides(args.config_path, args.overrides);
  SearchSpace space = SearchSpace::from_config(Config::from_file(args.space_path));
  ClipStore store = ClipStore::open(args.data_dir);
  auto [train_set, test_set] = store.load_split();

  // validation split: sequence index 0 fits, index 1 validates
  std::vector<Sample> fit_set, val_set;
  for (Sample& s : train_set)
    (s.sequence_index == 0 ? fit_set : val_set).push_back(std::move(s));
  if (fit_set.empty() || val_set.empty())
    throw DataPreparationFailure("store lacks both sequence indices 0 and 1");

  const auto seed = static_cast<std::uint64_t>(base.get_int("train.seed", 42));
  SearchResult result = hyperparameter_search(base, space, args.trials, seed,
                                              store.class_count, fit_set, val_set);

  fs::create_directories(args.out_dir);
  json trials = json::array();
  for (const TrialResult& t : result.trials) {
    json row;
    row["trial"] = t.trial;
    row["validation_accuracy"] = t.validation_accuracy;
    row["final_train_loss"] = t.final_train_loss;
    json sampled = json::object();
    for (const auto& dim : space.dims)
      sampled[dim.key] = t.config.get_string(dim.key, "");
    row["sampled"] = sampled;
    trials.push_back(row);
  }
  json out;
  out["best_trial"] = result.best_trial;
  out["best_validation_accuracy"] = result.best_accuracy;
  out["trials"] = trials;
  write_text_file(fs::path(args.out_dir) / "trials.json", out.dump(2) + "\n");
  write_text_file(fs::path(args.out_dir) / "best_config.ini", result.best_config.to_ini());
  std::cout << "best trial " << result.best_trial << " with validation accuracy "
            << result.best_accuracy << "%\n";
  return 0;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> runs;
  std::string out_dir = "results";
};

int run_report(const ReportArgs& args) {
  std::map<std::string, EvalSummary> summaries;
  for (const std::string& run : args.runs) {
    const fs::path direct(fs::path(run) / "summary.json");
    EvalSummary summary = read_summary_json(direct.string());
    summaries[summary.model_name] = summary;
  }
  emit_report(summaries, args.out_dir, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal face+gait identification pipeline"};
  app.require_subcommand(1);

  PrepareArgs prepare_args;
  CLI::App* prepare = app.add_subcommand("prepare", "Build the clip store from a manifest");
  prepare->add_option("--manifest", prepare_args.manifest, "dataset manifest JSON")
      ->required();
  prepare->add_option("--keypoints", prepare_args.keypoints_dir,
                      "directory of per-sequence keypoint sidecars (<tag>.jsonl)");
  prepare->add_option("--keypoint-cmd", prepare_args.keypoint_cmd,
                      "external pose-estimation command (overrides --keypoints)");
  prepare->add_option("--out", prepare_args.out_dir, "clip store output directory")
      ->required();
  prepare->add_option("--config", prepare_args.config_path, "pipeline config (INI)");
  prepare->add_option("--set", prepare_args.overrides, "config override section.key=value");
  prepare->add_flag("--dump-signal", prepare_args.dump_signal,
                    "write per-sequence aspect-signal CSVs");

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a strategy and report on the test split");
  train_cmd->add_option("--config", train_args.config_path, "experiment config (INI)")
      ->required();
  train_cmd->add_option("--data", train_args.data_dir, "prepared clip store")->required();
  train_cmd->add_option("--out", train_args.out_dir, "run output directory")->required();
  train_cmd->add_option("--set", train_args.overrides, "config override section.key=value");

  EvaluateArgs eval_args;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate a saved checkpoint");
  evaluate->add_option("--model", eval_args.model_dir, "checkpoint directory")->required();
  evaluate->add_option("--data", eval_args.data_dir, "prepared clip store")->required();
  evaluate->add_option("--out", eval_args.out_dir, "output directory")->required();
  evaluate->add_option("--split", eval_args.split, "train | test | all (default test)");

  SearchArgs search_args;
  CLI::App* search = app.add_subcommand("search", "Random hyperparameter search");
  search->add_option("--config", search_args.config_path, "base config (INI)")->required();
  search->add_option("--space", search_args.space_path, "search space (INI, [space] section)")
      ->required();
  search->add_option("--trials", search_args.trials, "number of trials")->required();
  search->add_option("--data", search_args.data_dir, "prepared clip store")->required();
  search->add_option("--out", search_args.out_dir, "output directory")->required();
  search->add_option("--set", search_args.overrides, "config override section.key=value");

  ReportArgs report_args;
  CLI::App* report = app.add_subcommand("report", "Aggregate run summaries into tables");
  report->add_option("--runs", report_args.runs, "run directories containing summary.json")
      ->required();
  report->add_option("--out", report_args.out_dir, "report output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (prepare->parsed()) return run_prepare(prepare_args);
    if (train_cmd->parsed()) return run_train(train_args);
    if (evaluate->parsed()) return run_evaluate(eval_args);
    if (search->parsed()) return run_search(search_args);
    if (report->parsed()) return run_report(report_args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidConfig& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
