#include "gaitface/model.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "gaitface/errors.hpp"
#include "gaitface/npy.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gaitface {

void ModelConfig::validate() const {
  extractor.validate();
  if (frames < 1) throw InvalidConfig("frame count must be >= 1");
  if (attention_dim <= 0) throw InvalidConfig("attention_dim must be positive");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw InvalidConfig("lambda must lie in (0, 1]");
  if (classes <= 0) throw InvalidConfig("class count must be positive");
}

ModelConfig ModelConfig::from_config(const Config& cfg, int classes) {
  ModelConfig mc;
  mc.strategy = fusion_strategy_from_string(cfg.get_string("fusion.strategy", "adaptive"));
  mc.frames = static_cast<int>(cfg.get_int("model.frames", 24));
  mc.extractor.input_h = static_cast<int>(cfg.get_int("model.height", 128));
  mc.extractor.input_w = static_cast<int>(cfg.get_int("model.width", 128));
  mc.extractor.out_dim = static_cast<int>(cfg.get_int("model.feature_dim", 588));
  mc.extractor.pool_window = static_cast<int>(cfg.get_int("model.pool_window", 2));
  const std::vector<int> filters = cfg.get_int_list("model.conv_filters", {16, 32});
  const int kernel = static_cast<int>(cfg.get_int("model.kernel", 3));
  const int stride = static_cast<int>(cfg.get_int("model.stride", 1));
  mc.extractor.layers.clear();
  for (int f : filters) mc.extractor.layers.push_back({f, kernel, stride});
  mc.attention_dim = static_cast<int>(cfg.get_int("model.attention_dim", 256));
  mc.lambda = cfg.get_double("attention.lambda", 0.5);
  mc.attention_mode =
      attention_mode_from_string(cfg.get_string("attention.mode", "gated"));
  mc.lambda_learnable = cfg.get_bool("attention.lambda_learnable", false);
  mc.classes = classes;
  mc.seed = static_cast<std::uint64_t>(cfg.get_int("train.seed", 42));
  mc.extractor.seed = mc.seed;
  mc.validate();
  return mc;
}

int ModelConfig::fused_dim(const ExtractorGeometry& geom) const {
  switch (strategy) {
    case FusionStrategy::face_only:
    case FusionStrategy::gait_only:
    case FusionStrategy::average:
    case FusionStrategy::adaptive:
      return attention_dim;
    case FusionStrategy::attention_concat:
      return 2 * attention_dim;
    case FusionStrategy::bilinear:
      return geom.final_channels * geom.final_channels;
  }
  throw InvalidConfig("unhandled fusion strategy");
}

bool FusionModel::uses_gait() const {
  return config.strategy != FusionStrategy::face_only;
}

bool FusionModel::uses_face() const {
  return config.strategy != FusionStrategy::gait_only;
}

bool FusionModel::uses_attention() const {
  return config.strategy != FusionStrategy::bilinear;
}

FusionModel FusionModel::init(const ModelConfig& config) {
  config.validate();
  FusionModel model;
  model.config = config;
  model.geometry = extractor_geometry(config.extractor);

  ExtractorConfig gait_cfg = config.extractor;
  gait_cfg.seed = derive_seed(config.seed, "extractor.gait");
  ExtractorConfig face_cfg = config.extractor;
  face_cfg.seed = derive_seed(config.seed, "extractor.face");
  model.gait_extractor = init_extractor(gait_cfg, "gait");
  model.face_extractor = init_extractor(face_cfg, "face");

  AttentionConfig att;
  att.in_dim = config.extractor.out_dim;
  att.att_dim = config.attention_dim;
  att.lambda = config.lambda;
  att.mode = config.attention_mode;
  att.lambda_learnable = config.lambda_learnable;
  att.seed = derive_seed(config.seed, "attention.gait");
  model.gait_attention = init_attention(att, "gait");
  att.seed = derive_seed(config.seed, "attention.face");
  model.face_attention = init_attention(att, "face");

  model.classifier = init_classifier(config.classes, config.fused_dim(model.geometry),
                                     derive_seed(config.seed, "classifier"));
  return model;
}

std::vector<Param*> FusionModel::all_params() {
  std::vector<Param*> out;
  for (Param* p : gait_extractor.all_params()) out.push_back(p);
  for (Param* p : face_extractor.all_params()) out.push_back(p);
  for (Param* p : gait_attention.all_params()) out.push_back(p);
  for (Param* p : face_attention.all_params()) out.push_back(p);
  for (Param* p : classifier.all_params()) out.push_back(p);
  return out;
}

std::vector<Param*> FusionModel::active_params() {
  std::vector<Param*> out;
  if (uses_gait())
    for (Param* p : gait_extractor.all_params()) out.push_back(p);
  if (uses_face())
    for (Param* p : face_extractor.all_params()) out.push_back(p);
  if (uses_attention()) {
    if (uses_gait())
      for (Param* p : gait_attention.all_params()) out.push_back(p);
    if (uses_face())
      for (Param* p : face_attention.all_params()) out.push_back(p);
  }
  for (Param* p : classifier.all_params()) out.push_back(p);
  return out;
}

ModelForward model_forward(ad::Tape& tape, ParamBinding& bind, const FusionModel& model,
                           const Sample& sample) {
  const FusionStrategy strategy = model.config.strategy;
  ModelForward fwd;

  ExtractorVars gait_vars, face_vars;
  if (model.uses_gait())
    gait_vars = extractor_forward(tape, bind, model.gait_extractor, sample.gait);
  if (model.uses_face())
    face_vars = extractor_forward(tape, bind, model.face_extractor, sample.face);

  AttentionVars gait_att, face_att;
  if (model.uses_attention()) {
    if (model.uses_gait()) {
      gait_att = keyless_attention_forward(tape, bind, model.gait_attention,
                                           gait_vars.features);
      fwd.gait_emb = gait_att.embedding;
    }
    if (model.uses_face()) {
      face_att = keyless_attention_forward(tape, bind, model.face_attention,
                                           face_vars.features);
      fwd.face_emb = face_att.embedding;
    }
  }

  switch (strategy) {
    case FusionStrategy::face_only:
      fwd.fused = face_att.embedding;
      break;
    case FusionStrategy::gait_only:
      fwd.fused = gait_att.embedding;
      break;
    case FusionStrategy::average:
      fwd.fused = ad::scale(ad::add(face_att.embedding, gait_att.embedding), 0.5);
      break;
    case FusionStrategy::adaptive: {
      ad::Var nf = ad::norm2(face_att.embedding);
      ad::Var ng = ad::norm2(gait_att.embedding);
      if (nf.scalar() == 0.0 && ng.scalar() == 0.0)
        throw BothZero("both modality embeddings vanished");
      ad::Var total = ad::add(nf, ng);
      ad::Var alpha = ad::cdiv(nf, total);
      ad::Var beta = ad::cdiv(ng, total);
      fwd.fused = ad::add(ad::smul(face_att.embedding, alpha),
                          ad::smul(gait_att.embedding, beta));
      break;
    }
    case FusionStrategy::attention_concat:
      fwd.fused = ad::vstack(face_att.embedding, gait_att.embedding);
      break;
    case FusionStrategy::bilinear:
      fwd.fused = ad::flatten_rowmajor(
          ad::matmul(face_vars.final_map, gait_vars.final_map, false, /*trans_b=*/true));
      break;
  }

  fwd.probs = classifier_forward(tape, bind, model.classifier, fwd.fused);
  return fwd;
}

ad::Var model_loss(ad::Tape& tape, ParamBinding& bind, const FusionModel& model,
                   const Sample& sample) {
  if (sample.label < 0 || sample.label >= model.config.classes)
    throw IdOutOfRange("sample label " + std::to_string(sample.label) + " for K=" +
                       std::to_string(model.config.classes));
  ModelForward fwd = model_forward(tape, bind, model, sample);
  return ad::cross_entropy(fwd.probs, sample.label);
}

Eigen::VectorXd predict_probabilities(const FusionModel& model, const Sample& sample) {
  ad::Tape tape;
  tape.set_grad_enabled(false);
  ParamBinding bind(tape);
  ModelForward fwd = model_forward(tape, bind, model, sample);
  return fwd.probs.value().col(0);
}

namespace {

json config_to_json(const ModelConfig& config) {
  json j;
  j["strategy"] = to_string(config.strategy);
  j["frames"] = config.frames;
  j["attention_dim"] = config.attention_dim;
  j["lambda"] = config.lambda;
  j["attention_mode"] = to_string(config.attention_mode);
  j["lambda_learnable"] = config.lambda_learnable;
  j["classes"] = config.classes;
  j["seed"] = config.seed;
  j["extractor"] = {{"out_dim", config.extractor.out_dim},
                    {"pool_window", config.extractor.pool_window},
                    {"input_h", config.extractor.input_h},
                    {"input_w", config.extractor.input_w},
                    {"seed", config.extractor.seed}};
  json layers = json::array();
  for (const auto& layer : config.extractor.layers)
    layers.push_back({{"filters", layer.filters},
                      {"kernel", layer.kernel},
                      {"stride", layer.stride}});
  j["extractor"]["layers"] = layers;
  return j;
}

ModelConfig config_from_json(const json& j) {
  ModelConfig config;
  config.strategy = fusion_strategy_from_string(j.at("strategy").get<std::string>());
  config.frames = j.at("frames").get<int>();
  config.attention_dim = j.at("attention_dim").get<int>();
  config.lambda = j.at("lambda").get<double>();
  config.attention_mode = attention_mode_from_string(j.at("attention_mode").get<std::string>());
  config.lambda_learnable = j.at("lambda_learnable").get<bool>();
  config.classes = j.at("classes").get<int>();
  config.seed = j.at("seed").get<std::uint64_t>();
  const json& ex = j.at("extractor");
  config.extractor.out_dim = ex.at("out_dim").get<int>();
  config.extractor.pool_window = ex.at("pool_window").get<int>();
  config.extractor.input_h = ex.at("input_h").get<int>();
  config.extractor.input_w = ex.at("input_w").get<int>();
  config.extractor.seed = ex.at("seed").get<std::uint64_t>();
  config.extractor.layers.clear();
  for (const auto& layer : ex.at("layers"))
    config.extractor.layers.push_back({layer.at("filters").get<int>(),
                                       layer.at("kernel").get<int>(),
                                       layer.at("stride").get<int>()});
  return config;
}

NpyArray to_npy(const ad::Mat& m) {
  NpyArray a;
  a.shape = {m.rows(), m.cols()};
  a.data.resize(static_cast<size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      a.data[static_cast<size_t>(r * m.cols() + c)] = m(r, c);
  return a;
}

ad::Mat from_npy(const NpyArray& a) {
  if (a.shape.size() != 2) throw SchemaViolation("parameter arrays must be rank 2");
  ad::Mat m(a.shape[0], a.shape[1]);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = a.data[static_cast<size_t>(r * m.cols() + c)];
  return m;
}

}  // namespace

void save_model(const FusionModel& model, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "tensors", ec);
  if (ec) throw UnwritableOutput("cannot create checkpoint dir " + dir);

  json meta;
  meta["format"] = "gaitface-checkpoint";
  meta["version"] = 1;
  meta["config"] = config_to_json(model.config);
  json names = json::array();
  FusionModel& mutable_model = const_cast<FusionModel&>(model);
  for (Param* p : mutable_model.all_params()) {
    names.push_back(p->name);
    save_npy((fs::path(dir) / "tensors" / (p->name + ".npy")).string(), to_npy(p->value));
  }
  meta["tensors"] = names;
  std::ofstream out(fs::path(dir) / "meta.json");
  if (!out) throw UnwritableOutput("cannot write checkpoint meta in " + dir);
  out << meta.dump(2) << "\n";
}

FusionModel load_model(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "meta.json");
  if (!in) throw MissingFile("checkpoint meta " + dir + "/meta.json");
  json meta;
  try {
    in >> meta;
  } catch (const json::exception& e) {
    throw SchemaViolation("checkpoint meta parse error: " + std::string(e.what()));
  }
  if (meta.value("format", "") != "gaitface-checkpoint")
    throw SchemaViolation("not a checkpoint directory: " + dir);

  FusionModel model = FusionModel::init(config_from_json(meta.at("config")));
  for (Param* p : model.all_params()) {
    const std::string path = (fs::path(dir) / "tensors" / (p->name + ".npy")).string();
    ad::Mat loaded = from_npy(load_npy(path));
    if (loaded.rows() != p->value.rows() || loaded.cols() != p->value.cols())
      throw ShapeMismatch("checkpoint tensor " + p->name + " has shape " +
                          std::to_string(loaded.rows()) + "x" +
                          std::to_string(loaded.cols()) + ", expected " +
                          std::to_string(p->value.rows()) + "x" +
                          std::to_string(p->value.cols()));
    p->value = std::move(loaded);
  }
  return model;
}

}  // namespace gaitface
