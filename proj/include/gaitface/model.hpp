#pragma once

#include <string>
#include <vector>

#include "gaitface/attention.hpp"
#include "gaitface/classifier.hpp"
#include "gaitface/config.hpp"
#include "gaitface/extractor.hpp"
#include "gaitface/sample.hpp"

namespace gaitface {

struct ModelConfig {
  FusionStrategy strategy = FusionStrategy::adaptive;
  ExtractorConfig extractor;  // shared architecture, independent parameters
  int frames = 24;            // L
  int attention_dim = 256;    // projection width
  double lambda = 0.5;
  AttentionMode attention_mode = AttentionMode::gated;
  bool lambda_learnable = false;
  int classes = 0;  // K
  std::uint64_t seed = 0;

  void validate() const;
  // Reads the [model] section plus fusion.strategy / attention.mode keys.
  static ModelConfig from_config(const Config& cfg, int classes);
  // Classifier input width for the configured strategy.
  int fused_dim(const ExtractorGeometry& geom) const;
};

// Both extractors, both attention blocks, and the classifier head. Unimodal
// and bilinear strategies keep unused blocks out of the graph (and out of
// the optimizer) via active_params().
struct FusionModel {
  ModelConfig config;
  ExtractorGeometry geometry;
  ExtractorParams gait_extractor;
  ExtractorParams face_extractor;
  AttentionParams gait_attention;
  AttentionParams face_attention;
  ClassifierParams classifier;

  static FusionModel init(const ModelConfig& config);

  std::vector<Param*> all_params();
  std::vector<Param*> active_params();

  bool uses_gait() const;
  bool uses_face() const;
  bool uses_attention() const;
};

struct ModelForward {
  ad::Var probs;     // K x 1
  ad::Var fused;     // classifier input
  ad::Var face_emb;  // valid only when attention ran for the modality
  ad::Var gait_emb;
};

ModelForward model_forward(ad::Tape& tape, ParamBinding& bind, const FusionModel& model,
                           const Sample& sample);

ad::Var model_loss(ad::Tape& tape, ParamBinding& bind, const FusionModel& model,
                   const Sample& sample);

// No-grad forward returning class probabilities.
Eigen::VectorXd predict_probabilities(const FusionModel& model, const Sample& sample);

// Checkpoint: directory with meta.json plus one .npy per named parameter.
void save_model(const FusionModel& model, const std::string& dir);
FusionModel load_model(const std::string& dir);

}  // namespace gaitface
