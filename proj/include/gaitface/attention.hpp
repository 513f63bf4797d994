#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>

#include "gaitface/autodiff.hpp"
#include "gaitface/extractor.hpp"
#include "gaitface/params.hpp"

namespace gaitface {

enum class AttentionMode { plain, gated };

AttentionMode attention_mode_from_string(const std::string& s);
std::string to_string(AttentionMode mode);

struct AttentionConfig {
  int in_dim = 588;     // C, feature width
  int att_dim = 256;    // projection width
  double lambda = 0.5;  // score scale, in (0, 1]
  AttentionMode mode = AttentionMode::gated;
  bool lambda_learnable = false;
  std::uint64_t seed = 0;

  void validate() const;
};

// Per-modality keyless attention parameters: projection W, b, context vector
// u, and the score scale lambda. Each modality owns an independent instance.
struct AttentionParams {
  std::string modality;
  AttentionConfig config;
  Param projection;      // att_dim x in_dim
  Param projection_bias; // att_dim x 1
  Param context;         // att_dim x 1
  Param lambda_value;    // 1 x 1, trained only when lambda_learnable

  std::vector<Param*> all_params();
};

AttentionParams init_attention(const AttentionConfig& config, const std::string& modality);

struct AttentionVars {
  ad::Var weights;    // 1 x L simplex
  ad::Var embedding;  // att_dim x 1, weighted sum of projected frames
  ad::Var projected;  // att_dim x L
};

// features: in_dim x L (one column per frame).
AttentionVars keyless_attention_forward(ad::Tape& tape, ParamBinding& bind,
                                        const AttentionParams& params, ad::Var features);

// Per-frame weights over the L frames plus the global modality embedding.
struct AttentionResult {
  Eigen::VectorXd weights;    // length L, non-negative, sums to 1
  Eigen::VectorXd embedding;  // length att_dim
  Eigen::MatrixXd projected;  // L x att_dim, rows are projected frames
};

// features: L x C rows. Plain mode scores u' tanh(Wx+b); gated mode
// u' (tanh(Wx+b) .* sigm(Wx+b)); weights softmax(lambda * scores).
AttentionResult keyless_attention(const Eigen::MatrixXd& features,
                                  const AttentionParams& params);

// alpha = |face| / (|face| + |gait|), beta the complement (Euclidean norms).
std::pair<double, double> adaptive_weights(const Eigen::VectorXd& face_emb,
                                           const Eigen::VectorXd& gait_emb);

enum class FusionStrategy { face_only, gait_only, average, bilinear, attention_concat, adaptive };

FusionStrategy fusion_strategy_from_string(const std::string& s);
std::string to_string(FusionStrategy strategy);

struct FusedFeature {
  Eigen::VectorXd vector;
  FusionStrategy strategy = FusionStrategy::adaptive;
  int bilinear_p = 0;  // side of the p x p matrix before flattening
};

FusedFeature fuse_adaptive(const Eigen::VectorXd& face_emb, const Eigen::VectorXd& gait_emb,
                           double alpha, double beta);
FusedFeature fuse_average(const Eigen::VectorXd& face_emb, const Eigen::VectorXd& gait_emb);
// face_map, gait_map: p x d reshapes of the final pooled extractor maps;
// result is face_map * gait_map' flattened row-major to p^2.
FusedFeature fuse_bilinear(const Eigen::MatrixXd& face_map, const Eigen::MatrixXd& gait_map);
FusedFeature fuse_attention_concat(const AttentionResult& face_res,
                                   const AttentionResult& gait_res);

}  // namespace gaitface
