#include "gaitface/attention.hpp"

#include "gaitface/errors.hpp"

namespace gaitface {

AttentionMode attention_mode_from_string(const std::string& s) {
  if (s == "plain") return AttentionMode::plain;
  if (s == "gated") return AttentionMode::gated;
  throw InvalidConfig("attention mode must be 'plain' or 'gated', got '" + s + "'");
}

std::string to_string(AttentionMode mode) {
  return mode == AttentionMode::plain ? "plain" : "gated";
}

void AttentionConfig::validate() const {
  if (in_dim <= 0 || att_dim <= 0) throw InvalidConfig("attention dims must be positive");
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw InvalidConfig("lambda must lie in (0, 1], got " + std::to_string(lambda));
}

std::vector<Param*> AttentionParams::all_params() {
  std::vector<Param*> out{&projection, &projection_bias, &context};
  if (config.lambda_learnable) out.push_back(&lambda_value);
  return out;
}

AttentionParams init_attention(const AttentionConfig& config, const std::string& modality) {
  config.validate();
  AttentionParams params;
  params.modality = modality;
  params.config = config;
  const std::string prefix = modality + ".att";
  params.projection = Param(
      prefix + ".W", uniform_fan_in(config.att_dim, config.in_dim, config.in_dim,
                                    derive_seed(config.seed, prefix + ".W")));
  params.projection_bias = Param(prefix + ".b", ad::Mat::Zero(config.att_dim, 1));
  params.context = Param(
      prefix + ".u", uniform_fan_in(config.att_dim, 1, config.att_dim,
                                    derive_seed(config.seed, prefix + ".u")));
  ad::Mat lambda_mat(1, 1);
  lambda_mat(0, 0) = config.lambda;
  params.lambda_value = Param(prefix + ".lambda", std::move(lambda_mat));
  return params;
}

AttentionVars keyless_attention_forward(ad::Tape& tape, ParamBinding& bind,
                                        const AttentionParams& params, ad::Var features) {
  const AttentionConfig& config = params.config;
  config.validate();
  if (features.rows() != config.in_dim)
    throw ShapeMismatch("attention expects " + std::to_string(config.in_dim) +
                        " feature rows, got " + std::to_string(features.rows()));

  ad::Var projected =
      ad::colbias(ad::matmul(bind(params.projection), features), bind(params.projection_bias));
  ad::Var activated = config.mode == AttentionMode::plain
                          ? ad::tanh_op(projected)
                          : ad::cmul(ad::tanh_op(projected), ad::sigmoid_op(projected));
  ad::Var scores = ad::matmul(bind(params.context), activated, /*trans_a=*/true);  // 1 x L
  ad::Var scaled = config.lambda_learnable ? ad::smul(scores, bind(params.lambda_value))
                                           : ad::scale(scores, config.lambda);
  ad::Var weights = ad::softmax_flat(scaled);
  ad::Var embedding = ad::matmul(projected, weights, /*trans_a=*/false, /*trans_b=*/true);
  return AttentionVars{weights, embedding, projected};
}

AttentionResult keyless_attention(const Eigen::MatrixXd& features,
                                  const AttentionParams& params) {
  if (features.cols() != params.config.in_dim)
    throw ShapeMismatch("feature matrix must be L x " +
                        std::to_string(params.config.in_dim) + ", got " +
                        std::to_string(features.rows()) + "x" +
                        std::to_string(features.cols()));
  ad::Tape tape;
  tape.set_grad_enabled(false);
  ParamBinding bind(tape);
  ad::Var feats = tape.leaf(features.transpose());  // C x L
  AttentionVars vars = keyless_attention_forward(tape, bind, params, feats);
  AttentionResult result;
  result.weights = vars.weights.value().row(0).transpose();
  result.embedding = vars.embedding.value().col(0);
  result.projected = vars.projected.value().transpose();
  return result;
}

std::pair<double, double> adaptive_weights(const Eigen::VectorXd& face_emb,
                                           const Eigen::VectorXd& gait_emb) {
  const double nf = face_emb.norm();
  const double ng = gait_emb.norm();
  if (nf == 0.0 && ng == 0.0)
    throw BothZero("both modality embeddings have zero norm");
  const double alpha = nf / (nf + ng);
  return {alpha, ng / (nf + ng)};
}

FusedFeature fuse_adaptive(const Eigen::VectorXd& face_emb, const Eigen::VectorXd& gait_emb,
                           double alpha, double beta) {
  if (face_emb.size() != gait_emb.size())
    throw DimensionMismatch("embeddings differ: " + std::to_string(face_emb.size()) +
                            " vs " + std::to_string(gait_emb.size()));
  if (std::abs(alpha + beta - 1.0) > 1e-9)
    throw InvalidConfig("adaptive weights must sum to 1");
  FusedFeature fused;
  fused.strategy = FusionStrategy::adaptive;
  fused.vector = alpha * face_emb + beta * gait_emb;
  return fused;
}

FusedFeature fuse_average(const Eigen::VectorXd& face_emb, const Eigen::VectorXd& gait_emb) {
  if (face_emb.size() != gait_emb.size())
    throw DimensionMismatch("embeddings differ: " + std::to_string(face_emb.size()) +
                            " vs " + std::to_string(gait_emb.size()));
  FusedFeature fused;
  fused.strategy = FusionStrategy::average;
  fused.vector = 0.5 * face_emb + 0.5 * gait_emb;
  return fused;
}

FusedFeature fuse_bilinear(const Eigen::MatrixXd& face_map, const Eigen::MatrixXd& gait_map) {
  if (face_map.rows() != gait_map.rows() || face_map.cols() != gait_map.cols())
    throw DimensionMismatch("bilinear inputs must both be p x d");
  const Eigen::Index p = face_map.rows();
  Eigen::MatrixXd z = face_map * gait_map.transpose();
  FusedFeature fused;
  fused.strategy = FusionStrategy::bilinear;
  fused.bilinear_p = static_cast<int>(p);
  fused.vector.resize(p * p);
  for (Eigen::Index r = 0; r < p; ++r)
    for (Eigen::Index c = 0; c < p; ++c) fused.vector[r * p + c] = z(r, c);
  return fused;
}

FusedFeature fuse_attention_concat(const AttentionResult& face_res,
                                   const AttentionResult& gait_res) {
  FusedFeature fused;
  fused.strategy = FusionStrategy::attention_concat;
  fused.vector.resize(face_res.embedding.size() + gait_res.embedding.size());
  fused.vector << face_res.embedding, gait_res.embedding;
  return fused;
}

FusionStrategy fusion_strategy_from_string(const std::string& s) {
  if (s == "face") return FusionStrategy::face_only;
  if (s == "gait") return FusionStrategy::gait_only;
  if (s == "average") return FusionStrategy::average;
  if (s == "bilinear") return FusionStrategy::bilinear;
  if (s == "attention_concat") return FusionStrategy::attention_concat;
  if (s == "adaptive") return FusionStrategy::adaptive;
  throw InvalidConfig("unknown fusion strategy '" + s +
                      "' (expected face, gait, average, bilinear, attention_concat, adaptive)");
}

std::string to_string(FusionStrategy strategy) {
  switch (strategy) {
    case FusionStrategy::face_only: return "face";
    case FusionStrategy::gait_only: return "gait";
    case FusionStrategy::average: return "average";
    case FusionStrategy::bilinear: return "bilinear";
    case FusionStrategy::attention_concat: return "attention_concat";
    case FusionStrategy::adaptive: return "adaptive";
  }
  return "unknown";
}

}  // namespace gaitface
