#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gaitface/autodiff.hpp"
#include "gaitface/clip.hpp"
#include "gaitface/params.hpp"

namespace gaitface {

struct ConvLayerSpec {
  int filters = 0;
  int kernel = 3;  // square, odd
  int stride = 1;
};

// Convolutional-recurrent extractor: per layer a conv-gated recurrent cell
// (input/forget/output gates, tanh cell state) followed by spatial max
// pooling, then a per-frame learned linear reduction to out_dim.
struct ExtractorConfig {
  std::vector<ConvLayerSpec> layers{{16, 3, 1}, {32, 3, 1}};
  int pool_window = 2;
  int out_dim = 588;  // C
  int input_h = 128;
  int input_w = 128;
  std::uint64_t seed = 0;

  void validate() const;  // throws InvalidConfig
};

struct LayerGeometry {
  ad::ConvGeom input_conv;   // conv over the layer input
  ad::ConvGeom state_conv;   // conv over the recurrent hidden state
  ad::PoolGeom pool;
};

struct ExtractorGeometry {
  std::vector<LayerGeometry> layers;
  int final_channels = 0;  // p of the bilinear reshape
  int final_h = 0;
  int final_w = 0;
  int flat_dim = 0;        // final_channels * final_h * final_w
  int spatial_dim() const { return final_h * final_w; }  // d of the reshape
};

ExtractorGeometry extractor_geometry(const ExtractorConfig& config);

struct ExtractorParams {
  struct Layer {
    Param input_weight;  // (4f) x (c_in * k * k), gate order: input, forget, output, cell
    Param state_weight;  // (4f) x (f * k * k)
    Param bias;          // (4f) x 1
  };

  std::string modality;  // "gait" or "face"
  ExtractorConfig config;
  std::vector<Layer> layers;
  Param out_weight;  // C x flat_dim
  Param out_bias;    // C x 1

  std::vector<Param*> all_params();
  std::vector<const Param*> all_params() const;
};

ExtractorParams init_extractor(const ExtractorConfig& config, const std::string& modality);

struct ExtractorVars {
  ad::Var features;   // C x L, one column per frame
  ad::Var final_map;  // final pooled hidden map at the last frame, p x d
};

ExtractorVars extractor_forward(ad::Tape& tape, ParamBinding& bind,
                                const ExtractorParams& params, const ClipTensor& clip);

// Per-frame feature matrix, rows = frames.
struct FeatureSequence {
  Eigen::MatrixXd features;  // L x C
  std::string modality;
};

FeatureSequence extract_features(const ExtractorParams& params, const ClipTensor& clip);

}  // namespace gaitface
