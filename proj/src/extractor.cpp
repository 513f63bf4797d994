#include "gaitface/extractor.hpp"

#include "gaitface/errors.hpp"

namespace gaitface {

void ExtractorConfig::validate() const {
  if (layers.empty()) throw InvalidConfig("extractor needs at least one layer");
  for (const auto& layer : layers) {
    if (layer.filters <= 0) throw InvalidConfig("layer filter count must be positive");
    if (layer.kernel < 1 || layer.kernel % 2 == 0)
      throw InvalidConfig("kernel dims must be odd");
    if (layer.stride < 1) throw InvalidConfig("stride must be >= 1");
  }
  if (pool_window < 1) throw InvalidConfig("pool window must be >= 1");
  if (out_dim <= 0) throw InvalidConfig("out_dim must be positive");
  if (input_h <= 0 || input_w <= 0) throw InvalidConfig("input size must be positive");
}

ExtractorGeometry extractor_geometry(const ExtractorConfig& config) {
  config.validate();
  ExtractorGeometry geom;
  int channels = 1, h = config.input_h, w = config.input_w;
  for (const auto& spec : config.layers) {
    LayerGeometry lg;
    lg.input_conv = ad::ConvGeom{channels, h, w, 4 * spec.filters, spec.kernel, spec.stride};
    const int ch = lg.input_conv.out_h();
    const int cw = lg.input_conv.out_w();
    if (ch < 1 || cw < 1) throw InvalidConfig("layer output collapsed to zero size");
    lg.state_conv = ad::ConvGeom{spec.filters, ch, cw, 4 * spec.filters, spec.kernel, 1};
    lg.pool = ad::PoolGeom{spec.filters, ch, cw, config.pool_window, config.pool_window};
    geom.layers.push_back(lg);
    channels = spec.filters;
    h = lg.pool.out_h();
    w = lg.pool.out_w();
    if (h < 1 || w < 1) throw InvalidConfig("pooling collapsed a layer to zero size");
  }
  geom.final_channels = channels;
  geom.final_h = h;
  geom.final_w = w;
  geom.flat_dim = channels * h * w;
  return geom;
}

std::vector<Param*> ExtractorParams::all_params() {
  std::vector<Param*> out;
  for (auto& layer : layers) {
    out.push_back(&layer.input_weight);
    out.push_back(&layer.state_weight);
    out.push_back(&layer.bias);
  }
  out.push_back(&out_weight);
  out.push_back(&out_bias);
  return out;
}

std::vector<const Param*> ExtractorParams::all_params() const {
  auto mutable_params = const_cast<ExtractorParams*>(this)->all_params();
  return {mutable_params.begin(), mutable_params.end()};
}

ExtractorParams init_extractor(const ExtractorConfig& config, const std::string& modality) {
  config.validate();
  const ExtractorGeometry geom = extractor_geometry(config);

  ExtractorParams params;
  params.modality = modality;
  params.config = config;
  for (size_t l = 0; l < config.layers.size(); ++l) {
    const auto& spec = config.layers[l];
    const auto& lg = geom.layers[l];
    const std::string prefix = modality + ".conv" + std::to_string(l);
    const Eigen::Index in_cols =
        static_cast<Eigen::Index>(lg.input_conv.in_channels) * spec.kernel * spec.kernel;
    const Eigen::Index state_cols =
        static_cast<Eigen::Index>(spec.filters) * spec.kernel * spec.kernel;
    ExtractorParams::Layer layer;
    layer.input_weight =
        Param(prefix + ".Wx", uniform_fan_in(4 * spec.filters, in_cols, in_cols,
                                             derive_seed(config.seed, prefix + ".Wx")));
    layer.state_weight =
        Param(prefix + ".Wh", uniform_fan_in(4 * spec.filters, state_cols, state_cols,
                                             derive_seed(config.seed, prefix + ".Wh")));
    layer.bias = Param(prefix + ".b", ad::Mat::Zero(4 * spec.filters, 1));
    params.layers.push_back(std::move(layer));
  }
  params.out_weight = Param(
      modality + ".out.W",
      uniform_fan_in(config.out_dim, geom.flat_dim, geom.flat_dim,
                     derive_seed(config.seed, modality + ".out.W")));
  params.out_bias = Param(modality + ".out.b", ad::Mat::Zero(config.out_dim, 1));
  return params;
}

ExtractorVars extractor_forward(ad::Tape& tape, ParamBinding& bind,
                                const ExtractorParams& params, const ClipTensor& clip) {
  const ExtractorConfig& config = params.config;
  if (clip.height != config.input_h || clip.width != config.input_w || clip.frames < 1)
    throw ShapeMismatch("clip " + std::to_string(clip.frames) + "x" +
                        std::to_string(clip.height) + "x" + std::to_string(clip.width) +
                        " does not match extractor input " + std::to_string(config.input_h) +
                        "x" + std::to_string(config.input_w));
  const ExtractorGeometry geom = extractor_geometry(config);
  const size_t num_layers = config.layers.size();

  std::vector<ad::Var> hidden(num_layers), cell(num_layers);
  std::vector<bool> has_state(num_layers, false);
  std::vector<ad::Var> feature_cols;
  feature_cols.reserve(static_cast<size_t>(clip.frames));
  ad::Var final_map;

  for (int t = 0; t < clip.frames; ++t) {
    ad::Mat frame(1, static_cast<Eigen::Index>(clip.height) * clip.width);
    frame.row(0) = clip.frame_flat(t);
    ad::Var x = tape.leaf(std::move(frame), /*requires_grad=*/false);

    for (size_t l = 0; l < num_layers; ++l) {
      const auto& lg = geom.layers[l];
      const int f = config.layers[l].filters;
      ad::Var z = ad::colbias(ad::conv2d(x, bind(params.layers[l].input_weight),
                                         lg.input_conv),
                              bind(params.layers[l].bias));
      if (has_state[l])
        z = ad::add(z, ad::conv2d(hidden[l], bind(params.layers[l].state_weight),
                                  lg.state_conv));
      ad::Var gate_in = ad::sigmoid_op(ad::rows(z, 0, f));
      ad::Var gate_forget = ad::sigmoid_op(ad::rows(z, f, f));
      ad::Var gate_out = ad::sigmoid_op(ad::rows(z, 2 * f, f));
      ad::Var cand = ad::tanh_op(ad::rows(z, 3 * f, f));

      ad::Var c = has_state[l]
                      ? ad::add(ad::cmul(gate_forget, cell[l]), ad::cmul(gate_in, cand))
                      : ad::cmul(gate_in, cand);
      ad::Var h = ad::cmul(gate_out, ad::tanh_op(c));
      hidden[l] = h;
      cell[l] = c;
      has_state[l] = true;
      x = ad::maxpool2d(h, lg.pool);
    }

    ad::Var flat = ad::flatten_rowmajor(x);
    feature_cols.push_back(
        ad::colbias(ad::matmul(bind(params.out_weight), flat), bind(params.out_bias)));
    if (t == clip.frames - 1) final_map = x;
  }

  return ExtractorVars{ad::hstack(feature_cols), final_map};
}

FeatureSequence extract_features(const ExtractorParams& params, const ClipTensor& clip) {
  ad::Tape tape;
  tape.set_grad_enabled(false);
  ParamBinding bind(tape);
  ExtractorVars vars = extractor_forward(tape, bind, params, clip);
  FeatureSequence seq;
  seq.features = vars.features.value().transpose();  // L x C
  seq.modality = params.modality;
  if (!seq.features.allFinite())
    throw ShapeMismatch("extractor produced non-finite features");
  return seq;
}

}  // namespace gaitface
