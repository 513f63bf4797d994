#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gaitface/autodiff.hpp"

namespace gaitface {

// Named learnable tensor plus its optimizer state.
struct Param {
  std::string name;
  ad::Mat value;
  ad::Mat m;  // first-moment accumulator
  ad::Mat v;  // second-moment accumulator

  Param() = default;
  Param(std::string name_, ad::Mat value_)
      : name(std::move(name_)), value(std::move(value_)),
        m(ad::Mat::Zero(value.rows(), value.cols())),
        v(ad::Mat::Zero(value.rows(), value.cols())) {}
};

// Binds params to leaf nodes of one tape, one leaf per param per pass, so a
// batch shares leaves and gradients accumulate across samples.
class ParamBinding {
 public:
  explicit ParamBinding(ad::Tape& tape) : tape_(&tape) {}

  ad::Var operator()(const Param& p) {
    auto it = cache_.find(&p);
    if (it != cache_.end()) return it->second;
    ad::Var leaf = tape_->leaf(p.value, /*requires_grad=*/true);
    cache_.emplace(&p, leaf);
    return leaf;
  }

  // Gradient accumulated for a param, or nullptr when it never entered the graph.
  const ad::Mat* gradient(const Param& p) const {
    auto it = cache_.find(&p);
    if (it == cache_.end()) return nullptr;
    const ad::Mat& g = it->second.grad();
    return g.size() == 0 ? nullptr : &g;
  }

 private:
  ad::Tape* tape_;
  std::unordered_map<const Param*, ad::Var> cache_;
};

// splitmix64; used to derive independent per-component seeds from one master
// seed so init order changes never reshuffle unrelated tensors.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);

// Uniform fan-in init: entries ~ U(-1/sqrt(fan_in), +1/sqrt(fan_in)),
// deterministic per seed.
ad::Mat uniform_fan_in(Eigen::Index rows, Eigen::Index cols, Eigen::Index fan_in,
                       std::uint64_t seed);

}  // namespace gaitface
