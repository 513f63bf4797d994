#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gaitface/image.hpp"

namespace gaitface {

// L-frame grayscale tensor (frames x height x width), C-order storage.
// This is the unit both feature extractors consume.
struct ClipTensor {
  int frames = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;  // size = frames * height * width

  ClipTensor() = default;
  ClipTensor(int frames_, int height_, int width_)
      : frames(frames_), height(height_), width(width_),
        data(static_cast<size_t>(frames_) * height_ * width_, 0.0) {}

  double& at(int f, int y, int x) {
    return data[(static_cast<size_t>(f) * height + y) * width + x];
  }
  double at(int f, int y, int x) const {
    return data[(static_cast<size_t>(f) * height + y) * width + x];
  }

  // Frame as a 1 x (height*width) channel-major map row (input layout of the
  // convolutional ops).
  Eigen::Map<const Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor>> frame_flat(
      int f) const {
    return {data.data() + static_cast<size_t>(f) * height * width,
            1, static_cast<Eigen::Index>(height) * width};
  }

  void set_frame(int f, const Eigen::MatrixXd& pixels);  // pixels: height x width
  Eigen::MatrixXd frame(int f) const;

  bool all_finite() const;
};

ClipTensor clip_from_frames(const std::vector<GrayscaleFrame>& frames);

}  // namespace gaitface
