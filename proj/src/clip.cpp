#include "gaitface/clip.hpp"

#include <cmath>

#include "gaitface/errors.hpp"

namespace gaitface {

void ClipTensor::set_frame(int f, const Eigen::MatrixXd& pixels) {
  if (pixels.rows() != height || pixels.cols() != width)
    throw ShapeMismatch("ClipTensor::set_frame: frame shape mismatch");
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) at(f, y, x) = pixels(y, x);
}

Eigen::MatrixXd ClipTensor::frame(int f) const {
  Eigen::MatrixXd out(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) out(y, x) = at(f, y, x);
  return out;
}

bool ClipTensor::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

ClipTensor clip_from_frames(const std::vector<GrayscaleFrame>& frames) {
  if (frames.empty()) throw EmptyImage("clip_from_frames: no frames");
  const int h = static_cast<int>(frames.front().pixels.rows());
  const int w = static_cast<int>(frames.front().pixels.cols());
  ClipTensor clip(static_cast<int>(frames.size()), h, w);
  for (size_t f = 0; f < frames.size(); ++f)
    clip.set_frame(static_cast<int>(f), frames[f].pixels);
  return clip;
}

}  // namespace gaitface
