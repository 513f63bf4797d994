#pragma once

#include <array>
#include <vector>

#include "gaitface/clip.hpp"
#include "gaitface/image.hpp"
#include "gaitface/keypoints.hpp"
#include "gaitface/manifest.hpp"

namespace gaitface {

struct FaceCropOptions {
  double scale = 3.0;              // box side = scale * inter-eye distance
  double visibility_threshold = 0.5;
  int target_h = 128;
  int target_w = 128;
  NormalizeStats stats{};
};

struct FaceCrop {
  std::array<int, 4> box{};  // x0, y0, x1, y1; half-open pixel rectangle
  GrayscaleFrame image;      // preprocessed to target_h x target_w
};

// Square box centered on the nose with side scale * d(left_eye, right_eye),
// clamped to the frame, then preprocessed like any other frame. Requires
// nose and both eyes above the visibility threshold.
FaceCrop crop_face(const ImageU8& frame, const PoseKeypoints& kp,
                   const FaceCropOptions& options);

// Face clip aligned with a gait cycle: keypoints are provided sequentially
// over the source frames, then each resampled cycle frame is cropped. Frames
// whose crop fails reuse the most recent successful crop (the first
// successful crop when failures lead).
ClipTensor build_face_clip(const LoadedSequence& sequence, int cycle_start, int cycle_end,
                           int frame_count, KeypointProvider& provider,
                           const FaceCropOptions& options);

}  // namespace gaitface
