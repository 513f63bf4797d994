#include "gaitface/face_crop.hpp"

#include <cmath>
#include <optional>

#include "gaitface/errors.hpp"
#include "gaitface/gait_cycle.hpp"

namespace gaitface {

FaceCrop crop_face(const ImageU8& frame, const PoseKeypoints& kp,
                   const FaceCropOptions& options) {
  if (frame.empty()) throw EmptyImage("crop_face: empty frame");
  const Landmark& nose = kp.points[PoseKeypoints::kNose];
  const Landmark& left_eye = kp.points[PoseKeypoints::kLeftEye];
  const Landmark& right_eye = kp.points[PoseKeypoints::kRightEye];
  for (const Landmark* lm : {&nose, &left_eye, &right_eye}) {
    if (lm->visibility < options.visibility_threshold)
      throw FaceNotVisible("required keypoint below visibility threshold " +
                           std::to_string(options.visibility_threshold));
  }

  const double d = std::hypot(left_eye.x - right_eye.x, left_eye.y - right_eye.y);
  const double side = options.scale * d;
  if (side < 1.0) throw FaceNotVisible("inter-eye distance too small for a crop");

  const int iside = static_cast<int>(std::lround(side));
  int x0 = static_cast<int>(std::lround(nose.x - side / 2.0));
  int y0 = static_cast<int>(std::lround(nose.y - side / 2.0));
  int x1 = x0 + iside;
  int y1 = y0 + iside;
  x0 = std::max(0, x0);
  y0 = std::max(0, y0);
  x1 = std::min(frame.width, x1);
  y1 = std::min(frame.height, y1);
  if (x1 <= x0 || y1 <= y0) throw FaceNotVisible("face box lies outside the frame");

  ImageU8 crop;
  crop.width = x1 - x0;
  crop.height = y1 - y0;
  crop.rgb.resize(static_cast<size_t>(crop.width) * crop.height * 3);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x)
      for (int c = 0; c < 3; ++c)
        crop.rgb[3 * (static_cast<size_t>(y - y0) * crop.width + (x - x0)) + c] =
            frame.rgb[3 * (static_cast<size_t>(y) * frame.width + x) + c];

  FaceCrop result;
  result.box = {x0, y0, x1, y1};
  result.image = preprocess_frame(crop, options.target_h, options.target_w, options.stats);
  result.image.source_index = kp.frame_index;
  return result;
}

ClipTensor build_face_clip(const LoadedSequence& sequence, int cycle_start, int cycle_end,
                           int frame_count, KeypointProvider& provider,
                           const FaceCropOptions& options) {
  const std::vector<int> sample = cycle_sample_indices(cycle_start, cycle_end, frame_count);
  const int last_needed = sample.back();
  if (last_needed >= static_cast<int>(sequence.rgb_frames.size()))
    throw ShapeMismatch("cycle extends past the RGB sequence");

  // keypoints are tracked sequentially from frame 0 through the cycle end
  std::vector<std::optional<PoseKeypoints>> keypoints(
      static_cast<size_t>(last_needed) + 1);
  std::optional<PoseKeypoints> prior;
  for (int i = 0; i <= last_needed; ++i) {
    VideoFrame vf{&sequence.rgb_frames[static_cast<size_t>(i)],
                  sequence.record.rgb_paths[static_cast<size_t>(i)], i};
    try {
      PoseKeypoints kp = provider.provide(vf, prior);
      keypoints[static_cast<size_t>(i)] = kp;
      prior = kp;
    } catch (const NoPersonFound&) {
      // tracking restarts from detection on the next frame
      prior.reset();
    }
  }

  std::vector<std::optional<GrayscaleFrame>> crops(sample.size());
  int successes = 0;
  for (size_t j = 0; j < sample.size(); ++j) {
    const int src = sample[j];
    if (!keypoints[static_cast<size_t>(src)]) continue;
    try {
      FaceCrop crop = crop_face(sequence.rgb_frames[static_cast<size_t>(src)],
                                *keypoints[static_cast<size_t>(src)], options);
      crops[j] = std::move(crop.image);
      ++successes;
    } catch (const FaceNotVisible&) {
      // filled below from a neighbouring successful crop
    }
  }
  if (successes == 0) throw NoFaceInClip("no frame in the cycle produced a face crop");

  // hold-last fill; leading failures take the first success
  GrayscaleFrame first_success;
  for (const auto& c : crops)
    if (c) {
      first_success = *c;
      break;
    }
  std::optional<GrayscaleFrame> last;
  std::vector<GrayscaleFrame> frames;
  frames.reserve(crops.size());
  for (auto& c : crops) {
    if (c) {
      last = *c;
      frames.push_back(*c);
    } else {
      frames.push_back(last ? *last : first_success);
    }
  }
  return clip_from_frames(frames);
}

}  // namespace gaitface
