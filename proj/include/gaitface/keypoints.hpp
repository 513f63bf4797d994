#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>

#include "gaitface/image.hpp"

namespace gaitface {

struct Landmark {
  double x = 0.0;
  double y = 0.0;
  double visibility = 0.0;
};

// 33 pose landmarks in pixel coordinates. Index convention (subset used
// here): 0 = nose, 2 = left eye, 5 = right eye, 7 = left ear, 8 = right ear.
struct PoseKeypoints {
  static constexpr int kCount = 33;
  static constexpr int kNose = 0;
  static constexpr int kLeftEye = 2;
  static constexpr int kRightEye = 5;
  static constexpr int kLeftEar = 7;
  static constexpr int kRightEar = 8;

  std::array<Landmark, kCount> points{};
  int frame_index = 0;
};

struct VideoFrame {
  const ImageU8* image = nullptr;
  std::string path;
  int index = 0;
};

// Pluggable pose-keypoint source. Without a prior the provider runs its
// detector over the whole frame; with a prior it tracks from the previous
// frame's keypoints. Calls within one sequence are strictly sequential.
class KeypointProvider {
 public:
  virtual ~KeypointProvider() = default;
  virtual PoseKeypoints provide(const VideoFrame& frame,
                                const std::optional<PoseKeypoints>& prior) = 0;
};

// Reads precomputed keypoints from a JSON Lines sidecar, one record per
// frame: {"frame": int, "landmarks": [[x, y, visibility] x 33]}. The frame
// number served is 0 without a prior, prior.frame_index + 1 otherwise.
class FileKeypointProvider : public KeypointProvider {
 public:
  explicit FileKeypointProvider(const std::string& sidecar_path);

  PoseKeypoints provide(const VideoFrame& frame,
                        const std::optional<PoseKeypoints>& prior) override;

  size_t frame_count() const { return by_frame_.size(); }

 private:
  std::map<int, PoseKeypoints> by_frame_;
};

// Adapter around an external pose-estimation executable. The command is
// invoked per frame as: <command> <frame_path> [x0 y0 x1 y1] where the box
// arguments, present when a prior exists, are the prior-derived ROI. The
// process must print one JSON object: {"landmarks": [[x, y, visibility] x 33]}.
class ExternalProcessProvider : public KeypointProvider {
 public:
  explicit ExternalProcessProvider(std::string command, double roi_margin = 0.25);

  PoseKeypoints provide(const VideoFrame& frame,
                        const std::optional<PoseKeypoints>& prior) override;

 private:
  std::string command_;
  double roi_margin_;
};

// Clamp landmark coordinates into [0, width] x [0, height].
void clamp_keypoints(PoseKeypoints& kp, int width, int height);

}  // namespace gaitface
