#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gaitface/sample.hpp"

namespace gaitface {

// Synthetic clip dataset with a class signal in both modalities: gait clips
// are oscillating walker silhouettes with a class-coded stripe, face clips a
// class-coded bright patch over a grating. Values live in the normalized
// intensity range of the real pipeline.
struct SyntheticSpec {
  int classes = 5;
  int sequences_per_class = 20;
  int frames = 8;   // L
  int height = 16;  // H
  int width = 16;   // W
  std::uint64_t seed = 7;
  double noise = 0.15;
  // When true, face clips of 0-degree sequences and gait clips of 90-degree
  // sequences are replaced by uninformative noise.
  bool corrupt_by_angle = false;
};

// Even sequence positions train, odd test; angles cycle 0/45/90 per sequence.
std::pair<std::vector<Sample>, std::vector<Sample>> make_synthetic_clips(
    const SyntheticSpec& spec);

// CASIA-style on-disk dataset: PNG frames and silhouettes, keypoint sidecars
// and a manifest, for exercising the full prepare/train/evaluate pipeline.
// Layout: <dir>/rgb/..., <dir>/mask/..., <dir>/keypoints/<tag>.jsonl,
// <dir>/manifest.json.
struct SyntheticDatasetSpec {
  int classes = 3;
  int frames_per_sequence = 40;
  int image_h = 64;
  int image_w = 64;
  int gait_period = 12;
  std::uint64_t seed = 11;
};

std::string write_synthetic_dataset(const std::string& dir, const SyntheticDatasetSpec& spec);

}  // namespace gaitface
