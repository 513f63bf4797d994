#pragma once

#include <string>
#include <vector>

#include "gaitface/clip.hpp"
#include "gaitface/image.hpp"

namespace gaitface {

// Per-frame silhouette bounding-box aspect ratio (height / width). Frames with
// no foreground are flagged invalid rather than failing the sequence.
struct AspectSignal {
  std::vector<double> values;
  std::vector<bool> valid;

  size_t size() const { return values.size(); }
};

AspectSignal aspect_ratio_signal(const std::vector<Mask>& masks);

// Invalid entries replaced by linear interpolation between the nearest valid
// neighbours (nearest valid value at the ends). Requires >= 1 valid entry.
std::vector<double> interpolate_invalid(const AspectSignal& signal);

// Centered moving average; the window is truncated at the sequence ends.
std::vector<double> smooth_signal(const std::vector<double>& values, int window);

// Indices of strict local minima of the smoothed signal, ascending. Plateau
// minima report their leftmost index. Requires >= 3 valid frames and an odd
// window >= 1.
std::vector<int> detect_local_minima(const AspectSignal& signal, int smooth_window);

// One gait cycle: source frame span plus the resampled L-frame clip.
struct GaitCycle {
  int start_frame = 0;
  int end_frame = 0;
  ClipTensor clip;
};

// Cycle spans [minima[0], minima[2]]; frames are resampled to exactly
// frame_count frames by nearest-index sampling on a uniform grid (ties round
// half away from zero).
GaitCycle extract_gait_cycle(const std::vector<GrayscaleFrame>& frames,
                             const std::vector<int>& minima, int frame_count);

// Indices into the source sequence chosen by the resampling grid; exposed so
// the face pipeline can crop the matching RGB frames.
std::vector<int> cycle_sample_indices(int start_frame, int end_frame, int frame_count);

// Diagnostic CSV: frame_index, raw, smoothed, is_minimum.
void dump_signal_csv(const std::string& path, const AspectSignal& signal, int smooth_window);

}  // namespace gaitface
