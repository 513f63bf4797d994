#include "gaitface/gait_cycle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "gaitface/errors.hpp"

namespace gaitface {

AspectSignal aspect_ratio_signal(const std::vector<Mask>& masks) {
  if (masks.empty()) throw EmptyImage("aspect_ratio_signal: no masks");
  AspectSignal signal;
  signal.values.reserve(masks.size());
  signal.valid.reserve(masks.size());
  for (const Mask& mask : masks) {
    int ymin = mask.height, ymax = -1, xmin = mask.width, xmax = -1;
    for (int y = 0; y < mask.height; ++y) {
      for (int x = 0; x < mask.width; ++x) {
        if (!mask.foreground(y, x)) continue;
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
      }
    }
    if (ymax < 0) {
      signal.values.push_back(0.0);
      signal.valid.push_back(false);
    } else {
      const double box_h = ymax - ymin + 1;
      const double box_w = xmax - xmin + 1;
      signal.values.push_back(box_h / box_w);
      signal.valid.push_back(true);
    }
  }
  return signal;
}

std::vector<double> interpolate_invalid(const AspectSignal& signal) {
  const int n = static_cast<int>(signal.size());
  std::vector<double> out(signal.values);
  int first_valid = -1, last_valid = -1;
  for (int i = 0; i < n; ++i)
    if (signal.valid[static_cast<size_t>(i)]) {
      if (first_valid < 0) first_valid = i;
      last_valid = i;
    }
  if (first_valid < 0) throw SignalTooShort("no valid frames in aspect signal");

  for (int i = 0; i < first_valid; ++i) out[static_cast<size_t>(i)] = out[first_valid];
  for (int i = last_valid + 1; i < n; ++i) out[static_cast<size_t>(i)] = out[last_valid];

  int prev = first_valid;
  for (int i = first_valid + 1; i <= last_valid; ++i) {
    if (!signal.valid[static_cast<size_t>(i)]) continue;
    if (i > prev + 1) {
      const double a = out[static_cast<size_t>(prev)];
      const double b = out[static_cast<size_t>(i)];
      for (int j = prev + 1; j < i; ++j)
        out[static_cast<size_t>(j)] = a + (b - a) * (j - prev) / static_cast<double>(i - prev);
    }
    prev = i;
  }
  return out;
}

std::vector<double> smooth_signal(const std::vector<double>& values, int window) {
  if (window < 1 || window % 2 == 0)
    throw InvalidConfig("smoothing window must be odd and >= 1");
  const int n = static_cast<int>(values.size());
  const int half = window / 2;
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    double acc = 0.0;
    for (int j = lo; j <= hi; ++j) acc += values[static_cast<size_t>(j)];
    out[static_cast<size_t>(i)] = acc / (hi - lo + 1);
  }
  return out;
}

std::vector<int> detect_local_minima(const AspectSignal& signal, int smooth_window) {
  int valid_count = 0;
  for (bool v : signal.valid) valid_count += v ? 1 : 0;
  if (valid_count < 3) throw SignalTooShort("need >= 3 valid frames, have " +
                                            std::to_string(valid_count));
  const std::vector<double> filled = interpolate_invalid(signal);
  const std::vector<double> smoothed = smooth_signal(filled, smooth_window);

  std::vector<int> minima;
  const int n = static_cast<int>(smoothed.size());
  for (int i = 1; i < n - 1; ++i) {
    if (!(smoothed[static_cast<size_t>(i)] < smoothed[static_cast<size_t>(i - 1)])) continue;
    // ride out a plateau to the right; the leftmost index reports the minimum
    int j = i;
    while (j + 1 < n &&
           smoothed[static_cast<size_t>(j + 1)] == smoothed[static_cast<size_t>(i)])
      ++j;
    if (j + 1 < n && smoothed[static_cast<size_t>(j + 1)] > smoothed[static_cast<size_t>(i)])
      minima.push_back(i);
    i = j;
  }
  return minima;
}

std::vector<int> cycle_sample_indices(int start_frame, int end_frame, int frame_count) {
  if (frame_count < 2) throw InvalidConfig("cycle resampling needs frame_count >= 2");
  if (end_frame <= start_frame) throw NoCycleFound("cycle span is empty");
  std::vector<int> indices(static_cast<size_t>(frame_count));
  const double step = static_cast<double>(end_frame - start_frame) / (frame_count - 1);
  for (int j = 0; j < frame_count; ++j) {
    const long long idx = std::llround(start_frame + j * step);
    indices[static_cast<size_t>(j)] =
        static_cast<int>(std::clamp<long long>(idx, start_frame, end_frame));
  }
  return indices;
}

GaitCycle extract_gait_cycle(const std::vector<GrayscaleFrame>& frames,
                             const std::vector<int>& minima, int frame_count) {
  if (minima.size() < 3)
    throw NoCycleFound("need 3 local minima, have " + std::to_string(minima.size()));
  const int start = minima[0];
  const int end = minima[2];
  if (start < 0 || end >= static_cast<int>(frames.size()) || start >= end)
    throw NoCycleFound("cycle span [" + std::to_string(start) + "," + std::to_string(end) +
                       "] outside sequence of " + std::to_string(frames.size()) + " frames");

  GaitCycle cycle;
  cycle.start_frame = start;
  cycle.end_frame = end;
  std::vector<GrayscaleFrame> sampled;
  sampled.reserve(static_cast<size_t>(frame_count));
  for (int idx : cycle_sample_indices(start, end, frame_count))
    sampled.push_back(frames[static_cast<size_t>(idx)]);
  cycle.clip = clip_from_frames(sampled);
  return cycle;
}

void dump_signal_csv(const std::string& path, const AspectSignal& signal, int smooth_window) {
  std::ofstream out(path);
  if (!out) throw UnwritableOutput("cannot open " + path);
  const std::vector<double> filled = interpolate_invalid(signal);
  const std::vector<double> smoothed = smooth_signal(filled, smooth_window);
  std::vector<int> minima;
  try {
    minima = detect_local_minima(signal, smooth_window);
  } catch (const SignalTooShort&) {
    // dump proceeds with no minima marked
  }
  out << "frame_index,raw,smoothed,is_minimum\n";
  for (size_t i = 0; i < signal.size(); ++i) {
    const bool is_min =
        std::find(minima.begin(), minima.end(), static_cast<int>(i)) != minima.end();
    out << i << "," << signal.values[i] << "," << smoothed[i] << "," << (is_min ? 1 : 0)
        << "\n";
  }
}

}  // namespace gaitface
