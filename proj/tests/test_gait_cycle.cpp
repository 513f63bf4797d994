#include <doctest.h>

#include <cmath>
#include <random>

#include "gaitface/errors.hpp"
#include "gaitface/gait_cycle.hpp"

using namespace gaitface;

namespace {

Mask box_mask(int w, int h, int x0, int y0, int box_w, int box_h) {
  Mask m;
  m.width = w;
  m.height = h;
  m.data.assign(static_cast<size_t>(w) * h, 0);
  for (int y = y0; y < y0 + box_h; ++y)
    for (int x = x0; x < x0 + box_w; ++x) m.data[static_cast<size_t>(y) * w + x] = 255;
  return m;
}

AspectSignal signal_from(const std::vector<double>& values) {
  AspectSignal s;
  s.values = values;
  s.valid.assign(values.size(), true);
  return s;
}

// independent oracle: exhaustive scan for strict local minima
std::vector<int> brute_force_minima(const std::vector<double>& v) {
  std::vector<int> out;
  for (int i = 1; i + 1 < static_cast<int>(v.size()); ++i)
    if (v[i] < v[i - 1] && v[i] < v[i + 1]) out.push_back(i);
  return out;
}

}  // namespace

TEST_CASE("aspect ratio of simple boxes") {
  // 10 wide x 20 tall -> 2.0
  std::vector<Mask> masks{box_mask(40, 40, 5, 5, 10, 20)};
  AspectSignal s = aspect_ratio_signal(masks);
  CHECK(s.values[0] == doctest::Approx(2.0));
  CHECK(s.valid[0]);

  // all-background -> invalid
  masks = {box_mask(8, 8, 0, 0, 0, 0)};
  s = aspect_ratio_signal(masks);
  CHECK_FALSE(s.valid[0]);

  // single pixel -> 1.0
  masks = {box_mask(8, 8, 3, 3, 1, 1)};
  s = aspect_ratio_signal(masks);
  CHECK(s.values[0] == doctest::Approx(1.0));
}

TEST_CASE("aspect ratio is translation invariant") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> size_dist(2, 10);
  for (int i = 0; i < 30; ++i) {
    const int bw = size_dist(rng), bh = size_dist(rng);
    std::uniform_int_distribution<int> xd(0, 30 - bw), yd(0, 30 - bh);
    const int x1 = xd(rng), y1 = yd(rng), x2 = xd(rng), y2 = yd(rng);
    AspectSignal a = aspect_ratio_signal({box_mask(30, 30, x1, y1, bw, bh)});
    AspectSignal b = aspect_ratio_signal({box_mask(30, 30, x2, y2, bw, bh)});
    CHECK(a.values[0] == b.values[0]);
  }
}

TEST_CASE("aspect ratio is invariant to uniform scaling of analytic boxes") {
  for (int s = 1; s <= 4; ++s) {
    AspectSignal base = aspect_ratio_signal({box_mask(64, 64, 2, 2, 6, 9)});
    AspectSignal scaled = aspect_ratio_signal({box_mask(64, 64, 2, 2, 6 * s, 9 * s)});
    CHECK(base.values[0] == doctest::Approx(scaled.values[0]));
  }
}

TEST_CASE("strict local minima by inspection") {
  CHECK(detect_local_minima(signal_from({3, 1, 3, 1, 3}), 1) == std::vector<int>{1, 3});
  CHECK(detect_local_minima(signal_from({1, 2, 3, 4, 5}), 1).empty());
  // plateau reports the leftmost index
  CHECK(detect_local_minima(signal_from({3, 1, 1, 3, 4}), 1) == std::vector<int>{1});
}

TEST_CASE("minima detection rejects too-short or invalid-heavy signals") {
  AspectSignal s = signal_from({2.0, 1.0, 2.0});
  s.valid = {true, false, true};
  CHECK_THROWS_AS(detect_local_minima(s, 1), SignalTooShort);
  CHECK_THROWS_AS(detect_local_minima(signal_from({1, 2, 3}), 2), InvalidConfig);
}

TEST_CASE("invalid frames are linearly interpolated before smoothing") {
  AspectSignal s = signal_from({2.0, 0.0, 0.0, 5.0, 4.0});
  s.valid = {true, false, false, true, true};
  std::vector<double> filled = interpolate_invalid(s);
  CHECK(filled[1] == doctest::Approx(3.0));
  CHECK(filled[2] == doctest::Approx(4.0));
  // leading/trailing invalids take the nearest valid value
  AspectSignal edge = signal_from({0.0, 7.0, 0.0});
  edge.valid = {false, true, false};
  filled = interpolate_invalid(edge);
  CHECK(filled[0] == 7.0);
  CHECK(filled[2] == 7.0);
}

TEST_CASE("noiseless periodic signals give exactly period-spaced minima") {
  // minima placed on integer samples: 3 - cos has its minima at t = kP
  for (int period : {6, 10, 15}) {
    std::vector<double> values;
    for (int t = 0; t <= 4 * period; ++t)
      values.push_back(3.0 - std::cos(2.0 * M_PI * t / period));
    std::vector<int> minima = detect_local_minima(signal_from(values), 1);
    REQUIRE(minima.size() >= 3);
    for (size_t i = 1; i < minima.size(); ++i)
      CHECK(minima[i] - minima[i - 1] == period);
    CHECK(minima == brute_force_minima(values));
  }
}

TEST_CASE("smoothed sinusoid of period 10 keeps minima spaced 10 +- 1") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<double> values;
  for (int t = 0; t < 30; ++t)
    values.push_back(3.0 + std::cos(2.0 * M_PI * t / 10.0) + noise(rng));
  std::vector<int> minima = detect_local_minima(signal_from(values), 3);
  REQUIRE(minima.size() >= 2);
  for (size_t i = 1; i < minima.size(); ++i) {
    CHECK(minima[i] - minima[i - 1] >= 9);
    CHECK(minima[i] - minima[i - 1] <= 11);
  }
}

namespace {

std::vector<GrayscaleFrame> indexed_frames(int count) {
  std::vector<GrayscaleFrame> frames;
  for (int i = 0; i < count; ++i) {
    GrayscaleFrame f;
    f.pixels = Eigen::MatrixXd::Constant(4, 4, static_cast<double>(i));
    f.source_index = i;
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace

TEST_CASE("cycle grid matching the source spacing keeps every frame once") {
  std::vector<GrayscaleFrame> frames = indexed_frames(25);
  GaitCycle cycle = extract_gait_cycle(frames, {0, 10, 20}, 21);
  CHECK(cycle.start_frame == 0);
  CHECK(cycle.end_frame == 20);
  CHECK(cycle.clip.frames == 21);
  for (int j = 0; j < 21; ++j) CHECK(cycle.clip.at(j, 0, 0) == static_cast<double>(j));
}

TEST_CASE("resampling to L=24 stays within the cycle span") {
  std::vector<GrayscaleFrame> frames = indexed_frames(20);
  GaitCycle cycle = extract_gait_cycle(frames, {2, 9, 16}, 24);
  CHECK(cycle.clip.frames == 24);
  for (int j = 0; j < 24; ++j) {
    CHECK(cycle.clip.at(j, 0, 0) >= 2.0);
    CHECK(cycle.clip.at(j, 0, 0) <= 16.0);
  }
  // endpoints map to the span endpoints
  CHECK(cycle.clip.at(0, 0, 0) == 2.0);
  CHECK(cycle.clip.at(23, 0, 0) == 16.0);
}

TEST_CASE("fewer than three minima is no cycle") {
  std::vector<GrayscaleFrame> frames = indexed_frames(10);
  CHECK_THROWS_AS(extract_gait_cycle(frames, {5, 6}, 8), NoCycleFound);
}

TEST_CASE("sample indices are monotone and cover both endpoints") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> start_dist(0, 10), span_dist(4, 40), l_dist(2, 48);
  for (int i = 0; i < 100; ++i) {
    const int start = start_dist(rng);
    const int end = start + span_dist(rng);
    const int l = l_dist(rng);
    std::vector<int> idx = cycle_sample_indices(start, end, l);
    CHECK(static_cast<int>(idx.size()) == l);
    CHECK(idx.front() == start);
    CHECK(idx.back() == end);
    for (size_t j = 1; j < idx.size(); ++j) CHECK(idx[j] >= idx[j - 1]);
  }
}
