#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "gaitface/errors.hpp"
#include "gaitface/face_crop.hpp"
#include "gaitface/keypoints.hpp"

using namespace gaitface;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

ImageU8 gradient_image(int w, int h) {
  ImageU8 img;
  img.width = w;
  img.height = h;
  img.rgb.resize(static_cast<size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const size_t i = 3 * (static_cast<size_t>(y) * w + x);
      img.rgb[i] = static_cast<std::uint8_t>(x % 256);
      img.rgb[i + 1] = static_cast<std::uint8_t>(y % 256);
      img.rgb[i + 2] = 100;
    }
  return img;
}

PoseKeypoints face_at(double nose_x, double nose_y, double eye_half_dist,
                      double visibility = 0.9) {
  PoseKeypoints kp;
  for (auto& lm : kp.points) lm = {nose_x, nose_y + 20.0, 0.8};
  kp.points[PoseKeypoints::kNose] = {nose_x, nose_y, visibility};
  kp.points[PoseKeypoints::kLeftEye] = {nose_x - eye_half_dist, nose_y - 2.0, visibility};
  kp.points[PoseKeypoints::kRightEye] = {nose_x + eye_half_dist, nose_y - 2.0, visibility};
  return kp;
}

std::string write_sidecar(const fs::path& path, int frames) {
  std::ofstream out(path);
  for (int f = 0; f < frames; ++f) {
    json line;
    line["frame"] = f;
    json arr = json::array();
    for (int i = 0; i < 33; ++i) arr.push_back({50.0 + f, 40.0 + i * 0.1, 0.9});
    line["landmarks"] = arr;
    out << line.dump() << "\n";
  }
  return path.string();
}

}  // namespace

TEST_CASE("file provider serves frames in tracking order") {
  const fs::path dir = fs::temp_directory_path() / "gaitface_kp_test";
  fs::create_directories(dir);
  const std::string sidecar = write_sidecar(dir / "seq.jsonl", 8);
  FileKeypointProvider provider(sidecar);
  CHECK(provider.frame_count() == 8);

  ImageU8 img = gradient_image(128, 96);
  VideoFrame vf{&img, "frame0.png", 0};

  // detector pass: no prior -> frame 0
  PoseKeypoints kp0 = provider.provide(vf, std::nullopt);
  CHECK(kp0.frame_index == 0);
  CHECK(kp0.points[0].x == doctest::Approx(50.0));

  // tracking pass: prior from frame 4 -> frame 5
  PoseKeypoints kp4 = kp0;
  kp4.frame_index = 4;
  PoseKeypoints kp5 = provider.provide(vf, kp4);
  CHECK(kp5.frame_index == 5);
  CHECK(kp5.points[0].x == doctest::Approx(55.0));

  // missing frame -> NoPersonFound
  PoseKeypoints kp7 = kp0;
  kp7.frame_index = 7;
  CHECK_THROWS_AS(provider.provide(vf, kp7), NoPersonFound);
  fs::remove_all(dir);
}

TEST_CASE("keypoints are clamped into the frame") {
  const fs::path dir = fs::temp_directory_path() / "gaitface_kp_clamp";
  fs::create_directories(dir);
  std::ofstream out(dir / "seq.jsonl");
  json line;
  line["frame"] = 0;
  json arr = json::array();
  for (int i = 0; i < 33; ++i) arr.push_back({-5.0, 500.0, 0.9});
  line["landmarks"] = arr;
  out << line.dump() << "\n";
  out.close();

  FileKeypointProvider provider((dir / "seq.jsonl").string());
  ImageU8 img = gradient_image(64, 48);
  PoseKeypoints kp = provider.provide({&img, "f.png", 0}, std::nullopt);
  for (const auto& lm : kp.points) {
    CHECK(lm.x >= 0.0);
    CHECK(lm.y <= 48.0);
  }
  fs::remove_all(dir);
}

TEST_CASE("crop box follows the documented geometry") {
  ImageU8 img = gradient_image(128, 96);
  FaceCropOptions opts;
  opts.scale = 3.0;
  opts.target_h = 16;
  opts.target_w = 16;

  // nose (64,32), eyes 10 apart -> side 30 -> box (49,17)-(79,47)
  PoseKeypoints kp = face_at(64, 32, 5);
  kp.points[PoseKeypoints::kLeftEye] = {59, 30, 0.9};
  kp.points[PoseKeypoints::kRightEye] = {69, 30, 0.9};
  FaceCrop crop = crop_face(img, kp, opts);
  CHECK(crop.box == std::array<int, 4>{49, 17, 79, 47});
  CHECK(crop.image.pixels.rows() == 16);
  CHECK(crop.image.pixels.cols() == 16);
}

TEST_CASE("crop near the frame edge clamps but stays non-degenerate") {
  ImageU8 img = gradient_image(128, 96);
  FaceCropOptions opts;
  opts.scale = 3.0;
  opts.target_h = 8;
  opts.target_w = 8;
  PoseKeypoints kp = face_at(2, 2, 5);
  kp.points[PoseKeypoints::kLeftEye] = {0, 1, 0.9};
  kp.points[PoseKeypoints::kRightEye] = {10, 1, 0.9};
  FaceCrop crop = crop_face(img, kp, opts);
  CHECK(crop.box[0] == 0);
  CHECK(crop.box[1] == 0);
  CHECK(crop.box[2] > crop.box[0]);
  CHECK(crop.box[3] > crop.box[1]);
  CHECK(crop.box[2] <= img.width);
  CHECK(crop.box[3] <= img.height);
}

TEST_CASE("low-visibility keypoints refuse a crop") {
  ImageU8 img = gradient_image(64, 64);
  FaceCropOptions opts;
  opts.visibility_threshold = 0.5;
  PoseKeypoints kp = face_at(32, 32, 5, /*visibility=*/0.1);
  CHECK_THROWS_AS(crop_face(img, kp, opts), FaceNotVisible);
}

TEST_CASE("crop box is square before clamping and scales linearly") {
  ImageU8 img = gradient_image(512, 512);
  FaceCropOptions opts;
  opts.target_h = 8;
  opts.target_w = 8;
  PoseKeypoints kp = face_at(256, 256, 10);  // eye distance 20

  opts.scale = 2.0;
  FaceCrop small = crop_face(img, kp, opts);
  CHECK(small.box[2] - small.box[0] == small.box[3] - small.box[1]);
  CHECK(small.box[2] - small.box[0] == 40);

  opts.scale = 4.0;  // doubling scale doubles the side
  FaceCrop big = crop_face(img, kp, opts);
  CHECK(big.box[2] - big.box[0] == 80);
}

namespace {

// provider with per-frame visibility control for fill-rule tests
class ScriptedProvider : public KeypointProvider {
 public:
  explicit ScriptedProvider(std::vector<double> visibility)
      : visibility_(std::move(visibility)) {}
  PoseKeypoints provide(const VideoFrame& frame,
                        const std::optional<PoseKeypoints>& prior) override {
    const int index = prior ? prior->frame_index + 1 : 0;
    PoseKeypoints kp = face_at(32, 24, 5, visibility_[static_cast<size_t>(index)]);
    kp.frame_index = index;
    return kp;
  }

 private:
  std::vector<double> visibility_;
};

LoadedSequence tiny_sequence(int frames) {
  LoadedSequence seq;
  for (int f = 0; f < frames; ++f) {
    seq.rgb_frames.push_back(gradient_image(64, 48));
    // brightness varies per frame so crops are distinguishable
    for (auto& v : seq.rgb_frames.back().rgb)
      v = static_cast<std::uint8_t>(std::min(255, v + f));
    seq.record.rgb_paths.push_back("frame" + std::to_string(f) + ".png");
    seq.record.mask_paths.push_back("mask" + std::to_string(f) + ".png");
  }
  return seq;
}

}  // namespace

TEST_CASE("face clip holds the last crop over failures") {
  LoadedSequence seq = tiny_sequence(8);
  FaceCropOptions opts;
  opts.target_h = 8;
  opts.target_w = 8;

  // frames 0-2 invisible, 3+ visible; cycle [0,7], L=8 samples each frame
  ScriptedProvider provider({0.1, 0.1, 0.1, 0.9, 0.9, 0.9, 0.9, 0.9});
  ClipTensor clip = build_face_clip(seq, 0, 7, 8, provider, opts);
  CHECK(clip.frames == 8);
  // leading failures take frame 3's crop
  for (int f : {0, 1, 2})
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) CHECK(clip.at(f, y, x) == clip.at(3, y, x));
  // a later visible frame differs from frame 3's crop
  bool any_diff = false;
  for (int y = 0; y < 8 && !any_diff; ++y)
    for (int x = 0; x < 8 && !any_diff; ++x)
      any_diff = clip.at(7, y, x) != clip.at(3, y, x);
  CHECK(any_diff);
}

TEST_CASE("face clip with zero successes reports NoFaceInClip") {
  LoadedSequence seq = tiny_sequence(6);
  FaceCropOptions opts;
  ScriptedProvider provider(std::vector<double>(6, 0.0));
  CHECK_THROWS_AS(build_face_clip(seq, 0, 5, 6, provider, opts), NoFaceInClip);
}

TEST_CASE("face clip always has exactly L frames") {
  LoadedSequence seq = tiny_sequence(12);
  FaceCropOptions opts;
  opts.target_h = 8;
  opts.target_w = 8;
  ScriptedProvider provider(
      {0.9, 0.0, 0.9, 0.0, 0.9, 0.9, 0.0, 0.9, 0.9, 0.0, 0.9, 0.9});
  for (int l : {2, 5, 9}) {
    ClipTensor clip = build_face_clip(seq, 1, 10, l, provider, opts);
    CHECK(clip.frames == l);
  }
}
