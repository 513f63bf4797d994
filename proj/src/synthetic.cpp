#include "gaitface/synthetic.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "gaitface/errors.hpp"
#include "gaitface/params.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gaitface {

namespace {

constexpr double kMean = 0.449;
constexpr double kStd = 0.226;

double norm_bg() { return (0.0 - kMean) / kStd; }
double norm_fg() { return (1.0 - kMean) / kStd; }

Angle angle_for_sequence(int seq) {
  switch (seq % 3) {
    case 0: return Angle::deg0;
    case 1: return Angle::deg45;
    default: return Angle::deg90;
  }
}

ClipTensor noise_clip(int frames, int h, int w, std::mt19937_64& rng) {
  ClipTensor clip(frames, h, w);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (double& v : clip.data) v = dist(rng);
  return clip;
}

// Walker silhouette whose leg spread oscillates over the cycle, plus a
// class-coded stripe row.
ClipTensor gait_clip(int cls, int frames, int h, int w, double phase, double noise,
                     std::mt19937_64& rng) {
  ClipTensor clip(frames, h, w);
  std::normal_distribution<double> jitter(0.0, noise);
  const double bg = norm_bg(), fg = norm_fg();
  const int torso_top = h / 6;
  const int hip = 2 * h / 3;
  const int cx = w / 2;
  const int torso_half = std::max(1, w / 10);
  const int stripe_row = 1 + cls % std::max(1, h / 3);
  for (int f = 0; f < frames; ++f) {
    const double cycle_pos = std::sin(2.0 * M_PI * f / frames + phase);
    const int spread = 1 + static_cast<int>(std::lround(std::abs(cycle_pos) * (w / 4 - 1)));
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        bool on = false;
        if (y >= torso_top && y < hip && std::abs(x - cx) <= torso_half) on = true;
        if (y >= hip) {
          const double t = static_cast<double>(y - hip) / std::max(1, h - 1 - hip);
          const int off = static_cast<int>(std::lround(t * spread));
          if (std::abs(x - (cx - off)) <= 0 || std::abs(x - (cx + off)) <= 0) on = true;
        }
        if (y == stripe_row && x >= 2 && x < w - 2) on = true;
        clip.at(f, y, x) = (on ? fg : bg) + jitter(rng);
      }
    }
  }
  return clip;
}

// Bright class-coded patch over a weak grating.
ClipTensor face_clip(int cls, int frames, int h, int w, double noise,
                     std::mt19937_64& rng) {
  ClipTensor clip(frames, h, w);
  std::normal_distribution<double> jitter(0.0, noise);
  const double bg = norm_bg(), fg = norm_fg();
  const int patch = std::max(2, h / 5);
  const int py = 1 + (cls * 2) % std::max(1, h - patch - 1);
  const int px = 1 + (cls * 3) % std::max(1, w - patch - 1);
  const double freq = 2.0 * M_PI * (1.0 + cls) / w;
  for (int f = 0; f < frames; ++f) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double v = bg + 0.3 * (fg - bg) * (0.5 + 0.5 * std::cos(freq * x));
        if (y >= py && y < py + patch && x >= px && x < px + patch) v = fg;
        clip.at(f, y, x) = v + jitter(rng);
      }
    }
  }
  return clip;
}

}  // namespace

std::pair<std::vector<Sample>, std::vector<Sample>> make_synthetic_clips(
    const SyntheticSpec& spec) {
  if (spec.classes < 2 || spec.sequences_per_class < 2)
    throw InvalidConfig("synthetic spec needs >= 2 classes and >= 2 sequences per class");
  std::vector<Sample> train, test;
  for (int cls = 0; cls < spec.classes; ++cls) {
    for (int seq = 0; seq < spec.sequences_per_class; ++seq) {
      std::mt19937_64 rng(
          derive_seed(spec.seed, "c" + std::to_string(cls) + "_q" + std::to_string(seq)));
      std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * M_PI);
      const double phase = phase_dist(rng);
      Sample sample;
      sample.label = cls;
      sample.angle = angle_for_sequence(seq);
      sample.sequence_index = seq % 4;
      sample.tag = "synth_c" + std::to_string(cls) + "_q" + std::to_string(seq);
      sample.gait = gait_clip(cls, spec.frames, spec.height, spec.width, phase, spec.noise, rng);
      sample.face = face_clip(cls, spec.frames, spec.height, spec.width, spec.noise, rng);
      if (spec.corrupt_by_angle) {
        if (sample.angle == Angle::deg0) sample.face = noise_clip(spec.frames, spec.height,
                                                                  spec.width, rng);
        if (sample.angle == Angle::deg90) sample.gait = noise_clip(spec.frames, spec.height,
                                                                   spec.width, rng);
      }
      (seq % 2 == 0 ? train : test).push_back(std::move(sample));
    }
  }
  return {train, test};
}

// ---------------------------------------------------------------------------
// on-disk dataset
// ---------------------------------------------------------------------------

namespace {

struct Scene {
  Mask mask;
  ImageU8 rgb;
  double nose_x = 0.0, nose_y = 0.0, eye_dx = 0.0;
};

// One rendered frame: walking silhouette plus an RGB view with a textured
// head the face pipeline can crop.
Scene render_scene(int cls, int frame, const SyntheticDatasetSpec& spec, double phase) {
  const int h = spec.image_h, w = spec.image_w;
  Scene scene;
  scene.mask.width = w;
  scene.mask.height = h;
  scene.mask.data.assign(static_cast<size_t>(w) * h, 0);
  scene.rgb.width = w;
  scene.rgb.height = h;
  scene.rgb.rgb.assign(static_cast<size_t>(w) * h * 3, 40);  // dim background

  const int cx = w / 2 + static_cast<int>(3.0 * std::sin(0.13 * frame));
  const int head_r = std::max(3, h / 10);
  const int head_cy = h / 6;
  const int torso_top = head_cy + head_r;
  const int hip = 2 * h / 3;
  const int torso_half = std::max(2, w / 12 + cls % 3);
  const double cycle = std::sin(2.0 * M_PI * frame / spec.gait_period + phase);
  const int spread = 1 + static_cast<int>(std::lround(std::abs(cycle) * (w / 5.0)));

  auto put_mask = [&](int y, int x) {
    if (y >= 0 && y < h && x >= 0 && x < w)
      scene.mask.data[static_cast<size_t>(y) * w + x] = 255;
  };
  auto put_rgb = [&](int y, int x, int r, int g, int b) {
    if (y < 0 || y >= h || x < 0 || x >= w) return;
    const size_t i = 3 * (static_cast<size_t>(y) * w + x);
    scene.rgb.rgb[i] = static_cast<std::uint8_t>(r);
    scene.rgb.rgb[i + 1] = static_cast<std::uint8_t>(g);
    scene.rgb.rgb[i + 2] = static_cast<std::uint8_t>(b);
  };

  // head
  for (int y = head_cy - head_r; y <= head_cy + head_r; ++y) {
    for (int x = cx - head_r; x <= cx + head_r; ++x) {
      const double dy = y - head_cy, dx = x - cx;
      if (dy * dy + dx * dx > head_r * head_r) continue;
      put_mask(y, x);
      // class-coded face texture: brightness bands
      const int band = 120 + 90 * (((y - head_cy + 64) / (1 + cls % 3)) % 2);
      put_rgb(y, x, band, band - 20, band - 40);
    }
  }
  // torso
  for (int y = torso_top; y < hip; ++y)
    for (int x = cx - torso_half; x <= cx + torso_half; ++x) {
      put_mask(y, x);
      put_rgb(y, x, 70, 70 + 30 * (cls % 2), 90);
    }
  // legs
  for (int y = hip; y < h - 1; ++y) {
    const double t = static_cast<double>(y - hip) / std::max(1, h - 1 - hip);
    const int off = static_cast<int>(std::lround(t * spread));
    for (int leg : {cx - off, cx + off}) {
      for (int x = leg - 1; x <= leg + 1; ++x) {
        put_mask(y, x);
        put_rgb(y, x, 60, 60, 60);
      }
    }
  }

  scene.nose_x = cx;
  scene.nose_y = head_cy;
  scene.eye_dx = head_r * 0.45;
  return scene;
}

json landmarks_json(const Scene& scene) {
  json arr = json::array();
  for (int i = 0; i < 33; ++i) {
    double x = scene.nose_x, y = scene.nose_y, vis = 0.9;
    switch (i) {
      case 0: break;                                   // nose
      case 2: x -= scene.eye_dx; y -= 1.0; break;      // left eye
      case 5: x += scene.eye_dx; y -= 1.0; break;      // right eye
      case 7: x -= 2.0 * scene.eye_dx; break;          // left ear
      case 8: x += 2.0 * scene.eye_dx; break;          // right ear
      default:
        y += 4.0 + i;  // body landmarks, below the head
        vis = 0.8;
        break;
    }
    arr.push_back({x, y, vis});
  }
  return arr;
}

}  // namespace

std::string write_synthetic_dataset(const std::string& dir,
                                    const SyntheticDatasetSpec& spec) {
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "keypoints", ec);
  if (ec) throw UnwritableOutput("cannot create " + dir);

  json manifest;
  manifest["root"] = ".";
  json subjects = json::array();

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * M_PI);

  for (int cls = 0; cls < spec.classes; ++cls) {
    json subject;
    subject["id"] = cls;
    subject["name"] = "subject" + std::to_string(cls);
    json sequences = json::array();
    for (int deg : {0, 45, 90}) {
      for (int idx = 0; idx < 4; ++idx) {
        SequenceRecord rec;
        rec.subject_id = cls;
        rec.angle = angle_from_degrees(deg);
        rec.sequence_index = idx;
        const std::string tag = rec.tag();
        const fs::path rgb_dir = fs::path(dir) / "rgb" / tag;
        const fs::path mask_dir = fs::path(dir) / "mask" / tag;
        fs::create_directories(rgb_dir);
        fs::create_directories(mask_dir);

        const double phase = phase_dist(rng);
        std::ofstream sidecar(fs::path(dir) / "keypoints" / (tag + ".jsonl"));
        if (!sidecar) throw UnwritableOutput("cannot write keypoint sidecar for " + tag);

        json rgb_list = json::array();
        json mask_list = json::array();
        for (int f = 0; f < spec.frames_per_sequence; ++f) {
          const Scene scene = render_scene(cls, f, spec, phase);
          char name[32];
          std::snprintf(name, sizeof(name), "f%04d.png", f);
          save_image((rgb_dir / name).string(), scene.rgb);
          save_mask((mask_dir / name).string(), scene.mask);
          rgb_list.push_back(("rgb" / fs::path(tag) / name).generic_string());
          mask_list.push_back(("mask" / fs::path(tag) / name).generic_string());
          json line;
          line["frame"] = f;
          line["landmarks"] = landmarks_json(scene);
          sidecar << line.dump() << "\n";
        }
        json jq;
        jq["angle"] = deg;
        jq["index"] = idx;
        jq["rgb"] = rgb_list;
        jq["mask"] = mask_list;
        sequences.push_back(jq);
      }
    }
    subject["sequences"] = sequences;
    subjects.push_back(subject);
  }
  manifest["subjects"] = subjects;

  const std::string manifest_path = (fs::path(dir) / "manifest.json").string();
  std::ofstream out(manifest_path);
  if (!out) throw UnwritableOutput("cannot write manifest " + manifest_path);
  out << manifest.dump(2) << "\n";
  return manifest_path;
}

}  // namespace gaitface
