#include "gaitface/keypoints.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gaitface/errors.hpp"

using nlohmann::json;

namespace gaitface {

namespace {

PoseKeypoints parse_landmarks(const json& landmarks, int frame_index) {
  if (!landmarks.is_array() || landmarks.size() != PoseKeypoints::kCount)
    throw SchemaViolation("keypoint record needs exactly " +
                          std::to_string(PoseKeypoints::kCount) + " landmarks");
  PoseKeypoints kp;
  kp.frame_index = frame_index;
  for (int i = 0; i < PoseKeypoints::kCount; ++i) {
    const auto& lm = landmarks[static_cast<size_t>(i)];
    if (!lm.is_array() || lm.size() != 3)
      throw SchemaViolation("landmark must be [x, y, visibility]");
    kp.points[static_cast<size_t>(i)] = {lm[0].get<double>(), lm[1].get<double>(),
                                         lm[2].get<double>()};
  }
  return kp;
}

}  // namespace

void clamp_keypoints(PoseKeypoints& kp, int width, int height) {
  for (Landmark& lm : kp.points) {
    lm.x = std::clamp(lm.x, 0.0, static_cast<double>(width));
    lm.y = std::clamp(lm.y, 0.0, static_cast<double>(height));
  }
}

FileKeypointProvider::FileKeypointProvider(const std::string& sidecar_path) {
  std::ifstream in(sidecar_path);
  if (!in) throw MissingFile("keypoint sidecar " + sidecar_path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaViolation(sidecar_path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!rec.contains("frame") || !rec["frame"].is_number_integer())
      throw SchemaViolation(sidecar_path + ":" + std::to_string(lineno) +
                            ": missing integer 'frame'");
    const int frame = rec["frame"].get<int>();
    by_frame_[frame] = parse_landmarks(rec["landmarks"], frame);
  }
}

PoseKeypoints FileKeypointProvider::provide(const VideoFrame& frame,
                                            const std::optional<PoseKeypoints>& prior) {
  const int wanted = prior ? prior->frame_index + 1 : 0;
  auto it = by_frame_.find(wanted);
  if (it == by_frame_.end())
    throw NoPersonFound("no keypoint record for frame " + std::to_string(wanted));
  PoseKeypoints kp = it->second;
  if (frame.image != nullptr && !frame.image->empty())
    clamp_keypoints(kp, frame.image->width, frame.image->height);
  return kp;
}

ExternalProcessProvider::ExternalProcessProvider(std::string command, double roi_margin)
    : command_(std::move(command)), roi_margin_(roi_margin) {
  if (command_.empty()) throw InvalidConfig("external keypoint command is empty");
}

PoseKeypoints ExternalProcessProvider::provide(const VideoFrame& frame,
                                               const std::optional<PoseKeypoints>& prior) {
  std::ostringstream cmd;
  cmd << command_ << " '" << frame.path << "'";
  if (prior) {
    double x0 = 1e30, y0 = 1e30, x1 = -1e30, y1 = -1e30;
    for (const Landmark& lm : prior->points) {
      x0 = std::min(x0, lm.x);
      y0 = std::min(y0, lm.y);
      x1 = std::max(x1, lm.x);
      y1 = std::max(y1, lm.y);
    }
    const double mx = (x1 - x0) * roi_margin_;
    const double my = (y1 - y0) * roi_margin_;
    cmd << " " << x0 - mx << " " << y0 - my << " " << x1 + mx << " " << y1 + my;
  }

  FILE* pipe = popen(cmd.str().c_str(), "r");
  if (!pipe) throw NoPersonFound("cannot launch keypoint process");
  std::string output;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof(buf), pipe)) output.append(buf, n);
  const int status = pclose(pipe);
  if (status != 0) throw NoPersonFound("keypoint process exited with status " +
                                       std::to_string(status));
  json rec;
  try {
    rec = json::parse(output);
  } catch (const json::exception&) {
    throw NoPersonFound("keypoint process produced no parseable output");
  }
  if (!rec.contains("landmarks")) throw NoPersonFound("keypoint process reported no pose");
  const int index = prior ? prior->frame_index + 1 : 0;
  PoseKeypoints kp = parse_landmarks(rec["landmarks"], index);
  if (frame.image != nullptr && !frame.image->empty())
    clamp_keypoints(kp, frame.image->width, frame.image->height);
  return kp;
}

}  // namespace gaitface
