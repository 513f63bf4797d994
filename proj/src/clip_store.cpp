#include "gaitface/clip_store.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "gaitface/errors.hpp"
#include "gaitface/npy.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gaitface {

namespace {

NpyArray clip_to_npy(const ClipTensor& clip) {
  NpyArray a;
  a.shape = {clip.frames, clip.height, clip.width};
  a.data = clip.data;
  return a;
}

ClipTensor npy_to_clip(const NpyArray& a) {
  if (a.shape.size() != 3) throw SchemaViolation("clip arrays must be rank 3");
  ClipTensor clip(static_cast<int>(a.shape[0]), static_cast<int>(a.shape[1]),
                  static_cast<int>(a.shape[2]));
  clip.data = a.data;
  return clip;
}

}  // namespace

void write_store_entry(const std::string& dir, const StoreEntry& entry,
                       const ClipTensor& gait, const ClipTensor& face) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UnwritableOutput("cannot create store dir " + dir);
  save_npy((fs::path(dir) / (entry.tag + "_gait.npy")).string(), clip_to_npy(gait));
  save_npy((fs::path(dir) / (entry.tag + "_face.npy")).string(), clip_to_npy(face));
  json meta;
  meta["tag"] = entry.tag;
  meta["subject_id"] = entry.subject_id;
  meta["angle"] = entry.angle_degrees;
  meta["sequence_index"] = entry.sequence_index;
  meta["cycle"] = {{"start", entry.cycle_start}, {"end", entry.cycle_end}};
  std::ofstream out(fs::path(dir) / (entry.tag + ".json"));
  if (!out) throw UnwritableOutput("cannot write store metadata for " + entry.tag);
  out << meta.dump(2) << "\n";
}

void write_store_index(const std::string& dir, int class_count,
                       const std::vector<StoreEntry>& entries) {
  json index;
  index["format"] = "gaitface-clip-store";
  index["class_count"] = class_count;
  json tags = json::array();
  for (const auto& e : entries) tags.push_back(e.tag);
  index["entries"] = tags;
  std::ofstream out(fs::path(dir) / "store.json");
  if (!out) throw UnwritableOutput("cannot write store index in " + dir);
  out << index.dump(2) << "\n";
}

ClipStore ClipStore::open(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "store.json");
  if (!in) throw MissingFile("clip store index " + dir + "/store.json");
  json index;
  try {
    in >> index;
  } catch (const json::exception& e) {
    throw SchemaViolation("store index parse error: " + std::string(e.what()));
  }
  if (index.value("format", "") != "gaitface-clip-store")
    throw SchemaViolation("not a clip store: " + dir);

  ClipStore store;
  store.dir = dir;
  store.class_count = index.at("class_count").get<int>();
  for (const auto& jtag : index.at("entries")) {
    const std::string tag = jtag.get<std::string>();
    std::ifstream min(fs::path(dir) / (tag + ".json"));
    if (!min) throw MissingFile("store metadata " + tag + ".json");
    json meta;
    min >> meta;
    StoreEntry entry;
    entry.tag = tag;
    entry.subject_id = meta.at("subject_id").get<int>();
    entry.angle_degrees = meta.at("angle").get<int>();
    entry.sequence_index = meta.at("sequence_index").get<int>();
    entry.cycle_start = meta.at("cycle").at("start").get<int>();
    entry.cycle_end = meta.at("cycle").at("end").get<int>();
    store.entries.push_back(std::move(entry));
  }
  return store;
}

Sample ClipStore::load_sample(const StoreEntry& entry) const {
  Sample sample;
  sample.gait = npy_to_clip(load_npy((fs::path(dir) / (entry.tag + "_gait.npy")).string()));
  sample.face = npy_to_clip(load_npy((fs::path(dir) / (entry.tag + "_face.npy")).string()));
  sample.label = entry.subject_id;
  sample.angle = angle_from_degrees(entry.angle_degrees);
  sample.sequence_index = entry.sequence_index;
  sample.tag = entry.tag;
  return sample;
}

std::vector<Sample> ClipStore::load_all() const {
  std::vector<Sample> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(load_sample(e));
  return out;
}

std::pair<std::vector<Sample>, std::vector<Sample>> ClipStore::load_split() const {
  std::vector<Sample> train, test;
  for (const auto& e : entries) {
    Sample s = load_sample(e);
    if (e.sequence_index < 2)
      train.push_back(std::move(s));
    else
      test.push_back(std::move(s));
  }
  return {train, test};
}

}  // namespace gaitface
