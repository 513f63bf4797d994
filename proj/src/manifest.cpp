#include "gaitface/manifest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "gaitface/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gaitface {

int angle_degrees(Angle angle) { return static_cast<int>(angle); }

Angle angle_from_degrees(int degrees) {
  switch (degrees) {
    case 0: return Angle::deg0;
    case 45: return Angle::deg45;
    case 90: return Angle::deg90;
    default:
      throw SchemaViolation("angle must be 0, 45 or 90, got " + std::to_string(degrees));
  }
}

std::string SequenceRecord::tag() const {
  return "s" + std::to_string(subject_id) + "_a" + std::to_string(angle_degrees(angle)) +
         "_i" + std::to_string(sequence_index);
}

int DatasetManifest::sequence_count() const {
  int n = 0;
  for (const auto& s : subjects) n += static_cast<int>(s.sequences.size());
  return n;
}

std::vector<SequenceRecord> DatasetManifest::all_sequences() const {
  std::vector<SequenceRecord> out;
  for (const auto& s : subjects)
    out.insert(out.end(), s.sequences.begin(), s.sequences.end());
  return out;
}

namespace {

std::string resolve_under(const fs::path& root, const std::string& rel) {
  fs::path p(rel);
  return (p.is_absolute() ? p : root / p).lexically_normal().string();
}

}  // namespace

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("manifest " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw SchemaViolation("manifest parse error: " + std::string(e.what()));
  }

  if (!doc.is_object() || !doc.contains("root") || !doc["root"].is_string())
    throw SchemaViolation("manifest field 'root' missing or not a string");
  if (!doc.contains("subjects") || !doc["subjects"].is_array())
    throw SchemaViolation("manifest field 'subjects' missing or not an array");
  if (doc["subjects"].empty()) throw SchemaViolation("manifest field 'subjects' is empty");

  const fs::path manifest_dir = fs::absolute(fs::path(path)).parent_path();
  fs::path root(doc["root"].get<std::string>());
  if (!root.is_absolute()) root = manifest_dir / root;

  DatasetManifest manifest;
  manifest.root = root.lexically_normal().string();

  std::set<int> seen_ids;
  for (const auto& js : doc["subjects"]) {
    if (!js.contains("id") || !js["id"].is_number_integer())
      throw SchemaViolation("subject field 'id' missing or not an integer");
    SubjectEntry subject;
    subject.id = js["id"].get<int>();
    subject.name = js.value("name", std::string{});
    if (!seen_ids.insert(subject.id).second)
      throw SchemaViolation("subject field 'id': duplicate value " +
                            std::to_string(subject.id));
    if (!js.contains("sequences") || !js["sequences"].is_array())
      throw SchemaViolation("subject field 'sequences' missing or not an array");

    for (const auto& jq : js["sequences"]) {
      SequenceRecord rec;
      rec.subject_id = subject.id;
      rec.subject_name = subject.name;
      if (!jq.contains("angle") || !jq["angle"].is_number_integer())
        throw SchemaViolation("sequence field 'angle' missing or not an integer");
      rec.angle = angle_from_degrees(jq["angle"].get<int>());
      if (!jq.contains("index") || !jq["index"].is_number_integer())
        throw SchemaViolation("sequence field 'index' missing or not an integer");
      rec.sequence_index = jq["index"].get<int>();
      if (rec.sequence_index < 0 || rec.sequence_index >= 4)
        throw SchemaViolation("sequence field 'index' must be in [0,4), got " +
                              std::to_string(rec.sequence_index));
      if (!jq.contains("rgb") || !jq["rgb"].is_array() || jq["rgb"].empty())
        throw SchemaViolation("sequence field 'rgb' missing, not an array, or empty");
      if (!jq.contains("mask") || !jq["mask"].is_array())
        throw SchemaViolation("sequence field 'mask' missing or not an array");
      if (jq["mask"].size() != jq["rgb"].size())
        throw SchemaViolation("sequence fields 'rgb' and 'mask' differ in length");

      for (const auto& jp : jq["rgb"])
        rec.rgb_paths.push_back(resolve_under(root, jp.get<std::string>()));
      for (const auto& jp : jq["mask"])
        rec.mask_paths.push_back(resolve_under(root, jp.get<std::string>()));
      subject.sequences.push_back(std::move(rec));
    }
    manifest.subjects.push_back(std::move(subject));
  }

  // IDs must form exactly [0, K)
  const int k = manifest.class_count();
  for (const auto& s : manifest.subjects)
    if (s.id < 0 || s.id >= k)
      throw SchemaViolation("subject field 'id': " + std::to_string(s.id) +
                            " outside [0," + std::to_string(k) + ")");

  std::sort(manifest.subjects.begin(), manifest.subjects.end(),
            [](const SubjectEntry& a, const SubjectEntry& b) { return a.id < b.id; });

  for (const auto& s : manifest.subjects) {
    for (const auto& rec : s.sequences) {
      for (const auto& p : rec.rgb_paths)
        if (!fs::exists(p)) throw DanglingFramePath(p);
      for (const auto& p : rec.mask_paths)
        if (!fs::exists(p)) throw DanglingFramePath(p);
    }
  }
  return manifest;
}

std::pair<std::vector<SequenceRecord>, std::vector<SequenceRecord>> split_sequences(
    const DatasetManifest& manifest) {
  std::map<std::pair<int, int>, std::vector<SequenceRecord>> groups;
  for (const auto& subject : manifest.subjects)
    for (const auto& rec : subject.sequences)
      groups[{rec.subject_id, angle_degrees(rec.angle)}].push_back(rec);

  std::vector<SequenceRecord> train, test;
  for (auto& [key, records] : groups) {
    if (records.size() != 4)
      throw GroupSizeMismatch("subject " + std::to_string(key.first) + " angle " +
                              std::to_string(key.second) + " has " +
                              std::to_string(records.size()) + " sequences, expected 4");
    std::sort(records.begin(), records.end(),
              [](const SequenceRecord& a, const SequenceRecord& b) {
                return a.sequence_index < b.sequence_index;
              });
    for (int i = 0; i < 4; ++i)
      if (records[static_cast<size_t>(i)].sequence_index != i)
        throw GroupSizeMismatch("subject " + std::to_string(key.first) + " angle " +
                                std::to_string(key.second) +
                                " does not have sequence indices 0..3");
    train.push_back(records[0]);
    train.push_back(records[1]);
    test.push_back(records[2]);
    test.push_back(records[3]);
  }
  return {train, test};
}

LoadedSequence load_frames(const SequenceRecord& record) {
  LoadedSequence seq;
  seq.record = record;
  for (const auto& p : record.rgb_paths) seq.rgb_frames.push_back(load_image(p));
  for (const auto& p : record.mask_paths) seq.silhouette_masks.push_back(load_mask(p));
  return seq;
}

}  // namespace gaitface
