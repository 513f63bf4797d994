#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gaitface/image.hpp"

namespace gaitface {

enum class Angle { deg0 = 0, deg45 = 45, deg90 = 90 };

int angle_degrees(Angle angle);
Angle angle_from_degrees(int degrees);  // throws SchemaViolation for other values

// One video sequence: metadata plus resolved frame paths. Pixels are loaded
// separately (load_frames) so splitting stays cheap.
struct SequenceRecord {
  int subject_id = 0;
  std::string subject_name;
  Angle angle = Angle::deg0;
  int sequence_index = 0;  // in [0, 4)
  std::vector<std::string> rgb_paths;
  std::vector<std::string> mask_paths;  // same length as rgb_paths

  // "s<ID>_a<DEG>_i<IDX>", used for clip-store and sidecar file names.
  std::string tag() const;
};

struct SubjectEntry {
  int id = 0;
  std::string name;
  std::vector<SequenceRecord> sequences;
};

struct DatasetManifest {
  std::string root;  // absolute after loading
  std::vector<SubjectEntry> subjects;

  int class_count() const { return static_cast<int>(subjects.size()); }
  int sequence_count() const;
  std::vector<SequenceRecord> all_sequences() const;
};

struct LoadedSequence {
  SequenceRecord record;
  std::vector<ImageU8> rgb_frames;
  std::vector<Mask> silhouette_masks;
};

// Parses and validates the JSON manifest. Relative root and frame paths are
// resolved against the manifest's directory; every frame path must exist.
DatasetManifest load_manifest(const std::string& path);

// Deterministic 2/2 split per (subject, angle) group: sequence indices 0 and 1
// train, 2 and 3 test. Every group present must contain exactly 4 sequences.
std::pair<std::vector<SequenceRecord>, std::vector<SequenceRecord>> split_sequences(
    const DatasetManifest& manifest);

LoadedSequence load_frames(const SequenceRecord& record);

}  // namespace gaitface
