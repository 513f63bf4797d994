#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gaitface/sample.hpp"

namespace gaitface {

// On-disk cache of prepared clip pairs: per sequence one gait .npy, one face
// .npy (both frames x H x W) and a metadata JSON; store.json indexes the
// entries so repeated experiments skip cycle detection and cropping.
struct StoreEntry {
  std::string tag;
  int subject_id = 0;
  int angle_degrees = 0;
  int sequence_index = 0;
  int cycle_start = 0;
  int cycle_end = 0;
};

struct ClipStore {
  std::string dir;
  int class_count = 0;
  std::vector<StoreEntry> entries;

  static ClipStore open(const std::string& dir);

  Sample load_sample(const StoreEntry& entry) const;
  std::vector<Sample> load_all() const;
  // sequence indices 0,1 -> train; 2,3 -> test
  std::pair<std::vector<Sample>, std::vector<Sample>> load_split() const;
};

void write_store_entry(const std::string& dir, const StoreEntry& entry,
                       const ClipTensor& gait, const ClipTensor& face);
void write_store_index(const std::string& dir, int class_count,
                       const std::vector<StoreEntry>& entries);

}  // namespace gaitface
