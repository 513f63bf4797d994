// Generates a dataset manifest from a CASIA-A-style directory tree:
//   <rgb-root>/<subject>/<angle>_<seq>/<frame files>
//   <mask-root>/<subject>/<angle>_<seq>/<frame files>
// Angle directories are named like 00_1, 45_3, 90_4 (sequence numbers 1-4).
// Subjects are assigned ids 0..K-1 in sorted name order.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct SequenceDir {
  int angle = -1;
  int index = -1;  // 0-based
  fs::path path;
};

bool parse_sequence_dir(const std::string& name, SequenceDir& out) {
  const size_t underscore = name.find('_');
  if (underscore == std::string::npos) return false;
  try {
    const int angle = std::stoi(name.substr(0, underscore));
    const int number = std::stoi(name.substr(underscore + 1));
    if (angle != 0 && angle != 45 && angle != 90) return false;
    if (number < 1 || number > 4) return false;
    out.angle = angle;
    out.index = number - 1;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

std::vector<std::string> sorted_files(const fs::path& dir) {
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path().filename().string());
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build a dataset manifest from a CASIA-A-style directory tree"};
  std::string rgb_root, mask_root, out_path;
  app.add_option("--rgb", rgb_root, "root of RGB frame directories")->required();
  app.add_option("--masks", mask_root, "root of silhouette mask directories")->required();
  app.add_option("--out", out_path, "manifest JSON output path")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path rgb(rgb_root), masks(mask_root);
    if (!fs::is_directory(rgb) || !fs::is_directory(masks)) {
      std::cerr << "error: --rgb and --masks must be directories\n";
      return 1;
    }

    std::vector<std::string> subjects;
    for (const auto& entry : fs::directory_iterator(rgb))
      if (entry.is_directory()) subjects.push_back(entry.path().filename().string());
    std::sort(subjects.begin(), subjects.end());
    if (subjects.empty()) {
      std::cerr << "error: no subject directories under " << rgb_root << "\n";
      return 1;
    }

    const fs::path out_dir = fs::absolute(fs::path(out_path)).parent_path();
    json manifest;
    json subjects_json = json::array();
    // root relative to the manifest location keeps the manifest relocatable
    manifest["root"] = fs::relative(fs::current_path(), out_dir).generic_string();

    int next_id = 0;
    for (const std::string& subject : subjects) {
      json js;
      js["id"] = next_id++;
      js["name"] = subject;
      json sequences = json::array();
      for (const auto& entry : fs::directory_iterator(rgb / subject)) {
        if (!entry.is_directory()) continue;
        SequenceDir seq;
        if (!parse_sequence_dir(entry.path().filename().string(), seq)) {
          std::cerr << "skipping unrecognized sequence dir " << entry.path() << "\n";
          continue;
        }
        const fs::path mask_dir = masks / subject / entry.path().filename();
        if (!fs::is_directory(mask_dir)) {
          std::cerr << "skipping " << entry.path() << ": no matching mask dir\n";
          continue;
        }
        json jq;
        jq["angle"] = seq.angle;
        jq["index"] = seq.index;
        json rgb_list = json::array();
        json mask_list = json::array();
        for (const std::string& file : sorted_files(entry.path()))
          rgb_list.push_back(
              fs::relative(entry.path() / file, fs::current_path()).generic_string());
        for (const std::string& file : sorted_files(mask_dir))
          mask_list.push_back(
              fs::relative(mask_dir / file, fs::current_path()).generic_string());
        if (rgb_list.size() != mask_list.size()) {
          std::cerr << "skipping " << entry.path() << ": rgb/mask frame counts differ\n";
          continue;
        }
        jq["rgb"] = rgb_list;
        jq["mask"] = mask_list;
        sequences.push_back(jq);
      }
      js["sequences"] = sequences;
      subjects_json.push_back(js);
    }
    manifest["subjects"] = subjects_json;

    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return 1;
    }
    out << manifest.dump(2) << "\n";
    std::cout << "wrote " << out_path << " with " << subjects.size() << " subjects\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
