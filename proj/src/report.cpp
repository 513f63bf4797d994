#include "gaitface/report.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/core.hpp>

#include <json.hpp>

#include "gaitface/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gaitface {

void write_summary_json(const EvalSummary& summary, const std::string& path) {
  json j;
  j["model"] = summary.model_name;
  j["accuracy_percent"] = summary.accuracy_percent;
  j["log_loss"] = summary.log_loss;
  j["records"] = summary.records;
  json angles = json::object();
  for (const auto& [deg, acc] : summary.per_angle_accuracy)
    angles[std::to_string(deg)] = acc;
  j["per_angle_accuracy"] = angles;
  json counts = json::object();
  for (const auto& [deg, n] : summary.per_angle_count) counts[std::to_string(deg)] = n;
  j["per_angle_count"] = counts;
  json rows = json::array();
  for (Eigen::Index r = 0; r < summary.confusion.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < summary.confusion.cols(); ++c)
      row.push_back(summary.confusion(r, c));
    rows.push_back(row);
  }
  j["confusion"] = rows;
  std::ofstream out(path);
  if (!out) throw UnwritableOutput("cannot write " + path);
  out << j.dump(2) << "\n";
}

EvalSummary read_summary_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("summary " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaViolation("summary parse error in " + path + ": " + e.what());
  }
  EvalSummary summary;
  summary.model_name = j.at("model").get<std::string>();
  summary.accuracy_percent = j.at("accuracy_percent").get<double>();
  summary.log_loss = j.at("log_loss").get<double>();
  summary.records = j.at("records").get<int>();
  for (const auto& [deg, acc] : j.at("per_angle_accuracy").items())
    summary.per_angle_accuracy[std::stoi(deg)] = acc.get<double>();
  for (const auto& [deg, n] : j.at("per_angle_count").items())
    summary.per_angle_count[std::stoi(deg)] = n.get<int>();
  const auto& rows = j.at("confusion");
  const auto k = static_cast<Eigen::Index>(rows.size());
  summary.confusion.resize(k, k);
  for (Eigen::Index r = 0; r < k; ++r)
    for (Eigen::Index c = 0; c < k; ++c)
      summary.confusion(r, c) = rows[static_cast<size_t>(r)][static_cast<size_t>(c)].get<int>();
  return summary;
}

std::vector<std::string> canonical_model_order(
    const std::map<std::string, EvalSummary>& summaries) {
  static const std::vector<std::string> canonical = {
      "face", "gait", "average", "bilinear", "attention_concat", "adaptive"};
  std::vector<std::string> order;
  for (const auto& name : canonical)
    if (summaries.count(name)) order.push_back(name);
  for (const auto& [name, s] : summaries)
    if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
  return order;
}

void write_confusion_heatmap(const Eigen::MatrixXi& confusion, const std::string& path) {
  const int k = static_cast<int>(confusion.rows());
  const int cell = 24;
  const int max_count = std::max(1, confusion.maxCoeff());
  cv::Mat img(k * cell, k * cell, CV_8UC3);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double t = static_cast<double>(confusion(i, j)) / max_count;
      // white (0) to saturated blue (max), BGR
      const auto shade = static_cast<unsigned char>(255.0 * (1.0 - t));
      cv::Vec3b color(255, shade, shade);
      for (int y = 0; y < cell; ++y)
        for (int x = 0; x < cell; ++x)
          img.at<cv::Vec3b>(i * cell + y, j * cell + x) = color;
    }
  }
  // thin grid lines
  for (int i = 0; i <= k; ++i) {
    const int p = std::min(i * cell, k * cell - 1);
    img.row(p).setTo(cv::Scalar(200, 200, 200));
    img.col(p).setTo(cv::Scalar(200, 200, 200));
  }
  if (!cv::imwrite(path, img)) throw UnwritableOutput("cannot write heatmap " + path);
}

namespace {

void write_confusion_csv(const Eigen::MatrixXi& confusion, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UnwritableOutput("cannot write " + path);
  const int k = static_cast<int>(confusion.rows());
  out << "truth\\predicted";
  for (int j = 0; j < k; ++j) out << "," << j;
  out << "\n";
  for (int i = 0; i < k; ++i) {
    out << i;
    for (int j = 0; j < k; ++j) out << "," << confusion(i, j);
    out << "\n";
  }
}

}  // namespace

void emit_report(const std::map<std::string, EvalSummary>& summaries,
                 const std::string& out_dir, std::ostream& text_out) {
  if (summaries.empty()) throw EmptyRecordSet("emit_report with no summaries");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw UnwritableOutput("cannot create " + out_dir);

  const std::vector<std::string> order = canonical_model_order(summaries);

  {
    std::ofstream out(fs::path(out_dir) / "overall.csv");
    if (!out) throw UnwritableOutput("cannot write overall.csv in " + out_dir);
    out << "model,accuracy_percent,log_loss\n";
    out << std::setprecision(10);
    for (const auto& name : order) {
      const EvalSummary& s = summaries.at(name);
      out << name << "," << s.accuracy_percent << "," << s.log_loss << "\n";
    }
  }

  {
    std::set<int> angles;
    for (const auto& [name, s] : summaries)
      for (const auto& [deg, acc] : s.per_angle_accuracy) angles.insert(deg);
    std::ofstream out(fs::path(out_dir) / "per_angle.csv");
    if (!out) throw UnwritableOutput("cannot write per_angle.csv in " + out_dir);
    out << "angle";
    for (const auto& name : order) out << "," << name;
    out << "\n" << std::setprecision(10);
    for (int deg : angles) {
      out << deg;
      for (const auto& name : order) {
        const auto& acc = summaries.at(name).per_angle_accuracy;
        auto it = acc.find(deg);
        out << ",";
        if (it != acc.end()) out << it->second;
      }
      out << "\n";
    }
  }

  const std::string primary = summaries.count("adaptive") ? "adaptive" : order.front();
  for (const auto& name : order) {
    const EvalSummary& s = summaries.at(name);
    write_confusion_csv(s.confusion,
                        (fs::path(out_dir) / ("confusion_" + name + ".csv")).string());
    write_confusion_heatmap(s.confusion,
                            (fs::path(out_dir) / ("confusion_" + name + ".png")).string());
  }
  write_confusion_csv(summaries.at(primary).confusion,
                      (fs::path(out_dir) / "confusion.csv").string());
  write_confusion_heatmap(summaries.at(primary).confusion,
                          (fs::path(out_dir) / "confusion.png").string());

  // plain-text rendering
  text_out << "\nOverall results\n";
  text_out << std::left << std::setw(20) << "model" << std::right << std::setw(12)
           << "accuracy%" << std::setw(12) << "log-loss" << "\n";
  for (const auto& name : order) {
    const EvalSummary& s = summaries.at(name);
    text_out << std::left << std::setw(20) << name << std::right << std::setw(12)
             << std::fixed << std::setprecision(2) << s.accuracy_percent << std::setw(12)
             << std::setprecision(4) << s.log_loss << "\n";
  }
  std::set<int> angles;
  for (const auto& [name, s] : summaries)
    for (const auto& [deg, acc] : s.per_angle_accuracy) angles.insert(deg);
  if (!angles.empty()) {
    text_out << "\nAngle-wise accuracy (%)\n";
    text_out << std::left << std::setw(8) << "angle";
    for (const auto& name : order) text_out << std::right << std::setw(18) << name;
    text_out << "\n";
    for (int deg : angles) {
      text_out << std::left << std::setw(8) << deg;
      for (const auto& name : order) {
        const auto& acc = summaries.at(name).per_angle_accuracy;
        auto it = acc.find(deg);
        if (it != acc.end())
          text_out << std::right << std::setw(18) << std::fixed << std::setprecision(2)
                   << it->second;
        else
          text_out << std::right << std::setw(18) << "-";
      }
      text_out << "\n";
    }
  }
  text_out.unsetf(std::ios::fixed);
  text_out << std::setprecision(6) << std::flush;
}

}  // namespace gaitface
