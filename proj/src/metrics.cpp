#include "gaitface/metrics.hpp"

#include <cmath>

#include "gaitface/errors.hpp"

namespace gaitface {

namespace {
constexpr double kProbClamp = 1e-12;
}

double accuracy(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw EmptyRecordSet("accuracy over zero records");
  long correct = 0;
  for (const auto& r : records) correct += r.subject_id == r.predicted_id ? 1 : 0;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(records.size());
}

double log_loss(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw EmptyRecordSet("log_loss over zero records");
  double total = 0.0;
  for (const auto& r : records) {
    if (r.subject_id < 0 || r.subject_id >= r.probabilities.size())
      throw IdOutOfRange("record truth " + std::to_string(r.subject_id) +
                         " outside probability vector of length " +
                         std::to_string(r.probabilities.size()));
    const double s = r.probabilities.sum();
    if (std::abs(s - 1.0) > 1e-6)
      throw SchemaViolation("record probabilities sum to " + std::to_string(s));
    const double p = std::min(std::max(r.probabilities[r.subject_id], kProbClamp), 1.0);
    total -= std::log(p);
  }
  return total / static_cast<double>(records.size());
}

Eigen::MatrixXi confusion_matrix(const std::vector<EvalRecord>& records, int classes) {
  if (classes <= 0) throw InvalidConfig("confusion_matrix needs positive class count");
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(classes, classes);
  for (const auto& r : records) {
    if (r.subject_id < 0 || r.subject_id >= classes)
      throw IdOutOfRange("truth id " + std::to_string(r.subject_id));
    if (r.predicted_id < 0 || r.predicted_id >= classes)
      throw IdOutOfRange("predicted id " + std::to_string(r.predicted_id));
    m(r.subject_id, r.predicted_id) += 1;
  }
  return m;
}

std::map<int, double> per_angle_accuracy(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw EmptyRecordSet("per_angle_accuracy over zero records");
  std::map<int, long> correct, count;
  for (const auto& r : records) {
    const int deg = angle_degrees(r.angle);
    count[deg] += 1;
    correct[deg] += r.subject_id == r.predicted_id ? 1 : 0;
  }
  std::map<int, double> out;
  for (const auto& [deg, n] : count)
    out[deg] = 100.0 * static_cast<double>(correct[deg]) / static_cast<double>(n);
  return out;
}

EvalSummary summarize(const std::string& model_name, const std::vector<EvalRecord>& records,
                      int classes) {
  EvalSummary summary;
  summary.model_name = model_name;
  summary.accuracy_percent = accuracy(records);
  summary.log_loss = log_loss(records);
  summary.per_angle_accuracy = per_angle_accuracy(records);
  for (const auto& r : records) summary.per_angle_count[angle_degrees(r.angle)] += 1;
  summary.confusion = confusion_matrix(records, classes);
  summary.records = static_cast<int>(records.size());
  return summary;
}

}  // namespace gaitface
