#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "gaitface/manifest.hpp"

namespace gaitface {

struct EvalRecord {
  int subject_id = 0;    // ground truth
  int predicted_id = 0;
  Eigen::VectorXd probabilities;  // length K, sums to 1
  Angle angle = Angle::deg0;
};

struct EvalSummary {
  std::string model_name;
  double accuracy_percent = 0.0;
  double log_loss = 0.0;
  std::map<int, double> per_angle_accuracy;  // degrees -> percent
  std::map<int, int> per_angle_count;
  Eigen::MatrixXi confusion;  // rows = truth, cols = predicted
  int records = 0;
};

// 100 * correct / N
double accuracy(const std::vector<EvalRecord>& records);

// -(1/N) sum ln p(true class), probabilities clamped to [1e-12, 1]
double log_loss(const std::vector<EvalRecord>& records);

// entry (i, j) counts records with truth i predicted j
Eigen::MatrixXi confusion_matrix(const std::vector<EvalRecord>& records, int classes);

std::map<int, double> per_angle_accuracy(const std::vector<EvalRecord>& records);

EvalSummary summarize(const std::string& model_name, const std::vector<EvalRecord>& records,
                      int classes);

}  // namespace gaitface
