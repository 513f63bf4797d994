#pragma once

#include <Eigen/Dense>

#include "gaitface/autodiff.hpp"
#include "gaitface/params.hpp"

namespace gaitface {

struct ClassifierParams {
  int classes = 0;  // K
  int in_dim = 0;   // fused feature width
  Param weight;     // K x in_dim
  Param bias;       // K x 1

  std::vector<Param*> all_params() { return {&weight, &bias}; }
};

ClassifierParams init_classifier(int classes, int in_dim, std::uint64_t seed);

// probs = softmax(W z + b), K x 1
ad::Var classifier_forward(ad::Tape& tape, ParamBinding& bind, const ClassifierParams& params,
                           ad::Var z);

Eigen::VectorXd classify(const Eigen::VectorXd& z, const ClassifierParams& params);

// argmax with lowest-index tie break
int predict_id(const Eigen::VectorXd& probs);

Eigen::VectorXd one_hot(int index, int classes);

// -sum_i t_i ln(max(probs_i, eps)), eps = 1e-12
double cross_entropy_loss(const Eigen::VectorXd& probs, const Eigen::VectorXd& target);
double cross_entropy_loss(const Eigen::VectorXd& probs, int target_class);

}  // namespace gaitface
