#include "gaitface/classifier.hpp"

#include <cmath>

#include "gaitface/errors.hpp"

namespace gaitface {

namespace {
constexpr double kLogClamp = 1e-12;
}

ClassifierParams init_classifier(int classes, int in_dim, std::uint64_t seed) {
  if (classes <= 0 || in_dim <= 0)
    throw InvalidConfig("classifier needs positive class count and input dim");
  ClassifierParams params;
  params.classes = classes;
  params.in_dim = in_dim;
  params.weight = Param("classifier.W", uniform_fan_in(classes, in_dim, in_dim,
                                                       derive_seed(seed, "classifier.W")));
  params.bias = Param("classifier.b", ad::Mat::Zero(classes, 1));
  return params;
}

ad::Var classifier_forward(ad::Tape& tape, ParamBinding& bind, const ClassifierParams& params,
                           ad::Var z) {
  if (z.rows() != params.in_dim || z.cols() != 1)
    throw DimensionMismatch("classifier expects " + std::to_string(params.in_dim) +
                            "-vector, got " + std::to_string(z.rows()) + "x" +
                            std::to_string(z.cols()));
  ad::Var logits = ad::colbias(ad::matmul(bind(params.weight), z), bind(params.bias));
  return ad::softmax_flat(logits);
}

Eigen::VectorXd classify(const Eigen::VectorXd& z, const ClassifierParams& params) {
  ad::Tape tape;
  tape.set_grad_enabled(false);
  ParamBinding bind(tape);
  ad::Var zv = tape.leaf(z);
  return classifier_forward(tape, bind, params, zv).value().col(0);
}

int predict_id(const Eigen::VectorXd& probs) {
  if (probs.size() == 0) throw DimensionMismatch("predict_id on empty vector");
  int best = 0;
  for (int i = 1; i < probs.size(); ++i)
    if (probs[i] > probs[best]) best = i;
  return best;
}

Eigen::VectorXd one_hot(int index, int classes) {
  if (index < 0 || index >= classes)
    throw IdOutOfRange("one_hot index " + std::to_string(index) + " for K=" +
                       std::to_string(classes));
  Eigen::VectorXd t = Eigen::VectorXd::Zero(classes);
  t[index] = 1.0;
  return t;
}

double cross_entropy_loss(const Eigen::VectorXd& probs, const Eigen::VectorXd& target) {
  if (probs.size() != target.size())
    throw DimensionMismatch("probs and target lengths differ");
  double loss = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (target[i] == 0.0) continue;
    loss -= target[i] * std::log(std::min(std::max(probs[i], kLogClamp), 1.0));
  }
  return loss;
}

double cross_entropy_loss(const Eigen::VectorXd& probs, int target_class) {
  return cross_entropy_loss(probs, one_hot(target_class, static_cast<int>(probs.size())));
}

}  // namespace gaitface
