#include <doctest.h>

#include <cmath>
#include <random>

#include "gaitface/classifier.hpp"
#include "gaitface/errors.hpp"
#include "test_util.hpp"

using namespace gaitface;
using testutil::random_mat;

TEST_CASE("zero weights and bias classify uniformly") {
  ClassifierParams params = init_classifier(4, 3, 1);
  params.weight.value.setZero();
  params.bias.value.setZero();
  Eigen::VectorXd probs = classify(Eigen::Vector3d(1.0, -2.0, 0.5), params);
  for (int i = 0; i < 4; ++i) CHECK(probs[i] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("logits [ln 3, 0] give probabilities [0.75, 0.25]") {
  ClassifierParams params = init_classifier(2, 1, 1);
  params.weight.value.setZero();
  params.bias.value(0, 0) = std::log(3.0);
  params.bias.value(1, 0) = 0.0;
  Eigen::VectorXd probs = classify(Eigen::VectorXd::Zero(1), params);
  CHECK(probs[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(probs[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("probabilities always sum to one") {
  std::mt19937_64 rng(2);
  ClassifierParams params = init_classifier(7, 5, 3);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd probs = classify(random_mat(5, 1, rng, 10.0).col(0), params);
    CHECK(std::abs(probs.sum() - 1.0) < 1e-9);
    CHECK(probs.minCoeff() > 0.0);
  }
}

TEST_CASE("softmax is shift invariant, so predictions are too") {
  std::mt19937_64 rng(3);
  ClassifierParams params = init_classifier(5, 4, 4);
  const Eigen::VectorXd z = random_mat(4, 1, rng).col(0);
  Eigen::VectorXd base = classify(z, params);
  ClassifierParams shifted = params;
  shifted.bias.value.array() += 7.5;  // constant shift on every logit
  Eigen::VectorXd after = classify(z, shifted);
  for (int i = 0; i < 5; ++i) CHECK(after[i] == doctest::Approx(base[i]).epsilon(1e-9));
  CHECK(predict_id(after) == predict_id(base));
}

TEST_CASE("predict_id takes the argmax with lowest-index ties") {
  CHECK(predict_id(Eigen::Vector3d(0.1, 0.7, 0.2)) == 1);
  CHECK(predict_id(Eigen::Vector2d(0.5, 0.5)) == 0);
  for (int k = 0; k < 4; ++k) CHECK(predict_id(one_hot(k, 4)) == k);
}

TEST_CASE("cross entropy on canonical examples") {
  // exact match -> 0
  CHECK(cross_entropy_loss(one_hot(2, 5), 2) == 0.0);
  // uniform over K=20 -> ln 20
  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(20, 1.0 / 20.0);
  CHECK(std::abs(cross_entropy_loss(uniform, 7) - std::log(20.0)) < 1e-9);
  // hand-computed -ln 0.2
  Eigen::VectorXd probs(3);
  probs << 0.7, 0.2, 0.1;
  CHECK(cross_entropy_loss(probs, 1) ==
        doctest::Approx(1.6094379124341003).epsilon(1e-12));
}

TEST_CASE("loss is non-negative and zero only on an exact one-hot hit") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd raw = random_mat(6, 1, rng, 3.0).col(0).array().exp();
    Eigen::VectorXd probs = raw / raw.sum();
    const int target = static_cast<int>(rng() % 6);
    const double loss = cross_entropy_loss(probs, target);
    CHECK(loss >= 0.0);
    if (loss == 0.0) CHECK(probs[target] == 1.0);
  }
}

TEST_CASE("gradient through softmax + cross entropy equals probs minus one-hot") {
  std::mt19937_64 rng(5);
  const ad::Mat logits = random_mat(6, 1, rng, 2.0);
  const int target = 2;

  ad::Tape tape;
  ad::Var lv = tape.leaf(logits, true);
  ad::Var probs = ad::softmax_flat(lv);
  ad::Var loss = ad::cross_entropy(probs, target);
  tape.backward(loss);

  Eigen::VectorXd expected = probs.value().col(0);
  expected[target] -= 1.0;
  CHECK((lv.grad().col(0) - expected).lpNorm<Eigen::Infinity>() < 1e-12);

  // and the analytic form agrees with finite differences
  const double worst =
      testutil::grad_check({logits}, [target](ad::Tape&, std::vector<ad::Var>& l) {
        return ad::cross_entropy(ad::softmax_flat(l[0]), target);
      });
  CHECK(worst < 1e-6);
}

TEST_CASE("classifier parameter gradients match finite differences") {
  std::mt19937_64 rng(6);
  ClassifierParams params = init_classifier(3, 4, 9);
  const Eigen::VectorXd z = random_mat(4, 1, rng).col(0);
  const double worst = testutil::param_grad_check(
      params.all_params(), [&](ad::Tape& tape, ParamBinding& bind) {
        ad::Var zv = tape.leaf(z);
        return ad::cross_entropy(classifier_forward(tape, bind, params, zv), 1);
      });
  CHECK(worst < 1e-6);
}

TEST_CASE("dimension mismatches are rejected") {
  ClassifierParams params = init_classifier(3, 4, 1);
  CHECK_THROWS_AS(classify(Eigen::VectorXd::Zero(5), params), DimensionMismatch);
  CHECK_THROWS_AS(cross_entropy_loss(Eigen::VectorXd::Ones(3), one_hot(0, 2)),
                  DimensionMismatch);
  CHECK_THROWS_AS(one_hot(5, 3), IdOutOfRange);
}
