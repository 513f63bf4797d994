#include <doctest.h>

#include <random>

#include "gaitface/autodiff.hpp"
#include "gaitface/errors.hpp"
#include "test_util.hpp"

using namespace gaitface;
using testutil::grad_check;
using testutil::random_mat;

namespace {

ad::Var squash_to_scalar(ad::Var v) { return ad::sum(ad::tanh_op(v)); }

}  // namespace

TEST_CASE("elementwise and linear ops match finite differences") {
  std::mt19937_64 rng(1);
  const ad::Mat a = random_mat(4, 3, rng);
  const ad::Mat b = random_mat(4, 3, rng);

  CHECK(grad_check({a, b}, [](ad::Tape&, std::vector<ad::Var>& l) {
          return squash_to_scalar(ad::add(l[0], l[1]));
        }) < 1e-6);
  CHECK(grad_check({a, b}, [](ad::Tape&, std::vector<ad::Var>& l) {
          return squash_to_scalar(ad::sub(l[0], l[1]));
        }) < 1e-6);
  CHECK(grad_check({a, b}, [](ad::Tape&, std::vector<ad::Var>& l) {
          return squash_to_scalar(ad::cmul(l[0], l[1]));
        }) < 1e-6);
  const ad::Mat bpos = (b.array().abs() + 0.5).matrix();
  CHECK(grad_check({a, bpos}, [](ad::Tape&, std::vector<ad::Var>& l) {
          return squash_to_scalar(ad::cdiv(l[0], l[1]));
        }) < 1e-6);
  CHECK(grad_check({a}, [](ad::Tape&, std::vector<ad::Var>& l) {
          return squash_to_scalar(ad::scale(l[0], -1.7));
        }) < 1e-6);
  CHECK(grad_check({a}, [](ad::Tape&, std::vector<ad::Var>& l) {
          return squash_to_scalar(ad::sigmoid_op(l[0]));
        }) < 1e-6);
  CHECK(grad_check({a}, [](ad::Tape&, std::vector<ad::Var>& l) {
          return ad::norm2(l[0]);
        }) < 1e-6);
}

TEST_CASE("matmul variants match finite differences") {
  std::mt19937_64 rng(2);
  const ad::Mat a = random_mat(3, 4, rng);
  const ad::Mat b = random_mat(4, 2, rng);
  CHECK(grad_check({a, b}, [](ad::Tape&, std::vector<ad::Var>& l) {
          return squash_to_scalar(ad::matmul(l[0], l[1]));
        }) < 1e-6);
  const ad::Mat at = random_mat(4, 3, rng);
  CHECK(grad_check({at, b}, [](ad::Tape&, std::vector<ad::Var>& l) {
          return squash_to_scalar(ad::matmul(l[0], l[1], /*trans_a=*/true));
        }) < 1e-6);
  const ad::Mat bt = random_mat(2, 4, rng);
  CHECK(grad_check({a, bt}, [](ad::Tape&, std::vector<ad::Var>& l) {
          return squash_to_scalar(ad::matmul(l[0], l[1], false, /*trans_b=*/true));
        }) < 1e-6);
}

TEST_CASE("structural ops match finite differences") {
  std::mt19937_64 rng(3);
  const ad::Mat a = random_mat(4, 3, rng);
  const ad::Mat b = random_mat(2, 3, rng);
  const ad::Mat bias = random_mat(4, 1, rng);
  const ad::Mat s = random_mat(1, 1, rng);

  CHECK(grad_check({a, bias}, [](ad::Tape&, std::vector<ad::Var>& l) {
          return squash_to_scalar(ad::colbias(l[0], l[1]));
        }) < 1e-6);
  CHECK(grad_check({a, s}, [](ad::Tape&, std::vector<ad::Var>& l) {
          return squash_to_scalar(ad::smul(l[0], l[1]));
        }) < 1e-6);
  CHECK(grad_check({a, b}, [](ad::Tape&, std::vector<ad::Var>& l) {
          return squash_to_scalar(ad::vstack(l[0], l[1]));
        }) < 1e-6);
  CHECK(grad_check({a, a}, [](ad::Tape&, std::vector<ad::Var>& l) {
          return squash_to_scalar(ad::hstack({l[0], l[1]}));
        }) < 1e-6);
  CHECK(grad_check({a}, [](ad::Tape&, std::vector<ad::Var>& l) {
          return squash_to_scalar(ad::rows(l[0], 1, 2));
        }) < 1e-6);
  CHECK(grad_check({a}, [](ad::Tape&, std::vector<ad::Var>& l) {
          return squash_to_scalar(ad::flatten_rowmajor(l[0]));
        }) < 1e-6);
}

TEST_CASE("softmax and cross-entropy match finite differences") {
  std::mt19937_64 rng(4);
  const ad::Mat logits = random_mat(5, 1, rng, 2.0);
  CHECK(grad_check({logits}, [](ad::Tape&, std::vector<ad::Var>& l) {
          return squash_to_scalar(ad::softmax_flat(l[0]));
        }) < 1e-6);
  CHECK(grad_check({logits}, [](ad::Tape&, std::vector<ad::Var>& l) {
          return ad::cross_entropy(ad::softmax_flat(l[0]), 2);
        }) < 1e-6);
}

TEST_CASE("softmax output lies on the simplex") {
  std::mt19937_64 rng(5);
  ad::Tape tape;
  for (int i = 0; i < 50; ++i) {
    ad::Var v = tape.leaf(random_mat(7, 1, rng, 20.0));
    ad::Mat p = ad::softmax_flat(v).value();
    CHECK(p.minCoeff() >= 0.0);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("conv2d matches a direct convolution oracle") {
  std::mt19937_64 rng(6);
  ad::ConvGeom geom{2, 5, 6, 3, 3, 1};
  const ad::Mat input = random_mat(2, 30, rng);
  const ad::Mat kernel = random_mat(3, 2 * 9, rng);

  ad::Tape tape;
  tape.set_grad_enabled(false);
  ad::Var out = ad::conv2d(tape.leaf(input), tape.leaf(kernel), geom);

  // direct quadruple-loop oracle
  for (int oc = 0; oc < 3; ++oc) {
    for (int oy = 0; oy < 5; ++oy) {
      for (int ox = 0; ox < 6; ++ox) {
        double acc = 0.0;
        for (int ic = 0; ic < 2; ++ic)
          for (int dy = 0; dy < 3; ++dy)
            for (int dx = 0; dx < 3; ++dx) {
              const int iy = oy - 1 + dy, ix = ox - 1 + dx;
              if (iy < 0 || iy >= 5 || ix < 0 || ix >= 6) continue;
              acc += kernel(oc, (ic * 3 + dy) * 3 + dx) * input(ic, iy * 6 + ix);
            }
        CHECK(out.value()(oc, oy * 6 + ox) == doctest::Approx(acc).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("conv2d gradients match finite differences") {
  std::mt19937_64 rng(7);
  ad::ConvGeom geom{2, 4, 5, 3, 3, 1};
  const ad::Mat input = random_mat(2, 20, rng);
  const ad::Mat kernel = random_mat(3, 18, rng);
  CHECK(grad_check({input, kernel}, [geom](ad::Tape&, std::vector<ad::Var>& l) {
          return squash_to_scalar(ad::conv2d(l[0], l[1], geom));
        }) < 1e-6);

  // strided variant
  ad::ConvGeom strided{1, 6, 6, 2, 3, 2};
  const ad::Mat sin_ = random_mat(1, 36, rng);
  const ad::Mat sker = random_mat(2, 9, rng);
  CHECK(grad_check({sin_, sker}, [strided](ad::Tape&, std::vector<ad::Var>& l) {
          return squash_to_scalar(ad::conv2d(l[0], l[1], strided));
        }) < 1e-6);
}

TEST_CASE("maxpool2d forward and gradients") {
  std::mt19937_64 rng(8);
  ad::PoolGeom geom{2, 4, 6, 2, 2};
  const ad::Mat input = random_mat(2, 24, rng);

  ad::Tape tape;
  tape.set_grad_enabled(false);
  ad::Mat out = ad::maxpool2d(tape.leaf(input), geom).value();
  CHECK(out.rows() == 2);
  CHECK(out.cols() == 2 * 3);
  for (int c = 0; c < 2; ++c)
    for (int oy = 0; oy < 2; ++oy)
      for (int ox = 0; ox < 3; ++ox) {
        double best = -1e300;
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx)
            best = std::max(best, input(c, (oy * 2 + dy) * 6 + (ox * 2 + dx)));
        CHECK(out(c, oy * 3 + ox) == best);
      }

  CHECK(grad_check({input}, [geom](ad::Tape&, std::vector<ad::Var>& l) {
          return squash_to_scalar(ad::maxpool2d(l[0], geom));
        }) < 1e-6);

  // odd input size pools the truncated trailing window
  ad::PoolGeom odd{1, 5, 5, 2, 2};
  const ad::Mat oin = random_mat(1, 25, rng);
  ad::Tape t2;
  t2.set_grad_enabled(false);
  ad::Mat oout = ad::maxpool2d(t2.leaf(oin), odd).value();
  CHECK(oout.cols() == 9);
}

TEST_CASE("cross_entropy clamps vanishing probabilities") {
  ad::Tape tape;
  ad::Mat probs(3, 1);
  probs << 0.0, 1.0, 0.0;
  ad::Var loss = ad::cross_entropy(tape.leaf(probs, true), 0);
  CHECK(loss.value()(0, 0) == doctest::Approx(-std::log(1e-12)));
  CHECK(std::isfinite(loss.value()(0, 0)));
}

TEST_CASE("backward rejects non-scalar loss and foreign tapes") {
  ad::Tape tape;
  ad::Var v = tape.leaf(ad::Mat::Zero(2, 2), true);
  CHECK_THROWS_AS(tape.backward(v), ShapeMismatch);
}

TEST_CASE("gradients accumulate when a node fans out") {
  std::mt19937_64 rng(9);
  const ad::Mat a = random_mat(3, 3, rng);
  CHECK(grad_check({a}, [](ad::Tape&, std::vector<ad::Var>& l) {
          return ad::sum(ad::add(ad::cmul(l[0], l[0]), ad::scale(l[0], 0.5)));
        }) < 1e-6);
}
