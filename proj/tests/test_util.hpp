#pragma once

#include <functional>
#include <random>
#include <vector>

#include "gaitface/autodiff.hpp"
#include "gaitface/params.hpp"

namespace testutil {

using gaitface::ad::Mat;
using gaitface::ad::Tape;
using gaitface::ad::Var;

inline Mat random_mat(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                      double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = dist(rng);
  return m;
}

// Guarded relative error: true relative error above the floor, absolute-ish
// below it (tiny gradients agreeing within the floor count as equal).
inline double rel_err(double a, double b, double floor_ = 1e-4) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor_});
}

// Central finite differences against the analytic gradient of a scalar graph.
// `build` must construct the full graph from the given leaves each call.
// Returns the worst guarded relative error over all entries of all inputs.
inline double grad_check(
    std::vector<Mat> values,
    const std::function<Var(Tape&, std::vector<Var>&)>& build, double h = 1e-6) {
  // analytic pass
  Tape tape;
  std::vector<Var> leaves;
  leaves.reserve(values.size());
  for (const Mat& v : values) leaves.push_back(tape.leaf(v, /*requires_grad=*/true));
  Var loss = build(tape, leaves);
  tape.backward(loss);
  std::vector<Mat> analytic;
  for (const Var& leaf : leaves) {
    analytic.push_back(leaf.grad().size() == 0
                           ? Mat::Zero(leaf.rows(), leaf.cols())
                           : leaf.grad());
  }

  auto eval = [&](const std::vector<Mat>& vals) {
    Tape t;
    t.set_grad_enabled(false);
    std::vector<Var> ls;
    ls.reserve(vals.size());
    for (const Mat& v : vals) ls.push_back(t.leaf(v, true));
    return build(t, ls).value()(0, 0);
  };

  double worst = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    for (Eigen::Index r = 0; r < values[i].rows(); ++r) {
      for (Eigen::Index c = 0; c < values[i].cols(); ++c) {
        const double orig = values[i](r, c);
        values[i](r, c) = orig + h;
        const double fp = eval(values);
        values[i](r, c) = orig - h;
        const double fm = eval(values);
        values[i](r, c) = orig;
        const double fd = (fp - fm) / (2.0 * h);
        worst = std::max(worst, rel_err(fd, analytic[i](r, c)));
      }
    }
  }
  return worst;
}

// Finite-difference check over real model parameters: `forward` must rebuild
// the loss graph from the params' current values through a fresh binding.
// Returns the worst guarded relative error over every entry of every param;
// `checked` (when non-null) receives the number of entries compared.
inline double param_grad_check(
    const std::vector<gaitface::Param*>& params,
    const std::function<Var(Tape&, gaitface::ParamBinding&)>& forward, double h = 1e-6,
    long* checked = nullptr) {
  Tape tape;
  gaitface::ParamBinding bind(tape);
  Var loss = forward(tape, bind);
  tape.backward(loss);
  std::vector<Mat> analytic;
  analytic.reserve(params.size());
  for (gaitface::Param* p : params) {
    const Mat* g = bind.gradient(*p);
    analytic.push_back(g != nullptr ? *g : Mat::Zero(p->value.rows(), p->value.cols()));
  }

  auto eval = [&]() {
    Tape t;
    t.set_grad_enabled(false);
    gaitface::ParamBinding b(t);
    return forward(t, b).value()(0, 0);
  };

  double worst = 0.0;
  long count = 0;
  for (size_t i = 0; i < params.size(); ++i) {
    Mat& value = params[i]->value;
    for (Eigen::Index r = 0; r < value.rows(); ++r) {
      for (Eigen::Index c = 0; c < value.cols(); ++c) {
        const double orig = value(r, c);
        value(r, c) = orig + h;
        const double fp = eval();
        value(r, c) = orig - h;
        const double fm = eval();
        value(r, c) = orig;
        const double fd = (fp - fm) / (2.0 * h);
        worst = std::max(worst, rel_err(fd, analytic[i](r, c)));
        ++count;
      }
    }
  }
  if (checked != nullptr) *checked = count;
  return worst;
}

}  // namespace testutil
