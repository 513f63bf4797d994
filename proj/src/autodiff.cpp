#include "gaitface/autodiff.hpp"

#include <cmath>

#include "gaitface/errors.hpp"

namespace gaitface::ad {

const Mat& Var::value() const { return tape_->node(index_).value; }
const Mat& Var::grad() const { return tape_->node(index_).grad; }

Var Tape::leaf(Mat value, bool requires_grad) {
  nodes_.push_back(Node{std::move(value), {}, nullptr, requires_grad && grad_enabled_});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::make(Mat value, bool requires_grad, std::function<void()> backward) {
  const bool rg = requires_grad && grad_enabled_;
  nodes_.push_back(Node{std::move(value), {}, rg ? std::move(backward) : nullptr, rg});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Mat& Tape::grad_buffer(int i) {
  Node& n = nodes_[static_cast<size_t>(i)];
  if (n.grad.size() == 0) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape() != this) throw ShapeMismatch("backward: var from another tape");
  if (loss.value().size() != 1) throw ShapeMismatch("backward: loss must be scalar");
  if (!node(loss.index()).requires_grad)
    throw InvalidConfig("backward: loss does not require grad");
  grad_buffer(loss.index())(0, 0) = 1.0;
  for (int i = loss.index(); i >= 0; --i) {
    Node& n = nodes_[static_cast<size_t>(i)];
    if (n.requires_grad && n.backward && n.grad.size() != 0) n.backward();
  }
}

namespace {

Tape& tape_of(Var a) { return *a.tape(); }

bool wants_grad(Var a) { return a.tape()->node(a.index()).requires_grad; }

void check_same_shape(Var a, Var b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeMismatch(std::string(what) + ": " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                        std::to_string(b.cols()));
}

}  // namespace

Var add(Var a, Var b) {
  check_same_shape(a, b, "add");
  Tape& t = tape_of(a);
  const bool rg = wants_grad(a) || wants_grad(b);
  Var out = t.make(a.value() + b.value(), rg, nullptr);
  if (rg && t.grad_enabled()) {
    const int oi = out.index(), ai = a.index(), bi = b.index();
    t.node(oi).backward = [&t, oi, ai, bi] {
      const Mat& g = t.node(oi).grad;
      if (t.node(ai).requires_grad) t.grad_buffer(ai) += g;
      if (t.node(bi).requires_grad) t.grad_buffer(bi) += g;
    };
  }
  return out;
}

Var sub(Var a, Var b) {
  check_same_shape(a, b, "sub");
  Tape& t = tape_of(a);
  const bool rg = wants_grad(a) || wants_grad(b);
  Var out = t.make(a.value() - b.value(), rg, nullptr);
  if (rg && t.grad_enabled()) {
    const int oi = out.index(), ai = a.index(), bi = b.index();
    t.node(oi).backward = [&t, oi, ai, bi] {
      const Mat& g = t.node(oi).grad;
      if (t.node(ai).requires_grad) t.grad_buffer(ai) += g;
      if (t.node(bi).requires_grad) t.grad_buffer(bi) -= g;
    };
  }
  return out;
}

Var cmul(Var a, Var b) {
  check_same_shape(a, b, "cmul");
  Tape& t = tape_of(a);
  const bool rg = wants_grad(a) || wants_grad(b);
  Var out = t.make(a.value().cwiseProduct(b.value()), rg, nullptr);
  if (rg && t.grad_enabled()) {
    const int oi = out.index(), ai = a.index(), bi = b.index();
    t.node(oi).backward = [&t, oi, ai, bi] {
      const Mat& g = t.node(oi).grad;
      if (t.node(ai).requires_grad) t.grad_buffer(ai) += g.cwiseProduct(t.node(bi).value);
      if (t.node(bi).requires_grad) t.grad_buffer(bi) += g.cwiseProduct(t.node(ai).value);
    };
  }
  return out;
}

Var cdiv(Var a, Var b) {
  check_same_shape(a, b, "cdiv");
  Tape& t = tape_of(a);
  const bool rg = wants_grad(a) || wants_grad(b);
  Var out = t.make(a.value().cwiseQuotient(b.value()), rg, nullptr);
  if (rg && t.grad_enabled()) {
    const int oi = out.index(), ai = a.index(), bi = b.index();
    t.node(oi).backward = [&t, oi, ai, bi] {
      const Mat& g = t.node(oi).grad;
      const Mat& bv = t.node(bi).value;
      if (t.node(ai).requires_grad) t.grad_buffer(ai) += g.cwiseQuotient(bv);
      if (t.node(bi).requires_grad)
        t.grad_buffer(bi) -= g.cwiseProduct(t.node(oi).value).cwiseQuotient(bv);
    };
  }
  return out;
}

Var scale(Var a, double c) {
  Tape& t = tape_of(a);
  const bool rg = wants_grad(a);
  Var out = t.make(a.value() * c, rg, nullptr);
  if (rg && t.grad_enabled()) {
    const int oi = out.index(), ai = a.index();
    t.node(oi).backward = [&t, oi, ai, c] { t.grad_buffer(ai) += t.node(oi).grad * c; };
  }
  return out;
}

Var smul(Var a, Var s) {
  if (s.value().size() != 1) throw ShapeMismatch("smul: scalar node must be 1x1");
  Tape& t = tape_of(a);
  const bool rg = wants_grad(a) || wants_grad(s);
  Var out = t.make(a.value() * s.value()(0, 0), rg, nullptr);
  if (rg && t.grad_enabled()) {
    const int oi = out.index(), ai = a.index(), si = s.index();
    t.node(oi).backward = [&t, oi, ai, si] {
      const Mat& g = t.node(oi).grad;
      if (t.node(ai).requires_grad) t.grad_buffer(ai) += g * t.node(si).value(0, 0);
      if (t.node(si).requires_grad)
        t.grad_buffer(si)(0, 0) += g.cwiseProduct(t.node(ai).value).sum();
    };
  }
  return out;
}

Var matmul(Var a, Var b, bool trans_a, bool trans_b) {
  if (trans_a && trans_b) throw ShapeMismatch("matmul: double transpose unsupported");
  Tape& t = tape_of(a);
  const Mat& av = a.value();
  const Mat& bv = b.value();
  const Eigen::Index inner_a = trans_a ? av.rows() : av.cols();
  const Eigen::Index inner_b = trans_b ? bv.cols() : bv.rows();
  if (inner_a != inner_b) throw ShapeMismatch("matmul: inner dimensions differ");

  Mat value;
  if (!trans_a && !trans_b)
    value = av * bv;
  else if (trans_a)
    value = av.transpose() * bv;
  else
    value = av * bv.transpose();

  const bool rg = wants_grad(a) || wants_grad(b);
  Var out = t.make(std::move(value), rg, nullptr);
  if (rg && t.grad_enabled()) {
    const int oi = out.index(), ai = a.index(), bi = b.index();
    t.node(oi).backward = [&t, oi, ai, bi, trans_a, trans_b] {
      const Mat& g = t.node(oi).grad;
      const Mat& A = t.node(ai).value;
      const Mat& B = t.node(bi).value;
      if (t.node(ai).requires_grad) {
        if (!trans_a && !trans_b)
          t.grad_buffer(ai) += g * B.transpose();
        else if (trans_a)
          t.grad_buffer(ai) += B * g.transpose();
        else
          t.grad_buffer(ai) += g * B;
      }
      if (t.node(bi).requires_grad) {
        if (!trans_a && !trans_b)
          t.grad_buffer(bi) += A.transpose() * g;
        else if (trans_a)
          t.grad_buffer(bi) += A * g;
        else
          t.grad_buffer(bi) += g.transpose() * A;
      }
    };
  }
  return out;
}

Var colbias(Var a, Var bias) {
  if (bias.cols() != 1 || bias.rows() != a.rows())
    throw ShapeMismatch("colbias: bias must be (rows x 1)");
  Tape& t = tape_of(a);
  const bool rg = wants_grad(a) || wants_grad(bias);
  Var out = t.make(a.value().colwise() + Eigen::VectorXd(bias.value().col(0)), rg, nullptr);
  if (rg && t.grad_enabled()) {
    const int oi = out.index(), ai = a.index(), bi = bias.index();
    t.node(oi).backward = [&t, oi, ai, bi] {
      const Mat& g = t.node(oi).grad;
      if (t.node(ai).requires_grad) t.grad_buffer(ai) += g;
      if (t.node(bi).requires_grad) t.grad_buffer(bi) += g.rowwise().sum();
    };
  }
  return out;
}

Var tanh_op(Var a) {
  Tape& t = tape_of(a);
  const bool rg = wants_grad(a);
  Var out = t.make(a.value().array().tanh().matrix(), rg, nullptr);
  if (rg && t.grad_enabled()) {
    const int oi = out.index(), ai = a.index();
    t.node(oi).backward = [&t, oi, ai] {
      const Mat& v = t.node(oi).value;
      t.grad_buffer(ai) +=
          t.node(oi).grad.cwiseProduct((1.0 - v.array().square()).matrix());
    };
  }
  return out;
}

Var sigmoid_op(Var a) {
  Tape& t = tape_of(a);
  Mat v = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  const bool rg = wants_grad(a);
  Var out = t.make(std::move(v), rg, nullptr);
  if (rg && t.grad_enabled()) {
    const int oi = out.index(), ai = a.index();
    t.node(oi).backward = [&t, oi, ai] {
      const Mat& s = t.node(oi).value;
      t.grad_buffer(ai) +=
          t.node(oi).grad.cwiseProduct(s.cwiseProduct((1.0 - s.array()).matrix()));
    };
  }
  return out;
}

Var softmax_flat(Var a) {
  Tape& t = tape_of(a);
  const double m = a.value().maxCoeff();
  Mat e = (a.value().array() - m).exp().matrix();
  const double s = e.sum();
  Mat v = e / s;
  const bool rg = wants_grad(a);
  Var out = t.make(std::move(v), rg, nullptr);
  if (rg && t.grad_enabled()) {
    const int oi = out.index(), ai = a.index();
    t.node(oi).backward = [&t, oi, ai] {
      const Mat& p = t.node(oi).value;
      const Mat& g = t.node(oi).grad;
      const double dot = g.cwiseProduct(p).sum();
      t.grad_buffer(ai) += p.cwiseProduct((g.array() - dot).matrix());
    };
  }
  return out;
}

Var sum(Var a) {
  Tape& t = tape_of(a);
  Mat v(1, 1);
  v(0, 0) = a.value().sum();
  const bool rg = wants_grad(a);
  Var out = t.make(std::move(v), rg, nullptr);
  if (rg && t.grad_enabled()) {
    const int oi = out.index(), ai = a.index();
    t.node(oi).backward = [&t, oi, ai] {
      t.grad_buffer(ai).array() += t.node(oi).grad(0, 0);
    };
  }
  return out;
}

Var norm2(Var a) {
  Tape& t = tape_of(a);
  Mat v(1, 1);
  v(0, 0) = a.value().norm();
  const bool rg = wants_grad(a);
  Var out = t.make(std::move(v), rg, nullptr);
  if (rg && t.grad_enabled()) {
    const int oi = out.index(), ai = a.index();
    t.node(oi).backward = [&t, oi, ai] {
      const double n = t.node(oi).value(0, 0);
      if (n > 0.0)
        t.grad_buffer(ai) += (t.node(oi).grad(0, 0) / n) * t.node(ai).value;
    };
  }
  return out;
}

Var vstack(Var a, Var b) {
  if (a.cols() != b.cols()) throw ShapeMismatch("vstack: column counts differ");
  Tape& t = tape_of(a);
  Mat v(a.rows() + b.rows(), a.cols());
  v.topRows(a.rows()) = a.value();
  v.bottomRows(b.rows()) = b.value();
  const bool rg = wants_grad(a) || wants_grad(b);
  Var out = t.make(std::move(v), rg, nullptr);
  if (rg && t.grad_enabled()) {
    const int oi = out.index(), ai = a.index(), bi = b.index();
    const Eigen::Index ra = a.rows(), rb = b.rows();
    t.node(oi).backward = [&t, oi, ai, bi, ra, rb] {
      const Mat& g = t.node(oi).grad;
      if (t.node(ai).requires_grad) t.grad_buffer(ai) += g.topRows(ra);
      if (t.node(bi).requires_grad) t.grad_buffer(bi) += g.bottomRows(rb);
    };
  }
  return out;
}

Var hstack(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeMismatch("hstack: no parts");
  Tape& t = tape_of(parts.front());
  Eigen::Index rows_n = parts.front().rows();
  Eigen::Index cols_n = 0;
  bool rg = false;
  for (const Var& p : parts) {
    if (p.rows() != rows_n) throw ShapeMismatch("hstack: row counts differ");
    cols_n += p.cols();
    rg = rg || wants_grad(p);
  }
  Mat v(rows_n, cols_n);
  Eigen::Index c = 0;
  for (const Var& p : parts) {
    v.middleCols(c, p.cols()) = p.value();
    c += p.cols();
  }
  Var out = t.make(std::move(v), rg, nullptr);
  if (rg && t.grad_enabled()) {
    std::vector<int> idx;
    std::vector<Eigen::Index> widths;
    idx.reserve(parts.size());
    widths.reserve(parts.size());
    for (const Var& p : parts) {
      idx.push_back(p.index());
      widths.push_back(p.cols());
    }
    const int oi = out.index();
    t.node(oi).backward = [&t, oi, idx = std::move(idx), widths = std::move(widths)] {
      const Mat& g = t.node(oi).grad;
      Eigen::Index c0 = 0;
      for (size_t k = 0; k < idx.size(); ++k) {
        if (t.node(idx[k]).requires_grad)
          t.grad_buffer(idx[k]) += g.middleCols(c0, widths[k]);
        c0 += widths[k];
      }
    };
  }
  return out;
}

Var rows(Var a, int first, int count) {
  if (first < 0 || count <= 0 || first + count > a.rows())
    throw ShapeMismatch("rows: slice out of range");
  Tape& t = tape_of(a);
  const bool rg = wants_grad(a);
  Var out = t.make(a.value().middleRows(first, count), rg, nullptr);
  if (rg && t.grad_enabled()) {
    const int oi = out.index(), ai = a.index();
    t.node(oi).backward = [&t, oi, ai, first, count] {
      t.grad_buffer(ai).middleRows(first, count) += t.node(oi).grad;
    };
  }
  return out;
}

Var flatten_rowmajor(Var a) {
  Tape& t = tape_of(a);
  const Eigen::Index m = a.rows(), n = a.cols();
  Mat v(m * n, 1);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < n; ++c) v(r * n + c, 0) = a.value()(r, c);
  const bool rg = wants_grad(a);
  Var out = t.make(std::move(v), rg, nullptr);
  if (rg && t.grad_enabled()) {
    const int oi = out.index(), ai = a.index();
    t.node(oi).backward = [&t, oi, ai, m, n] {
      const Mat& g = t.node(oi).grad;
      Mat& ga = t.grad_buffer(ai);
      for (Eigen::Index r = 0; r < m; ++r)
        for (Eigen::Index c = 0; c < n; ++c) ga(r, c) += g(r * n + c, 0);
    };
  }
  return out;
}

Var cross_entropy(Var probs, int target_index, double eps) {
  if (probs.cols() != 1) throw ShapeMismatch("cross_entropy: probs must be a column vector");
  if (target_index < 0 || target_index >= probs.rows())
    throw IdOutOfRange("cross_entropy: target index " + std::to_string(target_index));
  Tape& t = tape_of(probs);
  const double p = probs.value()(target_index, 0);
  Mat v(1, 1);
  v(0, 0) = -std::log(std::max(p, eps));
  const bool rg = wants_grad(probs);
  Var out = t.make(std::move(v), rg, nullptr);
  if (rg && t.grad_enabled()) {
    const int oi = out.index(), pi = probs.index();
    t.node(oi).backward = [&t, oi, pi, target_index, eps] {
      const double pv = t.node(pi).value(target_index, 0);
      if (pv > eps)
        t.grad_buffer(pi)(target_index, 0) -= t.node(oi).grad(0, 0) / pv;
    };
  }
  return out;
}

Mat im2col(const Mat& input, const ConvGeom& geom) {
  const int k = geom.kernel, p = geom.pad(), s = geom.stride;
  const int oh = geom.out_h(), ow = geom.out_w();
  Mat patches = Mat::Zero(static_cast<Eigen::Index>(geom.in_channels) * k * k,
                          static_cast<Eigen::Index>(oh) * ow);
  for (int c = 0; c < geom.in_channels; ++c) {
    for (int dy = 0; dy < k; ++dy) {
      for (int dx = 0; dx < k; ++dx) {
        const Eigen::Index prow = (static_cast<Eigen::Index>(c) * k + dy) * k + dx;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * s - p + dy;
          if (iy < 0 || iy >= geom.in_h) continue;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * s - p + dx;
            if (ix < 0 || ix >= geom.in_w) continue;
            patches(prow, static_cast<Eigen::Index>(oy) * ow + ox) =
                input(c, static_cast<Eigen::Index>(iy) * geom.in_w + ix);
          }
        }
      }
    }
  }
  return patches;
}

namespace {

Mat col2im(const Mat& patch_grad, const ConvGeom& geom) {
  const int k = geom.kernel, p = geom.pad(), s = geom.stride;
  const int oh = geom.out_h(), ow = geom.out_w();
  Mat input_grad = Mat::Zero(geom.in_channels,
                             static_cast<Eigen::Index>(geom.in_h) * geom.in_w);
  for (int c = 0; c < geom.in_channels; ++c) {
    for (int dy = 0; dy < k; ++dy) {
      for (int dx = 0; dx < k; ++dx) {
        const Eigen::Index prow = (static_cast<Eigen::Index>(c) * k + dy) * k + dx;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * s - p + dy;
          if (iy < 0 || iy >= geom.in_h) continue;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * s - p + dx;
            if (ix < 0 || ix >= geom.in_w) continue;
            input_grad(c, static_cast<Eigen::Index>(iy) * geom.in_w + ix) +=
                patch_grad(prow, static_cast<Eigen::Index>(oy) * ow + ox);
          }
        }
      }
    }
  }
  return input_grad;
}

}  // namespace

Var conv2d(Var input, Var kernel, ConvGeom geom) {
  if (input.rows() != geom.in_channels ||
      input.cols() != static_cast<Eigen::Index>(geom.in_h) * geom.in_w)
    throw ShapeMismatch("conv2d: input does not match geometry");
  if (kernel.rows() != geom.out_channels ||
      kernel.cols() != static_cast<Eigen::Index>(geom.in_channels) * geom.kernel * geom.kernel)
    throw ShapeMismatch("conv2d: kernel does not match geometry");
  if (geom.kernel % 2 == 0) throw InvalidConfig("conv2d: kernel must be odd");

  Tape& t = tape_of(input);
  Mat patches = im2col(input.value(), geom);
  Mat value = kernel.value() * patches;
  const bool rg = wants_grad(input) || wants_grad(kernel);
  Var out = t.make(std::move(value), rg, nullptr);
  if (rg && t.grad_enabled()) {
    const int oi = out.index(), ii = input.index(), ki = kernel.index();
    // patches are recomputed in backward rather than captured: for large
    // inputs the patch matrix dominates memory
    t.node(oi).backward = [&t, oi, ii, ki, geom] {
      const Mat& g = t.node(oi).grad;
      if (t.node(ki).requires_grad) {
        Mat patches_again = im2col(t.node(ii).value, geom);
        t.grad_buffer(ki) += g * patches_again.transpose();
      }
      if (t.node(ii).requires_grad) {
        Mat patch_grad = t.node(ki).value.transpose() * g;
        t.grad_buffer(ii) += col2im(patch_grad, geom);
      }
    };
  }
  return out;
}

Var maxpool2d(Var input, PoolGeom geom) {
  if (input.rows() != geom.channels ||
      input.cols() != static_cast<Eigen::Index>(geom.in_h) * geom.in_w)
    throw ShapeMismatch("maxpool2d: input does not match geometry");
  Tape& t = tape_of(input);
  const int oh = geom.out_h(), ow = geom.out_w();
  Mat value(geom.channels, static_cast<Eigen::Index>(oh) * ow);
  std::vector<Eigen::Index> argmax(static_cast<size_t>(geom.channels) * oh * ow);
  for (int c = 0; c < geom.channels; ++c) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        double best = -std::numeric_limits<double>::infinity();
        Eigen::Index best_idx = 0;
        for (int dy = 0; dy < geom.window; ++dy) {
          const int iy = oy * geom.stride + dy;
          if (iy >= geom.in_h) break;
          for (int dx = 0; dx < geom.window; ++dx) {
            const int ix = ox * geom.stride + dx;
            if (ix >= geom.in_w) break;
            const Eigen::Index idx = static_cast<Eigen::Index>(iy) * geom.in_w + ix;
            const double v = input.value()(c, idx);
            if (v > best) {
              best = v;
              best_idx = idx;
            }
          }
        }
        value(c, static_cast<Eigen::Index>(oy) * ow + ox) = best;
        argmax[(static_cast<size_t>(c) * oh + oy) * ow + ox] = best_idx;
      }
    }
  }
  const bool rg = wants_grad(input);
  Var out = t.make(std::move(value), rg, nullptr);
  if (rg && t.grad_enabled()) {
    const int oi = out.index(), ii = input.index();
    t.node(oi).backward = [&t, oi, ii, geom, argmax = std::move(argmax), oh, ow] {
      const Mat& g = t.node(oi).grad;
      Mat& gi = t.grad_buffer(ii);
      for (int c = 0; c < geom.channels; ++c)
        for (int oy = 0; oy < oh; ++oy)
          for (int ox = 0; ox < ow; ++ox)
            gi(c, argmax[(static_cast<size_t>(c) * oh + oy) * ow + ox]) +=
                g(c, static_cast<Eigen::Index>(oy) * ow + ox);
    };
  }
  return out;
}

}  // namespace gaitface::ad
