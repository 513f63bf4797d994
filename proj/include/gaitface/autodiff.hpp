#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace gaitface::ad {

using Mat = Eigen::MatrixXd;

class Tape;

// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, int index) : tape_(tape), index_(index) {}

  const Mat& value() const;
  const Mat& grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }
  bool valid() const { return tape_ != nullptr; }

  Tape* tape() const { return tape_; }
  int index() const { return index_; }

 private:
  Tape* tape_ = nullptr;
  int index_ = -1;
};

// Reverse-mode tape over dense matrices. Nodes are appended in evaluation
// order, so reverse creation order is a valid topological order for the
// backward sweep. One tape per forward/backward pass; single-threaded.
class Tape {
 public:
  struct Node {
    Mat value;
    Mat grad;  // empty until touched by backward
    std::function<void()> backward;
    bool requires_grad = false;
  };

  // When false, ops skip closure construction; forward values only.
  void set_grad_enabled(bool enabled) { grad_enabled_ = enabled; }
  bool grad_enabled() const { return grad_enabled_; }

  Var leaf(Mat value, bool requires_grad = false);
  Var make(Mat value, bool requires_grad, std::function<void()> backward);

  // Seeds d(loss)/d(loss) = 1 and sweeps the tape in reverse. loss must be
  // 1x1 and grad-enabled.
  void backward(Var loss);

  Node& node(int i) { return nodes_[static_cast<size_t>(i)]; }
  const Node& node(int i) const { return nodes_[static_cast<size_t>(i)]; }
  Mat& grad_buffer(int i);  // zero-initialized on first access
  size_t size() const { return nodes_.size(); }

 private:
  std::vector<Node> nodes_;
  bool grad_enabled_ = true;
};

// ---- elementwise and linear-algebra ops ----
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var cmul(Var a, Var b);          // Hadamard product
Var cdiv(Var a, Var b);          // elementwise quotient
Var scale(Var a, double c);      // constant scalar multiply
Var smul(Var a, Var s);          // multiply by a 1x1 node
Var matmul(Var a, Var b, bool trans_a = false, bool trans_b = false);
Var colbias(Var a, Var bias);    // a(m x n) + bias(m x 1) broadcast over columns
Var tanh_op(Var a);
Var sigmoid_op(Var a);
Var softmax_flat(Var a);         // softmax over all entries, numerically stable
Var sum(Var a);                  // 1x1
Var norm2(Var a);                // Euclidean norm over all entries, 1x1
Var vstack(Var a, Var b);
Var hstack(const std::vector<Var>& parts);
Var rows(Var a, int first, int count);
Var flatten_rowmajor(Var a);     // (m x n) -> (m*n x 1), index r*n + c

// -ln(max(probs[k], eps)); probs is a column vector.
Var cross_entropy(Var probs, int target_index, double eps = 1e-12);

// ---- spatial ops over channel-major feature maps (channels x h*w) ----
struct ConvGeom {
  int in_channels = 0;
  int in_h = 0;
  int in_w = 0;
  int out_channels = 0;
  int kernel = 3;  // square, odd
  int stride = 1;
  int out_h() const { return (in_h + 2 * pad() - kernel) / stride + 1; }
  int out_w() const { return (in_w + 2 * pad() - kernel) / stride + 1; }
  int pad() const { return (kernel - 1) / 2; }  // "same" padding at stride 1
};

// kernel layout: (out_channels) x (in_channels * kernel * kernel),
// column index = (c_in * kernel + dy) * kernel + dx.
Var conv2d(Var input, Var kernel, ConvGeom geom);

struct PoolGeom {
  int channels = 0;
  int in_h = 0;
  int in_w = 0;
  int window = 2;
  int stride = 2;
  // ceil-division so odd trailing rows/cols still pool (truncated window)
  int out_h() const { return (in_h + stride - 1) / stride; }
  int out_w() const { return (in_w + stride - 1) / stride; }
};

Var maxpool2d(Var input, PoolGeom geom);

// im2col patch matrix for conv2d: (in_channels*k*k) x (out_h*out_w).
// Exposed for reuse by the backward pass and by tests.
Mat im2col(const Mat& input, const ConvGeom& geom);

}  // namespace gaitface::ad
