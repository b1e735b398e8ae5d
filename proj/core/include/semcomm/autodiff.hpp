// Reverse-mode automatic differentiation over Eigen matrices.
//
// Define-by-run tape: ops append nodes whose parents always have smaller
// indices, so the backward sweep is a single reverse pass over the node
// vector. Small fused ops (softmax, layer norm, rms normalization) keep the
// graph compact and numerically stable. Every op has a finite-difference
// test in tests/test_autodiff.cpp.

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace semcomm::ad {

using Mat = Eigen::MatrixXd;

class Tape;

struct Var {
  int idx = -1;
  Tape* tape = nullptr;
  bool valid() const { return idx >= 0 && tape != nullptr; }
};

class Tape {
 public:
  Var leaf(Mat value, bool needs_grad);
  Var constant(Mat value) { return leaf(std::move(value), false); }

  const Mat& val(Var v) const { return nodes_[v.idx].val; }
  const Mat& grad(Var v) const { return nodes_[v.idx].grad; }

  // Seeds d(root)/d(root) = 1 and sweeps the tape backwards. root must be 1x1.
  void backward(Var root);

  void reset();
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Mat val;
    Mat grad;
    std::function<void()> back;  // empty for leaves and constants
    bool needs_grad = false;
  };
  std::vector<Node> nodes_;

  Var emit(Mat value, bool needs_grad, std::function<void()> back);
  Node& node(Var v) { return nodes_[v.idx]; }

  friend Var add(Var, Var);
  friend Var sub(Var, Var);
  friend Var mul(Var, Var);
  friend Var scale(Var, double);
  friend Var add_const(Var, const Mat&);
  friend Var matmul(Var, Var);
  friend Var transpose(Var);
  friend Var sigmoid(Var);
  friend Var tanh_(Var);
  friend Var relu(Var);
  friend Var log_(Var);
  friend Var exp_(Var);
  friend Var row_softmax(Var, const Mat*);
  friend Var row_log_softmax(Var);
  friend Var layer_norm_rows(Var, Var, Var);
  friend Var bias_add_rows(Var, Var);
  friend Var slice_cols(Var, int, int);
  friend Var hstack(const std::vector<Var>&);
  friend Var sum_all(Var);
  friend Var mean_all(Var);
  friend Var mul_scalar(Var, Var);
  friend Var gather_rows(Var, const std::vector<int>&);
  friend Var pick(Var, const std::vector<std::pair<int, int>>&);
  friend Var rms_normalize(Var);
};

// elementwise / linear algebra
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);            // elementwise product
Var scale(Var a, double c);
Var add_const(Var a, const Mat& c);
Var matmul(Var a, Var b);
Var transpose(Var a);

// nonlinearities
Var sigmoid(Var a);
Var tanh_(Var a);
Var relu(Var a);
Var log_(Var a);
Var exp_(Var a);

// fused row-wise ops. mask, when given, is added to the logits before the
// softmax (use large negatives to knock positions out).
Var row_softmax(Var a, const Mat* add_mask = nullptr);
Var row_log_softmax(Var a);
Var layer_norm_rows(Var x, Var gain, Var bias);  // gain/bias are 1 x cols
Var bias_add_rows(Var x, Var bias);              // bias broadcast over rows

// shape ops
Var slice_cols(Var a, int col0, int ncols);
Var hstack(const std::vector<Var>& parts);

// reductions / broadcast
Var sum_all(Var a);   // 1x1
Var mean_all(Var a);  // 1x1
Var mul_scalar(Var a, Var s);  // s is 1x1, broadcast multiply

// indexed access
Var gather_rows(Var table, const std::vector<int>& row_ids);
Var pick(Var a, const std::vector<std::pair<int, int>>& entries);  // -> n x 1

// y = x / sqrt(mean(x^2)); throws on an all-zero block
Var rms_normalize(Var a);

}  // namespace semcomm::ad
