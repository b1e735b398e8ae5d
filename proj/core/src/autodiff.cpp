#include "semcomm/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace semcomm::ad {

namespace {
void check_same_shape(const Mat& a, const Mat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch (" +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()) + ")");
  }
}
}  // namespace

Var Tape::leaf(Mat value, bool needs_grad) {
  return emit(std::move(value), needs_grad, {});
}

Var Tape::emit(Mat value, bool needs_grad, std::function<void()> back) {
  Node n;
  n.val = std::move(value);
  n.back = std::move(back);
  n.needs_grad = needs_grad;
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1, this};
}

void Tape::backward(Var root) {
  if (nodes_[root.idx].val.size() != 1) {
    throw std::invalid_argument("backward: root must be a scalar (1x1)");
  }
  if (!nodes_[root.idx].needs_grad) {
    throw std::invalid_argument("backward: root does not depend on any differentiable leaf");
  }
  // Gradients are materialized only for differentiable nodes; constants and
  // pure-inference tapes never allocate them.
  for (int i = 0; i <= root.idx; ++i) {
    Node& n = nodes_[i];
    if (n.needs_grad) {
      n.grad.resize(n.val.rows(), n.val.cols());
      n.grad.setZero();
    }
  }
  nodes_[root.idx].grad(0, 0) = 1.0;
  for (int i = root.idx; i >= 0; --i) {
    if (nodes_[i].needs_grad && nodes_[i].back) nodes_[i].back();
  }
}

void Tape::reset() { nodes_.clear(); }

Var add(Var a, Var b) {
  Tape* t = a.tape;
  check_same_shape(t->val(a), t->val(b), "add");
  bool ng = t->node(a).needs_grad || t->node(b).needs_grad;
  Var out = t->emit(t->val(a) + t->val(b), ng, {});
  if (ng) {
    t->node(out).back = [t, a, b, out]() {
      if (t->node(a).needs_grad) t->node(a).grad += t->grad(out);
      if (t->node(b).needs_grad) t->node(b).grad += t->grad(out);
    };
  }
  return out;
}

Var sub(Var a, Var b) {
  Tape* t = a.tape;
  check_same_shape(t->val(a), t->val(b), "sub");
  bool ng = t->node(a).needs_grad || t->node(b).needs_grad;
  Var out = t->emit(t->val(a) - t->val(b), ng, {});
  if (ng) {
    t->node(out).back = [t, a, b, out]() {
      if (t->node(a).needs_grad) t->node(a).grad += t->grad(out);
      if (t->node(b).needs_grad) t->node(b).grad -= t->grad(out);
    };
  }
  return out;
}

Var mul(Var a, Var b) {
  Tape* t = a.tape;
  check_same_shape(t->val(a), t->val(b), "mul");
  bool ng = t->node(a).needs_grad || t->node(b).needs_grad;
  Var out = t->emit(t->val(a).cwiseProduct(t->val(b)), ng, {});
  if (ng) {
    t->node(out).back = [t, a, b, out]() {
      if (t->node(a).needs_grad) t->node(a).grad += t->grad(out).cwiseProduct(t->val(b));
      if (t->node(b).needs_grad) t->node(b).grad += t->grad(out).cwiseProduct(t->val(a));
    };
  }
  return out;
}

Var scale(Var a, double c) {
  Tape* t = a.tape;
  bool ng = t->node(a).needs_grad;
  Var out = t->emit(t->val(a) * c, ng, {});
  if (ng) {
    t->node(out).back = [t, a, out, c]() { t->node(a).grad += t->grad(out) * c; };
  }
  return out;
}

Var add_const(Var a, const Mat& c) {
  Tape* t = a.tape;
  check_same_shape(t->val(a), c, "add_const");
  bool ng = t->node(a).needs_grad;
  Var out = t->emit(t->val(a) + c, ng, {});
  if (ng) {
    t->node(out).back = [t, a, out]() { t->node(a).grad += t->grad(out); };
  }
  return out;
}

Var matmul(Var a, Var b) {
  Tape* t = a.tape;
  if (t->val(a).cols() != t->val(b).rows()) {
    throw std::invalid_argument("matmul: inner dimensions differ");
  }
  bool ng = t->node(a).needs_grad || t->node(b).needs_grad;
  Var out = t->emit(t->val(a) * t->val(b), ng, {});
  if (ng) {
    t->node(out).back = [t, a, b, out]() {
      if (t->node(a).needs_grad) t->node(a).grad.noalias() += t->grad(out) * t->val(b).transpose();
      if (t->node(b).needs_grad) t->node(b).grad.noalias() += t->val(a).transpose() * t->grad(out);
    };
  }
  return out;
}

Var transpose(Var a) {
  Tape* t = a.tape;
  bool ng = t->node(a).needs_grad;
  Var out = t->emit(t->val(a).transpose(), ng, {});
  if (ng) {
    t->node(out).back = [t, a, out]() { t->node(a).grad += t->grad(out).transpose(); };
  }
  return out;
}

Var sigmoid(Var a) {
  Tape* t = a.tape;
  bool ng = t->node(a).needs_grad;
  Mat s = t->val(a).unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
  Var out = t->emit(std::move(s), ng, {});
  if (ng) {
    t->node(out).back = [t, a, out]() {
      const Mat& s = t->val(out);
      t->node(a).grad.array() += t->grad(out).array() * s.array() * (1.0 - s.array());
    };
  }
  return out;
}

Var tanh_(Var a) {
  Tape* t = a.tape;
  bool ng = t->node(a).needs_grad;
  Var out = t->emit(t->val(a).array().tanh().matrix(), ng, {});
  if (ng) {
    t->node(out).back = [t, a, out]() {
      const Mat& y = t->val(out);
      t->node(a).grad.array() += t->grad(out).array() * (1.0 - y.array().square());
    };
  }
  return out;
}

Var relu(Var a) {
  Tape* t = a.tape;
  bool ng = t->node(a).needs_grad;
  Var out = t->emit(t->val(a).cwiseMax(0.0), ng, {});
  if (ng) {
    t->node(out).back = [t, a, out]() {
      t->node(a).grad.array() +=
          t->grad(out).array() * (t->val(a).array() > 0.0).cast<double>();
    };
  }
  return out;
}

Var log_(Var a) {
  Tape* t = a.tape;
  bool ng = t->node(a).needs_grad;
  Var out = t->emit(t->val(a).array().log().matrix(), ng, {});
  if (ng) {
    t->node(out).back = [t, a, out]() {
      t->node(a).grad.array() += t->grad(out).array() / t->val(a).array();
    };
  }
  return out;
}

Var exp_(Var a) {
  Tape* t = a.tape;
  bool ng = t->node(a).needs_grad;
  Var out = t->emit(t->val(a).array().exp().matrix(), ng, {});
  if (ng) {
    t->node(out).back = [t, a, out]() {
      t->node(a).grad.array() += t->grad(out).array() * t->val(out).array();
    };
  }
  return out;
}

Var row_softmax(Var a, const Mat* add_mask) {
  Tape* t = a.tape;
  Mat z = t->val(a);
  if (add_mask) {
    check_same_shape(z, *add_mask, "row_softmax mask");
    z += *add_mask;
  }
  for (int r = 0; r < z.rows(); ++r) {
    const double m = z.row(r).maxCoeff();
    z.row(r) = (z.row(r).array() - m).exp();
    z.row(r) /= z.row(r).sum();
  }
  bool ng = t->node(a).needs_grad;
  Var out = t->emit(std::move(z), ng, {});
  if (ng) {
    t->node(out).back = [t, a, out]() {
      const Mat& p = t->val(out);
      const Mat& g = t->grad(out);
      for (int r = 0; r < p.rows(); ++r) {
        const double dot = g.row(r).dot(p.row(r));
        t->node(a).grad.row(r).array() += p.row(r).array() * (g.row(r).array() - dot);
      }
    };
  }
  return out;
}

Var row_log_softmax(Var a) {
  Tape* t = a.tape;
  Mat z = t->val(a);
  for (int r = 0; r < z.rows(); ++r) {
    const double m = z.row(r).maxCoeff();
    const double lse = std::log((z.row(r).array() - m).exp().sum()) + m;
    z.row(r).array() -= lse;
  }
  bool ng = t->node(a).needs_grad;
  Var out = t->emit(std::move(z), ng, {});
  if (ng) {
    t->node(out).back = [t, a, out]() {
      const Mat& ls = t->val(out);
      const Mat& g = t->grad(out);
      for (int r = 0; r < ls.rows(); ++r) {
        const double gsum = g.row(r).sum();
        t->node(a).grad.row(r).array() += g.row(r).array() - gsum * ls.row(r).array().exp();
      }
    };
  }
  return out;
}

Var layer_norm_rows(Var x, Var gain, Var bias) {
  Tape* t = x.tape;
  constexpr double kEps = 1e-5;
  const Mat& xv = t->val(x);
  const int cols = static_cast<int>(xv.cols());
  if (t->val(gain).rows() != 1 || t->val(gain).cols() != cols ||
      t->val(bias).rows() != 1 || t->val(bias).cols() != cols) {
    throw std::invalid_argument("layer_norm_rows: gain/bias must be 1 x cols");
  }
  Mat xhat(xv.rows(), cols);
  Eigen::VectorXd inv_std(xv.rows());
  Mat y(xv.rows(), cols);
  for (int r = 0; r < xv.rows(); ++r) {
    const double mu = xv.row(r).mean();
    const double var = (xv.row(r).array() - mu).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + kEps);
    xhat.row(r) = (xv.row(r).array() - mu).matrix() * inv_std(r);
    y.row(r) = xhat.row(r).cwiseProduct(t->val(gain).row(0)) + t->val(bias).row(0);
  }
  bool ng = t->node(x).needs_grad || t->node(gain).needs_grad || t->node(bias).needs_grad;
  Var out = t->emit(std::move(y), ng, {});
  if (ng) {
    t->node(out).back = [t, x, gain, bias, out, xhat, inv_std]() {
      const Mat& g = t->grad(out);
      if (t->node(bias).needs_grad) t->node(bias).grad += g.colwise().sum();
      if (t->node(gain).needs_grad) t->node(gain).grad += g.cwiseProduct(xhat).colwise().sum();
      if (t->node(x).needs_grad) {
        for (int r = 0; r < g.rows(); ++r) {
          const Eigen::RowVectorXd gg = g.row(r).cwiseProduct(t->val(gain).row(0));
          const double m1 = gg.mean();
          const double m2 = gg.cwiseProduct(xhat.row(r)).mean();
          t->node(x).grad.row(r).array() +=
              inv_std(r) * (gg.array() - m1 - xhat.row(r).array() * m2);
        }
      }
    };
  }
  return out;
}

Var bias_add_rows(Var x, Var bias) {
  Tape* t = x.tape;
  if (t->val(bias).rows() != 1 || t->val(bias).cols() != t->val(x).cols()) {
    throw std::invalid_argument("bias_add_rows: bias must be 1 x cols");
  }
  bool ng = t->node(x).needs_grad || t->node(bias).needs_grad;
  Mat y = t->val(x).rowwise() + t->val(bias).row(0);
  Var out = t->emit(std::move(y), ng, {});
  if (ng) {
    t->node(out).back = [t, x, bias, out]() {
      if (t->node(x).needs_grad) t->node(x).grad += t->grad(out);
      if (t->node(bias).needs_grad) t->node(bias).grad += t->grad(out).colwise().sum();
    };
  }
  return out;
}

Var slice_cols(Var a, int col0, int ncols) {
  Tape* t = a.tape;
  bool ng = t->node(a).needs_grad;
  Var out = t->emit(t->val(a).middleCols(col0, ncols), ng, {});
  if (ng) {
    t->node(out).back = [t, a, out, col0, ncols]() {
      t->node(a).grad.middleCols(col0, ncols) += t->grad(out);
    };
  }
  return out;
}

Var hstack(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("hstack: empty");
  Tape* t = parts.front().tape;
  int cols = 0;
  bool ng = false;
  const auto rows = t->val(parts.front()).rows();
  for (Var p : parts) {
    if (t->val(p).rows() != rows) throw std::invalid_argument("hstack: row mismatch");
    cols += static_cast<int>(t->val(p).cols());
    ng = ng || t->node(p).needs_grad;
  }
  Mat y(rows, cols);
  int c = 0;
  for (Var p : parts) {
    y.middleCols(c, t->val(p).cols()) = t->val(p);
    c += static_cast<int>(t->val(p).cols());
  }
  Var out = t->emit(std::move(y), ng, {});
  if (ng) {
    std::vector<Var> ps = parts;
    t->node(out).back = [t, ps, out]() {
      int c = 0;
      for (Var p : ps) {
        const int w = static_cast<int>(t->val(p).cols());
        if (t->node(p).needs_grad) t->node(p).grad += t->grad(out).middleCols(c, w);
        c += w;
      }
    };
  }
  return out;
}

Var sum_all(Var a) {
  Tape* t = a.tape;
  bool ng = t->node(a).needs_grad;
  Var out = t->emit(Mat::Constant(1, 1, t->val(a).sum()), ng, {});
  if (ng) {
    t->node(out).back = [t, a, out]() { t->node(a).grad.array() += t->grad(out)(0, 0); };
  }
  return out;
}

Var mean_all(Var a) {
  Tape* t = a.tape;
  bool ng = t->node(a).needs_grad;
  const double n = static_cast<double>(t->val(a).size());
  Var out = t->emit(Mat::Constant(1, 1, t->val(a).sum() / n), ng, {});
  if (ng) {
    t->node(out).back = [t, a, out, n]() {
      t->node(a).grad.array() += t->grad(out)(0, 0) / n;
    };
  }
  return out;
}

Var mul_scalar(Var a, Var s) {
  Tape* t = a.tape;
  if (t->val(s).size() != 1) throw std::invalid_argument("mul_scalar: s must be 1x1");
  bool ng = t->node(a).needs_grad || t->node(s).needs_grad;
  Var out = t->emit(t->val(a) * t->val(s)(0, 0), ng, {});
  if (ng) {
    t->node(out).back = [t, a, s, out]() {
      if (t->node(a).needs_grad) t->node(a).grad += t->grad(out) * t->val(s)(0, 0);
      if (t->node(s).needs_grad)
        t->node(s).grad(0, 0) += t->grad(out).cwiseProduct(t->val(a)).sum();
    };
  }
  return out;
}

Var gather_rows(Var table, const std::vector<int>& row_ids) {
  Tape* t = table.tape;
  Mat y(static_cast<int>(row_ids.size()), t->val(table).cols());
  for (std::size_t i = 0; i < row_ids.size(); ++i) {
    if (row_ids[i] < 0 || row_ids[i] >= t->val(table).rows()) {
      throw std::out_of_range("gather_rows: row id out of range");
    }
    y.row(static_cast<int>(i)) = t->val(table).row(row_ids[i]);
  }
  bool ng = t->node(table).needs_grad;
  Var out = t->emit(std::move(y), ng, {});
  if (ng) {
    std::vector<int> ids = row_ids;
    t->node(out).back = [t, table, out, ids]() {
      for (std::size_t i = 0; i < ids.size(); ++i) {
        t->node(table).grad.row(ids[i]) += t->grad(out).row(static_cast<int>(i));
      }
    };
  }
  return out;
}

Var pick(Var a, const std::vector<std::pair<int, int>>& entries) {
  Tape* t = a.tape;
  Mat y(static_cast<int>(entries.size()), 1);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    y(static_cast<int>(i), 0) = t->val(a)(entries[i].first, entries[i].second);
  }
  bool ng = t->node(a).needs_grad;
  Var out = t->emit(std::move(y), ng, {});
  if (ng) {
    auto es = entries;
    t->node(out).back = [t, a, out, es]() {
      for (std::size_t i = 0; i < es.size(); ++i) {
        t->node(a).grad(es[i].first, es[i].second) += t->grad(out)(static_cast<int>(i), 0);
      }
    };
  }
  return out;
}

Var rms_normalize(Var a) {
  Tape* t = a.tape;
  const Mat& x = t->val(a);
  const double ms = x.squaredNorm() / static_cast<double>(x.size());
  if (ms == 0.0) throw std::domain_error("rms_normalize: zero-power block");
  const double inv_rms = 1.0 / std::sqrt(ms);
  bool ng = t->node(a).needs_grad;
  Var out = t->emit(x * inv_rms, ng, {});
  if (ng) {
    const double n = static_cast<double>(x.size());
    t->node(out).back = [t, a, out, inv_rms, n]() {
      const Mat& x = t->val(a);
      const Mat& g = t->grad(out);
      const double dot = g.cwiseProduct(x).sum();
      const double r3 = inv_rms * inv_rms * inv_rms;
      t->node(a).grad += inv_rms * g - (r3 / n) * dot * x;
    };
  }
  return out;
}

}  // namespace semcomm::ad
