// Neural-network plumbing shared by the transceiver and the image policy:
// named parameter store, Adam, tape binding, and transformer building
// blocks (pre-norm attention + feed-forward).

#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semcomm/autodiff.hpp"
#include "semcomm/rng.hpp"

namespace semcomm::nn {

using ad::Mat;
using ad::Tape;
using ad::Var;

// Insertion-ordered named tensors; order pins gradient/optimizer layout and
// checkpoint bytes.
class ParamStore {
 public:
  Mat& add(const std::string& name, int rows, int cols);
  Mat& get(const std::string& name);
  const Mat& at(const std::string& name) const;
  bool has(const std::string& name) const { return index_.count(name) > 0; }

  std::size_t tensor_count() const { return entries_.size(); }
  long scalar_count() const;

  std::vector<std::pair<std::string, Mat>>& entries() { return entries_; }
  const std::vector<std::pair<std::string, Mat>>& entries() const { return entries_; }
  std::size_t index_of(const std::string& name) const;

 private:
  std::vector<std::pair<std::string, Mat>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

void xavier_init(Mat& m, Rng& rng);
void gaussian_init(Mat& m, double stddev, Rng& rng);

// Leases parameters onto a tape (one leaf per parameter per tape) and
// collects their gradients back in store order after backward().
class TapeBinding {
 public:
  TapeBinding(Tape& tape, ParamStore& store, bool trainable)
      : tape_(&tape), store_(&store), trainable_(trainable) {}

  Var operator()(const std::string& name);

  // grads must have one entry per store tensor (same order)
  void accumulate_grads(std::vector<Mat>& grads) const;
  bool trainable() const { return trainable_; }

 private:
  Tape* tape_;
  ParamStore* store_;
  bool trainable_;
  std::unordered_map<std::string, Var> bound_;
};

std::vector<Mat> zero_grads(const ParamStore& store);
double global_grad_norm(const std::vector<Mat>& grads);

class AdamOptimizer {
 public:
  explicit AdamOptimizer(double lr, double beta1 = 0.9, double beta2 = 0.999,
                         double eps = 1e-8, double clip_norm = 1.0)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), clip_norm_(clip_norm) {}

  void step(ParamStore& params, std::vector<Mat>& grads);
  void set_lr(double lr) { lr_ = lr; }

 private:
  double lr_, beta1_, beta2_, eps_, clip_norm_;
  long t_ = 0;
  std::vector<Mat> m_, v_;
};

// ---- transformer pieces ----
// Parameter-creation helpers register the names the forward functions read.

void add_linear_params(ParamStore& p, const std::string& prefix, int in, int out, Rng& rng,
                       bool zero_init = false);
void add_layer_norm_params(ParamStore& p, const std::string& prefix, int dim);
void add_attention_params(ParamStore& p, const std::string& prefix, int dim, Rng& rng);
void add_encoder_block_params(ParamStore& p, const std::string& prefix, int dim, int ffn_dim,
                              Rng& rng);
void add_decoder_block_params(ParamStore& p, const std::string& prefix, int dim, int ffn_dim,
                              Rng& rng);

Var linear(Tape& t, TapeBinding& b, const std::string& prefix, Var x);
Var layer_norm(Tape& t, TapeBinding& b, const std::string& prefix, Var x);

// queries_in attends over keys_in (keys == values source). add_mask, when
// given, is added to every head's score matrix.
Var multihead_attention(Tape& t, TapeBinding& b, const std::string& prefix, Var queries_in,
                        Var keys_in, int n_heads, const Mat* add_mask = nullptr);

Var feed_forward(Tape& t, TapeBinding& b, const std::string& prefix, Var x);

// pre-norm residual blocks
Var encoder_block(Tape& t, TapeBinding& b, const std::string& prefix, Var x, int n_heads);
Var decoder_block(Tape& t, TapeBinding& b, const std::string& prefix, Var x, Var memory,
                  int n_heads, const Mat& causal);

Mat sinusoidal_positions(int length, int dim);
Mat causal_mask(int length);  // additive: 0 on/below diagonal, -1e30 above

}  // namespace semcomm::nn
