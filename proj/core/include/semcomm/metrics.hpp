// Sequence and image fidelity metrics, and the scalar-reward interface used
// by the similarity-driven training regimes. All functions are pure; none
// needs to be differentiable.

#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "semcomm/corpus.hpp"

namespace semcomm::metrics {

using Tokens = std::vector<std::string>;

// word-level Levenshtein distance / |ref|; may exceed 1
double wer(const Tokens& ref, const Tokens& hyp);

// per-position mismatch rate variant (length differences count as errors)
double wer_positional(const Tokens& ref, const Tokens& hyp);

// Modified n-gram precision BLEU with add-one smoothing on zero precisions
// for n >= 2 and brevity penalty exp(min(0, 1 - r/c)).
double bleu(const std::vector<Tokens>& refs, const Tokens& hyp, int max_n = 4);

// Document-frequency statistics for CIDEr-D, one document per corpus line.
class IdfStats {
 public:
  static IdfStats build(const std::vector<Tokens>& documents, int max_n = 4);

  double n_documents() const { return n_docs_; }
  double doc_freq(const Tokens& ngram) const;

  void save(const std::string& path) const;  // text table: df <tab> tokens
  static IdfStats load(const std::string& path);

 private:
  std::map<Tokens, double> df_;
  double n_docs_ = 0;
  friend double cider_d(const std::vector<Tokens>&, const Tokens&, const IdfStats&);
};

// Consensus TF-IDF n-gram similarity in [0, 10]: raw term frequencies
// weighted by log(N/df), clipped against the reference vector, cosine
// normalized per order n = 1..4, Gaussian length penalty (sigma = 6),
// averaged over n and references, scaled by 10.
double cider_d(const std::vector<Tokens>& refs, const Tokens& hyp, const IdfStats& idf);

double mse(const corpus::ImageMessage& a, const corpus::ImageMessage& b);

// mse(target, img_t) - mse(target, img_t1): positive when quality improved
double mse_gain(const corpus::ImageMessage& target, const corpus::ImageMessage& img_t,
                const corpus::ImageMessage& img_t1);

// Named scalar scorer over token sequences. `differentiable` tells the
// trainer whether gradient descent can see through it.
struct SimilarityMetric {
  std::string name;
  bool differentiable = false;
  std::function<double(const std::vector<Tokens>& refs, const Tokens& hyp)> score;
};

// known names: cider_d (needs idf), bleu, neg_wer, masked_ce (differentiable)
SimilarityMetric make_metric(const std::string& name, const IdfStats* idf = nullptr);

}  // namespace semcomm::metrics
