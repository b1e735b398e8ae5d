#include "semcomm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace semcomm::metrics {

double wer(const Tokens& ref, const Tokens& hyp) {
  if (ref.empty()) throw std::invalid_argument("wer: empty reference");
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[m]) / static_cast<double>(n);
}

double wer_positional(const Tokens& ref, const Tokens& hyp) {
  if (ref.empty()) throw std::invalid_argument("wer_positional: empty reference");
  const std::size_t upto = std::min(ref.size(), hyp.size());
  std::size_t errors = std::max(ref.size(), hyp.size()) - upto;
  for (std::size_t i = 0; i < upto; ++i) errors += (ref[i] != hyp[i]) ? 1 : 0;
  return static_cast<double>(errors) / static_cast<double>(ref.size());
}

namespace {

std::map<Tokens, int> ngram_counts(const Tokens& toks, int n) {
  std::map<Tokens, int> counts;
  if (static_cast<int>(toks.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    ++counts[Tokens(toks.begin() + i, toks.begin() + i + n)];
  }
  return counts;
}

std::map<Tokens, int> ngram_counts_upto(const Tokens& toks, int max_n) {
  std::map<Tokens, int> counts;
  for (int n = 1; n <= max_n; ++n) {
    for (auto& [ng, c] : ngram_counts(toks, n)) counts[ng] += c;
  }
  return counts;
}

}  // namespace

double bleu(const std::vector<Tokens>& refs, const Tokens& hyp, int max_n) {
  if (refs.empty()) throw std::invalid_argument("bleu: no references");
  for (const auto& r : refs) {
    if (r.empty()) throw std::invalid_argument("bleu: empty reference");
  }
  if (hyp.empty()) return 0.0;

  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    const auto hyp_counts = ngram_counts(hyp, n);
    int total = 0, matched = 0;
    for (const auto& [ng, c] : hyp_counts) {
      total += c;
      int best = 0;
      for (const auto& r : refs) {
        const auto rc = ngram_counts(r, n);
        auto it = rc.find(ng);
        if (it != rc.end()) best = std::max(best, it->second);
      }
      matched += std::min(c, best);
    }
    double num, den;
    if (total == 0) {
      num = den = 1.0;  // hypothesis has no n-grams of this order
    } else if (matched == 0) {
      if (n == 1) return 0.0;  // no unigram overlap at all
      num = 1.0;
      den = static_cast<double>(total) + 1.0;  // add-one smoothing
    } else {
      num = static_cast<double>(matched);
      den = static_cast<double>(total);
    }
    log_sum += std::log(num / den);
  }

  const double c = static_cast<double>(hyp.size());
  // effective reference length: closest to c, ties toward the shorter
  double r = static_cast<double>(refs.front().size());
  for (const auto& ref : refs) {
    const double len = static_cast<double>(ref.size());
    if (std::abs(len - c) < std::abs(r - c) || (std::abs(len - c) == std::abs(r - c) && len < r)) {
      r = len;
    }
  }
  const double bp = std::exp(std::min(0.0, 1.0 - r / c));
  return std::exp(log_sum / static_cast<double>(max_n)) * bp;
}

IdfStats IdfStats::build(const std::vector<Tokens>& documents, int max_n) {
  if (documents.empty()) throw std::invalid_argument("IdfStats: need at least one document");
  IdfStats s;
  s.n_docs_ = static_cast<double>(documents.size());
  for (const auto& doc : documents) {
    for (const auto& [ng, c] : ngram_counts_upto(doc, max_n)) {
      (void)c;
      s.df_[ng] += 1.0;
    }
  }
  return s;
}

double IdfStats::doc_freq(const Tokens& ngram) const {
  auto it = df_.find(ngram);
  return it == df_.end() ? 0.0 : it->second;
}

void IdfStats::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write idf table: " + path);
  out << "#docs\t" << n_docs_ << "\n";
  for (const auto& [ng, df] : df_) {
    out << df << "\t";
    for (std::size_t i = 0; i < ng.size(); ++i) out << (i ? " " : "") << ng[i];
    out << "\n";
  }
}

IdfStats IdfStats::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read idf table: " + path);
  IdfStats s;
  std::string line;
  if (!std::getline(in, line) || line.rfind("#docs\t", 0) != 0) {
    throw std::runtime_error("idf table missing #docs header: " + path);
  }
  s.n_docs_ = std::stod(line.substr(6));
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    const double df = std::stod(line.substr(0, tab));
    Tokens ng;
    std::istringstream rest(line.substr(tab + 1));
    std::string tok;
    while (rest >> tok) ng.push_back(tok);
    s.df_[ng] = df;
  }
  return s;
}

namespace {
constexpr int kCiderOrders = 4;
constexpr double kCiderSigma = 6.0;

struct TfidfVec {
  std::map<Tokens, double> w[kCiderOrders];
  double norm[kCiderOrders] = {0, 0, 0, 0};
  int length = 0;
};

TfidfVec tfidf(const Tokens& toks, const IdfStats& idf) {
  TfidfVec v;
  v.length = static_cast<int>(toks.size());
  const double log_n = std::log(std::max(1.0, idf.n_documents()));
  for (int n = 1; n <= kCiderOrders; ++n) {
    for (const auto& [ng, tf] : ngram_counts(toks, n)) {
      const double w = tf * (log_n - std::log(std::max(1.0, idf.doc_freq(ng))));
      v.w[n - 1][ng] = w;
      v.norm[n - 1] += w * w;
    }
  }
  for (double& x : v.norm) x = std::sqrt(x);
  return v;
}
}  // namespace

double cider_d(const std::vector<Tokens>& refs, const Tokens& hyp, const IdfStats& idf) {
  if (refs.empty() || hyp.empty()) return 0.0;
  const TfidfVec vh = tfidf(hyp, idf);
  double score = 0.0;
  for (const auto& ref : refs) {
    if (ref.empty()) continue;
    const TfidfVec vr = tfidf(ref, idf);
    const double delta = static_cast<double>(vh.length - vr.length);
    const double penalty = std::exp(-(delta * delta) / (2.0 * kCiderSigma * kCiderSigma));
    for (int n = 0; n < kCiderOrders; ++n) {
      double val = 0.0;
      for (const auto& [ng, w] : vh.w[n]) {
        auto it = vr.w[n].find(ng);
        if (it != vr.w[n].end()) val += std::min(w, it->second) * it->second;
      }
      if (vh.norm[n] != 0.0 && vr.norm[n] != 0.0) val /= vh.norm[n] * vr.norm[n];
      score += val * penalty;
    }
  }
  return 10.0 * score / kCiderOrders / static_cast<double>(refs.size());
}

double mse(const corpus::ImageMessage& a, const corpus::ImageMessage& b) {
  if (a.height != b.height || a.width != b.width || a.channels != b.channels) {
    throw std::invalid_argument("mse: shape mismatch");
  }
  return (a.pixels - b.pixels).squaredNorm() / static_cast<double>(a.size());
}

double mse_gain(const corpus::ImageMessage& target, const corpus::ImageMessage& img_t,
                const corpus::ImageMessage& img_t1) {
  return mse(target, img_t) - mse(target, img_t1);
}

SimilarityMetric make_metric(const std::string& name, const IdfStats* idf) {
  SimilarityMetric m;
  m.name = name;
  if (name == "cider_d") {
    if (!idf) throw std::invalid_argument("cider_d metric needs idf statistics");
    IdfStats stats = *idf;  // own a copy; the metric must stay pure
    m.score = [stats](const std::vector<Tokens>& refs, const Tokens& hyp) {
      return cider_d(refs, hyp, stats);
    };
  } else if (name == "bleu") {
    m.score = [](const std::vector<Tokens>& refs, const Tokens& hyp) {
      return bleu(refs, hyp);
    };
  } else if (name == "neg_wer") {
    m.score = [](const std::vector<Tokens>& refs, const Tokens& hyp) {
      double best = -1e300;
      for (const auto& r : refs) best = std::max(best, -wer(r, hyp));
      return best;
    };
  } else if (name == "masked_ce") {
    // differentiable path: the trainer computes the loss itself
    m.differentiable = true;
    m.score = [](const std::vector<Tokens>&, const Tokens&) -> double {
      throw std::logic_error("masked_ce is evaluated inside the trainer");
    };
  } else {
    throw std::invalid_argument("unknown metric: " + name);
  }
  return m;
}

}  // namespace semcomm::metrics
