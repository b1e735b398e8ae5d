#include "semcomm/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <stdexcept>

namespace semcomm::corpus {

namespace {
const char* kSpecials[] = {"<pad>", "<bos>", "<eos>", "<unk>"};
}

int Vocabulary::id(const std::string& token) const {
  auto it = token_to_id.find(token);
  return it == token_to_id.end() ? kUnk : it->second;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write vocabulary: " + path);
  for (const auto& tok : id_to_token) out << tok << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read vocabulary: " + path);
  Vocabulary v;
  std::string line;
  while (std::getline(in, line)) {
    v.token_to_id.emplace(line, v.size());
    v.id_to_token.push_back(line);
  }
  if (v.size() < 4) throw std::runtime_error("vocabulary file too short: " + path);
  return v;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Vocabulary build_vocab(const std::vector<std::string>& lines, int min_freq) {
  if (min_freq < 1) throw std::invalid_argument("build_vocab: min_freq must be >= 1");
  std::map<std::string, int> freq;  // ordered map: lexicographic ties for free
  for (const auto& line : lines) {
    for (auto& tok : tokenize(line)) ++freq[tok];
  }
  std::vector<std::pair<std::string, int>> kept;
  for (const auto& [tok, n] : freq) {
    if (n >= min_freq) kept.emplace_back(tok, n);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  Vocabulary v;
  for (const char* s : kSpecials) {
    v.token_to_id.emplace(s, v.size());
    v.id_to_token.push_back(s);
  }
  for (const auto& [tok, n] : kept) {
    (void)n;
    v.token_to_id.emplace(tok, v.size());
    v.id_to_token.push_back(tok);
  }
  return v;
}

TokenSequence encode_text(const std::string& line, const Vocabulary& vocab, int max_len) {
  if (max_len < 3) throw std::invalid_argument("encode_text: max_len must be >= 3");
  TokenSequence seq;
  seq.ids.push_back(Vocabulary::kBos);
  auto toks = tokenize(line);
  const std::size_t body_cap = static_cast<std::size_t>(max_len) - 2;
  if (toks.size() > body_cap) toks.resize(body_cap);
  for (const auto& tok : toks) seq.ids.push_back(vocab.id(tok));
  seq.ids.push_back(Vocabulary::kEos);
  return seq;
}

std::string decode_text(const TokenSequence& seq, const Vocabulary& vocab) {
  std::string out;
  for (int id : seq.ids) {
    if (id == Vocabulary::kEos) break;
    if (id <= Vocabulary::kUnk) continue;  // specials occupy ids 0..3
    if (!out.empty()) out.push_back(' ');
    out += vocab.token(id);
  }
  return out;
}

namespace {

struct WordPools {
  std::vector<std::string> dets, preps, nouns, verbs, adjs, advs;
};

WordPools pools_for(int vocab_size) {
  static const std::vector<std::string> all_nouns = {
      "cat",  "dog",    "bird",   "robot",  "river",  "engineer",
      "signal", "garden", "market", "tower", "child",  "pilot"};
  static const std::vector<std::string> all_verbs = {
      "sees",  "follows", "builds",  "paints",  "chases",
      "measures", "finds", "watches", "repairs", "describes"};
  static const std::vector<std::string> all_adjs = {
      "small", "bright", "quiet",   "old",     "rapid",
      "green", "heavy",  "curious", "distant", "gentle"};
  static const std::vector<std::string> all_advs = {"quickly", "carefully", "often",
                                                    "silently"};
  static const std::vector<std::string> all_preps = {"in", "near", "behind", "under"};

  auto take = [](const std::vector<std::string>& src, int n) {
    n = std::clamp<int>(n, 1, static_cast<int>(src.size()));
    return std::vector<std::string>(src.begin(), src.begin() + n);
  };

  WordPools p;
  p.dets = {"the", "a"};
  const int rest = vocab_size - 4;  // dets + two preps reserved
  p.preps = take(all_preps, std::max(2, rest / 8));
  const int budget = vocab_size - static_cast<int>(p.dets.size() + p.preps.size());
  p.nouns = take(all_nouns, std::max(2, budget * 2 / 5));
  p.verbs = take(all_verbs, std::max(2, budget / 4));
  p.adjs = take(all_adjs, std::max(1, budget / 4));
  p.advs = take(all_advs, std::max(1, budget - static_cast<int>(p.nouns.size() +
                                                                p.verbs.size() + p.adjs.size())));
  return p;
}

}  // namespace

std::vector<std::string> generate_toy_corpus(std::uint64_t seed, int n_lines, int len_min,
                                             int len_max, int vocab_size) {
  if (len_min < 4 || len_min > len_max) {
    throw std::invalid_argument("generate_toy_corpus: need 4 <= len_min <= len_max");
  }
  if (vocab_size < 10) throw std::invalid_argument("generate_toy_corpus: vocab_size < 10");

  const WordPools p = pools_for(vocab_size);
  Rng rng(seed);
  auto pick = [&rng](const std::vector<std::string>& pool) -> const std::string& {
    return pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(pool.size()) - 1))];
  };

  std::vector<std::string> lines;
  lines.reserve(static_cast<std::size_t>(n_lines));
  for (int i = 0; i < n_lines; ++i) {
    const int target = rng.uniform_int(len_min, len_max);
    std::vector<std::string> subj_adjs, obj_adjs, advs, pps;
    int len = 4;  // det noun verb noun
    while (len < target) {
      if (target - len >= 3 && rng.uniform() < 0.4) {
        pps.push_back(pick(p.preps) + " " + pick(p.dets) + " " + pick(p.nouns));
        len += 3;
        continue;
      }
      switch (rng.uniform_int(0, 2)) {
        case 0: subj_adjs.push_back(pick(p.adjs)); break;
        case 1: obj_adjs.push_back(pick(p.adjs)); break;
        default: advs.push_back(pick(p.advs)); break;
      }
      ++len;
    }
    std::string line = pick(p.dets);
    for (const auto& w : subj_adjs) line += " " + w;
    line += " " + pick(p.nouns);
    for (const auto& w : advs) line += " " + w;
    line += " " + pick(p.verbs);
    line += " " + pick(p.dets);
    for (const auto& w : obj_adjs) line += " " + w;
    line += " " + pick(p.nouns);
    for (const auto& w : pps) line += " " + w;
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<ImageMessage> generate_toy_images(std::uint64_t seed, int n, int height,
                                              int width, int channels) {
  if (height > 32 || width > 32) {
    throw std::invalid_argument("generate_toy_images: desk scale caps H,W at 32");
  }
  if (height < 1 || width < 1 || channels < 1) {
    throw std::invalid_argument("generate_toy_images: bad shape");
  }
  Rng rng(seed);
  std::vector<ImageMessage> images;
  images.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    ImageMessage img;
    img.height = height;
    img.width = width;
    img.channels = channels;
    img.pixels.resize(img.size());
    for (int c = 0; c < channels; ++c) {
      const double bg = 0.2 + 0.6 * rng.uniform();
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) img.pixels(channels * (y * width + x) + c) = bg;
    }
    const int n_shapes = rng.uniform_int(1, 3);
    for (int s = 0; s < n_shapes; ++s) {
      const int kind = rng.uniform_int(0, 2);
      const double level = rng.uniform();
      const int cx = rng.uniform_int(0, width - 1);
      const int cy = rng.uniform_int(0, height - 1);
      const int r = rng.uniform_int(1, std::max(1, std::min(width, height) / 3));
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          bool inside = false;
          switch (kind) {
            case 0:  // rectangle
              inside = std::abs(x - cx) <= r && std::abs(y - cy) <= r;
              break;
            case 1:  // disk
              inside = (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r;
              break;
            default:  // stripe
              inside = std::abs((s % 2 == 0 ? x - cx : y - cy)) <= std::max(1, r / 2);
              break;
          }
          if (!inside) continue;
          for (int c = 0; c < channels; ++c) {
            double& px = img.pixels(channels * (y * width + x) + c);
            px = std::clamp(0.5 * px + 0.5 * level, 0.0, 1.0);
          }
        }
      }
    }
    images.push_back(std::move(img));
  }
  return images;
}

std::vector<std::string> load_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read corpus file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

Batcher::Batcher(std::vector<TokenSequence> msgs, int batch_size, int pad_id,
                 std::uint64_t seed)
    : msgs_(std::move(msgs)), batch_size_(batch_size), pad_id_(pad_id) {
  if (batch_size_ < 1) throw std::invalid_argument("Batcher: batch_size must be >= 1");
  order_.resize(msgs_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
  new_epoch(seed);
}

void Batcher::new_epoch(std::uint64_t seed) {
  Rng rng(seed);
  // Fisher-Yates with our own stream, so the order is platform-stable
  for (std::size_t i = order_.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1));
    std::swap(order_[i - 1], order_[j]);
  }
  cursor_ = 0;
}

bool Batcher::next(Batch& out) {
  if (cursor_ >= order_.size()) return false;
  out.seqs.clear();
  out.padded.clear();
  const std::size_t end = std::min(cursor_ + static_cast<std::size_t>(batch_size_), order_.size());
  int max_len = 0;
  for (std::size_t i = cursor_; i < end; ++i) {
    out.seqs.push_back(msgs_[static_cast<std::size_t>(order_[i])]);
    max_len = std::max(max_len, out.seqs.back().length());
  }
  for (const auto& s : out.seqs) {
    std::vector<int> row = s.ids;
    row.resize(static_cast<std::size_t>(max_len), pad_id_);
    out.padded.push_back(std::move(row));
  }
  cursor_ = end;
  return true;
}

}  // namespace semcomm::corpus
