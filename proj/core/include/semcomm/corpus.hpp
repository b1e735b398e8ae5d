// Text and image message handling: vocabulary construction, token
// encode/decode, deterministic toy datasets, and batch iteration.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "semcomm/rng.hpp"

namespace semcomm::corpus {

struct Vocabulary {
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;

  std::unordered_map<std::string, int> token_to_id;
  std::vector<std::string> id_to_token;

  int size() const { return static_cast<int>(id_to_token.size()); }
  int id(const std::string& token) const;  // kUnk when absent
  const std::string& token(int id) const { return id_to_token.at(id); }

  void save(const std::string& path) const;  // one token per line, id order
  static Vocabulary load(const std::string& path);
};

struct TokenSequence {
  std::vector<int> ids;  // BOS ... EOS, no padding
  int length() const { return static_cast<int>(ids.size()); }
};

struct ImageMessage {
  int height = 0, width = 0, channels = 0;
  Eigen::VectorXd pixels;  // row-major (h, w, c) flattening, values in [0,1]
  int size() const { return height * width * channels; }
};

// lowercased whitespace tokens
std::vector<std::string> tokenize(const std::string& line);

Vocabulary build_vocab(const std::vector<std::string>& lines, int min_freq);

// BOS + ids + EOS; body truncated so the total never exceeds max_len.
TokenSequence encode_text(const std::string& line, const Vocabulary& vocab, int max_len);

// tokens between BOS and the first EOS, specials omitted
std::string decode_text(const TokenSequence& seq, const Vocabulary& vocab);

// Deterministic subject-verb-object grammar with modifier expansions; line
// lengths are drawn uniformly from [len_min, len_max] and the distinct token
// count stays within vocab_size.
std::vector<std::string> generate_toy_corpus(std::uint64_t seed, int n_lines, int len_min,
                                             int len_max, int vocab_size);

// Random geometric shapes over a uniform background, values in [0,1].
std::vector<ImageMessage> generate_toy_images(std::uint64_t seed, int n, int height,
                                              int width, int channels);

std::vector<std::string> load_lines(const std::string& path);

struct Batch {
  std::vector<TokenSequence> seqs;
  std::vector<std::vector<int>> padded;  // all rows share the batch max length
};

// Single-consumer epoch iterator with a seeded shuffle.
class Batcher {
 public:
  Batcher(std::vector<TokenSequence> msgs, int batch_size, int pad_id, std::uint64_t seed);

  bool next(Batch& out);                 // false once the epoch is exhausted
  void new_epoch(std::uint64_t seed);    // reshuffle and rewind

 private:
  std::vector<TokenSequence> msgs_;
  std::vector<int> order_;
  int batch_size_;
  int pad_id_;
  std::size_t cursor_ = 0;
};

}  // namespace semcomm::corpus
