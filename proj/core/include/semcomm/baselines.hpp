// Classical separate source/channel coding chain: 5-bit fixed-length
// character code, Reed-Solomon over GF(32), BPSK over the simulated channel
// with hard-decision demodulation.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semcomm/channel.hpp"
#include "semcomm/rng.hpp"

namespace semcomm::baselines {

// GF(2^5) with primitive polynomial x^5 + x^2 + 1
namespace gf32 {
constexpr int kFieldSize = 32;
constexpr int kOrder = 31;  // multiplicative order

int mul(int a, int b);
int inv(int a);
int add(int a, int b);  // xor
int pow_alpha(int e);   // alpha^e, e may be any integer
}  // namespace gf32

struct RSCode {
  int n = 31;      // codeword symbols (2^5 - 1)
  int k_rs = 23;   // data symbols
  int t() const { return (n - k_rs) / 2; }

  static RSCode make(int k_rs);  // validates n - k_rs even, 1 <= k_rs < 31
};

// systematic: data symbols followed by n - k_rs parity symbols
std::vector<int> rs_encode(const std::vector<int>& data, const RSCode& code);

struct RSDecodeResult {
  std::vector<int> data;
  bool corrected = false;  // false when decoding failed
};

// Berlekamp-Massey syndrome decoding; corrects up to t symbol errors.
RSDecodeResult rs_decode(const std::vector<int>& received, const RSCode& code);

// --- 5-bit fixed-length character code ---
// 0..25 = a..z, 26 = space, 27 = '.', 28 = ',', 29 = digit escape,
// 30 = pad, 31 = unknown. Characters are lowercased first.
constexpr int kSymDigit = 29;
constexpr int kSymPad = 30;
constexpr int kSymUnknown = 31;

std::vector<int> source_encode_5bit(const std::string& text);
std::string source_decode_5bit(const std::vector<int>& symbols);

// symbols <-> bits (5 per symbol, MSB first)
std::vector<int> symbols_to_bits(const std::vector<int>& symbols);
std::vector<int> bits_to_symbols(const std::vector<int>& bits);

// Uncoded BPSK reference path (for the Q-function check): maps bits to
// +/-1, runs the channel, hard-slices back to bits. FIF divides by the
// known fade before slicing.
std::vector<int> bpsk_transmit_bits(const std::vector<int>& bits,
                                    const channel::ChannelSpec& spec, Rng& rng);

struct ChainResult {
  std::string decoded;
  double wer = 0.0;            // word-level Levenshtein vs the input text
  double cer = 0.0;            // character mismatch rate (positional)
  int blocks = 0;
  int blocks_failed = 0;
  long bits_on_wire = 0;
};

// source code -> RS -> BPSK -> channel -> hard decision -> RS decode.
// One fade per message on the FIF channel, divided out before slicing.
ChainResult classical_chain(const std::string& text, const RSCode& code,
                            const channel::ChannelSpec& spec, Rng& rng);

}  // namespace semcomm::baselines
