#include "semcomm/baselines.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "semcomm/metrics.hpp"

namespace semcomm::baselines {

namespace gf32 {

namespace {
constexpr int kPrimPoly = 0b100101;  // x^5 + x^2 + 1

struct Tables {
  std::array<int, 62> exp{};
  std::array<int, 32> log{};
  Tables() {
    int x = 1;
    for (int i = 0; i < kOrder; ++i) {
      exp[static_cast<std::size_t>(i)] = x;
      log[static_cast<std::size_t>(x)] = i;
      x <<= 1;
      if (x & 0b100000) x ^= kPrimPoly;
    }
    for (int i = kOrder; i < 62; ++i) exp[static_cast<std::size_t>(i)] = exp[static_cast<std::size_t>(i - kOrder)];
  }
};
const Tables& tables() {
  static const Tables t;
  return t;
}
}  // namespace

int add(int a, int b) { return a ^ b; }

int mul(int a, int b) {
  if (a == 0 || b == 0) return 0;
  const auto& t = tables();
  return t.exp[static_cast<std::size_t>(t.log[static_cast<std::size_t>(a)] +
                                        t.log[static_cast<std::size_t>(b)])];
}

int inv(int a) {
  if (a == 0) throw std::domain_error("gf32: inverse of zero");
  const auto& t = tables();
  return t.exp[static_cast<std::size_t>((kOrder - t.log[static_cast<std::size_t>(a)]) % kOrder)];
}

int pow_alpha(int e) {
  const int m = ((e % kOrder) + kOrder) % kOrder;
  return tables().exp[static_cast<std::size_t>(m)];
}

}  // namespace gf32

RSCode RSCode::make(int k_rs) {
  RSCode c;
  c.k_rs = k_rs;
  if (k_rs < 1 || k_rs >= c.n || (c.n - k_rs) % 2 != 0) {
    throw std::invalid_argument("RSCode: need 1 <= k_rs < 31 with n - k_rs even");
  }
  return c;
}

namespace {

// generator polynomial (x - alpha^1)...(x - alpha^(n-k)), coefficients
// high degree first, g[0] == 1
std::vector<int> rs_generator(int n_parity) {
  std::vector<int> g{1};
  for (int i = 1; i <= n_parity; ++i) {
    std::vector<int> next(g.size() + 1, 0);
    const int root = gf32::pow_alpha(i);
    for (std::size_t j = 0; j < g.size(); ++j) {
      next[j] ^= g[j];
      next[j + 1] ^= gf32::mul(g[j], root);
    }
    g = std::move(next);
  }
  return g;
}

// c(alpha^j): Horner from the highest-degree coefficient (index 0)
int poly_eval_alpha(const std::vector<int>& poly, int j) {
  int acc = 0;
  const int x = gf32::pow_alpha(j);
  for (int coef : poly) acc = gf32::add(gf32::mul(acc, x), coef);
  return acc;
}

}  // namespace

std::vector<int> rs_encode(const std::vector<int>& data, const RSCode& code) {
  if (static_cast<int>(data.size()) != code.k_rs) {
    throw std::invalid_argument("rs_encode: expected exactly k_rs symbols");
  }
  for (int s : data) {
    if (s < 0 || s >= gf32::kFieldSize) throw std::invalid_argument("rs_encode: symbol out of range");
  }
  const int n_parity = code.n - code.k_rs;
  const auto g = rs_generator(n_parity);
  // long division of data(x) * x^parity by g(x); remainder = parity
  std::vector<int> buf(data);
  buf.resize(static_cast<std::size_t>(code.n), 0);
  for (int i = 0; i < code.k_rs; ++i) {
    const int lead = buf[static_cast<std::size_t>(i)];
    if (lead == 0) continue;
    buf[static_cast<std::size_t>(i)] = 0;
    for (std::size_t j = 1; j < g.size(); ++j) {
      buf[static_cast<std::size_t>(i) + j] ^= gf32::mul(lead, g[j]);
    }
  }
  std::vector<int> codeword(data);
  codeword.insert(codeword.end(), buf.begin() + code.k_rs, buf.end());
  return codeword;
}

RSDecodeResult rs_decode(const std::vector<int>& received, const RSCode& code) {
  if (static_cast<int>(received.size()) != code.n) {
    throw std::invalid_argument("rs_decode: expected n symbols");
  }
  const int n_parity = code.n - code.k_rs;
  RSDecodeResult out;
  out.data.assign(received.begin(), received.begin() + code.k_rs);

  std::vector<int> syndromes(static_cast<std::size_t>(n_parity));
  bool all_zero = true;
  for (int j = 1; j <= n_parity; ++j) {
    syndromes[static_cast<std::size_t>(j - 1)] = poly_eval_alpha(received, j);
    all_zero = all_zero && syndromes[static_cast<std::size_t>(j - 1)] == 0;
  }
  if (all_zero) {
    out.corrected = true;
    return out;
  }

  // Berlekamp-Massey: error locator lambda(x), coefficients low degree first
  std::vector<int> lambda{1}, prev{1};
  int L = 0, m = 1, b = 1;
  for (int step = 0; step < n_parity; ++step) {
    int delta = syndromes[static_cast<std::size_t>(step)];
    for (int i = 1; i <= L && i < static_cast<int>(lambda.size()); ++i) {
      delta ^= gf32::mul(lambda[static_cast<std::size_t>(i)],
                         syndromes[static_cast<std::size_t>(step - i)]);
    }
    if (delta == 0) {
      ++m;
      continue;
    }
    std::vector<int> shifted(prev.size() + static_cast<std::size_t>(m), 0);
    const int coef = gf32::mul(delta, gf32::inv(b));
    for (std::size_t i = 0; i < prev.size(); ++i) {
      shifted[i + static_cast<std::size_t>(m)] = gf32::mul(coef, prev[i]);
    }
    std::vector<int> next(std::max(lambda.size(), shifted.size()), 0);
    for (std::size_t i = 0; i < next.size(); ++i) {
      const int a = i < lambda.size() ? lambda[i] : 0;
      const int c = i < shifted.size() ? shifted[i] : 0;
      next[i] = a ^ c;
    }
    if (2 * L <= step) {
      prev = lambda;
      b = delta;
      L = step + 1 - L;
      m = 1;
    } else {
      ++m;
    }
    lambda = std::move(next);
  }
  while (!lambda.empty() && lambda.back() == 0) lambda.pop_back();
  const int deg = static_cast<int>(lambda.size()) - 1;
  if (deg != L || L == 0 || L > code.t()) return out;  // uncorrectable

  // Chien search over positions p (power of the locator alpha^p); position p
  // corresponds to received index n-1-p.
  std::vector<int> error_pos;  // p values
  for (int p = 0; p < code.n; ++p) {
    int acc = 0;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      acc ^= gf32::mul(lambda[i], gf32::pow_alpha(-p * static_cast<int>(i)));
    }
    if (acc == 0) error_pos.push_back(p);
  }
  if (static_cast<int>(error_pos.size()) != L) return out;

  // Forney with first consecutive root at alpha^1:
  // omega(x) = S(x) * lambda(x) mod x^(n_parity)
  std::vector<int> omega(static_cast<std::size_t>(n_parity), 0);
  for (int i = 0; i < n_parity; ++i) {
    for (std::size_t j = 0; j < lambda.size(); ++j) {
      const int k = i + static_cast<int>(j);
      if (k >= n_parity) break;
      omega[static_cast<std::size_t>(k)] ^=
          gf32::mul(syndromes[static_cast<std::size_t>(i)], lambda[j]);
    }
  }

  std::vector<int> fixed = received;
  for (int p : error_pos) {
    const int x_inv = gf32::pow_alpha(-p);  // X^-1
    int om = 0;
    for (std::size_t i = 0; i < omega.size(); ++i) {
      om ^= gf32::mul(omega[i], gf32::pow_alpha(-p * static_cast<int>(i)));
    }
    int dlam = 0;  // formal derivative: odd-degree terms only
    for (std::size_t i = 1; i < lambda.size(); i += 2) {
      dlam ^= gf32::mul(lambda[i], gf32::pow_alpha(-p * static_cast<int>(i - 1)));
    }
    if (dlam == 0) return out;
    (void)x_inv;
    const int magnitude = gf32::mul(om, gf32::inv(dlam));
    fixed[static_cast<std::size_t>(code.n - 1 - p)] ^= magnitude;
  }

  for (int j = 1; j <= n_parity; ++j) {
    if (poly_eval_alpha(fixed, j) != 0) return out;  // miscorrection guard
  }
  out.data.assign(fixed.begin(), fixed.begin() + code.k_rs);
  out.corrected = true;
  return out;
}

namespace {
int char_to_symbol(char raw) {
  const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
  if (c >= 'a' && c <= 'z') return c - 'a';
  if (c == ' ') return 26;
  if (c == '.') return 27;
  if (c == ',') return 28;
  if (c >= '0' && c <= '9') return kSymDigit;
  return kSymUnknown;
}

char symbol_to_char(int s) {
  if (s >= 0 && s <= 25) return static_cast<char>('a' + s);
  switch (s) {
    case 26: return ' ';
    case 27: return '.';
    case 28: return ',';
    case kSymDigit: return '#';
    default: return '?';
  }
}
}  // namespace

std::vector<int> source_encode_5bit(const std::string& text) {
  std::vector<int> out;
  out.reserve(text.size());
  for (char c : text) out.push_back(char_to_symbol(c));
  return out;
}

std::string source_decode_5bit(const std::vector<int>& symbols) {
  std::string out;
  out.reserve(symbols.size());
  for (int s : symbols) {
    if (s == kSymPad) continue;
    out.push_back(symbol_to_char(s));
  }
  return out;
}

std::vector<int> symbols_to_bits(const std::vector<int>& symbols) {
  std::vector<int> bits;
  bits.reserve(symbols.size() * 5);
  for (int s : symbols) {
    for (int b = 4; b >= 0; --b) bits.push_back((s >> b) & 1);
  }
  return bits;
}

std::vector<int> bits_to_symbols(const std::vector<int>& bits) {
  if (bits.size() % 5 != 0) throw std::invalid_argument("bits_to_symbols: length not multiple of 5");
  std::vector<int> out;
  out.reserve(bits.size() / 5);
  for (std::size_t i = 0; i < bits.size(); i += 5) {
    int s = 0;
    for (int b = 0; b < 5; ++b) s = (s << 1) | bits[i + static_cast<std::size_t>(b)];
    out.push_back(s);
  }
  return out;
}

namespace {
std::vector<int> slice_bits(const channel::Mat& y) {
  std::vector<int> bits(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    bits[static_cast<std::size_t>(i)] = y(i, 0) < 0.0 ? 1 : 0;
  }
  return bits;
}

channel::Mat bits_to_bpsk(const std::vector<int>& bits) {
  channel::Mat x(static_cast<Eigen::Index>(bits.size()), 1);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    x(static_cast<Eigen::Index>(i), 0) = bits[i] ? -1.0 : 1.0;
  }
  return x;
}
}  // namespace

std::vector<int> bpsk_transmit_bits(const std::vector<int>& bits,
                                    const channel::ChannelSpec& spec, Rng& rng) {
  const channel::Mat x = bits_to_bpsk(bits);
  if (spec.kind == channel::Kind::kAwgn) {
    return slice_bits(channel::transmit_awgn(x, spec.snr_db, rng));
  }
  const double h = channel::draw_fade(rng);
  channel::Mat y = channel::transmit_with_fade(x, h, spec.snr_db, rng);
  y /= h;  // genie-aided equalization keeps the baseline comparison conservative
  return slice_bits(y);
}

ChainResult classical_chain(const std::string& text, const RSCode& code,
                            const channel::ChannelSpec& spec, Rng& rng) {
  ChainResult res;
  std::vector<int> symbols = source_encode_5bit(text);
  const std::size_t k = static_cast<std::size_t>(code.k_rs);
  while (symbols.size() % k != 0) symbols.push_back(kSymPad);

  std::vector<int> coded;
  for (std::size_t off = 0; off < symbols.size(); off += k) {
    const std::vector<int> block(symbols.begin() + static_cast<std::ptrdiff_t>(off),
                                 symbols.begin() + static_cast<std::ptrdiff_t>(off + k));
    const auto cw = rs_encode(block, code);
    coded.insert(coded.end(), cw.begin(), cw.end());
    ++res.blocks;
  }

  const std::vector<int> tx_bits = symbols_to_bits(coded);
  res.bits_on_wire = static_cast<long>(tx_bits.size());
  const std::vector<int> rx_bits = bpsk_transmit_bits(tx_bits, spec, rng);
  const std::vector<int> rx_symbols = bits_to_symbols(rx_bits);

  std::vector<int> decoded_symbols;
  const std::size_t n = static_cast<std::size_t>(code.n);
  for (std::size_t off = 0; off < rx_symbols.size(); off += n) {
    const std::vector<int> block(rx_symbols.begin() + static_cast<std::ptrdiff_t>(off),
                                 rx_symbols.begin() + static_cast<std::ptrdiff_t>(off + n));
    const auto dec = rs_decode(block, code);
    if (!dec.corrected) ++res.blocks_failed;
    decoded_symbols.insert(decoded_symbols.end(), dec.data.begin(), dec.data.end());
  }
  res.decoded = source_decode_5bit(decoded_symbols);

  // character mismatch rate against the canonical (lowercased) input
  const std::string canon = source_decode_5bit(source_encode_5bit(text));
  const std::size_t upto = std::min(canon.size(), res.decoded.size());
  std::size_t char_err = std::max(canon.size(), res.decoded.size()) - upto;
  for (std::size_t i = 0; i < upto; ++i) char_err += canon[i] != res.decoded[i] ? 1 : 0;
  res.cer = canon.empty() ? 0.0 : static_cast<double>(char_err) / static_cast<double>(canon.size());

  const auto ref_toks = corpus::tokenize(canon);
  const auto hyp_toks = corpus::tokenize(res.decoded);
  res.wer = ref_toks.empty() ? 0.0 : metrics::wer(ref_toks, hyp_toks);
  return res;
}

}  // namespace semcomm::baselines
