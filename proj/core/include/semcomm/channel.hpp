// Simulated wireless channel: unit-power normalization, AWGN, and
// phase-invariant fading (block Rayleigh magnitude, no equalization).
//
// SNR convention: symbols are power-normalized to mean square 1, so the
// per-entry noise variance is 10^(-snr_db/10).

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "semcomm/autodiff.hpp"
#include "semcomm/rng.hpp"

namespace semcomm::channel {

using Mat = Eigen::MatrixXd;

enum class Kind { kAwgn, kFif };

struct ChannelSpec {
  Kind kind = Kind::kAwgn;
  double snr_db = 10.0;
  std::uint64_t seed = 0;
  bool per_symbol_fading = false;  // default: one fade per message block
};

Kind kind_from_string(const std::string& s);
std::string kind_to_string(Kind k);

inline double noise_variance(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

// x scaled to unit mean square; throws on an all-zero block
Mat normalize_power(const Mat& x);

// y = x + n, n ~ N(0, sigma^2) i.i.d.
Mat transmit_awgn(const Mat& x, double snr_db, Rng& rng);

// y = h*x + n with h = |g|, g complex standard normal (E[h^2] = 1).
// One h per block unless per_symbol is set.
Mat transmit_fif(const Mat& x, double snr_db, Rng& rng, bool per_symbol = false);

// Rayleigh magnitude with E[h^2] = 1
double draw_fade(Rng& rng);

// Test hook: FIF with an injected fade (h = 1 reduces exactly to AWGN).
Mat transmit_with_fade(const Mat& x, double h, double snr_db, Rng& rng);

// Differentiable transmit for the training path. The fade and the noise are
// treated as constants of the draw; d(y)/d(x) = h * I. Fills h_out (1.0 for
// AWGN) when non-null.
ad::Var transmit(ad::Tape& tape, ad::Var x, const ChannelSpec& spec, Rng& rng,
                 double* h_out = nullptr);

// Call-count spy: transmit operations increment this counter. Tests use it
// to prove that the codec itself never touches the channel.
long transmit_call_count();
void reset_transmit_call_count();

}  // namespace semcomm::channel
