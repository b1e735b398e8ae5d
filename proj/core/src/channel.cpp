#include "semcomm/channel.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

namespace semcomm::channel {

namespace {
std::atomic<long> g_transmit_calls{0};

Mat gaussian_mat(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng) {
  Mat n(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) n(i, j) = stddev * rng.gaussian();
  return n;
}
}  // namespace

Kind kind_from_string(const std::string& s) {
  if (s == "awgn") return Kind::kAwgn;
  if (s == "fif") return Kind::kFif;
  throw std::invalid_argument("unknown channel kind: " + s + " (expected awgn|fif)");
}

std::string kind_to_string(Kind k) { return k == Kind::kAwgn ? "awgn" : "fif"; }

Mat normalize_power(const Mat& x) {
  const double ms = x.squaredNorm() / static_cast<double>(x.size());
  if (ms == 0.0) throw std::domain_error("normalize_power: zero-power block");
  return x / std::sqrt(ms);
}

Mat transmit_awgn(const Mat& x, double snr_db, Rng& rng) {
  ++g_transmit_calls;
  const double sigma = std::sqrt(noise_variance(snr_db));
  return x + gaussian_mat(x.rows(), x.cols(), sigma, rng);
}

double draw_fade(Rng& rng) {
  // |g| for complex g with unit total variance: per-component variance 1/2
  const double re = rng.gaussian() * M_SQRT1_2;
  const double im = rng.gaussian() * M_SQRT1_2;
  return std::sqrt(re * re + im * im);
}

Mat transmit_with_fade(const Mat& x, double h, double snr_db, Rng& rng) {
  ++g_transmit_calls;
  const double sigma = std::sqrt(noise_variance(snr_db));
  return h * x + gaussian_mat(x.rows(), x.cols(), sigma, rng);
}

Mat transmit_fif(const Mat& x, double snr_db, Rng& rng, bool per_symbol) {
  if (!per_symbol) {
    const double h = draw_fade(rng);
    return transmit_with_fade(x, h, snr_db, rng);
  }
  ++g_transmit_calls;
  Mat faded(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) faded(i, j) = draw_fade(rng) * x(i, j);
  const double sigma = std::sqrt(noise_variance(snr_db));
  return faded + gaussian_mat(x.rows(), x.cols(), sigma, rng);
}

ad::Var transmit(ad::Tape& tape, ad::Var x, const ChannelSpec& spec, Rng& rng,
                 double* h_out) {
  ++g_transmit_calls;
  const Mat& xv = tape.val(x);
  const double sigma = std::sqrt(noise_variance(spec.snr_db));
  double h = 1.0;
  ad::Var y = x;
  if (spec.kind == Kind::kFif) {
    if (spec.per_symbol_fading) {
      Mat fades(xv.rows(), xv.cols());
      for (Eigen::Index i = 0; i < xv.rows(); ++i)
        for (Eigen::Index j = 0; j < xv.cols(); ++j) fades(i, j) = draw_fade(rng);
      y = ad::mul(y, tape.constant(fades));
      h = fades.mean();  // representative value for diagnostics only
    } else {
      h = draw_fade(rng);
      y = ad::scale(y, h);
    }
  }
  if (h_out) *h_out = h;
  return ad::add_const(y, gaussian_mat(xv.rows(), xv.cols(), sigma, rng));
}

long transmit_call_count() { return g_transmit_calls.load(); }
void reset_transmit_call_count() { g_transmit_calls.store(0); }

}  // namespace semcomm::channel
