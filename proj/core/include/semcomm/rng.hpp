// Deterministic random streams with named substreams.
//
// std::mt19937_64 output is pinned by the standard, but the distribution
// adaptors are not, so uniform/gaussian draws are mapped by hand here.
// Every stochastic component takes its own substream derived from the
// master seed, so e.g. reseeding the channel never perturbs the shuffle.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace semcomm {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // uniform in [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // inclusive bounds
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform() * (static_cast<double>(hi) - lo + 1.0));
  }

  // standard normal via Box-Muller (pair cached)
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

// Seed for the substream identified by (name, index) under a master seed.
inline std::uint64_t substream_seed(std::uint64_t master, std::string_view name,
                                    std::uint64_t index = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the name
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return detail::splitmix64(master ^ detail::splitmix64(h ^ detail::splitmix64(index)));
}

inline Rng substream(std::uint64_t master, std::string_view name, std::uint64_t index = 0) {
  return Rng(substream_seed(master, name, index));
}

}  // namespace semcomm
