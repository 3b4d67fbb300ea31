#include "freqsketch/hashing.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace freqsketch {

std::uint64_t splitmix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double bits_to_unit(std::uint64_t bits) {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  return static_cast<double>((bits >> 11) + 1) * kScale;
}

std::uint64_t HashSource::bits(std::string_view key) const {
  std::uint64_t state = splitmix64(seed_ ^ 0x6a09e667f3bcc909ULL);
  std::size_t pos = 0;
  while (pos + 8 <= key.size()) {
    std::uint64_t chunk = 0;
    for (int b = 0; b < 8; ++b) {
      chunk |= static_cast<std::uint64_t>(static_cast<unsigned char>(key[pos + b])) << (8 * b);
    }
    state = splitmix64(state ^ chunk);
    pos += 8;
  }
  std::uint64_t tail = 0;
  for (int b = 0; pos < key.size(); ++pos, ++b) {
    tail |= static_cast<std::uint64_t>(static_cast<unsigned char>(key[pos])) << (8 * b);
  }
  state = splitmix64(state ^ tail);
  return splitmix64(state ^ static_cast<std::uint64_t>(key.size()));
}

double HashSource::draw(std::string_view key) const {
  const double u = unit(key);
  return family_ == HashFamily::exp1 ? -std::log(u) : u;
}

double HashSource::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  if (family_ == HashFamily::exp1) {
    if (std::isinf(t)) return 1.0;
    return -std::expm1(-t);
  }
  return std::min(t, 1.0);
}

std::string canonical_key(std::uint64_t id) { return std::to_string(id); }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(splitmix64(base) ^ splitmix64(index + 0x51ed270b27dc5a3bULL));
}

}  // namespace freqsketch
