#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace freqsketch {

enum class HashFamily { exp1, uniform01 };

std::uint64_t splitmix64(std::uint64_t x);

// Maps 64 random bits to (0,1] using the top 53 bits: (bits + 1) / 2^53.
double bits_to_unit(std::uint64_t bits);

// Keyed, process-independent hash of a key. h(x) depends only on
// (seed, key bytes), so sketches built in different processes or on
// different shards agree on every key's seed.
class HashSource {
 public:
  HashSource() = default;
  HashSource(std::uint64_t seed, HashFamily family) : seed_(seed), family_(family) {}

  std::uint64_t seed() const { return seed_; }
  HashFamily family() const { return family_; }

  std::uint64_t bits(std::string_view key) const;
  double unit(std::string_view key) const { return bits_to_unit(bits(key)); }

  // Exp(1) draw (exp1) or U(0,1] draw (uniform01).
  double draw(std::string_view key) const;

  // Pr[draw < t] for this family.
  double cdf(double t) const;

  friend bool operator==(const HashSource&, const HashSource&) = default;

 private:
  std::uint64_t seed_ = 0;
  HashFamily family_ = HashFamily::exp1;
};

// Numeric keys are hashed through their decimal text.
std::string canonical_key(std::uint64_t id);

// Deterministic per-trial seed stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace freqsketch
