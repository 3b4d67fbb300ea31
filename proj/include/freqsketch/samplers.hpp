#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "freqsketch/freq_fn.hpp"
#include "freqsketch/frequency.hpp"
#include "freqsketch/hashing.hpp"

namespace freqsketch {

enum class Scheme { ppswor, priority };

std::string_view scheme_name(Scheme scheme);
Scheme parse_scheme(std::string_view text);
HashFamily hash_family_for(Scheme scheme);

// Pr[seed < threshold] for a seed drawn from the scheme's hash family.
double scheme_cdf(Scheme scheme, double threshold);

struct SamplerConfig {
  std::size_t k = 1;
  double q = 1.0;  // weights are w^q
  Scheme scheme = Scheme::ppswor;
  std::uint64_t hash_seed = 0;

  HashSource hash() const { return HashSource(hash_seed, hash_family_for(scheme)); }
  void validate() const;

  friend bool operator==(const SamplerConfig&, const SamplerConfig&) = default;
};

struct SampleRecord {
  Key key;
  double frequency = 0.0;
  double inclusion_probability = 1.0;
};

// A finalized sample: exact frequencies plus the inclusion probability of each
// sampled key, ready for inverse-probability estimation.
struct WeightedSample {
  std::vector<SampleRecord> records;
  std::string scheme;
  std::size_t k = 0;
  double q = 0.0;
  double threshold = 0.0;  // +inf when every key was retained
};

// Bottom-k order sample over aggregated weights w^q. The sketch keeps the k
// records with the smallest seeds h(x) / w_x^q plus one shadow record (the
// (k+1)-th smallest seed), which is the inclusion threshold of retained keys.
// Seed ties are broken by key.
class BottomKSketch {
 public:
  struct Entry {
    Key key;
    double frequency = 0.0;
    double seed = 0.0;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  explicit BottomKSketch(SamplerConfig config);

  const SamplerConfig& config() const { return config_; }

  // Processes one aggregated batch. Keys are expected to be confined to a
  // single batch; a key that collides with a retained record raises
  // Error(duplicate_key).
  void process(const FrequencyVector& batch);
  void process(const Key& key, double frequency);

  // Merges a sketch over a key-disjoint part of the data.
  void merge(const BottomKSketch& other);

  WeightedSample finalize() const;

  // Retained entries sorted by (seed, key).
  std::vector<Entry> entries() const;
  std::optional<Entry> shadow() const;
  std::size_t size() const;

  double seed_for(const Key& key, double frequency) const;

  // Rebuilds a sketch from serialized state.
  static BottomKSketch restore(SamplerConfig config, std::vector<Entry> entries,
                               std::optional<Entry> shadow);

  friend bool operator==(const BottomKSketch& a, const BottomKSketch& b) {
    return a.config_ == b.config_ && a.entries() == b.entries() && a.shadow() == b.shadow();
  }

 private:
  struct SeedOrder {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.seed != b.seed) return a.seed < b.seed;
      return a.key < b.key;
    }
  };

  void insert(Entry entry);

  SamplerConfig config_;
  std::set<Entry, SeedOrder> kept_;  // at most k + 1; the last one is the shadow
  std::unordered_set<Key> keys_;
};

// Inclusion probability of a retained key with weight w^q under threshold tau.
double bottom_k_inclusion(Scheme scheme, double weight, double tau);

// k independent draws with probability f(w_x)/||f(w)||_1. Each distinct
// sampled key carries p'_x = 1 - (1 - p_x)^k.
WeightedSample sample_with_replacement(const FrequencyVector& w, const FreqFn& sampling,
                                       std::size_t k, std::uint64_t rng_seed);

// 1 - (1 - p)^k, computed stably.
double with_replacement_inclusion(double p, std::size_t k);

// sum_x (1/p'_x - 1) f_target(w_x)^2 for the with-replacement estimator.
double exact_wr_variance(const FrequencyVector& w, const FreqFn& target,
                         const FreqFn& sampling, std::size_t k);

// Variance of the same estimator including the pairwise covariance of
// inclusions: sum_{x != y} f_x f_y (p'_xy / (p'_x p'_y) - 1) with
// p'_xy = p'_x + p'_y - 1 + (1 - p_x - p_y)^k. The covariances are never
// positive, so exact_wr_variance is an upper bound on this. O(n^2).
double wr_variance_with_covariance(const FrequencyVector& w, const FreqFn& target,
                                   const FreqFn& sampling, std::size_t k);

}  // namespace freqsketch
