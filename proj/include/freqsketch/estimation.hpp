#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <variant>
#include <vector>

#include "freqsketch/advice.hpp"
#include "freqsketch/freq_fn.hpp"
#include "freqsketch/frequency.hpp"
#include "freqsketch/samplers.hpp"

namespace freqsketch {

// sum_{x in H} L_x f(w_x). An empty domain predicate means all keys; a key
// without a coefficient has L_x = 1.
struct DomainQuery {
  FreqFn f = FreqFn::identity();
  std::function<bool(const Key&)> domain;
  std::unordered_map<Key, double> coefficients;
};

// Inverse-probability estimate sum_{x in S and H} L_x f(w_x) / p'_x.
double estimate_query(const WeightedSample& sample, const DomainQuery& query);

struct RankPoint {
  Key key;
  double frequency = 0.0;
  double rank = 0.0;
};

// For each sampled x: sum_{y in S} 1[w_y >= w_x] / p'_y. Sorted by frequency
// descending (ties by key).
std::vector<RankPoint> estimate_rank_distribution(const WeightedSample& sample);

struct WithReplacementSpec {
  FreqFn sampling = FreqFn::identity();
  std::size_t k = 1;
};
struct BottomKSpec {
  std::size_t k = 1;
  double q = 1.0;
  Scheme scheme = Scheme::ppswor;
};
struct AdviceSpec {
  std::size_t k_h = 0;
  std::size_t k_p = 0;
  std::size_t k_u = 0;
  Scheme scheme = Scheme::ppswor;
  AdviceMap advice;
};
using SamplerSpec = std::variant<WithReplacementSpec, BottomKSpec, AdviceSpec>;

struct ErrorReport {
  double estimate_mean = 0.0;
  double exact = 0.0;
  double variance = 0.0;
  double nrmse = 0.0;
  std::size_t trials = 0;
  std::vector<double> per_trial;
};

// With-replacement samplers use the exact analytic variance. Bottom-k and
// advice samplers average, over `trials` hash seeds, the conditional variance
// sum_x (1/p'_x - 1) f(w_x)^2 where p'_x fixes the seeds of every other key.
ErrorReport evaluate_nrmse(const FrequencyVector& w, const FreqFn& f, const SamplerSpec& sampler,
                           std::size_t trials, std::uint64_t seed, bool keep_per_trial = false);

// Conditional variance and plain estimate of one run with a fixed hash seed.
struct RunVariance {
  double estimate = 0.0;
  double variance = 0.0;
};
RunVariance bottom_k_run(const FrequencyVector& w, const FreqFn& f, const BottomKSpec& spec,
                         std::uint64_t hash_seed);
RunVariance advice_run(const FrequencyVector& w, const FreqFn& f, const AdviceSpec& spec,
                       std::uint64_t hash_seed);

struct BenchmarkBound {
  double full = 0.0;    // ||f(w)||_1^2 / k
  double domain = 0.0;  // (sum_{x in H} f(w_x)) ||f(w)||_1 / k
};

// Variance bounds of a dedicated pps sample of size k.
double benchmark_key_bound(const FreqFn& f, const FrequencyVector& w, const Key& key, std::size_t k);
BenchmarkBound benchmark_bound(const FreqFn& f, const FrequencyVector& w, std::size_t k,
                               const std::function<bool(const Key&)>& domain = {});

inline constexpr std::size_t kDefaultTrials = 50;

}  // namespace freqsketch
