#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "freqsketch/freq_fn.hpp"
#include "freqsketch/frequency.hpp"
#include "freqsketch/hashing.hpp"
#include "freqsketch/samplers.hpp"

namespace freqsketch {

// Predicted total frequency a_x per key; unknown keys predict 0.
class AdviceMap {
 public:
  AdviceMap() = default;
  explicit AdviceMap(std::unordered_map<Key, double> predictions);

  static AdviceMap from_frequencies(const FrequencyVector& w);
  // TSV `key<TAB>predicted_frequency`; Error(parse_error) names the line.
  static AdviceMap load(const std::string& path);

  double operator()(const Key& key) const;
  std::size_t size() const { return predictions_.size(); }
  const std::unordered_map<Key, double>& predictions() const { return predictions_; }

 private:
  std::unordered_map<Key, double> predictions_;
};

struct MultiplicativeNoise {
  double c = 1.0;  // each a_x scaled by a log-uniform factor in [1/c, c]
};
struct DropoutNoise {
  double rate = 0.0;  // each key independently loses its advice with this probability
};
using NoiseModel = std::variant<MultiplicativeNoise, DropoutNoise>;

// Each key's perturbation depends only on (rng_seed, key).
AdviceMap advice_noise(const AdviceMap& advice, const NoiseModel& model, std::uint64_t rng_seed);

struct AdviceSketchParams {
  std::size_t k_h = 0;
  std::size_t k_p = 0;
  std::size_t k_u = 0;
  FreqFn f = FreqFn::identity();
  Scheme scheme = Scheme::ppswor;
  std::uint64_t hash_seed = 0;

  HashSource hash() const { return HashSource(hash_seed, hash_family_for(scheme)); }
  void validate() const;

  friend bool operator==(const AdviceSketchParams&, const AdviceSketchParams&) = default;
};

struct AdviceEstimate {
  std::vector<std::pair<Key, double>> per_key;  // sparse f-hat, sorted by key
  double total = 0.0;
};

// Sample-by-advice sketch. S.h holds the top-k_h keys by advice; S.pu is
// a combined sample that retains a key iff its by-advice seed
// r = h(x)/f(a_x) is among the k_p smallest or its hash h(x) is among the
// k_u smallest of the keys routed to S.pu. Retained keys carry exact
// frequency counters.
class AdviceSketch {
 public:
  struct Record {
    Key key;
    double frequency = 0.0;
    double advice = 0.0;
    double hash = 0.0;  // h(x)
    double seed = 0.0;  // r_x, +inf when f(a_x) = 0

    friend bool operator==(const Record&, const Record&) = default;
  };

  explicit AdviceSketch(AdviceSketchParams params);

  const AdviceSketchParams& params() const { return params_; }

  void process(const Element& update, const AdviceMap& advice);
  void process(const Key& key, double delta, double advice);

  // Keys are expected to be confined to one shard. A key present in both
  // sketches has its counters summed.
  void merge(const AdviceSketch& other);

  AdviceEstimate estimate() const;
  WeightedSample finalize() const;

  // S.h in advice order (largest first, ties by key).
  std::vector<Record> heavy() const;
  // S.pu sorted by key.
  std::vector<Record> sampled() const;
  std::size_t size() const { return heavy_.size() + pu_.size(); }

  static AdviceSketch restore(AdviceSketchParams params, const std::vector<Record>& heavy,
                              const std::vector<Record>& sampled);

  friend bool operator==(const AdviceSketch& a, const AdviceSketch& b) {
    return a.params_ == b.params_ && a.heavy() == b.heavy() && a.sampled() == b.sampled();
  }

 private:
  struct AdviceOrder {  // best advice first
    bool operator()(const std::pair<double, Key>& a, const std::pair<double, Key>& b) const {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    }
  };
  using Ranked = std::set<std::pair<double, Key>>;

  Record make_record(const Key& key, double count, double advice) const;
  void insert_heavy(Record record);
  void process_pu(Record record);
  void release_if_unreferenced(const Key& key);

  AdviceSketchParams params_;
  std::unordered_map<Key, Record> heavy_;
  std::set<std::pair<double, Key>, AdviceOrder> heavy_order_;
  std::unordered_map<Key, Record> pu_;
  Ranked by_seed_;  // k_p smallest finite r
  Ranked by_hash_;  // k_u smallest h
};

// Per-instance sizing: the smallest (c_p, c_u) pair with
//   f(w_x)/||f(w)|| <= max(c_p f(a_x)/||f(a)||, c_u / n) for every key,
// and the sizes (0, ceil(k c_p) + 2, ceil(k c_u) + 2) it implies.
struct AdviceSizing {
  double c_p = 0.0;
  double c_u = 0.0;
  std::size_t k_p = 0;
  std::size_t k_u = 0;
};

// The m-th smallest (1-based) of the sorted `ordered` with `self` removed;
// +inf when fewer than m others exist and 0 when m = 0.
double order_stat_excluding(const std::vector<std::pair<double, Key>>& ordered,
                            const std::pair<double, Key>& self, std::size_t m);

AdviceSizing calibrate_advice_sizes(const FrequencyVector& w, const AdviceMap& advice,
                                    const FreqFn& f, std::size_t k);

}  // namespace freqsketch
