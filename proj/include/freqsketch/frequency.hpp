#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "freqsketch/exact_sum.hpp"

namespace freqsketch {

using Key = std::string;

// One data element (x, value) of the input stream.
struct Element {
  Key key;
  double value = 0.0;
};

struct KeyFrequency {
  Key key;
  double frequency = 0.0;

  friend bool operator==(const KeyFrequency&, const KeyFrequency&) = default;
};

// Aggregated frequencies w_x. Only keys with positive frequency are stored.
// Entries are kept in rank order: descending frequency, ties broken by
// ascending key, so index i is the (i+1)-th most frequent key.
class FrequencyVector {
 public:
  FrequencyVector() = default;

  // Throws Error(negative_value) for a negative frequency; zeros are dropped.
  static FrequencyVector from_map(const std::unordered_map<Key, double>& freqs);
  static FrequencyVector from_pairs(std::span<const KeyFrequency> pairs);

  std::size_t size() const { return ranked_.size(); }
  bool empty() const { return ranked_.empty(); }

  // 0 for absent keys.
  double frequency(const Key& key) const;
  bool contains(const Key& key) const { return index_.contains(key); }

  std::span<const KeyFrequency> ranked() const { return ranked_; }
  const KeyFrequency& operator[](std::size_t rank) const { return ranked_[rank]; }
  auto begin() const { return ranked_.begin(); }
  auto end() const { return ranked_.end(); }

  // Frequencies in rank order.
  std::vector<double> values() const;
  double total() const;

  friend bool operator==(const FrequencyVector& a, const FrequencyVector& b) {
    return a.ranked_ == b.ranked_;
  }

 private:
  std::vector<KeyFrequency> ranked_;
  std::unordered_map<Key, std::size_t> index_;
};

// Incremental aggregation; disjoint shards may be aggregated separately and
// combined with merge().
class Aggregator {
 public:
  void add(const Element& element);
  void add(const Key& key, double value);
  void merge(const Aggregator& other);
  FrequencyVector build() const;

 private:
  std::unordered_map<Key, ExactSum> sums_;
};

// Sums element values per key. Throws Error(negative_value) naming the
// offending element index.
FrequencyVector aggregate(std::span<const Element> stream);

}  // namespace freqsketch
