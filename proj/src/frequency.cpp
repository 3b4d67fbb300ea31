#include "freqsketch/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "freqsketch/error.hpp"
#include "freqsketch/exact_sum.hpp"

namespace freqsketch {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::negative_value: return "negative_value";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::duplicate_key: return "duplicate_key";
    case ErrorCode::config_mismatch: return "config_mismatch";
    case ErrorCode::zero_norm: return "zero_norm";
    case ErrorCode::format_error: return "format_error";
  }
  return "unknown";
}

// Shewchuk's algorithm with the final half-way correction used by Python's
// math.fsum.
void ExactSum::add(double x) {
  std::size_t used = 0;
  for (double y : partials_) {
    if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
    const double hi = x + y;
    const double lo = y - (hi - x);
    if (lo != 0.0) partials_[used++] = lo;
    x = hi;
  }
  partials_.resize(used);
  partials_.push_back(x);
}

void ExactSum::merge(const ExactSum& other) {
  for (double p : other.partials_) add(p);
}

double ExactSum::value() const {
  if (partials_.empty()) return 0.0;
  std::size_t n = partials_.size();
  double hi = partials_[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials_[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    const double yr = x - hi;
    if (y == yr) hi = x;
  }
  return hi;
}

FrequencyVector FrequencyVector::from_map(const std::unordered_map<Key, double>& freqs) {
  std::vector<KeyFrequency> pairs;
  pairs.reserve(freqs.size());
  for (const auto& [key, f] : freqs) pairs.push_back({key, f});
  return from_pairs(pairs);
}

FrequencyVector FrequencyVector::from_pairs(std::span<const KeyFrequency> pairs) {
  FrequencyVector out;
  out.ranked_.reserve(pairs.size());
  for (const auto& kf : pairs) {
    if (!(kf.frequency >= 0.0) || std::isinf(kf.frequency)) {
      throw Error(ErrorCode::negative_value,
                  "frequency of key '" + kf.key + "' must be finite and nonnegative");
    }
    if (kf.frequency > 0.0) out.ranked_.push_back(kf);
  }
  std::sort(out.ranked_.begin(), out.ranked_.end(), [](const KeyFrequency& a, const KeyFrequency& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.key < b.key;
  });
  out.index_.reserve(out.ranked_.size());
  for (std::size_t i = 0; i < out.ranked_.size(); ++i) {
    if (!out.index_.emplace(out.ranked_[i].key, i).second) {
      throw Error(ErrorCode::duplicate_key, "key '" + out.ranked_[i].key + "' listed twice");
    }
  }
  return out;
}

double FrequencyVector::frequency(const Key& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? 0.0 : ranked_[it->second].frequency;
}

std::vector<double> FrequencyVector::values() const {
  std::vector<double> out;
  out.reserve(ranked_.size());
  for (const auto& kf : ranked_) out.push_back(kf.frequency);
  return out;
}

double FrequencyVector::total() const {
  ExactSum sum;
  for (const auto& kf : ranked_) sum.add(kf.frequency);
  return sum.value();
}


void Aggregator::add(const Element& element) { add(element.key, element.value); }

void Aggregator::add(const Key& key, double value) {
  if (!(value >= 0.0) || std::isinf(value)) {
    throw Error(ErrorCode::negative_value, "value for key '" + key + "' must be finite and nonnegative");
  }
  sums_[key].add(value);
}

void Aggregator::merge(const Aggregator& other) {
  for (const auto& [key, sum] : other.sums_) sums_[key].merge(sum);
}

FrequencyVector Aggregator::build() const {
  std::vector<KeyFrequency> pairs;
  pairs.reserve(sums_.size());
  for (const auto& [key, sum] : sums_) pairs.push_back({key, sum.value()});
  return FrequencyVector::from_pairs(pairs);
}

FrequencyVector aggregate(std::span<const Element> stream) {
  Aggregator agg;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const auto& e = stream[i];
    if (!(e.value >= 0.0) || std::isinf(e.value)) {
      throw Error(ErrorCode::negative_value,
                  "element " + std::to_string(i) + " (key '" + e.key + "') has a negative or non-finite value");
    }
    agg.add(e);
  }
  return agg.build();
}

}  // namespace freqsketch
