#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "freqsketch/frequency.hpp"

namespace freqsketch {

// A function of frequency applied pointwise to w. Every kind has f(0) = 0.
class FreqFn {
 public:
  enum class Kind {
    moment,            // w^p
    threshold,         // 1[w > T]
    rank_threshold,    // 1[w >= T]
    threshold_weight,  // w * 1[w > T]
    cap,               // min(w, T)
    distinct,          // 1[w > 0]
    identity,          // w
  };

  static FreqFn moment(double p);
  static FreqFn threshold(double t);
  static FreqFn rank_threshold(double t);
  static FreqFn threshold_weight(double t);
  static FreqFn cap(double t);
  static FreqFn distinct();
  static FreqFn identity();

  // Parses "moment:3", "threshold:2", "rank_threshold:2",
  // "threshold_weight:2", "cap:3", "distinct", "identity".
  static FreqFn parse(std::string_view text);
  std::string to_string() const;

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  bool is_monotone() const;

  double operator()(double w) const;

  friend bool operator==(const FreqFn&, const FreqFn&) = default;

 private:
  FreqFn(Kind kind, double param) : kind_(kind), param_(param) {}

  Kind kind_ = Kind::identity;
  double param_ = 0.0;
};

struct AppliedFn {
  std::vector<double> values;  // rank order of the input vector
  double norm = 0.0;           // ||f(w)||_1
};

AppliedFn apply_fn(const FreqFn& f, const FrequencyVector& w);

}  // namespace freqsketch
