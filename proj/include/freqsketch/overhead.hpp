#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freqsketch/freq_fn.hpp"
#include "freqsketch/frequency.hpp"
#include "freqsketch/samplers.hpp"

namespace freqsketch {

// Probabilities over the active keys, in rank order of the frequency vector
// they were derived from.
class ProbVector {
 public:
  ProbVector() = default;
  // Throws unless entries are nonnegative and sum to 1 within 1e-9.
  explicit ProbVector(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> values() const { return probs_; }

 private:
  std::vector<double> probs_;
};

// Normalizes nonnegative values; Error(zero_norm) when they sum to 0.
ProbVector normalize(std::span<const double> values);
ProbVector pps_probs(const FreqFn& f, const FrequencyVector& w);

// max_x p_x / q_x; +inf when some q_x = 0 < p_x.
double max_overhead(const ProbVector& p, const ProbVector& q);
// sum_x p_x^2 / q_x.
double expected_overhead(const ProbVector& p, const ProbVector& q);

// ||w/w_1||_q^q / ||w/w_1||_p^p; requires p >= q > 0.
double lq_lp_overhead(const FrequencyVector& w, double p, double q);
// ||w/w_1||_p^p.
double normalized_moment(const FrequencyVector& w, double p);

// w_1^q / ||w||_q^q. 1/phi bounds the overhead for every target p >= q.
double heavy_hitter_phi(const FrequencyVector& w, double q);

struct Certificate {
  double equivalent_size = 0.0;  // k * r
  Key witness;
};
// r = max_{x in S} w_x^q / ||w||_q^q.
Certificate certify_emulation(const WeightedSample& sample, double norm_q, double q, std::size_t k);

struct SubZipfBound {
  double harmonic = 0.0;             // c^q H_{n, q alpha}
  std::optional<double> asymptotic;  // c^q min(1 + ln n, zeta(q alpha)) when q alpha >= 1
  bool below_range = false;          // q alpha < 1: no heavy hitter guarantee
};
SubZipfBound subzipf_bound(double alpha, double c, std::size_t n, double q);

// Riemann zeta for s > 1.
double zeta(double s);

// max_i 1 / (i q_i).
double universal_emulation_overhead(const ProbVector& q);
// max_i (1/i^2) sum_{j<=i} 1/q_j.
double universal_estimation_overhead(const ProbVector& q);

struct ConcaveSublinear {
  ProbVector probs;
  double factor = 0.0;  // ||q'||_1
};
// q'_i = w_i / (i w_i + sum_{j>i} w_j).
ConcaveSublinear concave_sublinear_probs(const FrequencyVector& w);

struct ConcaveCondition {
  double c = 0.0;       // min_{i<n} i w_i / sum_{j>i} w_j
  double factor = 0.0;  // (1 + 1/c) H_n
};
ConcaveCondition concave_universal_condition(const FrequencyVector& w);

double worst_case_bound(std::size_t n, double p);
double near_uniform_bound(const FrequencyVector& w, double p);

enum class BaseScheme { l1, l2, concave_sublinear };
std::string_view base_scheme_name(BaseScheme scheme);
ProbVector base_probs(BaseScheme scheme, const FrequencyVector& w);

struct TargetOverhead {
  double p = 0.0;
  double max_overhead = 0.0;
  double expected_overhead = 0.0;
  // Applicable upper bounds on max_overhead (absent when the precondition fails).
  std::optional<double> heavy_hitter_bound;
  std::optional<double> subzipf_bound;
  std::optional<double> worst_case_bound;
  std::optional<double> near_uniform_bound;
};

struct SchemeOverhead {
  BaseScheme scheme = BaseScheme::l1;
  std::vector<TargetOverhead> targets;
  double universal_emulation = 0.0;
  double universal_estimation = 0.0;
  std::optional<double> concave_factor;  // ||q'||_1 for the concave-sublinear scheme
};

struct OverheadReport {
  std::size_t n = 0;
  double harmonic_n = 0.0;
  double phi_l1 = 0.0;
  double phi_l2 = 0.0;
  double zipf_alpha = 0.0;   // fitted
  double zipf_slack = 0.0;   // smallest c for subZipf[alpha, c, n]
  std::vector<SchemeOverhead> schemes;

  const SchemeOverhead* find(BaseScheme scheme) const;
};

OverheadReport overhead_report(const FrequencyVector& w, std::span<const double> targets,
                               std::span<const BaseScheme> schemes);

}  // namespace freqsketch
