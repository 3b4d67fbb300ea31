#include "freqsketch/zipf.hpp"

#include <cmath>
#include <random>
#include <string>

#include "freqsketch/error.hpp"
#include "freqsketch/exact_sum.hpp"
#include "freqsketch/hashing.hpp"

namespace freqsketch {

FrequencyVector gen_zipf(const ZipfModel& model, std::uint64_t rng_seed) {
  if (model.n == 0) throw Error(ErrorCode::invalid_argument, "Zipf support size must be at least 1");
  if (!(model.alpha > 0.0)) throw Error(ErrorCode::invalid_argument, "Zipf alpha must be positive");
  if (!(model.c >= 1.0)) throw Error(ErrorCode::invalid_argument, "sub-Zipf slack c must be >= 1");
  if (!(model.w1 > 0.0)) throw Error(ErrorCode::invalid_argument, "w1 must be positive");

  std::mt19937_64 rng(rng_seed);
  const double log_c = std::log(model.c);
  std::vector<KeyFrequency> pairs;
  pairs.reserve(model.n);
  for (std::size_t i = 1; i <= model.n; ++i) {
    double w = model.w1 * std::pow(static_cast<double>(i), -model.alpha);
    if (model.c > 1.0) {
      // factor in [1/c, 1], log-uniform
      const double u = bits_to_unit(rng()) - 0x1p-53;
      w *= std::exp(-log_c * u);
    }
    pairs.push_back({"k" + std::to_string(i), w});
  }
  return FrequencyVector::from_pairs(pairs);
}

double zipf_fit(const FrequencyVector& w) {
  const std::size_t n = w.size();
  if (n < 2) throw Error(ErrorCode::invalid_argument, "Zipf fit needs at least two keys");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(static_cast<double>(i + 1));
    my += std::log(w[i].frequency);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(static_cast<double>(i + 1)) - mx;
    const double dy = std::log(w[i].frequency) - my;
    sxy += dx * dy;
    sxx += dx * dx;
  }
  return std::fabs(sxy / sxx);
}

bool is_subzipf(const FrequencyVector& w, double alpha, double c, double tol) {
  if (w.empty()) return true;
  const double w1 = w[0].frequency;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double bound = c * std::pow(static_cast<double>(i + 1), -alpha);
    if (w[i].frequency / w1 > bound * (1.0 + tol)) return false;
  }
  return true;
}

double subzipf_slack(const FrequencyVector& w, double alpha) {
  double c = 1.0;
  if (w.empty()) return c;
  const double w1 = w[0].frequency;
  for (std::size_t i = 0; i < w.size(); ++i) {
    c = std::max(c, w[i].frequency / w1 * std::pow(static_cast<double>(i + 1), alpha));
  }
  return c;
}

double generalized_harmonic(std::size_t n, double beta) {
  // Smallest terms first.
  double sum = 0.0;
  for (std::size_t i = n; i >= 1; --i) sum += std::pow(static_cast<double>(i), -beta);
  return sum;
}

}  // namespace freqsketch
