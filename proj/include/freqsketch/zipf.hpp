#pragma once

#include <cstddef>
#include <cstdint>

#include "freqsketch/frequency.hpp"

namespace freqsketch {

// Zipf[alpha, n] scaled by w1 when slack == 1; otherwise subZipf[alpha, c, n]
// where each frequency is multiplied by an independent factor in [1/c, 1].
struct ZipfModel {
  double alpha = 1.0;
  double c = 1.0;
  std::size_t n = 0;
  double w1 = 1.0;
};

// Keys are "k1".."kn" (rank i -> "k<i>" before any sub-Zipf perturbation).
FrequencyVector gen_zipf(const ZipfModel& model, std::uint64_t rng_seed);

// Least-squares slope magnitude of ln(w_i) against ln(i) over all ranks.
double zipf_fit(const FrequencyVector& w);

// True when w_i / w_1 <= c * i^-alpha for every rank i (with relative slack tol).
bool is_subzipf(const FrequencyVector& w, double alpha, double c, double tol = 1e-12);

// Smallest c for which w is subZipf[alpha, c, n].
double subzipf_slack(const FrequencyVector& w, double alpha);

// H_{n,beta} = sum_{i=1..n} i^-beta.
double generalized_harmonic(std::size_t n, double beta);

}  // namespace freqsketch
