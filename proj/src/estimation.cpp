#include "freqsketch/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "freqsketch/error.hpp"
#include "freqsketch/exact_sum.hpp"

namespace freqsketch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double coefficient(const DomainQuery& query, const Key& key) {
  auto it = query.coefficients.find(key);
  return it == query.coefficients.end() ? 1.0 : it->second;
}

// Accumulates (1/p - 1) f^2, reporting +inf for a key that can never be sampled.
void add_key_variance(ExactSum& var, bool& infinite, double p, double fw) {
  if (fw == 0.0) return;
  if (p <= 0.0) {
    infinite = true;
    return;
  }
  var.add((1.0 / p - 1.0) * fw * fw);
}

}  // namespace

double estimate_query(const WeightedSample& sample, const DomainQuery& query) {
  ExactSum sum;
  for (const auto& rec : sample.records) {
    if (!(rec.inclusion_probability > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "sampled key '" + rec.key + "' has zero inclusion probability");
    }
    if (query.domain && !query.domain(rec.key)) continue;
    sum.add(coefficient(query, rec.key) * query.f(rec.frequency) / rec.inclusion_probability);
  }
  return sum.value();
}

std::vector<RankPoint> estimate_rank_distribution(const WeightedSample& sample) {
  std::vector<SampleRecord> recs = sample.records;
  std::sort(recs.begin(), recs.end(), [](const SampleRecord& a, const SampleRecord& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.key < b.key;
  });
  std::vector<RankPoint> out(recs.size());
  double running = 0.0;
  std::size_t i = 0;
  while (i < recs.size()) {
    std::size_t j = i;
    while (j < recs.size() && recs[j].frequency == recs[i].frequency) {
      running += 1.0 / recs[j].inclusion_probability;
      ++j;
    }
    for (std::size_t t = i; t < j; ++t) out[t] = {recs[t].key, recs[t].frequency, running};
    i = j;
  }
  return out;
}

RunVariance bottom_k_run(const FrequencyVector& w, const FreqFn& f, const BottomKSpec& spec,
                         std::uint64_t hash_seed) {
  const SamplerConfig config{spec.k, spec.q, spec.scheme, hash_seed};
  config.validate();
  const HashSource hash = config.hash();
  const std::size_t n = w.size();

  RunVariance out;
  if (n <= spec.k) {
    out.estimate = apply_fn(f, w).norm;
    return out;
  }
  std::vector<double> weight(n);
  std::vector<double> seed(n);
  for (std::size_t i = 0; i < n; ++i) {
    weight[i] = spec.q == 0.0 ? 1.0 : std::pow(w[i].frequency, spec.q);
    seed[i] = hash.draw(w[i].key) / weight[i];
  }
  auto less = [&](std::size_t a, std::size_t b) {
    if (seed[a] != seed[b]) return seed[a] < seed[b];
    return w[a].key < w[b].key;
  };
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(spec.k + 1), order.end(), less);
  const std::size_t kth = order[spec.k - 1];
  const double tau_in = seed[order[spec.k]];
  const double tau_out = seed[kth];

  ExactSum estimate;
  ExactSum var;
  bool infinite = false;
  for (std::size_t i = 0; i < n; ++i) {
    const bool sampled = !less(kth, i);
    const double p = bottom_k_inclusion(spec.scheme, weight[i], sampled ? tau_in : tau_out);
    const double fw = f(w[i].frequency);
    if (sampled) estimate.add(fw / p);
    add_key_variance(var, infinite, p, fw);
  }
  out.estimate = estimate.value();
  out.variance = infinite ? kInf : var.value();
  return out;
}

RunVariance advice_run(const FrequencyVector& w, const FreqFn& f, const AdviceSpec& spec,
                       std::uint64_t hash_seed) {
  const AdviceSketchParams params{spec.k_h, spec.k_p, spec.k_u, f, spec.scheme, hash_seed};
  params.validate();
  const HashSource hash = params.hash();
  const std::size_t n = w.size();

  // S.h: top-k_h by advice, ties by key.
  std::vector<std::size_t> by_advice(n);
  std::iota(by_advice.begin(), by_advice.end(), 0);
  std::vector<double> advice(n);
  for (std::size_t i = 0; i < n; ++i) advice[i] = spec.advice(w[i].key);
  std::sort(by_advice.begin(), by_advice.end(), [&](std::size_t a, std::size_t b) {
    if (advice[a] != advice[b]) return advice[a] > advice[b];
    return w[a].key < w[b].key;
  });
  const std::size_t heavy = std::min(spec.k_h, n);

  ExactSum estimate;
  ExactSum var;
  bool infinite = false;
  for (std::size_t t = 0; t < heavy; ++t) estimate.add(f(w[by_advice[t]].frequency));

  std::vector<std::pair<double, Key>> seeds;
  std::vector<std::pair<double, Key>> hashes;
  std::vector<double> h(n);
  std::vector<double> r(n);
  std::vector<double> fa(n);
  for (std::size_t t = heavy; t < n; ++t) {
    const std::size_t i = by_advice[t];
    h[i] = hash.draw(w[i].key);
    fa[i] = f(advice[i]);
    r[i] = fa[i] > 0.0 ? h[i] / fa[i] : kInf;
    hashes.emplace_back(h[i], w[i].key);
    if (fa[i] > 0.0) seeds.emplace_back(r[i], w[i].key);
  }
  std::sort(seeds.begin(), seeds.end());
  std::sort(hashes.begin(), hashes.end());
  const std::size_t mp = spec.k_p > 0 ? spec.k_p - 1 : 0;
  const std::size_t mu = spec.k_u > 0 ? spec.k_u - 1 : 0;
  for (std::size_t t = heavy; t < n; ++t) {
    const std::size_t i = by_advice[t];
    const double tau_p = order_stat_excluding(seeds, {r[i], w[i].key}, mp);
    const double tau_u = order_stat_excluding(hashes, {h[i], w[i].key}, mu);
    const double p = hash.cdf(std::max(tau_u, fa[i] > 0.0 ? fa[i] * tau_p : 0.0));
    const double fw = f(w[i].frequency);
    if (h[i] < tau_u || r[i] < tau_p) estimate.add(fw / p);
    add_key_variance(var, infinite, p, fw);
  }

  RunVariance out;
  out.estimate = estimate.value();
  out.variance = infinite ? kInf : var.value();
  return out;
}

ErrorReport evaluate_nrmse(const FrequencyVector& w, const FreqFn& f, const SamplerSpec& sampler,
                           std::size_t trials, std::uint64_t seed, bool keep_per_trial) {
  if (trials < 1) throw Error(ErrorCode::invalid_argument, "trial count must be at least 1");
  ErrorReport report;
  report.exact = apply_fn(f, w).norm;
  if (!(report.exact > 0.0)) throw Error(ErrorCode::zero_norm, "||f(w)||_1 is zero");
  report.trials = trials;

  ExactSum estimates;
  ExactSum variances;
  bool infinite = false;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t run_seed = derive_seed(seed, t);
    double estimate = 0.0;
    if (const auto* wr = std::get_if<WithReplacementSpec>(&sampler)) {
      const auto sample = sample_with_replacement(w, wr->sampling, wr->k, run_seed);
      estimate = estimate_query(sample, DomainQuery{f, {}, {}});
    } else {
      const RunVariance run = std::holds_alternative<BottomKSpec>(sampler)
                                  ? bottom_k_run(w, f, std::get<BottomKSpec>(sampler), run_seed)
                                  : advice_run(w, f, std::get<AdviceSpec>(sampler), run_seed);
      estimate = run.estimate;
      if (std::isinf(run.variance)) infinite = true;
      else variances.add(run.variance);
    }
    estimates.add(estimate);
    if (keep_per_trial) report.per_trial.push_back(estimate);
  }
  report.estimate_mean = estimates.value() / static_cast<double>(trials);
  if (const auto* wr = std::get_if<WithReplacementSpec>(&sampler)) {
    report.variance = exact_wr_variance(w, f, wr->sampling, wr->k);
  } else {
    report.variance = infinite ? kInf : variances.value() / static_cast<double>(trials);
  }
  report.nrmse = std::sqrt(report.variance) / report.exact;
  return report;
}

double benchmark_key_bound(const FreqFn& f, const FrequencyVector& w, const Key& key, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::invalid_argument, "k must be at least 1");
  return f(w.frequency(key)) * apply_fn(f, w).norm / static_cast<double>(k);
}

BenchmarkBound benchmark_bound(const FreqFn& f, const FrequencyVector& w, std::size_t k,
                               const std::function<bool(const Key&)>& domain) {
  if (k < 1) throw Error(ErrorCode::invalid_argument, "k must be at least 1");
  const auto applied = apply_fn(f, w);
  ExactSum in_domain;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!domain || domain(w[i].key)) in_domain.add(applied.values[i]);
  }
  const double kk = static_cast<double>(k);
  return {applied.norm * applied.norm / kk, in_domain.value() * applied.norm / kk};
}

}  // namespace freqsketch
