#include "freqsketch/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "freqsketch/error.hpp"
#include "freqsketch/exact_sum.hpp"

namespace freqsketch {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string_view scheme_name(Scheme scheme) {
  return scheme == Scheme::ppswor ? "ppswor" : "priority";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "ppswor") return Scheme::ppswor;
  if (text == "priority") return Scheme::priority;
  throw Error(ErrorCode::parse_error, "unknown scheme '" + std::string(text) + "'");
}

HashFamily hash_family_for(Scheme scheme) {
  return scheme == Scheme::ppswor ? HashFamily::exp1 : HashFamily::uniform01;
}

double scheme_cdf(Scheme scheme, double threshold) {
  return HashSource(0, hash_family_for(scheme)).cdf(threshold);
}

void SamplerConfig::validate() const {
  if (k < 1) throw Error(ErrorCode::invalid_argument, "sample size k must be at least 1");
  if (!(q >= 0.0) || std::isinf(q)) throw Error(ErrorCode::invalid_argument, "weight exponent q must be >= 0");
}

double bottom_k_inclusion(Scheme scheme, double weight, double tau) {
  if (std::isinf(tau)) return 1.0;
  return scheme_cdf(scheme, weight * tau);
}

BottomKSketch::BottomKSketch(SamplerConfig config) : config_(config) { config_.validate(); }

double BottomKSketch::seed_for(const Key& key, double frequency) const {
  const double weight = config_.q == 0.0 ? 1.0 : std::pow(frequency, config_.q);
  return config_.hash().draw(key) / weight;
}

void BottomKSketch::insert(Entry entry) {
  if (keys_.contains(entry.key)) {
    throw Error(ErrorCode::duplicate_key,
                "key '" + entry.key + "' was already processed; keys must be confined to one batch");
  }
  if (kept_.size() == config_.k + 1 && !SeedOrder{}(entry, *kept_.rbegin())) return;
  keys_.insert(entry.key);
  kept_.insert(std::move(entry));
  if (kept_.size() > config_.k + 1) {
    auto last = std::prev(kept_.end());
    keys_.erase(last->key);
    kept_.erase(last);
  }
}

void BottomKSketch::process(const Key& key, double frequency) {
  if (!(frequency >= 0.0)) throw Error(ErrorCode::negative_value, "negative frequency for key '" + key + "'");
  if (frequency == 0.0) return;
  insert({key, frequency, seed_for(key, frequency)});
}

void BottomKSketch::process(const FrequencyVector& batch) {
  for (const auto& kf : batch) process(kf.key, kf.frequency);
}

void BottomKSketch::merge(const BottomKSketch& other) {
  if (!(other.config_ == config_)) {
    throw Error(ErrorCode::config_mismatch, "cannot merge bottom-k sketches with different configurations");
  }
  for (const auto& e : other.kept_) insert(e);
}

std::vector<BottomKSketch::Entry> BottomKSketch::entries() const {
  std::vector<Entry> out;
  out.reserve(std::min(kept_.size(), config_.k));
  for (const auto& e : kept_) {
    if (out.size() == config_.k) break;
    out.push_back(e);
  }
  return out;
}

std::optional<BottomKSketch::Entry> BottomKSketch::shadow() const {
  if (kept_.size() <= config_.k) return std::nullopt;
  return *kept_.rbegin();
}

std::size_t BottomKSketch::size() const { return std::min(kept_.size(), config_.k); }

WeightedSample BottomKSketch::finalize() const {
  WeightedSample out;
  out.scheme = std::string(scheme_name(config_.scheme));
  out.k = config_.k;
  out.q = config_.q;
  const auto sh = shadow();
  out.threshold = sh ? sh->seed : kInf;
  for (const auto& e : entries()) {
    const double weight = config_.q == 0.0 ? 1.0 : std::pow(e.frequency, config_.q);
    out.records.push_back({e.key, e.frequency, bottom_k_inclusion(config_.scheme, weight, out.threshold)});
  }
  return out;
}

BottomKSketch BottomKSketch::restore(SamplerConfig config, std::vector<Entry> entries,
                                     std::optional<Entry> shadow) {
  BottomKSketch out(config);
  if (entries.size() > config.k) throw Error(ErrorCode::format_error, "more entries than k");
  if (shadow && entries.size() != config.k) throw Error(ErrorCode::format_error, "shadow present with fewer than k entries");
  for (auto& e : entries) out.insert(std::move(e));
  if (shadow) out.insert(*shadow);
  if (shadow && out.shadow() != shadow) throw Error(ErrorCode::format_error, "shadow seed is not the largest");
  return out;
}

double with_replacement_inclusion(double p, std::size_t k) {
  if (p >= 1.0) return 1.0;
  if (p <= 0.0) return 0.0;
  return -std::expm1(static_cast<double>(k) * std::log1p(-p));
}

WeightedSample sample_with_replacement(const FrequencyVector& w, const FreqFn& sampling,
                                       std::size_t k, std::uint64_t rng_seed) {
  if (k < 1) throw Error(ErrorCode::invalid_argument, "sample size k must be at least 1");
  const auto applied = apply_fn(sampling, w);
  if (!(applied.norm > 0.0)) throw Error(ErrorCode::zero_norm, "sampling weights are all zero");

  std::vector<double> cumulative(applied.values.size());
  double run = 0.0;
  for (std::size_t i = 0; i < applied.values.size(); ++i) {
    run += applied.values[i];
    cumulative[i] = run;
  }
  std::mt19937_64 rng(rng_seed);
  std::vector<bool> hit(w.size(), false);
  for (std::size_t draw = 0; draw < k; ++draw) {
    const double target = bits_to_unit(rng()) * run;
    auto it = std::lower_bound(cumulative.begin(), cumulative.end(), target);
    if (it == cumulative.end()) --it;
    hit[static_cast<std::size_t>(it - cumulative.begin())] = true;
  }

  WeightedSample out;
  out.scheme = "with_replacement:" + sampling.to_string();
  out.k = k;
  out.q = sampling.kind() == FreqFn::Kind::moment ? sampling.parameter() : 0.0;
  out.threshold = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!hit[i]) continue;
    const double p = applied.values[i] / applied.norm;
    out.records.push_back({w[i].key, w[i].frequency, with_replacement_inclusion(p, k)});
  }
  return out;
}

double exact_wr_variance(const FrequencyVector& w, const FreqFn& target, const FreqFn& sampling,
                         std::size_t k) {
  const auto applied = apply_fn(sampling, w);
  if (!(applied.norm > 0.0)) throw Error(ErrorCode::zero_norm, "sampling weights are all zero");
  ExactSum var;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double ft = target(w[i].frequency);
    if (ft == 0.0) continue;
    const double inc = with_replacement_inclusion(applied.values[i] / applied.norm, k);
    if (inc == 0.0) return kInf;
    var.add((1.0 / inc - 1.0) * ft * ft);
  }
  return var.value();
}

double wr_variance_with_covariance(const FrequencyVector& w, const FreqFn& target,
                                   const FreqFn& sampling, std::size_t k) {
  const auto applied = apply_fn(sampling, w);
  if (!(applied.norm > 0.0)) throw Error(ErrorCode::zero_norm, "sampling weights are all zero");
  const double kk = static_cast<double>(k);
  std::vector<double> p;
  std::vector<double> inc;
  std::vector<double> ft;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double f = target(w[i].frequency);
    if (f == 0.0) continue;
    const double pi = applied.values[i] / applied.norm;
    if (pi == 0.0) return kInf;
    p.push_back(pi);
    inc.push_back(with_replacement_inclusion(pi, k));
    ft.push_back(f);
  }
  ExactSum var;
  for (std::size_t i = 0; i < p.size(); ++i) {
    var.add((1.0 / inc[i] - 1.0) * ft[i] * ft[i]);
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const double rest = 1.0 - p[i] - p[j];
      const double neither = rest <= 0.0 ? 0.0 : std::exp(kk * std::log1p(-(p[i] + p[j])));
      const double both = inc[i] + inc[j] - 1.0 + neither;
      var.add(2.0 * ft[i] * ft[j] * (both / (inc[i] * inc[j]) - 1.0));
    }
  }
  return std::max(0.0, var.value());
}

}  // namespace freqsketch
