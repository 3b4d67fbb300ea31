#include "freqsketch/advice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "freqsketch/error.hpp"
#include "freqsketch/exact_sum.hpp"
#include "freqsketch/tsv.hpp"

namespace freqsketch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

double order_stat_excluding(const std::vector<std::pair<double, Key>>& ordered,
                            const std::pair<double, Key>& self, std::size_t m) {
  if (m == 0) return 0.0;
  const bool present = std::binary_search(ordered.begin(), ordered.end(), self);
  const std::size_t others = ordered.size() - (present ? 1 : 0);
  if (others < m) return kInf;
  const auto pos = static_cast<std::size_t>(std::lower_bound(ordered.begin(), ordered.end(), self) - ordered.begin());
  if (present && pos < m) return ordered[m].first;
  return ordered[m - 1].first;
}

AdviceMap::AdviceMap(std::unordered_map<Key, double> predictions) : predictions_(std::move(predictions)) {
  for (const auto& [key, a] : predictions_) {
    if (!(a >= 0.0) || std::isinf(a)) throw Error(ErrorCode::negative_value, "advice for key '" + key + "' must be finite and nonnegative");
  }
}

AdviceMap AdviceMap::from_frequencies(const FrequencyVector& w) {
  std::unordered_map<Key, double> m;
  m.reserve(w.size());
  for (const auto& kf : w) m.emplace(kf.key, kf.frequency);
  return AdviceMap(std::move(m));
}

AdviceMap AdviceMap::load(const std::string& path) {
  std::unordered_map<Key, double> m;
  for (const auto& e : read_elements_file(path)) {
    if (!m.emplace(e.key, e.value).second) {
      throw Error(ErrorCode::parse_error, path + ": key '" + e.key + "' predicted twice");
    }
  }
  return AdviceMap(std::move(m));
}

double AdviceMap::operator()(const Key& key) const {
  auto it = predictions_.find(key);
  return it == predictions_.end() ? 0.0 : it->second;
}

AdviceMap advice_noise(const AdviceMap& advice, const NoiseModel& model, std::uint64_t rng_seed) {
  // One draw per key from a keyed hash, so shards that each see part of the
  // advice agree on every key's perturbation.
  const HashSource draws(rng_seed, HashFamily::uniform01);
  auto unit = [&](const Key& key) { return draws.unit(key) - 0x1p-53; };  // [0,1)
  std::unordered_map<Key, double> out;
  out.reserve(advice.size());
  if (const auto* mult = std::get_if<MultiplicativeNoise>(&model)) {
    if (!(mult->c >= 1.0)) throw Error(ErrorCode::invalid_argument, "multiplicative noise factor C must be >= 1");
    const double log_c = std::log(mult->c);
    for (const auto& [key, a] : advice.predictions()) out.emplace(key, a * std::exp(log_c * (2.0 * unit(key) - 1.0)));
  } else {
    const double rate = std::get<DropoutNoise>(model).rate;
    if (!(rate >= 0.0 && rate <= 1.0)) throw Error(ErrorCode::invalid_argument, "dropout rate must be in [0,1]");
    for (const auto& [key, a] : advice.predictions()) out.emplace(key, unit(key) < rate ? 0.0 : a);
  }
  return AdviceMap(std::move(out));
}

void AdviceSketchParams::validate() const {
  if (k_h + k_p + k_u < 1) throw Error(ErrorCode::invalid_argument, "k_h + k_p + k_u must be at least 1");
}

AdviceSketch::AdviceSketch(AdviceSketchParams params) : params_(std::move(params)) { params_.validate(); }

AdviceSketch::Record AdviceSketch::make_record(const Key& key, double count, double advice) const {
  Record r;
  r.key = key;
  r.frequency = count;
  r.advice = advice;
  r.hash = params_.hash().draw(key);
  const double fa = params_.f(advice);
  r.seed = fa > 0.0 ? r.hash / fa : kInf;
  return r;
}

void AdviceSketch::process(const Element& update, const AdviceMap& advice) {
  process(update.key, update.value, advice(update.key));
}

void AdviceSketch::process(const Key& key, double delta, double advice) {
  if (!(delta >= 0.0) || std::isinf(delta)) throw Error(ErrorCode::negative_value, "update for key '" + key + "' has a negative value");
  if (!(advice >= 0.0) || std::isinf(advice)) throw Error(ErrorCode::negative_value, "advice for key '" + key + "' must be nonnegative");
  if (auto it = heavy_.find(key); it != heavy_.end()) {
    it->second.frequency += delta;
    return;
  }
  if (auto it = pu_.find(key); it != pu_.end()) {
    it->second.frequency += delta;
    return;
  }
  if (delta == 0.0) return;
  const std::pair<double, Key> rank{advice, key};
  if (params_.k_h > 0 && (heavy_.size() < params_.k_h || heavy_order_.key_comp()(rank, *heavy_order_.rbegin()))) {
    insert_heavy(make_record(key, delta, advice));
    return;
  }
  process_pu(make_record(key, delta, advice));
}

void AdviceSketch::insert_heavy(Record record) {
  heavy_order_.insert({record.advice, record.key});
  heavy_.emplace(record.key, std::move(record));
  if (heavy_.size() > params_.k_h) {
    auto worst = std::prev(heavy_order_.end());
    auto node = heavy_.extract(worst->second);
    heavy_order_.erase(worst);
    process_pu(std::move(node.mapped()));
  }
}

void AdviceSketch::process_pu(Record record) {
  const std::pair<double, Key> by_r{record.seed, record.key};
  const std::pair<double, Key> by_h{record.hash, record.key};
  const bool qualifies_p = params_.k_p > 0 && !std::isinf(record.seed) &&
                           (by_seed_.size() < params_.k_p || by_r < *by_seed_.rbegin());
  const bool qualifies_u = params_.k_u > 0 && (by_hash_.size() < params_.k_u || by_h < *by_hash_.rbegin());
  if (!qualifies_p && !qualifies_u) return;

  pu_.emplace(record.key, std::move(record));
  if (qualifies_p) {
    by_seed_.insert(by_r);
    if (by_seed_.size() > params_.k_p) {
      auto last = std::prev(by_seed_.end());
      const Key ejected = last->second;
      by_seed_.erase(last);
      release_if_unreferenced(ejected);
    }
  }
  if (qualifies_u) {
    by_hash_.insert(by_h);
    if (by_hash_.size() > params_.k_u) {
      auto last = std::prev(by_hash_.end());
      const Key ejected = last->second;
      by_hash_.erase(last);
      release_if_unreferenced(ejected);
    }
  }
}

void AdviceSketch::release_if_unreferenced(const Key& key) {
  auto it = pu_.find(key);
  if (it == pu_.end()) return;
  const auto& rec = it->second;
  if (by_seed_.contains({rec.seed, rec.key}) || by_hash_.contains({rec.hash, rec.key})) return;
  pu_.erase(it);
}

void AdviceSketch::merge(const AdviceSketch& other) {
  if (!(other.params_ == params_)) {
    throw Error(ErrorCode::config_mismatch, "cannot merge advice sketches with different parameters");
  }
  std::unordered_map<Key, std::pair<Record, bool>> all;  // record, was heavy
  auto absorb = [&](const std::unordered_map<Key, Record>& part, bool heavy) {
    for (const auto& [key, rec] : part) {
      auto [it, fresh] = all.emplace(key, std::make_pair(rec, heavy));
      if (fresh) continue;
      if (it->second.first.advice != rec.advice) {
        throw Error(ErrorCode::invalid_argument, "inconsistent advice for key '" + key + "' across sketches");
      }
      it->second.first.frequency += rec.frequency;
      it->second.second = it->second.second || heavy;
    }
  };
  absorb(heavy_, true);
  absorb(pu_, false);
  absorb(other.heavy_, true);
  absorb(other.pu_, false);

  heavy_.clear();
  heavy_order_.clear();
  pu_.clear();
  by_seed_.clear();
  by_hash_.clear();

  std::vector<Record> candidates;
  std::vector<Record> rest;
  for (auto& [key, entry] : all) (entry.second ? candidates : rest).push_back(std::move(entry.first));
  std::sort(candidates.begin(), candidates.end(), [](const Record& a, const Record& b) {
    return AdviceOrder{}({a.advice, a.key}, {b.advice, b.key});
  });
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (i < params_.k_h) {
      heavy_order_.insert({candidates[i].advice, candidates[i].key});
      heavy_.emplace(candidates[i].key, std::move(candidates[i]));
    } else {
      rest.push_back(std::move(candidates[i]));
    }
  }
  for (auto& rec : rest) process_pu(std::move(rec));
}

AdviceEstimate AdviceSketch::estimate() const {
  AdviceEstimate out;
  ExactSum total;
  const auto sample = finalize();
  for (const auto& rec : sample.records) {
    const double fhat = params_.f(rec.frequency) / rec.inclusion_probability;
    out.per_key.emplace_back(rec.key, fhat);
    total.add(fhat);
  }
  std::sort(out.per_key.begin(), out.per_key.end());
  out.total = total.value();
  return out;
}

WeightedSample AdviceSketch::finalize() const {
  WeightedSample out;
  out.scheme = "advice:" + std::string(scheme_name(params_.scheme));
  out.k = params_.k_h + params_.k_p + params_.k_u;
  out.q = 0.0;
  out.threshold = 0.0;
  for (const auto& rec : heavy()) out.records.push_back({rec.key, rec.frequency, 1.0});

  const std::vector<std::pair<double, Key>> seeds(by_seed_.begin(), by_seed_.end());
  const std::vector<std::pair<double, Key>> hashes(by_hash_.begin(), by_hash_.end());
  const std::size_t mp = params_.k_p > 0 ? params_.k_p - 1 : 0;
  const std::size_t mu = params_.k_u > 0 ? params_.k_u - 1 : 0;
  for (const auto& rec : sampled()) {
    const double tau_p = order_stat_excluding(seeds, {rec.seed, rec.key}, mp);
    const double tau_u = order_stat_excluding(hashes, {rec.hash, rec.key}, mu);
    if (!(rec.hash < tau_u || rec.seed < tau_p)) continue;
    const double fa = params_.f(rec.advice);
    const double by_advice = fa > 0.0 ? fa * tau_p : 0.0;
    out.records.push_back({rec.key, rec.frequency, params_.hash().cdf(std::max(tau_u, by_advice))});
  }
  return out;
}

std::vector<AdviceSketch::Record> AdviceSketch::heavy() const {
  std::vector<Record> out;
  out.reserve(heavy_.size());
  for (const auto& [advice, key] : heavy_order_) out.push_back(heavy_.at(key));
  return out;
}

std::vector<AdviceSketch::Record> AdviceSketch::sampled() const {
  std::vector<Record> out;
  out.reserve(pu_.size());
  for (const auto& [key, rec] : pu_) out.push_back(rec);
  std::sort(out.begin(), out.end(), [](const Record& a, const Record& b) { return a.key < b.key; });
  return out;
}

AdviceSketch AdviceSketch::restore(AdviceSketchParams params, const std::vector<Record>& heavy,
                                   const std::vector<Record>& sampled) {
  AdviceSketch out(std::move(params));
  if (heavy.size() > out.params_.k_h) throw Error(ErrorCode::format_error, "more heavy records than k_h");
  for (const auto& rec : heavy) {
    const auto expected = out.make_record(rec.key, rec.frequency, rec.advice);
    if (expected.hash != rec.hash || expected.seed != rec.seed) {
      throw Error(ErrorCode::format_error, "record for key '" + rec.key + "' does not match the hash seed");
    }
    out.heavy_order_.insert({rec.advice, rec.key});
    out.heavy_.emplace(rec.key, rec);
  }
  for (const auto& rec : sampled) {
    const auto expected = out.make_record(rec.key, rec.frequency, rec.advice);
    if (expected.hash != rec.hash || expected.seed != rec.seed) {
      throw Error(ErrorCode::format_error, "record for key '" + rec.key + "' does not match the hash seed");
    }
    out.process_pu(rec);
  }
  if (out.pu_.size() != sampled.size()) throw Error(ErrorCode::format_error, "sampled records violate the retention rule");
  return out;
}

AdviceSizing calibrate_advice_sizes(const FrequencyVector& w, const AdviceMap& advice,
                                    const FreqFn& f, std::size_t k) {
  const auto fw = apply_fn(f, w);
  if (!(fw.norm > 0.0)) throw Error(ErrorCode::zero_norm, "f(w) is identically zero");
  ExactSum fa_norm;
  std::vector<double> fa(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    fa[i] = f(advice(w[i].key));
    fa_norm.add(fa[i]);
  }
  const double fa_total = fa_norm.value();
  const double n = static_cast<double>(w.size());

  struct KeyNeed {
    double ratio;  // (f(w)/||f(w)||) / (f(a)/||f(a)||)
    double share;  // f(w)/||f(w)||
  };
  std::vector<KeyNeed> needs;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double share = fw.values[i] / fw.norm;
    if (share == 0.0) continue;
    const double ratio = fa[i] > 0.0 ? share / (fa[i] / fa_total) : kInf;
    needs.push_back({ratio, share});
  }
  std::sort(needs.begin(), needs.end(), [](const KeyNeed& a, const KeyNeed& b) { return a.ratio > b.ratio; });

  auto size_for = [&](double c) { return static_cast<std::size_t>(std::ceil(static_cast<double>(k) * c)) + 2; };
  AdviceSizing best;
  bool have = false;
  double max_share = 0.0;  // over keys left to the uniform component
  for (std::size_t j = 0; j <= needs.size(); ++j) {
    const double c_p = j < needs.size() ? needs[j].ratio : 0.0;
    if (!std::isinf(c_p)) {
      const double c_u = n * max_share;
      const std::size_t total = size_for(c_p) + size_for(c_u);
      if (!have || total < best.k_p + best.k_u) {
        best = {c_p, c_u, size_for(c_p), size_for(c_u)};
        have = true;
      }
    }
    if (j < needs.size()) max_share = std::max(max_share, needs[j].share);
  }
  return best;
}

}  // namespace freqsketch
