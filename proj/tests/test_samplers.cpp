#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "freqsketch/error.hpp"
#include "freqsketch/estimation.hpp"
#include "freqsketch/samplers.hpp"
#include "test_util.hpp"

using namespace freqsketch;

namespace {

FrequencyVector small_vector() {
  return FrequencyVector::from_pairs(
      std::vector<KeyFrequency>{{"a", 9}, {"b", 5}, {"c", 3}, {"d", 2}, {"e", 1}, {"f", 1}});
}

// Pr[x among the first k successive weighted draws without replacement],
// by enumerating every ordered prefix.
std::map<Key, double> ppswor_inclusion_oracle(const FrequencyVector& w, double q, std::size_t k) {
  std::vector<double> v;
  for (const auto& kf : w) v.push_back(std::pow(kf.frequency, q));
  std::vector<double> incl(v.size(), 0.0);
  std::vector<bool> used(v.size(), false);
  std::function<void(std::size_t, double, double)> walk = [&](std::size_t depth, double prob, double left) {
    if (depth == k) return;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (used[i]) continue;
      const double p = prob * v[i] / left;
      incl[i] += p;
      used[i] = true;
      walk(depth + 1, p, left - v[i]);
      used[i] = false;
    }
  };
  double total = 0.0;
  for (double x : v) total += x;
  walk(0, 1.0, total);
  std::map<Key, double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out[w[i].key] = incl[i];
  return out;
}

BottomKSketch build(const FrequencyVector& w, SamplerConfig config) {
  BottomKSketch s(config);
  s.process(w);
  return s;
}

}  // namespace

TEST_CASE("bottom-k keeps the k smallest seeds and a shadow") {
  const auto w = testing::twenty_keys();
  const SamplerConfig config{5, 1.0, Scheme::ppswor, 17};
  const auto s = build(w, config);
  std::vector<std::pair<double, Key>> seeds;
  for (const auto& kf : w) seeds.push_back({s.seed_for(kf.key, kf.frequency), kf.key});
  std::sort(seeds.begin(), seeds.end());
  const auto entries = s.entries();
  REQUIRE(entries.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(entries[i].key == seeds[i].second);
  REQUIRE(s.shadow());
  CHECK(s.shadow()->key == seeds[5].second);

  const auto sample = s.finalize();
  CHECK(sample.threshold == seeds[5].first);
  for (const auto& r : sample.records) {
    CHECK(r.inclusion_probability == doctest::Approx(-std::expm1(-r.frequency * sample.threshold)));
  }
}

TEST_CASE("bottom-k with k at least n keeps everything with probability one") {
  const auto w = small_vector();
  const auto sample = build(w, {10, 2.0, Scheme::priority, 1}).finalize();
  CHECK(sample.records.size() == w.size());
  CHECK(std::isinf(sample.threshold));
  for (const auto& r : sample.records) CHECK(r.inclusion_probability == 1.0);
  CHECK(estimate_query(sample, {FreqFn::moment(2), {}, {}}) == apply_fn(FreqFn::moment(2), w).norm);
}

TEST_CASE("ppswor marginal inclusion matches successive weighted sampling") {
  const auto w = small_vector();
  for (const double q : {1.0, 2.0}) {
    for (const std::size_t k : {std::size_t{1}, std::size_t{3}}) {
      const auto oracle = ppswor_inclusion_oracle(w, q, k);
      std::map<Key, testing::Moments> hits;
      const int runs = 40000;
      for (int t = 0; t < runs; ++t) {
        const auto s = build(w, {k, q, Scheme::ppswor, derive_seed(1000 + k, t)});
        std::map<Key, double> in;
        for (const auto& e : s.entries()) in[e.key] = 1.0;
        for (const auto& kf : w) hits[kf.key].add(in.count(kf.key) ? 1.0 : 0.0);
      }
      for (const auto& kf : w) {
        INFO("q=" << q << " k=" << k << " key=" << kf.key);
        CHECK(testing::within_se(hits[kf.key], oracle.at(kf.key), 4.5));
      }
    }
  }
}

TEST_CASE("inverse-probability weights are unbiased for every scheme") {
  const auto w = small_vector();
  for (const auto scheme : {Scheme::ppswor, Scheme::priority}) {
    std::map<Key, testing::Moments> weight;
    testing::Moments total;
    const auto f = FreqFn::moment(3);
    const double truth = apply_fn(f, w).norm;
    for (int t = 0; t < 30000; ++t) {
      const auto sample = build(w, {3, 2.0, scheme, derive_seed(55, t)}).finalize();
      std::map<Key, double> inv;
      for (const auto& r : sample.records) inv[r.key] = 1.0 / r.inclusion_probability;
      for (const auto& kf : w) weight[kf.key].add(inv.count(kf.key) ? inv[kf.key] : 0.0);
      total.add(estimate_query(sample, {f, {}, {}}));
    }
    for (const auto& kf : w) {
      INFO(scheme_name(scheme) << " " << kf.key);
      CHECK(testing::within_se(weight[kf.key], 1.0, 4.5));
    }
    CHECK(testing::within_se(total, truth, 4.5));
  }
}

TEST_CASE("merging key-disjoint shards equals one pass") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const auto w = testing::random_vector(rng, 200);
    const SamplerConfig config{16, 1.5, trial % 2 ? Scheme::priority : Scheme::ppswor, rng()};
    const auto whole = build(w, config);

    const std::size_t shards = 2 + trial % 5;
    std::vector<BottomKSketch> parts(shards, BottomKSketch(config));
    for (const auto& kf : w) parts[rng() % shards].process(kf.key, kf.frequency);

    // left fold
    BottomKSketch folded = parts[0];
    for (std::size_t i = 1; i < shards; ++i) folded.merge(parts[i]);
    CHECK(folded == whole);

    // pairwise tree, reversed order
    std::vector<BottomKSketch> level(parts.rbegin(), parts.rend());
    while (level.size() > 1) {
      std::vector<BottomKSketch> next;
      for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
        next.push_back(level[i + 1]);
        next.back().merge(level[i]);
      }
      if (level.size() % 2) next.push_back(level.back());
      level = std::move(next);
    }
    CHECK(level[0] == whole);
  }
}

TEST_CASE("merge rejects differing configurations") {
  BottomKSketch a({4, 1.0, Scheme::ppswor, 1});
  BottomKSketch b({4, 1.0, Scheme::ppswor, 2});
  BottomKSketch c({5, 1.0, Scheme::ppswor, 1});
  BottomKSketch d({4, 1.0, Scheme::priority, 1});
  for (const auto* other : {&b, &c, &d}) {
    try {
      a.merge(*other);
      FAIL("expected config mismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::config_mismatch);
    }
  }
}

TEST_CASE("a key split across batches is reported") {
  BottomKSketch s({8, 1.0, Scheme::ppswor, 3});
  s.process("a", 2.0);
  try {
    s.process("a", 1.0);
    FAIL("expected duplicate key");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::duplicate_key);
  }
  CHECK_THROWS_AS(BottomKSketch({0, 1.0, Scheme::ppswor, 3}), Error);
  CHECK_THROWS_AS(s.process("z", -1.0), Error);
}

TEST_CASE("restore rebuilds an identical sketch") {
  const auto w = testing::twenty_keys();
  const SamplerConfig config{6, 1.0, Scheme::priority, 8};
  const auto s = build(w, config);
  const auto back = BottomKSketch::restore(config, s.entries(), s.shadow());
  CHECK(back == s);
  auto entries = s.entries();
  entries.pop_back();
  CHECK_THROWS_AS(BottomKSketch::restore(config, entries, s.shadow()), Error);
}

TEST_CASE("with-replacement inclusion") {
  const auto w = FrequencyVector::from_pairs(std::vector<KeyFrequency>{{"a", 3}, {"b", 1}});
  CHECK(with_replacement_inclusion(0.75, 2) == doctest::Approx(0.9375).epsilon(1e-15));
  CHECK(with_replacement_inclusion(1.0, 3) == 1.0);
  CHECK(with_replacement_inclusion(0.0, 3) == 0.0);

  const auto units = FrequencyVector::from_pairs(std::vector<KeyFrequency>{{"a", 1}, {"b", 1}});
  CHECK(exact_wr_variance(units, FreqFn::identity(), FreqFn::identity(), 1) == doctest::Approx(2.0));

  for (int t = 0; t < 20; ++t) {
    const auto sample = sample_with_replacement(w, FreqFn::identity(), 2, t);
    CHECK(sample.scheme == "with_replacement:identity");
    for (const auto& r : sample.records) {
      CHECK(r.inclusion_probability == doctest::Approx(r.key == "a" ? 0.9375 : 0.4375));
    }
  }
  CHECK_THROWS_AS(sample_with_replacement(FrequencyVector{}, FreqFn::identity(), 2, 1), Error);
}

TEST_CASE("with-replacement estimates are unbiased; covariance-aware variance is exact") {
  const auto w = testing::twenty_keys();
  const auto f = FreqFn::moment(2);
  const auto sampling = FreqFn::moment(2);
  const double truth = apply_fn(f, w).norm;
  testing::Moments m;
  for (int t = 0; t < 40000; ++t) m.add(estimate_query(sample_with_replacement(w, sampling, 4, derive_seed(9, t)), {f, {}, {}}));
  CHECK(testing::within_se(m, truth, 4.5));
  const double full = wr_variance_with_covariance(w, f, sampling, 4);
  CHECK(m.variance() == doctest::Approx(full).epsilon(0.05));
  // per-key sum ignores the negative covariances
  CHECK(exact_wr_variance(w, f, sampling, 4) >= full);
}

TEST_CASE("covariance-aware variance on tiny instances") {
  const auto units = FrequencyVector::from_pairs(std::vector<KeyFrequency>{{"a", 1}, {"b", 1}});
  // one draw always yields the estimate 2
  CHECK(wr_variance_with_covariance(units, FreqFn::identity(), FreqFn::identity(), 1) == doctest::Approx(0.0));
  const auto one = FrequencyVector::from_pairs(std::vector<KeyFrequency>{{"a", 3}});
  CHECK(wr_variance_with_covariance(one, FreqFn::identity(), FreqFn::identity(), 1) == 0.0);
  CHECK(exact_wr_variance(one, FreqFn::identity(), FreqFn::identity(), 1) == 0.0);
}
