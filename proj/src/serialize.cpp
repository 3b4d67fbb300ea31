#include "freqsketch/serialize.hpp"

#include <cmath>
#include <limits>

#include "freqsketch/error.hpp"

namespace freqsketch {

using nlohmann::json;

namespace {

constexpr std::string_view kBottomK = "freqsketch/bottom_k";
constexpr std::string_view kAdvice = "freqsketch/advice";
constexpr std::string_view kSample = "freqsketch/sample";

json real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double real_from(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::format_error, "unexpected string '" + s + "' for a real");
  }
  return j.get<double>();
}

json opt(const std::optional<double>& x) { return x ? real(*x) : json(nullptr); }

void expect_format(const json& j, std::string_view format) {
  if (!j.is_object() || !j.contains("format") || j.at("format") != format) {
    throw Error(ErrorCode::format_error, "expected a " + std::string(format) + " blob");
  }
  if (j.value("version", 0) != kBlobVersion) {
    throw Error(ErrorCode::format_error, "unsupported " + std::string(format) + " version");
  }
}

template <typename F>
auto guarded(F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format_error, std::string("malformed blob: ") + e.what());
  }
}

json entry_json(const BottomKSketch::Entry& e) {
  return {{"key", e.key}, {"frequency", real(e.frequency)}, {"seed", real(e.seed)}};
}

BottomKSketch::Entry entry_from(const json& j) {
  return {j.at("key").get<std::string>(), real_from(j.at("frequency")), real_from(j.at("seed"))};
}

json record_json(const AdviceSketch::Record& r) {
  return {{"key", r.key},
          {"frequency", real(r.frequency)},
          {"advice", real(r.advice)},
          {"hash", real(r.hash)},
          {"seed", real(r.seed)}};
}

AdviceSketch::Record record_from(const json& j) {
  AdviceSketch::Record r;
  r.key = j.at("key").get<std::string>();
  r.frequency = real_from(j.at("frequency"));
  r.advice = real_from(j.at("advice"));
  r.hash = real_from(j.at("hash"));
  r.seed = real_from(j.at("seed"));
  return r;
}

}  // namespace

json to_json(const BottomKSketch& sketch) {
  const auto& c = sketch.config();
  json entries = json::array();
  for (const auto& e : sketch.entries()) entries.push_back(entry_json(e));
  const auto shadow = sketch.shadow();
  return {{"format", kBottomK},
          {"version", kBlobVersion},
          {"config", {{"k", c.k}, {"q", c.q}, {"scheme", scheme_name(c.scheme)}, {"hash_seed", c.hash_seed}}},
          {"entries", std::move(entries)},
          {"shadow", shadow ? entry_json(*shadow) : json(nullptr)}};
}

BottomKSketch bottom_k_from_json(const json& j) {
  return guarded([&] {
    expect_format(j, kBottomK);
    const auto& c = j.at("config");
    SamplerConfig config{c.at("k").get<std::size_t>(), c.at("q").get<double>(),
                         parse_scheme(c.at("scheme").get<std::string>()), c.at("hash_seed").get<std::uint64_t>()};
    std::vector<BottomKSketch::Entry> entries;
    for (const auto& e : j.at("entries")) entries.push_back(entry_from(e));
    std::optional<BottomKSketch::Entry> shadow;
    if (!j.at("shadow").is_null()) shadow = entry_from(j.at("shadow"));
    for (const auto& e : entries) {
      BottomKSketch probe(config);
      if (probe.seed_for(e.key, e.frequency) != e.seed) {
        throw Error(ErrorCode::format_error, "seed of key '" + e.key + "' does not match the configuration");
      }
    }
    return BottomKSketch::restore(config, std::move(entries), std::move(shadow));
  });
}

json to_json(const AdviceSketch& sketch) {
  const auto& p = sketch.params();
  json heavy = json::array();
  for (const auto& r : sketch.heavy()) heavy.push_back(record_json(r));
  json sampled = json::array();
  for (const auto& r : sketch.sampled()) sampled.push_back(record_json(r));
  return {{"format", kAdvice},
          {"version", kBlobVersion},
          {"params",
           {{"k_h", p.k_h},
            {"k_p", p.k_p},
            {"k_u", p.k_u},
            {"f", p.f.to_string()},
            {"scheme", scheme_name(p.scheme)},
            {"hash_seed", p.hash_seed}}},
          {"heavy", std::move(heavy)},
          {"sampled", std::move(sampled)}};
}

AdviceSketch advice_from_json(const json& j) {
  return guarded([&] {
    expect_format(j, kAdvice);
    const auto& p = j.at("params");
    AdviceSketchParams params{p.at("k_h").get<std::size_t>(),
                              p.at("k_p").get<std::size_t>(),
                              p.at("k_u").get<std::size_t>(),
                              FreqFn::parse(p.at("f").get<std::string>()),
                              parse_scheme(p.at("scheme").get<std::string>()),
                              p.at("hash_seed").get<std::uint64_t>()};
    std::vector<AdviceSketch::Record> heavy;
    for (const auto& r : j.at("heavy")) heavy.push_back(record_from(r));
    std::vector<AdviceSketch::Record> sampled;
    for (const auto& r : j.at("sampled")) sampled.push_back(record_from(r));
    return AdviceSketch::restore(std::move(params), heavy, sampled);
  });
}

json to_json(const WeightedSample& sample) {
  json records = json::array();
  for (const auto& r : sample.records) {
    records.push_back({{"key", r.key}, {"frequency", real(r.frequency)}, {"p", real(r.inclusion_probability)}});
  }
  return {{"format", kSample},
          {"version", kBlobVersion},
          {"scheme", sample.scheme},
          {"k", sample.k},
          {"q", sample.q},
          {"threshold", real(sample.threshold)},
          {"records", std::move(records)}};
}

WeightedSample sample_from_json(const json& j) {
  return guarded([&] {
    expect_format(j, kSample);
    WeightedSample s;
    s.scheme = j.at("scheme").get<std::string>();
    s.k = j.at("k").get<std::size_t>();
    s.q = j.at("q").get<double>();
    s.threshold = real_from(j.at("threshold"));
    for (const auto& r : j.at("records")) {
      const double p = real_from(r.at("p"));
      if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::format_error, "inclusion probability outside (0,1]");
      s.records.push_back({r.at("key").get<std::string>(), real_from(r.at("frequency")), p});
    }
    return s;
  });
}

json to_json(const ErrorReport& report) {
  json j = {{"estimate_mean", real(report.estimate_mean)},
            {"exact", real(report.exact)},
            {"variance", real(report.variance)},
            {"nrmse", real(report.nrmse)},
            {"trials", report.trials}};
  if (!report.per_trial.empty()) {
    json per = json::array();
    for (double x : report.per_trial) per.push_back(real(x));
    j["per_trial"] = std::move(per);
  }
  return j;
}

json to_json(const OverheadReport& report) {
  json schemes = json::array();
  for (const auto& s : report.schemes) {
    json targets = json::array();
    for (const auto& t : s.targets) {
      targets.push_back({{"p", t.p},
                         {"max_overhead", real(t.max_overhead)},
                         {"expected_overhead", real(t.expected_overhead)},
                         {"heavy_hitter_bound", opt(t.heavy_hitter_bound)},
                         {"subzipf_bound", opt(t.subzipf_bound)},
                         {"worst_case_bound", opt(t.worst_case_bound)},
                         {"near_uniform_bound", opt(t.near_uniform_bound)}});
    }
    json row = {{"scheme", base_scheme_name(s.scheme)},
                {"targets", std::move(targets)},
                {"universal_emulation", real(s.universal_emulation)},
                {"universal_estimation", real(s.universal_estimation)}};
    if (s.concave_factor) row["concave_factor"] = real(*s.concave_factor);
    schemes.push_back(std::move(row));
  }
  return {{"n", report.n},
          {"harmonic_n", report.harmonic_n},
          {"phi_l1", real(report.phi_l1)},
          {"phi_l2", real(report.phi_l2)},
          {"zipf_alpha", real(report.zipf_alpha)},
          {"zipf_slack", real(report.zipf_slack)},
          {"schemes", std::move(schemes)}};
}

Blob blob_from_json(const json& j) {
  const std::string format = j.is_object() && j.contains("format") && j.at("format").is_string()
                                 ? j.at("format").get<std::string>()
                                 : "";
  if (format == kBottomK) return bottom_k_from_json(j);
  if (format == kAdvice) return advice_from_json(j);
  if (format == kSample) return sample_from_json(j);
  throw Error(ErrorCode::format_error, "unrecognized blob format '" + format + "'");
}

json blob_to_json(const Blob& blob) {
  return std::visit([](const auto& b) { return to_json(b); }, blob);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace freqsketch
