#include "freqsketch/freq_fn.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "freqsketch/error.hpp"
#include "freqsketch/exact_sum.hpp"
#include "freqsketch/tsv.hpp"

namespace freqsketch {

FreqFn FreqFn::moment(double p) {
  if (!(p > 0.0) || std::isinf(p)) throw Error(ErrorCode::invalid_argument, "moment exponent must be positive");
  return {Kind::moment, p};
}
FreqFn FreqFn::threshold(double t) { return {Kind::threshold, t}; }
FreqFn FreqFn::rank_threshold(double t) {
  // 1[w >= T] with T <= 0 would give f(0) = 1.
  if (!(t > 0.0)) throw Error(ErrorCode::invalid_argument, "rank_threshold requires T > 0");
  return {Kind::rank_threshold, t};
}
FreqFn FreqFn::threshold_weight(double t) { return {Kind::threshold_weight, t}; }
FreqFn FreqFn::cap(double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::invalid_argument, "cap requires T > 0");
  return {Kind::cap, t};
}
FreqFn FreqFn::distinct() { return {Kind::distinct, 0.0}; }
FreqFn FreqFn::identity() { return {Kind::identity, 0.0}; }

bool FreqFn::is_monotone() const { return true; }

double FreqFn::operator()(double w) const {
  if (w <= 0.0) return 0.0;
  switch (kind_) {
    case Kind::moment: return param_ == 1.0 ? w : std::pow(w, param_);
    case Kind::threshold: return w > param_ ? 1.0 : 0.0;
    case Kind::rank_threshold: return w >= param_ ? 1.0 : 0.0;
    case Kind::threshold_weight: return w > param_ ? w : 0.0;
    case Kind::cap: return std::min(w, param_);
    case Kind::distinct: return 1.0;
    case Kind::identity: return w;
  }
  return 0.0;
}

namespace {

double parse_param(std::string_view text, std::string_view spec) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::parse_error, "bad parameter in function spec '" + std::string(spec) + "'");
  }
  return value;
}

}  // namespace

FreqFn FreqFn::parse(std::string_view text) {
  const auto colon = text.find(':');
  const auto name = text.substr(0, colon);
  const bool has_param = colon != std::string_view::npos;
  auto param = [&] {
    if (!has_param) throw Error(ErrorCode::parse_error, "function '" + std::string(text) + "' needs a parameter");
    return parse_param(text.substr(colon + 1), text);
  };
  if (name == "moment") return moment(param());
  if (name == "threshold") return threshold(param());
  if (name == "rank_threshold") return rank_threshold(param());
  if (name == "threshold_weight") return threshold_weight(param());
  if (name == "cap") return cap(param());
  if (name == "distinct" && !has_param) return distinct();
  if (name == "identity" && !has_param) return identity();
  throw Error(ErrorCode::parse_error, "unknown function spec '" + std::string(text) + "'");
}

std::string FreqFn::to_string() const {
  switch (kind_) {
    case Kind::moment: return "moment:" + format_double(param_);
    case Kind::threshold: return "threshold:" + format_double(param_);
    case Kind::rank_threshold: return "rank_threshold:" + format_double(param_);
    case Kind::threshold_weight: return "threshold_weight:" + format_double(param_);
    case Kind::cap: return "cap:" + format_double(param_);
    case Kind::distinct: return "distinct";
    case Kind::identity: return "identity";
  }
  return "identity";
}

AppliedFn apply_fn(const FreqFn& f, const FrequencyVector& w) {
  AppliedFn out;
  out.values.reserve(w.size());
  ExactSum norm;
  for (const auto& kf : w) {
    const double v = f(kf.frequency);
    out.values.push_back(v);
    norm.add(v);
  }
  out.norm = norm.value();
  return out;
}

}  // namespace freqsketch
