#include "freqsketch/overhead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/zeta.hpp>

#include "freqsketch/error.hpp"
#include "freqsketch/exact_sum.hpp"
#include "freqsketch/zipf.hpp"

namespace freqsketch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonempty(const FrequencyVector& w) {
  if (w.empty()) throw Error(ErrorCode::invalid_argument, "frequency vector is empty");
}

void require_aligned(const ProbVector& p, const ProbVector& q) {
  if (p.size() != q.size()) throw Error(ErrorCode::invalid_argument, "probability vectors are not aligned");
}

}  // namespace

ProbVector::ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {
  ExactSum sum;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw Error(ErrorCode::invalid_argument, "probabilities must be nonnegative");
    sum.add(p);
  }
  if (std::fabs(sum.value() - 1.0) > 1e-9) throw Error(ErrorCode::invalid_argument, "probabilities must sum to 1");
}

ProbVector normalize(std::span<const double> values) {
  ExactSum sum;
  for (double v : values) sum.add(v);
  const double total = sum.value();
  if (!(total > 0.0)) throw Error(ErrorCode::zero_norm, "cannot normalize a zero vector");
  std::vector<double> out(values.begin(), values.end());
  for (double& v : out) v /= total;
  return ProbVector(std::move(out));
}

ProbVector pps_probs(const FreqFn& f, const FrequencyVector& w) { return normalize(apply_fn(f, w).values); }

double max_overhead(const ProbVector& p, const ProbVector& q) {
  require_aligned(p, q);
  double best = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return kInf;
    best = std::max(best, p[i] / q[i]);
  }
  return best;
}

double expected_overhead(const ProbVector& p, const ProbVector& q) {
  require_aligned(p, q);
  ExactSum sum;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return kInf;
    sum.add(p[i] * p[i] / q[i]);
  }
  return sum.value();
}

double normalized_moment(const FrequencyVector& w, double p) {
  require_nonempty(w);
  const double w1 = w[0].frequency;
  ExactSum sum;
  for (const auto& kf : w) sum.add(std::pow(kf.frequency / w1, p));
  return sum.value();
}

double lq_lp_overhead(const FrequencyVector& w, double p, double q) {
  if (!(q > 0.0)) throw Error(ErrorCode::invalid_argument, "q must be positive");
  if (p < q) throw Error(ErrorCode::invalid_argument, "emulation of l_p by l_q requires p >= q");
  return normalized_moment(w, q) / normalized_moment(w, p);
}

double heavy_hitter_phi(const FrequencyVector& w, double q) {
  if (!(q > 0.0)) throw Error(ErrorCode::invalid_argument, "q must be positive");
  return 1.0 / normalized_moment(w, q);
}

Certificate certify_emulation(const WeightedSample& sample, double norm_q, double q, std::size_t k) {
  if (sample.records.empty()) throw Error(ErrorCode::invalid_argument, "cannot certify an empty sample");
  if (!(norm_q > 0.0)) throw Error(ErrorCode::zero_norm, "||w||_q^q must be positive");
  Certificate out;
  double best = -1.0;
  for (const auto& rec : sample.records) {
    const double share = std::pow(rec.frequency, q) / norm_q;
    if (share > best || (share == best && rec.key < out.witness)) {
      best = share;
      out.witness = rec.key;
    }
  }
  out.equivalent_size = static_cast<double>(k) * best;
  return out;
}

double zeta(double s) {
  if (!(s > 1.0)) throw Error(ErrorCode::invalid_argument, "zeta is only used for s > 1");
  return boost::math::zeta(s);
}

SubZipfBound subzipf_bound(double alpha, double c, std::size_t n, double q) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "n must be at least 1");
  const double beta = q * alpha;
  const double cq = std::pow(c, q);
  SubZipfBound out;
  out.harmonic = cq * generalized_harmonic(n, beta);
  const double log_bound = 1.0 + std::log(static_cast<double>(n));
  if (beta > 1.0) {
    out.asymptotic = cq * std::min(log_bound, zeta(beta));
  } else if (beta == 1.0) {
    out.asymptotic = cq * log_bound;
  } else {
    out.below_range = true;
  }
  return out;
}

double universal_emulation_overhead(const ProbVector& q) {
  double best = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) return kInf;
    best = std::max(best, 1.0 / (static_cast<double>(i + 1) * q[i]));
  }
  return best;
}

double universal_estimation_overhead(const ProbVector& q) {
  double best = 0.0;
  ExactSum inverse_sum;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) return kInf;
    inverse_sum.add(1.0 / q[i]);
    const double rank = static_cast<double>(i + 1);
    best = std::max(best, inverse_sum.value() / (rank * rank));
  }
  return best;
}

ConcaveSublinear concave_sublinear_probs(const FrequencyVector& w) {
  require_nonempty(w);
  const std::size_t n = w.size();
  std::vector<double> qp(n);
  double tail = 0.0;  // sum_{j>i} w_j
  for (std::size_t i = n; i-- > 0;) {
    const double wi = w[i].frequency;
    qp[i] = wi / (static_cast<double>(i + 1) * wi + tail);
    tail += wi;
  }
  ExactSum factor;
  for (double v : qp) factor.add(v);
  return {normalize(qp), factor.value()};
}

ConcaveCondition concave_universal_condition(const FrequencyVector& w) {
  require_nonempty(w);
  const std::size_t n = w.size();
  const double hn = generalized_harmonic(n, 1.0);
  if (n < 2) return {kInf, hn};
  double c = kInf;
  double tail = 0.0;
  for (std::size_t i = n; i-- > 1;) {
    tail += w[i].frequency;  // sum over ranks > i (1-based rank i)
    c = std::min(c, static_cast<double>(i) * w[i - 1].frequency / tail);
  }
  return {c, (1.0 + 1.0 / c) * hn};
}

double worst_case_bound(std::size_t n, double p) {
  if (!(p > 0.0)) throw Error(ErrorCode::invalid_argument, "p must be positive");
  return std::pow(static_cast<double>(n), 1.0 - 2.0 / p);
}

double near_uniform_bound(const FrequencyVector& w, double p) {
  require_nonempty(w);
  return std::pow(w[0].frequency / w[w.size() - 1].frequency, p);
}

std::string_view base_scheme_name(BaseScheme scheme) {
  switch (scheme) {
    case BaseScheme::l1: return "l1";
    case BaseScheme::l2: return "l2";
    case BaseScheme::concave_sublinear: return "concave";
  }
  return "l1";
}

ProbVector base_probs(BaseScheme scheme, const FrequencyVector& w) {
  switch (scheme) {
    case BaseScheme::l1: return pps_probs(FreqFn::moment(1.0), w);
    case BaseScheme::l2: return pps_probs(FreqFn::moment(2.0), w);
    case BaseScheme::concave_sublinear: return concave_sublinear_probs(w).probs;
  }
  return pps_probs(FreqFn::moment(1.0), w);
}

const SchemeOverhead* OverheadReport::find(BaseScheme scheme) const {
  for (const auto& s : schemes) {
    if (s.scheme == scheme) return &s;
  }
  return nullptr;
}

OverheadReport overhead_report(const FrequencyVector& w, std::span<const double> targets,
                               std::span<const BaseScheme> schemes) {
  require_nonempty(w);
  OverheadReport report;
  report.n = w.size();
  report.harmonic_n = generalized_harmonic(w.size(), 1.0);
  report.phi_l1 = heavy_hitter_phi(w, 1.0);
  report.phi_l2 = heavy_hitter_phi(w, 2.0);
  report.zipf_alpha = w.size() >= 2 ? zipf_fit(w) : 0.0;
  report.zipf_slack = subzipf_slack(w, report.zipf_alpha);

  for (BaseScheme scheme : schemes) {
    SchemeOverhead row;
    row.scheme = scheme;
    const ProbVector q = base_probs(scheme, w);
    for (double p : targets) {
      TargetOverhead t;
      t.p = p;
      const ProbVector target = pps_probs(FreqFn::moment(p), w);
      t.max_overhead = max_overhead(target, q);
      t.expected_overhead = expected_overhead(target, q);
      if (scheme != BaseScheme::concave_sublinear) {
        const double exponent = scheme == BaseScheme::l1 ? 1.0 : 2.0;
        if (p >= exponent) {
          t.heavy_hitter_bound = 1.0 / (exponent == 1.0 ? report.phi_l1 : report.phi_l2);
          t.subzipf_bound = subzipf_bound(report.zipf_alpha, report.zipf_slack, w.size(), exponent).harmonic;
          if (scheme == BaseScheme::l2) t.worst_case_bound = worst_case_bound(w.size(), p);
          if (scheme == BaseScheme::l1) t.near_uniform_bound = near_uniform_bound(w, p);
        }
      }
      row.targets.push_back(t);
    }
    row.universal_emulation = universal_emulation_overhead(q);
    row.universal_estimation = universal_estimation_overhead(q);
    if (scheme == BaseScheme::concave_sublinear) row.concave_factor = concave_sublinear_probs(w).factor;
    report.schemes.push_back(std::move(row));
  }
  return report;
}

}  // namespace freqsketch
