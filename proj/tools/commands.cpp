#include "commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "freqsketch/advice.hpp"
#include "freqsketch/error.hpp"
#include "freqsketch/estimation.hpp"
#include "freqsketch/overhead.hpp"
#include "freqsketch/samplers.hpp"
#include "freqsketch/serialize.hpp"
#include "freqsketch/tsv.hpp"
#include "freqsketch/zipf.hpp"

namespace freqsketch::cli {

namespace {

using nlohmann::json;

// Sub-stream of the run seed used for advice noise.
constexpr std::uint64_t kNoiseStream = 1;

struct AdviceOptions {
  std::string file;
  bool exact = false;
  std::string noise = "none";
};

void add_advice_options(CLI::App* cmd, AdviceOptions& opts) {
  cmd->add_option("--advice", opts.file, "TSV of key<TAB>predicted frequency");
  cmd->add_flag("--advice-exact", opts.exact, "use the true frequencies as advice");
  cmd->add_option("--noise", opts.noise, "none | multiplicative:C | dropout:RATE")->capture_default_str();
}

std::optional<NoiseModel> parse_noise(const std::string& text) {
  if (text == "none" || text.empty()) return std::nullopt;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  double value = 0.0;
  try {
    if (colon == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    value = std::stod(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw Error(ErrorCode::parse_error, "malformed noise spec '" + text + "'");
  }
  if (kind == "multiplicative") return MultiplicativeNoise{value};
  if (kind == "dropout") return DropoutNoise{value};
  throw Error(ErrorCode::parse_error, "unknown noise model '" + kind + "'");
}

AdviceMap resolve_advice(const AdviceOptions& opts, const FrequencyVector& w, std::uint64_t seed) {
  if (opts.exact == !opts.file.empty()) {
    throw Error(ErrorCode::invalid_argument, "advice needs exactly one of --advice FILE or --advice-exact");
  }
  AdviceMap advice = opts.exact ? AdviceMap::from_frequencies(w) : AdviceMap::load(opts.file);
  if (const auto noise = parse_noise(opts.noise)) advice = advice_noise(advice, *noise, derive_seed(seed, kNoiseStream));
  return advice;
}

FrequencyVector read_inputs(const std::vector<std::string>& paths) {
  Aggregator agg;
  for (const auto& path : paths) {
    const auto elements = path == "-" ? read_elements(std::cin, "<stdin>") : read_elements_file(path);
    for (const auto& e : elements) agg.add(e);
  }
  return agg.build();
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format_error, path + ": " + e.what());
  }
}

WeightedSample finalize_blob(const Blob& blob) {
  if (const auto* s = std::get_if<BottomKSketch>(&blob)) return s->finalize();
  if (const auto* s = std::get_if<AdviceSketch>(&blob)) return s->finalize();
  return std::get<WeightedSample>(blob);
}

// key per line, optionally key<TAB>coefficient
DomainQuery load_domain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "'");
  auto keys = std::make_shared<std::unordered_set<Key>>();
  DomainQuery q;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    const Key key = line.substr(0, tab);
    keys->insert(key);
    if (tab == std::string::npos) continue;
    try {
      std::size_t used = 0;
      const std::string text = line.substr(tab + 1);
      const double coef = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      q.coefficients[key] = coef;
    } catch (const std::exception&) {
      throw Error(ErrorCode::parse_error, path + ":" + std::to_string(line_no) + ": malformed coefficient");
    }
  }
  q.domain = [keys](const Key& k) { return keys->contains(k); };
  return q;
}

// Sampler tokens for `evaluate`: ppswor:Q, priority:Q, wr:FN, advice, advice-calibrated.
struct SamplerToken {
  std::string text;
  std::string kind;
  std::string arg;
};

SamplerToken parse_sampler_token(const std::string& text) {
  const auto colon = text.find(':');
  SamplerToken t{text, text.substr(0, colon), colon == std::string::npos ? "" : text.substr(colon + 1)};
  const bool needs_arg = t.kind == "ppswor" || t.kind == "priority" || t.kind == "wr";
  const bool is_advice = t.kind == "advice" || t.kind == "advice-calibrated";
  if ((!needs_arg && !is_advice) || (needs_arg && t.arg.empty()) || (is_advice && !t.arg.empty())) {
    throw Error(ErrorCode::parse_error, "unknown sampler '" + text + "'");
  }
  return t;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::parse_error, "malformed " + what + " '" + text + "'");
}

SamplerSpec build_spec(const SamplerToken& t, std::size_t k, const FrequencyVector& w, const FreqFn& f,
                       const std::optional<AdviceMap>& advice) {
  if (t.kind == "ppswor" || t.kind == "priority") {
    return BottomKSpec{k, parse_double(t.arg, "weight exponent"), parse_scheme(t.kind)};
  }
  if (t.kind == "wr") return WithReplacementSpec{FreqFn::parse(t.arg), k};
  if (!advice) throw Error(ErrorCode::invalid_argument, "sampler '" + t.text + "' needs --advice or --advice-exact");
  if (t.kind == "advice") return AdviceSpec{0, k - k / 2, k / 2, Scheme::ppswor, *advice};
  const auto sizing = calibrate_advice_sizes(w, *advice, f, k);
  return AdviceSpec{0, sizing.k_p, sizing.k_u, Scheme::ppswor, *advice};
}

std::string tsv_real(double x) { return format_double(x); }

std::string tsv_opt(const std::optional<double>& x) { return x ? format_double(*x) : ""; }

void emit_error(std::ostream& err, std::string_view code, const std::string& message) {
  err << json{{"error", code}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted sampling sketches and f-statistics estimation over key frequencies", "freqsketch"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_config("--config", "", "TOML or INI file with option values; flags override it");

  std::uint64_t seed = 0;
  std::string out_path;
  app.add_option("--seed", seed, "single seed for hashing, noise and trials")->capture_default_str();
  app.add_option("-o,--out", out_path, "write output here instead of stdout");

  std::ostringstream buffer;

  // generate-zipf
  ZipfModel zipf;
  auto* gen = app.add_subcommand("generate-zipf", "write Zipf or sub-Zipf frequencies as TSV");
  gen->add_option("--alpha", zipf.alpha, "Zipf exponent")->required();
  gen->add_option("--n", zipf.n, "number of keys")->required();
  gen->add_option("--c", zipf.c, "sub-Zipf slack (1 = exact Zipf)")->capture_default_str();
  gen->add_option("--w1", zipf.w1, "frequency of the top key")->capture_default_str();

  // aggregate
  std::vector<std::string> inputs{"-"};
  auto* agg = app.add_subcommand("aggregate", "sum element values per key");
  agg->add_option("inputs", inputs, "element TSV files ('-' for stdin)");

  // sketch
  std::string sampler = "bottom-k";
  std::string scheme_text = "ppswor";
  double q = 1.0;
  std::size_t k = 64;
  std::size_t k_h = 0;
  std::size_t k_p = 32;
  std::size_t k_u = 32;
  std::string fn_text = "identity";
  AdviceOptions advice_opts;
  auto* sk = app.add_subcommand("sketch", "build a sketch (or a with-replacement sample) from element TSV");
  sk->add_option("inputs", inputs, "element TSV files ('-' for stdin)");
  sk->add_option("--sampler", sampler, "bottom-k | advice | wr")
      ->check(CLI::IsMember({"bottom-k", "advice", "wr"}))
      ->capture_default_str();
  sk->add_option("--scheme", scheme_text, "ppswor | priority")->capture_default_str();
  sk->add_option("--q", q, "bottom-k weights are w^q")->capture_default_str();
  sk->add_option("--k", k, "sample size (bottom-k, wr)")->capture_default_str();
  sk->add_option("--k-h", k_h, "advice: heavy component size")->capture_default_str();
  sk->add_option("--k-p", k_p, "advice: by-advice component size")->capture_default_str();
  sk->add_option("--k-u", k_u, "advice: uniform component size")->capture_default_str();
  sk->add_option("--f", fn_text, "advice: f applied to advice; wr: sampling function")->capture_default_str();
  add_advice_options(sk, advice_opts);

  // merge
  std::vector<std::string> blobs;
  auto* mg = app.add_subcommand("merge", "merge sketches built over key-disjoint shards");
  mg->add_option("blobs", blobs, "sketch JSON files")->required();

  // estimate
  std::string blob_path;
  std::vector<std::string> fns{"identity"};
  std::string domain_path;
  auto* est = app.add_subcommand("estimate", "inverse-probability estimates of f-statistics");
  est->add_option("blob", blob_path, "sketch or sample JSON")->required();
  est->add_option("--f", fns, "function of frequency; repeatable")->capture_default_str();
  est->add_option("--domain", domain_path, "restrict to keys listed in this file (key[<TAB>coefficient])");

  // rank-dist
  auto* rd = app.add_subcommand("rank-dist", "estimated rank of every sampled key");
  rd->add_option("blob", blob_path, "sketch or sample JSON")->required();

  // evaluate
  std::vector<std::size_t> ks{16, 64, 256};
  std::vector<std::string> samplers{"ppswor:1", "ppswor:2"};
  std::size_t trials = kDefaultTrials;
  std::string format = "tsv";
  auto* ev = app.add_subcommand("evaluate", "NRMSE of samplers against exact data");
  ev->add_option("inputs", inputs, "element or frequency TSV files ('-' for stdin)");
  ev->add_option("--f", fn_text, "statistic to estimate")->capture_default_str();
  ev->add_option("--k", ks, "sample sizes")->delimiter(',')->capture_default_str();
  ev->add_option("--samplers", samplers, "ppswor:Q, priority:Q, wr:FN, advice, advice-calibrated")
      ->delimiter(',')
      ->capture_default_str();
  ev->add_option("--trials", trials, "runs per (sampler, k)")->capture_default_str();
  ev->add_option("--format", format, "tsv | json")->check(CLI::IsMember({"tsv", "json"}))->capture_default_str();
  add_advice_options(ev, advice_opts);

  // overhead
  std::vector<double> targets{3, 10};
  std::vector<std::string> scheme_names{"l1", "l2", "concave"};
  std::string overhead_format = "json";
  auto* oh = app.add_subcommand("overhead", "emulation overheads of base sampling schemes");
  oh->add_option("inputs", inputs, "element or frequency TSV files ('-' for stdin)");
  oh->add_option("--targets", targets, "target moments p")->delimiter(',')->capture_default_str();
  oh->add_option("--schemes", scheme_names, "l1, l2, concave")
      ->delimiter(',')
      ->check(CLI::IsMember({"l1", "l2", "concave"}))
      ->capture_default_str();
  oh->add_option("--format", overhead_format, "json | tsv")->check(CLI::IsMember({"tsv", "json"}))->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    emit_error(err, "usage", e.what());
    return 2;
  }

  try {
    if (gen->parsed()) {
      write_frequencies(buffer, gen_zipf(zipf, seed));
    } else if (agg->parsed()) {
      write_frequencies(buffer, read_inputs(inputs));
    } else if (sk->parsed()) {
      const auto w = read_inputs(inputs);
      const FreqFn f = FreqFn::parse(fn_text);
      if (sampler == "bottom-k") {
        BottomKSketch sketch({k, q, parse_scheme(scheme_text), seed});
        sketch.process(w);
        buffer << dump(to_json(sketch));
      } else if (sampler == "advice") {
        const auto advice = resolve_advice(advice_opts, w, seed);
        AdviceSketch sketch({k_h, k_p, k_u, f, parse_scheme(scheme_text), seed});
        for (const auto& kf : w) sketch.process(kf.key, kf.frequency, advice(kf.key));
        buffer << dump(to_json(sketch));
      } else {
        buffer << dump(to_json(sample_with_replacement(w, f, k, seed)));
      }
    } else if (mg->parsed()) {
      std::optional<Blob> merged;
      for (const auto& path : blobs) {
        Blob next = blob_from_json(read_json_file(path));
        if (std::holds_alternative<WeightedSample>(next)) {
          throw Error(ErrorCode::invalid_argument, path + ": finalized samples cannot be merged");
        }
        if (!merged) {
          merged = std::move(next);
        } else if (merged->index() != next.index()) {
          throw Error(ErrorCode::config_mismatch, path + ": cannot merge different sketch types");
        } else if (auto* a = std::get_if<BottomKSketch>(&*merged)) {
          a->merge(std::get<BottomKSketch>(next));
        } else {
          std::get<AdviceSketch>(*merged).merge(std::get<AdviceSketch>(next));
        }
      }
      buffer << dump(blob_to_json(*merged));
    } else if (est->parsed()) {
      const auto sample = finalize_blob(blob_from_json(read_json_file(blob_path)));
      DomainQuery query = domain_path.empty() ? DomainQuery{} : load_domain(domain_path);
      json rows = json::array();
      for (const auto& text : fns) {
        query.f = FreqFn::parse(text);
        rows.push_back({{"f", query.f.to_string()}, {"estimate", estimate_query(sample, query)}});
      }
      buffer << dump({{"scheme", sample.scheme}, {"sample_size", sample.records.size()}, {"estimates", rows}});
    } else if (rd->parsed()) {
      const auto sample = finalize_blob(blob_from_json(read_json_file(blob_path)));
      buffer << "key\tfrequency\trank\n";
      for (const auto& point : estimate_rank_distribution(sample)) {
        buffer << point.key << '\t' << tsv_real(point.frequency) << '\t' << tsv_real(point.rank) << '\n';
      }
    } else if (ev->parsed()) {
      const auto w = read_inputs(inputs);
      const FreqFn f = FreqFn::parse(fn_text);
      std::optional<AdviceMap> advice;
      if (advice_opts.exact || !advice_opts.file.empty()) advice = resolve_advice(advice_opts, w, seed);
      std::vector<SamplerToken> tokens;
      for (const auto& s : samplers) tokens.push_back(parse_sampler_token(s));
      json rows = json::array();
      if (format == "tsv") buffer << "sampler\tk\tnrmse\tbenchmark\n";
      for (const auto& token : tokens) {
        for (const std::size_t kk : ks) {
          if (kk < 1) throw Error(ErrorCode::invalid_argument, "sample sizes must be at least 1");
          const auto report = evaluate_nrmse(w, f, build_spec(token, kk, w, f, advice), trials, seed);
          const double benchmark = 1.0 / std::sqrt(static_cast<double>(kk));
          if (format == "tsv") {
            buffer << token.text << '\t' << kk << '\t' << tsv_real(report.nrmse) << '\t' << tsv_real(benchmark) << '\n';
          } else {
            json row = to_json(report);
            row["sampler"] = token.text;
            row["k"] = kk;
            row["benchmark"] = benchmark;
            rows.push_back(std::move(row));
          }
        }
      }
      if (format == "json") buffer << dump(rows);
    } else if (oh->parsed()) {
      const auto w = read_inputs(inputs);
      if (w.empty()) throw Error(ErrorCode::invalid_argument, "overhead report needs at least one key");
      std::vector<BaseScheme> schemes;
      for (const auto& name : scheme_names) {
        schemes.push_back(name == "l1" ? BaseScheme::l1 : name == "l2" ? BaseScheme::l2 : BaseScheme::concave_sublinear);
      }
      const auto report = overhead_report(w, targets, schemes);
      if (overhead_format == "json") {
        buffer << dump(to_json(report));
      } else {
        buffer << "scheme\tp\tmax_overhead\texpected_overhead\tuniversal_emulation\tuniversal_estimation"
                  "\theavy_hitter_bound\tsubzipf_bound\tworst_case_bound\tnear_uniform_bound\n";
        for (const auto& row : report.schemes) {
          for (const auto& t : row.targets) {
            buffer << base_scheme_name(row.scheme) << '\t' << tsv_real(t.p) << '\t' << tsv_real(t.max_overhead) << '\t'
                   << tsv_real(t.expected_overhead) << '\t' << tsv_real(row.universal_emulation) << '\t'
                   << tsv_real(row.universal_estimation) << '\t' << tsv_opt(t.heavy_hitter_bound) << '\t'
                   << tsv_opt(t.subzipf_bound) << '\t' << tsv_opt(t.worst_case_bound) << '\t'
                   << tsv_opt(t.near_uniform_bound) << '\n';
          }
        }
      }
    }

    if (out_path.empty()) {
      out << buffer.str();
    } else {
      std::ofstream file(out_path, std::ios::binary);
      if (!file) throw Error(ErrorCode::io_error, "cannot write '" + out_path + "'");
      file << buffer.str();
      if (!file) throw Error(ErrorCode::io_error, "failed writing '" + out_path + "'");
    }
  } catch (const Error& e) {
    emit_error(err, error_code_name(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    emit_error(err, "internal", e.what());
    return 1;
  }
  return 0;
}

}  // namespace freqsketch::cli
