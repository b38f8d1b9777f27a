#include "alignforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "alignforge/error.hpp"
#include "alignforge/rng.hpp"
#include "alignforge/text.hpp"

namespace alignforge::metrics {

namespace {

using NgramCounts = std::map<std::vector<std::string_view>, double>;

NgramCounts count_ngrams(const std::vector<std::string>& units, int n) {
  NgramCounts counts;
  if (static_cast<int>(units.size()) < n) return counts;
  std::vector<std::string_view> key(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= units.size(); ++i) {
    for (int k = 0; k < n; ++k) key[static_cast<std::size_t>(k)] = units[i + static_cast<std::size_t>(k)];
    counts[key] += 1.0;
  }
  return counts;
}

struct OrderStats {
  double matches = 0.0;
  double hyp_total = 0.0;
  double ref_total = 0.0;
};

OrderStats compare_order(const std::vector<std::string>& hyp, const std::vector<std::string>& ref, int n) {
  const auto h = count_ngrams(hyp, n);
  const auto r = count_ngrams(ref, n);
  OrderStats s;
  for (const auto& [gram, c] : h) {
    s.hyp_total += c;
    if (auto it = r.find(gram); it != r.end()) s.matches += std::min(c, it->second);
  }
  for (const auto& [gram, c] : r) s.ref_total += c;
  return s;
}

void check_sizes(std::size_t hyps, std::size_t refs) {
  if (hyps != refs) {
    throw DataError("hypothesis/reference count mismatch: " + std::to_string(hyps) + " vs " + std::to_string(refs));
  }
  if (hyps == 0) throw DataError("empty corpus");
}

std::vector<std::string> chars_without_whitespace(std::string_view s) {
  std::vector<std::string> out;
  for (const auto& w : text::split_whitespace(s)) {
    auto cps = text::code_points(w);
    out.insert(out.end(), std::make_move_iterator(cps.begin()), std::make_move_iterator(cps.end()));
  }
  return out;
}

}  // namespace

BleuStats& BleuStats::operator+=(const BleuStats& o) {
  if (matches.size() < o.matches.size()) {
    matches.resize(o.matches.size(), 0.0);
    totals.resize(o.totals.size(), 0.0);
  }
  for (std::size_t n = 0; n < o.matches.size(); ++n) {
    matches[n] += o.matches[n];
    totals[n] += o.totals[n];
  }
  hyp_len += o.hyp_len;
  ref_len += o.ref_len;
  return *this;
}

BleuStats bleu_stats(const TokenSeq& hyp, const TokenSeq& ref, int max_n) {
  BleuStats s;
  s.matches.assign(static_cast<std::size_t>(max_n), 0.0);
  s.totals.assign(static_cast<std::size_t>(max_n), 0.0);
  for (int n = 1; n <= max_n; ++n) {
    const auto o = compare_order(hyp, ref, n);
    s.matches[static_cast<std::size_t>(n - 1)] = o.matches;
    s.totals[static_cast<std::size_t>(n - 1)] = o.hyp_total;
  }
  s.hyp_len = static_cast<double>(hyp.size());
  s.ref_len = static_cast<double>(ref.size());
  return s;
}

double bleu_from_stats(const BleuStats& s, const BleuConfig& config) {
  if (s.hyp_len <= 0.0) return 0.0;
  double log_sum = 0.0;
  for (int n = 1; n <= config.max_n; ++n) {
    double m = s.matches[static_cast<std::size_t>(n - 1)];
    double t = s.totals[static_cast<std::size_t>(n - 1)];
    if (config.smoothing == Smoothing::kAddK && n > 1) {
      m += config.k;
      t += config.k;
    }
    if (m <= 0.0 || t <= 0.0) return 0.0;
    log_sum += std::log(m / t);
  }
  const double bp = s.hyp_len < s.ref_len ? std::exp(1.0 - s.ref_len / s.hyp_len) : 1.0;
  return 100.0 * bp * std::exp(log_sum / config.max_n);
}

MetricReport bleu(const std::vector<TokenSeq>& hyps, const std::vector<TokenSeq>& refs, const BleuConfig& config) {
  check_sizes(hyps.size(), refs.size());
  if (config.max_n < 1) throw UsageError("BLEU max order must be >= 1");
  MetricReport report;
  report.metric = "bleu";
  BleuStats total;
  total.matches.assign(static_cast<std::size_t>(config.max_n), 0.0);
  total.totals.assign(static_cast<std::size_t>(config.max_n), 0.0);
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const auto s = bleu_stats(hyps[i], refs[i], config.max_n);
    report.segments.push_back(bleu_from_stats(s, config));
    total += s;
  }
  report.score = bleu_from_stats(total, config);
  report.config = {{"max_n", config.max_n},
                   {"smoothing", config.smoothing == Smoothing::kNone ? "none" : "add-k"},
                   {"k", config.k}};
  return report;
}

double chrfpp_segment(std::string_view hyp, std::string_view ref, const ChrfConfig& config) {
  const auto hyp_chars = chars_without_whitespace(hyp);
  const auto ref_chars = chars_without_whitespace(ref);
  const auto hyp_words = text::split_whitespace(hyp);
  const auto ref_words = text::split_whitespace(ref);

  double p_sum = 0.0, r_sum = 0.0, hyp_grams = 0.0;
  int orders = 0;
  auto add = [&](const OrderStats& o) {
    hyp_grams += o.hyp_total;
    if (o.ref_total <= 0.0) return;
    p_sum += o.hyp_total > 0.0 ? o.matches / o.hyp_total : 0.0;
    r_sum += o.matches / o.ref_total;
    ++orders;
  };
  for (int n = 1; n <= config.char_n; ++n) add(compare_order(hyp_chars, ref_chars, n));
  for (int n = 1; n <= config.word_n; ++n) add(compare_order(hyp_words, ref_words, n));

  if (orders == 0) return hyp_grams > 0.0 ? 0.0 : 100.0;
  const double p = p_sum / orders, r = r_sum / orders;
  const double b2 = config.beta * config.beta;
  const double denom = b2 * p + r;
  if (denom <= 0.0) return 0.0;
  return 100.0 * (1.0 + b2) * p * r / denom;
}

MetricReport chrfpp(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                    const ChrfConfig& config) {
  check_sizes(hyps.size(), refs.size());
  MetricReport report;
  report.metric = "chrfpp";
  double sum = 0.0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    report.segments.push_back(chrfpp_segment(hyps[i], refs[i], config));
    sum += report.segments.back();
  }
  report.score = sum / static_cast<double>(hyps.size());
  report.config = {{"char_n", config.char_n}, {"word_n", config.word_n}, {"beta", config.beta}};
  return report;
}

Metric parse_metric(std::string_view name) {
  if (name == "bleu") return Metric::kBleu;
  if (name == "chrfpp" || name == "chrf++") return Metric::kChrfpp;
  throw UsageError("unknown metric '" + std::string(name) + "' (bleu, chrfpp)");
}

std::string_view metric_name(Metric m) { return m == Metric::kBleu ? "bleu" : "chrfpp"; }

BootstrapResult paired_bootstrap(const std::vector<std::string>& hyps_a, const std::vector<std::string>& hyps_b,
                                 const std::vector<std::string>& refs, Metric metric, std::size_t n_resamples,
                                 std::uint64_t seed, const BleuConfig& bleu_config, const ChrfConfig& chrf_config) {
  if (hyps_a.size() != refs.size() || hyps_b.size() != refs.size()) {
    throw DataError("system outputs and references differ in length");
  }
  if (refs.size() < 2) throw DataError("paired bootstrap needs at least 2 segments");
  if (n_resamples < kMinResamples) {
    throw UsageError("n_resamples must be >= " + std::to_string(kMinResamples));
  }
  const std::size_t n = refs.size();

  // Per-segment sufficient statistics; a corpus score is a function of their sum.
  std::vector<BleuStats> bleu_a, bleu_b;
  std::vector<double> seg_a, seg_b;
  if (metric == Metric::kBleu) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto ref = text::split_whitespace(refs[i]);
      bleu_a.push_back(bleu_stats(text::split_whitespace(hyps_a[i]), ref, bleu_config.max_n));
      bleu_b.push_back(bleu_stats(text::split_whitespace(hyps_b[i]), ref, bleu_config.max_n));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      seg_a.push_back(chrfpp_segment(hyps_a[i], refs[i], chrf_config));
      seg_b.push_back(chrfpp_segment(hyps_b[i], refs[i], chrf_config));
    }
  }

  auto score = [&](const std::vector<std::size_t>& idx, bool system_a) {
    if (metric == Metric::kBleu) {
      BleuStats total;
      const auto& stats = system_a ? bleu_a : bleu_b;
      for (auto i : idx) total += stats[i];
      return bleu_from_stats(total, bleu_config);
    }
    const auto& segs = system_a ? seg_a : seg_b;
    double sum = 0.0;
    for (auto i : idx) sum += segs[i];
    return sum / static_cast<double>(idx.size());
  };

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;

  BootstrapResult result;
  result.metric = metric;
  result.n_resamples = n_resamples;
  result.seed = seed;
  result.score_a = score(all, true);
  result.score_b = score(all, false);
  result.delta = result.score_a - result.score_b;
  if (result.score_a == result.score_b) {
    result.winner = "none";
    result.delta = 0.0;
    result.p_value = 1.0;
    return result;
  }
  const bool a_wins = result.score_a > result.score_b;
  result.winner = a_wins ? "a" : "b";

  std::size_t loser_at_least = 0;
  std::vector<std::size_t> idx(n);
  for (std::size_t r = 0; r < n_resamples; ++r) {
    Rng rng(derive_seed(seed, r));
    for (auto& i : idx) i = static_cast<std::size_t>(rng.uniform(n));
    const double a = score(idx, true), b = score(idx, false);
    if (a_wins ? b >= a : a >= b) ++loser_at_least;
  }
  result.p_value = static_cast<double>(loser_at_least) / static_cast<double>(n_resamples);
  return result;
}

nlohmann::ordered_json to_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  j["metric"] = report.metric;
  j["score"] = report.score;
  j["config"] = report.config;
  j["segments"] = report.segments;
  // Filled in externally; no neural scorer ships with the library.
  j["comet"] = nullptr;
  return j;
}

nlohmann::ordered_json to_json(const BootstrapResult& r) {
  nlohmann::ordered_json j;
  j["metric"] = metric_name(r.metric);
  j["score_a"] = r.score_a;
  j["score_b"] = r.score_b;
  j["delta"] = r.delta;
  j["p"] = r.p_value;
  j["winner"] = r.winner;
  j["n_resamples"] = r.n_resamples;
  j["seed"] = r.seed;
  return j;
}

}  // namespace alignforge::metrics
