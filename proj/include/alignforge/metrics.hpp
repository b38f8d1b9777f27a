#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace alignforge::metrics {

using TokenSeq = std::vector<std::string>;

enum class Smoothing { kNone, kAddK };

struct BleuConfig {
  int max_n = 4;
  Smoothing smoothing = Smoothing::kNone;
  /// Added to numerator and denominator of orders n > 1 under kAddK.
  double k = 1.0;
};

struct ChrfConfig {
  int char_n = 6;
  int word_n = 2;
  double beta = 2.0;
};

struct MetricReport {
  std::string metric;
  double score = 0.0;
  std::vector<double> segments;
  nlohmann::ordered_json config;
};

/// Clipped n-gram counts and lengths of one segment. Corpus statistics are
/// sums of these.
struct BleuStats {
  std::vector<double> matches;  // per order, index 0 = unigrams
  std::vector<double> totals;
  double hyp_len = 0.0;
  double ref_len = 0.0;

  BleuStats& operator+=(const BleuStats& o);
};

BleuStats bleu_stats(const TokenSeq& hyp, const TokenSeq& ref, int max_n);

/// 100 * BP * exp(mean log p_n) with BP = min(1, exp(1 - r/c)).
double bleu_from_stats(const BleuStats& stats, const BleuConfig& config);

/// Corpus BLEU over pre-tokenized segments; per-segment scores use the
/// same formula on each segment alone.
MetricReport bleu(const std::vector<TokenSeq>& hyps, const std::vector<TokenSeq>& refs, const BleuConfig& config = {});

/// Segment chrF++ in [0, 100].
double chrfpp_segment(std::string_view hyp, std::string_view ref, const ChrfConfig& config = {});

/// Mean of segment chrF++ scores.
MetricReport chrfpp(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                    const ChrfConfig& config = {});

enum class Metric { kBleu, kChrfpp };

Metric parse_metric(std::string_view name);
std::string_view metric_name(Metric m);

struct BootstrapResult {
  Metric metric = Metric::kBleu;
  double score_a = 0.0;
  double score_b = 0.0;
  /// score_a - score_b
  double delta = 0.0;
  /// "a", "b" or "none" when the scores tie.
  std::string winner;
  double p_value = 1.0;
  std::size_t n_resamples = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kMinResamples = 100;

/// Paired bootstrap resampling. p is the fraction of resamples in which the
/// nominal loser scores at least as well as the nominal winner; tied
/// systems get p = 1. Segments are whitespace-tokenized for BLEU.
BootstrapResult paired_bootstrap(const std::vector<std::string>& hyps_a, const std::vector<std::string>& hyps_b,
                                 const std::vector<std::string>& refs, Metric metric, std::size_t n_resamples,
                                 std::uint64_t seed, const BleuConfig& bleu_config = {},
                                 const ChrfConfig& chrf_config = {});

nlohmann::ordered_json to_json(const MetricReport& report);
nlohmann::ordered_json to_json(const BootstrapResult& result);

}  // namespace alignforge::metrics
