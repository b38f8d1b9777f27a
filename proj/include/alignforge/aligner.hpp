#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alignforge/corpus.hpp"
#include "alignforge/links.hpp"

// FastAlign-style reparameterized IBM Model 2.
//
// A target token at position i (of m) aligns to the NULL word with
// probability p0, or to source position j (of n) with probability
//
//   (1 - p0) * exp(lambda * h(i, j, m, n)) / Z,   h = -| i/m - j/n |,
//
// positions counted from 1 as in fast_align, Z summing over real source
// positions. Lexical probabilities t(target | source) are estimated by EM
// with lambda and p0 held fixed.

namespace alignforge::aligner {

/// kForward models t(corpus target | corpus source); kReverse swaps the sides.
enum class Direction { kForward, kReverse };

std::string_view direction_name(Direction d);

inline constexpr double kProbabilityFloor = 1e-12;

struct AlignParams {
  unsigned iterations = 5;
  double lambda = 4.0;
  double p0 = 0.08;
  /// Recorded in the model. Training is deterministic and does not draw
  /// random numbers.
  std::uint64_t seed = 0;
  /// E-step workers; 0 resolves via ALIGNFORGE_THREADS / hardware.
  unsigned threads = 0;

  /// Throws UsageError on out-of-range values.
  void validate() const;
};

/// Resolves a requested worker count: explicit value, else hardware
/// concurrency capped by ALIGNFORGE_THREADS.
unsigned resolve_threads(unsigned requested);

/// Writes p(a = NULL) into prior[0] and p(a = j) into prior[j + 1] for the
/// 0-based target position `tgt_pos` of `tgt_len`. prior.size() == src_len + 1.
void position_prior(std::size_t tgt_pos, std::size_t tgt_len, std::size_t src_len, double lambda, double p0,
                    std::span<double> prior);

/// Trained lexical table plus the fixed distortion parameters. "Source" and
/// "target" below are in model orientation: for a reverse model the source
/// vocabulary is the corpus target side.
class AlignModel {
 public:
  struct Entry {
    std::uint32_t target;
    double prob;
  };

  AlignModel(corpus::Vocab source, corpus::Vocab target, Direction direction, double lambda, double p0);

  Direction direction() const { return direction_; }
  double lambda() const { return lambda_; }
  double p0() const { return p0_; }
  const corpus::Vocab& source_vocab() const { return source_; }
  const corpus::Vocab& target_vocab() const { return target_; }

  /// t(target | source); kProbabilityFloor for unseen events or unknown ids.
  double prob(std::uint32_t source_id, std::uint32_t target_id) const;
  double prob(const std::string& source, const std::string& target) const;

  /// Row of a source id, sorted by target id. Empty for unknown ids.
  std::span<const Entry> row(std::uint32_t source_id) const;

  /// Replaces the whole table. rows[s] must be sorted by target id with
  /// strictly positive probabilities.
  void set_table(std::vector<std::vector<Entry>> rows);

  /// Log-likelihood after initialization and after each EM iteration.
  const std::vector<double>& log_likelihood_history() const { return history_; }
  void set_log_likelihood_history(std::vector<double> h) { history_ = std::move(h); }

  std::uint64_t seed = 0;
  unsigned iterations = 0;

 private:
  corpus::Vocab source_;
  corpus::Vocab target_;
  Direction direction_;
  double lambda_;
  double p0_;
  std::vector<std::size_t> row_begin_;
  std::vector<Entry> entries_;
  std::vector<double> history_;
};

/// Runs EM. Throws DataError on an empty corpus, UsageError on bad params.
AlignModel train_model(const corpus::Corpus& corpus, Direction direction, const AlignParams& params);

/// Sum over pairs and target tokens of log sum_j prior(j) t(tgt | src_j).
double log_likelihood(const AlignModel& model, const corpus::Corpus& corpus);

/// Per target token argmax over NULL and source positions; NULL wins ties and
/// otherwise the smaller source index wins. Links are in corpus coordinates.
links::AlignmentLinks viterbi_align(const AlignModel& model, const corpus::SentencePair& pair);

struct BidirectionalModel {
  AlignModel forward;
  AlignModel reverse;
};

BidirectionalModel train_bidirectional(const corpus::Corpus& corpus, const AlignParams& params);

/// Viterbi in both directions, then symmetrization, for every pair.
std::vector<links::AlignmentLinks> align_corpus(const BidirectionalModel& models, const corpus::Corpus& corpus,
                                                links::Heuristic heuristic);

/// Versioned JSON: {"format","version","direction","lambda","p0",...,"ttable"}.
void save_model(const AlignModel& model, const std::filesystem::path& path);
AlignModel load_model(const std::filesystem::path& path);

}  // namespace alignforge::aligner
