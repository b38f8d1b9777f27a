#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "alignforge/text.hpp"

namespace alignforge::corpus {

using Tokens = std::vector<std::string>;

struct SentencePair {
  std::string src_lang;
  std::string tgt_lang;
  Tokens src_tokens;
  Tokens tgt_tokens;
  std::uint32_t pair_id = 0;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

/// Immutable after loading. pair_ids are dense from 0 for loaded corpora;
/// splits keep the ids of the corpus they were cut from.
struct Corpus {
  std::string src_lang;
  std::string tgt_lang;
  std::vector<SentencePair> pairs;
  /// Line pairs dropped because one side tokenized to nothing.
  std::size_t dropped = 0;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

/// Token <-> id table for one side of a corpus. When built with a NULL
/// entry, id 0 is the NULL alignment word and real tokens start at 1.
class Vocab {
 public:
  static constexpr std::uint32_t kNull = 0;
  static constexpr std::uint32_t kUnknown = UINT32_MAX;
  static constexpr std::string_view kNullToken = "<NULL>";

  explicit Vocab(bool with_null = false);

  /// Adds one occurrence of `token` and returns its id.
  std::uint32_t add(const std::string& token);
  /// kUnknown if absent.
  std::uint32_t find(const std::string& token) const;

  const std::string& token(std::uint32_t id) const { return tokens_[id]; }
  std::uint64_t count(std::uint32_t id) const { return counts_[id]; }
  std::size_t size() const { return tokens_.size(); }
  bool has_null() const { return with_null_; }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  bool with_null_;
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

using text::tokenize;

/// Two line-aligned UTF-8 files (Moses convention).
Corpus load_parallel(const std::filesystem::path& src_path, const std::filesystem::path& tgt_path,
                     const std::string& src_lang, const std::string& tgt_lang);

/// One UTF-8 file with "source<TAB>target" per line.
Corpus load_tsv(const std::filesystem::path& path, const std::string& src_lang, const std::string& tgt_lang);

/// Builds a corpus from raw line pairs with the same dropping rules as the
/// file loaders. Lines must already be valid UTF-8.
Corpus from_lines(const std::vector<std::string>& src_lines, const std::vector<std::string>& tgt_lines,
                  const std::string& src_lang, const std::string& tgt_lang);

struct StatsReport {
  std::string src_lang;
  std::string tgt_lang;
  std::size_t pairs = 0;
  std::size_t src_tokens = 0;
  std::size_t tgt_tokens = 0;
  std::size_t dropped = 0;
  double mean_src_length = 0.0;
  double mean_tgt_length = 0.0;

  /// "xx-yy"
  std::string lang() const { return src_lang + "-" + tgt_lang; }
};

StatsReport corpus_stats(const Corpus& corpus);

struct SplitFractions {
  double train = 1.0;
  double valid = 0.0;
  double test = 0.0;
};

struct Splits {
  Corpus train;
  Corpus valid;
  Corpus test;
};

/// Seeded random partition. Each split keeps pair_id order. If the
/// fractions sum to 1, rounding leftovers go to train.
Splits split_corpus(const Corpus& corpus, const SplitFractions& fractions, std::uint64_t seed);

}  // namespace alignforge::corpus
