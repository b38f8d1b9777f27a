#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "alignforge/corpus.hpp"
#include "alignforge/error.hpp"
#include "alignforge/rng.hpp"
#include "alignforge/span_pairs.hpp"

namespace alignforge::instructions {

enum class Task { kMt, kAlign, kHint, kRevise, kMonoFull, kMonoHalf };

std::string_view task_name(Task t);
/// Accepts "mt", "align", "hint", "revise", "mono_full", "mono_half".
Task parse_task(std::string_view name);

/// A side of the underlying corpus pair.
enum class Side { kSource, kTarget };

inline Side other(Side s) { return s == Side::kSource ? Side::kTarget : Side::kSource; }
std::string_view side_name(Side s);

const corpus::Tokens& tokens_of(const corpus::SentencePair& pair, Side s);
const std::string& lang_of(const corpus::SentencePair& pair, Side s);
spans::Span span_of(const spans::SpanPair& sp, Side s);

/// Side rendered as the supported language Y in the AlignInstruct,
/// HintInstruct and ReviseInstruct templates: the English side when there
/// is one, otherwise the corpus source side.
Side pivot_side(const corpus::SentencePair& pair);

/// Translation direction by language code.
struct Direction {
  std::string from;
  std::string to;
};

/// Maps a direction onto the pair; throws UsageError if the codes do not
/// match the pair's languages.
Side from_side(const corpus::SentencePair& pair, const Direction& d);

/// Tokens joined by single spaces.
std::string sentence(const corpus::Tokens& tokens);
/// Appends "." unless the text already ends in sentence-final punctuation.
std::string terminated(std::string s);

struct CorruptionResult {
  spans::SpanPair original;
  Side corrupted_side = Side::kTarget;
  corpus::Tokens replacement_text;
  /// Where the replacement was taken from, on the corrupted side.
  spans::Span replacement_span;
};

/// Raised when no distractor can produce a false assertion.
class Uncorruptible : public DataError {
 public:
  Uncorruptible() : DataError("uncorruptible pair") {}
};

struct RecordMeta {
  std::uint32_t pair_id = 0;
  std::uint64_t seed = 0;
  std::optional<spans::SpanPair> gold;
  std::optional<CorruptionResult> corruption;
  /// Hint span pairs, in rendered order.
  std::vector<spans::SpanPair> hints;
  /// Free-form additions (e.g. run provenance) appended after the fixed keys.
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

struct InstructionRecord {
  std::string id;
  Task task = Task::kMt;
  std::string from;
  /// Empty for monolingual records.
  std::optional<std::string> to;
  std::string input;
  std::string output;
  std::optional<bool> label;
  RecordMeta meta;
};

/// MTInstruct / PROMPT-default.
InstructionRecord render_mt(const corpus::SentencePair& pair, const Direction& direction);

/// Replaces one side of `gold` with the matching side of a distractor drawn
/// from `candidates` (the consistent span pairs of the same sentence). The
/// side is chosen uniformly unless `forced_side` is given; when the chosen
/// side has no distractor the other side is tried. A distractor must change
/// the text and must not form a consistent pair with the untouched side.
CorruptionResult corrupt_span_pair(const corpus::SentencePair& pair, const spans::SpanPair& gold,
                                   const std::vector<spans::SpanPair>& candidates, Rng& rng,
                                   std::optional<Side> forced_side = std::nullopt);

/// AlignInstruct. Output "True" without a corruption, "False" with one.
InstructionRecord render_align(const corpus::SentencePair& pair, const spans::SpanPair& gold,
                               const std::optional<CorruptionResult>& corruption);

inline constexpr std::uint32_t kDefaultMaxHints = 5;

/// HintInstruct with the first min(|span_pairs|, max_hints) pairs.
InstructionRecord render_hint(const corpus::SentencePair& pair, const Direction& direction,
                              const std::vector<spans::SpanPair>& span_pairs,
                              std::uint32_t max_hints = kDefaultMaxHints);

/// ReviseInstruct. The corruption must be on the translated (non-pivot) side.
InstructionRecord render_revise(const corpus::SentencePair& pair, const spans::SpanPair& gold,
                                const CorruptionResult& corruption);

enum class MonoVariant { kFull, kHalf };

/// MonoInstruct-full / MonoInstruct-half over one side's sentence.
InstructionRecord render_mono(const corpus::Tokens& sentence_tokens, const std::string& lang, MonoVariant variant);

inline constexpr std::string_view kMonoPrompt = "Given the context, complete the following sentence: ";

enum class PromptVariant { kDefault, k1, k2, k3, k4, k5 };

PromptVariant parse_prompt_variant(std::string_view name);
std::string_view prompt_variant_name(PromptVariant v);

/// Inference prompt; every variant ends with "{X}: ".
std::string render_inference_prompt(const corpus::SentencePair& pair, const Direction& direction, PromptVariant variant);

/// Fixed key order: id, task, from, to, input, output, label, meta.
nlohmann::ordered_json to_json(const InstructionRecord& record);
InstructionRecord from_json(const nlohmann::json& j);
std::string to_jsonl_line(const InstructionRecord& record);

}  // namespace alignforge::instructions
