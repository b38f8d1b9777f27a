#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alignforge/corpus.hpp"
#include "alignforge/links.hpp"
#include "alignforge/rng.hpp"

namespace alignforge::spans {

/// Half-open token range [start, start + length).
struct Span {
  std::uint32_t start = 0;
  std::uint32_t length = 0;

  std::uint32_t end() const { return start + length; }
  bool contains(std::uint32_t i) const { return i >= start && i < end(); }
  friend auto operator<=>(const Span&, const Span&) = default;
};

/// A "gold" word pair: contiguous source span aligned to a contiguous
/// target span with no link crossing either boundary.
struct SpanPair {
  Span src;
  Span tgt;
  std::uint32_t link_count = 0;

  friend auto operator<=>(const SpanPair&, const SpanPair&) = default;
};

struct SpanLimits {
  std::uint32_t max_src_len = 3;
  std::uint32_t max_tgt_len = 3;
};

/// True iff the spans hold at least one link and no link joins an inside
/// position to an outside one on either side.
bool is_consistent(const links::AlignmentLinks& links, Span src, Span tgt);

/// Every consistent span pair within the length limits (unaligned boundary
/// words may be absorbed), ordered by (src start, src length, tgt start,
/// tgt length).
std::vector<SpanPair> extract_span_pairs(std::size_t src_len, std::size_t tgt_len, const links::AlignmentLinks& links,
                                         SpanLimits limits = {});

std::vector<SpanPair> extract_span_pairs(const corpus::SentencePair& pair, const links::AlignmentLinks& links,
                                         SpanLimits limits = {});

/// Length cap for the word-level preference of sample_gold_pair.
inline constexpr std::uint32_t kWordLevelMax = 3;

/// Uniform pick among pairs with both sides <= kWordLevelMax tokens, or among
/// all pairs if none qualify. Throws DataError("no alignable span") if empty.
const SpanPair& sample_gold_pair(const std::vector<SpanPair>& span_pairs, Rng& rng);

/// True if the pair's boundary tokens on both sides are aligned, i.e. it did
/// not absorb unaligned neighbours.
bool is_tight(const links::AlignmentLinks& links, const SpanPair& sp);

std::string span_text(const corpus::Tokens& tokens, Span span);

}  // namespace alignforge::spans
