#include "alignforge/span_pairs.hpp"

#include <algorithm>

#include "alignforge/error.hpp"

namespace alignforge::spans {

bool is_consistent(const links::AlignmentLinks& links, Span src, Span tgt) {
  std::uint32_t inside = 0;
  for (const auto& l : links) {
    const bool s_in = src.contains(l.src), t_in = tgt.contains(l.tgt);
    if (s_in != t_in) return false;
    if (s_in) ++inside;
  }
  return inside > 0;
}

std::vector<SpanPair> extract_span_pairs(std::size_t src_len, std::size_t tgt_len, const links::AlignmentLinks& links,
                                         SpanLimits limits) {
  std::vector<SpanPair> out;
  if (links.empty() || src_len == 0 || tgt_len == 0) return out;
  links.check_bounds(src_len, tgt_len);

  std::vector<std::uint32_t> tgt_degree(tgt_len, 0);
  for (const auto& l : links) ++tgt_degree[l.tgt];

  for (std::uint32_t s = 0; s < src_len; ++s) {
    for (std::uint32_t len = 1; len <= limits.max_src_len && s + len <= src_len; ++len) {
      const Span src{s, len};
      // Target hull of the links leaving the source span.
      std::uint32_t lo = UINT32_MAX, hi = 0, count = 0;
      for (const auto& l : links) {
        if (src.contains(l.src)) {
          lo = std::min(lo, l.tgt);
          hi = std::max(hi, l.tgt);
          ++count;
        }
      }
      if (count == 0) continue;
      // No link may enter the hull from outside the source span.
      bool ok = true;
      for (const auto& l : links) {
        if (l.tgt >= lo && l.tgt <= hi && !src.contains(l.src)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      // Grow over unaligned target words on both sides.
      for (std::uint32_t ts = lo + 1; ts-- > 0;) {
        if (ts < lo && tgt_degree[ts] != 0) break;
        if (hi - ts + 1 > limits.max_tgt_len) break;
        for (std::uint32_t te = hi; te < tgt_len; ++te) {
          if (te > hi && tgt_degree[te] != 0) break;
          if (te - ts + 1 > limits.max_tgt_len) break;
          out.push_back({src, {ts, te - ts + 1}, count});
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SpanPair> extract_span_pairs(const corpus::SentencePair& pair, const links::AlignmentLinks& links,
                                         SpanLimits limits) {
  return extract_span_pairs(pair.src_tokens.size(), pair.tgt_tokens.size(), links, limits);
}

const SpanPair& sample_gold_pair(const std::vector<SpanPair>& span_pairs, Rng& rng) {
  if (span_pairs.empty()) throw DataError("no alignable span");
  std::vector<std::size_t> eligible;
  for (std::size_t k = 0; k < span_pairs.size(); ++k) {
    if (span_pairs[k].src.length <= kWordLevelMax && span_pairs[k].tgt.length <= kWordLevelMax) eligible.push_back(k);
  }
  if (eligible.empty()) return span_pairs[rng.uniform(span_pairs.size())];
  return span_pairs[eligible[rng.uniform(eligible.size())]];
}

bool is_tight(const links::AlignmentLinks& links, const SpanPair& sp) {
  bool src_first = false, src_last = false, tgt_first = false, tgt_last = false;
  for (const auto& l : links) {
    src_first |= l.src == sp.src.start;
    src_last |= l.src == sp.src.end() - 1;
    tgt_first |= l.tgt == sp.tgt.start;
    tgt_last |= l.tgt == sp.tgt.end() - 1;
  }
  return src_first && src_last && tgt_first && tgt_last;
}

std::string span_text(const corpus::Tokens& tokens, Span span) {
  if (span.end() > tokens.size() || span.length == 0) throw DataError("span out of bounds");
  return text::join(std::span<const std::string>(tokens).subspan(span.start, span.length));
}

}  // namespace alignforge::spans
