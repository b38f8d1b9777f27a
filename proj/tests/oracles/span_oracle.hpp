#pragma once

// Exhaustive span-pair enumeration: every (source span, target span) within
// the limits, kept when at least one link lies inside and no link crosses.

#include <tuple>
#include <utility>
#include <vector>

namespace oracle {

struct BruteSpanPair {
  int src_start, src_len, tgt_start, tgt_len, links;
  auto key() const { return std::tie(src_start, src_len, tgt_start, tgt_len, links); }
  bool operator==(const BruteSpanPair& o) const { return key() == o.key(); }
};

inline bool brute_consistent(const std::vector<std::pair<int, int>>& links, int s0, int s1, int t0, int t1,
                             int* inside = nullptr) {
  int in = 0;
  for (const auto& [s, t] : links) {
    const bool si = s >= s0 && s <= s1;
    const bool ti = t >= t0 && t <= t1;
    if (si && ti) ++in;
    if (si && !ti) return false;
    if (!si && ti) return false;
  }
  if (inside) *inside = in;
  return in > 0;
}

inline std::vector<BruteSpanPair> brute_span_pairs(int n, int m, const std::vector<std::pair<int, int>>& links,
                                                   int max_src, int max_tgt) {
  std::vector<BruteSpanPair> out;
  for (int s0 = 0; s0 < n; ++s0)
    for (int sl = 1; sl <= max_src && s0 + sl <= n; ++sl)
      for (int t0 = 0; t0 < m; ++t0)
        for (int tl = 1; tl <= max_tgt && t0 + tl <= m; ++tl) {
          int in = 0;
          if (brute_consistent(links, s0, s0 + sl - 1, t0, t0 + tl - 1, &in)) out.push_back({s0, sl, t0, tl, in});
        }
  return out;  // loops already produce (src start, src len, tgt start, tgt len) order
}

}  // namespace oracle
