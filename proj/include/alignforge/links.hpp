#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace alignforge::links {

/// One alignment point: source index, target index (0-based).
struct Link {
  std::uint32_t src = 0;
  std::uint32_t tgt = 0;

  friend auto operator<=>(const Link&, const Link&) = default;
};

/// Sorted, duplicate-free link set for one sentence pair.
class AlignmentLinks {
 public:
  AlignmentLinks() = default;
  AlignmentLinks(std::initializer_list<Link> links);
  explicit AlignmentLinks(std::vector<Link> links);

  void insert(Link l);
  bool contains(Link l) const;
  bool empty() const { return links_.empty(); }
  std::size_t size() const { return links_.size(); }
  const std::vector<Link>& items() const { return links_; }
  auto begin() const { return links_.begin(); }
  auto end() const { return links_.end(); }

  /// Throws DataError if any index is outside [0, src_len) x [0, tgt_len).
  void check_bounds(std::size_t src_len, std::size_t tgt_len) const;

  friend bool operator==(const AlignmentLinks&, const AlignmentLinks&) = default;

 private:
  std::vector<Link> links_;
};

enum class Heuristic { kIntersection, kUnion, kGrowDiagFinalAnd };

Heuristic parse_heuristic(std::string_view name);
std::string_view heuristic_name(Heuristic h);

/// Combines forward and reverse links (both in source->target coordinates).
AlignmentLinks symmetrize(const AlignmentLinks& forward, const AlignmentLinks& reverse, Heuristic heuristic);

/// Pharaoh line: space-separated "i-j", sorted.
std::string to_pharaoh(const AlignmentLinks& links);
AlignmentLinks parse_pharaoh(std::string_view line);

void write_pharaoh(std::ostream& out, const std::vector<AlignmentLinks>& corpus_links);
std::vector<AlignmentLinks> read_pharaoh(const std::filesystem::path& path);

}  // namespace alignforge::links
