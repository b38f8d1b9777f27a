#include "alignforge/links.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>

#include "alignforge/error.hpp"

namespace alignforge::links {

AlignmentLinks::AlignmentLinks(std::initializer_list<Link> links) : AlignmentLinks(std::vector<Link>(links)) {}

AlignmentLinks::AlignmentLinks(std::vector<Link> links) : links_(std::move(links)) {
  std::sort(links_.begin(), links_.end());
  links_.erase(std::unique(links_.begin(), links_.end()), links_.end());
}

void AlignmentLinks::insert(Link l) {
  auto it = std::lower_bound(links_.begin(), links_.end(), l);
  if (it == links_.end() || *it != l) links_.insert(it, l);
}

bool AlignmentLinks::contains(Link l) const { return std::binary_search(links_.begin(), links_.end(), l); }

void AlignmentLinks::check_bounds(std::size_t src_len, std::size_t tgt_len) const {
  for (const auto& l : links_) {
    if (l.src >= src_len || l.tgt >= tgt_len) {
      throw DataError("alignment link " + std::to_string(l.src) + "-" + std::to_string(l.tgt) +
                      " outside sentence bounds " + std::to_string(src_len) + "x" + std::to_string(tgt_len));
    }
  }
}

Heuristic parse_heuristic(std::string_view name) {
  if (name == "intersect" || name == "intersection") return Heuristic::kIntersection;
  if (name == "union") return Heuristic::kUnion;
  if (name == "gdfa" || name == "grow-diag-final-and") return Heuristic::kGrowDiagFinalAnd;
  throw UsageError("unknown symmetrization heuristic '" + std::string(name) + "' (intersect, union, gdfa)");
}

std::string_view heuristic_name(Heuristic h) {
  switch (h) {
    case Heuristic::kIntersection: return "intersect";
    case Heuristic::kUnion: return "union";
    case Heuristic::kGrowDiagFinalAnd: return "gdfa";
  }
  return "?";
}

namespace {

AlignmentLinks intersect(const AlignmentLinks& a, const AlignmentLinks& b) {
  std::vector<Link> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return AlignmentLinks(std::move(out));
}

AlignmentLinks unite(const AlignmentLinks& a, const AlignmentLinks& b) {
  std::vector<Link> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return AlignmentLinks(std::move(out));
}

// Row-major neighbourhood, diagonals included.
constexpr int kNeighbours[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}};

AlignmentLinks grow_diag_final_and(const AlignmentLinks& forward, const AlignmentLinks& reverse) {
  const AlignmentLinks uni = unite(forward, reverse);
  if (uni.empty()) return {};
  std::size_t n = 0, m = 0;
  for (const auto& l : uni) {
    n = std::max<std::size_t>(n, l.src + 1);
    m = std::max<std::size_t>(m, l.tgt + 1);
  }
  std::vector<char> grid(n * m, 0), src_aligned(n, 0), tgt_aligned(m, 0);
  auto add = [&](std::size_t i, std::size_t j) {
    grid[i * m + j] = 1;
    src_aligned[i] = 1;
    tgt_aligned[j] = 1;
  };
  for (const auto& l : intersect(forward, reverse)) add(l.src, l.tgt);

  // grow-diag
  bool added = true;
  while (added) {
    added = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (!grid[i * m + j]) continue;
        for (const auto& d : kNeighbours) {
          const long ni = static_cast<long>(i) + d[0];
          const long nj = static_cast<long>(j) + d[1];
          if (ni < 0 || nj < 0 || ni >= static_cast<long>(n) || nj >= static_cast<long>(m)) continue;
          const auto ui = static_cast<std::size_t>(ni), uj = static_cast<std::size_t>(nj);
          if (grid[ui * m + uj]) continue;
          if ((!src_aligned[ui] || !tgt_aligned[uj]) &&
              uni.contains({static_cast<std::uint32_t>(ui), static_cast<std::uint32_t>(uj)})) {
            add(ui, uj);
            added = true;
          }
        }
      }
    }
  }

  // final-and, forward then reverse
  for (const AlignmentLinks* side : {&forward, &reverse}) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (!src_aligned[i] && !tgt_aligned[j] &&
            side->contains({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)})) {
          add(i, j);
        }
      }
    }
  }

  std::vector<Link> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (grid[i * m + j]) out.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
  return AlignmentLinks(std::move(out));
}

}  // namespace

AlignmentLinks symmetrize(const AlignmentLinks& forward, const AlignmentLinks& reverse, Heuristic heuristic) {
  switch (heuristic) {
    case Heuristic::kIntersection: return intersect(forward, reverse);
    case Heuristic::kUnion: return unite(forward, reverse);
    case Heuristic::kGrowDiagFinalAnd: return grow_diag_final_and(forward, reverse);
  }
  return {};
}

std::string to_pharaoh(const AlignmentLinks& links) {
  std::string out;
  for (const auto& l : links) {
    if (!out.empty()) out.push_back(' ');
    out += std::to_string(l.src);
    out.push_back('-');
    out += std::to_string(l.tgt);
  }
  return out;
}

AlignmentLinks parse_pharaoh(std::string_view line) {
  std::vector<Link> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
    const std::string_view item = line.substr(pos, end - pos);
    const auto dash = item.find('-');
    Link l;
    auto parse = [&](std::string_view s, std::uint32_t& v) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      return ec == std::errc() && p == s.data() + s.size() && !s.empty();
    };
    if (dash == std::string_view::npos || !parse(item.substr(0, dash), l.src) || !parse(item.substr(dash + 1), l.tgt)) {
      throw DataError("malformed alignment point '" + std::string(item) + "'");
    }
    out.push_back(l);
    pos = end;
  }
  return AlignmentLinks(std::move(out));
}

void write_pharaoh(std::ostream& out, const std::vector<AlignmentLinks>& corpus_links) {
  for (const auto& links : corpus_links) out << to_pharaoh(links) << '\n';
}

std::vector<AlignmentLinks> read_pharaoh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<AlignmentLinks> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      out.push_back(parse_pharaoh(line));
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace alignforge::links
