#include "alignforge/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "alignforge/error.hpp"
#include "alignforge/rng.hpp"

namespace alignforge::corpus {

Vocab::Vocab(bool with_null) : with_null_(with_null) {
  if (with_null_) {
    tokens_.emplace_back(kNullToken);
    counts_.push_back(0);
  }
}

std::uint32_t Vocab::add(const std::string& token) {
  auto [it, inserted] = index_.try_emplace(token, static_cast<std::uint32_t>(tokens_.size()));
  if (inserted) {
    tokens_.push_back(token);
    counts_.push_back(0);
  }
  ++counts_[it->second];
  return it->second;
}

std::uint32_t Vocab::find(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnknown : it->second;
}

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (auto bad = text::find_invalid_utf8(line)) {
      throw DataError(path.string() + ":" + std::to_string(lines.size() + 1) +
                      ": invalid UTF-8 at byte " + std::to_string(*bad));
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace

Corpus from_lines(const std::vector<std::string>& src_lines, const std::vector<std::string>& tgt_lines,
                  const std::string& src_lang, const std::string& tgt_lang) {
  if (src_lines.size() != tgt_lines.size()) {
    throw DataError("line count mismatch: source has " + std::to_string(src_lines.size()) +
                    " lines, target has " + std::to_string(tgt_lines.size()));
  }
  Corpus corpus{src_lang, tgt_lang, {}, 0};
  corpus.pairs.reserve(src_lines.size());
  for (std::size_t i = 0; i < src_lines.size(); ++i) {
    Tokens src = tokenize(src_lines[i]);
    Tokens tgt = tokenize(tgt_lines[i]);
    if (src.empty() || tgt.empty()) {
      ++corpus.dropped;
      continue;
    }
    corpus.pairs.push_back({src_lang, tgt_lang, std::move(src), std::move(tgt),
                            static_cast<std::uint32_t>(corpus.pairs.size())});
  }
  return corpus;
}

Corpus load_parallel(const std::filesystem::path& src_path, const std::filesystem::path& tgt_path,
                     const std::string& src_lang, const std::string& tgt_lang) {
  return from_lines(read_lines(src_path), read_lines(tgt_path), src_lang, tgt_lang);
}

Corpus load_tsv(const std::filesystem::path& path, const std::string& src_lang, const std::string& tgt_lang) {
  std::vector<std::string> src, tgt;
  auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto tab = lines[i].find('\t');
    if (tab == std::string::npos) {
      if (lines[i].empty()) {
        src.emplace_back();
        tgt.emplace_back();
        continue;
      }
      throw DataError(path.string() + ":" + std::to_string(i + 1) + ": missing tab separator");
    }
    src.push_back(lines[i].substr(0, tab));
    tgt.push_back(lines[i].substr(tab + 1));
  }
  return from_lines(src, tgt, src_lang, tgt_lang);
}

StatsReport corpus_stats(const Corpus& corpus) {
  StatsReport r;
  r.src_lang = corpus.src_lang;
  r.tgt_lang = corpus.tgt_lang;
  r.pairs = corpus.size();
  r.dropped = corpus.dropped;
  for (const auto& p : corpus.pairs) {
    r.src_tokens += p.src_tokens.size();
    r.tgt_tokens += p.tgt_tokens.size();
  }
  if (r.pairs) {
    r.mean_src_length = static_cast<double>(r.src_tokens) / static_cast<double>(r.pairs);
    r.mean_tgt_length = static_cast<double>(r.tgt_tokens) / static_cast<double>(r.pairs);
  }
  return r;
}

Splits split_corpus(const Corpus& corpus, const SplitFractions& f, std::uint64_t seed) {
  const double parts[] = {f.train, f.valid, f.test};
  double sum = 0.0;
  for (double x : parts) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw UsageError("split fractions must be finite and non-negative");
    sum += x;
  }
  if (sum <= 0.0 || sum > 1.0 + 1e-9) throw UsageError("split fractions must sum to a value in (0, 1]");

  const std::size_t n = corpus.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, 0x73706c6974ULL));
  rng.shuffle(std::span<std::size_t>(order));

  std::size_t counts[3];
  for (int k = 0; k < 3; ++k) counts[k] = static_cast<std::size_t>(std::floor(parts[k] * static_cast<double>(n)));
  if (std::abs(sum - 1.0) <= 1e-9) counts[0] = n - counts[1] - counts[2];

  Splits out;
  Corpus* targets[] = {&out.train, &out.valid, &out.test};
  std::size_t offset = 0;
  for (int k = 0; k < 3; ++k) {
    std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(offset),
                                 order.begin() + static_cast<std::ptrdiff_t>(offset + counts[k]));
    offset += counts[k];
    std::sort(idx.begin(), idx.end());
    Corpus& c = *targets[k];
    c.src_lang = corpus.src_lang;
    c.tgt_lang = corpus.tgt_lang;
    c.pairs.reserve(idx.size());
    for (std::size_t i : idx) c.pairs.push_back(corpus.pairs[i]);
  }
  return out;
}

}  // namespace alignforge::corpus
