#include "alignforge/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include "alignforge/error.hpp"
#include "alignforge/rng.hpp"

namespace alignforge::dataset {

using instructions::Direction;
using instructions::Side;

namespace {

constexpr std::uint64_t kSelectStream = 0x73656c656374ULL;

bool selected(const GenConfig& config, Task task, std::uint32_t pair_id) {
  auto it = config.ratios.find(task);
  if (it == config.ratios.end() || it->second >= 1.0) return true;
  Rng rng(derive_seed(config.seed, kSelectStream + pair_id, static_cast<std::uint64_t>(task)));
  return rng.uniform_real() < it->second;
}

// Word-level hints: tight pairs within the word-level cap, else all pairs.
std::vector<spans::SpanPair> hint_candidates(const std::vector<spans::SpanPair>& all,
                                             const links::AlignmentLinks& links) {
  std::vector<spans::SpanPair> out;
  for (const auto& sp : all) {
    if (sp.src.length <= spans::kWordLevelMax && sp.tgt.length <= spans::kWordLevelMax && spans::is_tight(links, sp))
      out.push_back(sp);
  }
  return out.empty() ? all : out;
}

}  // namespace

GenStats generate_dataset(const corpus::Corpus& corpus, const std::vector<links::AlignmentLinks>& links,
                          const GenConfig& config, const RecordSink& sink) {
  if (links.size() != corpus.size()) {
    throw DataError("alignment count " + std::to_string(links.size()) + " does not match corpus size " +
                    std::to_string(corpus.size()));
  }
  if (config.tasks.empty()) throw UsageError("no tasks requested");
  if (config.max_hints < 1) throw UsageError("max hints must be >= 1");

  GenStats stats;
  std::size_t align_slot = 0;

  auto emit = [&](InstructionRecord r) {
    r.meta.seed = config.seed;
    if (!config.provenance.is_null()) r.meta.extra["run"] = config.provenance;
    ++stats.records[r.task];
    sink(r);
  };

  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto& pair = corpus.pairs[k];
    const auto& pair_links = links[k];
    pair_links.check_bounds(pair.src_tokens.size(), pair.tgt_tokens.size());
    const Side y = instructions::pivot_side(pair), x = instructions::other(y);
    const Direction pivot_dir{instructions::lang_of(pair, y), instructions::lang_of(pair, x)};

    std::vector<spans::SpanPair> span_pairs;
    bool spans_ready = false;
    auto get_spans = [&]() -> const std::vector<spans::SpanPair>& {
      if (!spans_ready) span_pairs = spans::extract_span_pairs(pair, pair_links, config.limits);
      spans_ready = true;
      return span_pairs;
    };

    for (const Task task : config.tasks) {
      if (!selected(config, task, pair.pair_id)) continue;
      Rng rng(derive_seed(config.seed, pair.pair_id, static_cast<std::uint64_t>(task)));
      switch (task) {
        case Task::kMt:
          emit(instructions::render_mt(pair, {pair.src_lang, pair.tgt_lang}));
          emit(instructions::render_mt(pair, {pair.tgt_lang, pair.src_lang}));
          break;

        case Task::kAlign: {
          const auto& candidates = get_spans();
          if (candidates.empty()) {
            ++stats.no_span;
            break;
          }
          const spans::SpanPair& gold = spans::sample_gold_pair(candidates, rng);
          std::optional<instructions::CorruptionResult> corruption;
          try {
            corruption = instructions::corrupt_span_pair(pair, gold, candidates, rng);
          } catch (const instructions::Uncorruptible&) {
            ++stats.uncorruptible;
          }
          // Corruptible pairs alternate False, True, False, ...
          const bool want_false = corruption && (align_slot++ % 2 == 0);
          auto r = instructions::render_align(pair, gold, want_false ? corruption : std::nullopt);
          ++(*r.label ? stats.align_true : stats.align_false);
          emit(std::move(r));
          break;
        }

        case Task::kHint: {
          const auto& all = get_spans();
          if (all.empty()) {
            ++stats.hint_fallback;
            auto r = instructions::render_mt(pair, pivot_dir);
            r.task = Task::kHint;
            r.id = "hint-" + std::to_string(pair.pair_id) + "-" + pivot_dir.from + "-" + pivot_dir.to;
            r.meta.extra["fallback"] = "mt";
            emit(std::move(r));
            break;
          }
          auto pool = hint_candidates(all, pair_links);
          rng.shuffle(std::span<spans::SpanPair>(pool));
          if (pool.size() > config.max_hints) pool.resize(config.max_hints);
          std::sort(pool.begin(), pool.end(), [&](const spans::SpanPair& a, const spans::SpanPair& b) {
            return instructions::span_of(a, x) < instructions::span_of(b, x);
          });
          emit(instructions::render_hint(pair, pivot_dir, pool, config.max_hints));
          break;
        }

        case Task::kRevise: {
          const auto& candidates = get_spans();
          if (candidates.empty()) {
            ++stats.revise_skipped;
            break;
          }
          const spans::SpanPair& gold = spans::sample_gold_pair(candidates, rng);
          try {
            auto corruption = instructions::corrupt_span_pair(pair, gold, candidates, rng, x);
            emit(instructions::render_revise(pair, gold, corruption));
          } catch (const instructions::Uncorruptible&) {
            ++stats.revise_skipped;
          }
          break;
        }

        case Task::kMonoFull:
        case Task::kMonoHalf: {
          const auto variant =
              task == Task::kMonoHalf ? instructions::MonoVariant::kHalf : instructions::MonoVariant::kFull;
          const auto& tokens = instructions::tokens_of(pair, x);
          if (variant == instructions::MonoVariant::kHalf && tokens.size() < 2) {
            ++stats.mono_skipped;
            break;
          }
          auto r = instructions::render_mono(tokens, instructions::lang_of(pair, x), variant);
          r.id += "-" + std::to_string(pair.pair_id);
          r.meta.pair_id = pair.pair_id;
          emit(std::move(r));
          break;
        }
      }
    }
  }
  return stats;
}

Dataset generate_dataset(const corpus::Corpus& corpus, const std::vector<links::AlignmentLinks>& links,
                         const GenConfig& config) {
  Dataset d;
  d.stats = generate_dataset(corpus, links, config, [&](const InstructionRecord& r) { d.records.push_back(r); });
  return d;
}

void write_jsonl(std::ostream& out, const std::vector<InstructionRecord>& records) {
  for (const auto& r : records) out << instructions::to_jsonl_line(r) << '\n';
}

std::vector<InstructionRecord> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<InstructionRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(instructions::from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

nlohmann::ordered_json stats_json(const GenStats& stats) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json per_task = nlohmann::ordered_json::object();
  for (const auto& [task, n] : stats.records) per_task[std::string(instructions::task_name(task))] = n;
  j["records"] = std::move(per_task);
  j["align_true"] = stats.align_true;
  j["align_false"] = stats.align_false;
  j["uncorruptible"] = stats.uncorruptible;
  j["no_span"] = stats.no_span;
  j["revise_skipped"] = stats.revise_skipped;
  j["hint_fallback"] = stats.hint_fallback;
  j["mono_skipped"] = stats.mono_skipped;
  return j;
}

}  // namespace alignforge::dataset
