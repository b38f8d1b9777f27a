#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <vector>

#include <json.hpp>

#include "alignforge/corpus.hpp"
#include "alignforge/instructions.hpp"
#include "alignforge/links.hpp"
#include "alignforge/span_pairs.hpp"

namespace alignforge::dataset {

using instructions::InstructionRecord;
using instructions::Task;

struct GenConfig {
  std::vector<Task> tasks{Task::kMt, Task::kAlign};
  /// Per-task fraction of pairs that produce records (default 1).
  std::map<Task, double> ratios;
  std::uint32_t max_hints = instructions::kDefaultMaxHints;
  spans::SpanLimits limits{};
  std::uint64_t seed = 0;
  /// Copied into every record's meta under "run" when not null.
  nlohmann::ordered_json provenance;
};

struct GenStats {
  std::map<Task, std::size_t> records;
  std::size_t align_true = 0;
  std::size_t align_false = 0;
  /// Pairs whose AlignInstruct negative could not be built; they emit True.
  std::size_t uncorruptible = 0;
  /// Pairs with no consistent span pair (no align/revise record).
  std::size_t no_span = 0;
  std::size_t revise_skipped = 0;
  std::size_t hint_fallback = 0;
  std::size_t mono_skipped = 0;
};

using RecordSink = std::function<void(const InstructionRecord&)>;

/// Emits records pair by pair in pair_id order, tasks in config order. All
/// randomness for a record derives from (seed, pair_id, task), so the output
/// is a pure function of the inputs. `links[k]` belongs to corpus.pairs[k].
///
/// MT records are emitted in both directions. AlignInstruct targets alternate
/// False/True over corruptible pairs; uncorruptible pairs emit True only.
GenStats generate_dataset(const corpus::Corpus& corpus, const std::vector<links::AlignmentLinks>& links,
                          const GenConfig& config, const RecordSink& sink);

struct Dataset {
  std::vector<InstructionRecord> records;
  GenStats stats;
};

Dataset generate_dataset(const corpus::Corpus& corpus, const std::vector<links::AlignmentLinks>& links,
                         const GenConfig& config);

void write_jsonl(std::ostream& out, const std::vector<InstructionRecord>& records);
std::vector<InstructionRecord> read_jsonl(const std::filesystem::path& path);

nlohmann::ordered_json stats_json(const GenStats& stats);

}  // namespace alignforge::dataset
