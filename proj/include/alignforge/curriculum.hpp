#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "alignforge/instructions.hpp"

namespace alignforge::curriculum {

using instructions::InstructionRecord;
using instructions::Task;

enum class Kind {
  kMtAlign,          // one stage: MT and Align shuffled together
  kAlignThenMt,      // Align, then MT
  kMtAlignThenMt,    // MT+Align, then MT again
  kJoint,            // one stage over any task subset
};

Kind parse_kind(std::string_view name);
std::string_view kind_name(Kind k);

/// Records grouped by task tag.
using Datasets = std::map<Task, std::vector<InstructionRecord>>;

Datasets group_by_task(std::vector<InstructionRecord> records);

struct Stage {
  std::string name;
  std::uint64_t shuffle_seed = 0;
  std::vector<Task> tasks;
  std::vector<InstructionRecord> records;
};

struct CurriculumManifest {
  Kind kind = Kind::kJoint;
  std::uint64_t seed = 0;
  std::vector<Stage> stages;
};

/// Throws UsageError when a dataset the kind needs is missing or a given
/// dataset would go unused.
CurriculumManifest build_curriculum(const Datasets& datasets, Kind kind, std::uint64_t seed);

struct ShardInfo {
  std::string file;
  std::size_t records = 0;
};

struct StageInfo {
  std::string name;
  std::uint64_t shuffle_seed = 0;
  std::vector<ShardInfo> shards;
  std::size_t records = 0;
};

struct ManifestInfo {
  std::string curriculum;
  std::uint64_t seed = 0;
  std::vector<StageInfo> stages;
};

/// Writes one or more JSONL shards per stage plus manifest.json. A shard
/// holds at most `shard_size` records (0 = unlimited).
ManifestInfo write_manifest(const CurriculumManifest& manifest, const std::filesystem::path& out_dir,
                            std::size_t shard_size = 0,
                            const nlohmann::ordered_json& provenance = nlohmann::ordered_json());

/// Reads manifest.json and checks that every shard exists with the recorded
/// line count. Throws DataError otherwise.
ManifestInfo read_manifest(const std::filesystem::path& out_dir);

/// Loads the records of one stage from its shards.
std::vector<InstructionRecord> load_stage(const std::filesystem::path& out_dir, const StageInfo& stage);

}  // namespace alignforge::curriculum
