#include "alignforge/curriculum.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "alignforge/dataset.hpp"
#include "alignforge/error.hpp"
#include "alignforge/rng.hpp"

namespace alignforge::curriculum {

namespace {

constexpr const char* kManifestFile = "manifest.json";

std::string stage_name(const std::vector<Task>& tasks) {
  std::string out;
  for (const auto t : tasks) {
    if (!out.empty()) out += "+";
    out += instructions::task_name(t);
  }
  return out;
}

std::string file_stem(const std::string& name) {
  std::string out;
  for (char c : name) out.push_back(c == '+' ? '_' : c);
  return out;
}

std::size_t count_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing shard " + path.string());
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

Kind parse_kind(std::string_view name) {
  if (name == "mt-align" || name == "mt+align") return Kind::kMtAlign;
  if (name == "align-then-mt") return Kind::kAlignThenMt;
  if (name == "mt-align-then-mt") return Kind::kMtAlignThenMt;
  if (name == "joint") return Kind::kJoint;
  throw UsageError("unknown curriculum '" + std::string(name) + "' (mt-align, align-then-mt, mt-align-then-mt, joint)");
}

std::string_view kind_name(Kind k) {
  switch (k) {
    case Kind::kMtAlign: return "mt-align";
    case Kind::kAlignThenMt: return "align-then-mt";
    case Kind::kMtAlignThenMt: return "mt-align-then-mt";
    case Kind::kJoint: return "joint";
  }
  return "?";
}

Datasets group_by_task(std::vector<InstructionRecord> records) {
  Datasets out;
  for (auto& r : records) out[r.task].push_back(std::move(r));
  return out;
}

CurriculumManifest build_curriculum(const Datasets& datasets, Kind kind, std::uint64_t seed) {
  std::vector<std::vector<Task>> plan;
  switch (kind) {
    case Kind::kMtAlign: plan = {{Task::kMt, Task::kAlign}}; break;
    case Kind::kAlignThenMt: plan = {{Task::kAlign}, {Task::kMt}}; break;
    case Kind::kMtAlignThenMt: plan = {{Task::kMt, Task::kAlign}, {Task::kMt}}; break;
    case Kind::kJoint: {
      std::vector<Task> all;
      for (const auto& [task, records] : datasets) all.push_back(task);
      if (all.empty()) throw UsageError("joint curriculum needs at least one dataset");
      plan = {all};
      break;
    }
  }

  std::set<Task> used;
  for (const auto& stage : plan) used.insert(stage.begin(), stage.end());
  for (const Task t : used) {
    if (!datasets.count(t)) {
      throw UsageError("curriculum " + std::string(kind_name(kind)) + " needs a '" +
                       std::string(instructions::task_name(t)) + "' dataset");
    }
  }
  for (const auto& [task, records] : datasets) {
    if (!used.count(task)) {
      throw UsageError("dataset '" + std::string(instructions::task_name(task)) + "' is not used by curriculum " +
                       std::string(kind_name(kind)) + "; use joint");
    }
  }

  CurriculumManifest m;
  m.kind = kind;
  m.seed = seed;
  for (std::size_t s = 0; s < plan.size(); ++s) {
    Stage stage;
    stage.name = stage_name(plan[s]);
    stage.tasks = plan[s];
    stage.shuffle_seed = derive_seed(seed, 0x7374616765ULL, s);
    for (const Task t : plan[s]) {
      const auto& records = datasets.at(t);
      stage.records.insert(stage.records.end(), records.begin(), records.end());
    }
    Rng rng(stage.shuffle_seed);
    rng.shuffle(std::span<InstructionRecord>(stage.records));
    m.stages.push_back(std::move(stage));
  }
  return m;
}

ManifestInfo write_manifest(const CurriculumManifest& manifest, const std::filesystem::path& out_dir,
                            std::size_t shard_size, const nlohmann::ordered_json& provenance) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create " + out_dir.string() + ": " + ec.message());

  ManifestInfo info;
  info.curriculum = std::string(kind_name(manifest.kind));
  info.seed = manifest.seed;
  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < manifest.stages.size(); ++s) {
    const auto& stage = manifest.stages[s];
    StageInfo si{stage.name, stage.shuffle_seed, {}, stage.records.size()};
    const std::size_t per = shard_size == 0 ? std::max<std::size_t>(stage.records.size(), 1) : shard_size;
    std::size_t shard = 0;
    for (std::size_t begin = 0; begin < stage.records.size() || shard == 0; begin += per, ++shard) {
      const std::size_t end = std::min(stage.records.size(), begin + per);
      char suffix[16];
      std::snprintf(suffix, sizeof suffix, "%03zu", shard);
      const std::string file = "stage" + std::to_string(s + 1) + "_" + file_stem(stage.name) + "_" + suffix + ".jsonl";
      std::ofstream out(out_dir / file, std::ios::binary);
      if (!out) throw DataError("cannot write " + (out_dir / file).string());
      for (std::size_t k = begin; k < end; ++k) out << instructions::to_jsonl_line(stage.records[k]) << '\n';
      si.shards.push_back({file, end - begin});
      if (end >= stage.records.size()) break;
    }
    nlohmann::ordered_json sj;
    sj["name"] = si.name;
    sj["shuffle_seed"] = si.shuffle_seed;
    nlohmann::ordered_json files = nlohmann::ordered_json::array(), counts = nlohmann::ordered_json::array();
    for (const auto& sh : si.shards) {
      files.push_back(sh.file);
      counts.push_back(sh.records);
    }
    sj["files"] = std::move(files);
    sj["file_records"] = std::move(counts);
    sj["records"] = si.records;
    stages.push_back(std::move(sj));
    info.stages.push_back(std::move(si));
  }

  nlohmann::ordered_json j;
  j["curriculum"] = info.curriculum;
  j["seed"] = info.seed;
  j["stages"] = std::move(stages);
  if (!provenance.is_null()) j["run"] = provenance;
  std::ofstream out(out_dir / kManifestFile, std::ios::binary);
  if (!out) throw DataError("cannot write manifest in " + out_dir.string());
  out << j.dump(2) << '\n';
  return info;
}

ManifestInfo read_manifest(const std::filesystem::path& out_dir) {
  std::ifstream in(out_dir / kManifestFile);
  if (!in) throw DataError("no manifest.json in " + out_dir.string());
  ManifestInfo info;
  try {
    const auto j = nlohmann::json::parse(in);
    info.curriculum = j.at("curriculum").get<std::string>();
    info.seed = j.at("seed").get<std::uint64_t>();
    std::set<std::string> names;
    for (const auto& sj : j.at("stages")) {
      StageInfo si;
      si.name = sj.at("name").get<std::string>();
      if (!names.insert(si.name).second) throw DataError("duplicate stage name " + si.name);
      si.shuffle_seed = sj.value("shuffle_seed", std::uint64_t{0});
      si.records = sj.at("records").get<std::size_t>();
      const auto& files = sj.at("files");
      const auto counts = sj.value("file_records", std::vector<std::size_t>{});
      std::size_t total = 0;
      for (std::size_t k = 0; k < files.size(); ++k) {
        ShardInfo sh{files[k].get<std::string>(), count_lines(out_dir / files[k].get<std::string>())};
        if (k < counts.size() && counts[k] != sh.records) {
          throw DataError("shard " + sh.file + " has " + std::to_string(sh.records) + " lines, manifest says " +
                          std::to_string(counts[k]));
        }
        total += sh.records;
        si.shards.push_back(std::move(sh));
      }
      if (total != si.records) {
        throw DataError("stage " + si.name + " has " + std::to_string(total) + " records on disk, manifest says " +
                        std::to_string(si.records));
      }
      info.stages.push_back(std::move(si));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed manifest: " + std::string(e.what()));
  }
  return info;
}

std::vector<InstructionRecord> load_stage(const std::filesystem::path& out_dir, const StageInfo& stage) {
  std::vector<InstructionRecord> out;
  for (const auto& sh : stage.shards) {
    auto part = dataset::read_jsonl(out_dir / sh.file);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

}  // namespace alignforge::curriculum
