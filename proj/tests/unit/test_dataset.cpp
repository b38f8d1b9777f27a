#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "alignforge/dataset.hpp"
#include "alignforge/error.hpp"
#include "support/synthetic.hpp"

using namespace alignforge;
using dataset::GenConfig;
using instructions::Task;

namespace {

std::string jsonl(const std::vector<dataset::InstructionRecord>& records) {
  std::ostringstream out;
  dataset::write_jsonl(out, records);
  return out.str();
}

GenConfig config_for(std::vector<Task> tasks, std::uint64_t seed = 1) {
  GenConfig c;
  c.tasks = std::move(tasks);
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Generate, MtEmitsBothDirections) {
  const auto p = synth::planted(10, 30, 3, 6, 1);
  const auto d = dataset::generate_dataset(p.corpus, p.gold, config_for({Task::kMt}));
  ASSERT_EQ(d.records.size(), 20u);
  EXPECT_EQ(d.records[0].from, "de");
  EXPECT_EQ(d.records[1].from, "en");
  EXPECT_EQ(d.stats.records.at(Task::kMt), 20u);
}

TEST(Generate, AlignBalanceWithinUncorruptibleCount) {
  const auto p = synth::planted(500, 40, 2, 7, 2);
  const auto d = dataset::generate_dataset(p.corpus, p.gold, config_for({Task::kAlign}));
  const auto& s = d.stats;
  EXPECT_EQ(s.align_true + s.align_false, d.records.size());
  const long diff = long(s.align_true) - long(s.align_false);
  EXPECT_LE(std::labs(diff), long(s.uncorruptible) + 1);
  EXPECT_GE(diff, 0);
  for (const auto& r : d.records) {
    ASSERT_TRUE(r.label.has_value());
    EXPECT_EQ(r.output, *r.label ? "True" : "False");
    EXPECT_EQ(r.meta.corruption.has_value(), !*r.label);
  }
}

TEST(Generate, SameSeedIsByteIdentical) {
  const auto p = synth::planted(60, 30, 2, 8, 3);
  const auto cfg = config_for({Task::kMt, Task::kAlign, Task::kHint, Task::kRevise, Task::kMonoHalf}, 9);
  const auto a = jsonl(dataset::generate_dataset(p.corpus, p.gold, cfg).records);
  const auto b = jsonl(dataset::generate_dataset(p.corpus, p.gold, cfg).records);
  EXPECT_EQ(a, b);
  const auto c = jsonl(dataset::generate_dataset(p.corpus, p.gold, config_for(cfg.tasks, 10)).records);
  EXPECT_NE(a, c);
}

TEST(Generate, HintFallsBackToMtWithoutSpans) {
  const auto p = synth::planted(3, 20, 3, 3, 4);
  std::vector<links::AlignmentLinks> none(3);
  const auto d = dataset::generate_dataset(p.corpus, none, config_for({Task::kHint, Task::kAlign, Task::kRevise}));
  EXPECT_EQ(d.stats.hint_fallback, 3u);
  EXPECT_EQ(d.stats.no_span, 3u);
  EXPECT_EQ(d.stats.revise_skipped, 3u);
  ASSERT_EQ(d.records.size(), 3u);
  for (const auto& r : d.records) {
    EXPECT_EQ(r.task, Task::kHint);
    EXPECT_TRUE(r.input.starts_with("Translate from English to German."));
    EXPECT_EQ(r.meta.extra["fallback"], "mt");
  }
}

TEST(Generate, HintsNeverExceedCap) {
  const auto p = synth::planted(100, 40, 6, 12, 5);
  auto cfg = config_for({Task::kHint});
  cfg.max_hints = 5;
  for (const auto& r : dataset::generate_dataset(p.corpus, p.gold, cfg).records) {
    EXPECT_LE(r.meta.hints.size(), 5u);
    EXPECT_GE(r.meta.hints.size(), 1u);
  }
}

TEST(Generate, RatiosSubsampleTasks) {
  const auto p = synth::planted(400, 40, 3, 6, 6);
  auto cfg = config_for({Task::kMt, Task::kMonoFull});
  cfg.ratios[Task::kMonoFull] = 0.25;
  const auto d = dataset::generate_dataset(p.corpus, p.gold, cfg);
  EXPECT_EQ(d.stats.records.at(Task::kMt), 800u);
  const double frac = d.stats.records.at(Task::kMonoFull) / 400.0;
  EXPECT_NEAR(frac, 0.25, 0.07);
}

TEST(Generate, ProvenanceLandsInMeta) {
  const auto p = synth::planted(2, 10, 3, 3, 7);
  auto cfg = config_for({Task::kMt});
  cfg.provenance = {{"version", "0.1.0"}};
  for (const auto& r : dataset::generate_dataset(p.corpus, p.gold, cfg).records) {
    EXPECT_EQ(r.meta.extra["run"]["version"], "0.1.0");
    EXPECT_EQ(r.meta.seed, 1u);
  }
}

TEST(Generate, Errors) {
  const auto p = synth::planted(2, 10, 3, 3, 8);
  EXPECT_THROW(dataset::generate_dataset(p.corpus, {}, config_for({Task::kMt})), DataError);
  EXPECT_THROW(dataset::generate_dataset(p.corpus, p.gold, config_for({})), UsageError);
  std::vector<links::AlignmentLinks> bad(2, links::AlignmentLinks{{9, 9}});
  EXPECT_THROW(dataset::generate_dataset(p.corpus, bad, config_for({Task::kMt})), DataError);
}

TEST(Jsonl, RoundTripsThroughAFile) {
  const auto p = synth::planted(20, 30, 2, 6, 9);
  const auto d = dataset::generate_dataset(p.corpus, p.gold, config_for({Task::kMt, Task::kAlign, Task::kRevise}));
  const auto path = std::filesystem::temp_directory_path() / "alignforge_dataset_test.jsonl";
  {
    std::ofstream out(path);
    dataset::write_jsonl(out, d.records);
  }
  EXPECT_EQ(jsonl(dataset::read_jsonl(path)), jsonl(d.records));
  std::ofstream(path) << "{\"id\":\"x\"}\n";
  try {
    dataset::read_jsonl(path);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":1:"), std::string::npos);
  }
  std::filesystem::remove(path);
}
