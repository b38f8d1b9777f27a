#include <gtest/gtest.h>

#include <algorithm>

#include "alignforge/error.hpp"
#include "alignforge/instructions.hpp"
#include "oracles/span_oracle.hpp"
#include "support/golden.hpp"
#include "support/synthetic.hpp"

using namespace alignforge;
using namespace alignforge::instructions;
using spans::SpanPair;

namespace {

corpus::SentencePair make_pair(const std::string& src, const std::string& tgt, const std::string& sl = "de",
                               const std::string& tl = "en") {
  return {sl, tl, text::split_whitespace(src), text::split_whitespace(tgt), 0};
}

std::vector<std::pair<int, int>> as_pairs(const links::AlignmentLinks& l) {
  std::vector<std::pair<int, int>> out;
  for (const auto& x : l) out.emplace_back(int(x.src), int(x.tgt));
  return out;
}

// Text of the asserted pair, (source side, target side).
std::pair<std::string, std::string> asserted(const corpus::SentencePair& pair, const SpanPair& gold,
                                             const std::optional<CorruptionResult>& c) {
  std::string s = spans::span_text(pair.src_tokens, gold.src), t = spans::span_text(pair.tgt_tokens, gold.tgt);
  if (c) (c->corrupted_side == Side::kSource ? s : t) = sentence(c->replacement_text);
  return {s, t};
}

bool brute_consistent_text(const corpus::SentencePair& pair, const links::AlignmentLinks& l,
                           const std::pair<std::string, std::string>& texts) {
  for (const auto& b : oracle::brute_span_pairs(int(pair.src_tokens.size()), int(pair.tgt_tokens.size()),
                                                as_pairs(l), 3, 3)) {
    const SpanPair sp{{std::uint32_t(b.src_start), std::uint32_t(b.src_len)},
                      {std::uint32_t(b.tgt_start), std::uint32_t(b.tgt_len)}, 0};
    if (spans::span_text(pair.src_tokens, sp.src) == texts.first &&
        spans::span_text(pair.tgt_tokens, sp.tgt) == texts.second)
      return true;
  }
  return false;
}

}  // namespace

TEST(Golden, EveryTemplateMatchesByteForByte) {
  const auto cases = golden::template_cases();
  EXPECT_EQ(cases.size(), 20u);
  for (const auto& c : cases) EXPECT_EQ(c.rendered, c.expected) << c.file;
}

TEST(RenderMt, EnglishToGalicianExample) {
  const auto r = render_mt(make_pair("hello .", "ola .", "en", "gl"), {"en", "gl"});
  EXPECT_EQ(r.input, "Translate from English to Galician.\nEnglish: hello .\nGalician: ");
  EXPECT_EQ(r.output, "ola .");
  EXPECT_EQ(r.task, Task::kMt);
  EXPECT_FALSE(r.label.has_value());
}

TEST(RenderMt, PeriodAppendedOnlyWhenMissing) {
  const auto pair = make_pair("wie geht es ?", "how are you");
  const auto r = render_mt(pair, {"de", "en"});
  EXPECT_EQ(r.input, "Translate from German to English.\nGerman: wie geht es ?\nEnglish: ");
  EXPECT_EQ(r.output, "how are you.");
  EXPECT_EQ(terminated("a"), "a.");
  EXPECT_EQ(terminated("a ."), "a .");
  EXPECT_EQ(terminated("\xE5\xA5\xBD\xE3\x80\x82"), "\xE5\xA5\xBD\xE3\x80\x82");
}

TEST(RenderMt, ReverseDirectionAndDeterminism) {
  const auto pair = make_pair("das haus", "the house");
  const auto r = render_mt(pair, {"en", "de"});
  EXPECT_EQ(r.input, "Translate from English to German.\nEnglish: the house.\nGerman: ");
  EXPECT_EQ(r.output, "das haus.");
  EXPECT_EQ(to_jsonl_line(r), to_jsonl_line(render_mt(pair, {"en", "de"})));
}

TEST(RenderMt, Errors) {
  const auto pair = make_pair("das haus", "the house");
  EXPECT_THROW(render_mt(pair, {"fr", "en"}), UsageError);
  try {
    render_mt(make_pair("a", "b", "zz", "en"), {"zz", "en"});
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("known codes"), std::string::npos);
  }
}

TEST(Corrupt, HausHouseExample) {
  const auto pair = make_pair("das haus", "the house");
  const links::AlignmentLinks l{{0, 0}, {1, 1}};
  const auto candidates = spans::extract_span_pairs(pair, l);
  const SpanPair gold{{1, 1}, {1, 1}, 1};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto c = corrupt_span_pair(pair, gold, candidates, rng);
    const auto texts = asserted(pair, gold, c);
    EXPECT_NE(texts, asserted(pair, gold, std::nullopt));
    EXPECT_FALSE(brute_consistent_text(pair, l, texts));
  }
}

TEST(Corrupt, UncorruptibleWhenOnlyOnePair) {
  const auto pair = make_pair("haus", "house");
  const auto candidates = spans::extract_span_pairs(pair, {{0, 0}});
  Rng rng(1);
  try {
    corrupt_span_pair(pair, candidates[0], candidates, rng);
    FAIL();
  } catch (const Uncorruptible& e) {
    EXPECT_STREQ(e.what(), "uncorruptible pair");
  }
}

TEST(Corrupt, DeterministicUnderSeed) {
  const auto p = synth::planted(1, 20, 6, 6, 3);
  const auto& pair = p.corpus.pairs[0];
  const auto candidates = spans::extract_span_pairs(pair, p.gold[0]);
  Rng a(77), b(77);
  const auto ca = corrupt_span_pair(pair, candidates[0], candidates, a);
  const auto cb = corrupt_span_pair(pair, candidates[0], candidates, b);
  EXPECT_EQ(ca.replacement_text, cb.replacement_text);
  EXPECT_EQ(ca.corrupted_side, cb.corrupted_side);
}

// Property: a corrupted assertion is never a consistent pair of its sentence.
TEST(Corrupt, AssertionIsNeverConsistent) {
  Rng links_rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const auto c = synth::random_corpus(1, 6, 7, 1000 + trial);
    const auto& pair = c.pairs[0];
    const auto l = synth::random_links(pair.src_tokens.size(), pair.tgt_tokens.size(), 0.3, links_rng);
    const auto candidates = spans::extract_span_pairs(pair, l);
    if (candidates.empty()) continue;
    Rng rng(trial);
    const auto& gold = spans::sample_gold_pair(candidates, rng);
    EXPECT_TRUE(brute_consistent_text(pair, l, asserted(pair, gold, std::nullopt)));
    try {
      const auto corruption = corrupt_span_pair(pair, gold, candidates, rng);
      EXPECT_FALSE(brute_consistent_text(pair, l, asserted(pair, gold, corruption)));
    } catch (const Uncorruptible&) {
    }
  }
}

TEST(RenderAlign, LabelsAndSubstrings) {
  const auto pair = make_pair("das haus", "the house");
  const SpanPair gold{{1, 1}, {1, 1}, 1};
  const auto t = render_align(pair, gold, std::nullopt);
  EXPECT_EQ(t.output, "True");
  EXPECT_EQ(t.label, true);
  EXPECT_NE(t.input.find("English: the house."), std::string::npos);
  EXPECT_NE(t.input.find("German: das haus."), std::string::npos);
  const CorruptionResult c{gold, Side::kTarget, {"the"}, {0, 1}};
  const auto f = render_align(pair, gold, c);
  EXPECT_EQ(f.output, "False");
  EXPECT_EQ(f.label, false);
  EXPECT_NE(f.input.find("Assertion: \"the\" can be aligned with \"haus\" statistically."), std::string::npos);
}

TEST(RenderAlign, RejectsNoOpCorruptionAndBadSpans) {
  const auto pair = make_pair("das haus", "the house");
  const SpanPair gold{{1, 1}, {1, 1}, 1};
  EXPECT_THROW(render_align(pair, gold, CorruptionResult{gold, Side::kTarget, {"house"}, {1, 1}}), DataError);
  EXPECT_THROW(render_align(pair, SpanPair{{1, 2}, {0, 1}, 1}, std::nullopt), DataError);
}

TEST(RenderHint, CapsAtFiveHints) {
  const auto p = synth::planted(1, 20, 7, 7, 9);
  const auto& pair = p.corpus.pairs[0];
  std::vector<SpanPair> seven;
  for (const auto& l : p.gold[0]) seven.push_back({{l.src, 1}, {l.tgt, 1}, 1});
  ASSERT_EQ(seven.size(), 7u);
  const auto r = render_hint(pair, {"de", "en"}, seven);
  EXPECT_EQ(std::count(r.input.begin(), r.input.end(), '\n'), 2 + 5 + 1);
  EXPECT_EQ(r.meta.hints.size(), 5u);
  EXPECT_EQ(render_hint(pair, {"de", "en"}, {seven[0]}).meta.hints.size(), 1u);
  EXPECT_EQ(render_hint(pair, {"de", "en"}, seven, 2).meta.hints.size(), 2u);
  EXPECT_TRUE(r.input.ends_with("English: "));
  EXPECT_EQ(r.output, terminated(sentence(pair.tgt_tokens)));
}

TEST(RenderHint, Errors) {
  const auto pair = make_pair("das haus", "the house");
  EXPECT_THROW(render_hint(pair, {"de", "en"}, {}), DataError);
  EXPECT_THROW(render_hint(pair, {"de", "en"}, {{{0, 1}, {0, 1}, 1}}, 0), UsageError);
}

// Oracle: splice the original span back over the corrupted one.
TEST(RenderRevise, CorrectionRestoresTheOriginal) {
  const auto pair = make_pair("the small red house", "das kleine rote haus", "en", "de");
  const links::AlignmentLinks l{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  const auto candidates = spans::extract_span_pairs(pair, l);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const auto& gold = spans::sample_gold_pair(candidates, rng);
    const auto c = corrupt_span_pair(pair, gold, candidates, rng, Side::kTarget);
    const auto r = render_revise(pair, gold, c);
    const std::string lead = "The incorrectly translated word is \"";
    ASSERT_TRUE(r.output.starts_with(lead));
    const auto mid = r.output.find("\". It should be \"");
    ASSERT_NE(mid, std::string::npos);
    const std::string wrong = r.output.substr(lead.size(), mid - lead.size());
    const std::string right = r.output.substr(mid + 17, r.output.size() - mid - 17 - 2);
    EXPECT_TRUE(r.output.ends_with("\"."));

    const auto x_line = r.input.substr(r.input.rfind("\nGerman: ") + 9);
    const std::string corrupted_sentence = x_line.substr(0, x_line.size() - 1);
    EXPECT_NE(corrupted_sentence, sentence(pair.tgt_tokens));
    const corpus::Tokens prefix(pair.tgt_tokens.begin(), pair.tgt_tokens.begin() + gold.tgt.start);
    const corpus::Tokens suffix(pair.tgt_tokens.begin() + gold.tgt.end(), pair.tgt_tokens.end());
    auto join3 = [](const corpus::Tokens& a, const std::string& m, const corpus::Tokens& b) {
      std::string s = sentence(a);
      if (!s.empty()) s += " ";
      s += m;
      if (!b.empty()) s += " " + sentence(b);
      return s;
    };
    EXPECT_EQ(join3(prefix, wrong, suffix), corrupted_sentence);
    EXPECT_EQ(join3(prefix, right, suffix), sentence(pair.tgt_tokens));
  }
}

TEST(RenderRevise, Errors) {
  const auto pair = make_pair("das haus", "the house");
  const SpanPair gold{{1, 1}, {1, 1}, 1};
  // English is the pivot, so the translated side is the German source.
  EXPECT_THROW(render_revise(pair, gold, {gold, Side::kTarget, {"the"}, {0, 1}}), DataError);
  EXPECT_THROW(render_revise(pair, gold, {gold, Side::kSource, {"haus"}, {1, 1}}), DataError);
}

TEST(RenderMono, HalfAndFullSplits) {
  const corpus::Tokens t{"a", "b", "c", "d"};
  const auto half = render_mono(t, "en", MonoVariant::kHalf);
  EXPECT_TRUE(half.input.ends_with(": a b"));
  EXPECT_EQ(half.output, "c d");
  EXPECT_EQ(half.task, Task::kMonoHalf);
  const auto full = render_mono(t, "en", MonoVariant::kFull);
  EXPECT_EQ(full.input, std::string(kMonoPrompt));
  EXPECT_EQ(full.output, "a b c d");
  EXPECT_EQ(render_mono({"a", "b", "c"}, "en", MonoVariant::kHalf).output, "b c");
  EXPECT_THROW(render_mono({"a"}, "en", MonoVariant::kHalf), DataError);
  EXPECT_THROW(render_mono({}, "en", MonoVariant::kFull), DataError);
}

// Property: context ++ output == the sentence, for every length.
TEST(RenderMono, ConcatenationRestoresSentence) {
  corpus::Tokens t;
  for (int n = 1; n <= 12; ++n) {
    t.push_back("w" + std::to_string(n));
    for (auto v : {MonoVariant::kFull, MonoVariant::kHalf}) {
      if (v == MonoVariant::kHalf && n < 2) continue;
      const auto r = render_mono(t, "en", v);
      const std::string context = r.input.substr(kMonoPrompt.size());
      const std::string joined = context.empty() ? r.output : context + " " + r.output;
      EXPECT_EQ(joined, sentence(t));
    }
  }
}

TEST(Prompts, AllEndWithTheSlotAndDefaultMatchesMt) {
  const auto pair = make_pair("das haus", "the house");
  for (const char* name : {"default", "1", "2", "3", "4", "5"}) {
    const auto v = parse_prompt_variant(name);
    EXPECT_EQ(prompt_variant_name(v), name);
    EXPECT_TRUE(render_inference_prompt(pair, {"de", "en"}, v).ends_with("\nEnglish: "));
  }
  EXPECT_EQ(render_inference_prompt(pair, {"de", "en"}, PromptVariant::kDefault), render_mt(pair, {"de", "en"}).input);
  EXPECT_EQ(render_inference_prompt(pair, {"de", "en"}, PromptVariant::k2), "das haus.\nEnglish: ");
  EXPECT_EQ(parse_prompt_variant("PROMPT-3"), PromptVariant::k3);
  EXPECT_THROW(parse_prompt_variant("6"), UsageError);
}

TEST(Tasks, ParseNames) {
  for (auto t : {Task::kMt, Task::kAlign, Task::kHint, Task::kRevise, Task::kMonoFull, Task::kMonoHalf})
    EXPECT_EQ(parse_task(task_name(t)), t);
  EXPECT_EQ(parse_task("mono-half"), Task::kMonoHalf);
  EXPECT_THROW(parse_task("summarize"), UsageError);
}

TEST(Json, RoundTripsEveryField) {
  const auto pair = make_pair("das kleine haus", "the small house");
  const SpanPair gold{{2, 1}, {2, 1}, 1};
  auto r = render_align(pair, gold, CorruptionResult{gold, Side::kSource, {"das"}, {0, 1}});
  r.meta.seed = 42;
  r.meta.extra["run"] = {{"version", "x"}};
  const auto j = to_json(r);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"id", "task", "from", "to", "input", "output", "label", "meta"}));
  const auto back = from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(to_jsonl_line(back), to_jsonl_line(r));
  EXPECT_EQ(back.meta.corruption->replacement_text, corpus::Tokens{"das"});

  auto h = render_hint(pair, {"en", "de"}, {gold});
  EXPECT_EQ(to_jsonl_line(from_json(to_json(h))), to_jsonl_line(h));
  const auto m = render_mono(pair.tgt_tokens, "en", MonoVariant::kHalf);
  EXPECT_TRUE(to_json(m)["to"].is_null());
  EXPECT_EQ(to_jsonl_line(from_json(to_json(m))), to_jsonl_line(m));
  EXPECT_THROW(from_json(nlohmann::json::parse("{\"id\":1}")), DataError);
}
