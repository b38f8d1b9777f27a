#include "alignforge/instructions.hpp"

#include <algorithm>

#include "alignforge/languages.hpp"

namespace alignforge::instructions {

namespace {

constexpr std::string_view kTaskNames[] = {"mt", "align", "hint", "revise", "mono_full", "mono_half"};
constexpr std::string_view kPromptNames[] = {"default", "1", "2", "3", "4", "5"};

std::string in_quotes(std::string_view s) { return "\"" + std::string(s) + "\""; }

std::string pair_id_str(const corpus::SentencePair& pair) { return std::to_string(pair.pair_id); }

}  // namespace

std::string_view task_name(Task t) { return kTaskNames[static_cast<int>(t)]; }

Task parse_task(std::string_view name) {
  for (int i = 0; i < 6; ++i)
    if (kTaskNames[i] == name) return static_cast<Task>(i);
  if (name == "mono-full") return Task::kMonoFull;
  if (name == "mono-half") return Task::kMonoHalf;
  throw UsageError("unknown task '" + std::string(name) + "' (mt, align, hint, revise, mono_full, mono_half)");
}

std::string_view side_name(Side s) { return s == Side::kSource ? "src" : "tgt"; }

const corpus::Tokens& tokens_of(const corpus::SentencePair& pair, Side s) {
  return s == Side::kSource ? pair.src_tokens : pair.tgt_tokens;
}

const std::string& lang_of(const corpus::SentencePair& pair, Side s) {
  return s == Side::kSource ? pair.src_lang : pair.tgt_lang;
}

spans::Span span_of(const spans::SpanPair& sp, Side s) { return s == Side::kSource ? sp.src : sp.tgt; }

Side pivot_side(const corpus::SentencePair& pair) {
  if (pair.tgt_lang == "en" && pair.src_lang != "en") return Side::kTarget;
  return Side::kSource;
}

Side from_side(const corpus::SentencePair& pair, const Direction& d) {
  if (d.from == pair.src_lang && d.to == pair.tgt_lang) return Side::kSource;
  if (d.from == pair.tgt_lang && d.to == pair.src_lang) return Side::kTarget;
  throw UsageError("direction " + d.from + "->" + d.to + " does not match pair languages " + pair.src_lang + "-" +
                   pair.tgt_lang);
}

std::string sentence(const corpus::Tokens& tokens) { return text::join(tokens); }

std::string terminated(std::string s) {
  if (!text::ends_with_sentence_terminal(s)) s.push_back('.');
  return s;
}

InstructionRecord render_mt(const corpus::SentencePair& pair, const Direction& direction) {
  if (pair.src_tokens.empty() || pair.tgt_tokens.empty()) throw DataError("cannot render an empty pair");
  const Side y = from_side(pair, direction);
  const std::string& y_name = languages::name(direction.from);
  const std::string& x_name = languages::name(direction.to);
  InstructionRecord r;
  r.id = "mt-" + pair_id_str(pair) + "-" + direction.from + "-" + direction.to;
  r.task = Task::kMt;
  r.from = direction.from;
  r.to = direction.to;
  r.input = "Translate from " + y_name + " to " + x_name + ".\n" + y_name + ": " +
            terminated(sentence(tokens_of(pair, y))) + "\n" + x_name + ": ";
  r.output = terminated(sentence(tokens_of(pair, other(y))));
  r.meta.pair_id = pair.pair_id;
  return r;
}

CorruptionResult corrupt_span_pair(const corpus::SentencePair& pair, const spans::SpanPair& gold,
                                   const std::vector<spans::SpanPair>& candidates, Rng& rng,
                                   std::optional<Side> forced_side) {
  auto distractors = [&](Side side) {
    const auto& side_tokens = tokens_of(pair, side);
    const auto& kept_tokens = tokens_of(pair, other(side));
    const std::string gold_text = spans::span_text(side_tokens, span_of(gold, side));
    const std::string kept_text = spans::span_text(kept_tokens, span_of(gold, other(side)));
    std::vector<spans::Span> out;
    for (const auto& c : candidates) {
      const spans::Span s = span_of(c, side);
      if (std::find(out.begin(), out.end(), s) != out.end()) continue;
      const std::string replacement = spans::span_text(side_tokens, s);
      if (replacement == gold_text) continue;
      // The swapped assertion must not coincide with any consistent pair.
      const bool true_pair = std::any_of(candidates.begin(), candidates.end(), [&](const spans::SpanPair& d) {
        return spans::span_text(side_tokens, span_of(d, side)) == replacement &&
               spans::span_text(kept_tokens, span_of(d, other(side))) == kept_text;
      });
      if (!true_pair) out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    return out;
  };

  Side side = forced_side ? *forced_side : (rng.coin() ? Side::kSource : Side::kTarget);
  auto options = distractors(side);
  if (options.empty() && !forced_side) {
    side = other(side);
    options = distractors(side);
  }
  if (options.empty()) throw Uncorruptible();
  const spans::Span pick = options[rng.uniform(options.size())];
  const auto& side_tokens = tokens_of(pair, side);
  CorruptionResult result;
  result.original = gold;
  result.corrupted_side = side;
  result.replacement_span = pick;
  result.replacement_text.assign(side_tokens.begin() + pick.start, side_tokens.begin() + pick.end());
  return result;
}

InstructionRecord render_align(const corpus::SentencePair& pair, const spans::SpanPair& gold,
                               const std::optional<CorruptionResult>& corruption) {
  const Side y = pivot_side(pair), x = other(y);
  const auto& y_tokens = tokens_of(pair, y);
  const auto& x_tokens = tokens_of(pair, x);
  std::string y_span = spans::span_text(y_tokens, span_of(gold, y));
  std::string x_span = spans::span_text(x_tokens, span_of(gold, x));
  if (corruption) {
    const std::string replacement = sentence(corruption->replacement_text);
    const std::string& replaced = corruption->corrupted_side == y ? y_span : x_span;
    if (replacement == replaced) throw DataError("corruption does not change the asserted pair");
    (corruption->corrupted_side == y ? y_span : x_span) = replacement;
  }
  const std::string& y_name = languages::name(lang_of(pair, y));
  const std::string& x_name = languages::name(lang_of(pair, x));
  InstructionRecord r;
  r.id = "align-" + pair_id_str(pair);
  r.task = Task::kAlign;
  r.from = lang_of(pair, y);
  r.to = lang_of(pair, x);
  r.input = "Given the following parallel sentence between " + y_name + " and " + x_name +
            ", judge whether the assertion is True or False.\n" + y_name + ": " + terminated(sentence(y_tokens)) +
            "\n" + x_name + ": " + terminated(sentence(x_tokens)) + "\nAssertion: " + in_quotes(y_span) +
            " can be aligned with " + in_quotes(x_span) + " statistically.";
  r.label = !corruption.has_value();
  r.output = *r.label ? "True" : "False";
  r.meta.pair_id = pair.pair_id;
  r.meta.gold = gold;
  r.meta.corruption = corruption;
  return r;
}

InstructionRecord render_hint(const corpus::SentencePair& pair, const Direction& direction,
                              const std::vector<spans::SpanPair>& span_pairs, std::uint32_t max_hints) {
  if (span_pairs.empty()) throw DataError("no span pairs for hints");
  if (max_hints < 1) throw UsageError("max hints must be >= 1");
  const Side y = from_side(pair, direction), x = other(y);
  const std::string& y_name = languages::name(direction.from);
  const std::string& x_name = languages::name(direction.to);
  const std::size_t used = std::min<std::size_t>(span_pairs.size(), max_hints);
  InstructionRecord r;
  r.id = "hint-" + pair_id_str(pair) + "-" + direction.from + "-" + direction.to;
  r.task = Task::kHint;
  r.from = direction.from;
  r.to = direction.to;
  r.input = "Use the following alignment hints and translate from " + y_name + " to " + x_name +
            ".\nAlignments between " + x_name + " and " + y_name + ":\n";
  for (std::size_t k = 0; k < used; ++k) {
    const auto& sp = span_pairs[k];
    r.input += "– (" + spans::span_text(tokens_of(pair, x), span_of(sp, x)) + ", " +
               spans::span_text(tokens_of(pair, y), span_of(sp, y)) + "),\n";
    r.meta.hints.push_back(sp);
  }
  r.input += y_name + ": " + terminated(sentence(tokens_of(pair, y))) + "\n" + x_name + ": ";
  r.output = terminated(sentence(tokens_of(pair, x)));
  r.meta.pair_id = pair.pair_id;
  return r;
}

InstructionRecord render_revise(const corpus::SentencePair& pair, const spans::SpanPair& gold,
                                const CorruptionResult& corruption) {
  const Side y = pivot_side(pair), x = other(y);
  if (corruption.corrupted_side != x) throw DataError("revise corruption must be on the translated side");
  const auto& x_tokens = tokens_of(pair, x);
  const spans::Span gold_x = span_of(gold, x);
  if (gold_x.end() > x_tokens.size()) throw DataError("span out of bounds");
  const std::string original = spans::span_text(x_tokens, gold_x);
  const std::string corrupted = sentence(corruption.replacement_text);
  if (original == corrupted) throw DataError("corruption equals the original span");

  corpus::Tokens corrupted_sentence(x_tokens.begin(), x_tokens.begin() + gold_x.start);
  corrupted_sentence.insert(corrupted_sentence.end(), corruption.replacement_text.begin(),
                            corruption.replacement_text.end());
  corrupted_sentence.insert(corrupted_sentence.end(), x_tokens.begin() + gold_x.end(), x_tokens.end());

  const std::string& y_name = languages::name(lang_of(pair, y));
  const std::string& x_name = languages::name(lang_of(pair, x));
  InstructionRecord r;
  r.id = "revise-" + pair_id_str(pair);
  r.task = Task::kRevise;
  r.from = lang_of(pair, y);
  r.to = lang_of(pair, x);
  r.input = "Given the following translation of " + x_name + " from " + y_name +
            ", output the incorrectly translated word and correct it.\n" + y_name + ": " +
            terminated(sentence(tokens_of(pair, y))) + "\n" + x_name + ": " + terminated(sentence(corrupted_sentence));
  r.output = "The incorrectly translated word is " + in_quotes(corrupted) + ". It should be " + in_quotes(original) + ".";
  r.meta.pair_id = pair.pair_id;
  r.meta.gold = gold;
  r.meta.corruption = corruption;
  return r;
}

InstructionRecord render_mono(const corpus::Tokens& sentence_tokens, const std::string& lang, MonoVariant variant) {
  const std::size_t n = sentence_tokens.size();
  if (variant == MonoVariant::kHalf && n < 2) throw DataError("MonoInstruct-half needs at least 2 tokens");
  if (n < 1) throw DataError("MonoInstruct needs a nonempty sentence");
  languages::name(lang);
  const std::size_t split = variant == MonoVariant::kHalf ? n / 2 : 0;
  const corpus::Tokens context(sentence_tokens.begin(), sentence_tokens.begin() + static_cast<std::ptrdiff_t>(split));
  const corpus::Tokens rest(sentence_tokens.begin() + static_cast<std::ptrdiff_t>(split), sentence_tokens.end());
  InstructionRecord r;
  r.task = variant == MonoVariant::kHalf ? Task::kMonoHalf : Task::kMonoFull;
  r.id = std::string(task_name(r.task));
  r.from = lang;
  r.input = std::string(kMonoPrompt) + sentence(context);
  r.output = sentence(rest);
  return r;
}

PromptVariant parse_prompt_variant(std::string_view name) {
  for (int i = 0; i < 6; ++i) {
    if (kPromptNames[i] == name || "PROMPT-" + std::string(kPromptNames[i]) == name) return static_cast<PromptVariant>(i);
  }
  throw UsageError("unknown prompt variant '" + std::string(name) + "' (default, 1..5)");
}

std::string_view prompt_variant_name(PromptVariant v) { return kPromptNames[static_cast<int>(v)]; }

std::string render_inference_prompt(const corpus::SentencePair& pair, const Direction& direction,
                                    PromptVariant variant) {
  const Side y = from_side(pair, direction);
  const std::string& y_name = languages::name(direction.from);
  const std::string& x_name = languages::name(direction.to);
  const std::string y_sentence = terminated(sentence(tokens_of(pair, y)));
  const std::string slot = x_name + ": ";
  switch (variant) {
    case PromptVariant::kDefault:
      return "Translate from " + y_name + " to " + x_name + ".\n" + y_name + ": " + y_sentence + "\n" + slot;
    case PromptVariant::k1:
      return y_name + ": " + y_sentence + "\n" + slot;
    case PromptVariant::k2:
      return y_sentence + "\n" + slot;
    case PromptVariant::k3:
      return "Translate to " + x_name + ".\n" + y_name + ": " + y_sentence + "\n" + slot;
    case PromptVariant::k4:
      return "Translate from " + y_name + " to " + x_name + ".\n" + y_sentence + "\n" + slot;
    case PromptVariant::k5:
      return "Translate to " + x_name + ".\n" + y_sentence + "\n" + slot;
  }
  throw UsageError("unknown prompt variant");
}

namespace {

nlohmann::ordered_json span_json(spans::Span s) { return nlohmann::ordered_json::array({s.start, s.length}); }

spans::Span span_from(const nlohmann::json& j) { return {j.at(0).get<std::uint32_t>(), j.at(1).get<std::uint32_t>()}; }

nlohmann::ordered_json span_pair_json(const spans::SpanPair& sp) {
  nlohmann::ordered_json j;
  j["src"] = span_json(sp.src);
  j["tgt"] = span_json(sp.tgt);
  j["links"] = sp.link_count;
  return j;
}

spans::SpanPair span_pair_from(const nlohmann::json& j) {
  return {span_from(j.at("src")), span_from(j.at("tgt")), j.value("links", 1u)};
}

}  // namespace

nlohmann::ordered_json to_json(const InstructionRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["task"] = task_name(r.task);
  j["from"] = r.from;
  j["to"] = r.to ? nlohmann::ordered_json(*r.to) : nlohmann::ordered_json(nullptr);
  j["input"] = r.input;
  j["output"] = r.output;
  j["label"] = r.label ? nlohmann::ordered_json(*r.label) : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json meta;
  meta["pair_id"] = r.meta.pair_id;
  meta["seed"] = r.meta.seed;
  meta["gold"] = r.meta.gold ? span_pair_json(*r.meta.gold) : nlohmann::ordered_json(nullptr);
  if (r.meta.corruption) {
    const auto& c = *r.meta.corruption;
    nlohmann::ordered_json cj;
    cj["side"] = side_name(c.corrupted_side);
    cj["span"] = span_json(c.replacement_span);
    cj["text"] = sentence(c.replacement_text);
    meta["corrupted"] = std::move(cj);
  } else {
    meta["corrupted"] = nullptr;
  }
  if (!r.meta.hints.empty()) {
    nlohmann::ordered_json hints = nlohmann::ordered_json::array();
    for (const auto& h : r.meta.hints) hints.push_back(span_pair_json(h));
    meta["hints"] = std::move(hints);
  }
  for (const auto& [k, v] : r.meta.extra.items()) meta[k] = v;
  j["meta"] = std::move(meta);
  return j;
}

InstructionRecord from_json(const nlohmann::json& j) {
  try {
    InstructionRecord r;
    r.id = j.at("id").get<std::string>();
    r.task = parse_task(j.at("task").get<std::string>());
    r.from = j.at("from").get<std::string>();
    if (!j.at("to").is_null()) r.to = j.at("to").get<std::string>();
    r.input = j.at("input").get<std::string>();
    r.output = j.at("output").get<std::string>();
    if (!j.at("label").is_null()) r.label = j.at("label").get<bool>();
    const auto& meta = j.at("meta");
    r.meta.pair_id = meta.at("pair_id").get<std::uint32_t>();
    r.meta.seed = meta.at("seed").get<std::uint64_t>();
    if (!meta.at("gold").is_null()) r.meta.gold = span_pair_from(meta.at("gold"));
    if (meta.contains("corrupted") && !meta.at("corrupted").is_null()) {
      const auto& c = meta.at("corrupted");
      CorruptionResult cr;
      if (r.meta.gold) cr.original = *r.meta.gold;
      cr.corrupted_side = c.at("side") == "src" ? Side::kSource : Side::kTarget;
      cr.replacement_span = span_from(c.at("span"));
      cr.replacement_text = text::split_whitespace(c.at("text").get<std::string>());
      r.meta.corruption = std::move(cr);
    }
    if (meta.contains("hints"))
      for (const auto& h : meta.at("hints")) r.meta.hints.push_back(span_pair_from(h));
    for (const auto& [k, v] : meta.items()) {
      if (k != "pair_id" && k != "seed" && k != "gold" && k != "corrupted" && k != "hints") r.meta.extra[k] = v;
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed instruction record: ") + e.what());
  }
}

std::string to_jsonl_line(const InstructionRecord& record) { return to_json(record).dump(); }

}  // namespace alignforge::instructions
