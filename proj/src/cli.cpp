#include "alignforge/cli.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "alignforge/aligner.hpp"
#include "alignforge/analysis.hpp"
#include "alignforge/corpus.hpp"
#include "alignforge/curriculum.hpp"
#include "alignforge/dataset.hpp"
#include "alignforge/error.hpp"
#include "alignforge/languages.hpp"
#include "alignforge/links.hpp"
#include "alignforge/metrics.hpp"
#include "alignforge/span_pairs.hpp"
#include "alignforge/text.hpp"

namespace alignforge::cli {

namespace {

using json = nlohmann::ordered_json;

struct Options {
  std::string src, tgt, tsv;
  std::string from_lang, to_lang;
  std::uint64_t seed = 0;
  unsigned iterations = 5;
  double lambda = 4.0;
  double p0 = 0.08;
  std::string sym = "gdfa";
  std::string alignments;
  std::string save_model;
  std::string tasks = "mt,align";
  std::vector<std::string> ratios;
  std::string curriculum = "mt-align";
  std::uint32_t s_max = instructions::kDefaultMaxHints;
  std::uint32_t max_span = spans::kWordLevelMax;
  std::vector<std::string> data;
  std::size_t shard_size = 0;
  std::string metric = "bleu";
  std::size_t resamples = 1000;
  std::string hyp, ref, hyp_a, hyp_b;
  std::string after, before;
  std::string out;
};

/// Options of one subcommand in registration order, for the resolved config.
using Getter = std::function<json()>;
using Registry = std::vector<std::pair<std::string, Getter>>;

template <typename T>
CLI::Option* add(CLI::App* app, Registry& reg, const std::string& flag, T& var, const std::string& help) {
  auto* opt = app->add_option(flag, var, help);
  opt->capture_default_str();
  std::string key = flag.substr(2);
  if (key != "out") reg.emplace_back(key, [&var] { return json(var); });
  return opt;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : path_(path) {
    if (path.empty()) {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw DataError("cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }

  /// For formats that cannot carry metadata: "<out>.run.json" next to it.
  void sidecar(const json& run, const json& config) const {
    if (path_.empty()) return;
    std::ofstream side(path_ + ".run.json", std::ios::binary);
    if (!side) throw DataError("cannot write " + path_ + ".run.json");
    json j;
    j["run"] = run;
    j["config"] = config;
    side << j.dump(2) << '\n';
  }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

corpus::Corpus load_corpus(const Options& o) {
  if (o.from_lang.empty() || o.to_lang.empty()) throw UsageError("--from-lang and --to-lang are required");
  if (!o.tsv.empty()) return corpus::load_tsv(o.tsv, o.from_lang, o.to_lang);
  if (o.src.empty() || o.tgt.empty()) throw UsageError("give --src and --tgt, or --tsv");
  return corpus::load_parallel(o.src, o.tgt, o.from_lang, o.to_lang);
}

aligner::AlignParams align_params(const Options& o) {
  aligner::AlignParams p;
  p.iterations = o.iterations;
  p.lambda = o.lambda;
  p.p0 = o.p0;
  p.seed = o.seed;
  p.validate();
  return p;
}

std::vector<links::AlignmentLinks> corpus_links(const Options& o, const corpus::Corpus& c, std::ostream& err) {
  if (!o.alignments.empty()) {
    auto l = links::read_pharaoh(o.alignments);
    if (l.size() != c.size()) {
      throw DataError(o.alignments + " has " + std::to_string(l.size()) + " lines, corpus has " +
                      std::to_string(c.size()) + " pairs");
    }
    return l;
  }
  err << "no --alignments given; training the aligner\n";
  const auto models = aligner::train_bidirectional(c, align_params(o));
  return aligner::align_corpus(models, c, links::parse_heuristic(o.sym));
}

spans::SpanLimits span_limits(const Options& o) {
  if (o.max_span == 0) throw UsageError("--max-span must be >= 1");
  return {o.max_span, o.max_span};
}

int cmd_stats(const Options& o, const json& run, std::ostream& out) {
  const auto c = load_corpus(o);
  const auto s = corpus::corpus_stats(c);
  json j;
  j["lang"] = s.lang();
  j["pairs"] = s.pairs;
  j["src_tokens"] = s.src_tokens;
  j["tgt_tokens"] = s.tgt_tokens;
  j["dropped"] = s.dropped;
  j["mean_src_length"] = s.mean_src_length;
  j["mean_tgt_length"] = s.mean_tgt_length;
  j["run"] = run;
  Output dst(o.out, out);
  dst.stream() << j.dump(2) << '\n';
  return 0;
}

int cmd_align(const Options& o, const json& run, const json& config, std::ostream& out, std::ostream& err) {
  const auto heuristic = links::parse_heuristic(o.sym);
  const auto c = load_corpus(o);
  const auto models = aligner::train_bidirectional(c, align_params(o));
  const auto all = aligner::align_corpus(models, c, heuristic);
  for (const auto* m : {&models.forward, &models.reverse}) {
    err << aligner::direction_name(m->direction()) << " log-likelihood:";
    for (double ll : m->log_likelihood_history()) err << ' ' << ll;
    err << '\n';
  }
  if (!o.save_model.empty()) {
    aligner::save_model(models.forward, o.save_model + ".fwd.json");
    aligner::save_model(models.reverse, o.save_model + ".rev.json");
  }
  Output dst(o.out, out);
  links::write_pharaoh(dst.stream(), all);
  dst.sidecar(run, config);
  return 0;
}

int cmd_pairs(const Options& o, const json& run, std::ostream& out, std::ostream& err) {
  const auto c = load_corpus(o);
  const auto all = corpus_links(o, c, err);
  const auto limits = span_limits(o);
  Output dst(o.out, out);
  for (std::size_t k = 0; k < c.size(); ++k) {
    const auto& pair = c.pairs[k];
    all[k].check_bounds(pair.src_tokens.size(), pair.tgt_tokens.size());
    for (const auto& sp : spans::extract_span_pairs(pair, all[k], limits)) {
      json j;
      j["pair_id"] = pair.pair_id;
      j["src_span"] = {sp.src.start, sp.src.length};
      j["tgt_span"] = {sp.tgt.start, sp.tgt.length};
      j["src_text"] = spans::span_text(pair.src_tokens, sp.src);
      j["tgt_text"] = spans::span_text(pair.tgt_tokens, sp.tgt);
      j["links"] = sp.link_count;
      j["run"] = run;
      dst.stream() << j.dump() << '\n';
    }
  }
  return 0;
}

int cmd_gen(const Options& o, const json& run, std::ostream& out, std::ostream& err) {
  dataset::GenConfig g;
  g.tasks.clear();
  for (const auto& t : split_list(o.tasks)) g.tasks.push_back(instructions::parse_task(t));
  if (g.tasks.empty()) throw UsageError("--tasks is empty");
  for (const auto& r : o.ratios) {
    const auto eq = r.find('=');
    if (eq == std::string::npos) throw UsageError("--ratio expects task=fraction, got '" + r + "'");
    double v = 0.0;
    try {
      v = std::stod(r.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("bad fraction in --ratio '" + r + "'");
    }
    if (!(v >= 0.0 && v <= 1.0)) throw UsageError("--ratio fraction must lie in [0, 1]");
    g.ratios[instructions::parse_task(r.substr(0, eq))] = v;
  }
  if (o.s_max == 0) throw UsageError("--s-max must be >= 1");
  g.max_hints = o.s_max;
  g.limits = span_limits(o);
  g.seed = o.seed;
  g.provenance = run;
  // Fail on unknown language codes before any training.
  languages::name(o.from_lang);
  languages::name(o.to_lang);

  const auto c = load_corpus(o);
  const auto all = corpus_links(o, c, err);
  Output dst(o.out, out);
  auto& stream = dst.stream();
  const auto stats =
      dataset::generate_dataset(c, all, g, [&](const auto& r) { stream << instructions::to_jsonl_line(r) << '\n'; });
  err << "gen: " << dataset::stats_json(stats).dump() << '\n';
  return 0;
}

int cmd_schedule(const Options& o, const json& run, std::ostream& err) {
  if (o.data.empty()) throw UsageError("--data is required");
  if (o.out.empty()) throw UsageError("--out (output directory) is required");
  std::vector<instructions::InstructionRecord> records;
  for (const auto& path : o.data) {
    auto part = dataset::read_jsonl(path);
    records.insert(records.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  const auto kind = curriculum::parse_kind(o.curriculum);
  const auto manifest = curriculum::build_curriculum(curriculum::group_by_task(std::move(records)), kind, o.seed);
  const auto info = curriculum::write_manifest(manifest, o.out, o.shard_size, run);
  for (const auto& s : info.stages) err << "stage " << s.name << ": " << s.records << " records\n";
  return 0;
}

int cmd_eval(const Options& o, const json& run, std::ostream& out) {
  if (o.hyp.empty() || o.ref.empty()) throw UsageError("--hyp and --ref are required");
  const auto hyps = read_lines(o.hyp), refs = read_lines(o.ref);
  metrics::MetricReport report;
  if (metrics::parse_metric(o.metric) == metrics::Metric::kBleu) {
    std::vector<metrics::TokenSeq> h, r;
    for (const auto& s : hyps) h.push_back(text::split_whitespace(s));
    for (const auto& s : refs) r.push_back(text::split_whitespace(s));
    report = metrics::bleu(h, r);
  } else {
    report = metrics::chrfpp(hyps, refs);
  }
  auto j = metrics::to_json(report);
  j["run"] = run;
  Output dst(o.out, out);
  dst.stream() << j.dump(2) << '\n';
  return 0;
}

int cmd_sigtest(const Options& o, const json& run, std::ostream& out) {
  if (o.hyp_a.empty() || o.hyp_b.empty() || o.ref.empty()) throw UsageError("--hyp-a, --hyp-b and --ref are required");
  const auto result = metrics::paired_bootstrap(read_lines(o.hyp_a), read_lines(o.hyp_b), read_lines(o.ref),
                                                metrics::parse_metric(o.metric), o.resamples, o.seed);
  auto j = metrics::to_json(result);
  j["run"] = run;
  Output dst(o.out, out);
  dst.stream() << j.dump(2) << '\n';
  return 0;
}

int cmd_analyze(const Options& o, const json& run, const json& config, std::ostream& out, std::ostream& err) {
  const bool profile_mode = !o.src.empty() || !o.tgt.empty();
  const bool delta_mode = !o.after.empty() || !o.before.empty();
  if (profile_mode == delta_mode) {
    throw UsageError("analyze takes either --src/--tgt dumps or --after/--before profiles");
  }
  analysis::LayerProfile profile;
  std::string column = "similarity";
  if (profile_mode) {
    if (o.src.empty() || o.tgt.empty()) throw UsageError("--src and --tgt dumps are both required");
    const auto result = analysis::layer_alignment_profile(analysis::read_dump(o.src), analysis::read_dump(o.tgt));
    if (result.zero_vectors > 0) {
      err << "warning: " << result.zero_vectors << " zero vectors counted as similarity 0\n";
    }
    profile = result.profile;
  } else {
    if (o.after.empty() || o.before.empty()) throw UsageError("--after and --before are both required");
    profile = analysis::profile_delta(analysis::read_profile_csv(o.after), analysis::read_profile_csv(o.before));
    column = "delta";
  }
  Output dst(o.out, out);
  analysis::write_profile_csv(dst.stream(), profile, column);
  dst.sidecar(run, config);
  return 0;
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::ordered_json provenance(const nlohmann::ordered_json& resolved_config, std::uint64_t seed) {
  json j;
  j["version"] = kVersion;
  j["config_hash"] = fnv1a_hex(resolved_config.dump());
  j["seed"] = seed;
  return j;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Alignment-enhanced instruction data toolkit", args.empty() ? "alignforge" : args.front()};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  app.require_subcommand(1);
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::map<CLI::App*, Registry> registry;

  auto corpus_opts = [&](CLI::App* sub, Registry& reg) {
    add(sub, reg, "--src", o.src, "source-side text file");
    add(sub, reg, "--tgt", o.tgt, "target-side text file");
    add(sub, reg, "--tsv", o.tsv, "tab-separated source/target file instead of --src/--tgt");
    add(sub, reg, "--from-lang", o.from_lang, "source language code (ISO 639-1)");
    add(sub, reg, "--to-lang", o.to_lang, "target language code (ISO 639-1)");
  };
  auto aligner_opts = [&](CLI::App* sub, Registry& reg) {
    add(sub, reg, "--iterations", o.iterations, "EM iterations");
    add(sub, reg, "--lambda", o.lambda, "diagonal tension");
    add(sub, reg, "--p0", o.p0, "NULL alignment probability");
    add(sub, reg, "--sym", o.sym, "symmetrization: intersect, union, gdfa")
        ->check(CLI::IsMember({"intersect", "intersection", "union", "gdfa", "grow-diag-final-and"}));
  };
  auto seed_opt = [&](CLI::App* sub, Registry& reg) { add(sub, reg, "--seed", o.seed, "random seed"); };

  auto* stats = app.add_subcommand("stats", "corpus statistics");
  corpus_opts(stats, registry[stats]);
  add(stats, registry[stats], "--out", o.out, "output JSON (default stdout)");

  auto* align = app.add_subcommand("align", "train the aligner and write Pharaoh alignments");
  corpus_opts(align, registry[align]);
  aligner_opts(align, registry[align]);
  seed_opt(align, registry[align]);
  add(align, registry[align], "--save-model", o.save_model, "write models to PREFIX.fwd.json / PREFIX.rev.json");
  add(align, registry[align], "--out", o.out, "Pharaoh output (default stdout)");

  auto* pairs = app.add_subcommand("pairs", "extract consistent span pairs");
  corpus_opts(pairs, registry[pairs]);
  aligner_opts(pairs, registry[pairs]);
  seed_opt(pairs, registry[pairs]);
  add(pairs, registry[pairs], "--alignments", o.alignments, "Pharaoh alignments (trained if omitted)");
  add(pairs, registry[pairs], "--max-span", o.max_span, "maximum span length on either side");
  add(pairs, registry[pairs], "--out", o.out, "JSONL output (default stdout)");

  auto* gen = app.add_subcommand("gen", "generate instruction records");
  corpus_opts(gen, registry[gen]);
  aligner_opts(gen, registry[gen]);
  seed_opt(gen, registry[gen]);
  add(gen, registry[gen], "--alignments", o.alignments, "Pharaoh alignments (trained if omitted)");
  add(gen, registry[gen], "--tasks", o.tasks, "comma-separated: mt, align, hint, revise, mono_full, mono_half");
  add(gen, registry[gen], "--ratio", o.ratios, "task=fraction of pairs used for that task (repeatable)");
  add(gen, registry[gen], "--s-max", o.s_max, "maximum hints per HintInstruct record");
  add(gen, registry[gen], "--max-span", o.max_span, "maximum span length on either side");
  add(gen, registry[gen], "--out", o.out, "JSONL output (default stdout)");

  auto* schedule = app.add_subcommand("schedule", "arrange datasets into curriculum stages");
  seed_opt(schedule, registry[schedule]);
  add(schedule, registry[schedule], "--data", o.data, "instruction JSONL files (repeatable)");
  add(schedule, registry[schedule], "--curriculum", o.curriculum, "mt-align, align-then-mt, mt-align-then-mt, joint")
      ->check(CLI::IsMember({"mt-align", "mt+align", "align-then-mt", "mt-align-then-mt", "joint"}));
  add(schedule, registry[schedule], "--shard-size", o.shard_size, "records per shard (0 = one shard per stage)");
  add(schedule, registry[schedule], "--out", o.out, "output directory");

  auto* eval = app.add_subcommand("eval", "score a hypothesis file");
  add(eval, registry[eval], "--hyp", o.hyp, "hypothesis file, one segment per line");
  add(eval, registry[eval], "--ref", o.ref, "reference file, one segment per line");
  add(eval, registry[eval], "--metric", o.metric, "bleu or chrfpp")->check(CLI::IsMember({"bleu", "chrfpp", "chrf++"}));
  add(eval, registry[eval], "--out", o.out, "output JSON (default stdout)");

  auto* sigtest = app.add_subcommand("sigtest", "paired bootstrap test between two systems");
  seed_opt(sigtest, registry[sigtest]);
  add(sigtest, registry[sigtest], "--hyp-a", o.hyp_a, "system A output");
  add(sigtest, registry[sigtest], "--hyp-b", o.hyp_b, "system B output");
  add(sigtest, registry[sigtest], "--ref", o.ref, "reference file");
  add(sigtest, registry[sigtest], "--metric", o.metric, "bleu or chrfpp")
      ->check(CLI::IsMember({"bleu", "chrfpp", "chrf++"}));
  add(sigtest, registry[sigtest], "--resamples", o.resamples, "bootstrap resamples (>= 100)");
  add(sigtest, registry[sigtest], "--out", o.out, "output JSON (default stdout)");

  auto* analyze = app.add_subcommand("analyze", "layer-wise cosine similarity profiles");
  add(analyze, registry[analyze], "--src", o.src, "embedding dump of the source sentences");
  add(analyze, registry[analyze], "--tgt", o.tgt, "embedding dump of the target sentences");
  add(analyze, registry[analyze], "--after", o.after, "profile CSV after a change");
  add(analyze, registry[analyze], "--before", o.before, "profile CSV before a change");
  add(analyze, registry[analyze], "--out", o.out, "CSV output (default stdout)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("alignforge");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  json config;
  config["command"] = sub->get_name();
  for (const auto& [key, get] : registry[sub]) config[key] = get();
  const json run_info = provenance(config, o.seed);
  err << "config: " << config.dump() << '\n';

  try {
    const std::string name = sub->get_name();
    if (name == "stats") return cmd_stats(o, run_info, out);
    if (name == "align") return cmd_align(o, run_info, config, out, err);
    if (name == "pairs") return cmd_pairs(o, run_info, out, err);
    if (name == "gen") return cmd_gen(o, run_info, out, err);
    if (name == "schedule") return cmd_schedule(o, run_info, err);
    if (name == "eval") return cmd_eval(o, run_info, out);
    if (name == "sigtest") return cmd_sigtest(o, run_info, out);
    if (name == "analyze") return cmd_analyze(o, run_info, config, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

int run(const std::vector<std::string>& args) { return run(args, std::cout, std::cerr); }

}  // namespace alignforge::cli
