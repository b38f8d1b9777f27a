#include "alignforge/aligner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <thread>

#include <json.hpp>

#include "alignforge/error.hpp"

namespace alignforge::aligner {

using corpus::Vocab;

std::string_view direction_name(Direction d) { return d == Direction::kForward ? "forward" : "reverse"; }

void AlignParams::validate() const {
  if (iterations < 1) throw UsageError("iterations must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw UsageError("lambda must be a finite value >= 0");
  if (!(p0 >= 0.0 && p0 < 1.0)) throw UsageError("p0 must lie in [0, 1)");
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ALIGNFORGE_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

void position_prior(std::size_t tgt_pos, std::size_t tgt_len, std::size_t src_len, double lambda, double p0,
                    std::span<double> prior) {
  prior[0] = p0;
  if (src_len == 0) return;
  const double rel_tgt = static_cast<double>(tgt_pos + 1) / static_cast<double>(tgt_len);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < src_len; ++j) {
    const double h = -std::abs(rel_tgt - static_cast<double>(j + 1) / static_cast<double>(src_len));
    prior[j + 1] = h;
    best = std::max(best, h);
  }
  // Shift by the maximum so a huge lambda cannot underflow every weight.
  double z = 0.0;
  for (std::size_t j = 1; j <= src_len; ++j) {
    prior[j] = std::exp(lambda * (prior[j] - best));
    z += prior[j];
  }
  const double scale = (1.0 - p0) / z;
  for (std::size_t j = 1; j <= src_len; ++j) prior[j] *= scale;
}

AlignModel::AlignModel(Vocab source, Vocab target, Direction direction, double lambda, double p0)
    : source_(std::move(source)),
      target_(std::move(target)),
      direction_(direction),
      lambda_(lambda),
      p0_(p0),
      row_begin_(source_.size() + 1, 0) {}

std::span<const AlignModel::Entry> AlignModel::row(std::uint32_t source_id) const {
  if (source_id + 1 >= row_begin_.size()) return {};
  return {entries_.data() + row_begin_[source_id], row_begin_[source_id + 1] - row_begin_[source_id]};
}

double AlignModel::prob(std::uint32_t source_id, std::uint32_t target_id) const {
  auto r = row(source_id);
  auto it = std::lower_bound(r.begin(), r.end(), target_id, [](const Entry& e, std::uint32_t t) { return e.target < t; });
  if (it == r.end() || it->target != target_id) return kProbabilityFloor;
  return it->prob;
}

double AlignModel::prob(const std::string& source, const std::string& target) const {
  const std::uint32_t s = source == Vocab::kNullToken ? Vocab::kNull : source_.find(source);
  const std::uint32_t t = target_.find(target);
  if (s == Vocab::kUnknown || t == Vocab::kUnknown) return kProbabilityFloor;
  return prob(s, t);
}

void AlignModel::set_table(std::vector<std::vector<Entry>> rows) {
  rows.resize(std::max(rows.size(), source_.size()));
  row_begin_.assign(rows.size() + 1, 0);
  entries_.clear();
  for (std::size_t s = 0; s < rows.size(); ++s) {
    row_begin_[s] = entries_.size();
    entries_.insert(entries_.end(), rows[s].begin(), rows[s].end());
  }
  row_begin_[rows.size()] = entries_.size();
}

namespace {

struct EncodedPair {
  std::vector<std::uint32_t> src;  // model source ids
  std::vector<std::uint32_t> tgt;  // model target ids
};

const corpus::Tokens& model_source(const corpus::SentencePair& p, Direction d) {
  return d == Direction::kForward ? p.src_tokens : p.tgt_tokens;
}

const corpus::Tokens& model_target(const corpus::SentencePair& p, Direction d) {
  return d == Direction::kForward ? p.tgt_tokens : p.src_tokens;
}

// Sparse table over co-occurring (source, target) ids in CSR layout.
struct CooccurrenceTable {
  std::vector<std::size_t> row_begin;
  std::vector<std::uint32_t> cols;

  std::size_t index(std::uint32_t s, std::uint32_t t) const {
    auto b = cols.begin() + static_cast<std::ptrdiff_t>(row_begin[s]);
    auto e = cols.begin() + static_cast<std::ptrdiff_t>(row_begin[s + 1]);
    return static_cast<std::size_t>(std::lower_bound(b, e, t) - cols.begin());
  }
};

CooccurrenceTable build_cooccurrence(const std::vector<EncodedPair>& pairs, std::size_t source_size) {
  std::vector<std::vector<std::uint32_t>> rows(source_size);
  std::vector<std::uint32_t> src_unique, tgt_unique;
  for (const auto& p : pairs) {
    src_unique.assign(p.src.begin(), p.src.end());
    src_unique.push_back(Vocab::kNull);
    std::sort(src_unique.begin(), src_unique.end());
    src_unique.erase(std::unique(src_unique.begin(), src_unique.end()), src_unique.end());
    tgt_unique.assign(p.tgt.begin(), p.tgt.end());
    std::sort(tgt_unique.begin(), tgt_unique.end());
    tgt_unique.erase(std::unique(tgt_unique.begin(), tgt_unique.end()), tgt_unique.end());
    for (auto s : src_unique) {
      auto& row = rows[s];
      row.insert(row.end(), tgt_unique.begin(), tgt_unique.end());
      if (row.size() > 4096) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
      }
    }
  }
  CooccurrenceTable table;
  table.row_begin.assign(source_size + 1, 0);
  for (std::size_t s = 0; s < source_size; ++s) {
    auto& row = rows[s];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    table.row_begin[s] = table.cols.size();
    table.cols.insert(table.cols.end(), row.begin(), row.end());
    std::vector<std::uint32_t>().swap(row);
  }
  table.row_begin[source_size] = table.cols.size();
  return table;
}

struct WorkerResult {
  std::vector<double> counts;
  double log_likelihood = 0.0;
};

// Expected counts and log-likelihood for pairs [begin, end).
void e_step(const std::vector<EncodedPair>& pairs, std::size_t begin, std::size_t end, const CooccurrenceTable& table,
            const std::vector<double>& probs, double lambda, double p0, WorkerResult& out) {
  std::vector<double> prior, post;
  std::vector<std::size_t> idx;
  for (std::size_t k = begin; k < end; ++k) {
    const auto& p = pairs[k];
    const std::size_t n = p.src.size(), m = p.tgt.size();
    prior.resize(n + 1);
    post.resize(n + 1);
    idx.resize(n + 1);
    for (std::size_t i = 0; i < m; ++i) {
      position_prior(i, m, n, lambda, p0, prior);
      const std::uint32_t t = p.tgt[i];
      double z = 0.0;
      for (std::size_t j = 0; j <= n; ++j) {
        const std::uint32_t s = j == 0 ? Vocab::kNull : p.src[j - 1];
        idx[j] = table.index(s, t);
        post[j] = prior[j] * probs[idx[j]];
        z += post[j];
      }
      if (!(z > 0.0)) {
        out.log_likelihood += std::log(kProbabilityFloor);
        continue;
      }
      out.log_likelihood += std::log(z);
      for (std::size_t j = 0; j <= n; ++j) out.counts[idx[j]] += post[j] / z;
    }
  }
}

}  // namespace

AlignModel train_model(const corpus::Corpus& corpus, Direction direction, const AlignParams& params) {
  params.validate();
  if (corpus.empty()) throw DataError("cannot train an alignment model on an empty corpus");

  Vocab source(true), target(false);
  std::vector<EncodedPair> pairs;
  pairs.reserve(corpus.size());
  for (const auto& p : corpus.pairs) {
    EncodedPair e;
    for (const auto& tok : model_source(p, direction)) e.src.push_back(source.add(tok));
    for (const auto& tok : model_target(p, direction)) e.tgt.push_back(target.add(tok));
    if (e.src.empty() || e.tgt.empty()) throw DataError("pair " + std::to_string(p.pair_id) + " has an empty side");
    pairs.push_back(std::move(e));
  }

  const CooccurrenceTable table = build_cooccurrence(pairs, source.size());
  const std::size_t nnz = table.cols.size();
  std::vector<double> probs(nnz, 1.0 / static_cast<double>(target.size()));

  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::size_t>(resolve_threads(params.threads), 1, pairs.size()));
  std::vector<WorkerResult> results(workers);
  std::vector<double> history;

  for (unsigned iter = 0; iter < params.iterations; ++iter) {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) {
      results[w].counts.assign(nnz, 0.0);
      results[w].log_likelihood = 0.0;
      const std::size_t begin = pairs.size() * w / workers;
      const std::size_t end = pairs.size() * (w + 1) / workers;
      auto job = [&, w, begin, end] {
        e_step(pairs, begin, end, table, probs, params.lambda, params.p0, results[w]);
      };
      if (workers == 1) {
        job();
      } else {
        threads.emplace_back(job);
      }
    }
    for (auto& t : threads) t.join();

    // Pairwise merge in worker order.
    for (unsigned step = 1; step < workers; step *= 2) {
      for (unsigned w = 0; w + step < workers; w += 2 * step) {
        auto& dst = results[w];
        const auto& src = results[w + step];
        for (std::size_t k = 0; k < nnz; ++k) dst.counts[k] += src.counts[k];
        dst.log_likelihood += src.log_likelihood;
      }
    }
    history.push_back(results[0].log_likelihood);

    const auto& counts = results[0].counts;
    for (std::size_t s = 0; s < source.size(); ++s) {
      double total = 0.0;
      for (std::size_t k = table.row_begin[s]; k < table.row_begin[s + 1]; ++k) total += counts[k];
      for (std::size_t k = table.row_begin[s]; k < table.row_begin[s + 1]; ++k) {
        probs[k] = total > 0.0 ? counts[k] / total : 0.0;
      }
    }
  }

  std::vector<std::vector<AlignModel::Entry>> rows(source.size());
  for (std::size_t s = 0; s < source.size(); ++s) {
    for (std::size_t k = table.row_begin[s]; k < table.row_begin[s + 1]; ++k) {
      if (probs[k] > 0.0) rows[s].push_back({table.cols[k], probs[k]});
    }
  }

  AlignModel model(std::move(source), std::move(target), direction, params.lambda, params.p0);
  model.set_table(std::move(rows));
  model.seed = params.seed;
  model.iterations = params.iterations;
  history.push_back(log_likelihood(model, corpus));
  model.set_log_likelihood_history(std::move(history));
  return model;
}

double log_likelihood(const AlignModel& model, const corpus::Corpus& corpus) {
  double total = 0.0;
  std::vector<double> prior;
  std::vector<std::uint32_t> src_ids;
  for (const auto& p : corpus.pairs) {
    const auto& src = model_source(p, model.direction());
    const auto& tgt = model_target(p, model.direction());
    const std::size_t n = src.size(), m = tgt.size();
    src_ids.resize(n);
    for (std::size_t j = 0; j < n; ++j) src_ids[j] = model.source_vocab().find(src[j]);
    prior.resize(n + 1);
    for (std::size_t i = 0; i < m; ++i) {
      position_prior(i, m, n, model.lambda(), model.p0(), prior);
      const std::uint32_t t = model.target_vocab().find(tgt[i]);
      auto lookup = [&](std::uint32_t s) {
        return (s == Vocab::kUnknown || t == Vocab::kUnknown) ? kProbabilityFloor : model.prob(s, t);
      };
      double z = prior[0] * lookup(Vocab::kNull);
      for (std::size_t j = 0; j < n; ++j) z += prior[j + 1] * lookup(src_ids[j]);
      total += std::log(std::max(z, std::numeric_limits<double>::min()));
    }
  }
  return total;
}

links::AlignmentLinks viterbi_align(const AlignModel& model, const corpus::SentencePair& pair) {
  const auto& src = model_source(pair, model.direction());
  const auto& tgt = model_target(pair, model.direction());
  if (src.empty() || tgt.empty()) throw DataError("cannot align pair " + std::to_string(pair.pair_id) + ": empty sentence");
  const std::size_t n = src.size(), m = tgt.size();
  std::vector<std::uint32_t> src_ids(n);
  for (std::size_t j = 0; j < n; ++j) src_ids[j] = model.source_vocab().find(src[j]);
  std::vector<double> prior(n + 1);
  std::vector<links::Link> out;
  for (std::size_t i = 0; i < m; ++i) {
    position_prior(i, m, n, model.lambda(), model.p0(), prior);
    const std::uint32_t t = model.target_vocab().find(tgt[i]);
    auto lookup = [&](std::uint32_t s) {
      return (s == Vocab::kUnknown || t == Vocab::kUnknown) ? kProbabilityFloor : model.prob(s, t);
    };
    double best = prior[0] * lookup(Vocab::kNull);
    std::size_t best_j = 0;
    for (std::size_t j = 1; j <= n; ++j) {
      const double score = prior[j] * lookup(src_ids[j - 1]);
      if (score > best) {
        best = score;
        best_j = j;
      }
    }
    if (best_j == 0) continue;
    const auto a = static_cast<std::uint32_t>(best_j - 1), b = static_cast<std::uint32_t>(i);
    out.push_back(model.direction() == Direction::kForward ? links::Link{a, b} : links::Link{b, a});
  }
  return links::AlignmentLinks(std::move(out));
}

BidirectionalModel train_bidirectional(const corpus::Corpus& corpus, const AlignParams& params) {
  return {train_model(corpus, Direction::kForward, params), train_model(corpus, Direction::kReverse, params)};
}

std::vector<links::AlignmentLinks> align_corpus(const BidirectionalModel& models, const corpus::Corpus& corpus,
                                                links::Heuristic heuristic) {
  std::vector<links::AlignmentLinks> out;
  out.reserve(corpus.size());
  for (const auto& p : corpus.pairs) {
    out.push_back(links::symmetrize(viterbi_align(models.forward, p), viterbi_align(models.reverse, p), heuristic));
  }
  return out;
}

namespace {
constexpr const char* kModelFormat = "alignforge-ibm2";
constexpr int kModelVersion = 1;
}  // namespace

void save_model(const AlignModel& model, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["direction"] = direction_name(model.direction());
  j["lambda"] = model.lambda();
  j["p0"] = model.p0();
  j["iterations"] = model.iterations;
  j["seed"] = model.seed;
  j["log_likelihood"] = model.log_likelihood_history();
  nlohmann::ordered_json src_vocab = nlohmann::ordered_json::array();
  for (std::size_t i = 1; i < model.source_vocab().size(); ++i) src_vocab.push_back(model.source_vocab().token(static_cast<std::uint32_t>(i)));
  j["source_vocab"] = std::move(src_vocab);
  j["target_vocab"] = model.target_vocab().tokens();
  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < model.source_vocab().size(); ++s) {
    auto r = model.row(static_cast<std::uint32_t>(s));
    if (r.empty()) continue;
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& e : r) entries.push_back({e.target, e.prob});
    table.push_back({s, std::move(entries)});
  }
  j["ttable"] = std::move(table);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump() << '\n';
}

AlignModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    if (j.at("format") != kModelFormat) throw DataError(path.string() + ": not an alignment model");
    if (j.at("version").get<int>() != kModelVersion) throw DataError(path.string() + ": unsupported model version");
    Vocab source(true), target(false);
    for (const auto& t : j.at("source_vocab")) source.add(t.get<std::string>());
    for (const auto& t : j.at("target_vocab")) target.add(t.get<std::string>());
    const Direction d = j.at("direction") == "forward" ? Direction::kForward : Direction::kReverse;
    AlignModel model(std::move(source), std::move(target), d, j.at("lambda").get<double>(), j.at("p0").get<double>());
    std::vector<std::vector<AlignModel::Entry>> rows(model.source_vocab().size());
    for (const auto& row : j.at("ttable")) {
      const auto s = row.at(0).get<std::size_t>();
      if (s >= rows.size()) throw DataError(path.string() + ": source id out of range");
      for (const auto& e : row.at(1)) rows[s].push_back({e.at(0).get<std::uint32_t>(), e.at(1).get<double>()});
    }
    model.set_table(std::move(rows));
    model.iterations = j.value("iterations", 0u);
    model.seed = j.value("seed", std::uint64_t{0});
    model.set_log_likelihood_history(j.value("log_likelihood", std::vector<double>{}));
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace alignforge::aligner
