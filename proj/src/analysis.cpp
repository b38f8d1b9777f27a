#include "alignforge/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "alignforge/error.hpp"

namespace alignforge::analysis {

namespace {

std::string id_string(const nlohmann::json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Vector pool_tokens(const std::vector<Vector>& token_vectors) {
  if (token_vectors.empty()) throw DataError("cannot pool an empty token sequence");
  Vector out(token_vectors.front().size(), 0.0);
  for (const auto& v : token_vectors) {
    if (v.size() != out.size()) throw DataError("token vectors differ in dimension");
    for (std::size_t k = 0; k < v.size(); ++k) out[k] += v[k];
  }
  for (auto& x : out) x /= static_cast<double>(token_vectors.size());
  return out;
}

EmbeddingDump read_dump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  EmbeddingDump dump;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) -> DataError {
    return DataError(path.string() + ":" + std::to_string(line_no) + ": " + msg);
  };

  std::unordered_map<std::string, std::size_t> index;
  // Running token sums per (layer, sentence) for token-level dumps.
  std::vector<std::vector<std::size_t>> counts;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      if (dump.layers == 0 && index.empty() && dump.ids.empty()) {
        dump.model = j.value("model", std::string());
        dump.layers = j.at("L").get<std::size_t>();
        dump.dim = j.at("d").get<std::size_t>();
        dump.pooled = j.at("pooled").get<bool>();
        if (dump.layers == 0 || dump.dim == 0) throw fail("L and d must be positive");
        for (const auto& id : j.at("ids")) {
          const auto s = id_string(id);
          if (!index.emplace(s, dump.ids.size()).second) throw fail("duplicate id " + s);
          dump.ids.push_back(s);
        }
        if (dump.ids.empty()) throw fail("dump lists no sentence ids");
        dump.embeddings.assign(dump.layers, std::vector<Vector>(dump.ids.size(), Vector(dump.dim, 0.0)));
        counts.assign(dump.layers, std::vector<std::size_t>(dump.ids.size(), 0));
        continue;
      }
      const auto id = id_string(j.at("id"));
      const auto it = index.find(id);
      if (it == index.end()) throw fail("unknown id " + id);
      const auto layer = j.at("layer").get<std::size_t>();
      if (layer >= dump.layers) throw fail("layer " + std::to_string(layer) + " out of range");
      const auto values = j.at("values").get<Vector>();
      if (values.size() != dump.dim) {
        throw fail("expected " + std::to_string(dump.dim) + " values, got " + std::to_string(values.size()));
      }
      auto& cell = dump.embeddings[layer][it->second];
      auto& n = counts[layer][it->second];
      if (dump.pooled && n > 0) throw fail("duplicate row for pooled id " + id);
      for (std::size_t k = 0; k < values.size(); ++k) cell[k] += values[k];
      ++n;
    }
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  }
  if (dump.ids.empty()) throw DataError(path.string() + ": missing header");

  for (std::size_t l = 0; l < dump.layers; ++l) {
    for (std::size_t s = 0; s < dump.ids.size(); ++s) {
      const auto n = counts[l][s];
      if (n == 0) {
        throw DataError(path.string() + ": no vector for id " + dump.ids[s] + " at layer " + std::to_string(l));
      }
      for (auto& x : dump.embeddings[l][s]) x /= static_cast<double>(n);
    }
  }
  return dump;
}

void write_dump(std::ostream& out, const EmbeddingDump& dump) {
  nlohmann::ordered_json header;
  header["model"] = dump.model;
  header["L"] = dump.layers;
  header["d"] = dump.dim;
  header["pooled"] = true;
  header["ids"] = dump.ids;
  out << header.dump() << '\n';
  for (std::size_t s = 0; s < dump.ids.size(); ++s) {
    for (std::size_t l = 0; l < dump.layers; ++l) {
      nlohmann::ordered_json row;
      row["id"] = dump.ids[s];
      row["layer"] = l;
      row["values"] = dump.embeddings[l][s];
      out << row.dump() << '\n';
    }
  }
}

double cosine(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DataError("cosine of vectors with different dimensions");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

ProfileResult layer_alignment_profile(const EmbeddingDump& src, const EmbeddingDump& tgt) {
  if (src.layers != tgt.layers) {
    throw DataError("layer count mismatch: " + std::to_string(src.layers) + " vs " + std::to_string(tgt.layers));
  }
  if (src.dim != tgt.dim) {
    throw DataError("dimension mismatch: " + std::to_string(src.dim) + " vs " + std::to_string(tgt.dim));
  }
  if (src.ids.size() != tgt.ids.size()) throw DataError("dumps hold different numbers of sentences");
  if (src.ids.empty()) throw DataError("empty dump");
  std::unordered_map<std::string, std::size_t> tgt_index;
  for (std::size_t k = 0; k < tgt.ids.size(); ++k) tgt_index.emplace(tgt.ids[k], k);

  std::vector<std::size_t> match(src.ids.size());
  for (std::size_t k = 0; k < src.ids.size(); ++k) {
    const auto it = tgt_index.find(src.ids[k]);
    if (it == tgt_index.end()) throw DataError("id " + src.ids[k] + " missing from target dump");
    match[k] = it->second;
  }

  ProfileResult result;
  result.profile.assign(src.layers, 0.0);
  for (std::size_t l = 0; l < src.layers; ++l) {
    double sum = 0.0;
    for (std::size_t k = 0; k < src.ids.size(); ++k) {
      const auto& a = src.embeddings[l][k];
      const auto& b = tgt.embeddings[l][match[k]];
      const bool zero = std::all_of(a.begin(), a.end(), [](double x) { return x == 0.0; }) ||
                        std::all_of(b.begin(), b.end(), [](double x) { return x == 0.0; });
      if (zero) ++result.zero_vectors;
      sum += cosine(a, b);
    }
    result.profile[l] = sum / static_cast<double>(src.ids.size());
  }
  return result;
}

LayerProfile profile_delta(const LayerProfile& after, const LayerProfile& before) {
  if (after.size() != before.size()) {
    throw DataError("profile length mismatch: " + std::to_string(after.size()) + " vs " +
                    std::to_string(before.size()));
  }
  LayerProfile out(after.size());
  for (std::size_t l = 0; l < after.size(); ++l) out[l] = after[l] - before[l];
  return out;
}

void write_profile_csv(std::ostream& out, const LayerProfile& profile, const std::string& column) {
  out << "layer," << column << '\n';
  for (std::size_t l = 0; l < profile.size(); ++l) out << l << ',' << fmt(profile[l]) << '\n';
}

LayerProfile read_profile_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  LayerProfile out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 || line.empty()) continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("missing comma");
      std::size_t used = 0;
      const auto layer = std::stoul(line.substr(0, comma), &used);
      if (layer != out.size()) throw std::invalid_argument("layers must be listed in order from 0");
      const auto rest = line.substr(comma + 1);
      const double v = std::stod(rest, &used);
      if (used != rest.size()) throw std::invalid_argument("trailing characters");
      out.push_back(v);
    } catch (const std::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (out.empty()) throw DataError(path.string() + ": empty profile");
  return out;
}

}  // namespace alignforge::analysis
