#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace alignforge::analysis {

using Vector = std::vector<double>;

/// Arithmetic mean per dimension. Throws DataError on empty input or
/// mismatched dimensions.
Vector pool_tokens(const std::vector<Vector>& token_vectors);

/// Per-layer sentence embeddings for a set of sentences. Token-level dumps
/// are mean-pooled when read, so `embeddings[layer][k]` always holds the
/// sentence vector of `ids[k]`.
struct EmbeddingDump {
  std::string model;
  std::size_t layers = 0;
  std::size_t dim = 0;
  /// Whether the file carried pre-pooled sentence vectors.
  bool pooled = true;
  std::vector<std::string> ids;
  std::vector<std::vector<Vector>> embeddings;
};

/// JSONL dump: header {"model","L","d","pooled","ids"} then one row
/// {"id","layer","values"} per sentence and layer (per token for token-level
/// dumps). Throws DataError on shape errors.
EmbeddingDump read_dump(const std::filesystem::path& path);
void write_dump(std::ostream& out, const EmbeddingDump& dump);

/// Cosine similarity, 0 when either vector is zero.
double cosine(const Vector& a, const Vector& b);

using LayerProfile = std::vector<double>;

struct ProfileResult {
  LayerProfile profile;
  /// (sentence, layer) cells where a zero vector forced similarity 0.
  std::size_t zero_vectors = 0;
};

/// Per layer, the mean over sentence ids of cos(src, tgt). Ids are matched by
/// name; the sum runs in `src.ids` order.
ProfileResult layer_alignment_profile(const EmbeddingDump& src, const EmbeddingDump& tgt);

/// Elementwise after - before.
LayerProfile profile_delta(const LayerProfile& after, const LayerProfile& before);

/// "layer,<column>" header then one row per layer.
void write_profile_csv(std::ostream& out, const LayerProfile& profile, const std::string& column = "similarity");
/// Reads the second column of a profile CSV; rows must list layers 0..L-1.
LayerProfile read_profile_csv(const std::filesystem::path& path);

}  // namespace alignforge::analysis
