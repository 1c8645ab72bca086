#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "medtag/common.hpp"
#include "medtag/corpus.hpp"
#include "medtag/prng.hpp"
#include "medtag/text.hpp"

namespace medtag {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct FeatureConfig {
  int text_dim = 64;  // 768 when ingesting precomputed transformer embeddings
  int speaker_dim = 8;
  int position_dim = 4;
  int position_bins = 4;  // k
  int semantic_dim = 8;

  int feature_dim() const { return text_dim + speaker_dim + position_dim + semantic_dim; }
  int text_offset() const { return 0; }
  int speaker_offset() const { return text_dim; }
  int position_offset() const { return text_dim + speaker_dim; }
  int semantic_offset() const { return text_dim + speaker_dim + position_dim; }

  void validate() const {
    if (text_dim < 1 || speaker_dim < 1 || position_dim < 1 || semantic_dim < 1 ||
        position_bins < 1) {
      throw UsageError("feature dims and position bins must all be >= 1");
    }
  }
};

struct EmbeddingTable {
  Mat weights;  // rows x dim
  bool trainable = true;

  int rows() const { return static_cast<int>(weights.rows()); }
  int dim() const { return static_cast<int>(weights.cols()); }

  static EmbeddingTable init(int rows, int dim, Rng& rng) {
    EmbeddingTable t;
    t.weights = Mat(rows, dim);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < dim; ++c) t.weights(r, c) = rng.uniform(-0.1, 0.1);
    }
    return t;
  }

  Vec lookup(int row) const {
    if (row < 0 || row >= rows()) {
      throw DataError("embedding lookup out of range: " + std::to_string(row) + " of " +
                      std::to_string(rows()));
    }
    return weights.row(row).transpose();
  }
};

// Conversation partitioned into k equal parts by utterance position:
// bin = floor(k * index / n), clamped to k-1.
inline int position_bin(int index, int n, int k) {
  if (k < 1) throw UsageError("position_bin: k must be >= 1");
  if (index < 0 || index >= n) {
    throw DataError("position_bin: index " + std::to_string(index) + " outside conversation of " +
                    std::to_string(n));
  }
  const long long bin = static_cast<long long>(k) * index / n;
  return static_cast<int>(std::min<long long>(bin, k - 1));
}

// Mean of the semantic-type embeddings of the mentions present in an
// utterance; no mentions gives the zero vector.
inline Vec semantic_type_vector(const std::vector<int>& mentions, const EmbeddingTable& table) {
  Vec v = Vec::Zero(table.dim());
  if (mentions.empty()) return v;
  for (int id : mentions) v += table.lookup(id);
  return v / static_cast<double>(mentions.size());
}

// ---------------------------------------------------------------------------
// Text encoders. The trained-transformer encoder staging is out of process:
// either the deterministic hashed encoder below or embeddings precomputed
// elsewhere and ingested as non-learnable features.
// ---------------------------------------------------------------------------

class TextEncoder {
 public:
  virtual ~TextEncoder() = default;
  virtual int dim() const = 0;
  virtual Vec encode(const std::string& conv_id, int utt_index, const std::string& text) const = 0;
};

class HashedTextEncoder final : public TextEncoder {
 public:
  explicit HashedTextEncoder(int dim) : dim_(dim) {
    if (dim < 1) throw UsageError("hashed encoder dim must be >= 1");
  }
  int dim() const override { return dim_; }
  Vec encode(const std::string&, int, const std::string& text) const override {
    const auto v = encode_text_hashed(text, dim_);
    return Eigen::Map<const Vec>(v.data(), dim_);
  }

 private:
  int dim_;
};

// TSV with header "conv_id\tutt_idx\td0..d{D-1}", one row per utterance.
class PrecomputedEmbeddings final : public TextEncoder {
 public:
  using Key = std::pair<std::string, int>;

  static PrecomputedEmbeddings load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open embeddings file: " + path);
    PrecomputedEmbeddings emb;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (line_no == 1 && line.rfind("conv_id\t", 0) == 0) continue;
      std::istringstream row(line);
      std::string conv_id, idx_str;
      if (!std::getline(row, conv_id, '\t') || !std::getline(row, idx_str, '\t')) {
        throw DataError(path + ":" + std::to_string(line_no) + ": expected conv_id and utt_idx");
      }
      int idx = 0;
      try {
        idx = std::stoi(idx_str);
      } catch (const std::exception&) {
        throw DataError(path + ":" + std::to_string(line_no) + ": utt_idx is not an integer");
      }
      std::vector<double> values;
      std::string cell;
      while (std::getline(row, cell, '\t')) {
        try {
          values.push_back(std::stod(cell));
        } catch (const std::exception&) {
          throw DataError(path + ":" + std::to_string(line_no) + ": non-numeric value '" + cell + "'");
        }
      }
      if (values.empty()) {
        throw DataError(path + ":" + std::to_string(line_no) + ": row has no embedding values");
      }
      if (emb.dim_ == 0) {
        emb.dim_ = static_cast<int>(values.size());
      } else if (static_cast<int>(values.size()) != emb.dim_) {
        throw DataError(path + ":" + std::to_string(line_no) + ": dimension mismatch (" +
                        std::to_string(values.size()) + " vs " + std::to_string(emb.dim_) + ")");
      }
      emb.vectors_[{conv_id, idx}] = Eigen::Map<const Vec>(values.data(), emb.dim_);
    }
    if (emb.vectors_.empty()) throw DataError(path + ": no embeddings found");
    return emb;
  }

  // Every utterance of the corpus must be covered; reports the first gap.
  void validate_coverage(const std::vector<Conversation>& convs) const {
    for (const auto& conv : convs) {
      for (const auto& u : conv.utterances) {
        if (!vectors_.count({conv.id, u.index})) {
          throw DataError("embeddings missing for (" + conv.id + ", " +
                          std::to_string(u.index) + ")");
        }
      }
    }
  }

  int dim() const override { return dim_; }
  Vec encode(const std::string& conv_id, int utt_index, const std::string&) const override {
    auto it = vectors_.find({conv_id, utt_index});
    if (it == vectors_.end()) {
      throw DataError("embeddings missing for (" + conv_id + ", " + std::to_string(utt_index) + ")");
    }
    return it->second;
  }

  size_t size() const { return vectors_.size(); }

 private:
  std::map<Key, Vec> vectors_;
  int dim_ = 0;
};

// ---------------------------------------------------------------------------
// Feature bundles
// ---------------------------------------------------------------------------

struct FeatureTables {
  EmbeddingTable speaker;   // 3 x speaker_dim
  EmbeddingTable position;  // k x position_dim
  EmbeddingTable semantic;  // semantic type rows x semantic_dim
};

// Concatenated per-utterance representation with fixed segment order
// text / speaker / position / semantic.
struct FeatureBundle {
  Vec vector;
  int text_offset = 0, speaker_offset = 0, position_offset = 0, semantic_offset = 0;
};

// The per-utterance inputs that do not change during training.
struct UtteranceInputs {
  Vec text;                   // from the text encoder
  int speaker = 0;            // role index
  int position_bin = 0;       // bin within the full conversation
  std::vector<int> mentions;  // semantic type ids from the concept matcher
};

inline Vec assemble_feature(const UtteranceInputs& u, const FeatureConfig& cfg,
                            const FeatureTables& tables, bool no_context) {
  Vec v = Vec::Zero(cfg.feature_dim());
  v.segment(cfg.text_offset(), cfg.text_dim) = u.text;
  if (!no_context) {
    v.segment(cfg.speaker_offset(), cfg.speaker_dim) = tables.speaker.lookup(u.speaker);
    v.segment(cfg.position_offset(), cfg.position_dim) = tables.position.lookup(u.position_bin);
    v.segment(cfg.semantic_offset(), cfg.semantic_dim) =
        semantic_type_vector(u.mentions, tables.semantic);
  }
  return v;
}

inline std::vector<FeatureBundle> build_features(
    const Conversation& conv, const FeatureConfig& cfg, const FeatureTables& tables,
    const TextEncoder& encoder, const std::vector<std::vector<int>>& mentions,
    bool no_context = false) {
  cfg.validate();
  if (encoder.dim() != cfg.text_dim) {
    throw DataError("text encoder dim " + std::to_string(encoder.dim()) +
                    " does not match text_dim " + std::to_string(cfg.text_dim));
  }
  if (mentions.size() != conv.utterances.size()) {
    throw DataError("mention lists do not cover conversation " + conv.id);
  }
  const int n = static_cast<int>(conv.utterances.size());
  std::vector<FeatureBundle> bundles;
  bundles.reserve(conv.utterances.size());
  for (const auto& utt : conv.utterances) {
    UtteranceInputs u;
    u.text = encoder.encode(conv.id, utt.index, utt.text);
    u.speaker = static_cast<int>(utt.speaker);
    u.position_bin = position_bin(utt.index, n, cfg.position_bins);
    u.mentions = mentions[static_cast<size_t>(utt.index)];
    FeatureBundle b;
    b.vector = assemble_feature(u, cfg, tables, no_context);
    b.text_offset = cfg.text_offset();
    b.speaker_offset = cfg.speaker_offset();
    b.position_offset = cfg.position_offset();
    b.semantic_offset = cfg.semantic_offset();
    bundles.push_back(std::move(b));
  }
  return bundles;
}

}  // namespace medtag
