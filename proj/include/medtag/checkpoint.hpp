#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "medtag/common.hpp"
#include "medtag/nn.hpp"

namespace medtag {

// Model checkpoint: little-endian binary, magic "MSBL1", then named blocks of
// (u32 name length, name bytes, u32 rank, u64 dims..., float64 data). Matrix
// data is stored row-major. Scalars are rank 0. Metadata (dims, beta,
// ablations) travels as "meta.*" scalar blocks.
constexpr char kCheckpointMagic[5] = {'M', 'S', 'B', 'L', '1'};

namespace ckpt_detail {

inline void write_u32(std::ostream& out, uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline void write_u64(std::ostream& out, uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline void write_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

inline void write_block(std::ostream& out, const std::string& name,
                        const std::vector<size_t>& dims, const double* data) {
  write_u32(out, static_cast<uint32_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  write_u32(out, static_cast<uint32_t>(dims.size()));
  size_t total = 1;
  for (size_t d : dims) {
    write_u64(out, static_cast<uint64_t>(d));
    total *= d;
  }
  if (dims.size() == 2) {
    // Column-major in memory, row-major on disk.
    const size_t rows = dims[0], cols = dims[1];
    for (size_t r = 0; r < rows; ++r) {
      for (size_t c = 0; c < cols; ++c) write_f64(out, data[c * rows + r]);
    }
  } else {
    for (size_t i = 0; i < total; ++i) write_f64(out, data[i]);
  }
}

struct RawBlock {
  std::vector<size_t> dims;
  std::vector<double> data;  // row-major for rank 2
};

inline std::map<std::string, RawBlock> read_blocks(std::istream& in, const std::string& path) {
  char magic[5];
  in.read(magic, 5);
  if (in.gcount() != 5 || std::memcmp(magic, kCheckpointMagic, 5) != 0) {
    throw DataError(path + ": not a model checkpoint (bad magic)");
  }
  std::map<std::string, RawBlock> blocks;
  while (true) {
    uint32_t name_len = 0;
    in.read(reinterpret_cast<char*>(&name_len), sizeof(name_len));
    if (in.gcount() == 0) break;  // clean EOF
    if (in.gcount() != sizeof(name_len) || name_len > 4096) {
      throw DataError(path + ": truncated or corrupt block header");
    }
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    uint32_t rank = 0;
    in.read(reinterpret_cast<char*>(&rank), sizeof(rank));
    if (!in || rank > 8) throw DataError(path + ": corrupt block '" + name + "'");
    RawBlock block;
    size_t total = 1;
    for (uint32_t i = 0; i < rank; ++i) {
      uint64_t d = 0;
      in.read(reinterpret_cast<char*>(&d), sizeof(d));
      if (!in) throw DataError(path + ": corrupt dims in block '" + name + "'");
      block.dims.push_back(static_cast<size_t>(d));
      total *= static_cast<size_t>(d);
    }
    block.data.resize(total);
    in.read(reinterpret_cast<char*>(block.data.data()),
            static_cast<std::streamsize>(total * sizeof(double)));
    if (static_cast<size_t>(in.gcount()) != total * sizeof(double)) {
      throw DataError(path + ": truncated data in block '" + name + "'");
    }
    if (!blocks.emplace(std::move(name), std::move(block)).second) {
      throw DataError(path + ": duplicate block");
    }
  }
  return blocks;
}

}  // namespace ckpt_detail

inline void save_model(Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(kCheckpointMagic, 5);
  auto scalar = [&](const std::string& name, double v) {
    ckpt_detail::write_block(out, name, {}, &v);
  };
  scalar("meta.format_version", 1.0);
  scalar("meta.text_dim", model.feat.text_dim);
  scalar("meta.speaker_dim", model.feat.speaker_dim);
  scalar("meta.position_dim", model.feat.position_dim);
  scalar("meta.position_bins", model.feat.position_bins);
  scalar("meta.semantic_dim", model.feat.semantic_dim);
  scalar("meta.semantic_rows", model.semantic_rows);
  scalar("meta.hidden_dim", model.hidden_dim);
  scalar("meta.beta", model.beta);
  scalar("meta.no_hierarchy", model.ablation.no_hierarchy ? 1.0 : 0.0);
  scalar("meta.plain_bilstm", model.ablation.plain_bilstm ? 1.0 : 0.0);
  scalar("meta.no_context", model.ablation.no_context ? 1.0 : 0.0);
  for (const auto& block : param_blocks(model)) {
    ckpt_detail::write_block(out, block.name, block.dims, block.data);
  }
  if (!out) throw DataError("failed while writing checkpoint: " + path);
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  auto blocks = ckpt_detail::read_blocks(in, path);

  auto meta = [&](const std::string& key) -> double {
    auto it = blocks.find("meta." + key);
    if (it == blocks.end()) throw DataError(path + ": missing meta." + key);
    if (!it->second.dims.empty() || it->second.data.size() != 1) {
      throw DataError(path + ": meta." + key + " is not a scalar");
    }
    const double v = it->second.data[0];
    blocks.erase(it);
    return v;
  };
  if (static_cast<int>(meta("format_version")) != 1) {
    throw DataError(path + ": unsupported checkpoint version");
  }
  FeatureConfig feat;
  feat.text_dim = static_cast<int>(meta("text_dim"));
  feat.speaker_dim = static_cast<int>(meta("speaker_dim"));
  feat.position_dim = static_cast<int>(meta("position_dim"));
  feat.position_bins = static_cast<int>(meta("position_bins"));
  feat.semantic_dim = static_cast<int>(meta("semantic_dim"));
  const int semantic_rows = static_cast<int>(meta("semantic_rows"));
  const int hidden = static_cast<int>(meta("hidden_dim"));
  const double beta = meta("beta");
  Ablations ablation;
  ablation.no_hierarchy = meta("no_hierarchy") != 0.0;
  ablation.plain_bilstm = meta("plain_bilstm") != 0.0;
  ablation.no_context = meta("no_context") != 0.0;

  Model model = make_model(feat, hidden, semantic_rows, beta, ablation, /*seed=*/0);
  for (auto& block : param_blocks(model)) {
    auto it = blocks.find(block.name);
    if (it == blocks.end()) throw DataError(path + ": missing parameter block '" + block.name + "'");
    const auto& raw = it->second;
    if (raw.dims != block.dims) {
      throw DataError(path + ": shape mismatch for block '" + block.name + "'");
    }
    if (raw.dims.size() == 2) {
      const size_t rows = raw.dims[0], cols = raw.dims[1];
      for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < cols; ++c) block.data[c * rows + r] = raw.data[r * cols + c];
      }
    } else {
      std::memcpy(block.data, raw.data.data(), raw.data.size() * sizeof(double));
    }
    blocks.erase(it);
  }
  if (!blocks.empty()) {
    throw DataError(path + ": unknown parameter block '" + blocks.begin()->first + "'");
  }
  return model;
}

}  // namespace medtag
