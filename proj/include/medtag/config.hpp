#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "medtag/common.hpp"
#include "medtag/extract.hpp"
#include "medtag/features.hpp"
#include "medtag/generator.hpp"
#include "medtag/train.hpp"

namespace medtag {

// Every run-time setting, with its documented default. Populated from a flat
// "key = value" config file with [section] headers; command-line flags
// override file values, which override the defaults.
struct RunConfig {
  GeneratorProfile generator;
  FeatureConfig features;
  TrainConfig train;
  std::string embeddings_path;  // precomputed text embeddings TSV; empty = hashed encoder
  std::string dictionary_path;  // concept dictionary TSV; empty = builtin
  double jaccard_min = kDefaultJaccardMin;
  bool mr_union = false;  // MR filtering by max fine probability instead of the coarse head
};

namespace config_detail {

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  size_t e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

inline double to_double(const std::string& v, const std::string& where) {
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw UsageError(where + ": expected a number, got '" + v + "'");
  }
}

inline int to_int(const std::string& v, const std::string& where) {
  try {
    size_t used = 0;
    const long n = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<int>(n);
  } catch (const std::exception&) {
    throw UsageError(where + ": expected an integer, got '" + v + "'");
  }
}

inline bool to_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError(where + ": expected true/false, got '" + v + "'");
}

inline bool apply_key(RunConfig& cfg, const std::string& section, const std::string& key,
                      const std::string& value, const std::string& where) {
  auto d = [&]() { return to_double(value, where); };
  auto i = [&]() { return to_int(value, where); };
  auto b = [&]() { return to_bool(value, where); };
  GeneratorProfile& g = cfg.generator;
  if (section == "generator") {
    if (key == "mean_utterances") g.mean_utterances = i();
    else if (key == "length_spread") g.length_spread = d();
    else if (key == "frac_sym") g.fraction[0] = d();
    else if (key == "frac_com") g.fraction[1] = d();
    else if (key == "frac_med") g.fraction[2] = d();
    else if (key == "pos_sym") g.first_position[0] = d();
    else if (key == "pos_com") g.first_position[1] = d();
    else if (key == "pos_med") g.first_position[2] = d();
    else if (key == "pos_spread_sym") g.first_position_spread[0] = d();
    else if (key == "pos_spread_com") g.first_position_spread[1] = d();
    else if (key == "pos_spread_med") g.first_position_spread[2] = d();
    else if (key == "decoy_fraction") g.decoy_fraction = d();
    else if (key == "relevance_marker_prob") g.relevance_marker_prob = d();
    else if (key == "sym_dr") g.speaker_skew[0][0] = d();
    else if (key == "sym_pt") g.speaker_skew[0][1] = d();
    else if (key == "com_dr") g.speaker_skew[1][0] = d();
    else if (key == "com_pt") g.speaker_skew[1][1] = d();
    else if (key == "med_dr") g.speaker_skew[2][0] = d();
    else if (key == "med_pt") g.speaker_skew[2][1] = d();
    else if (key == "irrelevant_dr") g.irrelevant_speaker_skew[0] = d();
    else if (key == "irrelevant_pt") g.irrelevant_speaker_skew[1] = d();
    else return false;
    return true;
  }
  if (section == "features") {
    if (key == "text_dim") cfg.features.text_dim = i();
    else if (key == "speaker_dim") cfg.features.speaker_dim = i();
    else if (key == "position_dim") cfg.features.position_dim = i();
    else if (key == "position_bins") cfg.features.position_bins = i();
    else if (key == "semantic_dim") cfg.features.semantic_dim = i();
    else if (key == "embeddings") cfg.embeddings_path = value;
    else return false;
    return true;
  }
  if (section == "train") {
    if (key == "learning_rate") cfg.train.learning_rate = d();
    else if (key == "batch_size") cfg.train.batch_size = i();
    else if (key == "window_len") cfg.train.window_len = i();
    else if (key == "beta") cfg.train.beta = d();
    else if (key == "hidden_dim") cfg.train.hidden_dim = i();
    else if (key == "max_epochs") cfg.train.max_epochs = i();
    else if (key == "patience") cfg.train.patience = i();
    else if (key == "seed") cfg.train.seed = static_cast<uint64_t>(to_int(value, where));
    else if (key == "clip_norm") cfg.train.clip_norm = d();
    else if (key == "threads") cfg.train.threads = i();
    else return false;
    return true;
  }
  if (section == "extract") {
    if (key == "jaccard_min") cfg.jaccard_min = d();
    else if (key == "mr_union") cfg.mr_union = b();
    else if (key == "dictionary") cfg.dictionary_path = value;
    else return false;
    return true;
  }
  return false;
}

}  // namespace config_detail

inline void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::string section;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    std::string s = config_detail::trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw UsageError(where + ": malformed section header");
      section = config_detail::trim(s.substr(1, s.size() - 2));
      if (section != "generator" && section != "features" && section != "train" &&
          section != "extract") {
        throw UsageError(where + ": unknown section [" + section + "]");
      }
      continue;
    }
    const size_t eq = s.find('=');
    if (eq == std::string::npos) throw UsageError(where + ": expected 'key = value'");
    const std::string key = config_detail::trim(s.substr(0, eq));
    const std::string value = config_detail::trim(s.substr(eq + 1));
    if (section.empty()) throw UsageError(where + ": key '" + key + "' outside any [section]");
    if (!config_detail::apply_key(cfg, section, key, value, where)) {
      throw UsageError(where + ": unknown key '" + key + "' in section [" + section + "]");
    }
  }
}

inline RunConfig load_run_config(const std::string& path) {
  RunConfig cfg;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str(), path);
  return cfg;
}

}  // namespace medtag
