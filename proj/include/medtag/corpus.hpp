#pragma once

#include <array>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "medtag/common.hpp"
#include "medtag/dictionary.hpp"
#include "medtag/prng.hpp"

namespace medtag {

enum class SpeakerRole : int { Doctor = 0, Patient = 1, Other = 2 };
constexpr int kSpeakerRoleCount = 3;
constexpr std::array<const char*, 3> kSpeakerCodes = {"DR", "PT", "OT"};

inline const char* speaker_code(SpeakerRole r) { return kSpeakerCodes[static_cast<int>(r)]; }

inline SpeakerRole parse_speaker(std::string_view code) {
  for (int i = 0; i < kSpeakerRoleCount; ++i) {
    if (code == kSpeakerCodes[i]) return static_cast<SpeakerRole>(i);
  }
  throw DataError("unknown speaker code: " + std::string(code));
}

// Independent per-task booleans; all false means medically irrelevant.
struct FineLabelSet {
  std::array<bool, 3> flags{false, false, false};  // indexed by Task

  bool get(Task t) const { return flags[static_cast<int>(t)]; }
  void set(Task t, bool v = true) { flags[static_cast<int>(t)] = v; }
  bool any() const { return flags[0] || flags[1] || flags[2]; }
  bool operator==(const FineLabelSet&) const = default;
};

struct Utterance {
  int index = 0;  // 0-based position within the conversation
  SpeakerRole speaker = SpeakerRole::Doctor;
  std::string text;
  FineLabelSet labels;

  bool operator==(const Utterance&) const = default;
};

struct Conversation {
  std::string id;
  std::vector<Utterance> utterances;
  // Conversation-level extraction gold: one label set per task.
  std::array<std::set<std::string>, 3> gold_extraction;

  bool operator==(const Conversation&) const = default;
};

// ---------------------------------------------------------------------------
// JSONL corpus format, one conversation per line:
//   {"id":..., "utterances":[{"idx":..,"speaker":"DR|PT|OT","text":..,
//    "labels":["SYM"|"COM"|"MED"]}], "gold_extraction":{"SYM":[..],"COM":[..],"MED":[..]}}
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json conversation_to_json(const Conversation& conv) {
  nlohmann::ordered_json j;
  j["id"] = conv.id;
  auto& utts = j["utterances"] = nlohmann::ordered_json::array();
  for (const auto& u : conv.utterances) {
    nlohmann::ordered_json ju;
    ju["idx"] = u.index;
    ju["speaker"] = speaker_code(u.speaker);
    ju["text"] = u.text;
    auto& labels = ju["labels"] = nlohmann::ordered_json::array();
    for (Task t : kAllTasks) {
      if (u.labels.get(t)) labels.push_back(task_name(t));
    }
    utts.push_back(std::move(ju));
  }
  auto& gold = j["gold_extraction"] = nlohmann::ordered_json::object();
  for (Task t : kAllTasks) {
    auto& arr = gold[task_name(t)] = nlohmann::ordered_json::array();
    for (const auto& label : conv.gold_extraction[static_cast<int>(t)]) arr.push_back(label);
  }
  return j;
}

inline Conversation conversation_from_json(const nlohmann::json& j, size_t line_no,
                                           const ExtractionLabelMap& map) {
  auto fail = [&](const std::string& msg) -> DataError {
    return DataError("line " + std::to_string(line_no) + ": " + msg);
  };
  Conversation conv;
  if (!j.is_object() || !j.contains("id") || !j.contains("utterances")) {
    throw fail("conversation record must be an object with 'id' and 'utterances'");
  }
  conv.id = j.at("id").get<std::string>();
  const auto& utts = j.at("utterances");
  if (!utts.is_array() || utts.empty()) {
    throw fail("conversation '" + conv.id + "' must have at least one utterance");
  }
  int expected_idx = 0;
  for (const auto& ju : utts) {
    Utterance u;
    u.index = ju.at("idx").get<int>();
    if (u.index != expected_idx) {
      throw fail("conversation '" + conv.id + "': utterance indices must be 0..n-1 without gaps (got " +
                 std::to_string(u.index) + ", expected " + std::to_string(expected_idx) + ")");
    }
    ++expected_idx;
    u.speaker = parse_speaker(ju.at("speaker").get<std::string>());
    u.text = ju.at("text").get<std::string>();
    if (ju.contains("labels")) {
      for (const auto& jl : ju.at("labels")) {
        u.labels.set(parse_task(jl.get<std::string>()));
      }
    }
    conv.utterances.push_back(std::move(u));
  }
  if (j.contains("gold_extraction")) {
    for (Task t : kAllTasks) {
      const char* name = task_name(t);
      if (!j.at("gold_extraction").contains(name)) continue;
      for (const auto& jl : j.at("gold_extraction").at(name)) {
        std::string label = jl.get<std::string>();
        if (!map.contains(t, label)) {
          throw fail("conversation '" + conv.id + "': gold " + name + " label '" + label +
                     "' is not in the label vocabulary");
        }
        conv.gold_extraction[static_cast<int>(t)].insert(std::move(label));
      }
    }
  }
  return conv;
}

inline std::vector<Conversation> parse_corpus_text(std::string_view text,
                                                   const ExtractionLabelMap& map =
                                                       ExtractionLabelMap::builtin()) {
  std::vector<Conversation> convs;
  std::istringstream in{std::string(text)};
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    try {
      convs.push_back(conversation_from_json(j, line_no, map));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return convs;
}

inline std::vector<Conversation> parse_corpus(const std::string& path,
                                              const ExtractionLabelMap& map =
                                                  ExtractionLabelMap::builtin()) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_corpus_text(ss.str(), map);
  } catch (DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline std::string corpus_to_text(const std::vector<Conversation>& convs) {
  std::string out;
  for (const auto& conv : convs) {
    out += conversation_to_json(conv).dump();
    out += '\n';
  }
  return out;
}

inline void write_corpus(const std::vector<Conversation>& convs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file: " + path);
  out << corpus_to_text(convs);
  if (!out) throw DataError("failed while writing corpus file: " + path);
}

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

struct CorpusSplit {
  std::vector<Conversation> train, val, test;
};

// Deterministic disjoint partition: shuffle indices with the seeded generator,
// take n_val for validation, n_test for test, rest for training.
inline CorpusSplit split_corpus(const std::vector<Conversation>& convs, size_t n_val,
                                size_t n_test, uint64_t seed) {
  if (n_val + n_test > convs.size()) {
    throw DataError("split sizes exceed corpus size: " + std::to_string(n_val) + " + " +
                    std::to_string(n_test) + " > " + std::to_string(convs.size()));
  }
  std::vector<size_t> order(convs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  for (size_t i = order.size(); i > 1; --i) {  // Fisher-Yates
    size_t j = static_cast<size_t>(rng.next_below(i));
    std::swap(order[i - 1], order[j]);
  }
  CorpusSplit split;
  for (size_t i = 0; i < order.size(); ++i) {
    const Conversation& c = convs[order[i]];
    if (i < n_val) {
      split.val.push_back(c);
    } else if (i < n_val + n_test) {
      split.test.push_back(c);
    } else {
      split.train.push_back(c);
    }
  }
  return split;
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

struct CorpusStats {
  size_t conversation_count = 0;
  size_t utterance_count = 0;
  int min_utterances = 0;
  double mean_utterances = 0.0;
  int max_utterances = 0;
  // Per task: mean per-conversation count of labeled utterances, mean fraction
  // of the conversation they make up, and the mean relative position of the
  // first mention (0-based index / conversation length, averaged over
  // conversations that contain the category).
  std::array<double, 3> mean_count{};
  std::array<double, 3> mean_fraction{};
  std::array<double, 3> mean_first_position{};
  std::array<size_t, 3> conversations_with{};
};

inline CorpusStats compute_stats(const std::vector<Conversation>& convs) {
  if (convs.empty()) throw DataError("compute_stats: empty conversation list");
  CorpusStats s;
  s.conversation_count = convs.size();
  s.min_utterances = static_cast<int>(convs.front().utterances.size());
  std::array<double, 3> pos_sum{};
  for (const auto& conv : convs) {
    const int n = static_cast<int>(conv.utterances.size());
    s.utterance_count += static_cast<size_t>(n);
    s.min_utterances = std::min(s.min_utterances, n);
    s.max_utterances = std::max(s.max_utterances, n);
    for (Task t : kAllTasks) {
      const int ti = static_cast<int>(t);
      int count = 0;
      int first = -1;
      for (const auto& u : conv.utterances) {
        if (u.labels.get(t)) {
          ++count;
          if (first < 0) first = u.index;
        }
      }
      s.mean_count[ti] += count;
      s.mean_fraction[ti] += static_cast<double>(count) / n;
      if (first >= 0) {
        ++s.conversations_with[ti];
        pos_sum[ti] += static_cast<double>(first) / n;
      }
    }
  }
  s.mean_utterances = static_cast<double>(s.utterance_count) / static_cast<double>(convs.size());
  for (int ti = 0; ti < 3; ++ti) {
    s.mean_count[ti] /= static_cast<double>(convs.size());
    s.mean_fraction[ti] /= static_cast<double>(convs.size());
    s.mean_first_position[ti] =
        s.conversations_with[ti] ? pos_sum[ti] / static_cast<double>(s.conversations_with[ti]) : 0.0;
  }
  return s;
}

// CSV export with header "metric,value".
inline std::string stats_to_csv(const CorpusStats& s) {
  std::string out = "metric,value\n";
  auto row = [&out](const std::string& name, double v) {
    out += name;
    out += ',';
    out += format_float(v);
    out += '\n';
  };
  row("conversation_count", static_cast<double>(s.conversation_count));
  row("utterance_count", static_cast<double>(s.utterance_count));
  row("min_utterances", s.min_utterances);
  row("mean_utterances", s.mean_utterances);
  row("max_utterances", s.max_utterances);
  for (Task t : kAllTasks) {
    const int ti = static_cast<int>(t);
    const std::string name = task_name(t);
    row("mean_count_" + name, s.mean_count[ti]);
    row("mean_fraction_" + name, s.mean_fraction[ti]);
    row("mean_first_position_" + name, s.mean_first_position[ti]);
    row("conversations_with_" + name, static_cast<double>(s.conversations_with[ti]));
  }
  return out;
}

}  // namespace medtag
