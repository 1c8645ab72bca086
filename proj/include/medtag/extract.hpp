#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "medtag/common.hpp"
#include "medtag/corpus.hpp"
#include "medtag/dictionary.hpp"
#include "medtag/eval.hpp"
#include "medtag/text.hpp"

namespace medtag {

constexpr double kDefaultJaccardMin = 0.7;

struct ConceptMention {
  std::string conversation_id;
  int utterance_index = 0;
  int token_begin = 0;  // [token_begin, token_end) within the utterance
  int token_end = 0;
  std::string matched_surface;  // normalized text of the matched window
  int entry_id = -1;
  std::string concept_id;
  int semantic_type = 0;
  Task task = Task::Sym;
  // Exact normalized-token-sequence equality with the dictionary surface.
  // Only exact mentions count as extraction predictions; the similarity value
  // for non-exact candidate matches is the token-set Jaccard.
  bool exact = false;
  double similarity = 0.0;
};

namespace detail {

inline double token_set_jaccard(const std::vector<std::string>& a_sorted_unique,
                                const std::vector<std::string>& b_sorted_unique) {
  size_t i = 0, j = 0, common = 0;
  while (i < a_sorted_unique.size() && j < b_sorted_unique.size()) {
    const int cmp = a_sorted_unique[i].compare(b_sorted_unique[j]);
    if (cmp == 0) {
      ++common;
      ++i;
      ++j;
    } else if (cmp < 0) {
      ++i;
    } else {
      ++j;
    }
  }
  const size_t uni = a_sorted_unique.size() + b_sorted_unique.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

inline std::vector<std::string> sorted_unique(std::vector<std::string> tokens) {
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  return tokens;
}

}  // namespace detail

// Sliding-window dictionary matcher. Windows of 1..max_surface_tokens tokens
// are candidate matches when the token-set Jaccard with a dictionary surface
// reaches jaccard_min; a match is exact when the normalized token sequences
// are equal. Overlapping spans are resolved longest-span-first, then leftmost;
// distinct concepts matching the same kept span are all reported.
inline std::vector<ConceptMention> match_concepts(const std::string& text,
                                                  const ConceptDictionary& dict,
                                                  double jaccard_min = kDefaultJaccardMin) {
  const auto tokens = tokenize(text);
  const int n = static_cast<int>(tokens.size());
  const int max_len = std::min(dict.max_surface_tokens(), n);

  struct Candidate {
    int begin, end;
    int entry_id;
    bool exact;
    double similarity;
  };
  std::vector<Candidate> candidates;

  std::vector<std::string> window;
  for (int len = 1; len <= max_len; ++len) {
    for (int begin = 0; begin + len <= n; ++begin) {
      window.assign(tokens.begin() + begin, tokens.begin() + begin + len);
      const auto window_set = detail::sorted_unique(window);
      // Entries sharing at least one token with the window.
      std::vector<int> ids;
      for (const auto& tok : window_set) {
        if (const auto* hits = dict.entries_with_token(tok)) {
          ids.insert(ids.end(), hits->begin(), hits->end());
        }
      }
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      for (int id : ids) {
        const DictEntry& e = dict.entries()[static_cast<size_t>(id)];
        const double jac =
            detail::token_set_jaccard(window_set, detail::sorted_unique(e.surface_tokens));
        if (jac < jaccard_min) continue;
        const bool exact = std::equal(window.begin(), window.end(), e.surface_tokens.begin(),
                                      e.surface_tokens.end());
        candidates.push_back({begin, begin + len, id, exact, exact ? 1.0 : jac});
      }
    }
  }

  // Longest-span-first, then leftmost; identical spans are kept together.
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    const int alen = a.end - a.begin, blen = b.end - b.begin;
    if (alen != blen) return alen > blen;
    if (a.begin != b.begin) return a.begin < b.begin;
    return a.entry_id < b.entry_id;
  });
  std::vector<std::pair<int, int>> kept_spans;
  std::vector<Candidate> kept;
  for (const auto& c : candidates) {
    bool ok = true;
    for (const auto& [b, e] : kept_spans) {
      if (b == c.begin && e == c.end) break;                  // same span, keep alongside
      if (c.begin < e && b < c.end) { ok = false; break; }    // overlap with a longer/earlier span
    }
    if (!ok) continue;
    if (kept_spans.empty() || kept_spans.back() != std::make_pair(c.begin, c.end)) {
      kept_spans.emplace_back(c.begin, c.end);
    }
    kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    if (a.end != b.end) return a.end > b.end;
    return a.entry_id < b.entry_id;
  });

  std::vector<ConceptMention> mentions;
  mentions.reserve(kept.size());
  for (const auto& c : kept) {
    const DictEntry& e = dict.entries()[static_cast<size_t>(c.entry_id)];
    ConceptMention m;
    m.utterance_index = 0;
    m.token_begin = c.begin;
    m.token_end = c.end;
    m.matched_surface = normalize_join(
        std::vector<std::string>(tokens.begin() + c.begin, tokens.begin() + c.end));
    m.entry_id = c.entry_id;
    m.concept_id = e.concept_id;
    m.semantic_type = e.semantic_type;
    m.task = e.task;
    m.exact = c.exact;
    m.similarity = c.similarity;
    mentions.push_back(std::move(m));
  }
  return mentions;
}

// Per-utterance semantic type ids, feeding the feature pipeline. Every mention
// at or above jaccard_min contributes; repeated types are kept so that the
// semantic embedding average weights types by mention frequency.
inline std::vector<std::vector<int>> mentions_to_semantic_types(
    const Conversation& conv, const ConceptDictionary& dict,
    double jaccard_min = kDefaultJaccardMin) {
  std::vector<std::vector<int>> types(conv.utterances.size());
  for (size_t i = 0; i < conv.utterances.size(); ++i) {
    for (const auto& m : match_concepts(conv.utterances[i].text, dict, jaccard_min)) {
      types[i].push_back(m.semantic_type);
    }
  }
  return types;
}

// ---------------------------------------------------------------------------
// Utterance filtering ahead of extraction
// ---------------------------------------------------------------------------

enum class FilterMode { AllText, MR, Category, OracleMR, OracleCategory };

struct FilterSpec {
  FilterMode mode = FilterMode::AllText;
  Task task = Task::Sym;  // for Category / OracleCategory
  double tau = 0.5;       // ignored by AllText and the oracle modes
};

// Per-utterance classifier outputs for one conversation.
struct UtteranceProbs {
  std::vector<std::array<double, 3>> fine;  // indexed by Task
  std::vector<double> relevant;             // coarse p(medically relevant)
};

inline std::vector<int> filter_utterances(const Conversation& conv,
                                          const UtteranceProbs* probs,
                                          const FilterSpec& spec) {
  const size_t n = conv.utterances.size();
  auto need_probs = [&]() {
    if (probs == nullptr || probs->fine.size() != n) {
      throw DataError("filter_utterances: probabilities missing for conversation " + conv.id);
    }
  };
  std::vector<int> kept;
  for (size_t i = 0; i < n; ++i) {
    bool keep = false;
    switch (spec.mode) {
      case FilterMode::AllText:
        keep = true;
        break;
      case FilterMode::MR:
        need_probs();
        if (probs->relevant.size() != n) {
          throw DataError("filter_utterances: coarse probabilities missing for conversation " +
                          conv.id);
        }
        keep = probs->relevant[i] >= spec.tau;
        break;
      case FilterMode::Category:
        need_probs();
        keep = probs->fine[i][static_cast<size_t>(spec.task)] >= spec.tau;
        break;
      case FilterMode::OracleMR:
        keep = conv.utterances[i].labels.any();
        break;
      case FilterMode::OracleCategory:
        keep = conv.utterances[i].labels.get(spec.task);
        break;
    }
    if (keep) kept.push_back(static_cast<int>(i));
  }
  return kept;
}

// Conversation-level label set for one task: exact mentions of the task within
// the kept utterances, mapped through the dictionary's label column.
inline std::set<std::string> extract_labels(const Conversation& conv,
                                            const std::vector<int>& subset,
                                            const ConceptDictionary& dict,
                                            const ExtractionLabelMap& map, Task task,
                                            double jaccard_min = kDefaultJaccardMin) {
  std::set<std::string> labels;
  for (int idx : subset) {
    const auto& utt = conv.utterances[static_cast<size_t>(idx)];
    for (const auto& m : match_concepts(utt.text, dict, jaccard_min)) {
      if (!m.exact || m.task != task) continue;
      std::string label = dict.extraction_label(m.entry_id);
      if (label.empty()) continue;  // symptom concept outside the target lists
      if (!map.contains(task, label)) {
        throw DataError("dictionary label '" + label + "' missing from label map");
      }
      labels.insert(std::move(label));
    }
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Threshold sweep
// ---------------------------------------------------------------------------

struct SweepRow {
  FilterMode mode = FilterMode::MR;
  double tau = 0.0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  size_t best_row = 0;  // argmax micro F1 (first on ties)
};

inline const char* filter_mode_name(FilterMode m) {
  switch (m) {
    case FilterMode::AllText: return "all-text";
    case FilterMode::MR: return "mr";
    case FilterMode::Category: return "category";
    case FilterMode::OracleMR: return "oracle-mr";
    case FilterMode::OracleCategory: return "oracle-category";
  }
  return "?";
}

// Scores MR-mode and Category-mode filtering at each threshold.
inline SweepResult threshold_sweep(const std::vector<Conversation>& convs,
                                   const std::vector<UtteranceProbs>& probs,
                                   const ConceptDictionary& dict,
                                   const ExtractionLabelMap& map, Task task,
                                   const std::vector<double>& taus,
                                   double jaccard_min = kDefaultJaccardMin) {
  if (convs.size() != probs.size()) {
    throw DataError("threshold_sweep: conversation and probability counts differ");
  }
  std::vector<std::set<std::string>> gold;
  gold.reserve(convs.size());
  for (const auto& c : convs) gold.push_back(c.gold_extraction[static_cast<int>(task)]);

  SweepResult result;
  for (FilterMode mode : {FilterMode::MR, FilterMode::Category}) {
    for (double tau : taus) {
      if (tau < 0.0 || tau > 1.0) throw UsageError("threshold sweep: tau outside [0,1]");
      FilterSpec spec{mode, task, tau};
      std::vector<std::set<std::string>> preds;
      preds.reserve(convs.size());
      for (size_t i = 0; i < convs.size(); ++i) {
        const auto subset = filter_utterances(convs[i], &probs[i], spec);
        preds.push_back(extract_labels(convs[i], subset, dict, map, task, jaccard_min));
      }
      const ExtractionScore score = extraction_f1(preds, gold, map, task);
      result.rows.push_back({mode, tau, score.micro_f1, score.macro_f1});
    }
  }
  for (size_t i = 1; i < result.rows.size(); ++i) {
    if (result.rows[i].micro_f1 > result.rows[result.best_row].micro_f1) result.best_row = i;
  }
  return result;
}

inline std::string sweep_to_csv(const SweepResult& sweep) {
  std::string out = "mode,tau,micro_f1,macro_f1\n";
  for (const auto& r : sweep.rows) {
    out += filter_mode_name(r.mode);
    out += ',';
    out += format_float(r.tau);
    out += ',';
    out += format_float(r.micro_f1);
    out += ',';
    out += format_float(r.macro_f1);
    out += '\n';
  }
  return out;
}

}  // namespace medtag
