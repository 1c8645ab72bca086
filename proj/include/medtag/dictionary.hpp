#pragma once

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "medtag/common.hpp"
#include "medtag/text.hpp"

namespace medtag {

// The three extraction tasks. Also the order of the fine label classes.
enum class Task : int { Sym = 0, Com = 1, Med = 2 };

constexpr std::array<const char*, 3> kTaskNames = {"SYM", "COM", "MED"};
constexpr std::array<Task, 3> kAllTasks = {Task::Sym, Task::Com, Task::Med};

inline const char* task_name(Task t) { return kTaskNames[static_cast<int>(t)]; }

inline Task parse_task(std::string_view s) {
  for (int i = 0; i < 3; ++i) {
    if (s == kTaskNames[i]) return static_cast<Task>(i);
  }
  throw DataError("unknown task name: " + std::string(s));
}

// Closed per-task label vocabularies for conversation-level extraction:
// 14 body systems for symptoms, 32 medication groups, 11 complaint groups.
class ExtractionLabelMap {
 public:
  ExtractionLabelMap(std::vector<std::string> sym, std::vector<std::string> med,
                     std::vector<std::string> com)
      : labels_{std::move(sym), std::move(com), std::move(med)} {
    if (labels(Task::Sym).size() != 14 || labels(Task::Med).size() != 32 ||
        labels(Task::Com).size() != 11) {
      throw DataError("label map must have exactly 14/32/11 labels for SYM/MED/COM");
    }
    for (Task t : {Task::Med, Task::Com}) {
      if (!contains(t, "Others")) {
        throw DataError(std::string("label map for ") + task_name(t) + " must include 'Others'");
      }
    }
  }

  const std::vector<std::string>& labels(Task t) const {
    return labels_[static_cast<int>(t)];
  }

  bool contains(Task t, const std::string& label) const {
    const auto& v = labels(t);
    return std::find(v.begin(), v.end(), label) != v.end();
  }

  static const ExtractionLabelMap& builtin();

 private:
  std::array<std::vector<std::string>, 3> labels_;  // indexed by Task
};

inline const ExtractionLabelMap& ExtractionLabelMap::builtin() {
  static const ExtractionLabelMap map(
      // Symptom body systems.
      {"Cardiovascular", "General", "Musculoskeletal", "Respiratory", "Endocrine",
       "Ear Nose Throat", "Eyes", "Gastrointestinal", "Genital", "Head",
       "Neurological", "Psychiatric", "Skin", "Urinary"},
      // Medication groups (DFCBM = Drug, Food, Chemical or Biomedical Material,
      // AA = Agent Affecting).
      {"DFCBM/Chemical Modifier/Toxin",
       "DFCBM/Dietary Supplement",
       "DFCBM/Drug or Chemical by Structure",
       "DFCBM/Food or Food Product",
       "DFCBM/Industrial Aid",
       "DFCBM/Natural Product",
       "DFCBM/Pharmacologic Substance/Adjuvant",
       "DFCBM/Pharmacologic Substance/AA Blood or Body Fluid",
       "DFCBM/Pharmacologic Substance/AA Cardiovascular System",
       "DFCBM/Pharmacologic Substance/AA Digestive System or Metabolism",
       "DFCBM/Pharmacologic Substance/AA Integumentary System",
       "DFCBM/Pharmacologic Substance/AA Musculoskeletal System",
       "DFCBM/Pharmacologic Substance/AA Nervous System",
       "DFCBM/Pharmacologic Substance/AA Organs of Special Senses",
       "DFCBM/Pharmacologic Substance/AA Respiratory System",
       "DFCBM/Pharmacologic Substance/Anti-Infective Agent",
       "DFCBM/Pharmacologic Substance/Antineoplastic Agent",
       "DFCBM/Pharmacologic Substance/Biological Agent",
       "DFCBM/Pharmacologic Substance/Cation Channel Blocker",
       "DFCBM/Pharmacologic Substance/Chemopreventive Agent",
       "DFCBM/Pharmacologic Substance/Combination Medication",
       "DFCBM/Pharmacologic Substance/Endothelin Receptor Antagonist",
       "DFCBM/Pharmacologic Substance/Enzyme Inhibitor",
       "DFCBM/Pharmacologic Substance/Hormone Therapy Agent",
       "DFCBM/Pharmacologic Substance/Immunotherapeutic Agent",
       "DFCBM/Pharmacologic Substance/Prostaglandin Analogue",
       "DFCBM/Pharmacologic Substance/Protective Agent",
       "DFCBM/Pharmacologic Substance/Protein Synthesis Inhibitor",
       "DFCBM/Physiology-Regulatory Factor",
       "Activity/Clinical or Research Activity/Intervention or Procedure",
       "Manufactured Object/Diagnostic, Therapeutic, or Research Equipment",
       "Others"},
      // Complaint groups.
      {"General",
       "Disorder of hematopoietic structure",
       "Disorder of integument, immune system, endocrine",
       "Disorder of musculoskeletal system",
       "Disorder of digestive system",
       "Disorder of the genitourinary system",
       "Disorder of respiratory system",
       "Disorder of breast",
       "Disorder of nervous system",
       "Disorder of cardiovascular system",
       "Others"});
  return map;
}

// Semantic type ids used by the builtin dictionary.
enum SemanticType : int {
  kSignOrSymptom = 0,
  kPharmacologicSubstance = 1,
  kDiseaseOrSyndrome = 2,
  kFinding = 3,
  kFood = 4,
  kTherapeuticProcedure = 5,
  kDietarySupplement = 6,
  kMedicalDevice = 7,
};

struct DictEntry {
  std::vector<std::string> surface_tokens;  // normalized token sequence
  std::string surface;                      // tokens joined by single spaces
  std::string concept_id;
  int semantic_type = 0;
  Task task = Task::Sym;
  std::string label;  // empty: no specific group (Others for MED/COM, dropped for SYM)
};

// Surface form -> concept -> semantic type -> task label table. Loaded from a
// TSV with header "surface\tconcept_id\tsemantic_type\ttask\tlabel".
class ConceptDictionary {
 public:
  static ConceptDictionary from_tsv_text(std::string_view text,
                                         const std::string& source,
                                         const ExtractionLabelMap& map =
                                             ExtractionLabelMap::builtin()) {
    ConceptDictionary dict;
    std::istringstream in{std::string(text)};
    std::string line;
    size_t line_no = 0;
    std::set<std::pair<std::string, std::string>> seen;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (line_no == 1 && line.rfind("surface\t", 0) == 0) continue;  // header
      std::vector<std::string> cols;
      size_t start = 0;
      while (true) {
        size_t tab = line.find('\t', start);
        cols.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
      if (cols.size() != 5) {
        throw DataError(source + ":" + std::to_string(line_no) +
                        ": expected 5 tab-separated columns, got " +
                        std::to_string(cols.size()));
      }
      DictEntry e;
      e.surface_tokens = tokenize(cols[0]);
      if (e.surface_tokens.empty()) {
        throw DataError(source + ":" + std::to_string(line_no) + ": empty surface form");
      }
      e.surface = normalize_join(e.surface_tokens);
      e.concept_id = cols[1];
      try {
        e.semantic_type = std::stoi(cols[2]);
      } catch (const std::exception&) {
        throw DataError(source + ":" + std::to_string(line_no) +
                        ": semantic_type is not an integer: " + cols[2]);
      }
      if (e.semantic_type < 0) {
        throw DataError(source + ":" + std::to_string(line_no) + ": negative semantic_type");
      }
      e.task = parse_task(cols[3]);
      e.label = cols[4];
      if (!e.label.empty() && !map.contains(e.task, e.label)) {
        throw DataError(source + ":" + std::to_string(line_no) + ": label '" + e.label +
                        "' is not in the " + task_name(e.task) + " label vocabulary");
      }
      if (!seen.insert({e.surface, e.concept_id}).second) {
        throw DataError(source + ":" + std::to_string(line_no) + ": duplicate (surface, concept) pair '" +
                        e.surface + "', '" + e.concept_id + "'");
      }
      dict.entries_.push_back(std::move(e));
    }
    if (dict.entries_.empty()) {
      throw DataError(source + ": dictionary has no entries");
    }
    dict.build_index();
    return dict;
  }

  static ConceptDictionary load(const std::string& path,
                                const ExtractionLabelMap& map =
                                    ExtractionLabelMap::builtin()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dictionary file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_tsv_text(ss.str(), path, map);
  }

  // Synthetic dictionary shipped with the repository (also at data/dictionary.tsv).
  static const ConceptDictionary& builtin();
  static std::string_view builtin_tsv();

  const std::vector<DictEntry>& entries() const { return entries_; }
  int max_surface_tokens() const { return max_surface_tokens_; }
  // One past the largest semantic type id; sizes the semantic embedding table.
  int semantic_type_count() const { return semantic_type_count_; }

  // Entry ids whose surface contains the given normalized token.
  const std::vector<int>* entries_with_token(const std::string& token) const {
    auto it = token_index_.find(token);
    return it == token_index_.end() ? nullptr : &it->second;
  }

  std::vector<int> entries_for_task(Task t) const {
    std::vector<int> ids;
    for (size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].task == t) ids.push_back(static_cast<int>(i));
    }
    return ids;
  }

  // Extraction label for an entry: explicit label, or the Others fallback for
  // MED/COM. Returns empty for SYM entries outside the 14 target lists, which
  // contribute no extraction prediction.
  std::string extraction_label(int entry_id) const {
    const DictEntry& e = entries_[static_cast<size_t>(entry_id)];
    if (!e.label.empty()) return e.label;
    return e.task == Task::Sym ? std::string() : std::string("Others");
  }

 private:
  void build_index() {
    max_surface_tokens_ = 0;
    semantic_type_count_ = 0;
    for (size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      max_surface_tokens_ = std::max(max_surface_tokens_, static_cast<int>(e.surface_tokens.size()));
      semantic_type_count_ = std::max(semantic_type_count_, e.semantic_type + 1);
      for (const auto& tok : e.surface_tokens) {
        auto& ids = token_index_[tok];
        if (ids.empty() || ids.back() != static_cast<int>(i)) ids.push_back(static_cast<int>(i));
      }
    }
  }

  std::vector<DictEntry> entries_;
  int max_surface_tokens_ = 0;
  int semantic_type_count_ = 0;
  std::unordered_map<std::string, std::vector<int>> token_index_;
};

}  // namespace medtag

#include "medtag/builtin_dictionary.hpp"
