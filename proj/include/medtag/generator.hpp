#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "medtag/common.hpp"
#include "medtag/corpus.hpp"
#include "medtag/dictionary.hpp"
#include "medtag/prng.hpp"

namespace medtag {

// Calibration targets for the synthetic corpus: per-conversation fractions of
// labeled utterances, mean relative first-mention positions per category, and
// speaker-role skews (medication and complaint discussion is doctor-heavy,
// symptoms are balanced).
struct GeneratorProfile {
  int mean_utterances = 60;     // full-scale corpora use ~225
  double length_spread = 1.0 / 3.0;  // utterance count uniform in mean*(1 +/- spread)

  std::array<double, 3> fraction = {0.0198, 0.0434, 0.0310};        // SYM, COM, MED
  std::array<double, 3> first_position = {0.321, 0.133, 0.524};     // mean targets
  std::array<double, 3> first_position_spread = {0.099, 0.074, 0.120};

  // P(doctor), P(patient) per category; other = remainder.
  std::array<std::array<double, 2>, 3> speaker_skew = {{
      {0.46, 0.48},  // SYM
      {0.62, 0.32},  // COM
      {0.70, 0.25},  // MED
  }};
  std::array<double, 2> irrelevant_speaker_skew = {0.44, 0.46};

  // Fraction of irrelevant utterances that mention a dictionary surface form
  // without discussing it medically; such utterances never contribute gold
  // extraction labels.
  double decoy_fraction = 0.1;
  // Chance a labeled utterance carries one of the shared relevance phrases.
  double relevance_marker_prob = 0.35;

  void validate() const {
    if (mean_utterances < 3) throw UsageError("generator: mean_utterances must be >= 3");
    if (length_spread < 0.0 || length_spread >= 1.0) {
      throw UsageError("generator: length_spread must be in [0,1)");
    }
    double total = 0.0;
    for (double f : fraction) {
      if (f < 0.0) throw UsageError("generator: category fractions must be non-negative");
      total += f;
    }
    if (total > 1.0) throw UsageError("generator: category fractions exceed 1");
    if (decoy_fraction < 0.0 || decoy_fraction > 1.0) {
      throw UsageError("generator: decoy_fraction must be in [0,1]");
    }
    for (const auto& skew : speaker_skew) {
      if (skew[0] + skew[1] > 1.0) throw UsageError("generator: speaker skew exceeds 1");
    }
  }
};

namespace gen_detail {

inline const std::vector<std::string>& category_templates(Task t) {
  static const std::vector<std::string> sym = {
      "i have been having {} lately",
      "the {} comes and goes during the day",
      "any {} when you climb the stairs",
      "yes the {} started about two weeks ago",
      "i noticed some {} again last night",
  };
  static const std::vector<std::string> com = {
      "we are seeing you about the {} today",
      "the chart says you came in for {}",
      "my main concern is still the {}",
      "you were diagnosed with {} at the last visit",
      "is this visit about the {} again",
  };
  static const std::vector<std::string> med = {
      "i am going to start you on {}",
      "are you still taking the {} every day",
      "we can raise the dose of {} a little",
      "keep using the {} twice daily",
      "the pharmacy refilled my {} yesterday",
  };
  switch (t) {
    case Task::Sym: return sym;
    case Task::Com: return com;
    case Task::Med: return med;
  }
  return sym;
}

inline const std::vector<std::string>& decoy_templates() {
  static const std::vector<std::string> v = {
      "my neighbor swears by {} but that is a different story",
      "i saw an ad about {} on television",
      "my sister used to take {} years ago",
      "we joked about {} at dinner last week",
      "something on the radio mentioned {}",
  };
  return v;
}

inline const std::vector<std::string>& smalltalk_lines() {
  static const std::vector<std::string> v = {
      "good morning",
      "good morning doctor",
      "how are you today",
      "i am doing alright thanks",
      "the weather has been lovely",
      "did you find parking okay",
      "my grandson turned five last weekend",
      "traffic was heavy on the bridge",
      "okay",
      "alright then",
      "thanks so much",
      "see you at the front desk",
      "take care now",
      "let me pull up your file",
      "the nurse will be right in",
      "sounds good",
      "that makes sense",
      "we moved to a new apartment recently",
      "the garden is keeping me busy",
      "say hello to your wife for me",
  };
  return v;
}

inline const std::vector<std::string>& relevance_markers() {
  static const std::vector<std::string> v = {
      ", it has been bothering me",
      ", since the last visit",
      ", we should keep an eye on it",
      ", let me write that down",
  };
  return v;
}

inline std::string fill_template(const std::string& tmpl, const std::string& surface) {
  const auto pos = tmpl.find("{}");
  std::string out = tmpl;
  out.replace(pos, 2, surface);
  return out;
}

inline SpeakerRole draw_speaker(Rng& rng, double p_dr, double p_pt) {
  const double u = rng.next_double();
  if (u < p_dr) return SpeakerRole::Doctor;
  if (u < p_dr + p_pt) return SpeakerRole::Patient;
  return SpeakerRole::Other;
}

}  // namespace gen_detail

// Seeded synthetic conversation generator. All randomness comes from a single
// counter-based generator, so (profile, n_convs, seed, dictionary) fully
// determine the output.
inline std::vector<Conversation> synth_generate(const GeneratorProfile& profile, int n_convs,
                                                uint64_t seed,
                                                const ConceptDictionary& dict =
                                                    ConceptDictionary::builtin()) {
  profile.validate();
  std::array<std::vector<int>, 3> task_entries;
  for (Task t : kAllTasks) {
    const int ti = static_cast<int>(t);
    task_entries[ti] = dict.entries_for_task(t);
    if (profile.fraction[ti] > 0.0 && task_entries[ti].empty()) {
      throw DataError(std::string("generator: dictionary has no ") + task_name(t) + " entries");
    }
  }

  Rng rng(seed);
  const int lo = std::max(3, static_cast<int>(std::lround(profile.mean_utterances *
                                                          (1.0 - profile.length_spread))));
  const int hi = std::max(lo, static_cast<int>(std::lround(profile.mean_utterances *
                                                           (1.0 + profile.length_spread))));

  std::vector<Conversation> convs;
  convs.reserve(static_cast<size_t>(n_convs));
  for (int ci = 0; ci < n_convs; ++ci) {
    const int n = lo + static_cast<int>(rng.next_below(static_cast<uint64_t>(hi - lo + 1)));
    // Which task, if any, each slot carries. Placement order is fixed.
    std::vector<std::optional<Task>> slot(static_cast<size_t>(n));

    for (Task t : {Task::Com, Task::Sym, Task::Med}) {
      const int ti = static_cast<int>(t);
      const double expected = n * profile.fraction[ti];
      int count = static_cast<int>(expected);
      if (rng.bernoulli(expected - count)) ++count;
      count = std::min(count, n);
      if (count == 0) continue;

      const double spread = profile.first_position_spread[ti];
      const double r = std::clamp(
          profile.first_position[ti] + rng.uniform(-spread, spread), 0.0, 0.99);
      int first = std::min(static_cast<int>(r * n), n - 1);
      // Nudge to a free slot, preferring later ones so the first mention of
      // other categories placed earlier keeps its position.
      while (first < n && slot[static_cast<size_t>(first)].has_value()) ++first;
      if (first == n) {
        first = std::min(static_cast<int>(r * n), n - 1);
        while (first >= 0 && slot[static_cast<size_t>(first)].has_value()) --first;
      }
      if (first < 0) continue;  // conversation saturated; vanishingly unlikely
      slot[static_cast<size_t>(first)] = t;

      std::vector<int> free_after;
      for (int i = first + 1; i < n; ++i) {
        if (!slot[static_cast<size_t>(i)]) free_after.push_back(i);
      }
      for (int placed = 1; placed < count && !free_after.empty(); ++placed) {
        const size_t pick = static_cast<size_t>(rng.next_below(free_after.size()));
        slot[static_cast<size_t>(free_after[pick])] = t;
        free_after.erase(free_after.begin() + static_cast<std::ptrdiff_t>(pick));
      }
    }

    Conversation conv;
    char id_buf[24];
    std::snprintf(id_buf, sizeof(id_buf), "synth-%06d", ci);
    conv.id = id_buf;
    conv.utterances.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      Utterance utt;
      utt.index = i;
      if (slot[static_cast<size_t>(i)].has_value()) {
        const Task t = *slot[static_cast<size_t>(i)];
        const int ti = static_cast<int>(t);
        const auto& entries = task_entries[ti];
        const DictEntry& entry =
            dict.entries()[static_cast<size_t>(entries[rng.next_below(entries.size())])];
        const auto& templates = gen_detail::category_templates(t);
        utt.text = gen_detail::fill_template(templates[rng.next_below(templates.size())],
                                             entry.surface);
        if (rng.bernoulli(profile.relevance_marker_prob)) {
          const auto& markers = gen_detail::relevance_markers();
          utt.text += markers[rng.next_below(markers.size())];
        }
        utt.speaker = gen_detail::draw_speaker(rng, profile.speaker_skew[ti][0],
                                               profile.speaker_skew[ti][1]);
        utt.labels.set(t);
        if (!entry.label.empty()) {
          conv.gold_extraction[ti].insert(entry.label);
        }
      } else if (rng.bernoulli(profile.decoy_fraction)) {
        const DictEntry& entry = dict.entries()[rng.next_below(dict.entries().size())];
        const auto& templates = gen_detail::decoy_templates();
        utt.text = gen_detail::fill_template(templates[rng.next_below(templates.size())],
                                             entry.surface);
        utt.speaker = gen_detail::draw_speaker(rng, profile.irrelevant_speaker_skew[0],
                                               profile.irrelevant_speaker_skew[1]);
      } else {
        const auto& lines = gen_detail::smalltalk_lines();
        utt.text = lines[rng.next_below(lines.size())];
        utt.speaker = gen_detail::draw_speaker(rng, profile.irrelevant_speaker_skew[0],
                                               profile.irrelevant_speaker_skew[1]);
      }
      conv.utterances.push_back(std::move(utt));
    }
    convs.push_back(std::move(conv));
  }
  return convs;
}

}  // namespace medtag
