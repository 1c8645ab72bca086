#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "medtag/common.hpp"
#include "medtag/corpus.hpp"

namespace medtag {

struct PRPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct PRCurve {
  std::vector<PRPoint> points;  // ordered by strictly decreasing threshold
  double average_precision = 0.0;
};

namespace detail {
// Ranking order: score descending, ties broken by original index ascending.
inline std::vector<size_t> ranking(const std::vector<double>& scores) {
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  return order;
}
}  // namespace detail

// Step-wise average precision: AP = sum over positive ranks of P@k * dR.
inline double average_precision(const std::vector<double>& scores,
                                const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) {
    throw DataError("average_precision: scores and labels differ in length");
  }
  const size_t positives = static_cast<size_t>(std::count(labels.begin(), labels.end(), true));
  if (positives == 0) throw DataError("average_precision: no positive labels");
  const auto order = detail::ranking(scores);
  double ap = 0.0;
  size_t tp = 0;
  for (size_t k = 0; k < order.size(); ++k) {
    if (labels[order[k]]) {
      ++tp;
      ap += (static_cast<double>(tp) / static_cast<double>(k + 1)) / static_cast<double>(positives);
    }
  }
  return ap;
}

// Precision/recall at every distinct score threshold, descending.
inline PRCurve pr_curve(const std::vector<double>& scores, const std::vector<bool>& labels) {
  PRCurve curve;
  curve.average_precision = average_precision(scores, labels);
  const auto order = detail::ranking(scores);
  const size_t positives = static_cast<size_t>(std::count(labels.begin(), labels.end(), true));
  size_t tp = 0;
  for (size_t k = 0; k < order.size(); ++k) {
    if (labels[order[k]]) ++tp;
    const bool last_of_threshold =
        (k + 1 == order.size()) || (scores[order[k + 1]] < scores[order[k]]);
    if (last_of_threshold) {
      PRPoint p;
      p.threshold = scores[order[k]];
      p.precision = static_cast<double>(tp) / static_cast<double>(k + 1);
      p.recall = static_cast<double>(tp) / static_cast<double>(positives);
      curve.points.push_back(p);
    }
  }
  return curve;
}

// Re-integrates a curve with the same step rule AP uses. Matches
// average_precision whenever all thresholds are distinct.
inline double ap_from_curve(const PRCurve& curve) {
  double ap = 0.0;
  double prev_recall = 0.0;
  for (const auto& p : curve.points) {
    ap += (p.recall - prev_recall) * p.precision;
    prev_recall = p.recall;
  }
  return ap;
}

struct MeanPrAuc {
  double mean = 0.0;
  std::array<std::optional<double>, 3> per_class;  // indexed by Task
  std::vector<Task> skipped;                       // classes with no positives
};

// Unweighted mean over fine classes of per-class AP. Classes without any
// positive are excluded from the mean and reported in `skipped`.
inline MeanPrAuc mean_pr_auc(const std::vector<std::array<double, 3>>& fine_probs,
                             const std::vector<FineLabelSet>& gold) {
  if (fine_probs.size() != gold.size()) {
    throw DataError("mean_pr_auc: probability and gold lengths differ");
  }
  MeanPrAuc result;
  double sum = 0.0;
  int counted = 0;
  for (Task t : kAllTasks) {
    const int ti = static_cast<int>(t);
    std::vector<double> scores(fine_probs.size());
    std::vector<bool> labels(fine_probs.size());
    bool any_positive = false;
    for (size_t i = 0; i < fine_probs.size(); ++i) {
      scores[i] = fine_probs[i][static_cast<size_t>(ti)];
      labels[i] = gold[i].get(t);
      any_positive = any_positive || labels[i];
    }
    if (!any_positive) {
      result.skipped.push_back(t);
      continue;
    }
    const double ap = average_precision(scores, labels);
    result.per_class[static_cast<size_t>(ti)] = ap;
    sum += ap;
    ++counted;
  }
  if (counted == 0) throw DataError("mean_pr_auc: no class has positive labels");
  result.mean = sum / counted;
  return result;
}

// ---------------------------------------------------------------------------
// Conversation-level extraction scoring
// ---------------------------------------------------------------------------

struct LabelScore {
  std::string label;
  size_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct ExtractionScore {
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  std::vector<LabelScore> per_label;
};

inline ExtractionScore extraction_f1(const std::vector<std::set<std::string>>& predicted,
                                     const std::vector<std::set<std::string>>& gold,
                                     const ExtractionLabelMap& map, Task task) {
  if (predicted.size() != gold.size()) {
    throw DataError("extraction_f1: prediction and gold lengths differ");
  }
  const auto& vocab = map.labels(task);
  auto check = [&](const std::set<std::string>& labels) {
    for (const auto& l : labels) {
      if (!map.contains(task, l)) {
        throw DataError("extraction_f1: unknown " + std::string(task_name(task)) + " label '" + l + "'");
      }
    }
  };

  ExtractionScore score;
  score.per_label.reserve(vocab.size());
  for (const auto& label : vocab) {
    LabelScore ls;
    ls.label = label;
    score.per_label.push_back(ls);
  }
  size_t tp = 0, fp = 0, fn = 0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    check(predicted[i]);
    check(gold[i]);
    for (size_t li = 0; li < vocab.size(); ++li) {
      const bool p = predicted[i].count(vocab[li]) > 0;
      const bool g = gold[i].count(vocab[li]) > 0;
      if (p && g) ++score.per_label[li].tp;
      if (p && !g) ++score.per_label[li].fp;
      if (!p && g) ++score.per_label[li].fn;
    }
  }
  double macro_sum = 0.0;
  for (auto& ls : score.per_label) {
    tp += ls.tp;
    fp += ls.fp;
    fn += ls.fn;
    ls.precision = (ls.tp + ls.fp) ? static_cast<double>(ls.tp) / (ls.tp + ls.fp) : 0.0;
    ls.recall = (ls.tp + ls.fn) ? static_cast<double>(ls.tp) / (ls.tp + ls.fn) : 0.0;
    ls.f1 = (ls.precision + ls.recall > 0.0)
                ? 2.0 * ls.precision * ls.recall / (ls.precision + ls.recall)
                : 0.0;
    macro_sum += ls.f1;
  }
  score.micro_f1 = (2 * tp + fp + fn) ? 2.0 * tp / static_cast<double>(2 * tp + fp + fn) : 0.0;
  score.macro_f1 = vocab.empty() ? 0.0 : macro_sum / static_cast<double>(vocab.size());
  return score;
}

// ---------------------------------------------------------------------------
// CSV exports
// ---------------------------------------------------------------------------

inline void write_pr_csv(const PRCurve& curve, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write PR curve file: " + path);
  out << "threshold,precision,recall\n";
  for (const auto& p : curve.points) {
    out << format_float(p.threshold) << ',' << format_float(p.precision) << ','
        << format_float(p.recall) << '\n';
  }
}

// One curve CSV per fine class plus a summary CSV "class,ap".
inline MeanPrAuc export_pr_curves(const std::vector<std::array<double, 3>>& fine_probs,
                                  const std::vector<FineLabelSet>& gold,
                                  const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  MeanPrAuc auc = mean_pr_auc(fine_probs, gold);
  std::ofstream summary(std::filesystem::path(out_dir) / "ap_summary.csv", std::ios::binary);
  if (!summary) throw DataError("cannot write AP summary in " + out_dir);
  summary << "class,ap\n";
  for (Task t : kAllTasks) {
    const int ti = static_cast<int>(t);
    if (!auc.per_class[static_cast<size_t>(ti)]) continue;
    std::vector<double> scores(fine_probs.size());
    std::vector<bool> labels(fine_probs.size());
    for (size_t i = 0; i < fine_probs.size(); ++i) {
      scores[i] = fine_probs[i][static_cast<size_t>(ti)];
      labels[i] = gold[i].get(t);
    }
    const PRCurve curve = pr_curve(scores, labels);
    const auto path = std::filesystem::path(out_dir) / ("pr_" + std::string(task_name(t)) + ".csv");
    write_pr_csv(curve, path.string());
    summary << task_name(t) << ',' << format_float(curve.average_precision) << '\n';
  }
  return auc;
}

}  // namespace medtag
