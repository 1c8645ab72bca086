#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "medtag/common.hpp"
#include "medtag/corpus.hpp"
#include "medtag/dictionary.hpp"
#include "medtag/eval.hpp"
#include "medtag/extract.hpp"
#include "medtag/features.hpp"
#include "medtag/nn.hpp"
#include "medtag/prng.hpp"

namespace medtag {

struct TrainConfig {
  double learning_rate = 0.0005;
  int batch_size = 16;  // in windows
  int window_len = 128;
  double beta = 1.0;
  int hidden_dim = 32;  // desk scale; 1024 at full scale
  int max_epochs = 50;
  int patience = 5;
  uint64_t seed = 13;
  double clip_norm = 5.0;
  int threads = 1;
  Ablations ablation;

  void validate() const {
    if (learning_rate < 0.0) throw UsageError("learning_rate must be >= 0");
    if (batch_size < 1 || window_len < 1 || hidden_dim < 1 || max_epochs < 1 || patience < 1 ||
        threads < 1) {
      throw UsageError("batch_size, window_len, hidden_dim, max_epochs, patience and threads "
                       "must all be >= 1");
    }
    if (patience > max_epochs) throw UsageError("patience must not exceed max_epochs");
    if (beta < 0.0) throw UsageError("beta must be >= 0");
    if (clip_norm <= 0.0) throw UsageError("clip_norm must be > 0");
  }
};

// ---------------------------------------------------------------------------
// Windowing: consecutive non-overlapping spans; the recurrent context never
// crosses a window boundary. Position bins always refer to the utterance's
// place in the full conversation.
// ---------------------------------------------------------------------------

struct WindowRef {
  int conv = 0;
  int begin = 0;
  int end = 0;
};

// Static (non-trainable) inputs for a full conversation.
struct PreparedConversation {
  std::string id;
  Mat text;  // text_dim x n
  std::vector<int> speakers;
  std::vector<int> position_bins;
  std::vector<std::vector<int>> mentions;
  std::vector<FineLabelSet> gold;

  int length() const { return static_cast<int>(speakers.size()); }
};

inline int utterance_count(const Conversation& c) { return static_cast<int>(c.utterances.size()); }
inline int utterance_count(const PreparedConversation& c) { return c.length(); }

template <typename ConvLike>
std::vector<WindowRef> window_conversations(const std::vector<ConvLike>& convs, int window_len) {
  if (window_len < 1) throw UsageError("window_len must be >= 1");
  std::vector<WindowRef> windows;
  for (size_t ci = 0; ci < convs.size(); ++ci) {
    const int n = utterance_count(convs[ci]);
    for (int begin = 0; begin < n; begin += window_len) {
      windows.push_back({static_cast<int>(ci), begin, std::min(begin + window_len, n)});
    }
  }
  return windows;
}

inline PreparedConversation prepare_conversation(const Conversation& conv,
                                                 const FeatureConfig& cfg,
                                                 const TextEncoder& encoder,
                                                 const ConceptDictionary& dict,
                                                 double jaccard_min = kDefaultJaccardMin) {
  if (encoder.dim() != cfg.text_dim) {
    throw DataError("text encoder dim " + std::to_string(encoder.dim()) +
                    " does not match text_dim " + std::to_string(cfg.text_dim));
  }
  PreparedConversation p;
  p.id = conv.id;
  const int n = static_cast<int>(conv.utterances.size());
  p.text.resize(cfg.text_dim, n);
  p.mentions = mentions_to_semantic_types(conv, dict, jaccard_min);
  for (int i = 0; i < n; ++i) {
    const auto& utt = conv.utterances[static_cast<size_t>(i)];
    p.text.col(i) = encoder.encode(conv.id, utt.index, utt.text);
    p.speakers.push_back(static_cast<int>(utt.speaker));
    p.position_bins.push_back(position_bin(utt.index, n, cfg.position_bins));
    p.gold.push_back(utt.labels);
  }
  return p;
}

inline std::vector<PreparedConversation> prepare_corpus(const std::vector<Conversation>& convs,
                                                        const FeatureConfig& cfg,
                                                        const TextEncoder& encoder,
                                                        const ConceptDictionary& dict,
                                                        double jaccard_min = kDefaultJaccardMin) {
  std::vector<PreparedConversation> out;
  out.reserve(convs.size());
  for (const auto& c : convs) {
    out.push_back(prepare_conversation(c, cfg, encoder, dict, jaccard_min));
  }
  return out;
}

inline WindowInput make_window(const PreparedConversation& conv, int begin, int end) {
  WindowInput w;
  w.conv_id = conv.id;
  w.begin = begin;
  const int len = end - begin;
  w.text = conv.text.middleCols(begin, len);
  w.speakers.assign(conv.speakers.begin() + begin, conv.speakers.begin() + end);
  w.position_bins.assign(conv.position_bins.begin() + begin, conv.position_bins.begin() + end);
  w.mentions.assign(conv.mentions.begin() + begin, conv.mentions.begin() + end);
  w.gold.assign(conv.gold.begin() + begin, conv.gold.begin() + end);
  return w;
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

struct AdamConfig {
  double lr = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<std::vector<double>> m, v;
  long step = 0;

  static AdamState init(const std::vector<ParamBlock>& blocks) {
    AdamState s;
    for (const auto& b : blocks) {
      s.m.emplace_back(b.size, 0.0);
      s.v.emplace_back(b.size, 0.0);
    }
    return s;
  }
};

inline void adam_step(const std::vector<ParamBlock>& params,
                      const std::vector<ParamBlock>& grads, AdamState& state,
                      const AdamConfig& cfg) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw UsageError("adam_step: block list mismatch");
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (size_t b = 0; b < params.size(); ++b) {
    if (params[b].size != grads[b].size || params[b].size != state.m[b].size()) {
      throw UsageError("adam_step: shape mismatch in block " + params[b].name);
    }
    double* x = params[b].data;
    const double* g = grads[b].data;
    auto& m = state.m[b];
    auto& v = state.v[b];
    for (size_t i = 0; i < params[b].size; ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      x[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

inline double gradient_global_norm(const std::vector<ParamBlock>& grads) {
  double sq = 0.0;
  for (const auto& b : grads) {
    for (size_t i = 0; i < b.size; ++i) sq += b.data[i] * b.data[i];
  }
  return std::sqrt(sq);
}

inline void scale_gradients(const std::vector<ParamBlock>& grads, double factor) {
  for (const auto& b : grads) {
    for (size_t i = 0; i < b.size; ++i) b.data[i] *= factor;
  }
}

// ---------------------------------------------------------------------------
// Prediction
// ---------------------------------------------------------------------------

// Fine probabilities per utterance plus the coarse relevance probability. With
// the hierarchy ablated (or mr_union set) relevance falls back to the maximum
// fine probability.
inline UtteranceProbs predict_probs(const Model& model, const PreparedConversation& conv,
                                    int window_len, bool mr_union = false) {
  UtteranceProbs probs;
  const int n = conv.length();
  probs.fine.resize(static_cast<size_t>(n));
  probs.relevant.resize(static_cast<size_t>(n));
  const bool union_mode = mr_union || model.ablation.no_hierarchy;
  for (int begin = 0; begin < n; begin += window_len) {
    const int end = std::min(begin + window_len, n);
    const WindowInput w = make_window(conv, begin, end);
    const ForwardCache fc = forward(model, w);
    for (int t = 0; t < end - begin; ++t) {
      auto& fine = probs.fine[static_cast<size_t>(begin + t)];
      for (int c = 0; c < kFineClasses; ++c) fine[static_cast<size_t>(c)] = fc.p_fine(c, t);
      probs.relevant[static_cast<size_t>(begin + t)] =
          union_mode ? std::max({fine[0], fine[1], fine[2]}) : fc.p_coarse(0, t);
    }
  }
  return probs;
}

// Pooled mean PR-AUC over every utterance of a conversation set.
inline MeanPrAuc evaluate_mean_auc(const Model& model,
                                   const std::vector<PreparedConversation>& convs,
                                   int window_len) {
  std::vector<std::array<double, 3>> fine;
  std::vector<FineLabelSet> gold;
  for (const auto& conv : convs) {
    const UtteranceProbs probs = predict_probs(model, conv, window_len);
    fine.insert(fine.end(), probs.fine.begin(), probs.fine.end());
    gold.insert(gold.end(), conv.gold.begin(), conv.gold.end());
  }
  return mean_pr_auc(fine, gold);
}

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

struct EpochStat {
  int epoch = 0;
  double train_loss = 0.0;
  double val_auc = 0.0;
};

struct TrainReport {
  std::vector<EpochStat> epochs;
  int best_epoch = 0;  // 1-based
  double best_val_auc = 0.0;
  double wall_seconds = 0.0;
};

struct TrainResult {
  Model model;  // parameters of the best epoch
  TrainReport report;
};

inline std::string train_report_csv(const TrainReport& report) {
  std::string out = "epoch,train_loss,val_auc\n";
  for (const auto& e : report.epochs) {
    out += std::to_string(e.epoch);
    out += ',';
    out += format_float(e.train_loss);
    out += ',';
    out += format_float(e.val_auc);
    out += '\n';
  }
  return out;
}

// Joint optimization with Adam, seeded shuffling, gradient clipping by global
// norm, and early stopping on validation mean PR-AUC.
inline TrainResult train_model(Model model, const std::vector<PreparedConversation>& train_convs,
                               const std::vector<PreparedConversation>& val_convs,
                               const TrainConfig& cfg) {
  cfg.validate();
  if (train_convs.empty() || val_convs.empty()) {
    throw DataError("train: empty training or validation set");
  }
  const auto t_start = std::chrono::steady_clock::now();

  const auto window_refs = window_conversations(train_convs, cfg.window_len);
  std::vector<WindowInput> windows;
  windows.reserve(window_refs.size());
  for (const auto& ref : window_refs) {
    windows.push_back(make_window(train_convs[static_cast<size_t>(ref.conv)], ref.begin, ref.end));
  }

  auto params = param_blocks(model);
  AdamState adam = AdamState::init(params);
  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.learning_rate;

  // Worker grads: one accumulator per thread, reduced in thread order.
  const int n_threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(windows.size())));
  std::vector<Model> worker_grads;
  worker_grads.reserve(static_cast<size_t>(n_threads));
  for (int i = 0; i < n_threads; ++i) worker_grads.push_back(zeros_like(model));
  Model total_grads = zeros_like(model);
  auto total_grad_blocks = param_blocks(total_grads);

  Rng shuffle_rng(cfg.seed + 1);
  std::vector<size_t> order(windows.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainResult result;
  result.model = model;  // placeholder until the first epoch completes
  TrainReport& report = result.report;
  report.best_val_auc = -1.0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    for (size_t i = order.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(shuffle_rng.next_below(i));
      std::swap(order[i - 1], order[j]);
    }
    double epoch_loss_sum = 0.0;
    size_t batch_index = 0;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch_size)) {
      const size_t stop = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      const size_t batch_n = stop - start;

      double batch_loss = 0.0;
      for (auto& g : worker_grads) {
        for (auto& b : param_blocks(g)) std::fill(b.data, b.data + b.size, 0.0);
      }
      if (n_threads == 1) {
        for (size_t i = start; i < stop; ++i) {
          const WindowInput& w = windows[order[i]];
          const ForwardCache fc = forward(model, w);
          batch_loss += compute_loss(model, fc, w).total;
          backward(model, w, fc, worker_grads[0]);
        }
      } else {
        std::vector<double> losses(batch_n, 0.0);
        std::vector<std::thread> pool;
        for (int tid = 0; tid < n_threads; ++tid) {
          pool.emplace_back([&, tid]() {
            for (size_t i = start + static_cast<size_t>(tid); i < stop;
                 i += static_cast<size_t>(n_threads)) {
              const WindowInput& w = windows[order[i]];
              const ForwardCache fc = forward(model, w);
              losses[i - start] = compute_loss(model, fc, w).total;
              backward(model, w, fc, worker_grads[static_cast<size_t>(tid)]);
            }
          });
        }
        for (auto& th : pool) th.join();
        for (double l : losses) batch_loss += l;
      }
      for (auto& b : total_grad_blocks) std::fill(b.data, b.data + b.size, 0.0);
      for (auto& g : worker_grads) {
        auto gb = param_blocks(g);
        for (size_t b = 0; b < gb.size(); ++b) {
          for (size_t i = 0; i < gb[b].size; ++i) total_grad_blocks[b].data[i] += gb[b].data[i];
        }
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericError("non-finite loss in epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index));
      }
      scale_gradients(total_grad_blocks, 1.0 / static_cast<double>(batch_n));
      const double norm = gradient_global_norm(total_grad_blocks);
      if (norm > cfg.clip_norm) {
        scale_gradients(total_grad_blocks, cfg.clip_norm / norm);
      }
      adam_step(params, total_grad_blocks, adam, adam_cfg);
      epoch_loss_sum += batch_loss;
      ++batch_index;
    }

    EpochStat stat;
    stat.epoch = epoch;
    stat.train_loss = epoch_loss_sum / static_cast<double>(windows.size());
    stat.val_auc = evaluate_mean_auc(model, val_convs, cfg.window_len).mean;
    report.epochs.push_back(stat);

    if (stat.val_auc > report.best_val_auc) {
      report.best_val_auc = stat.val_auc;
      report.best_epoch = epoch;
      result.model = model;
    }
    if (epoch - report.best_epoch >= cfg.patience) break;
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

}  // namespace medtag
