#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "medtag/common.hpp"
#include "medtag/nn.hpp"
#include "medtag/prng.hpp"
#include "medtag/train.hpp"

namespace medtag {

// Conversation-level multi-label extractor: BiLSTM over utterance embeddings,
// the final state re-weighted by attention over all positions, then a linear
// sigmoid classifier over the task's label vocabulary.
struct AttnExtractor {
  LstmParams lstm;
  Mat w_out;  // n_labels x 2H
  Vec b_out;

  int hidden_dim() const { return lstm.hidden_dim(); }
  int n_labels() const { return static_cast<int>(b_out.size()); }

  static AttnExtractor init(int input_dim, int hidden_dim, int n_labels, uint64_t seed) {
    AttnExtractor e;
    Rng rng(seed);
    e.lstm = LstmParams::init(input_dim, hidden_dim, rng);
    const double r = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    e.w_out = Mat(n_labels, 2 * hidden_dim);
    for (int i = 0; i < e.w_out.rows(); ++i) {
      for (int j = 0; j < e.w_out.cols(); ++j) e.w_out(i, j) = rng.uniform(-r, r);
    }
    e.b_out = Vec::Zero(n_labels);
    return e;
  }

  static AttnExtractor zeros_like(const AttnExtractor& e) {
    AttnExtractor z;
    z.lstm = LstmParams::zeros(e.lstm.input_dim(), e.lstm.hidden_dim());
    z.w_out = Mat::Zero(e.w_out.rows(), e.w_out.cols());
    z.b_out = Vec::Zero(e.b_out.size());
    return z;
  }
};

inline std::vector<ParamBlock> param_blocks(AttnExtractor& e) {
  std::vector<ParamBlock> out;
  nn_detail::append_lstm(out, "attn.lstm", e.lstm);
  nn_detail::append_mat(out, "attn.w_out", e.w_out);
  nn_detail::append_vec(out, "attn.b_out", e.b_out);
  return out;
}

struct AttnForward {
  BiLstmCache lstm;
  Vec h_final;     // [backward hidden at 0; forward hidden at n-1]
  Vec attention;   // softmax over positions, sums to 1
  Vec h_weighted;  // attention-weighted sum of hidden states
  Vec logits;
  Vec probs;
};

inline AttnForward attn_forward(const AttnExtractor& e, const Mat& x) {
  if (x.cols() == 0) throw DataError("attn_forward: empty sequence");
  AttnForward fc;
  fc.lstm = bilstm_forward(e.lstm, x);
  const int H = e.hidden_dim();
  const int T = static_cast<int>(x.cols());
  fc.h_final.resize(2 * H);
  fc.h_final.head(H) = fc.lstm.out.col(0).tail(H);       // backward direction, first position
  fc.h_final.tail(H) = fc.lstm.out.col(T - 1).head(H);   // forward direction, last position
  Vec scores = fc.lstm.out.transpose() * fc.h_final;
  const double mx = scores.maxCoeff();
  fc.attention = (scores.array() - mx).min(kExpClip).max(-kExpClip).exp();
  fc.attention /= fc.attention.sum();
  fc.h_weighted = fc.lstm.out * fc.attention;
  fc.logits = e.w_out * fc.h_weighted + e.b_out;
  fc.probs = fc.logits.unaryExpr([](double v) { return sigmoid(v); });
  return fc;
}

// Mean binary cross-entropy over the label vocabulary.
inline double attn_loss(const AttnForward& fc, const std::vector<bool>& gold) {
  if (static_cast<int>(gold.size()) != fc.probs.size()) {
    throw DataError("attn_loss: label count mismatch");
  }
  double sum = 0.0;
  for (int c = 0; c < fc.probs.size(); ++c) {
    const double p = clamp_prob(fc.probs[c]);
    sum += gold[static_cast<size_t>(c)] ? -std::log(p) : -std::log(1.0 - p);
  }
  return sum / static_cast<double>(fc.probs.size());
}

inline void attn_backward(const AttnExtractor& e, const Mat& x, const AttnForward& fc,
                          const std::vector<bool>& gold, AttnExtractor& grads) {
  const int H = e.hidden_dim();
  const int T = static_cast<int>(x.cols());
  const int L = e.n_labels();

  Vec d_logits(L);
  for (int c = 0; c < L; ++c) {
    d_logits[c] = (fc.probs[c] - (gold[static_cast<size_t>(c)] ? 1.0 : 0.0)) / L;
  }
  grads.w_out += d_logits * fc.h_weighted.transpose();
  grads.b_out += d_logits;

  const Vec d_h_weighted = e.w_out.transpose() * d_logits;
  const Vec d_attention = fc.lstm.out.transpose() * d_h_weighted;
  Mat d_hidden = d_h_weighted * fc.attention.transpose();  // 2H x T

  // Softmax backward.
  const double dot = fc.attention.dot(d_attention);
  const Vec d_scores = fc.attention.cwiseProduct(d_attention.array().matrix() -
                                                 Vec::Constant(T, dot));
  Vec d_h_final = fc.lstm.out * d_scores;
  d_hidden += fc.h_final * d_scores.transpose();

  d_hidden.col(0).tail(H) += d_h_final.head(H);
  d_hidden.col(T - 1).head(H) += d_h_final.tail(H);

  Mat d_x = Mat::Zero(x.rows(), T);
  bilstm_backward(e.lstm, x, fc.lstm, d_hidden, grads.lstm, d_x);
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct AttnExample {
  Mat inputs;              // text_dim x n (kept utterances only)
  std::vector<bool> gold;  // multi-hot over the label vocabulary
};

struct AttnTrainConfig {
  double learning_rate = 0.003;
  int batch_size = 8;
  int max_epochs = 60;
  uint64_t seed = 13;
  double clip_norm = 5.0;
};

inline std::vector<double> train_attn(AttnExtractor& model, const std::vector<AttnExample>& data,
                                      const AttnTrainConfig& cfg) {
  if (data.empty()) throw DataError("train_attn: no training examples");
  auto params = param_blocks(model);
  AdamState adam = AdamState::init(params);
  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.learning_rate;

  AttnExtractor grads = AttnExtractor::zeros_like(model);
  auto grad_blocks = param_blocks(grads);

  Rng rng(cfg.seed + 1);
  std::vector<size_t> order(data.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<double> epoch_losses;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    for (size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<size_t>(rng.next_below(i))]);
    }
    double loss_sum = 0.0;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch_size)) {
      const size_t stop = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      for (auto& b : grad_blocks) std::fill(b.data, b.data + b.size, 0.0);
      double batch_loss = 0.0;
      for (size_t i = start; i < stop; ++i) {
        const AttnExample& ex = data[order[i]];
        const AttnForward fc = attn_forward(model, ex.inputs);
        batch_loss += attn_loss(fc, ex.gold);
        attn_backward(model, ex.inputs, fc, ex.gold, grads);
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericError("train_attn: non-finite loss in epoch " + std::to_string(epoch));
      }
      scale_gradients(grad_blocks, 1.0 / static_cast<double>(stop - start));
      const double norm = gradient_global_norm(grad_blocks);
      if (norm > cfg.clip_norm) scale_gradients(grad_blocks, cfg.clip_norm / norm);
      adam_step(params, grad_blocks, adam, adam_cfg);
      loss_sum += batch_loss;
    }
    epoch_losses.push_back(loss_sum / static_cast<double>(data.size()));
  }
  return epoch_losses;
}

// Labels whose probability reaches 0.5.
inline std::vector<bool> attn_predict(const AttnExtractor& model, const Mat& inputs) {
  std::vector<bool> out(static_cast<size_t>(model.n_labels()), false);
  if (inputs.cols() == 0) return out;
  const AttnForward fc = attn_forward(model, inputs);
  for (int c = 0; c < fc.probs.size(); ++c) out[static_cast<size_t>(c)] = fc.probs[c] >= 0.5;
  return out;
}

}  // namespace medtag
