#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "medtag/common.hpp"
#include "medtag/corpus.hpp"
#include "medtag/features.hpp"
#include "medtag/prng.hpp"

namespace medtag {

// Inputs to exp() are clipped to +/-30; probabilities are clamped away from
// 0 and 1 inside the losses.
constexpr double kExpClip = 30.0;
constexpr double kProbEps = 1e-12;

inline double sigmoid(double x) {
  x = std::clamp(x, -kExpClip, kExpClip);
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double clamp_prob(double p) { return std::clamp(p, kProbEps, 1.0 - kProbEps); }

// ---------------------------------------------------------------------------
// LSTM
// ---------------------------------------------------------------------------

// Gate rows are stacked [input; forget; candidate; output], each hidden_dim
// rows. Standard cell, no peepholes.
struct LstmDirParams {
  Mat w_in;   // 4H x D
  Mat w_rec;  // 4H x H
  Vec bias;   // 4H

  int hidden_dim() const { return static_cast<int>(w_rec.cols()); }
  int input_dim() const { return static_cast<int>(w_in.cols()); }
};

struct LstmParams {
  LstmDirParams fwd, bwd;

  int hidden_dim() const { return fwd.hidden_dim(); }
  int input_dim() const { return fwd.input_dim(); }

  static LstmParams zeros(int input_dim, int hidden_dim) {
    LstmParams p;
    for (LstmDirParams* d : {&p.fwd, &p.bwd}) {
      d->w_in = Mat::Zero(4 * hidden_dim, input_dim);
      d->w_rec = Mat::Zero(4 * hidden_dim, hidden_dim);
      d->bias = Vec::Zero(4 * hidden_dim);
    }
    return p;
  }

  // Uniform [-1/sqrt(H), +1/sqrt(H)]; forget-gate bias starts at 1.
  static LstmParams init(int input_dim, int hidden_dim, Rng& rng) {
    LstmParams p = zeros(input_dim, hidden_dim);
    const double r = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    for (LstmDirParams* d : {&p.fwd, &p.bwd}) {
      for (int i = 0; i < d->w_in.rows(); ++i) {
        for (int j = 0; j < d->w_in.cols(); ++j) d->w_in(i, j) = rng.uniform(-r, r);
      }
      for (int i = 0; i < d->w_rec.rows(); ++i) {
        for (int j = 0; j < d->w_rec.cols(); ++j) d->w_rec(i, j) = rng.uniform(-r, r);
      }
      d->bias.setZero();
      d->bias.segment(hidden_dim, hidden_dim).setOnes();
    }
    return p;
  }
};

struct LstmDirCache {
  Mat gates;   // 4H x T, post-activation
  Mat cells;   // H x T
  Mat hidden;  // H x T
};

struct BiLstmCache {
  LstmDirCache fwd, bwd;
  Mat out;  // 2H x T: [forward hidden; backward hidden] per position
};

namespace nn_detail {

inline void lstm_dir_run(const LstmDirParams& p, const Mat& x, bool reverse,
                         LstmDirCache& cache) {
  const int T = static_cast<int>(x.cols());
  const int H = p.hidden_dim();
  cache.gates.resize(4 * H, T);
  cache.cells.resize(H, T);
  cache.hidden.resize(H, T);

  Mat pre = p.w_in * x;  // input projection for every step at once
  pre.colwise() += p.bias;

  Vec h_prev = Vec::Zero(H);
  Vec c_prev = Vec::Zero(H);
  for (int j = 0; j < T; ++j) {
    const int t = reverse ? T - 1 - j : j;
    Vec a = pre.col(t) + p.w_rec * h_prev;
    auto g = cache.gates.col(t);
    for (int i = 0; i < H; ++i) {
      g[i] = sigmoid(a[i]);                       // input gate
      g[H + i] = sigmoid(a[H + i]);               // forget gate
      g[2 * H + i] = std::tanh(a[2 * H + i]);     // candidate
      g[3 * H + i] = sigmoid(a[3 * H + i]);       // output gate
    }
    Vec c = g.segment(H, H).cwiseProduct(c_prev) + g.head(H).cwiseProduct(g.segment(2 * H, H));
    cache.cells.col(t) = c;
    cache.hidden.col(t) = g.segment(3 * H, H).cwiseProduct(c.array().tanh().matrix());
    h_prev = cache.hidden.col(t);
    c_prev = c;
  }
}

inline void lstm_dir_backward(const LstmDirParams& p, const Mat& x, bool reverse,
                              const LstmDirCache& cache, const Mat& d_hidden,
                              LstmDirParams& grad, Mat& d_x) {
  const int T = static_cast<int>(x.cols());
  const int H = p.hidden_dim();
  Mat d_pre(4 * H, T);

  Vec dh_carry = Vec::Zero(H);
  Vec dc_carry = Vec::Zero(H);
  for (int j = T - 1; j >= 0; --j) {
    const int t = reverse ? T - 1 - j : j;
    const int t_prev = reverse ? t + 1 : t - 1;  // previous step in processing order
    const auto g = cache.gates.col(t);
    const auto gi = g.head(H);
    const auto gf = g.segment(H, H);
    const auto gc = g.segment(2 * H, H);
    const auto go = g.segment(3 * H, H);
    const Vec tc = cache.cells.col(t).array().tanh().matrix();

    const Vec dh = d_hidden.col(t) + dh_carry;
    const Vec d_out_gate = dh.cwiseProduct(tc);
    const Vec dc = dc_carry + dh.cwiseProduct(go).cwiseProduct(
                                  (1.0 - tc.array().square()).matrix());
    const Vec c_prev = (j == 0) ? Vec(Vec::Zero(H)) : Vec(cache.cells.col(t_prev));

    auto da = d_pre.col(t);
    da.head(H) = dc.cwiseProduct(gc).cwiseProduct(gi).cwiseProduct((1.0 - gi.array()).matrix());
    da.segment(H, H) =
        dc.cwiseProduct(c_prev).cwiseProduct(gf).cwiseProduct((1.0 - gf.array()).matrix());
    da.segment(2 * H, H) = dc.cwiseProduct(gi).cwiseProduct((1.0 - gc.array().square()).matrix());
    da.segment(3 * H, H) =
        d_out_gate.cwiseProduct(go).cwiseProduct((1.0 - go.array()).matrix());

    dc_carry = dc.cwiseProduct(gf);
    dh_carry = p.w_rec.transpose() * da;
  }

  // Hidden states one processing step earlier, aligned with original indices.
  Mat h_prev = Mat::Zero(H, T);
  for (int j = 1; j < T; ++j) {
    const int t = reverse ? T - 1 - j : j;
    const int t_prev = reverse ? t + 1 : t - 1;
    h_prev.col(t) = cache.hidden.col(t_prev);
  }

  grad.w_in += d_pre * x.transpose();
  grad.w_rec += d_pre * h_prev.transpose();
  grad.bias += d_pre.rowwise().sum();
  d_x += p.w_in.transpose() * d_pre;
}

}  // namespace nn_detail

// Bidirectional LSTM; output at position i is [forward hidden; backward hidden].
inline BiLstmCache bilstm_forward(const LstmParams& p, const Mat& x) {
  if (x.cols() == 0) throw DataError("bilstm_forward: empty sequence");
  if (static_cast<int>(x.rows()) != p.input_dim()) {
    throw DataError("bilstm_forward: input dim " + std::to_string(x.rows()) +
                    " does not match parameters (" + std::to_string(p.input_dim()) + ")");
  }
  BiLstmCache cache;
  nn_detail::lstm_dir_run(p.fwd, x, /*reverse=*/false, cache.fwd);
  nn_detail::lstm_dir_run(p.bwd, x, /*reverse=*/true, cache.bwd);
  const int H = p.hidden_dim();
  cache.out.resize(2 * H, x.cols());
  cache.out.topRows(H) = cache.fwd.hidden;
  cache.out.bottomRows(H) = cache.bwd.hidden;
  return cache;
}

inline void bilstm_backward(const LstmParams& p, const Mat& x, const BiLstmCache& cache,
                            const Mat& d_out, LstmParams& grad, Mat& d_x) {
  const int H = p.hidden_dim();
  nn_detail::lstm_dir_backward(p.fwd, x, false, cache.fwd, d_out.topRows(H), grad.fwd, d_x);
  nn_detail::lstm_dir_backward(p.bwd, x, true, cache.bwd, d_out.bottomRows(H), grad.bwd, d_x);
}

// ---------------------------------------------------------------------------
// Multi-speaker BiLSTM: a background stream plus one stream per speaker role,
// mixed per position by a learned per-role sigmoid gate. The stream for role
// j contributes to the output only at positions spoken by j, so its
// parameters receive gradient only through those positions (and none at all
// from sequences where the role is absent).
// ---------------------------------------------------------------------------

struct MsBiLstmLayer {
  LstmParams background;
  std::array<LstmParams, kSpeakerRoleCount> speaker;
  std::array<double, kSpeakerRoleCount> gate_logits{};
  bool background_only = false;  // collapses the layer to the background BiLSTM

  int hidden_dim() const { return background.hidden_dim(); }
  int input_dim() const { return background.input_dim(); }

  double gate(int role) const { return sigmoid(gate_logits[static_cast<size_t>(role)]); }

  static MsBiLstmLayer zeros(int input_dim, int hidden_dim, bool background_only = false) {
    MsBiLstmLayer l;
    l.background = LstmParams::zeros(input_dim, hidden_dim);
    l.background_only = background_only;
    for (auto& sp : l.speaker) {
      sp = background_only ? LstmParams::zeros(0, 0) : LstmParams::zeros(input_dim, hidden_dim);
    }
    return l;
  }

  static MsBiLstmLayer init(int input_dim, int hidden_dim, Rng& rng,
                            bool background_only = false) {
    MsBiLstmLayer l;
    l.background = LstmParams::init(input_dim, hidden_dim, rng);
    l.background_only = background_only;
    for (auto& sp : l.speaker) {
      sp = background_only ? LstmParams::zeros(0, 0) : LstmParams::init(input_dim, hidden_dim, rng);
    }
    return l;
  }
};

struct MsCache {
  BiLstmCache bg;
  std::array<BiLstmCache, kSpeakerRoleCount> sp;
  std::array<bool, kSpeakerRoleCount> present{};
  Mat out;  // 2H x T
};

inline MsCache ms_forward(const MsBiLstmLayer& layer, const Mat& x,
                          const std::vector<int>& speakers) {
  if (static_cast<int>(speakers.size()) != x.cols()) {
    throw DataError("ms_forward: speaker list does not match sequence length");
  }
  MsCache cache;
  cache.bg = bilstm_forward(layer.background, x);
  if (layer.background_only) {
    cache.out = cache.bg.out;
    return cache;
  }
  for (int s : speakers) {
    if (s < 0 || s >= kSpeakerRoleCount) throw DataError("ms_forward: unknown speaker role");
    cache.present[static_cast<size_t>(s)] = true;
  }
  for (int s = 0; s < kSpeakerRoleCount; ++s) {
    if (cache.present[static_cast<size_t>(s)]) {
      cache.sp[static_cast<size_t>(s)] = bilstm_forward(layer.speaker[static_cast<size_t>(s)], x);
    }
  }
  cache.out.resize(cache.bg.out.rows(), cache.bg.out.cols());
  for (int t = 0; t < x.cols(); ++t) {
    const int s = speakers[static_cast<size_t>(t)];
    const double g = layer.gate(s);
    cache.out.col(t) =
        g * cache.sp[static_cast<size_t>(s)].out.col(t) + (1.0 - g) * cache.bg.out.col(t);
  }
  return cache;
}

inline void ms_backward(const MsBiLstmLayer& layer, const Mat& x,
                        const std::vector<int>& speakers, const MsCache& cache,
                        const Mat& d_out, MsBiLstmLayer& grad, Mat& d_x) {
  if (layer.background_only) {
    bilstm_backward(layer.background, x, cache.bg, d_out, grad.background, d_x);
    return;
  }
  const int T = static_cast<int>(x.cols());
  Mat d_bg = Mat::Zero(d_out.rows(), T);
  std::array<Mat, kSpeakerRoleCount> d_sp;
  for (int s = 0; s < kSpeakerRoleCount; ++s) {
    if (cache.present[static_cast<size_t>(s)]) d_sp[static_cast<size_t>(s)] = Mat::Zero(d_out.rows(), T);
  }
  for (int t = 0; t < T; ++t) {
    const int s = speakers[static_cast<size_t>(t)];
    const double g = layer.gate(s);
    d_bg.col(t) = (1.0 - g) * d_out.col(t);
    d_sp[static_cast<size_t>(s)].col(t) = g * d_out.col(t);
    grad.gate_logits[static_cast<size_t>(s)] +=
        d_out.col(t).dot(cache.sp[static_cast<size_t>(s)].out.col(t) - cache.bg.out.col(t)) * g *
        (1.0 - g);
  }
  bilstm_backward(layer.background, x, cache.bg, d_bg, grad.background, d_x);
  for (int s = 0; s < kSpeakerRoleCount; ++s) {
    if (cache.present[static_cast<size_t>(s)]) {
      bilstm_backward(layer.speaker[static_cast<size_t>(s)], x, cache.sp[static_cast<size_t>(s)],
                      d_sp[static_cast<size_t>(s)], grad.speaker[static_cast<size_t>(s)], d_x);
    }
  }
}

// ---------------------------------------------------------------------------
// Hierarchical utterance classifier
// ---------------------------------------------------------------------------

struct Ablations {
  bool no_hierarchy = false;  // drop the coarse branch; loss reduces to the fine loss
  bool plain_bilstm = false;  // background-only recurrent layers
  bool no_context = false;    // zero speaker/position/semantic segments, tables frozen
};

// Coarse class order: index 0 = medically relevant, 1 = irrelevant.
constexpr int kCoarseClasses = 2;
constexpr int kFineClasses = 3;

struct Model {
  FeatureConfig feat;
  int hidden_dim = 32;
  int semantic_rows = 8;
  double beta = 1.0;
  Ablations ablation;

  FeatureTables tables;
  MsBiLstmLayer coarse;
  Mat coarse_head_w;  // 2 x 2H
  Vec coarse_head_b;
  MsBiLstmLayer fine;
  Mat fine_head_w;  // 3 x 2H
  Vec fine_head_b;

  int fine_input_dim() const {
    return feat.feature_dim() + (ablation.no_hierarchy ? 0 : 2 * hidden_dim);
  }
};

inline Model make_model(const FeatureConfig& feat, int hidden_dim, int semantic_rows,
                        double beta, const Ablations& ablation, uint64_t seed) {
  feat.validate();
  if (hidden_dim < 1) throw UsageError("hidden_dim must be >= 1");
  if (beta < 0.0) throw UsageError("beta must be non-negative");
  Model m;
  m.feat = feat;
  m.hidden_dim = hidden_dim;
  m.semantic_rows = semantic_rows;
  m.beta = beta;
  m.ablation = ablation;

  Rng rng(seed);
  m.tables.speaker = EmbeddingTable::init(kSpeakerRoleCount, feat.speaker_dim, rng);
  m.tables.position = EmbeddingTable::init(feat.position_bins, feat.position_dim, rng);
  m.tables.semantic = EmbeddingTable::init(semantic_rows, feat.semantic_dim, rng);
  const bool bg_only = ablation.plain_bilstm;
  const int F = feat.feature_dim();
  if (!ablation.no_hierarchy) {
    m.coarse = MsBiLstmLayer::init(F, hidden_dim, rng, bg_only);
    const double r = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    m.coarse_head_w = Mat(kCoarseClasses, 2 * hidden_dim);
    for (int i = 0; i < m.coarse_head_w.rows(); ++i) {
      for (int j = 0; j < m.coarse_head_w.cols(); ++j) m.coarse_head_w(i, j) = rng.uniform(-r, r);
    }
    m.coarse_head_b = Vec::Zero(kCoarseClasses);
  }
  m.fine = MsBiLstmLayer::init(m.fine_input_dim(), hidden_dim, rng, bg_only);
  const double r = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  m.fine_head_w = Mat(kFineClasses, 2 * hidden_dim);
  for (int i = 0; i < m.fine_head_w.rows(); ++i) {
    for (int j = 0; j < m.fine_head_w.cols(); ++j) m.fine_head_w(i, j) = rng.uniform(-r, r);
  }
  m.fine_head_b = Vec::Zero(kFineClasses);
  return m;
}

inline Model zeros_like(const Model& m) {
  Model z = m;
  auto zero_lstm = [](LstmParams& p) {
    for (LstmDirParams* d : {&p.fwd, &p.bwd}) {
      d->w_in.setZero();
      d->w_rec.setZero();
      d->bias.setZero();
    }
  };
  auto zero_layer = [&](MsBiLstmLayer& l) {
    zero_lstm(l.background);
    for (auto& sp : l.speaker) zero_lstm(sp);
    l.gate_logits.fill(0.0);
  };
  z.tables.speaker.weights.setZero();
  z.tables.position.weights.setZero();
  z.tables.semantic.weights.setZero();
  zero_layer(z.coarse);
  if (z.coarse_head_w.size() > 0) z.coarse_head_w.setZero();
  if (z.coarse_head_b.size() > 0) z.coarse_head_b.setZero();
  zero_layer(z.fine);
  z.fine_head_w.setZero();
  z.fine_head_b.setZero();
  return z;
}

// Static per-utterance inputs for one window of a conversation.
struct WindowInput {
  std::string conv_id;
  int begin = 0;  // utterance range within the conversation
  Mat text;       // text_dim x T
  std::vector<int> speakers;
  std::vector<int> position_bins;
  std::vector<std::vector<int>> mentions;
  std::vector<FineLabelSet> gold;

  int length() const { return static_cast<int>(speakers.size()); }
};

inline Mat assemble_features_matrix(const Model& m, const WindowInput& in) {
  const auto& cfg = m.feat;
  const int T = in.length();
  Mat f = Mat::Zero(cfg.feature_dim(), T);
  f.middleRows(cfg.text_offset(), cfg.text_dim) = in.text;
  if (!m.ablation.no_context) {
    for (int t = 0; t < T; ++t) {
      f.col(t).segment(cfg.speaker_offset(), cfg.speaker_dim) =
          m.tables.speaker.lookup(in.speakers[static_cast<size_t>(t)]);
      f.col(t).segment(cfg.position_offset(), cfg.position_dim) =
          m.tables.position.lookup(in.position_bins[static_cast<size_t>(t)]);
      f.col(t).segment(cfg.semantic_offset(), cfg.semantic_dim) =
          semantic_type_vector(in.mentions[static_cast<size_t>(t)], m.tables.semantic);
    }
  }
  return f;
}

struct ForwardCache {
  Mat features;                 // F x T
  MsCache coarse;               // empty under no_hierarchy
  Mat coarse_logits, p_coarse;  // 2 x T
  Mat fine_input;               // fine_input_dim x T
  MsCache fine;
  Mat fine_logits, p_fine;  // 3 x T
};

inline ForwardCache forward(const Model& m, const WindowInput& in) {
  if (in.length() == 0) throw DataError("forward: empty window");
  ForwardCache fc;
  fc.features = assemble_features_matrix(m, in);
  const int T = in.length();
  if (!m.ablation.no_hierarchy) {
    fc.coarse = ms_forward(m.coarse, fc.features, in.speakers);
    fc.coarse_logits = m.coarse_head_w * fc.coarse.out;
    fc.coarse_logits.colwise() += m.coarse_head_b;
    fc.p_coarse.resize(kCoarseClasses, T);
    for (int t = 0; t < T; ++t) {
      const double a = std::clamp(fc.coarse_logits(0, t), -kExpClip, kExpClip);
      const double b = std::clamp(fc.coarse_logits(1, t), -kExpClip, kExpClip);
      const double mx = std::max(a, b);
      const double ea = std::exp(a - mx), eb = std::exp(b - mx);
      fc.p_coarse(0, t) = ea / (ea + eb);
      fc.p_coarse(1, t) = eb / (ea + eb);
    }
    fc.fine_input.resize(m.fine_input_dim(), T);
    fc.fine_input.topRows(m.feat.feature_dim()) = fc.features;
    fc.fine_input.bottomRows(2 * m.hidden_dim) = fc.coarse.out;
  } else {
    fc.fine_input = fc.features;
  }
  fc.fine = ms_forward(m.fine, fc.fine_input, in.speakers);
  fc.fine_logits = m.fine_head_w * fc.fine.out;
  fc.fine_logits.colwise() += m.fine_head_b;
  fc.p_fine = fc.fine_logits.unaryExpr([](double x) { return sigmoid(x); });
  return fc;
}

struct LossReport {
  double total = 0.0;
  double fine = 0.0;
  double coarse = 0.0;
  Mat p_fine;    // 3 x T
  Mat p_coarse;  // 2 x T (empty under no_hierarchy)
};

// The coarse gold class is derived from the fine labels: relevant iff any
// fine label is set. L_fine is the mean binary cross-entropy over utterances
// and the three classes; L_coarse the mean two-class cross-entropy.
inline LossReport joint_loss(const Mat& p_fine, const Mat& p_coarse,
                             const std::vector<FineLabelSet>& gold, double beta) {
  const int T = static_cast<int>(gold.size());
  if (p_fine.cols() != T) throw DataError("joint_loss: probability/gold length mismatch");
  LossReport report;
  report.p_fine = p_fine;
  report.p_coarse = p_coarse;
  double fine_sum = 0.0;
  for (int t = 0; t < T; ++t) {
    for (int c = 0; c < kFineClasses; ++c) {
      const double p = clamp_prob(p_fine(c, t));
      const bool y = gold[static_cast<size_t>(t)].get(static_cast<Task>(c));
      fine_sum += y ? -std::log(p) : -std::log(1.0 - p);
    }
  }
  report.fine = fine_sum / (kFineClasses * T);
  if (p_coarse.size() > 0) {
    double coarse_sum = 0.0;
    for (int t = 0; t < T; ++t) {
      const int y = gold[static_cast<size_t>(t)].any() ? 0 : 1;
      coarse_sum += -std::log(clamp_prob(p_coarse(y, t)));
    }
    report.coarse = coarse_sum / T;
    report.total = report.fine + beta * report.coarse;
  } else {
    report.coarse = 0.0;
    report.total = report.fine;
  }
  return report;
}

inline LossReport compute_loss(const Model& m, const ForwardCache& fc,
                               const WindowInput& in) {
  return joint_loss(fc.p_fine, fc.p_coarse, in.gold, m.beta);
}

// Reverse-mode gradients for every trainable parameter, accumulated into
// `grads` (a zeros_like clone of the model).
inline void backward(const Model& m, const WindowInput& in, const ForwardCache& fc,
                     Model& grads) {
  const int T = in.length();
  const int F = m.feat.feature_dim();

  Mat d_fine_logits(kFineClasses, T);
  for (int t = 0; t < T; ++t) {
    for (int c = 0; c < kFineClasses; ++c) {
      const double y = in.gold[static_cast<size_t>(t)].get(static_cast<Task>(c)) ? 1.0 : 0.0;
      d_fine_logits(c, t) = (fc.p_fine(c, t) - y) / (kFineClasses * T);
    }
  }
  grads.fine_head_w += d_fine_logits * fc.fine.out.transpose();
  grads.fine_head_b += d_fine_logits.rowwise().sum();

  Mat d_h_fine = m.fine_head_w.transpose() * d_fine_logits;
  Mat d_fine_in = Mat::Zero(fc.fine_input.rows(), T);
  ms_backward(m.fine, fc.fine_input, in.speakers, fc.fine, d_h_fine, grads.fine, d_fine_in);

  Mat d_features = d_fine_in.topRows(F);
  if (!m.ablation.no_hierarchy) {
    Mat d_h_coarse = d_fine_in.bottomRows(2 * m.hidden_dim);
    if (m.beta != 0.0) {
      Mat d_coarse_logits(kCoarseClasses, T);
      for (int t = 0; t < T; ++t) {
        const int y = in.gold[static_cast<size_t>(t)].any() ? 0 : 1;
        for (int c = 0; c < kCoarseClasses; ++c) {
          d_coarse_logits(c, t) =
              m.beta * (fc.p_coarse(c, t) - (c == y ? 1.0 : 0.0)) / T;
        }
      }
      grads.coarse_head_w += d_coarse_logits * fc.coarse.out.transpose();
      grads.coarse_head_b += d_coarse_logits.rowwise().sum();
      d_h_coarse += m.coarse_head_w.transpose() * d_coarse_logits;
    }
    ms_backward(m.coarse, fc.features, in.speakers, fc.coarse, d_h_coarse, grads.coarse,
                d_features);
  }

  if (!m.ablation.no_context) {
    const auto& cfg = m.feat;
    for (int t = 0; t < T; ++t) {
      grads.tables.speaker.weights.row(in.speakers[static_cast<size_t>(t)]) +=
          d_features.col(t).segment(cfg.speaker_offset(), cfg.speaker_dim).transpose();
      grads.tables.position.weights.row(in.position_bins[static_cast<size_t>(t)]) +=
          d_features.col(t).segment(cfg.position_offset(), cfg.position_dim).transpose();
      const auto& mentions = in.mentions[static_cast<size_t>(t)];
      if (!mentions.empty()) {
        const double inv = 1.0 / static_cast<double>(mentions.size());
        for (int id : mentions) {
          grads.tables.semantic.weights.row(id) +=
              inv * d_features.col(t).segment(cfg.semantic_offset(), cfg.semantic_dim).transpose();
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Parameter enumeration (shared by the optimizer, checkpoints, and the
// gradient checker). Blocks excluded by an ablation are not listed.
// ---------------------------------------------------------------------------

struct ParamBlock {
  std::string name;
  double* data = nullptr;
  size_t size = 0;
  std::vector<size_t> dims;
};

namespace nn_detail {

inline void append_mat(std::vector<ParamBlock>& out, const std::string& name, Mat& m) {
  out.push_back({name, m.data(), static_cast<size_t>(m.size()),
                 {static_cast<size_t>(m.rows()), static_cast<size_t>(m.cols())}});
}
inline void append_vec(std::vector<ParamBlock>& out, const std::string& name, Vec& v) {
  out.push_back({name, v.data(), static_cast<size_t>(v.size()), {static_cast<size_t>(v.size())}});
}
inline void append_lstm(std::vector<ParamBlock>& out, const std::string& prefix, LstmParams& p) {
  append_mat(out, prefix + ".fwd.w_in", p.fwd.w_in);
  append_mat(out, prefix + ".fwd.w_rec", p.fwd.w_rec);
  append_vec(out, prefix + ".fwd.bias", p.fwd.bias);
  append_mat(out, prefix + ".bwd.w_in", p.bwd.w_in);
  append_mat(out, prefix + ".bwd.w_rec", p.bwd.w_rec);
  append_vec(out, prefix + ".bwd.bias", p.bwd.bias);
}
inline void append_ms_layer(std::vector<ParamBlock>& out, const std::string& prefix,
                            MsBiLstmLayer& l) {
  append_lstm(out, prefix + ".bg", l.background);
  if (!l.background_only) {
    static constexpr std::array<const char*, 3> kRoleTags = {"dr", "pt", "ot"};
    for (int s = 0; s < kSpeakerRoleCount; ++s) {
      append_lstm(out, prefix + ".sp_" + kRoleTags[static_cast<size_t>(s)],
                  l.speaker[static_cast<size_t>(s)]);
    }
    out.push_back({prefix + ".gates", l.gate_logits.data(), l.gate_logits.size(),
                   {l.gate_logits.size()}});
  }
}

}  // namespace nn_detail

inline std::vector<ParamBlock> param_blocks(Model& m) {
  std::vector<ParamBlock> out;
  if (!m.ablation.no_context) {
    nn_detail::append_mat(out, "feat.speaker_emb", m.tables.speaker.weights);
    nn_detail::append_mat(out, "feat.position_emb", m.tables.position.weights);
    nn_detail::append_mat(out, "feat.semantic_emb", m.tables.semantic.weights);
  }
  if (!m.ablation.no_hierarchy) {
    nn_detail::append_ms_layer(out, "coarse", m.coarse);
    nn_detail::append_mat(out, "coarse_head.w", m.coarse_head_w);
    nn_detail::append_vec(out, "coarse_head.b", m.coarse_head_b);
  }
  nn_detail::append_ms_layer(out, "fine", m.fine);
  nn_detail::append_mat(out, "fine_head.w", m.fine_head_w);
  nn_detail::append_vec(out, "fine_head.b", m.fine_head_b);
  return out;
}

inline size_t param_count(Model& m) {
  size_t n = 0;
  for (const auto& b : param_blocks(m)) n += b.size;
  return n;
}

// ---------------------------------------------------------------------------
// Finite-difference gradient check
// ---------------------------------------------------------------------------

struct GradCheckBlock {
  std::string name;
  double max_rel_err = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckBlock> blocks;
  double worst = 0.0;
  std::string worst_block;
  bool pass = true;
};

// Central differences on every parameter against the supplied analytic
// gradients. Relative error uses max(|analytic|, |numeric|, 1e-8) in the
// denominator so plateaus at zero do not spuriously fail.
inline GradCheckReport gradient_check_against(std::vector<ParamBlock> params,
                                              const std::vector<ParamBlock>& analytic,
                                              const std::function<double()>& loss_fn,
                                              double step, double tolerance) {
  if (params.size() != analytic.size()) {
    throw UsageError("gradient_check: parameter and gradient block lists differ");
  }
  GradCheckReport report;
  for (size_t b = 0; b < params.size(); ++b) {
    if (params[b].size != analytic[b].size) {
      throw UsageError("gradient_check: block size mismatch at " + params[b].name);
    }
    GradCheckBlock block;
    block.name = params[b].name;
    for (size_t i = 0; i < params[b].size; ++i) {
      double& x = params[b].data[i];
      const double saved = x;
      x = saved + step;
      const double up = loss_fn();
      x = saved - step;
      const double down = loss_fn();
      x = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[b].data[i];
      if (!std::isfinite(numeric) || !std::isfinite(a)) {
        throw NumericError("gradient_check: non-finite value in block " + params[b].name);
      }
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      block.max_rel_err = std::max(block.max_rel_err, std::abs(a - numeric) / denom);
    }
    if (block.max_rel_err > report.worst) {
      report.worst = block.max_rel_err;
      report.worst_block = block.name;
    }
    report.blocks.push_back(std::move(block));
  }
  report.pass = report.worst < tolerance;
  return report;
}

// Gradient check of the full model on one window.
inline GradCheckReport gradient_check(Model& model, const WindowInput& input,
                                      double step = 1e-4, double tolerance = 1e-4) {
  Model grads = zeros_like(model);
  {
    const ForwardCache fc = forward(model, input);
    backward(model, input, fc, grads);
  }
  auto loss_fn = [&]() {
    const ForwardCache fc = forward(model, input);
    return compute_loss(model, fc, input).total;
  };
  return gradient_check_against(param_blocks(model), param_blocks(grads), loss_fn, step,
                                tolerance);
}

}  // namespace medtag
