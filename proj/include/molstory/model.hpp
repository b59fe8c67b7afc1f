//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLSTORY_MODEL_HPP
#define MOLSTORY_MODEL_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "molstory/geometry.hpp"
#include "molstory/tensor.hpp"

namespace molstory {

struct ModelConfig {
  int frag_vocab = 0;
  int atype_vocab = 0;
  int action_count = 0;  // (fragment, attachment) pairs; cauterize adds one
  int d_f = 256;
  int d_a = 64;
  int heads = 8;
  int layers = 3;
  int ff_hidden = 512;
  double dropout = 0.3;
  double geometry_scale_init = 1.0;
  bool freeze_geometry = false;

  int head_input_dim() const { return d_f + 3 + d_a + 3; }
  int logit_count() const { return action_count + 1; }
};

/// All learnable tensors of the autoregressive model.
struct ModelParams {
  ModelConfig config;

  Tensor frag_embed;   // [Vf, d_f]
  Tensor atype_embed;  // [K, d_a]
  Tensor sc_w;         // [6, d_f] saturation+conditions projector
  Tensor sc_b;         // [d_f]

  struct Layer {
    Tensor wq, wk, wv, wo;          // [d_f, d_f]
    Tensor bq, bk, bv, bo;          // [d_f]
    Tensor ln1_g, ln1_b, ln2_g, ln2_b;  // [d_f]
    Tensor ff_w1, ff_b1, ff_w2, ff_b2;  // [d_f, ff], [ff], [ff, d_f], [d_f]
  };
  std::vector<Layer> layers;

  Tensor geometry_scale;  // [1]
  Tensor head_w;          // [d_f + 3 + d_a + 3, A+1]
  Tensor head_b;          // [A+1]

  // Condition standardization constants from the training split (not
  // trainable, persisted with the weights).
  Tensor cond_mean;  // [3]
  Tensor cond_std;   // [3]

  static ModelParams init(const ModelConfig& cfg, std::uint64_t seed) {
    Rng rng(Rng::stream(seed, 0x4d4f44454cULL));
    ModelParams p;
    p.config = cfg;
    p.frag_embed = Tensor::init_uniform({cfg.frag_vocab, cfg.d_f}, cfg.d_f, rng);
    p.atype_embed =
        Tensor::init_uniform({std::max(1, cfg.atype_vocab), cfg.d_a}, cfg.d_a, rng);
    p.sc_w = Tensor::init_uniform({6, cfg.d_f}, 6, rng);
    p.sc_b = Tensor::zeros({cfg.d_f}, true);
    for (int l = 0; l < cfg.layers; ++l) {
      Layer layer;
      layer.wq = Tensor::init_uniform({cfg.d_f, cfg.d_f}, cfg.d_f, rng);
      layer.wk = Tensor::init_uniform({cfg.d_f, cfg.d_f}, cfg.d_f, rng);
      layer.wv = Tensor::init_uniform({cfg.d_f, cfg.d_f}, cfg.d_f, rng);
      layer.wo = Tensor::init_uniform({cfg.d_f, cfg.d_f}, cfg.d_f, rng);
      layer.bq = Tensor::zeros({cfg.d_f}, true);
      layer.bk = Tensor::zeros({cfg.d_f}, true);
      layer.bv = Tensor::zeros({cfg.d_f}, true);
      layer.bo = Tensor::zeros({cfg.d_f}, true);
      layer.ln1_g = Tensor::full({cfg.d_f}, 1.0, true);
      layer.ln1_b = Tensor::zeros({cfg.d_f}, true);
      layer.ln2_g = Tensor::full({cfg.d_f}, 1.0, true);
      layer.ln2_b = Tensor::zeros({cfg.d_f}, true);
      layer.ff_w1 = Tensor::init_uniform({cfg.d_f, cfg.ff_hidden}, cfg.d_f, rng);
      layer.ff_b1 = Tensor::zeros({cfg.ff_hidden}, true);
      layer.ff_w2 = Tensor::init_uniform({cfg.ff_hidden, cfg.d_f}, cfg.ff_hidden, rng);
      layer.ff_b2 = Tensor::zeros({cfg.d_f}, true);
      p.layers.push_back(std::move(layer));
    }
    p.geometry_scale =
        Tensor::full({1}, cfg.geometry_scale_init, !cfg.freeze_geometry);
    p.head_w = Tensor::init_uniform({cfg.head_input_dim(), cfg.logit_count()},
                                    cfg.head_input_dim(), rng);
    p.head_b = Tensor::zeros({cfg.logit_count()}, true);
    p.cond_mean = Tensor::zeros({3});
    p.cond_std = Tensor::full({3}, 1.0);
    return p;
  }

  /// Trainable tensors in a fixed order (frozen geometry scale excluded).
  std::vector<std::pair<std::string, Tensor>> trainable() const {
    std::vector<std::pair<std::string, Tensor>> out;
    out.emplace_back("frag_embed", frag_embed);
    out.emplace_back("atype_embed", atype_embed);
    out.emplace_back("sc_w", sc_w);
    out.emplace_back("sc_b", sc_b);
    for (std::size_t l = 0; l < layers.size(); ++l) {
      std::string pfx = "layer" + std::to_string(l) + ".";
      const Layer& ly = layers[l];
      out.emplace_back(pfx + "wq", ly.wq);
      out.emplace_back(pfx + "wk", ly.wk);
      out.emplace_back(pfx + "wv", ly.wv);
      out.emplace_back(pfx + "wo", ly.wo);
      out.emplace_back(pfx + "bq", ly.bq);
      out.emplace_back(pfx + "bk", ly.bk);
      out.emplace_back(pfx + "bv", ly.bv);
      out.emplace_back(pfx + "bo", ly.bo);
      out.emplace_back(pfx + "ln1_g", ly.ln1_g);
      out.emplace_back(pfx + "ln1_b", ly.ln1_b);
      out.emplace_back(pfx + "ln2_g", ly.ln2_g);
      out.emplace_back(pfx + "ln2_b", ly.ln2_b);
      out.emplace_back(pfx + "ff_w1", ly.ff_w1);
      out.emplace_back(pfx + "ff_b1", ly.ff_b1);
      out.emplace_back(pfx + "ff_w2", ly.ff_w2);
      out.emplace_back(pfx + "ff_b2", ly.ff_b2);
    }
    if (!config.freeze_geometry)
      out.emplace_back("geometry_scale", geometry_scale);
    out.emplace_back("head_w", head_w);
    out.emplace_back("head_b", head_b);
    return out;
  }

  std::vector<std::pair<std::string, Tensor>> all_tensors() const {
    auto out = trainable();
    if (config.freeze_geometry)
      out.emplace_back("geometry_scale", geometry_scale);
    out.emplace_back("cond_mean", cond_mean);
    out.emplace_back("cond_std", cond_std);
    return out;
  }
};

/// One story step as the model sees it: the state before the step plus the
/// sampled focal site, fully featurized.
struct StepFeatures {
  std::vector<int> frag_ids;
  std::vector<std::array<double, 3>> saturations;  // scaled to [-1, 1]
  std::array<double, 3> conditions{};              // standardized
  DistanceMatrix distances;                        // fragment x fragment
  std::vector<double> attachment_distances;        // per fragment
  int focal_index = 0;
  int atype_id = 0;
  int label = -1;  // index into the action vocabulary; last = cauterize
};

struct ForwardOptions {
  bool train = false;
  bool apply_distance_bias = true;
  Rng* dropout_rng = nullptr;
};

namespace detail {

inline std::vector<double> dropout_mask(std::size_t n, double rate, Rng& rng) {
  std::vector<double> mask(n);
  double keep = 1.0 - rate;
  for (auto& x : mask) x = rng.uniform() < rate ? 0.0 : 1.0 / keep;
  return mask;
}

inline Tensor maybe_dropout(const Tensor& t, const ModelConfig& cfg,
                            const ForwardOptions& opt) {
  if (!opt.train || cfg.dropout <= 0.0) return t;
  if (!opt.dropout_rng) throw Error("training forward needs a dropout rng");
  return ops::apply_mask(
      t, dropout_mask(t.value().size(), cfg.dropout, *opt.dropout_rng));
}

/// Multi-head attention with a shared distance discount on the logits:
/// softmax((Q K^T)/sqrt(d_head) - a * D) V per head. `queries` may hold a
/// single row (final layer) while keys/values span all fragments; `bias`
/// must then be 1 x n.
inline Tensor geometry_attention_block(const Tensor& queries,
                                       const Tensor& keys,
                                       const Tensor& values,
                                       const std::vector<double>& bias_flat,
                                       const Tensor& geometry_scale,
                                       int heads, bool apply_bias) {
  int qn = queries.shape()[0];
  int kn = keys.shape()[0];
  int d = queries.shape()[1];
  if (d % heads != 0) throw Error("model width not divisible by head count");
  int dh = d / heads;
  double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Tensor> head_outputs;
  for (int h = 0; h < heads; ++h) {
    Tensor qh = ops::slice_cols(queries, h * dh, (h + 1) * dh);
    Tensor kh = ops::slice_cols(keys, h * dh, (h + 1) * dh);
    Tensor vh = ops::slice_cols(values, h * dh, (h + 1) * dh);
    Tensor scores = ops::scale(ops::matmul(qh, ops::transpose(kh)), inv_sqrt);
    if (apply_bias) {
      Tensor discount =
          ops::scalar_times_const(geometry_scale, {qn, kn}, bias_flat);
      scores = ops::sub(scores, discount);
    }
    head_outputs.push_back(ops::matmul(ops::row_softmax(scores), vh));
  }
  return ops::concat_cols(head_outputs);
}

}  // namespace detail

/// Geometry-biased scaled dot-product attention over full tensors (one
/// logical head). Exposed for direct testing; forward_step uses the same
/// computation per head.
inline Tensor geometry_attention(const Tensor& queries, const Tensor& keys,
                                 const Tensor& values,
                                 const DistanceMatrix& distances,
                                 const Tensor& geometry_scale) {
  int qn = queries.shape()[0];
  int kn = keys.shape()[0];
  if (distances.n != kn || static_cast<int>(distances.d.size()) != qn * kn)
    throw Error("distance matrix shape mismatch");
  return detail::geometry_attention_block(queries, keys, values, distances.d,
                                          geometry_scale, 1, true);
}

/// Full forward pass for one story step: per-fragment embeddings with
/// projected saturation/condition features, N-1 self-attention layers with
/// fragment-fragment distance discounts, a final layer whose sole query is
/// the focal fragment biased by attachment distances, and the output head
/// over [hidden, focal saturation, attachment-type embedding, conditions].
/// No positional embeddings anywhere.
inline Tensor forward_step(const StepFeatures& f, const ModelParams& p,
                           const ForwardOptions& opt = {}) {
  const ModelConfig& cfg = p.config;
  const int n = static_cast<int>(f.frag_ids.size());
  if (n == 0) throw Error("forward_step needs at least one fragment");
  for (int id : f.frag_ids)
    if (id < 0 || id >= cfg.frag_vocab) throw Error("fragment not in vocabulary");

  // Standardized conditions enter both the per-fragment projector and the
  // output head.
  std::vector<double> sc_flat;
  for (int i = 0; i < n; ++i) {
    for (double s : f.saturations[i]) sc_flat.push_back(s);
    for (double c : f.conditions) sc_flat.push_back(c);
  }
  Tensor sc_in = Tensor::from_values({n, 6}, sc_flat);
  Tensor x = ops::add(ops::gather_rows(p.frag_embed, f.frag_ids),
                      ops::add_row_broadcast(ops::matmul(sc_in, p.sc_w), p.sc_b));

  auto attention_layer = [&](const ModelParams::Layer& ly, const Tensor& input,
                             bool final_layer) {
    Tensor h = ops::layer_norm_rows(input, ly.ln1_g, ly.ln1_b);
    Tensor q = ops::add_row_broadcast(ops::matmul(h, ly.wq), ly.bq);
    Tensor k = ops::add_row_broadcast(ops::matmul(h, ly.wk), ly.bk);
    Tensor v = ops::add_row_broadcast(ops::matmul(h, ly.wv), ly.bv);
    Tensor residual = input;
    Tensor attn;
    if (final_layer) {
      q = ops::gather_rows(q, {f.focal_index});
      residual = ops::gather_rows(input, {f.focal_index});
      attn = detail::geometry_attention_block(
          q, k, v, f.attachment_distances, p.geometry_scale, cfg.heads,
          opt.apply_distance_bias);
    } else {
      attn = detail::geometry_attention_block(q, k, v, f.distances.d,
                                              p.geometry_scale, cfg.heads,
                                              opt.apply_distance_bias);
    }
    attn = ops::add_row_broadcast(ops::matmul(attn, ly.wo), ly.bo);
    attn = detail::maybe_dropout(attn, cfg, opt);
    Tensor mid = ops::add(residual, attn);
    Tensor h2 = ops::layer_norm_rows(mid, ly.ln2_g, ly.ln2_b);
    Tensor ff = ops::add_row_broadcast(
        ops::matmul(ops::gelu(ops::add_row_broadcast(ops::matmul(h2, ly.ff_w1),
                                                     ly.ff_b1)),
                    ly.ff_w2),
        ly.ff_b2);
    ff = detail::maybe_dropout(ff, cfg, opt);
    return ops::add(mid, ff);
  };

  for (int l = 0; l + 1 < cfg.layers; ++l)
    x = attention_layer(p.layers[l], x, false);
  Tensor hidden = attention_layer(p.layers[cfg.layers - 1], x, true);

  std::vector<double> focal_sat(f.saturations[f.focal_index].begin(),
                                f.saturations[f.focal_index].end());
  Tensor head_in = ops::concat_cols(
      {hidden, Tensor::from_values({1, 3}, focal_sat),
       ops::gather_rows(p.atype_embed, {f.atype_id}),
       Tensor::from_values({1, 3}, {f.conditions[0], f.conditions[1],
                                    f.conditions[2]})});
  return ops::add_row_broadcast(ops::matmul(head_in, p.head_w), p.head_b);
}

/// Mean negative log-likelihood of the true next action over all steps.
inline Tensor story_loss(const std::vector<StepFeatures>& steps,
                         const ModelParams& p, const ForwardOptions& opt = {}) {
  if (steps.empty()) throw Error("empty step batch");
  std::vector<Tensor> losses;
  for (const auto& s : steps) {
    Tensor logits = forward_step(s, p, opt);
    losses.push_back(ops::cross_entropy_rows(logits, {s.label}));
  }
  return ops::scale(ops::add_scalars(losses),
                    1.0 / static_cast<double>(losses.size()));
}

// ---------------------------------------------------------------------------
// Fragment initializer: conditions -> per-fragment presence probabilities.
// ---------------------------------------------------------------------------

struct InitializerParams {
  int hidden = 128;
  Tensor w1, b1, w2, b2;
  Tensor cond_mean, cond_std;

  static InitializerParams init(int frag_vocab, int hidden,
                                std::uint64_t seed) {
    Rng rng(Rng::stream(seed, 0x117));
    InitializerParams p;
    p.hidden = hidden;
    p.w1 = Tensor::init_uniform({3, hidden}, 3, rng);
    p.b1 = Tensor::zeros({hidden}, true);
    p.w2 = Tensor::init_uniform({hidden, frag_vocab}, hidden, rng);
    p.b2 = Tensor::zeros({frag_vocab}, true);
    p.cond_mean = Tensor::zeros({3});
    p.cond_std = Tensor::full({3}, 1.0);
    return p;
  }

  std::vector<std::pair<std::string, Tensor>> trainable() const {
    return {{"w1", w1}, {"b1", b1}, {"w2", w2}, {"b2", b2}};
  }

  std::vector<std::pair<std::string, Tensor>> all_tensors() const {
    auto out = trainable();
    out.emplace_back("cond_mean", cond_mean);
    out.emplace_back("cond_std", cond_std);
    return out;
  }
};

inline Tensor initializer_logits(const std::array<double, 3>& conditions,
                                 const InitializerParams& p) {
  Tensor c = Tensor::from_values({1, 3}, {conditions[0], conditions[1],
                                          conditions[2]});
  Tensor h = ops::gelu(ops::add_row_broadcast(ops::matmul(c, p.w1), p.b1));
  return ops::add_row_broadcast(ops::matmul(h, p.w2), p.b2);
}

/// Independent per-fragment presence probability (multi-label sigmoid).
inline std::vector<double> initializer_forward(
    const std::array<double, 3>& conditions, const InitializerParams& p) {
  Tensor probs = ops::sigmoid(initializer_logits(conditions, p));
  return probs.value();
}

/// Mean elementwise binary cross-entropy over a batch of (conditions,
/// fragment multi-hot) pairs.
inline Tensor initializer_loss(
    const std::vector<std::pair<std::array<double, 3>, std::vector<double>>>&
        batch,
    const InitializerParams& p) {
  if (batch.empty()) throw Error("empty initializer batch");
  std::vector<Tensor> losses;
  for (const auto& [cond, multihot] : batch) {
    losses.push_back(
        ops::bce_with_logits(initializer_logits(cond, p), multihot));
  }
  return ops::scale(ops::add_scalars(losses),
                    1.0 / static_cast<double>(losses.size()));
}

// ---------------------------------------------------------------------------
// Adam optimizer.
// ---------------------------------------------------------------------------

class Adam {
public:
  Adam(std::vector<std::pair<std::string, Tensor>> params, double lr = 1e-4,
       double beta1 = 0.9, double beta2 = 0.9, double eps = 1e-9)
      : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2),
        eps_(eps) {
    for (auto& [name, t] : params_) {
      (void)name;
      m_.emplace_back(t.value().size(), 0.0);
      v_.emplace_back(t.value().size(), 0.0);
    }
  }

  void zero_grad() {
    for (auto& [name, t] : params_) {
      (void)name;
      std::fill(t.grad().begin(), t.grad().end(), 0.0);
    }
  }

  /// Standard Adam update with bias correction, reading accumulated
  /// gradients from the parameter tensors.
  void step() {
    ++t_;
    double bc1 = 1.0 - std::pow(beta1_, t_);
    double bc2 = 1.0 - std::pow(beta2_, t_);
    for (std::size_t k = 0; k < params_.size(); ++k) {
      auto& tensor = params_[k].second;
      auto& value = tensor.value();
      const auto& grad = tensor.grad();
      for (std::size_t i = 0; i < value.size(); ++i) {
        m_[k][i] = beta1_ * m_[k][i] + (1.0 - beta1_) * grad[i];
        v_[k][i] = beta2_ * v_[k][i] + (1.0 - beta2_) * grad[i] * grad[i];
        double mhat = m_[k][i] / bc1;
        double vhat = v_[k][i] / bc2;
        value[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
      }
    }
  }

  int steps_taken() const { return t_; }

private:
  std::vector<std::pair<std::string, Tensor>> params_;
  std::vector<std::vector<double>> m_, v_;
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
};

// ---------------------------------------------------------------------------
// Versioned binary weight file.
// ---------------------------------------------------------------------------

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  put_u64(out, bits);
}

struct ByteReader {
  const std::string& data;
  std::size_t pos = 0;

  std::uint32_t u32() {
    if (pos + 4 > data.size()) throw FormatError("weight file truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos++]))
           << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    if (pos + 8 > data.size()) throw FormatError("weight file truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos++]))
           << (8 * i);
    return v;
  }
  double f64() {
    std::uint64_t bits = u64();
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
  }
  std::string bytes(std::size_t n) {
    if (pos + n > data.size()) throw FormatError("weight file truncated");
    std::string s = data.substr(pos, n);
    pos += n;
    return s;
  }
};

}  // namespace detail

inline constexpr char kWeightMagic[4] = {'M', 'S', 'W', 'T'};
inline constexpr std::uint32_t kWeightVersion = 1;

inline std::string serialize_tensors(
    const std::vector<std::pair<std::string, Tensor>>& tensors) {
  std::string out;
  out.append(kWeightMagic, 4);
  detail::put_u32(out, kWeightVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    detail::put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    detail::put_u32(out, static_cast<std::uint32_t>(t.shape().size()));
    for (int d : t.shape()) detail::put_u32(out, static_cast<std::uint32_t>(d));
    for (double v : t.value()) detail::put_f64(out, v);
  }
  detail::put_u64(out, fnv1a(out.data(), out.size()));
  return out;
}

/// Parses a weight file into a name -> tensor map, verifying magic, version
/// and trailing checksum.
inline std::map<std::string, Tensor> deserialize_tensors(
    const std::string& data) {
  if (data.size() < 16 || std::memcmp(data.data(), kWeightMagic, 4) != 0)
    throw FormatError("not a weight file (bad magic)");
  std::uint64_t want = fnv1a(data.data(), data.size() - 8);
  detail::ByteReader tail{data, data.size() - 8};
  if (tail.u64() != want) throw FormatError("weight file checksum mismatch");

  detail::ByteReader r{data, 4};
  std::uint32_t version = r.u32();
  if (version != kWeightVersion)
    throw FormatError("unsupported weight file version " +
                      std::to_string(version));
  std::uint32_t count = r.u32();
  std::map<std::string, Tensor> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.bytes(r.u32());
    std::uint32_t rank = r.u32();
    std::vector<int> shape;
    int numel = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      shape.push_back(static_cast<int>(r.u32()));
      numel *= shape.back();
    }
    std::vector<double> values(numel);
    for (int k = 0; k < numel; ++k) values[k] = r.f64();
    out.emplace(name, Tensor::from_values(shape, std::move(values)));
  }
  return out;
}

inline std::string serialize_model(const ModelParams& p) {
  auto tensors = p.all_tensors();
  const ModelConfig& c = p.config;
  tensors.emplace_back(
      "meta.shape",
      Tensor::from_values({8}, {static_cast<double>(c.frag_vocab),
                                static_cast<double>(c.atype_vocab),
                                static_cast<double>(c.action_count),
                                static_cast<double>(c.d_f),
                                static_cast<double>(c.d_a),
                                static_cast<double>(c.heads),
                                static_cast<double>(c.layers),
                                static_cast<double>(c.ff_hidden)}));
  tensors.emplace_back(
      "meta.hyper",
      Tensor::from_values({3}, {c.dropout, c.geometry_scale_init,
                                c.freeze_geometry ? 1.0 : 0.0}));
  return serialize_tensors(tensors);
}

inline ModelParams deserialize_model(const std::string& bytes) {
  auto map = deserialize_tensors(bytes);
  auto need = [&](const std::string& name) -> Tensor& {
    auto it = map.find(name);
    if (it == map.end()) throw FormatError("weight file missing " + name);
    return it->second;
  };
  const auto& shape = need("meta.shape").value();
  const auto& hyper = need("meta.hyper").value();
  ModelConfig cfg;
  cfg.frag_vocab = static_cast<int>(shape[0]);
  cfg.atype_vocab = static_cast<int>(shape[1]);
  cfg.action_count = static_cast<int>(shape[2]);
  cfg.d_f = static_cast<int>(shape[3]);
  cfg.d_a = static_cast<int>(shape[4]);
  cfg.heads = static_cast<int>(shape[5]);
  cfg.layers = static_cast<int>(shape[6]);
  cfg.ff_hidden = static_cast<int>(shape[7]);
  cfg.dropout = hyper[0];
  cfg.geometry_scale_init = hyper[1];
  cfg.freeze_geometry = hyper[2] != 0.0;

  ModelParams p = ModelParams::init(cfg, 0);
  for (auto& [name, tensor] : p.all_tensors()) {
    Tensor& stored = need(name);
    if (stored.shape() != tensor.shape())
      throw FormatError("tensor shape mismatch for " + name);
    tensor.value() = stored.value();
  }
  return p;
}

inline std::string serialize_initializer(const InitializerParams& p,
                                         int frag_vocab) {
  auto tensors = p.all_tensors();
  tensors.emplace_back(
      "meta.shape",
      Tensor::from_values({2}, {static_cast<double>(frag_vocab),
                                static_cast<double>(p.hidden)}));
  return serialize_tensors(tensors);
}

inline InitializerParams deserialize_initializer(const std::string& bytes) {
  auto map = deserialize_tensors(bytes);
  auto it = map.find("meta.shape");
  if (it == map.end()) throw FormatError("weight file missing meta.shape");
  int frag_vocab = static_cast<int>(it->second.value()[0]);
  int hidden = static_cast<int>(it->second.value()[1]);
  InitializerParams p = InitializerParams::init(frag_vocab, hidden, 0);
  for (auto& [name, tensor] : p.all_tensors()) {
    auto st = map.find(name);
    if (st == map.end()) throw FormatError("weight file missing " + name);
    if (st->second.shape() != tensor.shape())
      throw FormatError("tensor shape mismatch for " + name);
    tensor.value() = st->second.value();
  }
  return p;
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open: " + path);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return data;
}

}  // namespace molstory

#endif  // MOLSTORY_MODEL_HPP
