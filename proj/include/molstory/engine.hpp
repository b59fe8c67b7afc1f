//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLSTORY_ENGINE_HPP
#define MOLSTORY_ENGINE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "molstory/dataset.hpp"
#include "molstory/geometry.hpp"
#include "molstory/model.hpp"
#include "molstory/vocab.hpp"

namespace molstory {

struct TrainConfig {
  int epochs = 100;
  double learning_rate = 1e-4;
  int batch_size = 16;  // stories per optimizer step
  double dropout = 0.3;
  int topk = 3;
  GeometryKind provider = GeometryKind::Topological;
  int geometry_iterations = 80;
  double geometry_scale_init = 1.0;
  bool freeze_geometry = false;
  std::uint64_t seed = 1;
  double train_fraction = 0.70;
  int validation_count = 100;
  int d_f = 256;
  int d_a = 64;
  int heads = 8;
  int layers = 3;
  int ff_hidden = 512;
  int init_hidden = 128;
  int max_steps = 200;  // generation-time dock budget before forced closure
  double kde_bandwidth = 0.14;
};

inline TrainConfig config_from_text(const std::string& text) {
  TrainConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
      line.pop_back();
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError("config line " + std::to_string(lineno) +
                        ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    try {
      if (key == "epochs") c.epochs = std::stoi(value);
      else if (key == "learning_rate") c.learning_rate = std::stod(value);
      else if (key == "batch_size") c.batch_size = std::stoi(value);
      else if (key == "dropout") c.dropout = std::stod(value);
      else if (key == "topk") c.topk = std::stoi(value);
      else if (key == "provider") c.provider = geometry_kind_from_string(value);
      else if (key == "geometry_iterations") c.geometry_iterations = std::stoi(value);
      else if (key == "geometry_scale_init") c.geometry_scale_init = std::stod(value);
      else if (key == "freeze_geometry") c.freeze_geometry = value == "true" || value == "1";
      else if (key == "seed") c.seed = std::stoull(value);
      else if (key == "train_fraction") c.train_fraction = std::stod(value);
      else if (key == "validation_count") c.validation_count = std::stoi(value);
      else if (key == "d_f") c.d_f = std::stoi(value);
      else if (key == "d_a") c.d_a = std::stoi(value);
      else if (key == "heads") c.heads = std::stoi(value);
      else if (key == "layers") c.layers = std::stoi(value);
      else if (key == "ff_hidden") c.ff_hidden = std::stoi(value);
      else if (key == "init_hidden") c.init_hidden = std::stoi(value);
      else if (key == "max_steps") c.max_steps = std::stoi(value);
      else if (key == "kde_bandwidth") c.kde_bandwidth = std::stod(value);
      else throw FormatError("unknown config key: " + key);
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception&) {
      throw FormatError("config line " + std::to_string(lineno) +
                        ": bad value for " + key);
    }
  }
  return c;
}

inline GeometryOptions geometry_options(const TrainConfig& c) {
  GeometryOptions g;
  g.kind = c.provider;
  g.full_iterations = c.geometry_iterations;
  g.incremental_iterations = std::max(1, c.geometry_iterations / 2);
  g.seed = Rng::stream(c.seed, 0x9e0);
  return g;
}

// ---------------------------------------------------------------------------
// Story featurization: replays a story through the shared mechanics and
// snapshots model inputs before every step.
// ---------------------------------------------------------------------------

/// Raised when a story touches a fragment or attachment orbit outside the
/// vocabulary (held-out molecules); callers skip and count these.
class OutOfVocabulary : public Error {
public:
  using Error::Error;
};

inline std::vector<StepFeatures> featurize_story(
    const Story& story, const Vocabulary& vocab,
    const std::array<double, 3>& standardized_conditions,
    const GeometryOptions& geo_opt, FragmentCache& cache) {
  std::vector<StepFeatures> out;
  if (story.steps.empty()) throw Error("empty story");
  PartialMolecule pm;
  GeometryState geo(geo_opt);

  auto fragment_id = [&](const std::string& smiles) {
    auto idx = vocab.fragment_index(smiles);
    if (!idx) throw OutOfVocabulary("fragment not in vocabulary: " + smiles);
    return *idx;
  };

  pm.start(cache.get(story.steps.front().fragment_smiles));
  (void)fragment_id(story.steps.front().fragment_smiles);
  geo.reset(pm);

  for (std::size_t si = 1; si < story.steps.size(); ++si) {
    const StoryStep& step = story.steps[si];
    auto site_idx = pm.find_site(step.focal_instance, step.focal_atoms);
    if (!site_idx) throw Error("story step references a closed site");
    const Site site = pm.queue()[*site_idx];

    StepFeatures f;
    for (const auto& inst : pm.instances())
      f.frag_ids.push_back(fragment_id(inst.fragment->smiles));
    for (std::size_t i = 0; i < pm.instances().size(); ++i)
      f.saturations.push_back(pm.dock_saturation(static_cast<int>(i)));
    f.conditions = standardized_conditions;
    f.distances = pairwise_distances(geo.fragment_positions(pm));
    f.attachment_distances = geo.attachment_distances(pm, site);
    f.focal_index = site.instance;

    const CanonicalFragment& focal_cf =
        *pm.instances()[site.instance].fragment;
    StandardAttachment focal_rep;
    if (!vocab.registry().lookup(focal_cf, site.atoms, focal_rep))
      throw OutOfVocabulary("attachment orbit not in vocabulary");
    auto atype = vocab.atype_index(focal_rep);
    if (!atype) throw OutOfVocabulary("attachment type not in vocabulary");
    f.atype_id = *atype;

    if (step.action == StoryStep::Action::Dock) {
      auto cf = cache.get(step.fragment_smiles);
      int frag_idx = fragment_id(cf->smiles);
      StandardAttachment incoming_rep;
      if (!vocab.registry().lookup(*cf, step.added_atoms, incoming_rep))
        throw OutOfVocabulary("incoming attachment orbit not in vocabulary");
      auto action = vocab.action_index(frag_idx, incoming_rep);
      if (!action) throw OutOfVocabulary("action not in vocabulary");
      f.label = *action;
      out.push_back(std::move(f));
      auto result = pm.dock(*site_idx, cf, step.added_atoms);
      geo.after_dock(pm, result);
    } else {
      f.label = vocab.cauterize_index();
      out.push_back(std::move(f));
      pm.cauterize(*site_idx);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training.
// ---------------------------------------------------------------------------

struct EpochMetrics {
  int epoch = 0;
  double loss = 0.0;
  double train_accuracy = 0.0;
  double eval_accuracy = 0.0;
  int skipped_eval_molecules = 0;
};

struct TrainResult {
  ModelParams params;
  Vocabulary vocabulary;
  ConditionStats stats;
  Split split;
  std::vector<EpochMetrics> metrics;
  int optimizer_steps = 0;
};

inline double accuracy_of(const std::vector<StepFeatures>& steps,
                          const ModelParams& params) {
  if (steps.empty()) return 0.0;
  int hits = 0;
  for (const auto& s : steps) {
    Tensor logits = forward_step(s, params, {});
    int best = 0;
    for (std::size_t j = 1; j < logits.value().size(); ++j)
      if (logits.value()[j] > logits.value()[best]) best = static_cast<int>(j);
    if (best == s.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(steps.size());
}

/// Trains the autoregressive model. Every epoch resamples one fresh story
/// per training molecule; held-out accuracy uses fresh stories of the test
/// split with a per-epoch evaluation seed. Out-of-vocabulary evaluation
/// molecules are skipped and counted.
inline TrainResult train(const Corpus& corpus, const TrainConfig& cfg,
                         std::ostream& log = std::cout,
                         int max_optimizer_steps = 0) {
  FragmentCache cache;
  TrainResult result;
  result.split = split_corpus(corpus, cfg.train_fraction, cfg.validation_count,
                              cfg.seed);
  std::vector<MolGraph> train_graphs;
  for (int i : result.split.train) train_graphs.push_back(corpus.graphs[i]);
  result.vocabulary = Vocabulary::build(train_graphs, cache);
  result.stats = condition_stats(corpus, result.split.train);

  ModelConfig mc;
  mc.frag_vocab = static_cast<int>(result.vocabulary.fragments().size());
  mc.atype_vocab = std::max(1, result.vocabulary.atype_count());
  mc.action_count = static_cast<int>(result.vocabulary.actions().size());
  mc.d_f = cfg.d_f;
  mc.d_a = cfg.d_a;
  mc.heads = cfg.heads;
  mc.layers = cfg.layers;
  mc.ff_hidden = cfg.ff_hidden;
  mc.dropout = cfg.dropout;
  mc.geometry_scale_init = cfg.geometry_scale_init;
  mc.freeze_geometry = cfg.freeze_geometry;
  result.params = ModelParams::init(mc, cfg.seed);
  for (int d = 0; d < 3; ++d) {
    result.params.cond_mean.value()[d] = result.stats.mean[d];
    result.params.cond_std.value()[d] = result.stats.stddev[d];
  }

  Adam adam(result.params.trainable(), cfg.learning_rate, 0.9, 0.9, 1e-9);
  Rng dropout_rng(Rng::stream(cfg.seed, 0xd0));
  GeometryOptions geo = geometry_options(cfg);

  // Decompose every molecule once; epochs only resample the story order.
  std::vector<SourceDecomposition> train_decomp;
  for (int idx : result.split.train)
    train_decomp.push_back(decompose_source(corpus.graphs[idx]));
  std::vector<std::optional<SourceDecomposition>> test_decomp(
      result.split.test.size());

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (max_optimizer_steps > 0 && adam.steps_taken() >= max_optimizer_steps)
      break;
    // Fresh story per molecule per epoch.
    std::vector<std::vector<StepFeatures>> stories;
    for (std::size_t mi = 0; mi < result.split.train.size(); ++mi) {
      int idx = result.split.train[mi];
      Story story = unroll_story(train_decomp[mi],
                                 Rng::stream(cfg.seed, epoch + 1, mi), cache);
      auto conditions =
          result.stats.standardize(corpus.records[idx].conditions());
      stories.push_back(
          featurize_story(story, result.vocabulary, conditions, geo, cache));
    }

    EpochMetrics em;
    em.epoch = epoch;
    double loss_sum = 0.0;
    int batches = 0;
    for (std::size_t b = 0; b < stories.size();
         b += static_cast<std::size_t>(cfg.batch_size)) {
      if (max_optimizer_steps > 0 && adam.steps_taken() >= max_optimizer_steps)
        break;
      std::vector<StepFeatures> batch;
      for (std::size_t s = b;
           s < std::min(stories.size(), b + cfg.batch_size); ++s)
        batch.insert(batch.end(), stories[s].begin(), stories[s].end());
      if (batch.empty()) continue;
      adam.zero_grad();
      ForwardOptions opt;
      opt.train = true;
      opt.dropout_rng = &dropout_rng;
      Tensor loss = story_loss(batch, result.params, opt);
      loss.backward();
      adam.step();
      loss_sum += loss.item();
      ++batches;
    }
    em.loss = batches > 0 ? loss_sum / batches : 0.0;

    std::vector<StepFeatures> train_steps;
    for (auto& s : stories) train_steps.insert(train_steps.end(), s.begin(), s.end());
    em.train_accuracy = accuracy_of(train_steps, result.params);

    std::vector<StepFeatures> eval_steps;
    for (std::size_t mi = 0; mi < result.split.test.size(); ++mi) {
      int idx = result.split.test[mi];
      try {
        if (!test_decomp[mi])
          test_decomp[mi] = decompose_source(corpus.graphs[idx]);
        Story story = unroll_story(
            *test_decomp[mi], Rng::stream(cfg.seed ^ 0xe7a1, epoch + 1, mi),
            cache);
        auto conditions =
            result.stats.standardize(corpus.records[idx].conditions());
        auto feats =
            featurize_story(story, result.vocabulary, conditions, geo, cache);
        eval_steps.insert(eval_steps.end(), feats.begin(), feats.end());
      } catch (const OutOfVocabulary&) {
        ++em.skipped_eval_molecules;
      } catch (const DecompositionError&) {
        ++em.skipped_eval_molecules;
      }
    }
    em.eval_accuracy = accuracy_of(eval_steps, result.params);
    result.metrics.push_back(em);
    log << "epoch " << epoch << " loss " << em.loss << " train_acc "
        << em.train_accuracy << " eval_acc " << em.eval_accuracy;
    if (em.skipped_eval_molecules > 0)
      log << " skipped " << em.skipped_eval_molecules;
    log << "\n";
  }
  result.optimizer_steps = adam.steps_taken();
  return result;
}

/// Trains the fragment initializer (conditions -> fragment presence).
inline InitializerParams train_initializer(const Corpus& corpus,
                                           const TrainConfig& cfg,
                                           const Vocabulary& vocab,
                                           const Split& split,
                                           const ConditionStats& stats,
                                           int steps, std::ostream& log = std::cout) {
  FragmentCache cache;
  std::vector<std::pair<std::array<double, 3>, std::vector<double>>> data;
  for (int idx : split.train) {
    std::vector<double> multihot(vocab.fragments().size(), 0.0);
    auto frags = generate_fragments(corpus.graphs[idx]);
    bool usable = true;
    for (const auto& fi : frags) {
      auto ef = canonicalize_fragment(fi, corpus.graphs[idx]);
      auto vi = vocab.fragment_index(ef.fragment.smiles);
      if (!vi) {
        usable = false;
        break;
      }
      multihot[*vi] = 1.0;
    }
    if (usable)
      data.push_back({stats.standardize(corpus.records[idx].conditions()),
                      std::move(multihot)});
  }
  if (data.empty()) throw Error("no usable molecules for the initializer");

  InitializerParams params = InitializerParams::init(
      static_cast<int>(vocab.fragments().size()), cfg.init_hidden, cfg.seed);
  for (int d = 0; d < 3; ++d) {
    params.cond_mean.value()[d] = stats.mean[d];
    params.cond_std.value()[d] = stats.stddev[d];
  }
  Adam adam(params.trainable(), std::max(cfg.learning_rate, 1e-3), 0.9, 0.9,
            1e-9);
  Rng rng(Rng::stream(cfg.seed, 0x1b));
  for (int s = 0; s < steps; ++s) {
    // Minibatch of up to 32 molecules.
    std::vector<std::pair<std::array<double, 3>, std::vector<double>>> batch;
    for (int k = 0; k < 32 && k < static_cast<int>(data.size()); ++k)
      batch.push_back(data[rng.uniform_index(data.size())]);
    adam.zero_grad();
    Tensor loss = initializer_loss(batch, params);
    loss.backward();
    adam.step();
    if ((s + 1) % 500 == 0)
      log << "initializer step " << (s + 1) << " bce " << loss.item() << "\n";
  }
  return params;
}

// ---------------------------------------------------------------------------
// Generation.
// ---------------------------------------------------------------------------

/// Uniform choice among the k fragments with highest initializer
/// probability (ties broken toward lower fragment index).
inline int sample_start_fragment(const std::array<double, 3>& standardized,
                                 const InitializerParams& init_params, int k,
                                 Rng& rng) {
  auto probs = initializer_forward(standardized, init_params);
  std::vector<int> order(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return probs[a] > probs[b]; });
  int kk = std::min<int>(k, static_cast<int>(order.size()));
  return order[rng.uniform_index(kk)];
}

struct GenerationResult {
  MolGraph molecule;
  Story story;
};

/// Grows one molecule for the prompted conditions: start fragment from the
/// initializer's top-k, then sample queue sites at random and draw actions
/// from the model softmax restricted to chemically valid docks. Cauterize is
/// always valid, so generation cannot dead-end; after `max_steps` docks the
/// remaining sites are cauterized.
inline GenerationResult generate(const std::array<double, 3>& conditions,
                                 const ModelParams& params,
                                 const InitializerParams& init_params,
                                 const Vocabulary& vocab,
                                 const TrainConfig& cfg, Rng& rng,
                                 FragmentCache& cache) {
  std::array<double, 3> standardized;
  for (int d = 0; d < 3; ++d)
    standardized[d] = (conditions[d] - params.cond_mean.value()[d]) /
                      params.cond_std.value()[d];

  GenerationResult out;
  PartialMolecule pm;
  GeometryOptions geo_opt = geometry_options(cfg);
  GeometryState geo(geo_opt);

  int start =
      sample_start_fragment(standardized, init_params, cfg.topk, rng);
  auto start_cf = cache.get(vocab.fragments()[start].fragment->smiles);
  pm.start(start_cf);
  geo.reset(pm);
  out.story.steps.push_back(StoryStep{StoryStep::Action::Start, -1, {},
                                      start_cf->smiles, {}});

  ForwardOptions opt;  // inference: no dropout
  int docks = 0;
  while (!pm.queue().empty()) {
    int si = static_cast<int>(rng.uniform_index(pm.queue().size()));
    const Site site = pm.queue()[si];

    std::vector<int> valid;
    if (docks < cfg.max_steps) {
      for (std::size_t ai = 0; ai < vocab.actions().size(); ++ai) {
        const auto& action = vocab.actions()[ai];
        if (action.attachment.arity() != static_cast<int>(site.atoms.size()))
          continue;
        const auto& cf = *vocab.fragments()[action.fragment].fragment;
        if (pm.can_dock(si, cf, action.attachment.atoms))
          valid.push_back(static_cast<int>(ai));
      }
    }

    int chosen = vocab.cauterize_index();
    if (!valid.empty()) {
      StepFeatures f;
      for (const auto& inst : pm.instances())
        f.frag_ids.push_back(*vocab.fragment_index(inst.fragment->smiles));
      for (std::size_t i = 0; i < pm.instances().size(); ++i)
        f.saturations.push_back(pm.dock_saturation(static_cast<int>(i)));
      f.conditions = standardized;
      f.distances = pairwise_distances(geo.fragment_positions(pm));
      f.attachment_distances = geo.attachment_distances(pm, site);
      f.focal_index = site.instance;
      StandardAttachment focal_rep;
      if (vocab.registry().lookup(*pm.instances()[site.instance].fragment,
                                  site.atoms, focal_rep)) {
        auto atype = vocab.atype_index(focal_rep);
        f.atype_id = atype ? *atype : 0;
      } else {
        f.atype_id = 0;
      }
      f.label = -1;
      opt.apply_distance_bias = cfg.provider != GeometryKind::None ||
                                !cfg.freeze_geometry;
      Tensor logits = forward_step(f, params, opt);

      // Masked, renormalized softmax over valid actions + cauterize.
      std::vector<int> choices = valid;
      choices.push_back(vocab.cauterize_index());
      double mx = -1e300;
      for (int c : choices) mx = std::max(mx, logits.value()[c]);
      std::vector<double> weights;
      double z = 0.0;
      for (int c : choices) {
        double w = std::exp(logits.value()[c] - mx);
        weights.push_back(w);
        z += w;
      }
      double u = rng.uniform() * z;
      double acc = 0.0;
      chosen = choices.back();
      for (std::size_t c = 0; c < choices.size(); ++c) {
        acc += weights[c];
        if (u < acc) {
          chosen = choices[c];
          break;
        }
      }
    }

    if (chosen == vocab.cauterize_index()) {
      out.story.steps.push_back(StoryStep{StoryStep::Action::Cauterize,
                                          site.instance, site.atoms, "", {}});
      pm.cauterize(si);
    } else {
      const auto& action = vocab.actions()[chosen];
      auto cf = cache.get(vocab.fragments()[action.fragment].fragment->smiles);
      auto result = pm.dock(si, cf, action.attachment.atoms);
      geo.after_dock(pm, result);
      out.story.steps.push_back(StoryStep{StoryStep::Action::Dock,
                                          site.instance, site.atoms,
                                          cf->smiles, action.attachment.atoms});
      ++docks;
    }
  }
  out.molecule = pm.finalize();
  out.story.final_smiles = write_canonical_smiles(out.molecule);
  return out;
}

// ---------------------------------------------------------------------------
// Kernel density estimation over the standardized condition space.
// ---------------------------------------------------------------------------

/// Product-Gaussian KDE: density(x) = (1/n) sum_i prod_d phi((x_d -
/// x_{i,d}) / h) / h.
class Kde {
public:
  Kde(std::vector<std::array<double, 3>> points, double bandwidth)
      : points_(std::move(points)), h_(bandwidth) {
    if (points_.empty()) throw Error("KDE requires at least one point");
    if (h_ <= 0.0) throw Error("KDE bandwidth must be positive");
  }

  double score(const std::array<double, 3>& x) const {
    constexpr double inv_sqrt2pi = 0.3989422804014327;
    double sum = 0.0;
    for (const auto& p : points_) {
      double k = 1.0;
      for (int d = 0; d < 3; ++d) {
        double u = (x[d] - p[d]) / h_;
        k *= inv_sqrt2pi * std::exp(-0.5 * u * u) / h_;
      }
      sum += k;
    }
    return sum / static_cast<double>(points_.size());
  }

private:
  std::vector<std::array<double, 3>> points_;
  double h_;
};

inline Kde kde_fit(const Corpus& corpus, const std::vector<int>& subset,
                   const ConditionStats& stats, double bandwidth) {
  std::vector<std::array<double, 3>> pts;
  for (int i : subset)
    pts.push_back(stats.standardize(corpus.records[i].conditions()));
  return Kde(std::move(pts), bandwidth);
}

// ---------------------------------------------------------------------------
// Synthetic closed-form property (weighted fragment counts).
// ---------------------------------------------------------------------------

/// Deterministic per-fragment weight in [-1, 1], salted per property axis.
inline double fragment_weight(const std::string& smiles, int axis) {
  std::uint64_t h = fnv1a(smiles.data(), smiles.size(),
                          0x9e3779b97f4a7c15ULL + 1315423911ULL * axis);
  return static_cast<double>(h % 2001) / 1000.0 - 1.0;
}

/// Sum of fragment weights over the decomposition; the closed-form target
/// used by the synthetic calibration mode.
inline std::array<double, 3> synthetic_properties(const MolGraph& m) {
  std::array<double, 3> out{0.0, 0.0, 0.0};
  auto frags = generate_fragments(m);
  for (const auto& fi : frags) {
    auto ef = canonicalize_fragment(fi, m);
    for (int axis = 0; axis < 3; ++axis)
      out[axis] += fragment_weight(ef.fragment.smiles, axis);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Calibration experiment.
// ---------------------------------------------------------------------------

/// Property predictor interface: returns the predicted value of `axis` for a
/// generated molecule, given the full prompt.
using Predictor = std::function<double(const MolGraph&, int axis,
                                       const std::array<double, 3>& prompt)>;

inline Predictor identity_predictor() {
  return [](const MolGraph&, int axis, const std::array<double, 3>& prompt) {
    return prompt[axis];
  };
}

inline Predictor synthetic_predictor() {
  return [](const MolGraph& m, int axis, const std::array<double, 3>&) {
    return synthetic_properties(m)[axis];
  };
}

/// Nearest-neighbour predictor over training-set fingerprints.
inline Predictor nearest_neighbor_predictor(const Corpus& corpus,
                                            const std::vector<int>& subset) {
  auto fps = std::make_shared<std::vector<AtomFingerprint>>();
  auto values = std::make_shared<std::vector<std::array<double, 3>>>();
  for (int i : subset) {
    fps->push_back(molecule_fingerprint(corpus.graphs[i]));
    values->push_back(corpus.records[i].conditions());
  }
  return [fps, values](const MolGraph& m, int axis,
                       const std::array<double, 3>&) {
    AtomFingerprint fp = molecule_fingerprint(m);
    double best = -1.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < fps->size(); ++i) {
      double t = tanimoto(fp, (*fps)[i]);
      if (t > best) {
        best = t;
        best_i = i;
      }
    }
    return (*values)[best_i][axis];
  };
}

struct CalibrationPoint {
  double prompt = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  int unique_count = 0;
  double kde_density = 0.0;
};

struct CalibrationReport {
  int axis = 0;
  std::vector<CalibrationPoint> points;
  double novelty_ratio = 0.0;
};

/// Sweeps one condition axis over the dataset range in `steps` prompts
/// (others fixed at the dataset mean), generating `per_prompt` molecules per
/// prompt. Within a prompt only unique generations count and single-fragment
/// molecules are dropped. Novelty is the fraction of unique generated
/// molecules absent from the dataset.
inline CalibrationReport calibrate(const Corpus& corpus, int axis,
                                   const ModelParams& params,
                                   const InitializerParams& init_params,
                                   const Vocabulary& vocab,
                                   const TrainConfig& cfg,
                                   const Predictor& predictor,
                                   const std::vector<int>& kde_subset,
                                   int steps = 30, int per_prompt = 30) {
  if (axis < 0 || axis > 2) throw Error("axis must be 0, 1 or 2");
  CalibrationReport report;
  report.axis = axis;

  double lo = 1e300, hi = -1e300;
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  for (const auto& r : corpus.records) {
    auto c = r.conditions();
    lo = std::min(lo, c[axis]);
    hi = std::max(hi, c[axis]);
    for (int d = 0; d < 3; ++d) mean[d] += c[d];
  }
  for (int d = 0; d < 3; ++d) mean[d] /= std::max(1, corpus.size());

  ConditionStats stats;
  for (int d = 0; d < 3; ++d) {
    stats.mean[d] = params.cond_mean.value()[d];
    stats.stddev[d] = params.cond_std.value()[d];
  }
  Kde kde = kde_fit(corpus, kde_subset, stats, cfg.kde_bandwidth);

  std::vector<std::string> dataset_smiles = corpus.canonical;
  std::sort(dataset_smiles.begin(), dataset_smiles.end());
  auto in_dataset = [&](const std::string& s) {
    return std::binary_search(dataset_smiles.begin(), dataset_smiles.end(), s);
  };

  FragmentCache cache;
  std::vector<std::string> all_unique;
  int novel = 0;
  for (int step = 0; step < steps; ++step) {
    std::array<double, 3> prompt = mean;
    prompt[axis] =
        lo + (hi - lo) * (steps > 1 ? static_cast<double>(step) / (steps - 1)
                                    : 0.5);
    Rng rng(Rng::stream(cfg.seed ^ 0xca1, axis, step));
    std::vector<std::string> seen;
    std::vector<double> predictions;
    for (int g = 0; g < per_prompt; ++g) {
      auto gen = generate(prompt, params, init_params, vocab, cfg, rng, cache);
      std::string smi = gen.story.final_smiles;
      if (std::find(seen.begin(), seen.end(), smi) != seen.end()) continue;
      seen.push_back(smi);
      if (generate_fragments(gen.molecule).size() <= 1) continue;
      predictions.push_back(predictor(gen.molecule, axis, prompt));
      if (std::find(all_unique.begin(), all_unique.end(), smi) ==
          all_unique.end()) {
        all_unique.push_back(smi);
        if (!in_dataset(smi)) ++novel;
      }
    }
    CalibrationPoint pt;
    pt.prompt = prompt[axis];
    pt.unique_count = static_cast<int>(predictions.size());
    if (!predictions.empty()) {
      double lo_p = predictions[0], hi_p = predictions[0];
      for (double p : predictions) {
        lo_p = std::min(lo_p, p);
        hi_p = std::max(hi_p, p);
      }
      if (lo_p == hi_p) {
        // The mean of identical values is that value; avoid sum/n rounding.
        pt.mean = lo_p;
        pt.stddev = 0.0;
      } else {
        for (double p : predictions) pt.mean += p;
        pt.mean /= predictions.size();
        for (double p : predictions)
          pt.stddev += (p - pt.mean) * (p - pt.mean);
        pt.stddev = std::sqrt(pt.stddev / predictions.size());
      }
    }
    pt.kde_density = kde.score(stats.standardize(prompt));
    report.points.push_back(pt);
  }
  report.novelty_ratio =
      all_unique.empty()
          ? 0.0
          : static_cast<double>(novel) / static_cast<double>(all_unique.size());
  return report;
}

/// Fixed 6-significant-digit formatting used by all text outputs.
inline std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::string calibration_csv(const CalibrationReport& r) {
  std::string out = "prompt,mean,std,unique_n,kde_density\n";
  for (const auto& p : r.points) {
    out += fmt6(p.prompt) + "," + fmt6(p.mean) + "," + fmt6(p.stddev) + "," +
           std::to_string(p.unique_count) + "," + fmt6(p.kde_density) + "\n";
  }
  out += "# novelty_ratio " + fmt6(r.novelty_ratio) + "\n";
  return out;
}

}  // namespace molstory

#endif  // MOLSTORY_ENGINE_HPP
