//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "molstory/engine.hpp"

namespace {

using namespace molstory;

TrainConfig load_config(const std::string& path) {
  if (path.empty()) return TrainConfig{};
  return config_from_text(read_file(path));
}

int axis_from_name(const std::string& name) {
  if (name == "logS") return 0;
  if (name == "redox") return 1;
  if (name == "sa") return 2;
  throw FormatError("axis must be logS, redox or sa");
}

void cmd_decompose(const std::string& smiles) {
  MolGraph m = parse_smiles(smiles);
  auto frags = generate_fragments(m);
  FragmentCache cache;
  AttachmentRegistry registry;
  std::vector<ExtractedFragment> extractions;
  for (std::size_t i = 0; i < frags.size(); ++i) {
    extractions.push_back(canonicalize_fragment(frags[i], m));
    const auto& ef = extractions.back();
    std::cout << "fragment " << i << " "
              << (frags[i].kind == FragmentKind::Ring ? "ring" : "bond") << " "
              << ef.fragment.smiles << " atoms="
              << detail::join_indices(frags[i].global_atoms) << "\n";
  }
  for (const auto& att : derive_attachments(m, frags)) {
    std::cout << "attachment frags=" << att.frag_a << "," << att.frag_b
              << " shared=" << detail::join_indices(att.shared_atoms);
    for (int side = 0; side < 2; ++side) {
      int fidx = side == 0 ? att.frag_a : att.frag_b;
      auto cf = cache.get(extractions[fidx]);
      const auto& f0 = extractions[fidx].maps_to_local[0];
      std::vector<int> inv(f0.size());
      for (std::size_t c = 0; c < f0.size(); ++c)
        inv[f0[c]] = static_cast<int>(c);
      std::vector<int> tuple;
      for (int g : att.shared_atoms)
        tuple.push_back(inv[frags[fidx].global_to_local(g)]);
      StandardAttachment rep = registry.standardize(*cf, tuple);
      std::cout << " std" << side << "=" << detail::join_indices(rep.atoms);
    }
    std::cout << "\n";
  }
}

std::string slurp_or_stdin(const std::string& path) {
  if (path.empty() || path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  return read_file(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fragment-based molecular story toolkit"};
  app.require_subcommand(1);

  std::string smiles, input, output, vocab_path, weights_path, init_path;
  std::string config_path, axis_name = "logS", predictor_name = "nn";
  std::string provider_override;
  std::uint64_t seed = 1;
  int topk = 0;
  int count = 1;
  double logs = 0.0, redox = 0.0, sa = 0.0;
  int init_steps = 2000;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--config", config_path, "key=value config file");
  };

  auto* c_decompose = app.add_subcommand(
      "decompose", "print fragments and standard attachments of a molecule");
  c_decompose->add_option("smiles", smiles, "input SMILES")->required();

  auto* c_unroll =
      app.add_subcommand("unroll", "unroll a molecule into a random story");
  c_unroll->add_option("smiles", smiles, "input SMILES")->required();
  c_unroll->add_option("--seed", seed, "random seed");

  auto* c_replay =
      app.add_subcommand("replay", "replay a story file into a molecule");
  c_replay->add_option("--input", input, "story file (default stdin)");

  auto* c_vocab = app.add_subcommand(
      "build-vocab", "build the fragment/attachment vocabulary from a CSV");
  c_vocab->add_option("--input", input, "dataset CSV")->required();
  c_vocab->add_option("--output", output, "vocabulary file")->required();

  auto* c_train = app.add_subcommand("train", "train the story model");
  c_train->add_option("--input", input, "dataset CSV")->required();
  c_train->add_option("--weights", weights_path, "output weights")->required();
  c_train->add_option("--vocab", vocab_path, "output vocabulary file");
  add_common(c_train);

  auto* c_train_init =
      app.add_subcommand("train-init", "train the start-fragment initializer");
  c_train_init->add_option("--input", input, "dataset CSV")->required();
  c_train_init->add_option("--weights", weights_path, "output weights")
      ->required();
  c_train_init->add_option("--steps", init_steps, "optimizer steps");
  add_common(c_train_init);

  auto* c_generate =
      app.add_subcommand("generate", "generate molecules for a prompt");
  c_generate->add_option("--logS", logs, "target log-solubility")->required();
  c_generate->add_option("--redox", redox, "target redox potential")
      ->required();
  c_generate->add_option("--sa", sa, "target synthetic accessibility")
      ->required();
  c_generate->add_option("--vocab", vocab_path, "vocabulary file")->required();
  c_generate->add_option("--weights", weights_path, "model weights")
      ->required();
  c_generate->add_option("--init-weights", init_path, "initializer weights")
      ->required();
  c_generate->add_option("--count", count, "molecules to generate");
  c_generate->add_option("--topk", topk, "start-fragment top-k override");
  c_generate->add_option("--provider", provider_override,
                         "geometry provider override");
  add_common(c_generate);

  auto* c_calibrate = app.add_subcommand(
      "calibrate", "sweep one condition axis and report calibration");
  c_calibrate->add_option("--input", input, "dataset CSV")->required();
  c_calibrate->add_option("--axis", axis_name, "logS, redox or sa");
  c_calibrate->add_option("--vocab", vocab_path, "vocabulary file")
      ->required();
  c_calibrate->add_option("--weights", weights_path, "model weights")
      ->required();
  c_calibrate->add_option("--init-weights", init_path, "initializer weights")
      ->required();
  c_calibrate->add_option("--output", output, "report CSV path")->required();
  c_calibrate->add_option("--predictor", predictor_name,
                          "property predictor: nn, synthetic or identity");
  c_calibrate->add_option("--topk", topk, "start-fragment top-k override");
  c_calibrate->add_option("--provider", provider_override,
                          "geometry provider override");
  add_common(c_calibrate);

  auto* c_inspect =
      app.add_subcommand("inspect-weights", "list tensors in a weight file");
  c_inspect->add_option("--weights", weights_path, "weight file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*c_decompose) {
      cmd_decompose(smiles);
    } else if (*c_unroll) {
      FragmentCache cache;
      Story story = unroll_story(parse_smiles(smiles), seed, cache);
      std::cout << story_to_text(story);
    } else if (*c_replay) {
      FragmentCache cache;
      Story story = story_from_text(slurp_or_stdin(input));
      MolGraph m = replay_story(story, cache);
      std::cout << write_canonical_smiles(m) << "\n";
    } else if (*c_vocab) {
      auto ingest = ingest_csv(input);
      Corpus corpus = Corpus::from_records(std::move(ingest.records));
      FragmentCache cache;
      Vocabulary v = Vocabulary::build(corpus.graphs, cache);
      std::ofstream out(output);
      if (!out) throw FormatError("cannot open for writing: " + output);
      out << v.to_text();
      std::cerr << "fragments " << v.fragments().size() << " actions "
                << v.actions().size() << " skipped_rows " << ingest.skipped
                << "\n";
    } else if (*c_train) {
      TrainConfig cfg = load_config(config_path);
      if (c_train->count("--seed")) cfg.seed = seed;
      auto ingest = ingest_csv(input);
      Corpus corpus = Corpus::from_records(std::move(ingest.records));
      TrainResult result = train(corpus, cfg, std::cerr);
      write_file(weights_path, serialize_model(result.params));
      if (!vocab_path.empty()) {
        std::ofstream out(vocab_path);
        if (!out) throw FormatError("cannot open for writing: " + vocab_path);
        out << result.vocabulary.to_text();
      }
    } else if (*c_train_init) {
      TrainConfig cfg = load_config(config_path);
      if (c_train_init->count("--seed")) cfg.seed = seed;
      auto ingest = ingest_csv(input);
      Corpus corpus = Corpus::from_records(std::move(ingest.records));
      FragmentCache cache;
      Split split = split_corpus(corpus, cfg.train_fraction,
                                 cfg.validation_count, cfg.seed);
      std::vector<MolGraph> train_graphs;
      for (int i : split.train) train_graphs.push_back(corpus.graphs[i]);
      Vocabulary vocab = Vocabulary::build(train_graphs, cache);
      ConditionStats stats = condition_stats(corpus, split.train);
      InitializerParams params = train_initializer(
          corpus, cfg, vocab, split, stats, init_steps, std::cerr);
      write_file(weights_path,
                 serialize_initializer(
                     params, static_cast<int>(vocab.fragments().size())));
    } else if (*c_generate) {
      TrainConfig cfg = load_config(config_path);
      if (c_generate->count("--seed")) cfg.seed = seed;
      if (topk > 0) cfg.topk = topk;
      if (!provider_override.empty())
        cfg.provider = geometry_kind_from_string(provider_override);
      FragmentCache cache;
      Vocabulary vocab = Vocabulary::from_text(read_file(vocab_path), cache);
      ModelParams params = deserialize_model(read_file(weights_path));
      InitializerParams init = deserialize_initializer(read_file(init_path));
      Rng rng(Rng::stream(cfg.seed, 0x9e4e));
      for (int i = 0; i < count; ++i) {
        auto gen = generate({logs, redox, sa}, params, init, vocab, cfg, rng,
                            cache);
        std::cout << gen.story.final_smiles << "\n";
        std::cout << story_to_text(gen.story);
      }
    } else if (*c_calibrate) {
      TrainConfig cfg = load_config(config_path);
      if (c_calibrate->count("--seed")) cfg.seed = seed;
      if (topk > 0) cfg.topk = topk;
      if (!provider_override.empty())
        cfg.provider = geometry_kind_from_string(provider_override);
      auto ingest = ingest_csv(input);
      Corpus corpus = Corpus::from_records(std::move(ingest.records));
      FragmentCache cache;
      Vocabulary vocab = Vocabulary::from_text(read_file(vocab_path), cache);
      ModelParams params = deserialize_model(read_file(weights_path));
      InitializerParams init = deserialize_initializer(read_file(init_path));
      Split split = split_corpus(corpus, cfg.train_fraction,
                                 cfg.validation_count, cfg.seed);
      Predictor predictor;
      if (predictor_name == "nn")
        predictor = nearest_neighbor_predictor(corpus, split.train);
      else if (predictor_name == "synthetic")
        predictor = synthetic_predictor();
      else if (predictor_name == "identity")
        predictor = identity_predictor();
      else
        throw FormatError("unknown predictor: " + predictor_name);
      CalibrationReport report =
          calibrate(corpus, axis_from_name(axis_name), params, init, vocab,
                    cfg, predictor, split.train);
      std::ofstream out(output);
      if (!out) throw FormatError("cannot open for writing: " + output);
      out << calibration_csv(report);
      std::cerr << "novelty_ratio " << fmt6(report.novelty_ratio) << "\n";
    } else if (*c_inspect) {
      auto tensors = deserialize_tensors(read_file(weights_path));
      for (const auto& [name, t] : tensors) {
        std::cout << name << " rank=" << t.shape().size() << " dims=";
        for (std::size_t d = 0; d < t.shape().size(); ++d) {
          if (d) std::cout << "x";
          std::cout << t.shape()[d];
        }
        std::cout << " values=" << t.value().size() << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
