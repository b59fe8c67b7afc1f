//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include <catch2/catch_amalgamated.hpp>

#include "molstory/model.hpp"
#include "oracles.hpp"

using namespace molstory;

namespace {

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.frag_vocab = 3;
  cfg.atype_vocab = 2;
  cfg.action_count = 4;
  cfg.d_f = 8;
  cfg.d_a = 4;
  cfg.heads = 2;
  cfg.layers = 2;
  cfg.ff_hidden = 12;
  cfg.dropout = 0.0;
  return cfg;
}

StepFeatures toy_step(int label = 2) {
  StepFeatures f;
  f.frag_ids = {0, 2, 1};
  f.saturations = {{0.2, -0.5, 0.3}, {-1.0, 1.0, 0.0}, {0.1, 0.1, -0.2}};
  f.conditions = {0.5, -1.2, 0.3};
  f.distances.n = 3;
  f.distances.d = {0, 1, 2, 1, 0, 1.5, 2, 1.5, 0};
  f.attachment_distances = {0.4, 1.1, 2.2};
  f.focal_index = 1;
  f.atype_id = 1;
  f.label = label;
  return f;
}

}  // namespace

TEST_CASE("geometry_attention") {
  Rng rng(4);
  Tensor q = Tensor::init_uniform({3, 4}, 4, rng);
  Tensor k = Tensor::init_uniform({3, 4}, 4, rng);
  Tensor v = Tensor::init_uniform({3, 4}, 4, rng);
  DistanceMatrix dm;
  dm.n = 3;
  dm.d = {0, 1, 2, 1, 0, 1, 2, 1, 0};

  SECTION("zero scale equals standard attention") {
    Tensor zero = Tensor::scalar(0.0, true);
    Tensor with = geometry_attention(q, k, v, dm, zero);
    DistanceMatrix flat;
    flat.n = 3;
    flat.d.assign(9, 0.0);
    Tensor without = geometry_attention(q, k, v, flat, Tensor::scalar(5.0));
    for (std::size_t i = 0; i < with.value().size(); ++i)
      CHECK(with.value()[i] == Catch::Approx(without.value()[i]).margin(1e-15));
  }
  SECTION("huge distances collapse attention to self") {
    DistanceMatrix far;
    far.n = 3;
    far.d.assign(9, 1e6);
    for (int i = 0; i < 3; ++i) far.at(i, i) = 0.0;
    Tensor out = geometry_attention(q, k, v, far, Tensor::scalar(1.0));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(out.value()[i * 4 + j] ==
              Catch::Approx(v.value()[i * 4 + j]).margin(1e-9));
  }
  SECTION("gradient of the geometry scale matches finite differences") {
    Tensor scale = Tensor::scalar(0.7, true);
    auto lossfn = [&]() {
      return ops::mean(geometry_attention(q, k, v, dm, scale));
    };
    double err = oracles::max_gradient_error(
        lossfn, {{"scale", scale}, {"q", q}, {"k", k}, {"v", v}});
    CHECK(err < 1e-4);
  }
}

TEST_CASE("forward_step") {
  ModelParams p = ModelParams::init(tiny_config(), 42);
  StepFeatures f = toy_step();

  SECTION("logit count and finiteness") {
    Tensor logits = forward_step(f, p);
    REQUIRE(logits.value().size() == 5);  // |A| + 1
    for (double v : logits.value()) CHECK(std::isfinite(v));
  }
  SECTION("identical state twice gives identical logits") {
    Tensor a = forward_step(f, p);
    Tensor b = forward_step(f, p);
    CHECK(a.value() == b.value());
  }
  SECTION("unknown fragment ids are rejected") {
    StepFeatures bad = f;
    bad.frag_ids[0] = 99;
    CHECK_THROWS_AS(forward_step(bad, p), Error);
  }
  SECTION("permuting non-focal fragments leaves logits unchanged") {
    StepFeatures g = f;
    std::vector<int> perm = {2, 1, 0};  // focal row 1 stays put
    g.frag_ids = {f.frag_ids[2], f.frag_ids[1], f.frag_ids[0]};
    g.saturations = {f.saturations[2], f.saturations[1], f.saturations[0]};
    g.distances.n = 3;
    g.distances.d.assign(9, 0.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        g.distances.at(i, j) = f.distances.at(perm[i], perm[j]);
    for (int i = 0; i < 3; ++i)
      g.attachment_distances[i] = f.attachment_distances[perm[i]];
    Tensor a = forward_step(f, p);
    Tensor b = forward_step(g, p);
    for (std::size_t i = 0; i < a.value().size(); ++i)
      CHECK(std::abs(a.value()[i] - b.value()[i]) < 1e-10);
  }
  SECTION("dropout only affects training mode") {
    ModelConfig cfg = tiny_config();
    cfg.dropout = 0.3;
    ModelParams pd = ModelParams::init(cfg, 42);
    Tensor a = forward_step(f, pd);
    Tensor b = forward_step(f, pd);
    CHECK(a.value() == b.value());  // inference deterministic
    Rng rng(3);
    ForwardOptions train_opt;
    train_opt.train = true;
    train_opt.dropout_rng = &rng;
    Tensor c = forward_step(f, pd, train_opt);
    Tensor d = forward_step(f, pd, train_opt);
    CHECK(c.value() != d.value());  // fresh masks per call
  }
  SECTION("geometry-off ablation equals a bias-free forward pass") {
    ModelConfig cfg = tiny_config();
    cfg.geometry_scale_init = 0.0;
    cfg.freeze_geometry = true;
    ModelParams pz = ModelParams::init(cfg, 42);
    Tensor with_zeroed_scale = forward_step(f, pz);
    ForwardOptions no_bias;
    no_bias.apply_distance_bias = false;
    Tensor without_bias = forward_step(f, pz, no_bias);
    for (std::size_t i = 0; i < with_zeroed_scale.value().size(); ++i)
      CHECK(std::abs(with_zeroed_scale.value()[i] -
                     without_bias.value()[i]) < 1e-10);
  }
}

TEST_CASE("story_loss") {
  ModelParams p = ModelParams::init(tiny_config(), 42);
  StepFeatures f = toy_step(2);
  StepFeatures g = toy_step(4);
  g.focal_index = 0;
  g.atype_id = 0;

  SECTION("uniform logits give ln(actions) per step") {
    ModelParams pz = ModelParams::init(tiny_config(), 42);
    std::fill(pz.head_w.value().begin(), pz.head_w.value().end(), 0.0);
    std::fill(pz.head_b.value().begin(), pz.head_b.value().end(), 0.0);
    CHECK(story_loss({f, g}, pz).item() ==
          Catch::Approx(std::log(5.0)).epsilon(1e-12));
  }
  SECTION("confident correct predictions drive the loss to zero") {
    ModelParams pz = ModelParams::init(tiny_config(), 42);
    std::fill(pz.head_w.value().begin(), pz.head_w.value().end(), 0.0);
    std::fill(pz.head_b.value().begin(), pz.head_b.value().end(), 0.0);
    pz.head_b.value()[2] = 50.0;  // always predict action 2
    CHECK(story_loss({f}, pz).item() < 1e-9);
  }
  SECTION("gradients match finite differences on every parameter") {
    auto lossfn = [&]() { return story_loss({f, g}, p); };
    CHECK(oracles::max_gradient_error(lossfn, p.trainable()) < 1e-4);
  }
}

TEST_CASE("adam_step") {
  SECTION("zero gradient leaves parameters unchanged") {
    Tensor x = Tensor::scalar(1.5, true);
    Adam adam({{"x", x}}, 1e-2, 0.9, 0.9, 1e-9);
    adam.zero_grad();
    adam.step();
    CHECK(x.item() == 1.5);
  }
  SECTION("constant gradient converges to lr-sized steps") {
    Tensor x = Tensor::scalar(0.0, true);
    Adam adam({{"x", x}}, 1e-2, 0.9, 0.9, 1e-9);
    double prev = 0.0;
    double step_size = 0.0;
    for (int t = 0; t < 200; ++t) {
      adam.zero_grad();
      x.grad()[0] = 0.5;
      adam.step();
      step_size = prev - x.item();
      prev = x.item();
    }
    CHECK(step_size == Catch::Approx(1e-2).epsilon(1e-3));
  }
  SECTION("quadratic reaches its minimum within 5000 steps") {
    Tensor x = Tensor::scalar(1.0, true);
    Adam adam({{"x", x}}, 1e-2, 0.9, 0.9, 1e-9);
    for (int t = 0; t < 5000 && std::abs(x.item()) >= 1e-3; ++t) {
      adam.zero_grad();
      Tensor loss = ops::mul(x, x);
      loss.backward();
      adam.step();
    }
    CHECK(std::abs(x.item()) < 1e-3);
  }
}

TEST_CASE("initializer") {
  SECTION("probability vector spans the vocabulary, strictly in (0,1)") {
    InitializerParams p = InitializerParams::init(7, 16, 3);
    auto probs = initializer_forward({0.1, -0.2, 0.3}, p);
    REQUIRE(probs.size() == 7);
    for (double v : probs) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
  }
  SECTION("zero weights predict one half everywhere") {
    InitializerParams p = InitializerParams::init(4, 8, 3);
    for (auto& [name, t] : p.trainable())
      std::fill(t.value().begin(), t.value().end(), 0.0);
    for (double v : initializer_forward({5.0, -3.0, 0.0}, p))
      CHECK(v == 0.5);
  }
  SECTION("loss limits: perfect is zero, all-0.5 is ln 2") {
    InitializerParams p = InitializerParams::init(2, 4, 3);
    for (auto& [name, t] : p.trainable())
      std::fill(t.value().begin(), t.value().end(), 0.0);
    std::vector<std::pair<std::array<double, 3>, std::vector<double>>> batch =
        {{{0.0, 0.0, 0.0}, {1.0, 0.0}}};
    CHECK(initializer_loss(batch, p).item() ==
          Catch::Approx(std::log(2.0)).epsilon(1e-12));
    p.b2.value() = {40.0, -40.0};
    CHECK(initializer_loss(batch, p).item() < 1e-9);
  }
  SECTION("BCE gradients match finite differences") {
    InitializerParams p = InitializerParams::init(3, 6, 9);
    std::vector<std::pair<std::array<double, 3>, std::vector<double>>> batch =
        {{{0.1, 0.2, -0.3}, {1.0, 0.0, 1.0}},
         {{-0.5, 1.0, 0.0}, {0.0, 1.0, 0.0}}};
    auto lossfn = [&]() { return initializer_loss(batch, p); };
    CHECK(oracles::max_gradient_error(lossfn, p.trainable()) < 1e-4);
  }
  SECTION("memorizes a ten-molecule toy set") {
    Rng rng(17);
    InitializerParams p = InitializerParams::init(6, 32, 5);
    std::vector<std::pair<std::array<double, 3>, std::vector<double>>> data;
    for (int i = 0; i < 10; ++i) {
      std::array<double, 3> cond{rng.gauss(), rng.gauss(), rng.gauss()};
      std::vector<double> hot(6, 0.0);
      for (int j = 0; j < 6; ++j) hot[j] = rng.uniform() < 0.4 ? 1.0 : 0.0;
      data.push_back({cond, hot});
    }
    Adam adam(p.trainable(), 3e-3, 0.9, 0.9, 1e-9);
    double loss = 1.0;
    for (int s = 0; s < 2000 && loss >= 0.05; ++s) {
      adam.zero_grad();
      Tensor l = initializer_loss(data, p);
      l.backward();
      adam.step();
      loss = l.item();
    }
    CHECK(loss < 0.05);
  }
}

TEST_CASE("weight file format") {
  ModelParams p = ModelParams::init(tiny_config(), 11);
  std::string bytes = serialize_model(p);

  SECTION("round trip is byte-identical") {
    ModelParams q = deserialize_model(bytes);
    CHECK(serialize_model(q) == bytes);
    CHECK(q.config.d_f == p.config.d_f);
    CHECK(q.geometry_scale.value() == p.geometry_scale.value());
  }
  SECTION("corruption is detected by the checksum") {
    std::string bad = bytes;
    bad[bytes.size() / 2] ^= 0x40;
    CHECK_THROWS_AS(deserialize_tensors(bad), FormatError);
  }
  SECTION("magic and version are enforced") {
    std::string bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(deserialize_tensors(bad), FormatError);
  }
}
