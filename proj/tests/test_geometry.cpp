//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include <catch2/catch_amalgamated.hpp>

#include "molstory/geometry.hpp"

using namespace molstory;

TEST_CASE("pairwise_distances") {
  CHECK(pairwise_distances({{0, 0, 0}}).at(0, 0) == 0.0);

  auto dm = pairwise_distances({{0, 0, 0}, {1, 0, 0}});
  CHECK(dm.at(0, 1) == 1.0);
  CHECK(dm.at(1, 0) == 1.0);

  auto line = pairwise_distances({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}});
  CHECK(line.at(0, 2) == 2.0);

  auto same = pairwise_distances({{1, 2, 3}, {1, 2, 3}});
  CHECK(same.at(0, 1) == 0.0);
}

TEST_CASE("fragment positions and distances") {
  FragmentCache cache;
  GeometryOptions opt;
  opt.kind = GeometryKind::Topological;
  opt.full_iterations = 40;

  SECTION("single fragment sits at its centroid; 1x1 zero matrix") {
    PartialMolecule pm;
    pm.start(cache.get("c1ccccc1"));
    GeometryState geo(opt);
    geo.reset(pm);
    auto dm = pairwise_distances(geo.fragment_positions(pm));
    REQUIRE(dm.n == 1);
    CHECK(dm.at(0, 0) == 0.0);
  }
  SECTION("none provider returns all zeros") {
    GeometryOptions none = opt;
    none.kind = GeometryKind::None;
    PartialMolecule pm;
    pm.start(cache.get("c1ccccc1"));
    GeometryState geo(none);
    geo.reset(pm);
    auto site = pm.find_site(0, {0});
    REQUIRE(site.has_value());
    pm.dock(*site, cache.get("CC"), {0});
    geo.after_dock(pm, {});
    auto dm = pairwise_distances(geo.fragment_positions(pm));
    REQUIRE(dm.n == 2);
    CHECK(dm.at(0, 1) == 0.0);
    for (double d : geo.attachment_distances(pm, pm.queue()[0]))
      CHECK(d == 0.0);
  }
  SECTION("joined fragments sit a positive distance apart") {
    PartialMolecule pm;
    pm.start(cache.get("c1ccccc1"));
    GeometryState geo(opt);
    geo.reset(pm);
    auto site = pm.find_site(0, {0});
    auto result = pm.dock(*site, cache.get("CC"), {0});
    geo.after_dock(pm, result);
    auto dm = pairwise_distances(geo.fragment_positions(pm));
    CHECK(dm.at(0, 1) > 0.0);
    CHECK(dm.at(0, 1) == dm.at(1, 0));
  }
  SECTION("attachment distances have one entry per fragment") {
    PartialMolecule pm;
    pm.start(cache.get("C1CCCC1"));
    GeometryState geo(opt);
    geo.reset(pm);
    auto d = geo.attachment_distances(pm, pm.queue()[0]);
    CHECK(d.size() == 1);
    CHECK(d[0] >= 0.0);
  }
}

TEST_CASE("geometry determinism and provider swap") {
  FragmentCache cache;
  auto run = [&](GeometryKind kind) {
    GeometryOptions opt;
    opt.kind = kind;
    opt.full_iterations = 30;
    opt.incremental_iterations = 15;
    PartialMolecule pm;
    pm.start(cache.get("c1ccccc1"));
    GeometryState geo(opt);
    geo.reset(pm);
    auto site = pm.find_site(0, {2});
    auto result = pm.dock(*site, cache.get("CO"), {0});
    geo.after_dock(pm, result);
    return pairwise_distances(geo.fragment_positions(pm));
  };
  SECTION("bit-identical across runs") {
    auto a = run(GeometryKind::Topological);
    auto b = run(GeometryKind::Topological);
    CHECK(a.d == b.d);
    auto fa = run(GeometryKind::ForceRelaxed);
    auto fb = run(GeometryKind::ForceRelaxed);
    CHECK(fa.d == fb.d);
  }
  SECTION("providers change values, never shapes") {
    auto a = run(GeometryKind::Topological);
    auto b = run(GeometryKind::ForceRelaxed);
    auto c = run(GeometryKind::None);
    CHECK(a.n == b.n);
    CHECK(b.n == c.n);
    CHECK(a.d.size() == c.d.size());
  }
  SECTION("matrices are symmetric with zero diagonal") {
    auto a = run(GeometryKind::ForceRelaxed);
    for (int i = 0; i < a.n; ++i) {
      CHECK(a.at(i, i) == 0.0);
      for (int j = 0; j < a.n; ++j) CHECK(a.at(i, j) == a.at(j, i));
    }
  }
}
