//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <set>

#include "molstory/story.hpp"
#include "oracles.hpp"

using namespace molstory;

TEST_CASE("enumerate_attachment_points") {
  FragmentCache cache;
  auto benzene = cache.get("c1ccccc1");
  std::vector<StandardAttachment> observed = {StandardAttachment{{0}}};
  auto points = enumerate_attachment_points(*benzene, observed);
  REQUIRE(points.size() == 1);

  // Fully saturated attachment atoms produce an empty set.
  auto pyrazine = cache.get("c1cnccn1");
  std::vector<StandardAttachment> on_nitrogen = {StandardAttachment{{2}}};
  CHECK(enumerate_attachment_points(*pyrazine, on_nitrogen).empty());
}

TEST_CASE("unroll_story basics") {
  FragmentCache cache;
  SECTION("benzene story is a start plus cauterizations") {
    MolGraph m = parse_smiles("c1ccccc1");
    Story story = unroll_story(m, 3, cache);
    REQUIRE(story.steps.front().action == StoryStep::Action::Start);
    // Site universe of a lone benzene: 6 atom sites + 6 ring-bond sites.
    CHECK(story.steps.size() == 13);
    for (std::size_t i = 1; i < story.steps.size(); ++i)
      CHECK(story.steps[i].action == StoryStep::Action::Cauterize);
  }
  SECTION("bicyclic example adds exactly three fragments") {
    MolGraph m = parse_smiles("CC1CC2CCCCC2C1");
    Story story = unroll_story(m, 11, cache);
    int additions = 0;
    for (const auto& s : story.steps)
      if (s.action != StoryStep::Action::Cauterize) ++additions;
    CHECK(additions == 3);
  }
  SECTION("fixed seed gives identical stories") {
    MolGraph m = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");
    Story a = unroll_story(m, 77, cache);
    Story b = unroll_story(m, 77, cache);
    CHECK(story_to_text(a) == story_to_text(b));
  }
  SECTION("single atoms are not decomposable") {
    CHECK_THROWS_AS(unroll_story(parse_smiles("C"), 1, cache),
                    DecompositionError);
  }
}

TEST_CASE("dock") {
  FragmentCache cache;
  SECTION("two benzenes fused at a bond give naphthalene") {
    PartialMolecule pm;
    pm.start(cache.get("c1ccccc1"));
    auto site = pm.find_site(0, {0, 1});
    REQUIRE(site.has_value());
    pm.dock(*site, cache.get("c1ccccc1"), {0, 1});
    CHECK(pm.canonical_smiles() ==
          write_canonical_smiles(parse_smiles("c1ccc2ccccc2c1")));
    CHECK(pm.mol().atom_count() == 10);
  }
  SECTION("five-ring plus bond fragment at a single atom") {
    PartialMolecule pm;
    pm.start(cache.get("C1CCCC1"));
    auto site = pm.find_site(0, {1});
    REQUIRE(site.has_value());
    pm.dock(*site, cache.get("CC"), {0});
    CHECK(pm.canonical_smiles() ==
          write_canonical_smiles(parse_smiles("CC1CCCC1")));
  }
  SECTION("docking onto a saturated atom fails") {
    PartialMolecule pm;
    pm.start(cache.get("c1cnccn1"));
    // No queue site exists on the nitrogen; force-check with can_dock on an
    // existing carbon site after exhausting its valence via element check.
    CHECK_FALSE(pm.find_site(0, {2}).has_value());
  }
  SECTION("element mismatch is rejected") {
    PartialMolecule pm;
    pm.start(cache.get("CC"));
    auto site = pm.find_site(0, {0});
    REQUIRE(site.has_value());
    CHECK_FALSE(pm.can_dock(*site, *cache.get("CO"), {1}));  // O onto C
    CHECK(pm.can_dock(*site, *cache.get("CO"), {0}));
    CHECK_THROWS_AS(pm.dock(*site, cache.get("CO"), {1}), DockError);
  }
  SECTION("arity mismatch is rejected") {
    PartialMolecule pm;
    pm.start(cache.get("c1ccccc1"));
    auto site = pm.find_site(0, {0});
    REQUIRE(site.has_value());
    CHECK_FALSE(pm.can_dock(*site, *cache.get("c1ccccc1"), {0, 1}));
  }
}

TEST_CASE("cauterize") {
  FragmentCache cache;
  PartialMolecule pm;
  pm.start(cache.get("c1ccccc1"));
  std::size_t before = pm.queue().size();
  pm.cauterize(0);
  CHECK(pm.queue().size() == before - 1);
  CHECK(pm.cauterized_sites().size() == 1);

  // Cauterizing everything leaves plain benzene.
  while (!pm.queue().empty()) pm.cauterize(0);
  CHECK(pm.canonical_smiles() ==
        write_canonical_smiles(parse_smiles("c1ccccc1")));

  // Cauterized sites never reappear in the queue across later docks.
  PartialMolecule pm2;
  pm2.start(cache.get("c1ccccc1"));
  Site gone = pm2.queue()[0];
  pm2.cauterize(0);
  auto site = pm2.find_site(0, {2});
  REQUIRE(site.has_value());
  pm2.dock(*site, cache.get("CC"), {0});
  for (const auto& s : pm2.queue()) CHECK_FALSE(s == gone);
}

TEST_CASE("replay_story") {
  FragmentCache cache;
  SECTION("round trip over random seeds and molecules") {
    Rng rng(8);
    for (const char* s :
         {"Cc1ccc(O)cc1", "O=C1CC(=O)C=C1C(=O)O", "c1ccc2ccccc2c1",
          "CC(C)(C)C", "CN1CCCC1c1cccnc1"}) {
      MolGraph m = parse_smiles(s);
      std::string ref = write_canonical_smiles(m);
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Story story = unroll_story(m, seed, cache);
        CHECK(write_canonical_smiles(replay_story(story, cache)) == ref);
      }
    }
  }
  SECTION("final molecule of the published example story") {
    MolGraph m = parse_smiles(
        "O=C(O)C1=Nc2c(cc(C(=O)O)c(C(=O)O)c2C(=O)O)C1");
    CHECK(m.atom_count() == 21);
    auto frags = generate_fragments(m);
    CHECK(frags.size() == 14);
    Story story = unroll_story(m, 5, cache);
    CHECK(story.final_smiles == write_canonical_smiles(m));
    CHECK(write_canonical_smiles(replay_story(story, cache)) ==
          write_canonical_smiles(m));
  }
  SECTION("replay validates the queue drains") {
    Story story;
    story.steps.push_back(
        StoryStep{StoryStep::Action::Start, -1, {}, "c1ccccc1", {}});
    CHECK_THROWS_AS(replay_story(story, cache), Error);
  }
}

TEST_CASE("story text round trip") {
  FragmentCache cache;
  MolGraph m = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");
  Story story = unroll_story(m, 21, cache);
  std::string text = story_to_text(story);
  Story parsed = story_from_text(text);
  CHECK(story_to_text(parsed) == text);
  CHECK(write_canonical_smiles(replay_story(parsed, cache)) ==
        story.final_smiles);
  CHECK_THROWS_AS(story_from_text("WAT 1 2\n"), FormatError);
}

TEST_CASE("valid_actions") {
  FragmentCache cache;
  std::vector<DockAction> candidates;
  candidates.push_back({cache.get("CC"), StandardAttachment{{0}}});
  candidates.push_back({cache.get("CO"), StandardAttachment{{0}}});
  candidates.push_back({cache.get("CO"), StandardAttachment{{1}}});
  candidates.push_back({cache.get("c1ccccc1"), StandardAttachment{{0, 1}}});

  SECTION("arity and chemistry filter") {
    PartialMolecule pm;
    pm.start(cache.get("c1ccccc1"));
    auto atom_site = pm.find_site(0, {3});
    REQUIRE(atom_site.has_value());
    auto valid = valid_actions(pm, *atom_site, candidates);
    // Carbon-side docks are legal on an aromatic CH; attaching CO through
    // its oxygen is an element mismatch and fusion is an arity mismatch.
    CHECK(valid == std::vector<int>{0, 1});

    auto bond_site = pm.find_site(0, {0, 1});
    REQUIRE(bond_site.has_value());
    auto fusions = valid_actions(pm, *bond_site, candidates);
    CHECK(fusions == std::vector<int>{3});
  }
  SECTION("every returned action applies cleanly") {
    PartialMolecule pm;
    pm.start(cache.get("C1CCCC1"));
    for (std::size_t si = 0; si < pm.queue().size(); ++si) {
      for (int idx : valid_actions(pm, static_cast<int>(si), candidates)) {
        PartialMolecule copy = pm;
        copy.dock(static_cast<int>(si), candidates[idx].fragment,
                  candidates[idx].attachment.atoms);
        copy.finalize();  // validates valences
      }
    }
  }
}

TEST_CASE("intermediate states stay valence-legal across random stories") {
  FragmentCache cache;
  std::ifstream in(MOLSTORY_DATA_DIR "/corpus.smi");
  std::string line;
  int count = 0;
  while (std::getline(in, line) && count < 40) {
    if (line.empty()) continue;
    ++count;
    MolGraph m = parse_smiles(line);
    Story story = unroll_story(m, 99 + count, cache);
    // Replay step by step, validating after each one.
    PartialMolecule pm;
    pm.start(cache.get(story.steps.front().fragment_smiles));
    for (std::size_t i = 1; i < story.steps.size(); ++i) {
      const auto& step = story.steps[i];
      auto si = pm.find_site(step.focal_instance, step.focal_atoms);
      REQUIRE(si.has_value());
      if (step.action == StoryStep::Action::Dock)
        pm.dock(*si, cache.get(step.fragment_smiles), step.added_atoms);
      else
        pm.cauterize(*si);
      pm.mol().validate();
      for (const auto& site : pm.queue())
        for (int c : site.atoms)
          CHECK(pm.mol().atom(pm.instances()[site.instance].atom_map[c])
                    .implicit_h >= 1);
    }
  }
}
