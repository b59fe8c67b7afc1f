//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <set>

#include "molstory/canon.hpp"
#include "molstory/fragment.hpp"
#include "molstory/smiles.hpp"
#include "oracles.hpp"

using namespace molstory;

TEST_CASE("get_sssr") {
  SECTION("benzene has one ring of size six") {
    auto rings = get_sssr(parse_smiles("c1ccccc1"));
    REQUIRE(rings.size() == 1);
    CHECK(rings[0].size() == 6);
  }
  SECTION("naphthalene yields two six-rings, never the perimeter") {
    MolGraph m = parse_smiles("c1ccc2ccccc2c1");
    auto rings = get_sssr(m);
    REQUIRE(rings.size() == 2);
    CHECK(rings[0].size() == 6);
    CHECK(rings[1].size() == 6);
    // Cycle-space oracle: both rings exist among all simple cycles and are
    // the two smallest ones.
    auto cycles = oracles::all_simple_cycles(m);
    for (const auto& ring : rings) {
      std::set<int> atoms(ring.begin(), ring.end());
      CHECK(cycles.count(atoms) == 1);
    }
    std::size_t smaller = 0;
    for (const auto& c : cycles)
      if (c.size() < 6) ++smaller;
    CHECK(smaller == 0);
  }
  SECTION("acyclic molecules have no rings") {
    CHECK(get_sssr(parse_smiles("CCO")).empty());
  }
  SECTION("ring count identity over the corpus") {
    std::ifstream in(MOLSTORY_DATA_DIR "/corpus.smi");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      MolGraph m = parse_smiles(line);
      auto rings = get_sssr(m);
      CHECK(static_cast<int>(rings.size()) ==
            m.bond_count() - m.atom_count() + m.component_count());
    }
  }
}

TEST_CASE("generate_fragments") {
  SECTION("bicyclic with pendant bond splits into two rings and a bond") {
    // Atom indices by construction: bond (0,1), 5-ring (1,2,3,8,9) and
    // 6-ring (3,4,5,6,7,8) docking at (3,8).
    MolGraph m = parse_smiles("CC1CC2CCCCC2C1");
    auto frags = generate_fragments(m);
    REQUIRE(frags.size() == 3);
    CHECK(frags[0].kind == FragmentKind::Ring);
    CHECK(frags[0].global_atoms == std::vector<int>{1, 2, 3, 8, 9});
    CHECK(frags[1].kind == FragmentKind::Ring);
    CHECK(frags[1].global_atoms == std::vector<int>{3, 4, 5, 6, 7, 8});
    CHECK(frags[2].kind == FragmentKind::Bond);
    CHECK(frags[2].global_atoms == std::vector<int>{0, 1});
  }
  SECTION("appendix example: one ring plus five bond fragments") {
    MolGraph m = parse_smiles("O=C1CC(=O)C=C1C(=O)O");
    auto frags = generate_fragments(m);
    REQUIRE(frags.size() == 6);
    int rings = 0, bonds = 0;
    for (const auto& f : frags)
      (f.kind == FragmentKind::Ring ? rings : bonds) += 1;
    CHECK(rings == 1);
    CHECK(bonds == 5);
  }
  SECTION("ethane is a single bond fragment") {
    auto frags = generate_fragments(parse_smiles("CC"));
    REQUIRE(frags.size() == 1);
    CHECK(frags[0].kind == FragmentKind::Bond);
  }
}

TEST_CASE("derive_attachments") {
  SECTION("worked bicyclic example") {
    MolGraph m = parse_smiles("CC1CC2CCCCC2C1");
    auto frags = generate_fragments(m);
    auto atts = derive_attachments(m, frags);
    REQUIRE(atts.size() == 2);
    // Ring fusion at (3,8), listed in the first fragment's traversal order.
    CHECK(atts[0].frag_a == 0);
    CHECK(atts[0].frag_b == 1);
    CHECK(atts[0].shared_atoms == std::vector<int>{3, 8});
    // Bond fragment junction at atom 1.
    CHECK(atts[1].shared_atoms == std::vector<int>{1});
  }
  SECTION("single fragment has no attachments") {
    MolGraph m = parse_smiles("CC");
    CHECK(derive_attachments(m, generate_fragments(m)).empty());
  }
  SECTION("biphenyl-like chain gives two single-atom junctions") {
    MolGraph m = parse_smiles("c1ccc(-c2ccccc2)cc1");
    auto frags = generate_fragments(m);
    REQUIRE(frags.size() == 3);  // two rings and the connecting bond
    auto atts = derive_attachments(m, frags);
    REQUIRE(atts.size() == 2);
    for (const auto& a : atts) CHECK(a.shared_atoms.size() == 1);
  }
  SECTION("bridged bicyclics are rejected") {
    MolGraph m = parse_smiles("C1CC2CCC1CC2");  // bicyclo[2.2.2]octane
    auto frags = generate_fragments(m);
    CHECK_THROWS_AS(derive_attachments(m, frags), DecompositionError);
  }
}

TEST_CASE("fragment invariants over the corpus") {
  std::ifstream in(MOLSTORY_DATA_DIR "/corpus.smi");
  std::string line;
  Rng rng(1234);
  int checked = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    MolGraph m = parse_smiles(line);
    auto frags = generate_fragments(m);

    // Edge partition: owned bond sets are disjoint and cover all bonds.
    std::vector<int> owner(m.bond_count(), -1);
    for (std::size_t f = 0; f < frags.size(); ++f) {
      for (int bi : frags[f].owned_bonds) {
        CHECK(owner[bi] == -1);
        owner[bi] = static_cast<int>(f);
      }
    }
    for (int bi = 0; bi < m.bond_count(); ++bi) CHECK(owner[bi] != -1);

    // Count identity: #fragments = #rings + #bonds outside all rings.
    auto rings = get_sssr(m);
    int outside = 0;
    for (int bi = 0; bi < m.bond_count(); ++bi) {
      bool inside = false;
      for (const auto& ring : rings) {
        bool a = std::find(ring.begin(), ring.end(), m.bond(bi).a) != ring.end();
        bool b = std::find(ring.begin(), ring.end(), m.bond(bi).b) != ring.end();
        if (a && b) inside = true;
      }
      if (!inside) ++outside;
    }
    CHECK(frags.size() == rings.size() + outside);
    ++checked;
  }
  CHECK(checked >= 200);
}

TEST_CASE("fragment multiset is invariant under relabeling") {
  Rng rng(555);
  for (const char* s :
       {"CC1CC2CCCCC2C1", "O=C1CC(=O)C=C1C(=O)O", "c1ccc2ccccc2c1",
        "CC(=O)Oc1ccccc1C(=O)O", "CN1CCCC1c1cccnc1"}) {
    MolGraph m = parse_smiles(s);
    auto multiset_of = [](const MolGraph& mol) {
      std::vector<std::string> out;
      for (const auto& fi : generate_fragments(mol))
        out.push_back(canonicalize_fragment(fi, mol).fragment.smiles);
      std::sort(out.begin(), out.end());
      return out;
    };
    auto ref = multiset_of(m);
    for (int t = 0; t < 100; ++t)
      CHECK(multiset_of(oracles::permuted(m, rng)) == ref);
  }
}
