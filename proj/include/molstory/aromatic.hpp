//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLSTORY_AROMATIC_HPP
#define MOLSTORY_AROMATIC_HPP

#include <vector>

#include "molstory/molgraph.hpp"
#include "molstory/rings.hpp"

namespace molstory {

/// Number of delocalized double bonds an atom must host, derived from its
/// standardized valence. 0 or 1 for any kekulizable atom.
inline int pi_requirement(const MolGraph& m, int atom_idx) {
  const Atom& a = m.atom(atom_idx);
  if (!a.aromatic) return 0;
  return m.target_valence(atom_idx) - m.sigma_sum(atom_idx) - a.implicit_h;
}

/// Assigns Kekule orders to aromatic-flagged bonds so that every atom in
/// `needy` hosts exactly one double bond. `needy[i]` must be 0 or 1.
/// Deterministic backtracking; returns false when no assignment exists.
inline bool kekulize(MolGraph& m, const std::vector<int>& needy) {
  for (int bi = 0; bi < m.bond_count(); ++bi)
    if (m.bond(bi).aromatic) m.bond(bi).order = 1;

  const int n = m.atom_count();
  std::vector<int> match(n, -1);

  // Match atoms in index order, trying partners in index order. Needy atoms
  // below `from` are guaranteed matched within the current branch.
  auto solve = [&](auto&& self, int from) -> bool {
    int v = -1;
    for (int i = from; i < n; ++i) {
      if (needy[i] && match[i] == -1) {
        v = i;
        break;
      }
    }
    if (v == -1) return true;
    std::vector<int> partners;
    for (int bi : m.bonds_of(v)) {
      if (!m.bond(bi).aromatic) continue;
      int u = m.other_end(bi, v);
      if (needy[u] && match[u] == -1) partners.push_back(u);
    }
    std::sort(partners.begin(), partners.end());
    for (int u : partners) {
      match[v] = u;
      match[u] = v;
      if (self(self, v + 1)) return true;
      match[v] = match[u] = -1;
    }
    return false;
  };
  if (!solve(solve, 0)) return false;

  for (int bi = 0; bi < m.bond_count(); ++bi) {
    Bond& b = m.bond(bi);
    if (b.aromatic && match[b.a] == b.b) b.order = 2;
  }
  return true;
}

/// Re-derives atom/bond aromatic flags from the kekulized graph. A ring from
/// the SSSR is aromatic when every member is conjugated and the contributed
/// pi electrons satisfy the 4n+2 count. Ring bond flags are overwritten;
/// Kekule orders are left untouched, so the stored orders always remain a
/// valid kekulization of whatever ends up flagged.
inline void perceive_aromaticity(MolGraph& m) {
  for (int i = 0; i < m.atom_count(); ++i) m.atom(i).aromatic = false;
  for (int bi = 0; bi < m.bond_count(); ++bi) m.bond(bi).aromatic = false;
  if (m.bond_count() == 0) return;

  auto rings = get_sssr(m);
  for (const auto& ring : rings) {
    std::vector<char> in_ring(m.atom_count(), 0);
    for (int a : ring) in_ring[a] = 1;
    int electrons = 0;
    bool ok = true;
    for (int a : ring) {
      const Atom& atom = m.atom(a);
      if (!aromatic_capable(atom.element)) {
        ok = false;
        break;
      }
      int doubles = 0;
      int partner = -1;
      bool triple = false;
      for (int bi : m.bonds_of(a)) {
        if (m.bond(bi).order == 3) triple = true;
        if (m.bond(bi).order == 2) {
          ++doubles;
          partner = m.other_end(bi, a);
        }
      }
      if (triple || doubles > 1) {
        ok = false;
        break;
      }
      if (doubles == 1) {
        // In-ring and fused-ring double bonds each contribute one electron;
        // exocyclic doubles to chain atoms (carbonyls) contribute none.
        electrons += (in_ring[partner] || m.atom_in_ring(partner)) ? 1 : 0;
        continue;
      }
      // No double bond: a lone pair must fill the p orbital.
      int total = m.sigma_sum(a) + atom.implicit_h;
      bool lone_pair =
          (atom.element == Element::N && atom.charge == 0 && total == 3) ||
          (atom.element == Element::N && atom.charge == -1) ||
          (atom.element == Element::O && atom.charge == 0) ||
          (atom.element == Element::S && atom.charge == 0 && total == 2) ||
          (atom.element == Element::P && atom.charge == 0 && total == 3) ||
          (atom.element == Element::C && atom.charge == -1);
      if (lone_pair) {
        electrons += 2;
      } else if (atom.element == Element::B && atom.charge == 0) {
        // Empty p orbital: conjugated, contributes nothing.
      } else {
        ok = false;
        break;
      }
    }
    if (!ok || electrons % 4 != 2) continue;
    for (int a : ring) m.atom(a).aromatic = true;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      auto bi = m.bond_between(ring[i], ring[(i + 1) % ring.size()]);
      m.bond(*bi).aromatic = true;
    }
  }
}

}  // namespace molstory

#endif  // MOLSTORY_AROMATIC_HPP
