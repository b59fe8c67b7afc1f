//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLSTORY_FRAGMENT_HPP
#define MOLSTORY_FRAGMENT_HPP

#include <algorithm>
#include <vector>

#include "molstory/molgraph.hpp"
#include "molstory/rings.hpp"

namespace molstory {

enum class FragmentKind { Ring, Bond };

/// A fragment placed in its parent molecule. Local index i corresponds to
/// global_atoms[i]; ring atoms follow the normalized cycle traversal.
struct FragmentInstance {
  FragmentKind kind = FragmentKind::Bond;
  std::vector<int> global_atoms;
  // Bonds of the parent claimed by this fragment. Rings claim their cycle
  // bonds first-come-first-served so fused systems still partition edges.
  std::vector<int> owned_bonds;

  int size() const { return static_cast<int>(global_atoms.size()); }
  int local_to_global(int local) const { return global_atoms[local]; }
  int global_to_local(int global) const {
    for (int i = 0; i < size(); ++i)
      if (global_atoms[i] == global) return i;
    return -1;
  }
};

/// Attachment between two fragments of the same molecule: the atoms they
/// share. One shared atom is a junction, two a ring fusion.
struct GlobalAttachment {
  int frag_a = -1;
  int frag_b = -1;
  // Listed in frag_a's local traversal order.
  std::vector<int> shared_atoms;
};

/// Decomposes a molecule into its SSSR rings plus every bond not contained
/// in an already-collected fragment. Every bond of the molecule ends up
/// owned by exactly one fragment.
inline std::vector<FragmentInstance> generate_fragments(const MolGraph& m) {
  std::vector<FragmentInstance> fragments;
  std::vector<char> claimed(m.bond_count(), 0);

  for (auto& ring : get_sssr(m)) {
    FragmentInstance fi;
    fi.kind = FragmentKind::Ring;
    fi.global_atoms = ring;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      auto bi = m.bond_between(ring[i], ring[(i + 1) % ring.size()]);
      if (!claimed[*bi]) {
        claimed[*bi] = 1;
        fi.owned_bonds.push_back(*bi);
      }
    }
    fragments.push_back(std::move(fi));
  }

  for (int bi = 0; bi < m.bond_count(); ++bi) {
    const Bond& b = m.bond(bi);
    bool inside = false;
    for (const auto& f : fragments) {
      bool has_a = std::find(f.global_atoms.begin(), f.global_atoms.end(),
                             b.a) != f.global_atoms.end();
      bool has_b = std::find(f.global_atoms.begin(), f.global_atoms.end(),
                             b.b) != f.global_atoms.end();
      if (has_a && has_b) {
        inside = true;
        break;
      }
    }
    if (!inside) {
      FragmentInstance fi;
      fi.kind = FragmentKind::Bond;
      fi.global_atoms = {b.a, b.b};
      fi.owned_bonds = {bi};
      claimed[bi] = 1;
      fragments.push_back(std::move(fi));
    }
  }
  return fragments;
}

/// One attachment per unordered fragment pair with shared atoms, listed in
/// the first fragment's traversal order. Shared-atom pairs must be bonded;
/// larger overlaps indicate a bridged system, which is not decomposable.
inline std::vector<GlobalAttachment> derive_attachments(
    const MolGraph& m, const std::vector<FragmentInstance>& frags) {
  std::vector<GlobalAttachment> out;
  for (std::size_t i = 0; i < frags.size(); ++i) {
    for (std::size_t j = i + 1; j < frags.size(); ++j) {
      std::vector<int> shared;
      for (int g : frags[i].global_atoms) {
        if (std::find(frags[j].global_atoms.begin(),
                      frags[j].global_atoms.end(),
                      g) != frags[j].global_atoms.end())
          shared.push_back(g);
      }
      if (shared.empty()) continue;
      if (shared.size() > 2)
        throw DecompositionError(
            "fragments share more than two atoms (bridged ring system)");
      if (shared.size() == 2 && !m.bond_between(shared[0], shared[1]))
        throw DecompositionError(
            "fragments share two non-bonded atoms (bridged ring system)");
      GlobalAttachment ga;
      ga.frag_a = static_cast<int>(i);
      ga.frag_b = static_cast<int>(j);
      ga.shared_atoms = std::move(shared);
      out.push_back(std::move(ga));
    }
  }
  return out;
}

}  // namespace molstory

#endif  // MOLSTORY_FRAGMENT_HPP
