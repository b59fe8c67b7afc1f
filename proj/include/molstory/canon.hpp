//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLSTORY_CANON_HPP
#define MOLSTORY_CANON_HPP

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "molstory/aromatic.hpp"
#include "molstory/canonical.hpp"
#include "molstory/fingerprint.hpp"
#include "molstory/fragment.hpp"
#include "molstory/smiles.hpp"

namespace molstory {

/// Vocabulary-level identity of a fragment: canonical SMILES, the graph
/// reloaded from it, the recovered symmetry maps of the canonical form onto
/// itself, and the standardization map derived from them.
struct CanonicalFragment {
  std::string smiles;
  int size = 0;
  FragmentKind kind = FragmentKind::Bond;
  MolGraph graph;
  // All index maps of the canonical form onto itself (cyclic shifts and
  // reflections compatible with atom environments); the first is always the
  // identity.
  std::vector<std::vector<int>> possible_maps;
  // std_map[i] = min over maps of (F0^-1 . Fj)(i); idempotent on its image.
  std::vector<int> std_map;
};

/// Extraction result: the canonical fragment plus every recovered index map
/// from the canonical indexing back onto this instance's local indexing.
struct ExtractedFragment {
  CanonicalFragment fragment;
  std::vector<std::vector<int>> maps_to_local;
};

/// Symmetry-normalized attachment tuple (1 or 2 canonical atom indices).
struct StandardAttachment {
  std::vector<int> atoms;

  int arity() const { return static_cast<int>(atoms.size()); }
  bool operator==(const StandardAttachment& o) const {
    return atoms == o.atoms;
  }
  bool operator<(const StandardAttachment& o) const {
    return atoms < o.atoms;
  }
};

namespace detail {

/// Local graphs of extracted fragments and canonical fragment graphs both
/// index their atoms along the single cycle; verify that assumption.
inline void check_cycle_indexed(const MolGraph& g, FragmentKind kind) {
  const int n = g.atom_count();
  if (kind == FragmentKind::Bond) {
    if (n != 2 || g.bond_count() != 1)
      throw Error("bond fragment must have exactly two atoms and one bond");
    return;
  }
  if (n < 3 || g.bond_count() != n)
    throw Error("ring fragment must be a single cycle");
  for (int i = 0; i < n; ++i) {
    if (!g.bond_between(i, (i + 1) % n))
      throw Error("ring fragment atoms are not indexed along the cycle");
  }
}

}  // namespace detail

/// Recovers every index map between two labelings of the same single-cycle
/// (or bond) fragment by scanning cyclic shifts in both orientations against
/// the atom-environment fingerprints at radius ceil(n/2). Returned maps send
/// canonical indices to local indices. Shifts are scanned in increasing
/// magnitude, positive before negative, unreflected before reflected.
inline std::vector<std::vector<int>> recover_cyclic_maps(
    const MolGraph& frag_local, const MolGraph& frag_canonical,
    FragmentKind kind) {
  const int n = frag_canonical.atom_count();
  if (frag_local.atom_count() != n)
    throw Error("fragment graphs differ in size");
  detail::check_cycle_indexed(frag_local, kind);
  detail::check_cycle_indexed(frag_canonical, kind);

  int radius = (n + 1) / 2;
  auto local_fp = all_atom_fingerprints(frag_local, radius);
  auto canon_fp = all_atom_fingerprints(frag_canonical, radius);

  auto valid = [&](const std::vector<int>& map) {
    for (int i = 0; i < n; ++i)
      if (!(canon_fp[i] == local_fp[map[i]])) return false;
    return true;
  };

  std::vector<int> shift_order;
  shift_order.push_back(0);
  for (int s = 1; s <= n / 2; ++s) {
    shift_order.push_back(s);
    if (s != n - s) shift_order.push_back(n - s);
  }

  std::vector<std::vector<int>> maps;
  auto push_unique = [&](std::vector<int> map) {
    if (std::find(maps.begin(), maps.end(), map) == maps.end())
      maps.push_back(std::move(map));
  };
  for (bool reflected : {false, true}) {
    for (int s : shift_order) {
      std::vector<int> map(n);
      for (int i = 0; i < n; ++i)
        map[i] = reflected ? ((s - i) % n + n) % n : (i + s) % n;
      if (valid(map)) push_unique(std::move(map));
    }
  }
  if (maps.empty())
    throw Error(
        "no index map found between fragment labelings (fingerprint radius "
        "too small or graphs not isomorphic)");
  return maps;
}

/// std_map[i] = min_j (F0^-1 . Fj)(i) with F0 the first recovered map.
inline std::vector<int> build_standardization_map(
    const std::vector<std::vector<int>>& maps) {
  if (maps.empty()) throw Error("no maps given");
  const int n = static_cast<int>(maps[0].size());
  std::vector<int> inv0(n);
  for (int i = 0; i < n; ++i) inv0[maps[0][i]] = i;
  std::vector<int> std_map(n);
  for (int x = 0; x < n; ++x) {
    int best = n;
    for (const auto& f : maps) best = std::min(best, inv0[f[x]]);
    std_map[x] = best;
  }
  return std_map;
}

/// The multiset of values (F0^-1 . Fj)(x) visits for one index; exposed for
/// inspection and tests.
inline std::vector<int> standardization_orbit_values(
    const std::vector<std::vector<int>>& maps, int x) {
  const int n = static_cast<int>(maps[0].size());
  std::vector<int> inv0(n);
  for (int i = 0; i < n; ++i) inv0[maps[0][i]] = i;
  std::vector<int> vals;
  for (const auto& f : maps) vals.push_back(inv0[f[x]]);
  return vals;
}

/// Extracts the induced fragment subgraph, encodes it canonically and
/// recovers the index maps back onto the instance. Cut bonds become free
/// valences (implicit hydrogens); no dummy atoms are introduced. Aromatic
/// flags survive only when the fragment's own ring is aromatic in the
/// parent, so fragment identity never depends on the parent's kekulization.
inline ExtractedFragment canonicalize_fragment(const FragmentInstance& fi,
                                               const MolGraph& m) {
  const int n = fi.size();
  MolGraph local;

  bool ring_aromatic = false;
  if (fi.kind == FragmentKind::Ring) {
    ring_aromatic = true;
    for (int i = 0; i < n; ++i) {
      auto bi = m.bond_between(fi.global_atoms[i],
                               fi.global_atoms[(i + 1) % n]);
      if (!m.bond(*bi).aromatic) ring_aromatic = false;
    }
  }

  // Effective order each retained bond will carry in the fragment: aromatic
  // ring bonds count one (the pi electron is tracked separately), aromatic
  // bonds shared with a fused aromatic ring are demoted to single.
  auto retained_order = [&](int a, int b) {
    const Bond& bd = m.bond(*m.bond_between(a, b));
    return bd.aromatic ? 1 : bd.order;
  };

  // Atoms: implicit hydrogens absorb the cut bonds, i.e. the atom keeps its
  // standardized valence from the parent.
  std::vector<int> needy(n, 0);
  for (int i = 0; i < n; ++i) {
    int g = fi.global_atoms[i];
    const Atom& src = m.atom(g);
    int retained_sigma = 0;
    if (fi.kind == FragmentKind::Ring) {
      retained_sigma = retained_order(fi.global_atoms[(i + n - 1) % n], g) +
                       retained_order(g, fi.global_atoms[(i + 1) % n]);
    } else {
      retained_sigma = retained_order(fi.global_atoms[0], fi.global_atoms[1]);
    }
    int pi = ring_aromatic ? pi_requirement(m, g) : 0;
    int ih = m.target_valence(g) - retained_sigma - pi;
    if (ih < 0) throw Error("fragment extraction produced negative valence");
    local.add_atom(src.element, src.charge, ring_aromatic && src.aromatic, ih);
    needy[i] = pi;
  }

  if (fi.kind == FragmentKind::Ring) {
    for (int i = 0; i < n; ++i) {
      auto bi =
          m.bond_between(fi.global_atoms[i], fi.global_atoms[(i + 1) % n]);
      const Bond& b = m.bond(*bi);
      if (ring_aromatic) {
        local.add_bond(i, (i + 1) % n, 1, true);
      } else {
        // Aromatic bonds shared with a fused aromatic ring are demoted to
        // single; their pi electrons belong to the other fragment.
        local.add_bond(i, (i + 1) % n, b.aromatic ? 1 : b.order, false);
      }
    }
  } else {
    auto bi = m.bond_between(fi.global_atoms[0], fi.global_atoms[1]);
    const Bond& b = m.bond(*bi);
    if (b.aromatic) throw Error("bond fragment cannot be aromatic");
    local.add_bond(0, 1, b.order, false);
  }
  local.mark_ring_bonds();
  if (ring_aromatic && !kekulize(local, needy))
    throw DecompositionError(
        "extracted aromatic ring cannot be kekulized standalone");
  perceive_aromaticity(local);
  local.validate();

  ExtractedFragment out;
  out.fragment.smiles = write_canonical_smiles(local);
  out.fragment.size = n;
  out.fragment.kind = fi.kind;
  out.fragment.graph = parse_smiles(out.fragment.smiles);
  out.fragment.possible_maps = recover_cyclic_maps(
      out.fragment.graph, out.fragment.graph, fi.kind);
  out.fragment.std_map =
      build_standardization_map(out.fragment.possible_maps);
  out.maps_to_local =
      recover_cyclic_maps(local, out.fragment.graph, fi.kind);
  return out;
}

/// Registry of first-encountered representatives, keyed per fragment and
/// attachment orbit. Single writer during vocabulary construction,
/// read-only afterwards.
class AttachmentRegistry {
public:
  /// Applies std_map elementwise to get the orbit key; the first concrete
  /// tuple observed for a key becomes the representative for that orbit.
  StandardAttachment standardize(const CanonicalFragment& cf,
                                 const std::vector<int>& canonical_atoms) {
    std::vector<int> key;
    for (int a : canonical_atoms) key.push_back(cf.std_map[a]);
    auto map_key = std::make_pair(cf.smiles, key);
    auto it = reps_.find(map_key);
    if (it == reps_.end())
      it = reps_.emplace(map_key, StandardAttachment{canonical_atoms}).first;
    return it->second;
  }

  /// Lookup without inserting; false when the orbit was never observed.
  bool lookup(const CanonicalFragment& cf,
              const std::vector<int>& canonical_atoms,
              StandardAttachment& out) const {
    std::vector<int> key;
    for (int a : canonical_atoms) key.push_back(cf.std_map[a]);
    auto it = reps_.find(std::make_pair(cf.smiles, key));
    if (it == reps_.end()) return false;
    out = it->second;
    return true;
  }

  /// Pre-register a representative (used when loading a vocabulary file).
  void insert(const std::string& smiles, const std::vector<int>& key,
              const StandardAttachment& rep) {
    reps_.emplace(std::make_pair(smiles, key), rep);
  }

  /// Registered representatives of one fragment, sorted by tuple.
  std::vector<StandardAttachment> representatives(
      const std::string& smiles) const {
    std::vector<StandardAttachment> out;
    for (const auto& [k, v] : reps_)
      if (k.first == smiles) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// All (orbit key, representative) pairs of one fragment, sorted by key.
  std::vector<std::pair<std::vector<int>, StandardAttachment>> entries(
      const std::string& smiles) const {
    std::vector<std::pair<std::vector<int>, StandardAttachment>> out;
    for (const auto& [k, v] : reps_)
      if (k.first == smiles) out.emplace_back(k.second, v);
    return out;
  }

private:
  std::map<std::pair<std::string, std::vector<int>>, StandardAttachment>
      reps_;
};

/// Convenience wrapper matching the operation signature used in tests.
inline StandardAttachment standardize_attachment(
    const std::vector<int>& canonical_atoms, const CanonicalFragment& cf,
    AttachmentRegistry& registry) {
  return registry.standardize(cf, canonical_atoms);
}

}  // namespace molstory

#endif  // MOLSTORY_CANON_HPP
