//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLSTORY_MOLGRAPH_HPP
#define MOLSTORY_MOLGRAPH_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "molstory/elements.hpp"
#include "molstory/error.hpp"

namespace molstory {

struct Atom {
  Element element = Element::C;
  int charge = 0;
  bool aromatic = false;
  // Count of implicit hydrogens. Doubles as the atom's free valence: bonds
  // added later consume hydrogens first.
  int implicit_h = 0;
};

struct Bond {
  int a = -1;
  int b = -1;
  // Kekule order (1, 2, 3). Aromatic bonds keep their current Kekule
  // assignment here so that valence sums stay integral.
  int order = 1;
  bool aromatic = false;
  bool in_ring = false;
};

/// Attributed molecular graph. Atom indices are stable; the structure is
/// treated as immutable once built (all library operations are pure).
class MolGraph {
public:
  int add_atom(Element e, int charge = 0, bool aromatic = false,
               int implicit_h = 0) {
    atoms_.push_back(Atom{e, charge, aromatic, implicit_h});
    adjacency_.emplace_back();
    return static_cast<int>(atoms_.size()) - 1;
  }

  int add_bond(int a, int b, int order = 1, bool aromatic = false) {
    if (a == b) throw Error("bond endpoints must be distinct");
    if (a < 0 || b < 0 || a >= atom_count() || b >= atom_count())
      throw Error("bond endpoint out of range");
    if (bond_between(a, b)) throw Error("duplicate bond");
    bonds_.push_back(Bond{a, b, order, aromatic, false});
    int idx = static_cast<int>(bonds_.size()) - 1;
    adjacency_[a].push_back(idx);
    adjacency_[b].push_back(idx);
    return idx;
  }

  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }

  const Atom& atom(int i) const { return atoms_[i]; }
  Atom& atom(int i) { return atoms_[i]; }
  const Bond& bond(int i) const { return bonds_[i]; }
  Bond& bond(int i) { return bonds_[i]; }

  const std::vector<int>& bonds_of(int atom_idx) const {
    return adjacency_[atom_idx];
  }

  int other_end(int bond_idx, int atom_idx) const {
    const Bond& b = bonds_[bond_idx];
    return b.a == atom_idx ? b.b : b.a;
  }

  std::optional<int> bond_between(int a, int b) const {
    for (int bi : adjacency_[a]) {
      if (other_end(bi, a) == b) return bi;
    }
    return std::nullopt;
  }

  int degree(int atom_idx) const {
    return static_cast<int>(adjacency_[atom_idx].size());
  }

  /// Sum of Kekule bond orders at an atom.
  int bond_order_sum(int atom_idx) const {
    int s = 0;
    for (int bi : adjacency_[atom_idx]) s += bonds_[bi].order;
    return s;
  }

  /// Bond order sum counting aromatic bonds as single; the delocalized
  /// contribution is handled separately during kekulization.
  int sigma_sum(int atom_idx) const {
    int s = 0;
    for (int bi : adjacency_[atom_idx])
      s += bonds_[bi].aromatic ? 1 : bonds_[bi].order;
    return s;
  }

  /// The valence this atom is standardized to: bond orders plus hydrogens.
  int target_valence(int atom_idx) const {
    return bond_order_sum(atom_idx) + atoms_[atom_idx].implicit_h;
  }

  bool atom_in_ring(int atom_idx) const {
    for (int bi : adjacency_[atom_idx])
      if (bonds_[bi].in_ring) return true;
    return false;
  }

  int component_count() const {
    std::vector<char> seen(atoms_.size(), 0);
    int components = 0;
    std::vector<int> stack;
    for (int i = 0; i < atom_count(); ++i) {
      if (seen[i]) continue;
      ++components;
      stack.push_back(i);
      seen[i] = 1;
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int bi : adjacency_[v]) {
          int u = other_end(bi, v);
          if (!seen[u]) {
            seen[u] = 1;
            stack.push_back(u);
          }
        }
      }
    }
    return components;
  }

  bool connected() const { return atom_count() <= 1 || component_count() == 1; }

  /// Marks ring bonds (edges not removable without disconnecting their
  /// component). Called once after construction; docking code maintains the
  /// flags incrementally.
  void mark_ring_bonds() {
    // Tarjan bridge detection; everything that is not a bridge is a ring bond.
    int n = atom_count();
    std::vector<int> disc(n, -1), low(n, 0);
    for (auto& b : bonds_) b.in_ring = true;
    int timer = 0;
    // Iterative DFS to keep stack usage bounded.
    struct Frame {
      int v;
      int parent_bond;
      std::size_t next;
    };
    std::vector<Frame> stack;
    for (int root = 0; root < n; ++root) {
      if (disc[root] != -1) continue;
      stack.push_back({root, -1, 0});
      disc[root] = low[root] = timer++;
      while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next < adjacency_[f.v].size()) {
          int bi = adjacency_[f.v][f.next++];
          if (bi == f.parent_bond) continue;
          int u = other_end(bi, f.v);
          if (disc[u] == -1) {
            disc[u] = low[u] = timer++;
            stack.push_back({u, bi, 0});
          } else {
            low[f.v] = std::min(low[f.v], disc[u]);
          }
        } else {
          int v = f.v;
          int pb = f.parent_bond;
          stack.pop_back();
          if (pb != -1) {
            int p = other_end(pb, v);
            low[p] = std::min(low[p], low[v]);
            if (low[v] > disc[p]) bonds_[pb].in_ring = false;  // bridge
          }
        }
      }
    }
  }

  bool has_coords() const { return !coords_.empty(); }
  const std::vector<std::array<double, 3>>& coords() const { return coords_; }
  void set_coords(std::vector<std::array<double, 3>> c) {
    if (!c.empty() && static_cast<int>(c.size()) != atom_count())
      throw Error("coordinate count must match atom count");
    coords_ = std::move(c);
  }

  /// Checks structural and valence invariants; throws on violation.
  void validate() const {
    for (int i = 0; i < atom_count(); ++i) {
      const Atom& a = atoms_[i];
      if (a.implicit_h < 0) throw ValenceError("negative hydrogen count");
      if (a.aromatic && !aromatic_capable(a.element))
        throw ValenceError(std::string("element ") +
                           std::string(symbol(a.element)) +
                           " cannot be aromatic");
      int occupied = bond_order_sum(i) + a.implicit_h;
      int mv = max_valence(a.element, a.charge);
      if (mv < 0)
        throw ValenceError(std::string("unsupported charge state for ") +
                           std::string(symbol(a.element)));
      if (occupied > mv)
        throw ValenceError(std::string("valence ") + std::to_string(occupied) +
                           " exceeds maximum " + std::to_string(mv) + " for " +
                           std::string(symbol(a.element)));
    }
  }

private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<std::array<double, 3>> coords_;
};

/// Remaining bonding capacity of an atom. Implicit hydrogens are exactly the
/// replaceable capacity: the atom was standardized to its target valence at
/// construction, so free valence and hydrogen count coincide.
inline int free_valence(const MolGraph& m, int atom_idx) {
  return m.atom(atom_idx).implicit_h;
}

}  // namespace molstory

#endif  // MOLSTORY_MOLGRAPH_HPP
