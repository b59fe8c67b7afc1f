//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLSTORY_CANONICAL_HPP
#define MOLSTORY_CANONICAL_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "molstory/molgraph.hpp"

namespace molstory {

namespace detail {

/// Label used to compare bonds during refinement and emission. Aromatic
/// bonds sort after single/double/triple so Kekule assignments never leak
/// into canonical ordering.
inline int bond_label(const Bond& b) { return b.aromatic ? 4 : b.order; }

/// Iterative neighbourhood refinement. `indiv` carries individualization
/// markers (0 = none); distinct markers force distinct classes. Returns
/// per-atom ranks in [0, #classes).
inline std::vector<int> refine_ranks(const MolGraph& m,
                                     const std::vector<int>& indiv) {
  const int n = m.atom_count();
  std::vector<std::vector<std::int64_t>> keys(n);
  for (int i = 0; i < n; ++i) {
    const Atom& a = m.atom(i);
    keys[i] = {indiv[i],
               static_cast<std::int64_t>(a.element),
               a.charge,
               m.degree(i),
               a.implicit_h,
               a.aromatic ? 1 : 0,
               m.atom_in_ring(i) ? 1 : 0};
  }
  auto ranks_from_keys = [&]() {
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return keys[x] < keys[y]; });
    std::vector<int> ranks(n, 0);
    int r = 0;
    for (int k = 0; k < n; ++k) {
      if (k > 0 && keys[order[k]] != keys[order[k - 1]]) ++r;
      ranks[order[k]] = r;
    }
    return ranks;
  };

  std::vector<int> ranks = ranks_from_keys();
  int classes = 1 + *std::max_element(ranks.begin(), ranks.end());
  while (true) {
    for (int i = 0; i < n; ++i) {
      std::vector<std::int64_t> nbrs;
      for (int bi : m.bonds_of(i)) {
        nbrs.push_back(bond_label(m.bond(bi)) * 100000 +
                       ranks[m.other_end(bi, i)]);
      }
      std::sort(nbrs.begin(), nbrs.end());
      keys[i].assign(1, ranks[i]);
      keys[i].insert(keys[i].end(), nbrs.begin(), nbrs.end());
    }
    std::vector<int> next = ranks_from_keys();
    int next_classes = 1 + *std::max_element(next.begin(), next.end());
    ranks = std::move(next);
    if (next_classes == classes) break;
    classes = next_classes;
  }
  return ranks;
}

/// Emits a SMILES string following the given discrete ranks: root is the
/// rank-0 atom and neighbours are visited in increasing rank. `order_out`
/// receives the original atom index of every emitted atom.
inline std::string emit_smiles(const MolGraph& m, const std::vector<int>& ranks,
                               std::vector<int>& order_out) {
  const int n = m.atom_count();
  int root = 0;
  for (int i = 0; i < n; ++i)
    if (ranks[i] < ranks[root]) root = i;

  // DFS pass: visit order, tree parents, ring-closure bonds.
  std::vector<int> visit_index(n, -1);
  std::vector<int> parent_bond(n, -1);
  std::vector<char> bond_is_tree(m.bond_count(), 0);
  std::vector<int> dfs_order;
  {
    struct Frame {
      int atom;
      std::vector<int> nbr_bonds;
      std::size_t next = 0;
    };
    auto sorted_bonds = [&](int v) {
      std::vector<int> bs = m.bonds_of(v);
      std::sort(bs.begin(), bs.end(), [&](int x, int y) {
        return ranks[m.other_end(x, v)] < ranks[m.other_end(y, v)];
      });
      return bs;
    };
    std::vector<Frame> stack;
    stack.push_back({root, sorted_bonds(root)});
    visit_index[root] = 0;
    dfs_order.push_back(root);
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next >= f.nbr_bonds.size()) {
        stack.pop_back();
        continue;
      }
      int bi = f.nbr_bonds[f.next++];
      int u = m.other_end(bi, f.atom);
      if (visit_index[u] == -1) {
        visit_index[u] = static_cast<int>(dfs_order.size());
        dfs_order.push_back(u);
        parent_bond[u] = bi;
        bond_is_tree[bi] = 1;
        stack.push_back({u, sorted_bonds(u)});
      }
    }
  }

  // Ring-closure digits: a closure opens at the earlier atom and closes at
  // the later one; digits are allocated smallest-free in opening order and
  // reused after they close.
  std::vector<std::vector<std::pair<int, int>>> opens(n), closes(n);
  {
    struct Closure {
      int open_atom, close_atom, bond;
    };
    std::vector<Closure> closures;
    for (int bi = 0; bi < m.bond_count(); ++bi) {
      if (bond_is_tree[bi]) continue;
      const Bond& b = m.bond(bi);
      int first = visit_index[b.a] < visit_index[b.b] ? b.a : b.b;
      int second = first == b.a ? b.b : b.a;
      closures.push_back({first, second, bi});
    }
    std::sort(closures.begin(), closures.end(),
              [&](const Closure& x, const Closure& y) {
                if (visit_index[x.open_atom] != visit_index[y.open_atom])
                  return visit_index[x.open_atom] < visit_index[y.open_atom];
                return visit_index[x.close_atom] < visit_index[y.close_atom];
              });
    // Sweep in visit order, allocating digits.
    std::vector<char> digit_used(100, 0);
    struct Pending {
      int close_atom, digit;
    };
    std::vector<Pending> live;
    std::size_t ci = 0;
    for (int v : dfs_order) {
      for (auto it = live.begin(); it != live.end();) {
        if (it->close_atom == v) {
          digit_used[it->digit] = 0;
          it = live.erase(it);
        } else {
          ++it;
        }
      }
      while (ci < closures.size() && closures[ci].open_atom == v) {
        int d = 1;
        while (d < 100 && digit_used[d]) ++d;
        digit_used[d] = 1;
        opens[v].push_back({d, closures[ci].bond});
        closes[closures[ci].close_atom].push_back({d, closures[ci].bond});
        live.push_back({closures[ci].close_atom, d});
        ++ci;
      }
    }
  }

  auto atom_token = [&](int v) {
    const Atom& a = m.atom(v);
    std::string sym(symbol(a.element));
    if (a.aromatic)
      for (auto& ch : sym) ch = static_cast<char>(std::tolower(ch));
    // Would an unbracketed token reproduce charge and hydrogen count?
    bool bracket = a.charge != 0;
    if (!bracket) {
      int inferred;
      if (a.aromatic) {
        int first = allowed_valences(a.element, 0).front();
        inferred = std::max(0, first - m.sigma_sum(v) - 1);
      } else {
        int target = fit_valence(a.element, 0, m.bond_order_sum(v));
        inferred = target - m.bond_order_sum(v);
      }
      bracket = inferred != a.implicit_h;
    }
    if (!bracket) return sym;
    std::string t = "[" + sym;
    if (a.implicit_h == 1)
      t += "H";
    else if (a.implicit_h > 1)
      t += "H" + std::to_string(a.implicit_h);
    if (a.charge != 0) {
      t += a.charge > 0 ? "+" : "-";
      if (std::abs(a.charge) > 1) t += std::to_string(std::abs(a.charge));
    }
    return t + "]";
  };

  auto bond_token = [&](int bi) -> std::string {
    const Bond& b = m.bond(bi);
    if (b.aromatic) return "";
    if (b.order == 2) return "=";
    if (b.order == 3) return "#";
    // Explicit single between two aromatic atoms in a ring, so the reader
    // does not mistake it for an aromatic bond.
    if (b.in_ring && m.atom(b.a).aromatic && m.atom(b.b).aromatic) return "-";
    return "";
  };

  // Recursive emission over the DFS tree.
  std::vector<std::vector<int>> children(n);
  for (int v : dfs_order) {
    if (parent_bond[v] == -1) continue;
    children[m.other_end(parent_bond[v], v)].push_back(v);
  }
  for (auto& ch : children) {
    std::sort(ch.begin(), ch.end(), [&](int x, int y) {
      return visit_index[x] < visit_index[y];
    });
  }

  order_out.clear();
  std::string out;
  auto write_atom = [&](auto&& self, int v) -> void {
    order_out.push_back(v);
    out += atom_token(v);
    // Closures first: when a digit is freed and immediately reused at the
    // same atom the reader must see the close before the new open.
    for (auto [d, bi] : closes[v]) {
      (void)bi;
      out += d < 10 ? std::to_string(d) : "%" + std::to_string(d);
    }
    for (auto [d, bi] : opens[v]) {
      out += bond_token(bi);
      out += d < 10 ? std::to_string(d) : "%" + std::to_string(d);
    }
    for (std::size_t k = 0; k < children[v].size(); ++k) {
      int u = children[v][k];
      bool last = k + 1 == children[v].size();
      if (!last) out += "(";
      out += bond_token(parent_bond[u]);
      self(self, u);
      if (!last) out += ")";
    }
  };
  write_atom(write_atom, root);
  return out;
}

struct CanonicalResult {
  std::string smiles;
  std::vector<int> ranks;        // discrete total order, 0..n-1
  std::vector<int> atom_order;   // emitted-position -> original atom index
};

/// Individualization-refinement search for the lexicographically smallest
/// SMILES over all refinement-consistent orderings. Exact canonical form:
/// the explored candidate set depends only on the isomorphism class.
inline CanonicalResult canonical_search(const MolGraph& m) {
  const int n = m.atom_count();
  CanonicalResult best;
  std::vector<int> indiv(n, 0);
  int marker = 0;

  auto rec = [&](auto&& self) -> void {
    std::vector<int> ranks = refine_ranks(m, indiv);
    // Locate the first non-singleton class.
    int target_rank = -1;
    {
      std::vector<int> count(n, 0);
      for (int r : ranks) ++count[r];
      for (int i = 0; i < n; ++i) {
        std::vector<int> members;
        for (int a = 0; a < n; ++a)
          if (ranks[a] == i) members.push_back(a);
        if (members.size() > 1) {
          target_rank = i;
          break;
        }
        if (members.empty()) break;
      }
    }
    if (target_rank == -1) {
      std::vector<int> order;
      std::string s = emit_smiles(m, ranks, order);
      if (best.smiles.empty() || s < best.smiles) {
        best.smiles = s;
        best.ranks = ranks;
        best.atom_order = order;
      }
      return;
    }
    ++marker;
    for (int a = 0; a < n; ++a) {
      if (ranks[a] != target_rank) continue;
      indiv[a] = -marker;  // sorts before non-individualized peers
      self(self);
      indiv[a] = 0;
    }
    --marker;
  };
  rec(rec);
  return best;
}

}  // namespace detail

/// Canonical per-atom total order: iterative invariant refinement with
/// deterministic individualization. Ties are broken so that the emitted
/// SMILES string is lexicographically minimal; isomorphic graphs receive
/// identical rank-annotated neighbourhood multisets.
inline std::vector<int> canonical_ranks(const MolGraph& m) {
  if (m.atom_count() == 0) return {};
  if (!m.connected()) {
    // Ranks are still well defined per component via plain refinement.
    std::vector<int> indiv(m.atom_count(), 0);
    return detail::refine_ranks(m, indiv);
  }
  return detail::canonical_search(m).ranks;
}

/// Canonical SMILES. Output depends only on the isomorphism class of the
/// (aromaticity-perceived) graph; parse(write(m)) is isomorphic to m and
/// write(parse(s)) is a fixed point.
inline std::string write_canonical_smiles(const MolGraph& m) {
  if (!m.connected())
    throw Error("canonical SMILES requires a connected molecule");
  return detail::canonical_search(m).smiles;
}

/// Canonical SMILES plus the emission order (new-index -> old-index map).
inline detail::CanonicalResult write_canonical_smiles_with_order(
    const MolGraph& m) {
  if (!m.connected())
    throw Error("canonical SMILES requires a connected molecule");
  return detail::canonical_search(m);
}

}  // namespace molstory

#endif  // MOLSTORY_CANONICAL_HPP
