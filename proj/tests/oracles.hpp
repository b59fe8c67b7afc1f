//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//
// Brute-force reference implementations used only by tests. These stay
// independent of the library code paths they check.

#ifndef MOLSTORY_TESTS_ORACLES_HPP
#define MOLSTORY_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <vector>

#include "molstory/molgraph.hpp"
#include "molstory/rng.hpp"
#include "molstory/tensor.hpp"

namespace oracles {

using molstory::Bond;
using molstory::MolGraph;

/// Atom label as compared by the brute-force isomorphism/automorphism
/// oracles: element, charge, aromatic flag and hydrogen count.
inline std::vector<int> atom_label(const MolGraph& m, int i) {
  const auto& a = m.atom(i);
  return {static_cast<int>(a.element), a.charge, a.aromatic ? 1 : 0,
          a.implicit_h};
}

inline int bond_label(const Bond& b) { return b.aromatic ? 4 : b.order; }

/// Exhaustively tests whether `perm` maps graph a onto graph b preserving
/// atom labels and labelled adjacency.
inline bool is_isomorphism(const MolGraph& a, const MolGraph& b,
                           const std::vector<int>& perm) {
  const int n = a.atom_count();
  if (b.atom_count() != n || a.bond_count() != b.bond_count()) return false;
  for (int i = 0; i < n; ++i)
    if (atom_label(a, i) != atom_label(b, perm[i])) return false;
  for (int bi = 0; bi < a.bond_count(); ++bi) {
    const Bond& bond = a.bond(bi);
    auto other = b.bond_between(perm[bond.a], perm[bond.b]);
    if (!other) return false;
    if (bond_label(b.bond(*other)) != bond_label(bond)) return false;
  }
  return true;
}

/// All permutations check; practical for graphs up to ~8 atoms.
inline bool isomorphic_brute_force(const MolGraph& a, const MolGraph& b) {
  if (a.atom_count() != b.atom_count()) return false;
  std::vector<int> perm(a.atom_count());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    if (is_isomorphism(a, b, perm)) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

/// Automorphism orbits by full permutation enumeration.
inline std::vector<int> automorphism_orbits(const MolGraph& m) {
  const int n = m.atom_count();
  std::vector<int> orbit(n);
  std::iota(orbit.begin(), orbit.end(), 0);
  auto find = [&](int x) {
    while (orbit[x] != x) x = orbit[x] = orbit[orbit[x]];
    return x;
  };
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    if (is_isomorphism(m, m, perm)) {
      for (int i = 0; i < n; ++i) {
        int a = find(i), b = find(perm[i]);
        if (a != b) orbit[std::max(a, b)] = std::min(a, b);
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (int i = 0; i < n; ++i) orbit[i] = find(i);
  return orbit;
}

/// Every simple cycle of the graph, as sorted atom sets (for SSSR checks).
inline std::set<std::set<int>> all_simple_cycles(const MolGraph& m) {
  std::set<std::set<int>> cycles;
  const int n = m.atom_count();
  std::vector<int> path;
  std::vector<char> on_path(n, 0);
  std::function<void(int, int)> dfs = [&](int v, int start) {
    for (int bi : m.bonds_of(v)) {
      int u = m.other_end(bi, v);
      if (u == start && path.size() >= 3) {
        cycles.insert(std::set<int>(path.begin(), path.end()));
      } else if (!on_path[u] && u > start) {
        path.push_back(u);
        on_path[u] = 1;
        dfs(u, start);
        on_path[u] = 0;
        path.pop_back();
      }
    }
  };
  for (int s = 0; s < n; ++s) {
    path = {s};
    on_path.assign(n, 0);
    on_path[s] = 1;
    dfs(s, s);
  }
  return cycles;
}

/// Rebuilds a molecule under a random atom relabeling (and bond reordering).
inline MolGraph permuted(const MolGraph& m, molstory::Rng& rng) {
  std::vector<int> perm(m.atom_count());
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  std::vector<int> inv(m.atom_count());
  for (int i = 0; i < m.atom_count(); ++i) inv[perm[i]] = i;
  MolGraph out;
  for (int j = 0; j < m.atom_count(); ++j) {
    const auto& a = m.atom(perm[j]);
    out.add_atom(a.element, a.charge, a.aromatic, a.implicit_h);
  }
  std::vector<int> order(m.bond_count());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  for (int bi : order) {
    const Bond& b = m.bond(bi);
    out.add_bond(inv[b.a], inv[b.b], b.order, b.aromatic);
  }
  out.mark_ring_bonds();
  return out;
}

inline double pearson(const std::vector<double>& x,
                      const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

/// Central finite differences against reverse-mode gradients for every
/// entry of every given tensor. Returns the worst relative error.
inline double max_gradient_error(
    const std::function<molstory::Tensor()>& lossfn,
    std::vector<std::pair<std::string, molstory::Tensor>> params,
    double h = 1e-5) {
  molstory::Tensor loss = lossfn();
  for (auto& [name, t] : params)
    std::fill(t.grad().begin(), t.grad().end(), 0.0);
  loss.backward();
  std::vector<std::vector<double>> analytic;
  for (auto& [name, t] : params) analytic.push_back(t.grad());
  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& t = params[k].second;
    for (std::size_t i = 0; i < t.value().size(); ++i) {
      double orig = t.value()[i];
      t.value()[i] = orig + h;
      double up = lossfn().item();
      t.value()[i] = orig - h;
      double down = lossfn().item();
      t.value()[i] = orig;
      double fd = (up - down) / (2.0 * h);
      double an = analytic[k][i];
      double denom = std::max({std::abs(fd), std::abs(an), 1e-6});
      worst = std::max(worst, std::abs(fd - an) / denom);
    }
  }
  return worst;
}

}  // namespace oracles

#endif  // MOLSTORY_TESTS_ORACLES_HPP
