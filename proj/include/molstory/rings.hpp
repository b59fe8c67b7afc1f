//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLSTORY_RINGS_HPP
#define MOLSTORY_RINGS_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <vector>

#include "molstory/molgraph.hpp"

namespace molstory {

namespace detail {

/// Rotates/reflects a simple cycle into its normal form: starts at the
/// smallest atom index and proceeds toward the smaller of its two ring
/// neighbours. This fixes the traversal order used everywhere downstream.
inline std::vector<int> normalize_cycle(std::vector<int> cycle) {
  std::size_t n = cycle.size();
  std::size_t start = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (cycle[i] < cycle[start]) start = i;
  int prev = cycle[(start + n - 1) % n];
  int next = cycle[(start + 1) % n];
  std::vector<int> out(n);
  if (next <= prev) {
    for (std::size_t i = 0; i < n; ++i) out[i] = cycle[(start + i) % n];
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = cycle[(start + n - i) % n];
  }
  return out;
}

/// Edge indicator bitset over the molecule's bond list.
using EdgeSet = std::vector<std::uint64_t>;

inline EdgeSet cycle_edges(const MolGraph& m, const std::vector<int>& cycle) {
  EdgeSet es((m.bond_count() + 63) / 64, 0);
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    int a = cycle[i];
    int b = cycle[(i + 1) % cycle.size()];
    auto bi = m.bond_between(a, b);
    if (!bi) throw Error("cycle atoms are not consecutive");
    es[*bi / 64] |= std::uint64_t{1} << (*bi % 64);
  }
  return es;
}

}  // namespace detail

/// Smallest Set of Smallest Rings. Returns exactly |bonds| - |atoms| +
/// |components| rings, each as a normalized atom cycle, smallest rings first.
/// Candidates are the shortest cycles through every ring bond; a greedy GF(2)
/// independence filter selects the basis, breaking ties toward the
/// lexicographically smallest normalized cycle.
inline std::vector<std::vector<int>> get_sssr(const MolGraph& m) {
  int want = m.bond_count() - m.atom_count() + m.component_count();
  if (want <= 0) return {};

  // Shortest path a->b avoiding one bond, breaking BFS ties toward the
  // lexicographically smallest atom sequence.
  auto lex_shortest_path = [&](int a, int b, int avoid_bond) {
    std::vector<int> dist(m.atom_count(), -1);
    std::deque<int> queue;
    dist[b] = 0;
    queue.push_back(b);
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (int bi : m.bonds_of(v)) {
        if (bi == avoid_bond) continue;
        int u = m.other_end(bi, v);
        if (dist[u] == -1) {
          dist[u] = dist[v] + 1;
          queue.push_back(u);
        }
      }
    }
    std::vector<int> path;
    if (dist[a] == -1) return path;
    path.push_back(a);
    int cur = a;
    while (cur != b) {
      int best = -1;
      for (int bi : m.bonds_of(cur)) {
        if (bi == avoid_bond) continue;
        int u = m.other_end(bi, cur);
        if (dist[u] == dist[cur] - 1 && (best == -1 || u < best)) best = u;
      }
      path.push_back(best);
      cur = best;
    }
    return path;
  };

  struct Candidate {
    std::vector<int> cycle;
    detail::EdgeSet edges;
  };
  std::vector<Candidate> candidates;
  auto push_candidate = [&](std::vector<int> cycle) {
    auto norm = detail::normalize_cycle(std::move(cycle));
    for (const auto& c : candidates)
      if (c.cycle == norm) return;
    candidates.push_back({norm, detail::cycle_edges(m, norm)});
  };

  for (int bi = 0; bi < m.bond_count(); ++bi) {
    if (!m.bond(bi).in_ring) continue;
    auto path = lex_shortest_path(m.bond(bi).a, m.bond(bi).b, bi);
    if (path.size() >= 3) push_candidate(path);
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& x, const Candidate& y) {
              if (x.cycle.size() != y.cycle.size())
                return x.cycle.size() < y.cycle.size();
              return x.cycle < y.cycle;
            });

  // Greedy linear-independence filter over GF(2).
  std::vector<detail::EdgeSet> basis;
  std::vector<std::vector<int>> rings;
  auto reduce = [&](detail::EdgeSet es) {
    for (const auto& b : basis) {
      int hi_b = -1, hi_e = -1;
      for (int w = static_cast<int>(b.size()) - 1; w >= 0 && hi_b < 0; --w)
        if (b[w]) hi_b = w * 64 + 63 - std::countl_zero(b[w]);
      for (int w = static_cast<int>(es.size()) - 1; w >= 0 && hi_e < 0; --w)
        if (es[w]) hi_e = w * 64 + 63 - std::countl_zero(es[w]);
      if (hi_e == hi_b) {
        for (std::size_t w = 0; w < es.size(); ++w) es[w] ^= b[w];
      }
    }
    return es;
  };
  auto is_zero = [](const detail::EdgeSet& es) {
    for (auto w : es)
      if (w) return false;
    return true;
  };
  // Keep the basis in row-echelon form so reduction is a single pass.
  auto insert_basis = [&](detail::EdgeSet es) {
    basis.push_back(std::move(es));
    std::sort(basis.begin(), basis.end(),
              [](const detail::EdgeSet& x, const detail::EdgeSet& y) {
                for (int w = static_cast<int>(x.size()) - 1; w >= 0; --w) {
                  if (x[w] != y[w]) return x[w] > y[w];
                }
                return false;
              });
  };

  for (const auto& cand : candidates) {
    if (static_cast<int>(rings.size()) == want) break;
    auto reduced = reduce(cand.edges);
    // A full Gaussian elimination pass: reduce until stable.
    while (true) {
      auto again = reduce(reduced);
      if (again == reduced) break;
      reduced = std::move(again);
    }
    if (!is_zero(reduced)) {
      insert_basis(reduced);
      rings.push_back(cand.cycle);
    }
  }

  if (static_cast<int>(rings.size()) != want)
    throw Error("ring perception failed to span the cycle space");

  std::sort(rings.begin(), rings.end(),
            [](const std::vector<int>& x, const std::vector<int>& y) {
              if (x.size() != y.size()) return x.size() < y.size();
              return x < y;
            });
  return rings;
}

}  // namespace molstory

#endif  // MOLSTORY_RINGS_HPP
