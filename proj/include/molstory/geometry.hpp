//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLSTORY_GEOMETRY_HPP
#define MOLSTORY_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "molstory/rng.hpp"
#include "molstory/story.hpp"

namespace molstory {

enum class GeometryKind { Topological, ForceRelaxed, None };

inline GeometryKind geometry_kind_from_string(const std::string& s) {
  if (s == "topological") return GeometryKind::Topological;
  if (s == "force-relaxed") return GeometryKind::ForceRelaxed;
  if (s == "none") return GeometryKind::None;
  throw FormatError("unknown geometry provider: " + s);
}

inline std::string to_string(GeometryKind k) {
  switch (k) {
    case GeometryKind::Topological: return "topological";
    case GeometryKind::ForceRelaxed: return "force-relaxed";
    case GeometryKind::None: return "none";
  }
  return "none";
}

struct GeometryOptions {
  GeometryKind kind = GeometryKind::Topological;
  int full_iterations = 80;
  int incremental_iterations = 40;
  std::uint64_t seed = 17;
};

struct DistanceMatrix {
  int n = 0;
  std::vector<double> d;

  double at(int i, int j) const { return d[i * n + j]; }
  double& at(int i, int j) { return d[i * n + j]; }
};

/// Euclidean distances between positions; exact symmetry by construction.
inline DistanceMatrix pairwise_distances(
    const std::vector<std::array<double, 3>>& positions) {
  DistanceMatrix dm;
  dm.n = static_cast<int>(positions.size());
  dm.d.assign(static_cast<std::size_t>(dm.n) * dm.n, 0.0);
  for (int i = 0; i < dm.n; ++i) {
    for (int j = i + 1; j < dm.n; ++j) {
      double dx = positions[i][0] - positions[j][0];
      double dy = positions[i][1] - positions[j][1];
      double dz = positions[i][2] - positions[j][2];
      double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
      dm.at(i, j) = dist;
      dm.at(j, i) = dist;
    }
  }
  return dm;
}

/// Deterministic 3D embedding of the growing molecule: unit-length bond
/// springs, short-range repulsion between non-bonded atoms and, for the
/// force-relaxed provider, second-neighbour springs that stiffen angles.
/// Coordinates are dimensionless model units; the downstream model consumes
/// only relative distances.
class GeometryState {
public:
  explicit GeometryState(GeometryOptions opt = {}) : opt_(opt) {}

  const GeometryOptions& options() const { return opt_; }
  const std::vector<std::array<double, 3>>& coords() const { return coords_; }

  /// Seeds coordinates for the start fragment.
  void reset(const PartialMolecule& pm) {
    coords_.clear();
    if (opt_.kind == GeometryKind::None) {
      coords_.assign(pm.mol().atom_count(), {0.0, 0.0, 0.0});
      return;
    }
    place_new_atoms(pm, all_atoms(pm), {0.0, 0.0, 0.0});
    relax(pm, opt_.full_iterations);
  }

  /// Incremental update after a dock: new atoms appear near the focal
  /// attachment with deterministic offsets, then the whole system relaxes
  /// from the previous coordinates.
  void after_dock(const PartialMolecule& pm,
                  const PartialMolecule::DockResult& result) {
    if (opt_.kind == GeometryKind::None) {
      coords_.assign(pm.mol().atom_count(), {0.0, 0.0, 0.0});
      return;
    }
    std::array<double, 3> anchor{0.0, 0.0, 0.0};
    if (!result.merged_atoms.empty()) {
      for (int a : result.merged_atoms)
        for (int k = 0; k < 3; ++k) anchor[k] += coords_[a][k];
      for (int k = 0; k < 3; ++k)
        anchor[k] /= static_cast<double>(result.merged_atoms.size());
    }
    place_new_atoms(pm, result.new_atoms, anchor);
    relax(pm, opt_.incremental_iterations);
  }

  /// One position per fragment instance: the centroid of its atoms.
  std::vector<std::array<double, 3>> fragment_positions(
      const PartialMolecule& pm) const {
    std::vector<std::array<double, 3>> out;
    for (const auto& inst : pm.instances()) {
      std::array<double, 3> c{0.0, 0.0, 0.0};
      for (int a : inst.atom_map)
        for (int k = 0; k < 3; ++k) c[k] += coords_[a][k];
      for (int k = 0; k < 3; ++k)
        c[k] /= static_cast<double>(inst.atom_map.size());
      out.push_back(c);
    }
    return out;
  }

  /// Distance from every fragment position to the centroid of the focal
  /// attachment's atoms.
  std::vector<double> attachment_distances(const PartialMolecule& pm,
                                           const Site& site) const {
    auto positions = fragment_positions(pm);
    std::array<double, 3> c{0.0, 0.0, 0.0};
    const auto& inst = pm.instances()[site.instance];
    for (int a : site.atoms)
      for (int k = 0; k < 3; ++k) c[k] += coords_[inst.atom_map[a]][k];
    for (int k = 0; k < 3; ++k)
      c[k] /= static_cast<double>(site.atoms.size());
    std::vector<double> out;
    for (const auto& p : positions) {
      double dx = p[0] - c[0], dy = p[1] - c[1], dz = p[2] - c[2];
      out.push_back(std::sqrt(dx * dx + dy * dy + dz * dz));
    }
    return out;
  }

private:
  static std::vector<int> all_atoms(const PartialMolecule& pm) {
    std::vector<int> v(pm.mol().atom_count());
    for (int i = 0; i < pm.mol().atom_count(); ++i) v[i] = i;
    return v;
  }

  /// Deterministic unit direction for the k-th placement around a centre.
  std::array<double, 3> direction(int atom_idx, int ordinal) const {
    double u = 0.5 + 0.5 * std::sin(static_cast<double>(
                         mix64(opt_.seed ^ (atom_idx * 31 + ordinal)) % 10007));
    double golden = 2.399963229728653;  // golden angle
    double z = 1.0 - 2.0 * ((ordinal * 0.31 + u * 0.37) - std::floor(ordinal * 0.31 + u * 0.37));
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = golden * (ordinal + 1) + u;
    return {r * std::cos(phi), r * std::sin(phi), z};
  }

  void place_new_atoms(const PartialMolecule& pm, const std::vector<int>& atoms,
                       std::array<double, 3> anchor) {
    const MolGraph& m = pm.mol();
    coords_.resize(m.atom_count(), {0.0, 0.0, 0.0});
    std::vector<char> fresh(m.atom_count(), 0);
    for (int a : atoms) fresh[a] = 1;
    std::vector<int> pending = atoms;
    int ordinal = 0;
    while (!pending.empty()) {
      // Place every pending atom that touches a placed one; when a round is
      // stuck (first atom of the molecule), fall back to the anchor.
      std::vector<int> next;
      bool progress = false;
      for (int a : pending) {
        std::array<double, 3> base = anchor;
        bool anchored = false;
        for (int bi : m.bonds_of(a)) {
          int u = m.other_end(bi, a);
          if (!fresh[u]) {
            base = coords_[u];
            anchored = true;
            break;
          }
        }
        if (anchored || !progress) {
          auto dir = direction(a, ordinal++);
          for (int k = 0; k < 3; ++k) coords_[a][k] = base[k] + dir[k];
          fresh[a] = 0;
          progress = true;
        } else {
          next.push_back(a);
        }
      }
      pending = std::move(next);
    }
  }

  void relax(const PartialMolecule& pm, int iterations) {
    const MolGraph& m = pm.mol();
    const int n = m.atom_count();
    const double bond_k = 1.0;
    const double repel_k = 0.35;
    const double angle_k = 0.25;
    const double cutoff = 1.7;
    std::vector<std::array<double, 3>> force(n);

    // Second-neighbour pairs for the angle term.
    std::vector<std::pair<int, int>> angles;
    if (opt_.kind == GeometryKind::ForceRelaxed) {
      for (int v = 0; v < n; ++v) {
        const auto& bs = m.bonds_of(v);
        for (std::size_t x = 0; x < bs.size(); ++x) {
          for (std::size_t y = x + 1; y < bs.size(); ++y) {
            angles.emplace_back(m.other_end(bs[x], v), m.other_end(bs[y], v));
          }
        }
      }
    }

    double step = 0.12;
    for (int it = 0; it < iterations; ++it) {
      for (auto& f : force) f = {0.0, 0.0, 0.0};
      auto pull = [&](int a, int b, double target, double k) {
        double dx = coords_[b][0] - coords_[a][0];
        double dy = coords_[b][1] - coords_[a][1];
        double dz = coords_[b][2] - coords_[a][2];
        double d = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (d < 1e-9) {
          // Coincident atoms: push apart along a deterministic axis.
          dx = 1e-3 * (a + 1);
          dy = -1e-3 * (b + 1);
          dz = 1e-3;
          d = std::sqrt(dx * dx + dy * dy + dz * dz);
        }
        double mag = k * (d - target) / d;
        force[a][0] += mag * dx;
        force[a][1] += mag * dy;
        force[a][2] += mag * dz;
        force[b][0] -= mag * dx;
        force[b][1] -= mag * dy;
        force[b][2] -= mag * dz;
      };
      for (int bi = 0; bi < m.bond_count(); ++bi)
        pull(m.bond(bi).a, m.bond(bi).b, 1.0, bond_k);
      for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
          if (m.bond_between(a, b)) continue;
          double dx = coords_[b][0] - coords_[a][0];
          double dy = coords_[b][1] - coords_[a][1];
          double dz = coords_[b][2] - coords_[a][2];
          double d2 = dx * dx + dy * dy + dz * dz;
          // Spring toward the cutoff only acts inside it: pure repulsion.
          if (d2 < cutoff * cutoff) pull(a, b, cutoff, repel_k);
        }
      }
      for (auto [a, b] : angles) pull(a, b, 1.732, angle_k);
      for (int a = 0; a < n; ++a)
        for (int k = 0; k < 3; ++k) coords_[a][k] += step * force[a][k];
      step *= 0.985;
    }
  }

  GeometryOptions opt_;
  std::vector<std::array<double, 3>> coords_;
};

}  // namespace molstory

#endif  // MOLSTORY_GEOMETRY_HPP
