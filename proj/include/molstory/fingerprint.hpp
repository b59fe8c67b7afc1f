//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLSTORY_FINGERPRINT_HPP
#define MOLSTORY_FINGERPRINT_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "molstory/canonical.hpp"
#include "molstory/molgraph.hpp"
#include "molstory/rng.hpp"

namespace molstory {

/// Circular (Morgan-style) per-atom fingerprint folded into a fixed-width
/// bit set. Hashing is self-contained, so bit patterns are identical across
/// platforms and runs.
struct AtomFingerprint {
  std::vector<std::uint64_t> words;
  int width = 0;
  int radius = 0;

  bool bit(int i) const {
    return (words[i / 64] >> (i % 64)) & 1;
  }
  void set_bit(int i) { words[i / 64] |= std::uint64_t{1} << (i % 64); }

  bool operator==(const AtomFingerprint& o) const {
    return width == o.width && words == o.words;
  }
};

inline constexpr int kDefaultFingerprintWidth = 2048;

namespace detail {

inline std::uint64_t atom_invariant_hash(const MolGraph& m, int i) {
  const Atom& a = m.atom(i);
  std::uint64_t h = 0x9d2c5680a6f4b3c1ULL;
  h = hash_combine(h, static_cast<std::uint64_t>(a.element));
  h = hash_combine(h, static_cast<std::uint64_t>(a.charge + 16));
  h = hash_combine(h, static_cast<std::uint64_t>(m.degree(i)));
  h = hash_combine(h, static_cast<std::uint64_t>(a.implicit_h));
  h = hash_combine(h, a.aromatic ? 2 : 1);
  h = hash_combine(h, m.atom_in_ring(i) ? 2 : 1);
  return h;
}

/// Shell hashes for all atoms at radii 0..radius.
inline std::vector<std::vector<std::uint64_t>> shell_hashes(const MolGraph& m,
                                                            int radius) {
  const int n = m.atom_count();
  std::vector<std::vector<std::uint64_t>> shells(radius + 1,
                                                 std::vector<std::uint64_t>(n));
  for (int i = 0; i < n; ++i) shells[0][i] = atom_invariant_hash(m, i);
  for (int r = 1; r <= radius; ++r) {
    for (int i = 0; i < n; ++i) {
      std::vector<std::uint64_t> env;
      for (int bi : m.bonds_of(i)) {
        std::uint64_t bl = static_cast<std::uint64_t>(bond_label(m.bond(bi)));
        env.push_back(hash_combine(bl, shells[r - 1][m.other_end(bi, i)]));
      }
      std::sort(env.begin(), env.end());
      std::uint64_t h = hash_combine(0x5851f42d4c957f2dULL,
                                     static_cast<std::uint64_t>(r));
      h = hash_combine(h, shells[r - 1][i]);
      for (auto e : env) h = hash_combine(h, e);
      shells[r][i] = h;
    }
  }
  return shells;
}

}  // namespace detail

/// Hashed circular environments of radii 0..radius rooted at `atom_idx`.
/// The radius-0 invariant is always present, so no fingerprint is empty.
inline AtomFingerprint atom_fingerprint(const MolGraph& m, int atom_idx,
                                        int radius,
                                        int width = kDefaultFingerprintWidth) {
  auto shells = detail::shell_hashes(m, radius);
  AtomFingerprint fp;
  fp.width = width;
  fp.radius = radius;
  fp.words.assign((width + 63) / 64, 0);
  for (int r = 0; r <= radius; ++r)
    fp.set_bit(static_cast<int>(shells[r][atom_idx] % width));
  return fp;
}

/// All atom fingerprints of a molecule in one pass.
inline std::vector<AtomFingerprint> all_atom_fingerprints(
    const MolGraph& m, int radius, int width = kDefaultFingerprintWidth) {
  auto shells = detail::shell_hashes(m, radius);
  std::vector<AtomFingerprint> fps(m.atom_count());
  for (int i = 0; i < m.atom_count(); ++i) {
    fps[i].width = width;
    fps[i].radius = radius;
    fps[i].words.assign((width + 63) / 64, 0);
    for (int r = 0; r <= radius; ++r)
      fps[i].set_bit(static_cast<int>(shells[r][i] % width));
  }
  return fps;
}

/// |intersection| / |union| of the bit sets. 1.0 when identical.
inline double tanimoto(const AtomFingerprint& f1, const AtomFingerprint& f2) {
  if (f1.width != f2.width)
    throw Error("fingerprint width mismatch");
  std::int64_t inter = 0, uni = 0;
  for (std::size_t w = 0; w < f1.words.size(); ++w) {
    inter += std::popcount(f1.words[w] & f2.words[w]);
    uni += std::popcount(f1.words[w] | f2.words[w]);
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Whole-molecule fingerprint: union of all atom fingerprints. Used by the
/// nearest-neighbour property predictor.
inline AtomFingerprint molecule_fingerprint(const MolGraph& m, int radius = 2,
                                            int width = kDefaultFingerprintWidth) {
  AtomFingerprint fp;
  fp.width = width;
  fp.radius = radius;
  fp.words.assign((width + 63) / 64, 0);
  auto shells = detail::shell_hashes(m, radius);
  for (int i = 0; i < m.atom_count(); ++i)
    for (int r = 0; r <= radius; ++r)
      fp.set_bit(static_cast<int>(shells[r][i] % width));
  return fp;
}

}  // namespace molstory

#endif  // MOLSTORY_FINGERPRINT_HPP
