//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLSTORY_VOCAB_HPP
#define MOLSTORY_VOCAB_HPP

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "molstory/story.hpp"

namespace molstory {

struct VocabAttachment {
  StandardAttachment rep;
  std::vector<int> orbit_key;
  long count = 0;
};

struct VocabFragment {
  std::shared_ptr<const CanonicalFragment> fragment;
  long count = 0;
  std::vector<VocabAttachment> attachments;  // sorted by representative tuple
  // Every site orbit of the fragment (atoms and ring bonds), observed or
  // not, as (orbit key, representative); focal sites sampled during story
  // replay need a type id even when the orbit never hosted a corpus
  // attachment.
  std::vector<std::pair<std::vector<int>, StandardAttachment>> orbits;
};

/// Fragment/attachment vocabulary with the global action-index table.
/// Fragments are ordered by corpus frequency (descending) then SMILES;
/// attachments by representative tuple; CAUTERIZE is the final action index.
class Vocabulary {
public:
  const std::vector<VocabFragment>& fragments() const { return fragments_; }
  const AttachmentRegistry& registry() const { return registry_; }

  std::optional<int> fragment_index(const std::string& smiles) const {
    auto it = index_.find(smiles);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  struct Action {
    int fragment = -1;
    StandardAttachment attachment;
  };
  const std::vector<Action>& actions() const { return actions_; }
  int cauterize_index() const { return static_cast<int>(actions_.size()); }
  int action_space() const { return static_cast<int>(actions_.size()) + 1; }

  std::optional<int> action_index(int fragment,
                                  const StandardAttachment& rep) const {
    auto it = action_index_.find({fragment, rep.atoms});
    if (it == action_index_.end()) return std::nullopt;
    return it->second;
  }

  /// Attachment-type key space: (arity, representative tuple), shared across
  /// fragments.
  std::optional<int> atype_index(const StandardAttachment& rep) const {
    auto it = atype_index_.find({rep.arity(), rep.atoms});
    if (it == atype_index_.end()) return std::nullopt;
    return it->second;
  }
  int atype_count() const { return static_cast<int>(atype_index_.size()); }

  /// Builds the vocabulary from decomposed molecules. Molecules are
  /// processed in sorted canonical order internally, so the result is
  /// independent of the input ordering.
  static Vocabulary build(const std::vector<MolGraph>& molecules,
                          FragmentCache& cache) {
    struct Decomposed {
      std::string canonical;
      const MolGraph* mol;
    };
    std::vector<Decomposed> order;
    for (const auto& m : molecules)
      order.push_back({write_canonical_smiles(m), &m});
    std::sort(order.begin(), order.end(),
              [](const Decomposed& a, const Decomposed& b) {
                return a.canonical < b.canonical;
              });

    Vocabulary v;
    std::map<std::string, long> frag_counts;
    std::map<std::pair<std::string, std::vector<int>>, long> att_counts;

    for (const auto& d : order) {
      const MolGraph& m = *d.mol;
      auto frags = generate_fragments(m);
      std::vector<ExtractedFragment> extractions;
      for (const auto& fi : frags) {
        extractions.push_back(canonicalize_fragment(fi, m));
        frag_counts[extractions.back().fragment.smiles] += 1;
      }
      for (const auto& att : derive_attachments(m, frags)) {
        for (int side = 0; side < 2; ++side) {
          int fidx = side == 0 ? att.frag_a : att.frag_b;
          auto cf = cache.get(extractions[fidx]);
          // Shared atoms -> this fragment's local indices -> canonical
          // indices through the first recovered map.
          const auto& f0 = extractions[fidx].maps_to_local[0];
          std::vector<int> inv(f0.size());
          for (std::size_t c = 0; c < f0.size(); ++c) inv[f0[c]] = static_cast<int>(c);
          std::vector<int> tuple;
          for (int g : att.shared_atoms)
            tuple.push_back(inv[frags[fidx].global_to_local(g)]);
          StandardAttachment rep = v.registry_.standardize(*cf, tuple);
          att_counts[{cf->smiles, rep.atoms}] += 1;
        }
      }
    }

    std::vector<std::pair<std::string, long>> ordered(frag_counts.begin(),
                                                      frag_counts.end());
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
              });
    for (const auto& [smiles, count] : ordered) {
      VocabFragment vf;
      vf.fragment = cache.get(smiles);
      vf.count = count;
      for (const auto& [key, acount] : att_counts) {
        if (key.first != smiles) continue;
        VocabAttachment va;
        va.rep.atoms = key.second;
        for (int a : key.second) va.orbit_key.push_back(vf.fragment->std_map[a]);
        va.count = acount;
        vf.attachments.push_back(std::move(va));
      }
      std::sort(vf.attachments.begin(), vf.attachments.end(),
                [](const VocabAttachment& a, const VocabAttachment& b) {
                  return a.rep < b.rep;
                });
      // Complete the orbit table: corpus-observed representatives keep
      // their first-seen tuples, the remaining site orbits get systematic
      // ones (atoms in index order, then ring bonds in cycle order). Both
      // orientations of each ring bond are registered; rings without a
      // reflection symmetry have distinct keys for the two directions and
      // attachment tuples can arrive in either.
      const int n = vf.fragment->size;
      for (int c = 0; c < n; ++c)
        v.registry_.standardize(*vf.fragment, {c});
      if (vf.fragment->kind == FragmentKind::Ring) {
        for (int c = 0; c < n; ++c)
          v.registry_.standardize(*vf.fragment, {c, (c + 1) % n});
        for (int c = 0; c < n; ++c)
          v.registry_.standardize(*vf.fragment, {(c + 1) % n, c});
      }
      vf.orbits = v.registry_.entries(smiles);
      fragments_push(v, std::move(vf));
    }
    v.rebuild_indices();
    return v;
  }

  std::string to_text() const {
    std::ostringstream out;
    out << "molstory-vocab 1\n";
    out << "fragments " << fragments_.size() << "\n";
    for (std::size_t i = 0; i < fragments_.size(); ++i) {
      const VocabFragment& vf = fragments_[i];
      out << "fragment " << i << " " << vf.count << " " << vf.fragment->smiles
          << "\n";
      out << "stdmap";
      for (int s : vf.fragment->std_map) out << " " << s;
      out << "\n";
      for (const auto& va : vf.attachments) {
        out << "attachment " << va.count << " "
            << detail::join_indices(va.orbit_key) << " "
            << detail::join_indices(va.rep.atoms) << "\n";
      }
      for (const auto& [key, rep] : vf.orbits) {
        out << "orbit " << detail::join_indices(key) << " "
            << detail::join_indices(rep.atoms) << "\n";
      }
    }
    out << "end\n";
    return out.str();
  }

  static Vocabulary from_text(const std::string& text, FragmentCache& cache) {
    Vocabulary v;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "molstory-vocab 1")
      throw FormatError("not a vocabulary file");
    if (!std::getline(in, line) || line.rfind("fragments ", 0) != 0)
      throw FormatError("missing fragment count");
    VocabFragment* current = nullptr;
    while (std::getline(in, line)) {
      if (line == "end") break;
      std::istringstream ls(line);
      std::string tag;
      ls >> tag;
      if (tag == "fragment") {
        int idx;
        VocabFragment vf;
        std::string smiles;
        ls >> idx >> vf.count >> smiles;
        if (ls.fail()) throw FormatError("malformed fragment line: " + line);
        vf.fragment = cache.get(smiles);
        if (vf.fragment->smiles != smiles)
          throw FormatError("vocabulary SMILES not canonical: " + smiles);
        fragments_push(v, std::move(vf));
        current = &v.fragments_.back();
      } else if (tag == "stdmap") {
        if (!current) throw FormatError("stdmap before fragment");
        std::vector<int> file_map;
        int x;
        while (ls >> x) file_map.push_back(x);
        if (file_map != current->fragment->std_map)
          throw FormatError("standardization map mismatch for " +
                            current->fragment->smiles);
      } else if (tag == "attachment") {
        if (!current) throw FormatError("attachment before fragment");
        std::string key, rep;
        VocabAttachment va;
        ls >> va.count >> key >> rep;
        if (ls.fail()) throw FormatError("malformed attachment line: " + line);
        va.orbit_key = detail::split_indices(key);
        va.rep.atoms = detail::split_indices(rep);
        current->attachments.push_back(std::move(va));
      } else if (tag == "orbit") {
        if (!current) throw FormatError("orbit before fragment");
        std::string key, rep;
        ls >> key >> rep;
        if (ls.fail()) throw FormatError("malformed orbit line: " + line);
        current->orbits.emplace_back(
            detail::split_indices(key),
            StandardAttachment{detail::split_indices(rep)});
      } else {
        throw FormatError("unknown vocabulary line: " + line);
      }
    }
    v.rebuild_indices();
    return v;
  }

private:
  static void fragments_push(Vocabulary& v, VocabFragment vf) {
    v.fragments_.push_back(std::move(vf));
  }

  void rebuild_indices() {
    index_.clear();
    actions_.clear();
    action_index_.clear();
    atype_index_.clear();
    for (std::size_t i = 0; i < fragments_.size(); ++i) {
      index_[fragments_[i].fragment->smiles] = static_cast<int>(i);
      for (const auto& va : fragments_[i].attachments) {
        action_index_[{static_cast<int>(i), va.rep.atoms}] =
            static_cast<int>(actions_.size());
        actions_.push_back({static_cast<int>(i), va.rep});
        registry_.insert(fragments_[i].fragment->smiles, va.orbit_key, va.rep);
      }
      for (const auto& [key, rep] : fragments_[i].orbits)
        registry_.insert(fragments_[i].fragment->smiles, key, rep);
    }
    std::vector<std::pair<int, std::vector<int>>> keys;
    for (const auto& f : fragments_)
      for (const auto& [key, rep] : f.orbits)
        keys.push_back({rep.arity(), rep.atoms});
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (std::size_t i = 0; i < keys.size(); ++i)
      atype_index_[keys[i]] = static_cast<int>(i);
  }

  std::vector<VocabFragment> fragments_;
  std::map<std::string, int> index_;
  AttachmentRegistry registry_;
  std::vector<Action> actions_;
  std::map<std::pair<int, std::vector<int>>, int> action_index_;
  std::map<std::pair<int, std::vector<int>>, int> atype_index_;
};

}  // namespace molstory

#endif  // MOLSTORY_VOCAB_HPP
