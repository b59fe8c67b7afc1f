//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLSTORY_STORY_HPP
#define MOLSTORY_STORY_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "molstory/canon.hpp"
#include "molstory/rng.hpp"

namespace molstory {

/// Shared store of canonical fragments keyed by canonical SMILES.
class FragmentCache {
public:
  std::shared_ptr<const CanonicalFragment> get(const std::string& smiles) {
    MolGraph g = parse_smiles(smiles);
    std::string canon = write_canonical_smiles(g);
    auto it = cache_.find(canon);
    if (it != cache_.end()) return it->second;

    auto cf = std::make_shared<CanonicalFragment>();
    cf->graph = parse_smiles(canon);
    cf->smiles = canon;
    cf->size = cf->graph.atom_count();
    if (cf->graph.bond_count() == cf->size && cf->size >= 3) {
      cf->kind = FragmentKind::Ring;
    } else if (cf->size == 2 && cf->graph.bond_count() == 1) {
      cf->kind = FragmentKind::Bond;
    } else {
      throw Error("not a fragment (single ring or single bond): " + canon);
    }
    cf->possible_maps = recover_cyclic_maps(cf->graph, cf->graph, cf->kind);
    cf->std_map = build_standardization_map(cf->possible_maps);
    cache_.emplace(canon, cf);
    return cf;
  }

  std::shared_ptr<const CanonicalFragment> get(const ExtractedFragment& ef) {
    return get(ef.fragment.smiles);
  }

private:
  std::map<std::string, std::shared_ptr<const CanonicalFragment>> cache_;
};

struct StoryStep {
  enum class Action { Start, Dock, Cauterize };
  Action action = Action::Start;
  int focal_instance = -1;
  std::vector<int> focal_atoms;     // canonical indices on the focal fragment
  std::string fragment_smiles;      // start/dock
  std::vector<int> added_atoms;     // dock: canonical indices on the incoming
                                    // fragment, aligned with focal_atoms
};

struct Story {
  std::vector<StoryStep> steps;
  std::string final_smiles;
};

/// An open attachment site: a concrete atom tuple of one fragment instance.
struct Site {
  int instance = -1;
  std::vector<int> atoms;

  bool operator==(const Site& o) const {
    return instance == o.instance && atoms == o.atoms;
  }
};

/// A molecule under construction: the growing graph, fragment placements,
/// the exploration queue of open sites and the cauterization record.
/// Single-owner mutable state; independent molecules can grow in parallel.
class PartialMolecule {
public:
  struct Instance {
    std::shared_ptr<const CanonicalFragment> fragment;
    std::vector<int> atom_map;  // canonical index -> atom index in mol
    int docked = 0;             // sites consumed by docking (either side)
    int cauterized = 0;
  };

  struct DockResult {
    int new_instance = -1;
    std::vector<int> new_atoms;     // indices appended to the graph
    std::vector<int> merged_atoms;  // graph indices of the merged atoms
  };

  const MolGraph& mol() const { return mol_; }
  const std::vector<Instance>& instances() const { return instances_; }
  const std::vector<Site>& queue() const { return queue_; }
  const std::vector<Site>& cauterized_sites() const { return cauterized_; }

  int start(std::shared_ptr<const CanonicalFragment> cf) {
    if (!instances_.empty()) throw Error("molecule already started");
    Instance inst;
    inst.fragment = cf;
    for (int i = 0; i < cf->graph.atom_count(); ++i) {
      const Atom& a = cf->graph.atom(i);
      inst.atom_map.push_back(
          mol_.add_atom(a.element, a.charge, a.aromatic, a.implicit_h));
    }
    for (int bi = 0; bi < cf->graph.bond_count(); ++bi) {
      const Bond& b = cf->graph.bond(bi);
      int nb = mol_.add_bond(inst.atom_map[b.a], inst.atom_map[b.b], b.order,
                             b.aromatic);
      mol_.bond(nb).in_ring = cf->kind == FragmentKind::Ring;
    }
    instances_.push_back(std::move(inst));
    open_sites(0);
    return 0;
  }

  std::optional<int> find_site(int instance,
                               const std::vector<int>& atoms) const {
    for (std::size_t i = 0; i < queue_.size(); ++i)
      if (queue_[i].instance == instance && queue_[i].atoms == atoms)
        return static_cast<int>(i);
    return std::nullopt;
  }

  /// True when the fragment can dock at the queue site through the given
  /// incoming attachment tuple (trying both orientations for pairs).
  bool can_dock(int site_index, const CanonicalFragment& cf,
                const std::vector<int>& added_atoms) const {
    return plan_dock(site_index, cf, added_atoms).has_value();
  }

  DockResult dock(int site_index, std::shared_ptr<const CanonicalFragment> cf,
                  const std::vector<int>& added_atoms) {
    auto plan = plan_dock(site_index, *cf, added_atoms);
    if (!plan) throw DockError("invalid dock: " + plan_error_);
    mol_ = std::move(plan->graph);

    Instance inst;
    inst.fragment = cf;
    inst.atom_map = std::move(plan->incoming_map);
    inst.docked = 1;
    instances_.push_back(std::move(inst));
    int new_instance = static_cast<int>(instances_.size()) - 1;

    instances_[queue_[site_index].instance].docked += 1;
    queue_.erase(queue_.begin() + site_index);
    purge_dead_sites();
    open_sites(new_instance);

    DockResult r;
    r.new_instance = new_instance;
    r.new_atoms = std::move(plan->new_atoms);
    r.merged_atoms = std::move(plan->merged_atoms);
    return r;
  }

  void cauterize(int site_index) {
    if (site_index < 0 || site_index >= static_cast<int>(queue_.size()))
      throw Error("cauterize: site not in queue");
    instances_[queue_[site_index].instance].cauterized += 1;
    cauterized_.push_back(queue_[site_index]);
    queue_.erase(queue_.begin() + site_index);
  }

  /// Finalized molecule: remaining free valences are already implicit
  /// hydrogens. Aromaticity is re-perceived from scratch.
  MolGraph finalize() const {
    MolGraph out = mol_;
    out.mark_ring_bonds();
    perceive_aromaticity(out);
    out.validate();
    return out;
  }

  std::string canonical_smiles() const {
    return write_canonical_smiles(finalize());
  }

  /// Dock saturation of an instance: fractions of (in use, free, cauterized)
  /// sites, affinely scaled to [-1, 1].
  std::array<double, 3> dock_saturation(int instance) const {
    int free = 0;
    for (const auto& s : queue_)
      if (s.instance == instance) ++free;
    const Instance& inst = instances_[instance];
    double total =
        static_cast<double>(inst.docked + inst.cauterized + free);
    std::array<double, 3> out{0.0, 0.0, 0.0};
    if (total > 0) {
      out[0] = inst.docked / total;
      out[1] = free / total;
      out[2] = inst.cauterized / total;
    }
    for (double& x : out) x = 2.0 * x - 1.0;
    return out;
  }

private:
  struct Plan {
    MolGraph graph;
    std::vector<int> incoming_map;
    std::vector<int> new_atoms;
    std::vector<int> merged_atoms;
  };

  // Current number of delocalized doubles assigned to an atom; equals the
  // atom's pi requirement because a valid kekulization is always stored.
  static int assigned_pi(const MolGraph& g, int atom) {
    return g.bond_order_sum(atom) - g.sigma_sum(atom);
  }

  std::optional<Plan> plan_dock(int site_index, const CanonicalFragment& cf,
                                const std::vector<int>& added_atoms) const {
    plan_error_.clear();
    if (site_index < 0 || site_index >= static_cast<int>(queue_.size())) {
      plan_error_ = "site not in queue";
      return std::nullopt;
    }
    const Site& site = queue_[site_index];
    if (added_atoms.size() != site.atoms.size()) {
      plan_error_ = "attachment arity mismatch";
      return std::nullopt;
    }
    for (int a : added_atoms) {
      if (a < 0 || a >= cf.graph.atom_count()) {
        plan_error_ = "attachment atom out of range";
        return std::nullopt;
      }
    }
    if (added_atoms.size() == 2) {
      if (added_atoms[0] == added_atoms[1]) {
        plan_error_ = "attachment atoms must be distinct";
        return std::nullopt;
      }
      if (!cf.graph.bond_between(added_atoms[0], added_atoms[1])) {
        plan_error_ = "attachment pair not bonded in fragment";
        return std::nullopt;
      }
      if (cf.kind != FragmentKind::Ring) {
        plan_error_ = "two-atom attachment requires a ring fragment";
        return std::nullopt;
      }
    }

    // Orientation preserving tuple order first.
    auto attempt = try_merge(site, cf, added_atoms);
    if (attempt) return attempt;
    if (added_atoms.size() == 2) {
      std::vector<int> swapped{added_atoms[1], added_atoms[0]};
      auto second = try_merge(site, cf, swapped);
      if (second) return second;
    }
    return std::nullopt;
  }

  std::optional<Plan> try_merge(const Site& site, const CanonicalFragment& cf,
                                const std::vector<int>& added_atoms) const {
    const Instance& focal = instances_[site.instance];
    const MolGraph& g = cf.graph;

    // Pair up merged atoms and check element/charge compatibility.
    std::vector<std::pair<int, int>> merges;  // (mol atom, fragment atom)
    for (std::size_t k = 0; k < site.atoms.size(); ++k) {
      int p = focal.atom_map[site.atoms[k]];
      int q = added_atoms[k];
      if (mol_.atom(p).element != g.atom(q).element) {
        plan_error_ = "element mismatch at merged atom";
        return std::nullopt;
      }
      if (mol_.atom(p).charge != g.atom(q).charge) {
        plan_error_ = "charge mismatch at merged atom";
        return std::nullopt;
      }
      merges.emplace_back(p, q);
    }

    Plan plan;
    plan.graph = mol_;
    std::vector<int> map(g.atom_count(), -1);
    for (auto [p, q] : merges) {
      map[q] = p;
      plan.merged_atoms.push_back(p);
    }
    for (int q = 0; q < g.atom_count(); ++q) {
      if (map[q] != -1) continue;
      const Atom& a = g.atom(q);
      map[q] = plan.graph.add_atom(a.element, a.charge, a.aromatic,
                                   a.implicit_h);
      plan.new_atoms.push_back(map[q]);
    }

    // Pre-merge pi requirements; merged atoms need the max of both sides
    // (one shared double satisfies every fused ring through this atom).
    std::vector<int> needy(plan.graph.atom_count(), 0);
    for (int p = 0; p < mol_.atom_count(); ++p) needy[p] = assigned_pi(mol_, p);
    std::vector<int> target(plan.graph.atom_count(), 0);
    for (int p = 0; p < mol_.atom_count(); ++p)
      target[p] = mol_.target_valence(p);
    for (int q = 0; q < g.atom_count(); ++q) {
      int t = map[q];
      if (t >= mol_.atom_count()) {
        needy[t] = assigned_pi(g, q);
        target[t] = g.target_valence(q);
      } else {
        needy[t] = std::max(needy[t], assigned_pi(g, q));
        target[t] = std::max(target[t], g.target_valence(q));
      }
    }

    // Union of bonds. The shared fusion bond must agree in kind.
    for (int bi = 0; bi < g.bond_count(); ++bi) {
      const Bond& b = g.bond(bi);
      int ta = map[b.a];
      int tb = map[b.b];
      auto existing = plan.graph.bond_between(ta, tb);
      if (existing) {
        Bond& eb = plan.graph.bond(*existing);
        if (eb.aromatic || b.aromatic) {
          eb.aromatic = true;  // kekulization below reassigns the order
        } else if (eb.order != b.order) {
          plan_error_ = "fused bond order mismatch";
          return std::nullopt;
        }
        if (cf.kind == FragmentKind::Ring) eb.in_ring = true;
      } else {
        int nb = plan.graph.add_bond(ta, tb, b.order, b.aromatic);
        plan.graph.bond(nb).in_ring = cf.kind == FragmentKind::Ring;
      }
    }

    // Merged atoms: aromatic if either side is; hydrogens recomputed from
    // the combined valence.
    for (auto [p, q] : merges) {
      Atom& atom = plan.graph.atom(p);
      atom.aromatic = atom.aromatic || g.atom(q).aromatic;
      int ih = target[p] - plan.graph.sigma_sum(p) - needy[p];
      if (ih < 0) {
        plan_error_ = "valence violation at merged atom";
        return std::nullopt;
      }
      atom.implicit_h = ih;
    }

    if (!kekulize(plan.graph, needy)) {
      plan_error_ = "merged aromatic system cannot be kekulized";
      return std::nullopt;
    }
    try {
      plan.graph.validate();
    } catch (const Error& e) {
      plan_error_ = e.what();
      return std::nullopt;
    }
    plan.incoming_map = std::move(map);
    return plan;
  }

  /// All open sites a freshly placed instance contributes: one per atom with
  /// free valence, plus one per ring bond whose atoms both have capacity.
  void open_sites(int instance) {
    const Instance& inst = instances_[instance];
    const MolGraph& g = inst.fragment->graph;
    const int n = g.atom_count();
    for (int c = 0; c < n; ++c) {
      if (mol_.atom(inst.atom_map[c]).implicit_h >= 1)
        queue_.push_back(Site{instance, {c}});
    }
    if (inst.fragment->kind == FragmentKind::Ring) {
      for (int c = 0; c < n; ++c) {
        int d = (c + 1) % n;
        if (mol_.atom(inst.atom_map[c]).implicit_h >= 1 &&
            mol_.atom(inst.atom_map[d]).implicit_h >= 1)
          queue_.push_back(Site{instance, {c, d}});
      }
    }
  }

  void purge_dead_sites() {
    std::vector<Site> keep;
    for (auto& s : queue_) {
      bool alive = true;
      for (int c : s.atoms) {
        if (mol_.atom(instances_[s.instance].atom_map[c]).implicit_h < 1)
          alive = false;
      }
      if (alive) keep.push_back(std::move(s));
    }
    queue_ = std::move(keep);
  }

  MolGraph mol_;
  std::vector<Instance> instances_;
  std::vector<Site> queue_;
  std::vector<Site> cauterized_;
  mutable std::string plan_error_;
};

/// Vocabulary-observed attachments of a fragment that a pristine instance
/// could currently serve (every tuple atom still has free valence).
inline std::vector<StandardAttachment> enumerate_attachment_points(
    const CanonicalFragment& cf,
    const std::vector<StandardAttachment>& observed) {
  std::vector<StandardAttachment> out;
  for (const auto& att : observed) {
    bool ok = true;
    for (int a : att.atoms)
      if (cf.graph.atom(a).implicit_h < 1) ok = false;
    if (ok) out.push_back(att);
  }
  return out;
}

/// Candidate action for growth at a site: a fragment plus the attachment
/// tuple it would dock through.
struct DockAction {
  std::shared_ptr<const CanonicalFragment> fragment;
  StandardAttachment attachment;
};

/// Indices of `candidates` whose dock precondition holds at the site.
/// Cauterization is always valid and is represented implicitly.
inline std::vector<int> valid_actions(const PartialMolecule& pm,
                                      int site_index,
                                      const std::vector<DockAction>& candidates) {
  std::vector<int> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (pm.can_dock(site_index, *candidates[i].fragment,
                    candidates[i].attachment.atoms))
      out.push_back(static_cast<int>(i));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Unrolling: source-guided story creation.
// ---------------------------------------------------------------------------

/// A molecule decomposed once for repeated unrolling: fragments, their
/// canonical identities, attachments and every canonical-to-global map.
struct SourceDecomposition {
  std::string source_smiles;
  int atom_count = 0;
  std::vector<FragmentInstance> instances;
  std::vector<ExtractedFragment> extractions;
  std::vector<GlobalAttachment> attachments;
  std::vector<std::vector<std::vector<int>>> global_maps;
};

inline SourceDecomposition decompose_source(const MolGraph& m) {
  if (!m.connected())
    throw DecompositionError("story unrolling requires a connected molecule");
  SourceDecomposition d;
  d.source_smiles = write_canonical_smiles(m);
  d.atom_count = m.atom_count();
  d.instances = generate_fragments(m);
  if (d.instances.empty())
    throw DecompositionError("molecule has no fragments (single atom)");
  d.attachments = derive_attachments(m, d.instances);
  for (const auto& fi : d.instances) {
    d.extractions.push_back(canonicalize_fragment(fi, m));
    const auto& ef = d.extractions.back();
    std::vector<std::vector<int>> gmaps;
    for (const auto& f : ef.maps_to_local) {
      std::vector<int> gm(f.size());
      for (std::size_t c = 0; c < f.size(); ++c)
        gm[c] = fi.global_atoms[f[c]];
      gmaps.push_back(std::move(gm));
    }
    d.global_maps.push_back(std::move(gmaps));
  }
  return d;
}

/// Unrolls a molecule into a random story: start from a uniformly sampled
/// fragment, then repeatedly sample an open site; when the source molecule
/// has a not-yet-added fragment docked at an equivalent location the step is
/// a dock, otherwise a cauterization. The replayed story reproduces the
/// molecule's canonical SMILES; a DecompositionError is raised when it
/// cannot (fragment cycles, bridged systems).
inline Story unroll_story(const SourceDecomposition& src, std::uint64_t seed,
                          FragmentCache& cache) {
  const int nfrag = static_cast<int>(src.instances.size());
  Rng rng(seed);

  PartialMolecule pm;
  Story story;
  std::vector<char> added(nfrag, 0);
  std::vector<char> realized(src.attachments.size(), 0);
  std::vector<int> source_of;                       // pm instance -> fragment
  std::vector<std::vector<std::vector<int>>> alive;  // pm instance -> maps

  int start = static_cast<int>(rng.uniform_index(nfrag));
  pm.start(cache.get(src.extractions[start]));
  added[start] = 1;
  source_of.push_back(start);
  alive.push_back(src.global_maps[start]);
  story.steps.push_back(
      StoryStep{StoryStep::Action::Start, -1, {}, src.extractions[start].fragment.smiles, {}});

  while (!pm.queue().empty()) {
    int si = static_cast<int>(rng.uniform_index(pm.queue().size()));
    Site site = pm.queue()[si];
    int k = source_of[site.instance];

    // Search the alive alignments for a source attachment at this site
    // holding a fragment that is not in the story yet.
    int found_att = -1;
    std::vector<int> found_map;
    std::vector<int> found_global;
    for (const auto& f : alive[site.instance]) {
      std::vector<int> g_tuple;
      for (int c : site.atoms) g_tuple.push_back(f[c]);
      std::vector<int> g_sorted = g_tuple;
      std::sort(g_sorted.begin(), g_sorted.end());
      for (std::size_t ai = 0; ai < src.attachments.size(); ++ai) {
        if (realized[ai]) continue;
        const auto& att = src.attachments[ai];
        if (att.frag_a != k && att.frag_b != k) continue;
        int partner = att.frag_a == k ? att.frag_b : att.frag_a;
        if (added[partner]) continue;
        std::vector<int> shared = att.shared_atoms;
        std::sort(shared.begin(), shared.end());
        if (shared != g_sorted) continue;
        found_att = static_cast<int>(ai);
        found_map = f;
        found_global = g_tuple;
        break;
      }
      if (found_att >= 0) break;
    }

    if (found_att < 0) {
      story.steps.push_back(
          StoryStep{StoryStep::Action::Cauterize, site.instance, site.atoms,
                    "", {}});
      pm.cauterize(si);
      continue;
    }

    const auto& att = src.attachments[found_att];
    int partner = att.frag_a == k ? att.frag_b : att.frag_a;

    // Pin the focal alignment to maps that agree on this site.
    {
      std::vector<std::vector<int>> kept;
      for (const auto& f : alive[site.instance]) {
        bool same = true;
        for (std::size_t c = 0; c < site.atoms.size(); ++c)
          if (f[site.atoms[c]] != found_global[c]) same = false;
        if (same) kept.push_back(f);
      }
      alive[site.instance] = std::move(kept);
    }

    // Incoming tuple via the partner's first map, aligned with the focal
    // tuple order; pin the partner's alignment the same way.
    const auto& pmap0 = src.global_maps[partner][0];
    std::vector<int> inv(src.atom_count, -1);
    for (std::size_t c = 0; c < pmap0.size(); ++c) inv[pmap0[c]] = static_cast<int>(c);
    std::vector<int> added_tuple;
    for (int gatom : found_global) added_tuple.push_back(inv[gatom]);
    std::vector<std::vector<int>> partner_alive;
    for (const auto& f : src.global_maps[partner]) {
      bool same = true;
      for (std::size_t c = 0; c < added_tuple.size(); ++c)
        if (f[added_tuple[c]] != found_global[c]) same = false;
      if (same) partner_alive.push_back(f);
    }

    auto cf = cache.get(src.extractions[partner]);
    try {
      pm.dock(si, cf, added_tuple);
    } catch (const DockError& e) {
      throw DecompositionError(std::string("source dock failed: ") + e.what());
    }
    added[partner] = 1;
    realized[found_att] = 1;
    source_of.push_back(partner);
    alive.push_back(std::move(partner_alive));
    story.steps.push_back(StoryStep{StoryStep::Action::Dock, site.instance,
                                    site.atoms, cf->smiles, added_tuple});
  }

  for (int k = 0; k < nfrag; ++k) {
    if (!added[k])
      throw DecompositionError(
          "story cannot reach every fragment (fragment adjacency is not a "
          "tree)");
  }

  story.final_smiles = pm.canonical_smiles();
  if (story.final_smiles != src.source_smiles)
    throw DecompositionError("replayed story does not reproduce the molecule");
  return story;
}

inline Story unroll_story(const MolGraph& m, std::uint64_t seed,
                          FragmentCache& cache) {
  return unroll_story(decompose_source(m), seed, cache);
}

/// Applies the steps of a story in order and returns the finalized molecule.
inline MolGraph replay_story(const Story& s, FragmentCache& cache) {
  if (s.steps.empty() || s.steps.front().action != StoryStep::Action::Start)
    throw Error("story must begin with a start step");
  PartialMolecule pm;
  pm.start(cache.get(s.steps.front().fragment_smiles));
  for (std::size_t i = 1; i < s.steps.size(); ++i) {
    const StoryStep& step = s.steps[i];
    if (step.action == StoryStep::Action::Start)
      throw Error("duplicate start step");
    auto si = pm.find_site(step.focal_instance, step.focal_atoms);
    if (!si) throw Error("story step references a site not in the queue");
    if (step.action == StoryStep::Action::Dock) {
      pm.dock(*si, cache.get(step.fragment_smiles), step.added_atoms);
    } else {
      pm.cauterize(*si);
    }
  }
  if (!pm.queue().empty())
    throw Error("exploration queue not empty at end of story");
  MolGraph out = pm.finalize();
  if (!s.final_smiles.empty() &&
      write_canonical_smiles(out) != s.final_smiles)
    throw Error("replayed molecule does not match the story's final SMILES");
  return out;
}

// ---------------------------------------------------------------------------
// Story text format (documented in docs/formats.md).
// ---------------------------------------------------------------------------

namespace detail {

inline std::string join_indices(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

inline std::vector<int> split_indices(const std::string& s) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    out.push_back(std::stoi(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

}  // namespace detail

inline std::string story_to_text(const Story& s) {
  std::string out;
  for (const auto& step : s.steps) {
    switch (step.action) {
      case StoryStep::Action::Start:
        out += "START " + step.fragment_smiles + "\n";
        break;
      case StoryStep::Action::Dock:
        out += "DOCK " + std::to_string(step.focal_instance) + " " +
               detail::join_indices(step.focal_atoms) + " " +
               step.fragment_smiles + " " +
               detail::join_indices(step.added_atoms) + "\n";
        break;
      case StoryStep::Action::Cauterize:
        out += "CAUT " + std::to_string(step.focal_instance) + " " +
               detail::join_indices(step.focal_atoms) + "\n";
        break;
    }
  }
  if (!s.final_smiles.empty()) out += "FINAL " + s.final_smiles + "\n";
  return out;
}

inline Story story_from_text(const std::string& text) {
  Story s;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    StoryStep step;
    if (tag == "START") {
      step.action = StoryStep::Action::Start;
      ls >> step.fragment_smiles;
    } else if (tag == "DOCK") {
      step.action = StoryStep::Action::Dock;
      std::string focal, added;
      ls >> step.focal_instance >> focal >> step.fragment_smiles >> added;
      step.focal_atoms = detail::split_indices(focal);
      step.added_atoms = detail::split_indices(added);
    } else if (tag == "CAUT") {
      step.action = StoryStep::Action::Cauterize;
      std::string focal;
      ls >> step.focal_instance >> focal;
      step.focal_atoms = detail::split_indices(focal);
    } else if (tag == "FINAL") {
      ls >> s.final_smiles;
      continue;
    } else {
      throw FormatError("unknown story line: " + line);
    }
    if (ls.fail()) throw FormatError("malformed story line: " + line);
    s.steps.push_back(std::move(step));
  }
  return s;
}

}  // namespace molstory

#endif  // MOLSTORY_STORY_HPP
