//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLSTORY_SMILES_HPP
#define MOLSTORY_SMILES_HPP

#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "molstory/aromatic.hpp"
#include "molstory/molgraph.hpp"

namespace molstory {

namespace detail {

struct PendingBond {
  int order = 0;       // 0 = unspecified
  bool aromatic = false;  // explicit ':'
  std::size_t pos = 0;
};

}  // namespace detail

/// Parses the SMILES subset documented in docs/smiles-grammar.md. Aromatic
/// (lowercase) input is kekulized on the fly and aromaticity is re-perceived,
/// so equivalent aromatic and Kekule spellings produce identical graphs.
/// Throws ParseError (1-based position) or ValenceError.
inline MolGraph parse_smiles(const std::string& text) {
  if (text.empty()) throw ParseError("empty SMILES string");

  MolGraph m;
  std::vector<bool> atom_aromatic_token;  // written lowercase
  std::vector<int> atom_hcount;           // -1 = implicit (non-bracket)
  std::vector<std::size_t> atom_pos;      // 1-based, for diagnostics

  struct ProvisionalBond {
    int index;
    std::size_t pos;
    int explicit_order;    // 0 when unspecified
    bool explicit_arom;
  };
  std::vector<ProvisionalBond> made_bonds;

  int prev = -1;
  detail::PendingBond pending;
  std::vector<int> branch_stack;
  std::map<int, std::pair<int, detail::PendingBond>> open_rings;

  auto fail = [&](const std::string& msg, std::size_t pos0) -> void {
    throw ParseError(msg, pos0 + 1);
  };

  auto connect = [&](int a, int b, detail::PendingBond pb, std::size_t pos0,
                     detail::PendingBond pb2 = {}) {
    if (pb.order != 0 && pb2.order != 0 && pb.order != pb2.order)
      fail("conflicting ring-closure bond orders", pos0);
    int order = pb.order != 0 ? pb.order : pb2.order;
    bool arom = pb.aromatic || pb2.aromatic;
    if (m.bond_between(a, b)) fail("duplicate bond", pos0);
    int bi = m.add_bond(a, b, order == 0 ? 1 : order, false);
    made_bonds.push_back({bi, pos0 + 1, order, arom});
  };

  auto add_parsed_atom = [&](Element e, bool aromatic_token, int charge,
                             int hcount, std::size_t pos0) {
    if (aromatic_token && !aromatic_capable(e))
      fail(std::string("element ") + std::string(symbol(e)) +
               " cannot be aromatic",
           pos0);
    int idx = m.add_atom(e, charge, aromatic_token, 0);
    atom_aromatic_token.push_back(aromatic_token);
    atom_hcount.push_back(hcount);
    atom_pos.push_back(pos0 + 1);
    if (prev >= 0) {
      connect(prev, idx, pending, pending.order != 0 ? pending.pos : pos0);
      pending = {};
    } else if (pending.order != 0 || pending.aromatic) {
      fail("bond symbol without preceding atom", pending.pos);
    }
    prev = idx;
  };

  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      fail("whitespace not allowed", i);
    } else if (c == '-' || c == '=' || c == '#' || c == ':') {
      if (pending.order != 0 || pending.aromatic)
        fail("two consecutive bond symbols", i);
      if (c == ':') {
        pending.aromatic = true;
        pending.order = 1;
      } else {
        pending.order = c == '-' ? 1 : (c == '=' ? 2 : 3);
      }
      pending.pos = i;
      ++i;
    } else if (c == '/' || c == '\\' || c == '@') {
      fail("stereochemistry is not supported", i);
    } else if (c == '(') {
      if (prev < 0) fail("branch start without preceding atom", i);
      branch_stack.push_back(prev);
      ++i;
    } else if (c == ')') {
      if (branch_stack.empty()) fail("unmatched ')'", i);
      if (pending.order != 0) fail("dangling bond symbol before ')'", i);
      prev = branch_stack.back();
      branch_stack.pop_back();
      ++i;
    } else if (c == '.') {
      if (!branch_stack.empty()) fail("'.' inside a branch", i);
      if (pending.order != 0) fail("dangling bond symbol before '.'", i);
      prev = -1;
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
      if (prev < 0) fail("ring closure without preceding atom", i);
      int digit;
      std::size_t pos0 = i;
      if (c == '%') {
        if (i + 2 >= n || !std::isdigit(static_cast<unsigned char>(text[i + 1])) ||
            !std::isdigit(static_cast<unsigned char>(text[i + 2])))
          fail("'%' must be followed by two digits", i);
        digit = (text[i + 1] - '0') * 10 + (text[i + 2] - '0');
        i += 3;
      } else {
        digit = c - '0';
        ++i;
      }
      auto it = open_rings.find(digit);
      if (it == open_rings.end()) {
        open_rings[digit] = {prev, pending};
        pending = {};
      } else {
        auto [open_atom, open_bond] = it->second;
        open_rings.erase(it);
        if (open_atom == prev) fail("ring closure to the same atom", pos0);
        connect(open_atom, prev, open_bond, pos0, pending);
        pending = {};
      }
    } else if (c == '[') {
      std::size_t pos0 = i;
      ++i;
      if (i < n && std::isdigit(static_cast<unsigned char>(text[i])))
        fail("isotopes are not supported", i);
      // Element symbol: one uppercase + optional lowercase, or one aromatic
      // lowercase letter.
      bool aromatic_token = false;
      Element e;
      if (i < n && std::islower(static_cast<unsigned char>(text[i]))) {
        std::string sym(1, static_cast<char>(std::toupper(
                               static_cast<unsigned char>(text[i]))));
        if (!element_from_symbol(sym, e)) fail("unsupported element", i);
        aromatic_token = true;
        ++i;
      } else if (i < n && std::isupper(static_cast<unsigned char>(text[i]))) {
        std::string sym(1, text[i]);
        if (i + 1 < n && std::islower(static_cast<unsigned char>(text[i + 1])) &&
            text[i + 1] != 'h') {
          std::string two = sym + text[i + 1];
          if (element_from_symbol(two, e)) {
            i += 2;
          } else if (element_from_symbol(sym, e)) {
            ++i;
          } else {
            fail("unsupported element", i);
          }
        } else {
          if (!element_from_symbol(sym, e)) fail("unsupported element", i);
          ++i;
        }
      } else {
        fail("expected element symbol in brackets", i);
      }
      if (e == Element::H)
        fail("explicit hydrogen atoms are not supported; use bracket H counts",
             pos0);
      int hcount = 0;
      if (i < n && text[i] == 'H') {
        hcount = 1;
        ++i;
        if (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
          hcount = text[i] - '0';
          ++i;
        }
      }
      int charge = 0;
      if (i < n && (text[i] == '+' || text[i] == '-')) {
        int sign = text[i] == '+' ? 1 : -1;
        char sc = text[i];
        ++i;
        if (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
          charge = sign * (text[i] - '0');
          ++i;
        } else {
          charge = sign;
          while (i < n && text[i] == sc) {
            charge += sign;
            ++i;
          }
        }
      }
      if (i >= n || text[i] != ']') fail("expected ']'", i < n ? i : n - 1);
      ++i;
      add_parsed_atom(e, aromatic_token, charge, hcount, pos0);
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      std::size_t pos0 = i;
      Element e;
      std::string sym(1, c);
      if (i + 1 < n && std::islower(static_cast<unsigned char>(text[i + 1]))) {
        std::string two = sym + text[i + 1];
        if (element_from_symbol(two, e)) {
          i += 2;
        } else if (element_from_symbol(sym, e) && e != Element::H) {
          ++i;
        } else {
          fail("unsupported element", i);
        }
      } else {
        if (!element_from_symbol(sym, e) || e == Element::H)
          fail("unsupported element", i);
        ++i;
      }
      add_parsed_atom(e, false, 0, -1, pos0);
    } else if (std::islower(static_cast<unsigned char>(c))) {
      Element e;
      std::string sym(1, static_cast<char>(
                             std::toupper(static_cast<unsigned char>(c))));
      if (!element_from_symbol(sym, e) || !aromatic_capable(e))
        fail("unsupported element", i);
      add_parsed_atom(e, true, 0, -1, i);
      ++i;
    } else {
      fail("unexpected character", i);
    }
  }

  if (pending.order != 0) fail("dangling bond symbol", pending.pos);
  if (!branch_stack.empty()) fail("unmatched '('", n - 1);
  if (!open_rings.empty())
    throw ParseError("unmatched ring closure digit " +
                     std::to_string(open_rings.begin()->first));
  if (m.atom_count() == 0) throw ParseError("no atoms in SMILES string");

  m.mark_ring_bonds();

  // Resolve bond flavours. An unmarked bond between two aromatic tokens is
  // aromatic when it sits in a ring, single otherwise (biphenyl).
  for (const auto& pb : made_bonds) {
    Bond& b = m.bond(pb.index);
    bool both_aromatic = atom_aromatic_token[b.a] && atom_aromatic_token[b.b];
    if (pb.explicit_arom) {
      if (!both_aromatic)
        throw ParseError("':' requires two aromatic atoms", pb.pos);
      b.aromatic = true;
    } else if (pb.explicit_order == 0 && both_aromatic && b.in_ring) {
      b.aromatic = true;
      b.order = 1;
    }
  }

  // Implicit hydrogens. Aromatic tokens reserve one valence unit for the
  // delocalized double bond they may host.
  std::vector<int> needy(m.atom_count(), 0);
  for (int a = 0; a < m.atom_count(); ++a) {
    Atom& atom = m.atom(a);
    int sigma = m.sigma_sum(a);
    if (atom_hcount[a] >= 0) {
      atom.implicit_h = atom_hcount[a];
    } else if (atom_aromatic_token[a]) {
      int first = allowed_valences(atom.element, atom.charge).front();
      atom.implicit_h = std::max(0, first - sigma - 1);
    } else {
      int target = fit_valence(atom.element, atom.charge, sigma);
      if (target < 0)
        throw ValenceError(
            std::string("bond order sum exceeds maximum valence for ") +
            std::string(symbol(atom.element)) + " at position " +
            std::to_string(atom_pos[a]));
      atom.implicit_h = target - sigma;
    }
    if (atom_aromatic_token[a]) {
      int occupied = sigma + atom.implicit_h;
      int target = fit_valence(atom.element, atom.charge, occupied);
      if (target < 0)
        throw ValenceError(
            std::string("bond order sum exceeds maximum valence for ") +
            std::string(symbol(atom.element)) + " at position " +
            std::to_string(atom_pos[a]));
      needy[a] = target - occupied;
      if (needy[a] > 1)
        throw ParseError("aromatic atom cannot host its valence",
                         atom_pos[a]);
    }
  }

  if (!kekulize(m, needy))
    throw ParseError("aromatic system cannot be kekulized");

  m.validate();
  perceive_aromaticity(m);
  return m;
}

/// Number of heavy (non-hydrogen) atoms; hydrogens are implicit throughout.
inline int heavy_atom_count(const MolGraph& m) { return m.atom_count(); }

}  // namespace molstory

#endif  // MOLSTORY_SMILES_HPP
