//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLSTORY_ELEMENTS_HPP
#define MOLSTORY_ELEMENTS_HPP

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "molstory/error.hpp"

namespace molstory {

enum class Element : unsigned char {
  H,
  B,
  C,
  N,
  O,
  F,
  P,
  S,
  Cl,
  Br,
  I,
};

inline constexpr std::array<std::string_view, 11> kElementSymbols = {
    "H", "B", "C", "N", "O", "F", "P", "S", "Cl", "Br", "I"};

inline std::string_view symbol(Element e) {
  return kElementSymbols[static_cast<std::size_t>(e)];
}

inline bool element_from_symbol(std::string_view s, Element& out) {
  for (std::size_t i = 0; i < kElementSymbols.size(); ++i) {
    if (kElementSymbols[i] == s) {
      out = static_cast<Element>(i);
      return true;
    }
  }
  return false;
}

/// Elements that may carry the aromatic (lowercase) flag in SMILES input.
inline bool aromatic_capable(Element e) {
  switch (e) {
    case Element::B:
    case Element::C:
    case Element::N:
    case Element::O:
    case Element::P:
    case Element::S:
      return true;
    default:
      return false;
  }
}

/// Allowed total valences (sigma + pi + H) for an element at a given formal
/// charge, sorted ascending. Empty means the charge state is unsupported.
inline std::vector<int> allowed_valences(Element e, int charge) {
  switch (e) {
    case Element::H:
      return charge == 0 ? std::vector<int>{1} : std::vector<int>{};
    case Element::B:
      if (charge == 0) return {3};
      if (charge == -1) return {4};
      return {};
    case Element::C:
      if (charge == 0) return {4};
      if (charge == 1 || charge == -1) return {3};
      return {};
    case Element::N:
      if (charge == 0) return {3};
      if (charge == 1) return {4};
      if (charge == -1) return {2};
      return {};
    case Element::O:
      if (charge == 0) return {2};
      if (charge == 1) return {3};
      if (charge == -1) return {1};
      return {};
    case Element::F:
    case Element::Cl:
    case Element::Br:
    case Element::I:
      if (charge == 0) return {1};
      if (charge == -1) return {0};
      return {};
    case Element::P:
      if (charge == 0) return {3, 5};
      if (charge == 1) return {4};
      return {};
    case Element::S:
      if (charge == 0) return {2, 4, 6};
      if (charge == 1) return {3, 5};
      if (charge == -1) return {1};
      return {};
  }
  return {};
}

/// Smallest allowed valence >= occupied, or -1 when none fits.
inline int fit_valence(Element e, int charge, int occupied) {
  for (int v : allowed_valences(e, charge)) {
    if (v >= occupied) return v;
  }
  return -1;
}

inline int max_valence(Element e, int charge) {
  auto vals = allowed_valences(e, charge);
  return vals.empty() ? -1 : vals.back();
}

}  // namespace molstory

#endif  // MOLSTORY_ELEMENTS_HPP
