//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLSTORY_ERROR_HPP
#define MOLSTORY_ERROR_HPP

#include <stdexcept>
#include <string>

namespace molstory {

/// Base class for all domain errors thrown by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// SMILES syntax or semantic error. `position` is 1-based within the input
/// string, 0 when the error is not tied to a single character.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t position = 0)
      : Error(position > 0 ? what + " at position " + std::to_string(position)
                           : what),
        position_(position) {}

  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

class ValenceError : public Error {
public:
  using Error::Error;
};

/// Raised when a molecule cannot be decomposed or a story cannot be
/// unrolled/replayed (bridged ring systems, fragment cycles, bad steps).
class DecompositionError : public Error {
public:
  using Error::Error;
};

/// Raised on invalid dock attempts (arity mismatch, element mismatch,
/// valence violation, unknown fragment).
class DockError : public Error {
public:
  using Error::Error;
};

/// Raised on malformed or inconsistent persisted files (vocabulary,
/// weights, config, CSV).
class FormatError : public Error {
public:
  using Error::Error;
};

}  // namespace molstory

#endif  // MOLSTORY_ERROR_HPP
