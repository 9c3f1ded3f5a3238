#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "accsams/model.hpp"

namespace accsams {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input is not well-formed JSON.
class SyntaxError : public Error {
 public:
  using Error::Error;
};

/// JSON is well-formed but a field is missing, mistyped or out of its domain.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A configuration file (filter, keywords, solution settings) is malformed.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Structurally parsed document failed validate_document().
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);

  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// A figure, formula or table reached export without alt text.
class MissingAltText : public Error {
 public:
  explicit MissingAltText(std::vector<std::string> block_ids);

  const std::vector<std::string>& block_ids() const noexcept { return block_ids_; }

 private:
  std::vector<std::string> block_ids_;
};

/// Malformed line in a JSON Lines manifest. line() is 1-based.
class ManifestError : public Error {
 public:
  ManifestError(std::size_t line, const std::string& what)
      : Error("manifest line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DifferentPage : public Error {
 public:
  using Error::Error;
};

class UnknownId : public Error {
 public:
  using Error::Error;
};

class MismatchedIdSets : public Error {
 public:
  using Error::Error;
};

/// A user-supplied hierarchy breaks a TreeNode invariant.
class InvalidTree : public Error {
 public:
  using Error::Error;
};

}  // namespace accsams
