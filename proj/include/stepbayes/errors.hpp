#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stepbayes {

/// Two observations share a covariate value.
class DuplicateCovariateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A split point coincides exactly with a covariate.
class SplitCoincidenceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An exact computation was requested beyond its configured size limit.
class OversizedRequestError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Malformed input file; `line` is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Incrementally maintained sampler state drifted from a full recomputation.
class CacheVerificationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid run configuration (unknown key, bad value).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace stepbayes
