#pragma once

#include <stdexcept>
#include <string>

namespace kdeais {

/// Configuration file or parameter validation failure (CLI exit code 2).
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical fault at run time, e.g. zero proposal density at a sample or a
/// kernel matrix that stays indefinite after jitter escalation (exit code 3).
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failure, annotated with the offending path (exit code 4).
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kdeais
