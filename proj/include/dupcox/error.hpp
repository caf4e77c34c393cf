// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace dupcox {

/// Coarse failure class. The CLI maps these onto process exit codes.
enum class ErrorKind {
  config,     // bad arguments, invalid geometry, precondition violations
  numerical,  // non-convergence, overflow, degenerate estimates
  io,         // unreadable or malformed files
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error config_error(const std::string& what) {
  return Error(ErrorKind::config, what);
}
inline Error numerical_error(const std::string& what) {
  return Error(ErrorKind::numerical, what);
}
inline Error io_error(const std::string& what) {
  return Error(ErrorKind::io, what);
}

/// Exit code convention shared by every CLI subcommand.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
      return 2;
    case ErrorKind::numerical:
      return 3;
    case ErrorKind::io:
      return 4;
  }
  return 1;
}

}  // namespace dupcox
