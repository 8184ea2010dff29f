#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gridtopo {

enum class ErrorKind {
  invalid_argument,  // bad call arguments (index out of range, k out of range)
  parse,             // malformed input document
  validation,        // input parses but violates a model invariant
  disconnected,      // operation needs a connected graph
  infeasible,        // enumeration cap exceeded or degenerate objective
  numerical,         // solver residual or divergence check failed
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying a category so callers (the CLI in particular) can map
/// failures onto exit codes without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gridtopo
