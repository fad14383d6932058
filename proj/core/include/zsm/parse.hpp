#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zsm/psystem.hpp"

namespace zsm {

struct Diagnostic {
  int line = 0;
  int col = 0;
  std::string message;

  std::string to_string() const {
    return std::to_string(line) + ":" + std::to_string(col) + ": " + message;
  }
};

struct ParseOptions {
  // Accept rules of the skin membrane that send objects out; such objects
  // simply vanish from the configuration and are tallied separately.
  bool allow_skin_out = false;
};

struct ParseResult {
  std::optional<MembraneSystem> system;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return system.has_value() && diagnostics.empty(); }
};

struct ParseError : Error {
  explicit ParseError(std::vector<Diagnostic> diags);
  std::vector<Diagnostic> diagnostics;
};

/// Parses and validates membrane-system source. On failure, `system` is empty
/// and `diagnostics` carries positioned messages (syntax errors stop at the
/// first one; validation problems are collected).
ParseResult parse(std::string_view text, const ParseOptions& options = {});

MembraneSystem parse_or_throw(std::string_view text, const ParseOptions& options = {});

MembraneSystem parse_file_or_throw(const std::string& path, const ParseOptions& options = {});

}  // namespace zsm
