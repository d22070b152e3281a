// Textual .tir format: parsing and printing.
// The format is line oriented: one instruction per line, comments with '#'.
#pragma once

#include <stdexcept>
#include <string>

#include "tir/ir.hpp"

namespace tir {

struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(int line_, int col_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ":" +
                           std::to_string(col_) + ": " + msg),
        line(line_),
        column(col_) {}
};

struct ParseOptions {
  // `marker` and `prune_exit` are pass-generated instructions; they are only
  // accepted when reading back artifacts the toolchain itself produced.
  bool trusted = false;
};

// Parses and validates a program. Throws ParseError on syntax errors and on
// the first validation violation (mapped back to a source line).
Program parse_program(const std::string& text, const ParseOptions& opts = {});

// Canonical text form. parse_program(print_program(p)) is structurally
// equal to p (markers and pruner exits require the trusted flag).
std::string print_program(const Program& p);

}  // namespace tir
