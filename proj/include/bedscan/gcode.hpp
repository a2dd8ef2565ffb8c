#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bedscan/errors.hpp"

namespace bedscan::gcode {

// One letter/value pair, e.g. X10.5.
struct Word {
  char letter = '\0';  // A-Z
  double value = 0.0;
};

enum class CommandKind {
  LinearMove,     // G0 / G1
  Home,           // G28
  SetHotendTemp,  // M104
  SetBedTemp,     // M140
  ScanCapture,    // M102, mandatory positive integer P
  Comment,
  Other,
};

struct Command {
  CommandKind kind = CommandKind::Other;
  char code_letter = '\0';  // 'G' or 'M' for recognized words
  int code = -1;            // 1 for G1, 102 for M102, ...
  std::map<char, double> params;
  std::string raw;               // verbatim text for Comment/Other lines
  std::string trailing_comment;  // text after ';' on a structured line
  int source_line = 0;

  bool has(char letter) const { return params.count(letter) != 0; }
  double param(char letter, double fallback = 0.0) const;

  // Command-level structural equality: kind, code, parameters, and
  // preserved text. Source line numbers are ignored.
  bool equivalent(const Command& other) const;
};

struct Program {
  std::vector<Command> commands;

  bool equivalent(const Program& other) const;
};

// Layer-wise scan-word injection: insert an M102 P`positions` after
// every `every_n_layers`-th layer.
struct InjectionConfig {
  int every_n_layers = 1;  // N
  int positions = 20;      // P

  void validate() const;  // both strictly positive
};

// Parses one command per line. Unknown words are preserved verbatim as
// Other; `;` and parenthesized comments are preserved. Throws ParseError
// (with the 1-based line) for malformed numbers and for M102 without a
// positive integer P.
Program parse_program(std::string_view text);

std::string serialize_command(const Command& cmd);

// Inverse of parse_program up to command equivalence; numeric values use
// shortest round-trip decimals.
std::string serialize_program(const Program& program);

// Layer number per command. A new layer begins at the first extruding
// linear move whose Z strictly exceeds every previous extruding-move Z;
// commands before the first layer get 0. Tracks absolute E, honoring
// G92 E resets.
std::vector<int> detect_layers(const Program& program);

inline int layer_count(const std::vector<int>& layer_of) {
  return layer_of.empty() ? 0 : layer_of.back();
}

// Inserts M102 P{cfg.positions} immediately after the last command of
// every layer whose number is a multiple of cfg.every_n_layers. Original
// commands are preserved in order; re-running is a no-op.
Program inject_scan_words(const Program& program, const InjectionConfig& cfg);

}  // namespace bedscan::gcode
