#include "bedscan/gcode.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

namespace bedscan::gcode {

namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

// Longest numeric prefix at s[pos]; returns NaN on failure.
double scan_number(std::string_view s, std::size_t& pos) {
  std::size_t end = pos;
  auto more = [&] { return end < s.size(); };
  if (more() && (s[end] == '+' || s[end] == '-')) ++end;
  std::size_t digits_begin = end;
  while (more() && std::isdigit(static_cast<unsigned char>(s[end]))) ++end;
  if (more() && s[end] == '.') {
    ++end;
    while (more() && std::isdigit(static_cast<unsigned char>(s[end]))) ++end;
  }
  if (end == digits_begin ||
      (end == digits_begin + 1 && s[digits_begin] == '.')) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (more() && (s[end] == 'e' || s[end] == 'E')) {
    std::size_t exp = end + 1;
    if (exp < s.size() && (s[exp] == '+' || s[exp] == '-')) ++exp;
    std::size_t exp_digits = exp;
    while (exp < s.size() && std::isdigit(static_cast<unsigned char>(s[exp])))
      ++exp;
    if (exp > exp_digits) end = exp;
  }
  double value = 0.0;
  auto res = std::from_chars(s.data() + pos, s.data() + end, value);
  if (res.ec != std::errc{} || res.ptr != s.data() + end) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  pos = end;
  return value;
}

struct LineParts {
  std::string body;
  std::string trailing_comment;  // after ';', verbatim
};

LineParts split_comment(std::string_view line) {
  LineParts parts;
  bool in_parens = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (!in_parens && c == ';') {
      parts.trailing_comment.assign(line.substr(i + 1));
      break;
    }
    if (c == '(') {
      in_parens = true;
      continue;
    }
    if (c == ')') {
      in_parens = false;
      continue;
    }
    if (!in_parens) parts.body.push_back(c);
  }
  return parts;
}

Command parse_line(std::string_view line, int line_no) {
  Command cmd;
  cmd.source_line = line_no;

  if (is_blank(line)) {
    cmd.kind = CommandKind::Comment;
    cmd.raw.assign(line);
    return cmd;
  }

  LineParts parts = split_comment(line);
  if (is_blank(parts.body)) {
    // Pure comment line; keep it verbatim.
    cmd.kind = CommandKind::Comment;
    cmd.raw.assign(line);
    return cmd;
  }

  std::vector<Word> words;
  std::size_t pos = 0;
  std::string_view body = parts.body;
  while (pos < body.size()) {
    unsigned char c = body[pos];
    if (std::isspace(c)) {
      ++pos;
      continue;
    }
    if (!std::isalpha(c)) {
      throw ParseError(std::string("unexpected character '") +
                           static_cast<char>(c) + "'",
                       line_no);
    }
    char letter = static_cast<char>(std::toupper(c));
    ++pos;
    double value = scan_number(body, pos);
    if (std::isnan(value)) {
      throw ParseError(std::string("malformed numeric value for word '") +
                           letter + "'",
                       line_no);
    }
    words.push_back({letter, value});
  }

  const Word& head = words.front();
  const bool integral_head = head.value == std::floor(head.value);
  const int code = integral_head ? static_cast<int>(head.value) : -1;

  cmd.code_letter = head.letter;
  cmd.code = code;
  for (std::size_t i = 1; i < words.size(); ++i) {
    cmd.params[words[i].letter] = words[i].value;
  }
  cmd.trailing_comment = parts.trailing_comment;

  if (head.letter == 'G' && (code == 0 || code == 1)) {
    cmd.kind = CommandKind::LinearMove;
  } else if (head.letter == 'G' && code == 28) {
    cmd.kind = CommandKind::Home;
  } else if (head.letter == 'M' && code == 104) {
    cmd.kind = CommandKind::SetHotendTemp;
  } else if (head.letter == 'M' && code == 140) {
    cmd.kind = CommandKind::SetBedTemp;
  } else if (head.letter == 'M' && code == 102) {
    cmd.kind = CommandKind::ScanCapture;
    if (!cmd.has('P')) {
      throw ParseError("scan word requires P", line_no);
    }
    const double p = cmd.params['P'];
    if (p != std::floor(p) || p < 1.0) {
      throw ParseError("scan word P must be an integer >= 1", line_no);
    }
  } else {
    cmd.kind = CommandKind::Other;
    cmd.raw.assign(line);
  }
  return cmd;
}

std::string format_value(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

double Command::param(char letter, double fallback) const {
  auto it = params.find(letter);
  return it == params.end() ? fallback : it->second;
}

bool Command::equivalent(const Command& other) const {
  if (kind != other.kind) return false;
  if (kind == CommandKind::Comment || kind == CommandKind::Other) {
    return raw == other.raw;
  }
  return code_letter == other.code_letter && code == other.code &&
         params == other.params && trailing_comment == other.trailing_comment;
}

bool Program::equivalent(const Program& other) const {
  if (commands.size() != other.commands.size()) return false;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (!commands[i].equivalent(other.commands[i])) return false;
  }
  return true;
}

void InjectionConfig::validate() const {
  if (every_n_layers < 1) {
    throw ParameterError("injection interval N must be >= 1");
  }
  if (positions < 1) {
    throw ParameterError("capture positions P must be >= 1");
  }
}

Program parse_program(std::string_view text) {
  Program program;
  int line_no = 1;
  std::size_t start = 0;
  while (start <= text.size()) {
    if (start == text.size()) {
      // No trailing newline: the loop above already consumed everything.
      break;
    }
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(
        start, nl == std::string_view::npos ? text.size() - start : nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    program.commands.push_back(parse_line(line, line_no));
    if (nl == std::string_view::npos) break;
    start = nl + 1;
    ++line_no;
  }
  return program;
}

std::string serialize_command(const Command& cmd) {
  if (cmd.kind == CommandKind::Comment || cmd.kind == CommandKind::Other) {
    return cmd.raw;
  }
  std::string out;
  out.push_back(cmd.code_letter);
  out += std::to_string(cmd.code);
  // Canonical parameter order: common axis/feed letters, then the rest.
  static constexpr char kOrder[] = "XYZEFSPIJKR";
  std::string emitted;
  for (char letter : kOrder) {
    auto it = cmd.params.find(letter);
    if (it != cmd.params.end()) {
      out += ' ';
      out.push_back(letter);
      out += format_value(it->second);
      emitted.push_back(letter);
    }
  }
  for (const auto& [letter, value] : cmd.params) {
    if (emitted.find(letter) != std::string::npos) continue;
    out += ' ';
    out.push_back(letter);
    out += format_value(value);
  }
  if (!cmd.trailing_comment.empty()) {
    out += " ;";
    out += cmd.trailing_comment;
  }
  return out;
}

std::string serialize_program(const Program& program) {
  std::string out;
  for (const Command& cmd : program.commands) {
    out += serialize_command(cmd);
    out.push_back('\n');
  }
  return out;
}

std::vector<int> detect_layers(const Program& program) {
  std::vector<int> layer_of(program.commands.size(), 0);
  double z = 0.0;
  double e_ref = 0.0;
  double max_extruded_z = -std::numeric_limits<double>::infinity();
  int layer = 0;

  for (std::size_t i = 0; i < program.commands.size(); ++i) {
    const Command& cmd = program.commands[i];
    switch (cmd.kind) {
      case CommandKind::Home:
        z = 0.0;
        break;
      case CommandKind::Other:
        // Honor extruder-axis resets so absolute-E slicer output keeps
        // extrusion detection correct.
        if (cmd.code_letter == 'G' && cmd.code == 92 && cmd.has('E')) {
          e_ref = cmd.params.at('E');
        }
        break;
      case CommandKind::LinearMove: {
        if (cmd.has('Z')) z = cmd.params.at('Z');
        if (cmd.has('E')) {
          const double e = cmd.params.at('E');
          if (e > e_ref && z > max_extruded_z) {
            ++layer;
            max_extruded_z = z;
          }
          e_ref = e;
        }
        break;
      }
      default:
        break;
    }
    layer_of[i] = layer;
  }
  return layer_of;
}

Program inject_scan_words(const Program& program, const InjectionConfig& cfg) {
  cfg.validate();
  const std::vector<int> layer_of = detect_layers(program);
  const int layers = layer_count(layer_of);

  Program out;
  out.commands.reserve(program.commands.size() + layers / cfg.every_n_layers);
  for (std::size_t i = 0; i < program.commands.size(); ++i) {
    const Command& cmd = program.commands[i];
    out.commands.push_back(cmd);
    const int layer = layer_of[i];
    const bool end_of_layer =
        i + 1 == program.commands.size() || layer_of[i + 1] > layer;
    if (!end_of_layer || layer == 0 || layer % cfg.every_n_layers != 0) {
      continue;
    }
    if (cmd.kind == CommandKind::ScanCapture &&
        cmd.param('P') == static_cast<double>(cfg.positions)) {
      continue;  // already injected
    }
    Command scan;
    scan.kind = CommandKind::ScanCapture;
    scan.code_letter = 'M';
    scan.code = 102;
    scan.params['P'] = static_cast<double>(cfg.positions);
    scan.source_line = cmd.source_line;
    out.commands.push_back(scan);
  }
  return out;
}

}  // namespace bedscan::gcode
