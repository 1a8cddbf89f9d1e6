// Copyright 2026 The qelab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/gate.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "core/error.hpp"

namespace qel {

void validate_gate(const Gate& gate, std::size_t n) {
  auto check_row = [n](std::size_t i) {
    if (i < 1 || i > n) {
      fail(ErrorCode::kOutOfRange,
           "row index " + std::to_string(i) + " outside [1, " + std::to_string(n) + "]");
    }
  };
  if (const auto* r = std::get_if<Rotation>(&gate)) {
    check_row(r->i);
    check_row(r->i2);
    if (r->i == r->i2) fail(ErrorCode::kInvalidArgument, "rotation rows must differ");
    if (!std::isfinite(r->theta)) fail(ErrorCode::kInvalidArgument, "rotation angle is not finite");
  } else {
    const auto& c = std::get<Constant>(gate);
    check_row(c.i);
    if (c.c == 0.0) fail(ErrorCode::kInvalidArgument, "constant gate with c = 0");
    if (!std::isfinite(c.c)) fail(ErrorCode::kInvalidArgument, "constant gate with non-finite c");
  }
}

std::string describe(const Gate& gate) {
  if (const auto* r = std::get_if<Rotation>(&gate)) {
    return "R " + std::to_string(r->i) + " " + std::to_string(r->i2) + " " + format_double(r->theta);
  }
  const auto& c = std::get<Constant>(gate);
  return "C " + std::to_string(c.i) + " " + format_double(c.c);
}

GateProgram::GateProgram(std::size_t n) : n_(n) {
  if (n == 0) fail(ErrorCode::kInvalidArgument, "program dimension must be positive");
}

void GateProgram::add(const Gate& gate) {
  validate_gate(gate, n_);
  gates_.push_back(gate);
}

void GateProgram::append(const GateProgram& other) {
  if (other.n_ != n_) fail(ErrorCode::kInvalidArgument, "cannot append programs of different dimension");
  gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
}

std::size_t GateProgram::rotation_count() const {
  std::size_t count = 0;
  for (const auto& g : gates_) count += is_rotation(g) ? 1 : 0;
  return count;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string serialize_program(const GateProgram& program, std::string_view header_comment) {
  std::string out;
  out.reserve(32 * (program.size() + 2));
  if (!header_comment.empty()) {
    out += "# ";
    out += header_comment;
    out += '\n';
  }
  out += "n " + std::to_string(program.dim()) + " m " + std::to_string(program.size()) + "\n";
  for (const auto& g : program.gates()) {
    out += describe(g);
    out += '\n';
  }
  return out;
}

namespace {

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
  fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + what);
}

template <typename T>
T parse_number(std::istringstream& in, std::size_t line_no, const char* field) {
  std::string token;
  if (!(in >> token)) parse_error(line_no, std::string("missing ") + field);
  T value{};
  auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    parse_error(line_no, std::string("bad ") + field + " '" + token + "'");
  }
  return value;
}

}  // namespace

GateProgram parse_program(std::string_view text) {
  std::istringstream stream{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::size_t expected = 0;
  std::optional<GateProgram> program;

  while (std::getline(stream, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream in(line);
    std::string tag;
    in >> tag;
    if (!program) {
      if (tag != "n") parse_error(line_no, "expected header 'n <dim> m <count>'");
      auto n = parse_number<std::size_t>(in, line_no, "dimension");
      std::string m_tag;
      if (!(in >> m_tag) || m_tag != "m") parse_error(line_no, "expected 'm <count>'");
      expected = parse_number<std::size_t>(in, line_no, "gate count");
      if (n == 0) parse_error(line_no, "dimension must be positive");
      program.emplace(n);
      program->reserve(expected);
      continue;
    }
    try {
      if (tag == "R") {
        auto i = parse_number<std::size_t>(in, line_no, "row");
        auto i2 = parse_number<std::size_t>(in, line_no, "row");
        auto theta = parse_number<double>(in, line_no, "angle");
        program->add_rotation(i, i2, theta);
      } else if (tag == "C") {
        auto i = parse_number<std::size_t>(in, line_no, "row");
        auto c = parse_number<double>(in, line_no, "constant");
        program->add_constant(i, c);
      } else {
        parse_error(line_no, "unknown gate tag '" + tag + "'");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kParse) throw;
      parse_error(line_no, e.what());
    }
    std::string extra;
    if (in >> extra) parse_error(line_no, "trailing token '" + extra + "'");
  }
  if (!program) fail(ErrorCode::kParse, "missing program header");
  if (program->size() != expected) {
    fail(ErrorCode::kParse, "header announces " + std::to_string(expected) + " gates, found " +
                                std::to_string(program->size()));
  }
  return std::move(*program);
}

GateProgram load_program(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_program(buf.str());
}

void save_program(const GateProgram& program, const std::string& path, std::string_view header_comment) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path);
  out << serialize_program(program, header_comment);
  if (!out) fail(ErrorCode::kIo, "write failed for " + path);
}

}  // namespace qel
