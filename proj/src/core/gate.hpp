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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qel {

// Planar rotation R_{i,i',theta}: rows i and i' (1-based) are replaced by
//   row_i  <-  cos(theta) * row_i + sin(theta) * row_i'
//   row_i' <- -sin(theta) * row_i + cos(theta) * row_i'
struct Rotation {
  std::size_t i;
  std::size_t i2;
  double theta;

  friend bool operator==(const Rotation&, const Rotation&) = default;
};

// Scaling of row i (1-based) by a nonzero constant.
struct Constant {
  std::size_t i;
  double c;

  friend bool operator==(const Constant&, const Constant&) = default;
};

using Gate = std::variant<Rotation, Constant>;

inline bool is_rotation(const Gate& g) { return std::holds_alternative<Rotation>(g); }

// Throws Error(kOutOfRange / kInvalidArgument) when the gate is not legal in
// dimension n.
void validate_gate(const Gate& gate, std::size_t n);

std::string describe(const Gate& gate);

class GateProgram {
 public:
  explicit GateProgram(std::size_t n);

  std::size_t dim() const noexcept { return n_; }
  std::size_t size() const noexcept { return gates_.size(); }
  bool empty() const noexcept { return gates_.empty(); }
  std::span<const Gate> gates() const noexcept { return gates_; }
  const Gate& operator[](std::size_t k) const { return gates_[k]; }

  void add(const Gate& gate);
  void add_rotation(std::size_t i, std::size_t i2, double theta) { add(Rotation{i, i2, theta}); }
  void add_constant(std::size_t i, double c) { add(Constant{i, c}); }
  // Appends every gate of `other`; dimensions must agree.
  void append(const GateProgram& other);
  void reserve(std::size_t count) { gates_.reserve(count); }

  std::size_t rotation_count() const;
  std::size_t constant_count() const { return size() - rotation_count(); }

  friend bool operator==(const GateProgram&, const GateProgram&) = default;

 private:
  std::size_t n_;
  std::vector<Gate> gates_;
};

// Shortest decimal that parses back to exactly the same double.
std::string format_double(double v);

// Line format: "n <dim> m <count>" then one gate per line, "R <i> <i'> <theta>"
// or "C <i> <c>". Lines starting with '#' are comments; `header_comment`, when
// non-empty, is emitted as the first line prefixed with "# ".
std::string serialize_program(const GateProgram& program, std::string_view header_comment = {});
GateProgram parse_program(std::string_view text);

GateProgram load_program(const std::string& path);
void save_program(const GateProgram& program, const std::string& path,
                  std::string_view header_comment = {});

}  // namespace qel
