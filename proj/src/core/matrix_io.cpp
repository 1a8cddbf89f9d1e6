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

#include "core/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "core/gate.hpp"

namespace qel {

std::vector<Matrix> parse_matrices(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<Matrix> out;
  std::string token;
  auto next_number = [&](const char* what) {
    if (!(in >> token)) fail(ErrorCode::kParse, std::string("unexpected end of matrix data reading ") + what);
    double v = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
      fail(ErrorCode::kParse, std::string("bad ") + what + " '" + token + "'");
    }
    return v;
  };
  while (in >> token) {
    if (token != "n") fail(ErrorCode::kParse, "expected matrix header 'n <rows> <cols>', got '" + token + "'");
    const double rows = next_number("row count");
    const double cols = next_number("column count");
    if (rows < 1 || cols < 1 || rows != static_cast<Eigen::Index>(rows) || cols != static_cast<Eigen::Index>(cols)) {
      fail(ErrorCode::kParse, "matrix shape must be positive integers");
    }
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = next_number("matrix entry");
    }
    out.push_back(std::move(m));
  }
  if (out.empty()) fail(ErrorCode::kParse, "no matrix blocks found");
  return out;
}

std::vector<Matrix> load_matrices(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_matrices(buf.str());
}

std::string serialize_matrix(const Matrix& m) {
  std::string out = "n " + std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

PotentialSpec spec_from_matrices(const std::vector<Matrix>& blocks) {
  if (blocks.size() == 2 && blocks[0].cols() == 2 * blocks[0].rows()) {
    return PotentialSpec::hat(blocks[0], blocks[1]);
  }
  if (blocks.empty() || blocks.size() % 2 != 0) {
    fail(ErrorCode::kInvalidArgument, "slice file needs pairs of n x n blocks (A_1 B_1 A_2 B_2 ...)");
  }
  std::vector<Slice> slices;
  for (std::size_t p = 0; p < blocks.size(); p += 2) {
    slices.push_back({Operand::dense(blocks[p]), Operand::dense(blocks[p + 1])});
  }
  return PotentialSpec::k_slice(std::move(slices));
}

}  // namespace qel
