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

#include <string>
#include <string_view>
#include <vector>

#include "core/linalg.hpp"
#include "core/potential.hpp"

namespace qel {

// Whitespace-separated blocks: "n <rows> <cols>" followed by rows*cols
// row-major decimals. A file may hold several blocks.
std::vector<Matrix> parse_matrices(std::string_view text);
std::vector<Matrix> load_matrices(const std::string& path);
std::string serialize_matrix(const Matrix& m);

// Two n x 2n blocks give the hat potential (P, Q); otherwise an even number
// of n x n blocks is read as A_1 B_1 A_2 B_2 ...
PotentialSpec spec_from_matrices(const std::vector<Matrix>& blocks);

}  // namespace qel
