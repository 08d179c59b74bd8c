// Copyright 2026 The manlab Authors
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


// Shared test data: Pauli matrices, random matrices and a catalog of small
// algebras with known structure.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "manlab/manlab.hpp"

namespace manlab::testing {

inline const std::string kFixtureDir = MANLAB_FIXTURES;

inline std::string fixture(const std::string& name) { return kFixtureDir + "/" + name; }

inline CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}
inline CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline CMatrix random_matrix(int d, RngStream& rng) {
  CMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.complex_normal();
  return m;
}

inline CMatrix bell_basis() {
  const double s = 1.0 / std::sqrt(2.0);
  CMatrix w(4, 4);
  w << s, 0, 0, s, 0, s, s, 0, 0, s, -s, 0, s, 0, 0, -s;
  return w;
}

/// Mutually unbiased qubit bases: computational and Hadamard.
inline std::pair<CMatrix, CMatrix> qubit_mub() {
  const double s = 1.0 / std::sqrt(2.0);
  CMatrix h(2, 2);
  h << s, s, s, -s;
  return {identity(2), h};
}

inline OperatorAlgebra lattice(std::vector<int> dims, std::vector<int> region) {
  return lattice_algebra(dims, region);
}

inline OperatorAlgebra structural(std::vector<std::pair<int, int>> blocks, std::optional<CMatrix> w = std::nullopt) {
  return structural_algebra(blocks, w);
}

/// Operators on C^2 (x) C^2 that commute with the swap; built from generators
/// so that its structure has to be found numerically.
inline OperatorAlgebra symmetric_two_qubit() {
  const CMatrix one = identity(2);
  std::vector<CMatrix> gens;
  for (const auto& p : {pauli_x(), pauli_y(), pauli_z()}) {
    gens.push_back(kron(p, p));
    gens.push_back(kron(p, one) + kron(one, p));
  }
  return algebra_from_generators(gens, 4);
}

/// The algebra generated by the swap on C^d (x) C^d, span{1, S}.
inline OperatorAlgebra swap_generated(int d) {
  const std::vector<CMatrix> gens{swap_operator(d)};
  return algebra_from_generators(gens, d * d);
}

/// Blocks (1,1) x (d-2) and (1,2): NC = 3/(2d).
inline OperatorAlgebra nearly_abelian(int d) {
  std::vector<std::pair<int, int>> blocks(static_cast<std::size_t>(d - 2), {1, 1});
  blocks.emplace_back(1, 2);
  return structural_algebra(blocks);
}

struct NamedAlgebra {
  std::string name;
  OperatorAlgebra algebra;
};

/// Dimension-4 algebras with structure attached or found numerically.
inline std::vector<NamedAlgebra> catalog4() {
  RngStream rng(4242);
  const CMatrix u = haar_unitary(4, rng);
  return {
      {"full", full_algebra(4)},
      {"trivial", trivial_algebra(4)},
      {"m2_x_1", lattice({2, 2}, {0})},
      {"1_x_m2", lattice({2, 2}, {1})},
      {"bell_masa", masa_algebra(bell_basis())},
      {"product_masa", masa_algebra(identity(4))},
      {"symmetric", symmetric_two_qubit()},
      {"rotated_m2", conjugate(lattice({2, 2}, {0}), u)},
      {"two_qubit_blocks", structural({{1, 2}, {1, 2}}, haar_unitary(4, rng))},
      {"mixed_blocks", structural({{1, 1}, {1, 1}, {1, 2}}, haar_unitary(4, rng))},
      {"commutant_of_mixed", commutant(structural({{2, 1}, {1, 2}}))},
  };
}

}  // namespace manlab::testing
