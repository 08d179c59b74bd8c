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


#include <cmath>
#include <vector>

#include "catch_amalgamated.hpp"
#include "fixtures.hpp"

using namespace manlab;
using namespace manlab::testing;
using Catch::Matchers::WithinAbs;

TEST_CASE("algebras from generators") {
  const std::vector<CMatrix> z{pauli_z()};
  CHECK(algebra_from_generators(z, 2).size() == 2);
  const std::vector<CMatrix> xz{pauli_x(), pauli_z()};
  CHECK(algebra_from_generators(xz, 2).size() == 4);
  CHECK(algebra_from_generators(std::vector<CMatrix>{}, 3).size() == 1);
  const std::vector<CMatrix> bad{identity(3)};
  CHECK_THROWS_AS(algebra_from_generators(bad, 2), ShapeError);

  for (const auto& [name, a] : catalog4()) {
    INFO(name);
    const auto check = check_algebra(a);
    CHECK(check.identity_residual <= 1e-9);
    CHECK(check.adjoint_residual <= 1e-9);
    CHECK(check.product_residual <= 1e-9);
  }
}

TEST_CASE("commutants") {
  CHECK(commutant(full_algebra(3)).size() == 1);
  CHECK(commutant(full_algebra(3).without_structure()).size() == 1);

  const auto m2 = lattice({2, 2}, {0});
  const auto c = commutant(m2.without_structure());
  CHECK(c.size() == 4);
  CHECK(same_algebra(c, lattice({2, 2}, {1})));

  const auto diag = masa_algebra(identity(4));
  CHECK(same_algebra(commutant(diag.without_structure()), diag));

  // Numeric and structural routes agree.
  for (const auto& [name, a] : catalog4()) {
    INFO(name);
    const auto numeric = commutant(a.without_structure());
    const auto structural = commutant(OperatorAlgebra::from_structure(a.structure()));
    CHECK(same_algebra(numeric, structural));
  }
}

TEST_CASE("double commutant returns the algebra") {
  for (const auto& [name, a] : catalog4()) {
    INFO(name);
    CHECK(projector_distance(commutant(commutant(a.without_structure())), a) <= 1e-8);
  }
  const auto sym = swap_generated(3);
  CHECK(projector_distance(commutant(commutant(sym)), sym) <= 1e-8);
}

TEST_CASE("centers") {
  CHECK(center(full_algebra(4)).size() == 1);
  const auto diag = masa_algebra(bell_basis());
  CHECK(same_algebra(center(diag.without_structure()), diag));
  CHECK(center(symmetric_two_qubit()).size() == 2);
}

TEST_CASE("structural decomposition") {
  SECTION("full algebra") {
    const auto dec = decompose(full_algebra(3).without_structure());
    REQUIRE(dec.blocks.size() == 1);
    CHECK(dec.blocks[0].n == 1);
    CHECK(dec.blocks[0].d == 3);
  }
  SECTION("symmetric operators on two qubits") {
    const auto dec = decompose(symmetric_two_qubit());
    REQUIRE(dec.blocks.size() == 2);
    CHECK(dec.blocks[0].n == 1);
    CHECK(dec.blocks[0].d == 1);
    CHECK(dec.blocks[1].n == 1);
    CHECK(dec.blocks[1].d == 3);
    CHECK_FALSE(is_collinear(dec).collinear);
  }
  SECTION("structural round trip through a random basis change") {
    RngStream rng(21);
    const CMatrix w = haar_unitary(3, rng);
    const auto a = structural({{1, 1}, {1, 2}}, w);
    const auto dec = decompose(a.without_structure());
    REQUIRE(dec.blocks.size() == 2);
    CHECK(dec.blocks[0].d == 1);
    CHECK(dec.blocks[1].d == 2);
    CHECK(same_algebra(OperatorAlgebra::from_structure(dec), a));
  }
  SECTION("swap-generated algebra on 3 x 3 has a non-trivial commutant") {
    const auto sym = swap_generated(3);
    const auto c = commutant(sym);
    CHECK(c.size() == 45);
    const auto dec = decompose(c);
    REQUIRE(dec.blocks.size() == 2);
    CHECK(dec.d_algebra() == 45);
    CHECK(dec.d_commutant() == 2);
  }
}

TEST_CASE("decomposition invariants hold for every fixture") {
  for (const auto& [name, a] : catalog4()) {
    INFO(name);
    const auto dec = decompose(a.without_structure());
    int total = 0;
    CMatrix sum = CMatrix::Zero(4, 4);
    for (std::size_t i = 0; i < dec.blocks.size(); ++i) {
      const auto& b = dec.blocks[i];
      total += b.n * b.d;
      sum += b.projector;
      CHECK((b.iso.adjoint() * b.iso - identity(b.n * b.d)).norm() < 1e-9);
      CHECK((b.iso * b.iso.adjoint() - b.projector).norm() < 1e-9);
      for (std::size_t j = 0; j < i; ++j) CHECK((b.projector * dec.blocks[j].projector).norm() < 1e-9);
      // Conjugating the algebra by the block isometry lands in 1_n (x) M_d.
      for (const auto& x : a.basis()) {
        const CMatrix y = b.iso.adjoint() * x * b.iso;
        const std::vector<int> dims{b.n, b.d};
        const std::vector<int> keep{1};
        const CMatrix factor = partial_trace(y, dims, keep) / static_cast<double>(b.n);
        CHECK((y - kron(identity(b.n), factor)).norm() < 1e-8);
      }
    }
    CHECK(total == 4);
    CHECK((sum - identity(4)).norm() < 1e-9);
    CHECK(dec.d_algebra() == a.size());
    CHECK(dec.d_commutant() == commutant(a.without_structure()).size());
    CHECK(dec.d_center() == center(a.without_structure()).size());

    const bool collinear = is_collinear(dec).collinear;
    CHECK(dec.d_algebra() * dec.d_commutant() >= 16);
    CHECK((dec.d_algebra() * dec.d_commutant() == 16) == collinear);
  }
}

TEST_CASE("collinearity") {
  const auto f = is_collinear(lattice({2, 3}, {0}).structure());
  CHECK(f.collinear);
  REQUIRE(f.ratio);
  CHECK_THAT(*f.ratio, WithinAbs(1.5, 1e-12));
  const auto m = is_collinear(masa_algebra(identity(3)).structure());
  CHECK(m.collinear);
  CHECK_THAT(*m.ratio, WithinAbs(1.0, 1e-12));
  CHECK_FALSE(is_collinear(decompose(symmetric_two_qubit())).collinear);
}

TEST_CASE("block bases") {
  {
    const auto b = block_bases(trivial_algebra(3).structure());
    REQUIRE(b.e.size() == 1);
    CHECK((b.e[0] - identity(3)).norm() < 1e-12);
  }
  {
    const auto b = block_bases(full_algebra(2).structure());
    REQUIRE(b.e.size() == 4);
    for (const auto& e : b.e) CHECK_THAT(hs_norm2(e), WithinAbs(0.5, 1e-12));
  }
  for (const auto& [name, a] : catalog4()) {
    INFO(name);
    const auto& dec = a.structure();
    const auto b = block_bases(dec);
    CHECK(static_cast<int>(b.e.size()) == dec.d_algebra());
    CHECK(static_cast<int>(b.e_tilde.size()) == dec.d_commutant());
    std::size_t k = 0;
    for (const auto& blk : dec.blocks) {
      for (int i = 0; i < blk.d * blk.d; ++i, ++k) {
        CHECK_THAT(hs_norm2(b.e[k]), WithinAbs(static_cast<double>(blk.n) / blk.d, 1e-10));
      }
    }
    for (std::size_t i = 0; i < b.e.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) CHECK(std::abs(hs_inner(b.e[i], b.e[j])) < 1e-10);
    for (std::size_t i = 0; i < b.e_tilde.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) CHECK(std::abs(hs_inner(b.e_tilde[i], b.e_tilde[j])) < 1e-10);
    CMatrix sum = CMatrix::Zero(4, 4);
    for (const auto& e : b.e) sum += e * e.adjoint();
    CHECK((sum - identity(4)).norm() < 1e-10);
    // e_alpha lie in A, e~_beta in A'.
    for (const auto& e : b.e) CHECK(a.residual(e) < 1e-9);
    for (const auto& e : b.e_tilde) CHECK(a.cached_commutant().residual(e) < 1e-9);
  }
  {
    const auto b = block_bases(lattice({2, 2}, {0}).structure());
    for (const auto& e : b.e) CHECK_THAT(hs_norm2(e), WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("projection maps are conditional expectations") {
  RngStream rng(22);
  {
    const auto p = projection_map(full_algebra(3));
    CHECK((p.transfer - identity(9)).norm() < 1e-12);
    const auto t = projection_map(trivial_algebra(3));
    CHECK((t.transfer - SuperOperator::depolarizing(3).transfer).norm() < 1e-12);
  }
  {
    // P_{M2 x 1}(X) = Tr_2(X) (x) 1/2.
    const auto p = projection_map(lattice({2, 2}, {0}));
    const std::vector<int> dims{2, 2};
    const std::vector<int> keep{0};
    for (int k = 0; k < 50; ++k) {
      const CMatrix x = random_matrix(4, rng);
      CHECK((p.apply(x) - kron(partial_trace(x, dims, keep), identity(2) / 2.0)).norm() < 1e-12);
    }
  }
  for (const auto& [name, a] : catalog4()) {
    INFO(name);
    const auto p = projection_map(a);
    const auto kraus = kraus_projection_map(a.structure());
    const auto pc = projection_map(a.cached_commutant());
    const auto kraus_c = kraus_projection_map(commutant(OperatorAlgebra::from_structure(a.structure())).structure());
    for (int k = 0; k < 50; ++k) {
      const CMatrix x = random_matrix(4, rng);
      CHECK((p.apply(x) - kraus.apply(x)).norm() < 1e-9);
      CHECK((pc.apply(x) - kraus_c.apply(x)).norm() < 1e-9);
    }
    CHECK((p.transfer * p.transfer - p.transfer).norm() < 1e-10);
    CHECK((p.transfer - p.transfer.adjoint()).norm() < 1e-10);
    CHECK((p.apply(identity(4)) - identity(4)).norm() < 1e-10);
    const CMatrix x = random_matrix(4, rng);
    CHECK(std::abs(p.apply(x).trace() - x.trace()) < 1e-10);
    const auto choi = reshuffle(p).choi;
    CHECK(hermitian_eig(choi).eigenvalues().minCoeff() >= -1e-10);

    // Covariance: P_{U(A)} = U o P_A o U^dagger.
    const CMatrix u = haar_unitary(4, rng);
    const auto moved = projection_map(conjugate(a.without_structure(), u));
    const CMatrix y = random_matrix(4, rng);
    CHECK((moved.apply(y) - u * p.apply(u.adjoint() * y * u) * u.adjoint()).norm() < 1e-10);
    CHECK((moved.transfer - p.conjugated(u).transfer).norm() < 1e-10);
  }
}

TEST_CASE("Haar unitaries inside an algebra") {
  RngStream rng(23);
  {
    const CMatrix u = haar_algebra_unitary(trivial_algebra(3).structure(), rng);
    CHECK((u - u(0, 0) * identity(3)).norm() < 1e-12);
    CHECK_THAT(std::abs(u(0, 0)), WithinAbs(1.0, 1e-12));
  }
  for (const auto& [name, a] : catalog4()) {
    INFO(name);
    const CMatrix u = haar_algebra_unitary(a.structure(), rng);
    CHECK(unitarity_defect(u) < 1e-10);
    CHECK(a.residual(u) < 1e-9);
  }
  // E[U (x) U^dagger] converges to Omega_A.
  const auto m2 = lattice({2, 2}, {0});
  const CMatrix omega = omega_operator(m2);
  const int n = 10000;
  CMatrix mean = CMatrix::Zero(16, 16);
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(16, 16);
  for (int k = 0; k < n; ++k) {
    RngStream s = rng.child(static_cast<std::uint64_t>(k));
    const CMatrix u = haar_algebra_unitary(m2.structure(), s);
    const CMatrix x = kron(u, u.adjoint());
    mean += x;
    sq += x.real().cwiseAbs2();
  }
  mean /= n;
  sq /= n;
  const Eigen::MatrixXd se = ((sq - mean.real().cwiseAbs2()).cwiseMax(0.0) / n).cwiseSqrt();
  int outside = 0;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      if (std::abs(mean(i, j).real() - omega(i, j).real()) > 5 * se(i, j) + 1e-12) ++outside;
    }
  CHECK(outside == 0);
}

TEST_CASE("intersections") {
  const auto a = symmetric_two_qubit();
  CHECK(same_algebra(algebra_intersection(a, a), a));
  CHECK(algebra_intersection(lattice({2, 2}, {0}), lattice({2, 2}, {1})).size() == 1);
  const std::vector<int> dims{2, 2, 2};
  const std::vector<std::vector<int>> regions{{}, {0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}};
  for (const auto& r1 : regions) {
    for (const auto& r2 : regions) {
      std::vector<int> both;
      for (int k : r1) {
        if (std::find(r2.begin(), r2.end(), k) != r2.end()) both.push_back(k);
      }
      const auto got = algebra_intersection(lattice_algebra(dims, r1), lattice_algebra(dims, r2));
      CHECK(same_algebra(got, lattice_algebra(dims, both)));
    }
  }
  CHECK_THROWS_AS(algebra_intersection(full_algebra(2), full_algebra(3)), ShapeError);
}

TEST_CASE("lattice algebras") {
  const std::vector<int> dims{2, 2};
  CHECK(lattice({2, 2}, {}).size() == 1);
  CHECK(same_algebra(lattice({2, 2}, {0, 1}), full_algebra(4)));
  const std::vector<CMatrix> gens{kron(pauli_x(), identity(2)), kron(pauli_z(), identity(2))};
  CHECK(same_algebra(lattice({2, 2}, {0}), algebra_from_generators(gens, 4)));
  const auto a = lattice({2, 3, 2}, {0, 2});
  CHECK(a.size() == 16);
  CHECK(same_algebra(commutant(a.without_structure()), lattice({2, 3, 2}, {1})));
  CHECK_THROWS(lattice({2, 2}, {2}));
}

TEST_CASE("structure cache is safe to share between threads") {
  const auto a = symmetric_two_qubit();
  const auto sizes = parallel_map(8, [&](std::size_t) { return a.structure().d_commutant() + a.cached_commutant().size(); }, 4);
  for (int s : sizes) CHECK(s == 4);
}
