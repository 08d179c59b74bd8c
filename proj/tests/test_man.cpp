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
#include <numbers>
#include <vector>

#include "catch_amalgamated.hpp"
#include "fixtures.hpp"

using namespace manlab;
using namespace manlab::testing;
using Catch::Matchers::WithinAbs;

namespace {

CMatrix fourier(int d) {
  CMatrix f(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) f(i, j) = std::polar(1.0 / std::sqrt(d), 2.0 * std::numbers::pi * i * j / d);
  return f;
}

}  // namespace

TEST_CASE("Omega operators") {
  for (const auto& [name, a] : catalog4()) {
    INFO(name);
    const CMatrix omega = omega_operator(a);
    CHECK((omega - omega_operator_swap_form(a.structure())).norm() < 1e-10);
    CHECK_THAT(swap_trace(omega, identity(16), 4), WithinAbs(4.0, 1e-10));
    CHECK_THAT(omega.trace().real(), WithinAbs(a.cached_commutant().size(), 1e-10));
    // Omega from the projection onto the commutant.
    CHECK((reshuffle(projection_map(a.cached_commutant())).omega_style - omega).norm() < 1e-10);
  }
  CHECK((omega_operator(full_algebra(3)) - swap_operator(3) / 3.0).norm() < 1e-12);
  CHECK((omega_operator(trivial_algebra(3)) - identity(9)).norm() < 1e-12);
  CMatrix diag = CMatrix::Zero(9, 9);
  for (int i = 0; i < 3; ++i) diag(i * 3 + i, i * 3 + i) = 1.0;
  CHECK((omega_operator(masa_algebra(identity(3))) - diag).norm() < 1e-12);
}

TEST_CASE("man_omega examples") {
  CHECK_THAT(man_omega(lattice({2, 2}, {0}), lattice({2, 2}, {1})).s, WithinAbs(0.0, 1e-12));
  CHECK_THAT(man_omega(lattice({2, 2}, {0}), full_algebra(4)).s, WithinAbs(0.75, 1e-12));
  const auto [w, h] = qubit_mub();
  CHECK_THAT(man_omega(masa_algebra(w), masa_algebra(h)).s, WithinAbs(0.5, 1e-12));
  CHECK_THROWS_AS(man_omega(full_algebra(2), full_algebra(3)), ShapeError);
}

TEST_CASE("man_projection examples") {
  for (const auto& [name, a] : catalog4()) {
    INFO(name);
    CHECK_THAT(man_projection(a, a.cached_commutant()).s, WithinAbs(0.0, 1e-10));
  }
  const auto m2 = lattice({2, 2}, {0});
  CHECK_THAT(man_projection(m2, masa_algebra(identity(4))).s, WithinAbs(0.5, 1e-12));
  CHECK_THAT(man_projection(m2, masa_algebra(bell_basis())).s, WithinAbs(0.75, 1e-12));
  const auto r = man_projection(m2, masa_algebra(bell_basis()));
  CHECK_THAT(r.s2, WithinAbs(2.0, 1e-12));
}

TEST_CASE("man_collinear examples") {
  const auto r = man_collinear(full_algebra(2), full_algebra(2));
  CHECK_THAT(r.s, WithinAbs(0.75, 1e-12));
  // d(A) = 4 but d(B') = 1, so there is no distance form.
  CHECK_FALSE(r.detail("distance_form"));

  const auto bell = man_collinear(lattice({2, 2}, {0}), masa_algebra(bell_basis()));
  CHECK_THAT(bell.s, WithinAbs(0.75, 1e-12));
  REQUIRE(bell.detail("distance_form"));
  CHECK_THAT(*bell.detail("distance_form"), WithinAbs(0.75, 1e-12));

  const auto a = lattice({2, 2}, {0});
  const auto z = man_collinear(a, a.cached_commutant());
  CHECK_THAT(z.s, WithinAbs(0.0, 1e-12));
  REQUIRE(z.detail("distance_form"));
  CHECK_THAT(*z.detail("distance_form"), WithinAbs(0.0, 1e-12));

  const auto [w, h] = qubit_mub();
  const auto m = man_collinear(masa_algebra(w), masa_algebra(h));
  CHECK_THAT(m.s, WithinAbs(0.5, 1e-12));
  CHECK_THAT(m.s, WithinAbs(man_omega(masa_algebra(w), masa_algebra(h)).s, 1e-12));

  CHECK_THROWS_AS(man_collinear(symmetric_two_qubit(), full_algebra(4)), PreconditionError);
}

TEST_CASE("self-MAN closed forms") {
  CHECK_THAT(self_man(full_algebra(2)).s, WithinAbs(0.75, 1e-12));
  CHECK_THAT(self_man(symmetric_two_qubit()).s, WithinAbs(2.0 / 3.0, 1e-12));
  for (int d : {3, 4, 8}) CHECK_THAT(self_man(nearly_abelian(d)).s, WithinAbs(1.5 / d, 1e-12));
  CHECK_THAT(self_man(masa_algebra(identity(3))).s, WithinAbs(0.0, 1e-12));

  for (const auto& [name, a] : catalog4()) {
    INFO(name);
    const auto r = self_man(a);
    CHECK_THAT(r.s, WithinAbs(*r.detail("weighted_mean_form"), 1e-12));
    if (is_collinear(a.structure()).collinear) CHECK_THAT(r.s, WithinAbs(*r.detail("collinear_form"), 1e-12));
    CHECK(*r.detail("bounds_hold") == 1.0);
    CHECK_THAT(r.s, WithinAbs(man_omega(a, a).s, 1e-10));
    // NC_2 from the doubled maximally mixed states of the blocks.
    double purity = 0.0;
    for (const auto& b : a.structure().blocks) purity += b.n * b.d / 4.0 / (b.d * b.d);
    CHECK_THAT(r.s2, WithinAbs(-std::log2(purity), 1e-12));
  }
}

TEST_CASE("bounds") {
  const auto m2 = lattice({2, 2}, {0});
  const auto b = man_bounds(m2, full_algebra(4));
  CHECK_THAT(b.commutant_bound, WithinAbs(0.75, 1e-12));
  CHECK_THAT(man_omega(m2, full_algebra(4)).s, WithinAbs(b.commutant_bound, 1e-12));

  // Intersection bound is attained for commuting projections.
  const std::vector<int> dims{2, 2, 2};
  const std::vector<std::vector<int>> regions{{}, {0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}};
  for (const auto& r1 : regions) {
    for (const auto& r2 : regions) {
      const auto a = lattice_algebra(dims, r1);
      const auto bb = commutant(lattice_algebra(dims, r2));
      const auto bounds = man_bounds(a, bb);
      REQUIRE(bounds.intersection_bound);
      CHECK_THAT(man_omega(a, bb).s, WithinAbs(*bounds.intersection_bound, 1e-10));
    }
  }

  for (const auto& [na, a] : catalog4()) {
    for (const auto& [nb, bb] : catalog4()) {
      INFO(na << " : " << nb);
      const double s = man_omega(a, bb).s;
      const auto bounds = man_bounds(a, bb);
      CHECK(s <= bounds.commutant_bound + 1e-9);
      CHECK(s <= bounds.weak_bound + 1e-9);
      if (bounds.intersection_bound) CHECK(s <= *bounds.intersection_bound + 1e-9);
      const double s2 = log_man(s);
      CHECK(s2 <= bounds.log_commutant_bound + 1e-9);
      CHECK(s2 <= bounds.log_weak_bound + 1e-9);
      if (bounds.log_intersection_bound) CHECK(s2 <= *bounds.log_intersection_bound + 1e-9);
    }
  }
  const auto t = man_bounds(trivial_algebra(4), full_algebra(4));
  CHECK(man_omega(trivial_algebra(4), full_algebra(4)).s <= t.weak_bound + 1e-12);
}

TEST_CASE("formula concordance and symmetry") {
  const auto algebras = catalog4();
  for (const auto& [na, a] : algebras) {
    for (const auto& [nb, b] : algebras) {
      INFO(na << " : " << nb);
      const double s = man_omega(a, b).s;
      CHECK_THAT(man_projection(a, b).s, WithinAbs(s, 1e-9));
      CHECK_THAT(entropy_decomposition_man(a, b).report.s, WithinAbs(s, 1e-9));
      if (is_collinear(a.structure()).collinear) CHECK_THAT(man_collinear(a, b).s, WithinAbs(s, 1e-9));
      CHECK_THAT(man_omega(b, a).s, WithinAbs(s, 1e-9));
      CHECK(s >= 0.0);
      CHECK(s <= 1.0 - 1.0 / 16 + 1e-9);
      CHECK_THAT(man_omega(a, b).s2, WithinAbs(-std::log2(1.0 - s), 1e-9));
      // Vanishing iff A sits inside B'.
      double worst = 0.0;
      for (const auto& x : a.basis()) worst = std::max(worst, b.cached_commutant().residual(x));
      CHECK((s <= 1e-9) == (worst <= 1e-8));
    }
  }
}

TEST_CASE("unitary invariance") {
  RngStream rng(31);
  const auto algebras = catalog4();
  for (std::size_t i = 0; i < algebras.size(); ++i) {
    const auto& a = algebras[i].algebra;
    const auto& b = algebras[(i + 3) % algebras.size()].algebra;
    const double s = man_omega(a, b).s;
    for (int k = 0; k < 20; ++k) {
      const CMatrix u = haar_unitary(4, rng);
      CHECK_THAT(man_omega(conjugate(a, u), conjugate(b, u)).s, WithinAbs(s, 1e-9));
    }
  }
}

TEST_CASE("monotonicity along nested lattice chains") {
  const std::vector<int> dims{2, 2, 2};
  const std::vector<std::vector<int>> chain{{}, {0}, {0, 1}, {0, 1, 2}};
  const auto probe = masa_algebra(kron(bell_basis(), identity(2)));
  const auto other = lattice_algebra(dims, std::vector<int>{1, 2});
  for (const auto& fixed : {probe, other}) {
    double prev = -1.0;
    for (const auto& r : chain) {
      const double s = man_omega(lattice_algebra(dims, r), fixed).s;
      CHECK(s >= prev - 1e-12);
      prev = s;
    }
  }
}

TEST_CASE("orbit-averaged MAN") {
  CHECK_THAT(orbit_averaged_man(full_algebra(2), full_algebra(2)), WithinAbs(0.75, 1e-12));
  CHECK_THAT(orbit_averaged_man(lattice({2, 2}, {0}), lattice({2, 2}, {0})), WithinAbs(0.6, 1e-12));
  CHECK_THAT(orbit_averaged_man(trivial_algebra(4), full_algebra(4)), WithinAbs(0.0, 1e-12));
  CHECK_THROWS_AS(orbit_averaged_man(full_algebra(1), full_algebra(1)), PreconditionError);
}

TEST_CASE("lattice closed forms") {
  const std::vector<int> q3{2, 2, 2};
  const std::vector<int> one{0};
  auto r = lattice_man(q3, one, one);
  CHECK_THAT(r.s, WithinAbs(0.75, 1e-12));
  CHECK_THAT(r.s2, WithinAbs(2.0, 1e-12));
  const std::vector<int> two{1};
  CHECK_THAT(lattice_man(q3, one, two).s, WithinAbs(0.0, 1e-12));
  const std::vector<int> s1{0, 1};
  const std::vector<int> s2{1, 2};
  r = lattice_man(q3, s1, s2);
  CHECK_THAT(r.s, WithinAbs(0.75, 1e-12));
  CHECK_THAT(*r.detail("s2_relative"), WithinAbs(2.0, 1e-12));
  CHECK_THAT(relative_log_man(lattice_algebra(q3, s1), lattice_algebra(q3, s2)), WithinAbs(2.0, 1e-10));
  const std::vector<int> mixed{2, 3};
  CHECK_THROWS_AS(lattice_man(mixed, one, one), PreconditionError);
  // NC of a region.
  CHECK_THAT(*r.detail("nc_first"), WithinAbs(self_man(lattice_algebra(q3, s1)).s, 1e-12));
}

TEST_CASE("MASA MAN") {
  CHECK_THAT(masa_man(identity(3), identity(3)).s, WithinAbs(0.0, 1e-12));
  const auto [w, h] = qubit_mub();
  CHECK_THAT(masa_man(w, h).s, WithinAbs(0.5, 1e-12));
  CHECK_THAT(masa_man(identity(3), fourier(3)).s, WithinAbs(2.0 / 3.0, 1e-12));
  RngStream rng(32);
  for (int k = 0; k < 10; ++k) {
    const CMatrix u = haar_unitary(3, rng);
    const CMatrix v = haar_unitary(3, rng);
    const auto r = masa_man(u, v);
    CHECK_THAT(r.s, WithinAbs(man_omega(masa_algebra(u), masa_algebra(v)).s, 1e-9));
    CHECK_THAT(r.s2, WithinAbs(-std::log2(1.0 - r.s), 1e-9));
  }
  // Same MASA from a rephased and permuted basis.
  CMatrix perm = CMatrix::Zero(3, 3);
  perm(0, 2) = cplx(0, 1);
  perm(1, 0) = -1.0;
  perm(2, 1) = 1.0;
  CHECK_THAT(masa_man(fourier(3), fourier(3) * perm).s, WithinAbs(0.0, 1e-12));
  CHECK_THROWS_AS(masa_man(identity(2), 2.0 * identity(2)), PreconditionError);
}

TEST_CASE("relative quantumness") {
  CHECK_THAT(quantumness(identity(3), identity(3)).q, WithinAbs(0.0, 1e-12));
  const auto [w, h] = qubit_mub();
  const auto mub = quantumness(w, h);
  CHECK_THAT(mub.q, WithinAbs(0.5, 1e-12));
  CHECK_THAT(mub.s, WithinAbs(0.5, 1e-12));
  CHECK(mub.lower_holds);
  CHECK(mub.upper_holds);
  RngStream rng(33);
  for (int k = 0; k < 100; ++k) {
    const auto q = quantumness(haar_unitary(3, rng), haar_unitary(3, rng));
    CHECK(q.q >= 0.0);
    CHECK(q.lower_holds);
    CHECK(q.upper_holds);
  }
}

TEST_CASE("quantumness equals the best variance over sampled observables") {
  // The closed form is a maximum, so random unit observables never beat it.
  RngStream rng(34);
  const CMatrix w = haar_unitary(3, rng);
  const CMatrix v = haar_unitary(3, rng);
  const double q = quantumness(w, v).q;
  double best = 0.0;
  for (int k = 0; k < 2000; ++k) {
    Eigen::Vector3d a(rng.normal(), rng.normal(), rng.normal());
    a.normalize();
    const CMatrix obs = v * a.cast<cplx>().asDiagonal() * v.adjoint();
    double var = 0.0;
    for (int i = 0; i < 3; ++i) {
      const CVector psi = w.col(i);
      const double m1 = (psi.adjoint() * obs * psi)(0).real();
      const double m2 = (psi.adjoint() * obs * obs * psi)(0).real();
      var += m2 - m1 * m1;
    }
    best = std::max(best, var / 3.0);
  }
  CHECK(best <= q + 1e-12);
  CHECK(best >= 0.9 * q);
}

TEST_CASE("algebra OTOC") {
  const auto m2 = lattice({2, 2}, {0});
  CHECK_THAT(a_otoc(m2, identity(4)).s, WithinAbs(0.0, 1e-12));
  const auto swap = a_otoc(m2, swap_operator(2));
  CHECK_THAT(swap.s, WithinAbs(0.75, 1e-12));
  CHECK_THAT(*swap.detail("omega_form"), WithinAbs(0.75, 1e-12));
  const auto [w, h] = qubit_mub();
  CHECK_THAT(a_otoc(masa_algebra(w), h).s, WithinAbs(0.5, 1e-12));
  RngStream rng(35);
  for (const auto& [name, a] : catalog4()) {
    INFO(name);
    const auto r = a_otoc(a, haar_unitary(4, rng));
    CHECK_THAT(r.s, WithinAbs(*r.detail("omega_form"), 1e-9));
  }
  CHECK_THROWS_AS(a_otoc(m2, 2.0 * identity(4)), PreconditionError);
}

TEST_CASE("entropy decomposition") {
  const auto m2 = lattice({2, 2}, {0});
  CHECK_THAT(entropy_decomposition_man(m2, masa_algebra(identity(4))).report.s, WithinAbs(0.5, 1e-12));
  CHECK_THAT(entropy_decomposition_man(m2, m2.cached_commutant()).report.s, WithinAbs(0.0, 1e-12));
  RngStream rng(36);
  const CMatrix u = haar_unitary(4, rng);
  const auto moved = conjugate(commutant(m2), u);
  const auto e = entropy_decomposition_man(m2, moved);
  CHECK_THAT(e.report.s, WithinAbs(man_projection(m2, moved).s, 1e-10));
  double total = 0.0;
  for (const auto& t : e.blocks) total += t.contribution;
  CHECK_THAT(total, WithinAbs(e.report.s, 1e-12));
}

TEST_CASE("clamping and logarithms") {
  CHECK(clamp_unit(-5e-10, "t") == 0.0);
  CHECK(clamp_unit(1.0 + 5e-10, "t") == 1.0);
  CHECK_THROWS_AS(clamp_unit(-1e-6, "t"), NumericalError);
  CHECK(std::isinf(log_man(1.0)));
  CHECK_THAT(from_bits(1.0, LogBase::e), WithinAbs(std::log(2.0), 1e-15));
}
