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

// Monte-Carlo estimators and simulated measurement protocols: the direct
// Haar average of commutator norms, Haar orbit averages, algebra (Choi)
// states with swap tests, the random-state protocol, and the information
// transmission bound for restricted distances.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "manlab/algebra.hpp"
#include "manlab/errors.hpp"
#include "manlab/man.hpp"
#include "manlab/matrix.hpp"
#include "manlab/parallel.hpp"
#include "manlab/rng.hpp"

namespace manlab {

struct EstimatorResult {
  double estimate = 0.0;
  double std_error = 0.0;
  int samples = 0;
  std::optional<int> shots;  ///< shots per swap test, if shot noise was simulated
  std::uint64_t seed = 0;
  std::string method;
  std::vector<std::pair<std::string, double>> details;

  [[nodiscard]] std::optional<double> detail(const std::string& key) const {
    for (const auto& [k, v] : details) {
      if (k == key) return v;
    }
    return std::nullopt;
  }
};

namespace detail {

struct MeanStats {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Mean and sd/sqrt(n) of values summed in index order.
inline MeanStats mean_stats(const std::vector<double>& v) {
  MeanStats out;
  if (v.empty()) return out;
  double sum = 0.0;
  for (double x : v) sum += x;
  out.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std_error = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return out;
}

/// One swap test run `shots` times on states with overlap x = Tr(rho sigma):
/// outcome +1 with probability (1 + x)/2. Returns the estimate 2k/N - 1.
inline double swap_test(double overlap, int shots, RngStream& rng) {
  const double p = std::clamp((1.0 + overlap) / 2.0, 0.0, 1.0);
  int plus = 0;
  for (int k = 0; k < shots; ++k) plus += rng.uniform() < p ? 1 : 0;
  return 2.0 * plus / shots - 1.0;
}

/// Binomial standard error of a swap-test estimate.
inline double swap_test_error(double estimate, int shots) {
  const double p = std::clamp((1.0 + estimate) / 2.0, 0.0, 1.0);
  return 2.0 * std::sqrt(p * (1.0 - p) / shots);
}

inline void require_positive(int v, const char* what) {
  if (v < 1) throw PreconditionError(std::string(what) + " must be positive");
}

}  // namespace detail

/// Direct Haar oracle: mean of ||[U, V]||^2/(2d) over U Haar in A and V Haar
/// in B. Sample i draws from rng.child(i).
inline EstimatorResult mc_man_direct(const OperatorAlgebra& a, const OperatorAlgebra& b, int samples,
                                     const RngStream& rng) {
  detail::require_same_dim(a, b, "mc_man_direct");
  detail::require_positive(samples, "mc_man_direct: samples");
  const auto& da = a.structure();
  const auto& db = b.structure();
  const double norm = 2.0 * a.dim();
  const auto values = parallel_map(static_cast<std::size_t>(samples), [&](std::size_t i) {
    RngStream s = rng.child(i);
    const CMatrix u = haar_algebra_unitary(da, s);
    const CMatrix v = haar_algebra_unitary(db, s);
    return commutator(u, v).squaredNorm() / norm;
  });
  const auto st = detail::mean_stats(values);
  return {st.mean, st.std_error, samples, std::nullopt, rng.seed(), "mc", {}};
}

/// Monte-Carlo E_U S(A : U(B)) over Haar U on the whole space, using
/// Omega_{U(B)} = (U (x) U) Omega_B (U (x) U)^dagger.
inline EstimatorResult mc_orbit_average(const OperatorAlgebra& a, const OperatorAlgebra& b, int samples,
                                        const RngStream& rng) {
  detail::require_same_dim(a, b, "mc_orbit_average");
  detail::require_positive(samples, "mc_orbit_average: samples");
  const int d = a.dim();
  const CMatrix oa = omega_operator(a);
  const CMatrix ob = omega_operator(b);
  const auto values = parallel_map(static_cast<std::size_t>(samples), [&](std::size_t i) {
    RngStream s = rng.child(i);
    const CMatrix u = haar_unitary(d, s);
    const CMatrix w = kron(u, u);
    return 1.0 - swap_trace(oa, w * ob * w.adjoint(), d) / d;
  });
  const auto st = detail::mean_stats(values);
  EstimatorResult r{st.mean, st.std_error, samples, std::nullopt, rng.seed(), "mc-orbit", {}};
  r.details.emplace_back("closed_form", orbit_averaged_man(a, b));
  return r;
}

/// Algebra state omega(A) = (P_A (x) id)|Phi+><Phi+|.
inline CMatrix algebra_state(const OperatorAlgebra& a) { return reshuffle(projection_map(a)).choi; }

/// Purity ||omega(A)||^2 = d(A)/d^2 without forming the state.
inline double algebra_state_purity(const OperatorAlgebra& a) {
  return static_cast<double>(a.size()) / (static_cast<double>(a.dim()) * a.dim());
}

/// 2-Renyi entropy -log2 Tr(rho^2), in bits.
inline double renyi2(const CMatrix& rho) { return neg_log2(hs_inner(rho, rho).real()); }

namespace detail {

inline void require_collinear(const OperatorAlgebra& a, const char* what) {
  if (!is_collinear(a.structure()).collinear) {
    throw PreconditionError(std::string(what) + ": the first algebra is not collinear");
  }
}

/// 1 - num/den with either exact overlaps or simulated swap tests.
inline EstimatorResult swap_ratio(double num_exact, double den_exact, std::optional<int> shots, const RngStream& rng,
                                  std::string method) {
  EstimatorResult r;
  r.seed = rng.seed();
  r.method = std::move(method);
  r.shots = shots;
  double num = num_exact;
  double den = den_exact;
  double num_err = 0.0;
  double den_err = 0.0;
  if (shots) {
    require_positive(*shots, "swap test shots");
    RngStream s_num = rng.child(0);
    RngStream s_den = rng.child(1);
    num = swap_test(num_exact, *shots, s_num);
    den = swap_test(den_exact, *shots, s_den);
    num_err = swap_test_error(num, *shots);
    den_err = swap_test_error(den, *shots);
    if (std::abs(den) <= 3.0 * den_err) {
      throw IllConditionedEstimator(r.method + ": swap-test denominator is within 3 standard errors of zero");
    }
  }
  r.estimate = 1.0 - num / den;
  r.std_error = std::sqrt(std::pow(num_err / den, 2) + std::pow(num * den_err / (den * den), 2));
  r.details.emplace_back("numerator", num);
  r.details.emplace_back("denominator", den);
  r.details.emplace_back("numerator_exact", num_exact);
  r.details.emplace_back("denominator_exact", den_exact);
  return r;
}

}  // namespace detail

/// S = 1 - Tr(S omega(A) (x) omega(B')) / ||omega(A)||^2 for collinear A.
/// With shots, numerator and denominator come from independent binomial swap
/// tests of `shots` repetitions each.
inline EstimatorResult protocol_choi(const OperatorAlgebra& a, const OperatorAlgebra& b, std::optional<int> shots,
                                     const RngStream& rng) {
  detail::require_same_dim(a, b, "protocol_choi");
  detail::require_collinear(a, "protocol_choi");
  const CMatrix wa = algebra_state(a);
  const CMatrix wb = algebra_state(b.cached_commutant());
  auto r = detail::swap_ratio(hs_inner(wa, wb).real(), hs_inner(wa, wa).real(), shots, rng, "choi");
  r.details.emplace_back("s2", log_man(std::clamp(r.estimate, 0.0, 1.0)));
  return r;
}

/// NC(A) = 1 - ||omega(Z)||^2/||omega(A)||^2 for collinear A, plus the
/// 2-Renyi form NC_2 = S_2(omega(Z)) - S_2(omega(A)).
inline EstimatorResult protocol_choi_self(const OperatorAlgebra& a, std::optional<int> shots, const RngStream& rng) {
  detail::require_collinear(a, "protocol_choi");
  const CMatrix wa = algebra_state(a);
  const CMatrix wz = algebra_state(center(a));
  auto r = detail::swap_ratio(hs_inner(wz, wz).real(), hs_inner(wa, wa).real(), shots, rng, "choi-self");
  r.details.emplace_back("nc2_renyi_difference", renyi2(wz) - renyi2(wa));
  return r;
}

enum class ExpectationMode { exact, sampled };

namespace detail {

struct StochasticSides {
  CMatrix qa;  ///< orthonormal columns of the first projection
  CMatrix qb;  ///< orthonormal columns of the second projection
};

/// Ratio estimator 1 - (E x - c)/(E y - c), c = 1/(d+1), with
/// x = <P_1(phi), P_2(phi)> and y = ||P_1(phi)||^2 on the same random states.
inline EstimatorResult stochastic_ratio(const StochasticSides& sides, int dim, ExpectationMode mode, int samples,
                                        std::optional<int> shots, const RngStream& rng, std::string method) {
  const double c = 1.0 / (dim + 1.0);
  const CMatrix cross = sides.qa.adjoint() * sides.qb;
  EstimatorResult r;
  r.seed = rng.seed();
  r.method = std::move(method);
  r.shots = shots;
  if (mode == ExpectationMode::exact) {
    // E[phi (x) phi] = (1 + S)/(d(d+1)) gives E<T1(phi), T2(phi)> =
    // (Tr(T1(1)^dagger T2(1)) + Tr_HS(T1^dagger T2))/(d(d+1)), and T(1) = 1.
    const double norm = static_cast<double>(dim) * (dim + 1.0);
    const double ex = (dim + cross.squaredNorm()) / norm;
    const double ey = (dim + static_cast<double>(sides.qa.cols())) / norm;
    r.estimate = 1.0 - (ex - c) / (ey - c);
    r.details.emplace_back("numerator_mean", ex);
    r.details.emplace_back("denominator_mean", ey);
    return r;
  }
  require_positive(samples, "protocol_stochastic: samples");
  if (samples < 2) throw PreconditionError("protocol_stochastic: needs at least 2 samples");
  if (shots) require_positive(*shots, "protocol_stochastic: shots");
  const auto pairs = parallel_map(static_cast<std::size_t>(samples), [&](std::size_t i) {
    RngStream s = rng.child(i);
    const CVector phi = haar_state(dim, s);
    const CVector v = vec(phi * phi.adjoint());
    const CVector a = sides.qa.adjoint() * v;
    const CVector b = sides.qb.adjoint() * v;
    double x = a.dot(cross * b).real();
    double y = a.squaredNorm();
    if (shots) {
      x = swap_test(x, *shots, s);
      y = swap_test(y, *shots, s);
    }
    return std::pair<double, double>{x, y};
  });
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [x, y] : pairs) {
    xs.push_back(x);
    ys.push_back(y);
  }
  const auto sx = mean_stats(xs);
  const auto sy = mean_stats(ys);
  const double num = sx.mean - c;
  const double den = sy.mean - c;
  if (den <= 0.0 || (sy.std_error > 0.0 && std::abs(den) <= 3.0 * sy.std_error)) {
    throw IllConditionedEstimator(r.method + ": denominator estimate is within 3 standard errors of zero");
  }
  const double ratio = num / den;
  // Paired delta method: Var(ratio) ~ Var(x - ratio * y)/(n den^2).
  std::vector<double> z;
  z.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) z.push_back(xs[i] - ratio * ys[i]);
  r.estimate = 1.0 - ratio;
  r.std_error = mean_stats(z).std_error / std::abs(den);
  r.samples = samples;
  r.details.emplace_back("numerator_mean", sx.mean);
  r.details.emplace_back("numerator_std_error", sx.std_error);
  r.details.emplace_back("denominator_mean", sy.mean);
  r.details.emplace_back("denominator_std_error", sy.std_error);
  return r;
}

}  // namespace detail

/// Random-state protocol for collinear A:
/// S = 1 - (E<P_A(phi), P_{B'}(phi)> - 1/(d+1)) / (E||P_A(phi)||^2 - 1/(d+1)).
inline EstimatorResult protocol_stochastic(const OperatorAlgebra& a, const OperatorAlgebra& b, ExpectationMode mode,
                                           int samples, std::optional<int> shots, const RngStream& rng) {
  detail::require_same_dim(a, b, "protocol_stochastic");
  detail::require_collinear(a, "protocol_stochastic");
  return detail::stochastic_ratio({a.basis_columns(), b.cached_commutant().basis_columns()}, a.dim(), mode, samples,
                                  shots, rng, mode == ExpectationMode::exact ? "stochastic-exact" : "stochastic");
}

/// Self variant: NC(A) = 1 - (E||P_Z(phi)||^2 - 1/(d+1)) / (E||P_A(phi)||^2 - 1/(d+1)).
inline EstimatorResult protocol_stochastic_self(const OperatorAlgebra& a, ExpectationMode mode, int samples,
                                                std::optional<int> shots, const RngStream& rng) {
  detail::require_collinear(a, "protocol_stochastic");
  const OperatorAlgebra z = center(a);
  // <P_A(phi), P_Z(phi)> = ||P_Z(phi)||^2 since Z is inside A.
  return detail::stochastic_ratio({a.basis_columns(), z.basis_columns()}, a.dim(), mode, samples, shots, rng,
                                  mode == ExpectationMode::exact ? "stochastic-self-exact" : "stochastic-self");
}

/// sup over X in B, ||X||_inf <= 1, of |Tr X (U^dagger rho U - V^dagger rho V)|,
/// which by block-wise trace-norm duality is sum_J ||Tr_{n_J}(iso_J^dagger Delta iso_J)||_1.
inline double restricted_distance(const CMatrix& u, const CMatrix& v, const StructuralDecomposition& b,
                                  const CMatrix& rho0) {
  const Eigen::Index d = b.dim;
  if (u.rows() != d || u.cols() != d || v.rows() != d || v.cols() != d || rho0.rows() != d || rho0.cols() != d) {
    throw ShapeError("restricted_distance: operand dimensions differ");
  }
  if (unitarity_defect(u) > 1e-9 || unitarity_defect(v) > 1e-9) {
    throw PreconditionError("restricted_distance: operator is not unitary");
  }
  if ((rho0 - rho0.adjoint()).norm() > 1e-9 || std::abs(rho0.trace() - 1.0) > 1e-9 ||
      hermitian_eig(rho0).eigenvalues()(0) < -1e-9) {
    throw PreconditionError("restricted_distance: initial operator is not a density matrix");
  }
  const CMatrix delta = u.adjoint() * rho0 * u - v.adjoint() * rho0 * v;
  double total = 0.0;
  for (const auto& blk : b.blocks) {
    const CMatrix y = blk.iso.adjoint() * delta * blk.iso;
    const int dims[] = {blk.n, blk.d};
    const int keep[] = {1};
    total += hermitian_eig(partial_trace(y, dims, keep)).eigenvalues().cwiseAbs().sum();
  }
  return total;
}

inline double restricted_distance(const CMatrix& u, const CMatrix& v, const OperatorAlgebra& b, const CMatrix& rho0) {
  return restricted_distance(u, v, b.structure(), rho0);
}

struct MarkovConstants {
  double derived = 0.0;  ///< 2 sqrt(2 d(B) max_J d_J/n_J)
  double printed = 0.0;  ///< 2 sqrt(2 d(B)) max_J d_J/n_J
};

/// Constant c(B) of the information-transmission bound, in both the form that
/// follows from max_beta 1/||f_beta||^2 = max_J d_J/n_J and the variant with
/// the square root dropped.
inline MarkovConstants markov_constants(const StructuralDecomposition& b) {
  double worst = 0.0;
  for (const auto& blk : b.blocks) worst = std::max(worst, static_cast<double>(blk.d) / blk.n);
  const double db = b.d_algebra();
  return {2.0 * std::sqrt(2.0 * db * worst), 2.0 * std::sqrt(2.0 * db) * worst};
}

struct MarkovRow {
  double epsilon = 0.0;
  int exceed = 0;              ///< pairs whose sampled sup distance is >= epsilon
  double probability = 0.0;    ///< exceed / samples
  double bound = 0.0;          ///< d c(B) sqrt(S)/epsilon, derived constant
  double bound_printed = 0.0;  ///< same with the printed constant
  bool violated = false;       ///< probability above bound by more than 5 binomial sigma
};

struct MarkovReport {
  double s = 0.0;
  MarkovConstants constants;
  int samples = 0;
  int state_samples = 0;
  std::uint64_t seed = 0;
  double mean_distance = 0.0;
  double max_distance = 0.0;
  double mean_bound = 0.0;  ///< d c(B) sqrt(S), which bounds the mean distance
  std::vector<MarkovRow> rows;
  int violations = 0;
};

/// Empirical check of Pr[sup_rho d_B(U, V) >= eps] <= d c(B) sqrt(S(A:B))/eps
/// over Haar U, V in A. The sup over initial states is lower-bounded by a
/// max over `state_samples` Haar pure states, so any flagged violation is
/// genuine.
inline MarkovReport markov_bound_check(const OperatorAlgebra& a, const OperatorAlgebra& b,
                                       const std::vector<double>& epsilons, int samples, int state_samples,
                                       const RngStream& rng) {
  detail::require_same_dim(a, b, "markov_bound_check");
  detail::require_positive(samples, "markov_bound_check: samples");
  detail::require_positive(state_samples, "markov_bound_check: state samples");
  for (double e : epsilons) {
    if (!(e > 0.0)) throw PreconditionError("markov_bound_check: epsilon must be positive");
  }
  const auto& da = a.structure();
  const auto& db = b.structure();
  const int d = a.dim();
  MarkovReport rep;
  rep.s = man_projection(a, b).s;
  rep.constants = markov_constants(db);
  rep.samples = samples;
  rep.state_samples = state_samples;
  rep.seed = rng.seed();
  rep.mean_bound = d * rep.constants.derived * std::sqrt(rep.s);

  const auto dist = parallel_map(static_cast<std::size_t>(samples), [&](std::size_t i) {
    RngStream s = rng.child(i);
    const CMatrix u = haar_algebra_unitary(da, s);
    const CMatrix v = haar_algebra_unitary(da, s);
    double best = 0.0;
    for (int k = 0; k < state_samples; ++k) {
      const CVector phi = haar_state(d, s);
      best = std::max(best, restricted_distance(u, v, db, phi * phi.adjoint()));
    }
    return best;
  });
  double sum = 0.0;
  for (double x : dist) {
    sum += x;
    rep.max_distance = std::max(rep.max_distance, x);
  }
  rep.mean_distance = sum / samples;

  for (double eps : epsilons) {
    MarkovRow row;
    row.epsilon = eps;
    for (double x : dist) row.exceed += x >= eps ? 1 : 0;
    row.probability = static_cast<double>(row.exceed) / samples;
    row.bound = rep.mean_bound / eps;
    row.bound_printed = d * rep.constants.printed * std::sqrt(rep.s) / eps;
    const double b_eff = std::min(row.bound, 1.0);
    const double sigma = std::sqrt(b_eff * (1.0 - b_eff) / samples);
    row.violated = row.probability > row.bound + 5.0 * sigma;
    rep.violations += row.violated ? 1 : 0;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace manlab
