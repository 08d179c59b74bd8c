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

// Mutual averaged non-commutativity
//
//   S(A:B) = E_{U in A, V in B} ||[U, V]||_2^2 / (2d),    S_2 = -log(1 - S),
//
// through its closed forms: the swap/Omega form, the commutant-projection
// form, the collinear projector form, structural self-values, bounds, and
// the special families (lattice nets, maximal abelian pairs, algebra OTOCs).
//
// Logarithms are base 2 unless a LogBase is given at the presentation layer.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "manlab/algebra.hpp"
#include "manlab/errors.hpp"
#include "manlab/matrix.hpp"

namespace manlab {

enum class LogBase { two, e };

/// Converts a value measured in bits to the requested base.
inline double from_bits(double bits, LogBase base) {
  return base == LogBase::two ? bits : bits * std::numbers::ln2;
}

/// -log2(x), with +inf for x <= 0.
inline double neg_log2(double x) {
  return x > 0.0 ? 0.0 - std::log2(x) : std::numeric_limits<double>::infinity();
}

/// Log-MAN in bits: -log2(1 - s); +inf at s = 1.
inline double log_man(double s) { return neg_log2(1.0 - s); }

inline constexpr double kClampMargin = 1e-9;

/// Rounding clamp into [0, 1]; anything further out is a bug, not noise.
inline double clamp_unit(double raw, const char* what) {
  if (!std::isfinite(raw)) throw NumericalError(std::string(what) + ": non-finite value");
  if (raw < -kClampMargin || raw > 1.0 + kClampMargin) {
    throw NumericalError(std::string(what) + ": value " + std::to_string(raw) + " outside [0, 1]");
  }
  return std::clamp(raw, 0.0, 1.0);
}

struct StructuralSummary {
  int dim = 0;
  int d_center = 0;
  int d_algebra = 0;
  int d_commutant = 0;
  std::vector<std::pair<int, int>> blocks;  ///< (n_J, d_J)
  bool collinear = false;
  std::optional<double> ratio;
};

inline StructuralSummary summarize(const StructuralDecomposition& dec) {
  StructuralSummary s;
  s.dim = dec.dim;
  s.d_center = dec.d_center();
  s.d_algebra = dec.d_algebra();
  s.d_commutant = dec.d_commutant();
  for (const auto& b : dec.blocks) s.blocks.emplace_back(b.n, b.d);
  const auto c = is_collinear(dec);
  s.collinear = c.collinear;
  s.ratio = c.ratio;
  return s;
}

inline StructuralSummary summarize(const OperatorAlgebra& a) { return summarize(a.structure()); }

struct Bounds {
  double commutant_bound = 1.0;  ///< 1 - max{d(A'), d(B')}/d^2
  double weak_bound = 1.0;       ///< 1 - 1/min{d(A), d(B)}
  std::optional<double> intersection_bound;  ///< 1 - d(A cap B')/d(A), A collinear
  double log_commutant_bound = 0.0;          ///< bits
  double log_weak_bound = 0.0;
  std::optional<double> log_intersection_bound;
};

struct ManReport {
  double s = 0.0;
  double s2 = 0.0;  ///< bits; +inf when s = 1
  std::string method;
  std::optional<Bounds> bounds;
  std::vector<StructuralSummary> inputs;
  /// Extra named values: cross-checks, alternative forms, per-block terms.
  /// Keys starting with "s2" or "nc2" are logarithms in bits.
  std::vector<std::pair<std::string, double>> details;

  [[nodiscard]] std::optional<double> detail(const std::string& key) const {
    for (const auto& [k, v] : details) {
      if (k == key) return v;
    }
    return std::nullopt;
  }
};

namespace detail {

inline void require_same_dim(const OperatorAlgebra& a, const OperatorAlgebra& b, const char* what) {
  if (a.dim() != b.dim()) throw ShapeError(std::string(what) + ": algebras act on different dimensions");
}

inline ManReport make_report(double raw, std::string method, const char* what) {
  ManReport r;
  r.s = clamp_unit(raw, what);
  r.s2 = log_man(r.s);
  r.method = std::move(method);
  return r;
}

/// sum_alpha ||P_C(e_alpha)||^2 for an orthonormal column basis C.
inline double projected_weight(const CMatrix& c, const std::vector<CMatrix>& e) {
  return (c.adjoint() * stack_vec(e)).squaredNorm();
}

inline int commutant_size(const OperatorAlgebra& a) {
  if (const auto* dec = a.known_structure()) return dec->d_commutant();
  return a.cached_commutant().size();
}

}  // namespace detail

/// Omega_A = sum_alpha e_alpha (x) e_alpha^dagger over the block basis.
inline CMatrix omega_operator(const StructuralDecomposition& dec) {
  const auto bases = block_bases(dec);
  std::vector<CMatrix> adj;
  adj.reserve(bases.e.size());
  for (const auto& e : bases.e) adj.push_back(e.adjoint());
  // (e (x) f)[(i,k),(j,l)] = e_ij f_kl is the realignment of vec(e) vec(f)^T.
  return realign(stack_vec(bases.e) * stack_vec(adj).transpose(), dec.dim);
}

inline CMatrix omega_operator(const OperatorAlgebra& a) { return omega_operator(a.structure()); }

/// Omega_A = sum_J (1/d_J) (iso_J (x) iso_J) (1_{n_J}^{(x)2} (x) S_{d_J}) (iso_J (x) iso_J)^dagger.
inline CMatrix omega_operator_swap_form(const StructuralDecomposition& dec) {
  const Eigen::Index d2 = static_cast<Eigen::Index>(dec.dim) * dec.dim;
  CMatrix out = CMatrix::Zero(d2, d2);
  for (const auto& b : dec.blocks) {
    const int dims[] = {b.n, b.d};
    const int region[] = {1};
    const CMatrix w = kron(b.iso, b.iso);
    out += w * swap_operator(dims, region) * w.adjoint() / static_cast<double>(b.d);
  }
  return out;
}

/// S = 1 - Tr(S Omega_A Omega_B)/d from precomputed Omega operators.
inline ManReport man_omega(const CMatrix& omega_a, const CMatrix& omega_b, int dim) {
  return detail::make_report(1.0 - swap_trace(omega_a, omega_b, dim) / dim, "omega", "man_omega");
}

inline ManReport man_omega(const OperatorAlgebra& a, const OperatorAlgebra& b) {
  detail::require_same_dim(a, b, "man_omega");
  return man_omega(omega_operator(a), omega_operator(b), a.dim());
}

/// S = 1 - (1/d) sum_alpha ||P_{B'}(e_alpha)||^2, with P_{B'} from the
/// orthonormal basis of commutant(B); B need not be decomposed.
inline ManReport man_projection(const OperatorAlgebra& a, const OperatorAlgebra& b) {
  detail::require_same_dim(a, b, "man_projection");
  const auto bases = block_bases(a.structure());
  const double w = detail::projected_weight(b.cached_commutant().basis_columns(), bases.e) / a.dim();
  auto r = detail::make_report(1.0 - w, "projection", "man_projection");
  r.s2 = neg_log2(w);
  return r;
}

/// S = 1 - Tr_HS(P_A P_{B'})/d(A) for collinear A. When d(A) = d(B') the
/// projector-distance form ||P_A - P_{B'}||^2/(2 d(A)) is reported as well.
inline ManReport man_collinear(const OperatorAlgebra& a, const OperatorAlgebra& b) {
  detail::require_same_dim(a, b, "man_collinear");
  if (!is_collinear(a.structure()).collinear) {
    throw PreconditionError("man_collinear: the first algebra is not collinear");
  }
  const OperatorAlgebra& bc = b.cached_commutant();
  const double overlap = (a.basis_columns().adjoint() * bc.basis_columns()).squaredNorm();
  auto r = detail::make_report(1.0 - overlap / a.size(), "collinear", "man_collinear");
  if (a.size() == bc.size()) {
    const CMatrix diff =
        a.basis_columns() * a.basis_columns().adjoint() - bc.basis_columns() * bc.basis_columns().adjoint();
    r.details.emplace_back("distance_form", diff.squaredNorm() / (2.0 * a.size()));
  }
  return r;
}

/// NC(A) = S(A:A) from structural data alone.
inline ManReport self_man(const OperatorAlgebra& a) {
  const auto& dec = a.structure();
  const double d = dec.dim;
  double ratio_sum = 0.0;
  double weighted = 0.0;
  double purity = 0.0;
  int max_block = 1;
  for (const auto& b : dec.blocks) {
    const double p = b.n * b.d / d;
    ratio_sum += static_cast<double>(b.n) / b.d;
    weighted += p * (1.0 - 1.0 / (static_cast<double>(b.d) * b.d));
    purity += p / (static_cast<double>(b.d) * b.d);
    max_block = std::max(max_block, b.d);
  }
  auto r = detail::make_report(1.0 - ratio_sum / d, "self", "self_man");
  r.s2 = neg_log2(purity);
  r.inputs.push_back(summarize(dec));
  r.details.emplace_back("weighted_mean_form", weighted);
  if (is_collinear(dec).collinear) {
    r.details.emplace_back("collinear_form", 1.0 - static_cast<double>(dec.d_center()) / dec.d_algebra());
  }
  const double block_bound = 1.0 - 1.0 / (static_cast<double>(max_block) * max_block);
  const double dim_bound = 1.0 - 1.0 / (d * d);
  r.details.emplace_back("block_bound", block_bound);
  r.details.emplace_back("dimension_bound", dim_bound);
  r.details.emplace_back("bounds_hold", r.s <= block_bound + kClampMargin && r.s <= dim_bound + kClampMargin ? 1 : 0);
  return r;
}

/// Upper bounds on S(A:B). The log commutant bound uses log d(B') for the
/// second argument, which is what follows from taking the log of the linear
/// bound.
inline Bounds man_bounds(const OperatorAlgebra& a, const OperatorAlgebra& b) {
  detail::require_same_dim(a, b, "man_bounds");
  const double d2 = static_cast<double>(a.dim()) * a.dim();
  const int ac = detail::commutant_size(a);
  const int bc = detail::commutant_size(b);
  const int small = std::min(a.size(), b.size());
  Bounds out;
  out.commutant_bound = 1.0 - std::max(ac, bc) / d2;
  out.weak_bound = 1.0 - 1.0 / small;
  out.log_commutant_bound = std::log2(d2) - std::log2(static_cast<double>(std::max(ac, bc)));
  out.log_weak_bound = std::log2(static_cast<double>(small));
  if (is_collinear(a.structure()).collinear) {
    const int inter = algebra_intersection(a, b.cached_commutant()).size();
    out.intersection_bound = 1.0 - static_cast<double>(inter) / a.size();
    out.log_intersection_bound = std::log2(static_cast<double>(a.size()) / inter);
  }
  return out;
}

/// S(X : L(H)) = 1 - d(X')/d^2.
inline double man_with_full(const OperatorAlgebra& x) {
  const double d2 = static_cast<double>(x.dim()) * x.dim();
  return 1.0 - detail::commutant_size(x) / d2;
}

/// Haar average over U of S(A : U(B)) = S(A:L) S(B:L) / S(L:L).
inline double orbit_averaged_man(const OperatorAlgebra& a, const OperatorAlgebra& b) {
  detail::require_same_dim(a, b, "orbit_averaged_man");
  if (a.dim() < 2) throw PreconditionError("orbit_averaged_man: needs d >= 2");
  const double d2 = static_cast<double>(a.dim()) * a.dim();
  return man_with_full(a) * man_with_full(b) / (1.0 - 1.0 / d2);
}

/// Closed forms for the net of local algebras on uniform sites (0-based
/// region indices): S = 1 - d_site^{-2|S1 cap S2|}, S_2 = c_d |S1 cap S2| with
/// c_d = log d_site^2.
inline ManReport lattice_man(std::span<const int> site_dims, std::span<const int> s1, std::span<const int> s2) {
  detail::check_dims(site_dims, "lattice_man");
  for (int k : site_dims) {
    if (k != site_dims.front()) throw PreconditionError("lattice_man: site dimensions must be uniform");
  }
  const auto m1 = detail::region_mask(site_dims.size(), s1, "lattice_man");
  const auto m2 = detail::region_mask(site_dims.size(), s2, "lattice_man");
  int both = 0;
  int only_first = 0;
  int size1 = 0;
  int size2 = 0;
  for (std::size_t k = 0; k < site_dims.size(); ++k) {
    both += (m1[k] && m2[k]) ? 1 : 0;
    only_first += (m1[k] && !m2[k]) ? 1 : 0;
    size1 += m1[k] ? 1 : 0;
    size2 += m2[k] ? 1 : 0;
  }
  const double ds = site_dims.front();
  const double cd = std::log2(ds * ds);
  auto r = detail::make_report(1.0 - std::pow(ds, -2.0 * both), "lattice", "lattice_man");
  r.s2 = cd * both;
  r.details.emplace_back("overlap_sites", both);
  r.details.emplace_back("s2_relative", cd * only_first);
  r.details.emplace_back("nc_first", 1.0 - std::pow(ds, -2.0 * size1));
  r.details.emplace_back("nc_second", 1.0 - std::pow(ds, -2.0 * size2));
  r.details.emplace_back("nc2_first", cd * size1);
  r.details.emplace_back("nc2_second", cd * size2);
  return r;
}

/// Relative log-MAN S_2(A|C) = -log((1/d) sum_alpha ||P_C(e_alpha)||^2), in bits.
inline double relative_log_man(const OperatorAlgebra& a, const OperatorAlgebra& c) {
  detail::require_same_dim(a, c, "relative_log_man");
  const auto bases = block_bases(a.structure());
  return neg_log2(detail::projected_weight(c.basis_columns(), bases.e) / a.dim());
}

namespace detail {

/// X_ij = |<w_i|v_j>|^2, the bistochastic overlap matrix of two bases.
inline Eigen::MatrixXd overlap_probabilities(const CMatrix& w, const CMatrix& v, const char* what) {
  require_square(w, what);
  if (v.rows() != w.rows() || v.cols() != w.cols()) throw ShapeError(std::string(what) + ": bases differ in size");
  if (unitarity_defect(w) > 1e-9 || unitarity_defect(v) > 1e-9) {
    throw PreconditionError(std::string(what) + ": basis is not orthonormal");
  }
  return (w.adjoint() * v).cwiseAbs2();
}

}  // namespace detail

/// S between the maximal abelian algebras of two orthonormal bases (given as
/// the columns of w and v): (1/d) sum_i S_lin(p_i), p_ij = |<w_i|v_j>|^2.
inline ManReport masa_man(const CMatrix& w, const CMatrix& v) {
  const Eigen::MatrixXd x = detail::overlap_probabilities(w, v, "masa_man");
  const double d = static_cast<double>(w.rows());
  const double mean_purity = x.squaredNorm() / d;
  auto r = detail::make_report(1.0 - mean_purity, "masa", "masa_man");
  r.s2 = neg_log2(mean_purity);
  return r;
}

struct QuantumnessResult {
  double q = 0.0;  ///< relative quantumness of the second basis w.r.t. the first
  double s = 0.0;  ///< MAN of the two maximal abelian algebras
  bool lower_holds = false;  ///< Q <= S
  bool upper_holds = false;  ///< S <= d Q
};

/// Q = lambda_max(I - X^T X)/d: the supremum of the mean variance over unit
/// hermitian observables diagonal in the second basis is a quadratic form in
/// their real eigenvalue vector.
inline QuantumnessResult quantumness(const CMatrix& w, const CMatrix& v) {
  const Eigen::MatrixXd x = detail::overlap_probabilities(w, v, "quantumness");
  const auto d = x.rows();
  const Eigen::MatrixXd form = Eigen::MatrixXd::Identity(d, d) - x.transpose() * x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig((form + form.transpose()) / 2.0);
  QuantumnessResult out;
  out.q = std::max(0.0, eig.eigenvalues()(d - 1)) / static_cast<double>(d);
  out.s = masa_man(w, v).s;
  out.lower_holds = out.q <= out.s + kClampMargin;
  out.upper_holds = out.s <= static_cast<double>(d) * out.q + kClampMargin;
  return out;
}

/// Algebra OTOC G_A(U) = S(A : U(A')) = S(A | U(A)), evaluated as the
/// projection form onto U(A); the Omega form is reported as a cross-check.
inline ManReport a_otoc(const OperatorAlgebra& a, const CMatrix& u) {
  if (u.rows() != a.dim() || u.cols() != a.dim()) throw ShapeError("a_otoc: unitary has wrong dimension");
  if (unitarity_defect(u) > 1e-9) throw PreconditionError("a_otoc: operator is not unitary");
  const OperatorAlgebra moved = conjugate(a, u);
  const auto bases = block_bases(a.structure());
  const double w = detail::projected_weight(moved.basis_columns(), bases.e) / a.dim();
  auto r = detail::make_report(1.0 - w, "aotoc", "a_otoc");
  r.s2 = neg_log2(w);
  const OperatorAlgebra moved_commutant = conjugate(a.cached_commutant(), u);
  r.details.emplace_back("omega_form", man_omega(a, moved_commutant).s);
  return r;
}

struct EntropyBlockTerm {
  int n = 1;
  int d = 1;
  double p = 0.0;  ///< n d / dim
  double a = 0.0;  ///< n (d + 1)/d
  double b = 0.0;  ///< 1 - n/d
  double mean_linear_entropy = 0.0;    ///< E_phi S_lin(T(phi))
  double maximally_mixed_entropy = 0.0;  ///< S_lin(T(1/d))
  double contribution = 0.0;  ///< p (a E - n S_lin + b)
};

struct EntropyDecomposition {
  ManReport report;
  std::vector<EntropyBlockTerm> blocks;
};

/// S(A:B) as a weighted sum of linear entropies of the block maps
/// T_J(X) = P_{A'}((1_{n_J}/n_J) (x) X) over B's central blocks. The Haar
/// expectation is exact: E ||T(phi)||^2 = (||T(1)||^2 + sum_ab ||T(|a><b|)||^2) / (d_J (d_J + 1)).
inline EntropyDecomposition entropy_decomposition_man(const OperatorAlgebra& a, const OperatorAlgebra& b) {
  detail::require_same_dim(a, b, "entropy_decomposition_man");
  const OperatorAlgebra& ac = a.cached_commutant();
  const auto& dec = b.structure();
  const double dim = a.dim();
  EntropyDecomposition out;
  double total = 0.0;
  for (const auto& blk : dec.blocks) {
    const CMatrix one_n = identity(blk.n) / static_cast<double>(blk.n);
    auto block_map = [&](const CMatrix& x) { return ac.project(blk.iso * kron(one_n, x) * blk.iso.adjoint()); };
    double sum_units = 0.0;
    for (int i = 0; i < blk.d; ++i) {
      for (int j = 0; j < blk.d; ++j) {
        CMatrix unit = CMatrix::Zero(blk.d, blk.d);
        unit(i, j) = 1.0;
        sum_units += block_map(unit).squaredNorm();
      }
    }
    const double t_one = block_map(identity(blk.d)).squaredNorm();
    const double mean_purity = (t_one + sum_units) / (static_cast<double>(blk.d) * (blk.d + 1));
    EntropyBlockTerm term;
    term.n = blk.n;
    term.d = blk.d;
    term.p = blk.n * blk.d / dim;
    term.a = blk.n * (blk.d + 1.0) / blk.d;
    term.b = 1.0 - static_cast<double>(blk.n) / blk.d;
    term.mean_linear_entropy = 1.0 - mean_purity;
    term.maximally_mixed_entropy = 1.0 - t_one / (static_cast<double>(blk.d) * blk.d);
    term.contribution =
        term.p * (term.a * term.mean_linear_entropy - blk.n * term.maximally_mixed_entropy + term.b);
    total += term.contribution;
    out.blocks.push_back(term);
  }
  out.report = detail::make_report(total, "entropy", "entropy_decomposition_man");
  for (std::size_t j = 0; j < out.blocks.size(); ++j) {
    out.report.details.emplace_back("block" + std::to_string(j) + "_contribution", out.blocks[j].contribution);
  }
  return out;
}

}  // namespace manlab
