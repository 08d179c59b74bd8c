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

// Hermitian-closed unital matrix algebras: construction, commutants, centers,
// the central-block decomposition
//
//   C^d = (+)_J C^{n_J} (x) C^{d_J},   A = (+)_J 1_{n_J} (x) L(C^{d_J}),
//
// block bases, projection maps and Haar sampling inside an algebra.

#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "manlab/errors.hpp"
#include "manlab/matrix.hpp"
#include "manlab/rng.hpp"

namespace manlab {

/// One central block H_J ~ C^{n_J} (x) C^{d_J}.
struct Block {
  int n = 1;           ///< multiplicity (size of the commutant factor)
  int d = 1;           ///< irrep dimension (size of the algebra factor)
  CMatrix projector;   ///< central projection Pi_J
  CMatrix iso;         ///< dim x (n*d) isometry; column p*d + l is |p> (x) |l>
};

struct StructuralDecomposition {
  int dim = 0;
  std::vector<Block> blocks;

  [[nodiscard]] int d_center() const { return static_cast<int>(blocks.size()); }
  [[nodiscard]] int d_algebra() const {
    int s = 0;
    for (const auto& b : blocks) s += b.d * b.d;
    return s;
  }
  [[nodiscard]] int d_commutant() const {
    int s = 0;
    for (const auto& b : blocks) s += b.n * b.n;
    return s;
  }
};

/// Basis families e_alpha (spanning A) and e~_beta (spanning A').
struct BlockBases {
  std::vector<CMatrix> e;
  std::vector<CMatrix> e_tilde;
};

struct Collinearity {
  bool collinear = false;
  std::optional<double> ratio;  ///< common n_J / d_J when collinear
};

class OperatorAlgebra;
StructuralDecomposition decompose(const OperatorAlgebra& a);
OperatorAlgebra commutant(const OperatorAlgebra& a);

/// Immutable hermitian-closed unital subalgebra of L(C^d), stored as an
/// HS-orthonormal basis. The structural decomposition is either attached at
/// construction or computed once on first request.
class OperatorAlgebra {
 public:
  static OperatorAlgebra from_orthonormal(int dim, std::vector<CMatrix> basis) {
    if (dim < 1) throw ShapeError("OperatorAlgebra: dimension must be positive");
    if (basis.empty()) throw ShapeError("OperatorAlgebra: empty basis");
    for (const auto& b : basis) {
      if (b.rows() != dim || b.cols() != dim) throw ShapeError("OperatorAlgebra: basis element has wrong shape");
    }
    auto st = std::make_shared<State>();
    st->dim = dim;
    st->columns = stack_vec(basis);
    st->basis = std::move(basis);
    return OperatorAlgebra(std::move(st));
  }

  static OperatorAlgebra from_span(int dim, std::span<const CMatrix> span) {
    return from_orthonormal(dim, orthonormalize_hs(span));
  }

  /// Algebra (+)_J iso_J (1_{n_J} (x) L(C^{d_J})) iso_J^dagger with the given
  /// structure attached.
  static OperatorAlgebra from_structure(StructuralDecomposition dec);

  [[nodiscard]] int dim() const { return state_->dim; }
  /// d(A), the linear dimension.
  [[nodiscard]] int size() const { return static_cast<int>(state_->basis.size()); }
  [[nodiscard]] const std::vector<CMatrix>& basis() const { return state_->basis; }
  /// d^2 x d(A) matrix whose columns are vec(basis[k]).
  [[nodiscard]] const CMatrix& basis_columns() const { return state_->columns; }

  [[nodiscard]] bool has_attached_structure() const { return state_->attached; }

  /// Structure if it is attached or has already been computed, else nullptr.
  [[nodiscard]] const StructuralDecomposition* known_structure() const {
    if (state_->attached) return &*state_->structure;
    std::lock_guard lock(state_->mutex);
    return state_->structure ? &*state_->structure : nullptr;
  }

  /// Central-block decomposition, computed on first use.
  [[nodiscard]] const StructuralDecomposition& structure() const {
    if (state_->attached) return *state_->structure;
    std::call_once(state_->structure_once, [this] {
      auto dec = decompose(*this);
      std::lock_guard lock(state_->mutex);
      state_->structure = std::move(dec);
    });
    return *state_->structure;
  }

  /// Same subspace, no attached or cached structure.
  [[nodiscard]] OperatorAlgebra without_structure() const { return from_orthonormal(dim(), basis()); }

  /// HS-orthogonal projection of x onto the algebra.
  [[nodiscard]] CMatrix project(const CMatrix& x) const {
    return unvec(basis_columns() * (basis_columns().adjoint() * vec(x)), dim());
  }

  /// ||x - P_A(x)||_2.
  [[nodiscard]] double residual(const CMatrix& x) const { return (x - project(x)).norm(); }

  /// Commutant, computed once and shared by copies of this algebra.
  [[nodiscard]] const OperatorAlgebra& cached_commutant() const {
    std::call_once(state_->commutant_once, [this] {
      state_->commutant = std::make_shared<const OperatorAlgebra>(commutant(*this));
    });
    return *state_->commutant;
  }

 private:
  struct State {
    int dim = 0;
    std::vector<CMatrix> basis;
    CMatrix columns;
    bool attached = false;
    std::optional<StructuralDecomposition> structure;
    std::once_flag structure_once;
    std::once_flag commutant_once;
    std::shared_ptr<const OperatorAlgebra> commutant;
    std::mutex mutex;
  };

  explicit OperatorAlgebra(std::shared_ptr<State> st) : state_(std::move(st)) {}

  std::shared_ptr<State> state_;
};

namespace detail {

inline constexpr std::uint64_t kStructureSeed = 0x6d616e6c6162ULL;
inline constexpr int kMaxDecomposeAttempts = 8;
inline constexpr double kClusterGap = 1e-7;
inline constexpr double kStructureTolerance = 1e-8;

/// Deterministic canonical order: by (d_J, n_J, Tr(Pi_J diag(1..d))).
inline void canonicalize(StructuralDecomposition& dec) {
  auto key = [](const Block& b) {
    double w = 0.0;
    for (Eigen::Index i = 0; i < b.projector.rows(); ++i) w += static_cast<double>(i + 1) * b.projector(i, i).real();
    return std::make_tuple(b.d, b.n, w);
  };
  std::stable_sort(dec.blocks.begin(), dec.blocks.end(),
                   [&](const Block& x, const Block& y) { return key(x) < key(y); });
}

inline CMatrix random_element(std::span<const CMatrix> basis, RngStream& rng, bool hermitian) {
  CMatrix x = CMatrix::Zero(basis.front().rows(), basis.front().cols());
  for (const auto& b : basis) x += rng.complex_normal() * b;
  if (hermitian) x = (x + x.adjoint()).eval();
  return x;
}

/// Contiguous runs of ascending eigenvalues separated by gaps larger than
/// kClusterGap times the spectral range.
inline std::vector<std::pair<Eigen::Index, Eigen::Index>> cluster_spectrum(const Eigen::VectorXd& vals) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> runs;
  const Eigen::Index n = vals.size();
  const double range = vals(n - 1) - vals(0);
  const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
  if (range <= 1e-12 * scale) return {{0, n}};
  Eigen::Index start = 0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (vals(i + 1) - vals(i) > kClusterGap * range) {
      runs.emplace_back(start, i + 1);
      start = i + 1;
    }
  }
  runs.emplace_back(start, n);
  return runs;
}

/// Basis element iso (1_n (x) |l><m|) iso^dagger, built from columns.
inline CMatrix block_unit(const Block& b, int l, int m) {
  CMatrix out = CMatrix::Zero(b.iso.rows(), b.iso.rows());
  for (int p = 0; p < b.n; ++p) out += b.iso.col(p * b.d + l) * b.iso.col(p * b.d + m).adjoint();
  return out;
}

/// iso (|p><q| (x) 1_d) iso^dagger.
inline CMatrix block_unit_commutant(const Block& b, int p, int q) {
  CMatrix out = CMatrix::Zero(b.iso.rows(), b.iso.rows());
  for (int l = 0; l < b.d; ++l) out += b.iso.col(p * b.d + l) * b.iso.col(q * b.d + l).adjoint();
  return out;
}

/// The algebra-factor part M with iso^dagger x iso ~ 1_n (x) M.
inline CMatrix algebra_factor(const Block& b, const CMatrix& x) {
  const CMatrix y = b.iso.adjoint() * x * b.iso;
  CMatrix m = CMatrix::Zero(b.d, b.d);
  for (int p = 0; p < b.n; ++p) m += y.block(p * b.d, p * b.d, b.d, b.d);
  return m / static_cast<double>(b.n);
}

/// Largest residual ||x - sum_J iso_J (1 (x) M_J(x)) iso_J^dagger|| over the
/// algebra basis.
inline double structure_residual(const StructuralDecomposition& dec, std::span<const CMatrix> basis) {
  double worst = 0.0;
  for (const auto& x : basis) {
    CMatrix rebuilt = CMatrix::Zero(x.rows(), x.cols());
    for (const auto& b : dec.blocks) {
      rebuilt += b.iso * kron(identity(b.n), algebra_factor(b, x)) * b.iso.adjoint();
    }
    worst = std::max(worst, (x - rebuilt).norm());
  }
  return worst;
}

inline StructuralDecomposition commutant_structure(const StructuralDecomposition& dec) {
  StructuralDecomposition out{dec.dim, {}};
  for (const auto& b : dec.blocks) {
    Block c{b.d, b.n, b.projector, CMatrix(b.iso.rows(), b.iso.cols())};
    for (int p = 0; p < b.n; ++p)
      for (int l = 0; l < b.d; ++l) c.iso.col(l * b.n + p) = b.iso.col(p * b.d + l);
    out.blocks.push_back(std::move(c));
  }
  canonicalize(out);
  return out;
}

inline StructuralDecomposition center_structure(const StructuralDecomposition& dec) {
  StructuralDecomposition out{dec.dim, {}};
  for (const auto& b : dec.blocks) out.blocks.push_back(Block{b.n * b.d, 1, b.projector, b.iso});
  canonicalize(out);
  return out;
}

/// Orthonormal basis of {X : [X, h] = 0 for all h in hs}, as matrices.
inline std::vector<CMatrix> nullspace_of_commutators(std::span<const CMatrix> hs, Eigen::Index d) {
  const Eigen::Index d2 = d * d;
  CMatrix stacked(static_cast<Eigen::Index>(hs.size()) * d2, d2);
  const CMatrix one = identity(d);
  double scale = 0.0;
  for (std::size_t k = 0; k < hs.size(); ++k) {
    // vec(X h - h X) = (1 (x) h^T - h (x) 1) vec(X) in row stacking.
    stacked.middleRows(static_cast<Eigen::Index>(k) * d2, d2) = kron(one, hs[k].transpose()) - kron(hs[k], one);
    scale = std::max(scale, hs[k].norm());
  }
  // Pivoted QR, S P = Q [R11 R12; 0 0]; the kernel is P [-R11^{-1} R12; 1].
  // The rank cut is relative to the probe norms rather than to |R_00|, so
  // probes that are multiples of the identity give the whole space.
  Eigen::ColPivHouseholderQR<CMatrix> qr(stacked);
  const auto diag = qr.matrixQR().diagonal().cwiseAbs();
  Eigen::Index rank = 0;
  while (rank < diag.size() && diag(rank) > kRankTolerance * std::max(scale, 1e-300)) ++rank;
  const Eigen::Index free = d2 - rank;
  if (free == 0) return {};
  CMatrix y(d2, free);
  y.bottomRows(free) = CMatrix::Identity(free, free);
  if (rank > 0) {
    const CMatrix r12 = qr.matrixQR().topRightCorner(rank, free);
    y.topRows(rank) = -qr.matrixQR().topLeftCorner(rank, rank).triangularView<Eigen::Upper>().solve(r12);
  }
  const CMatrix kernel = qr.colsPermutation() * y;
  Eigen::HouseholderQR<CMatrix> orth(kernel);
  CMatrix q = orth.householderQ() * CMatrix::Identity(d2, free);
  std::vector<CMatrix> out;
  for (Eigen::Index k = 0; k < free; ++k) {
    CVector v = q.col(k);
    fix_phase(v);
    out.push_back(unvec(v, d));
  }
  return out;
}

inline std::vector<CMatrix> numeric_commutant_basis(const OperatorAlgebra& a) {
  const int d = a.dim();
  const auto& basis = a.basis();
  RngStream rng(kStructureSeed, 1);
  std::size_t count = 2;
  while (true) {
    std::vector<CMatrix> probes;
    if (count >= basis.size()) {
      for (const auto& b : basis) {
        probes.push_back((b + b.adjoint()) / 2.0);
        probes.push_back((b - b.adjoint()) / cplx(0.0, 2.0));
      }
    } else {
      for (std::size_t k = 0; k < count; ++k) probes.push_back(random_element(basis, rng, true));
    }
    auto candidate = nullspace_of_commutators(probes, d);
    bool ok = true;
    for (const auto& x : candidate) {
      for (const auto& b : basis) {
        if (commutator(x, b).norm() > kStructureTolerance) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) return candidate;
    if (count >= basis.size()) throw NumericalError("commutant: nullspace failed verification against the full basis");
    count *= 2;
  }
}

/// Orthonormal columns spanning range(qa) intersect range(qb).
inline CMatrix subspace_intersection(const CMatrix& qa, const CMatrix& qb) {
  const CMatrix overlap = qa.adjoint() * qb;
  Eigen::JacobiSVD<CMatrix> svd(overlap, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index k = 0;
  while (k < s.size() && s(k) > 1.0 - kRankTolerance) ++k;
  const CMatrix raw = qa * svd.matrixU().leftCols(k);
  return column_range(raw, 1.0);
}

inline std::vector<CMatrix> columns_to_matrices(const CMatrix& q, Eigen::Index d) {
  std::vector<CMatrix> out;
  for (Eigen::Index k = 0; k < q.cols(); ++k) out.push_back(unvec(q.col(k), d));
  return out;
}

struct RetryDecomposition {};

inline StructuralDecomposition try_decompose(const OperatorAlgebra& a, const OperatorAlgebra& z, RngStream& rng) {
  const int d = a.dim();
  StructuralDecomposition dec{d, {}};

  std::vector<CMatrix> central_isos;
  if (z.size() == 1) {
    central_isos.push_back(identity(d));
  } else {
    CMatrix h = CMatrix::Zero(d, d);
    for (const auto& c : z.basis()) h += rng.normal() * (c + c.adjoint()) / 2.0;
    const auto eig = hermitian_eig(h);
    const auto runs = cluster_spectrum(eig.eigenvalues());
    if (static_cast<int>(runs.size()) != z.size()) throw RetryDecomposition{};
    for (auto [lo, hi] : runs) central_isos.push_back(eig.eigenvectors().middleCols(lo, hi - lo));
  }

  for (const auto& v : central_isos) {
    const auto r = static_cast<int>(v.cols());
    std::vector<CMatrix> restricted;
    restricted.reserve(a.basis().size());
    for (const auto& b : a.basis()) restricted.push_back(v.adjoint() * b * v);
    const std::vector<CMatrix> rb = orthonormalize_hs(restricted);
    const int dim_block = static_cast<int>(rb.size());
    const int dj = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim_block))));
    if (dj * dj != dim_block || r % dj != 0) throw RetryDecomposition{};
    const int nj = r / dj;

    // Matrix units from the spectral projections of a generic block element.
    std::vector<CMatrix> units;  // E_l, r x n_J
    if (dj == 1) {
      units.push_back(identity(r));
    } else {
      const auto eig = hermitian_eig(random_element(rb, rng, true));
      const auto runs = cluster_spectrum(eig.eigenvalues());
      if (static_cast<int>(runs.size()) != dj) throw RetryDecomposition{};
      for (auto [lo, hi] : runs) {
        if (hi - lo != nj) throw RetryDecomposition{};
        units.push_back(eig.eigenvectors().middleCols(lo, hi - lo));
      }
    }
    std::vector<CMatrix> w{units[0]};
    for (int l = 1; l < dj; ++l) {
      const CMatrix x = random_element(rb, rng, false);
      const CMatrix m = units[static_cast<std::size_t>(l)].adjoint() * x * units[0];
      Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const auto& s = svd.singularValues();
      if (s(s.size() - 1) < 1e-6 * s(0)) throw RetryDecomposition{};
      w.push_back(units[static_cast<std::size_t>(l)] * svd.matrixU() * svd.matrixV().adjoint());
    }

    Block blk{nj, dj, v * v.adjoint(), CMatrix(d, r)};
    for (int p = 0; p < nj; ++p)
      for (int l = 0; l < dj; ++l) blk.iso.col(p * dj + l) = v * w[static_cast<std::size_t>(l)].col(p);
    dec.blocks.push_back(std::move(blk));
  }

  canonicalize(dec);
  if (structure_residual(dec, a.basis()) > kStructureTolerance) throw RetryDecomposition{};
  return dec;
}

}  // namespace detail

inline OperatorAlgebra OperatorAlgebra::from_structure(StructuralDecomposition dec) {
  int total = 0;
  for (const auto& b : dec.blocks) {
    if (b.n < 1 || b.d < 1) throw ShapeError("from_structure: block sizes must be positive");
    if (b.iso.rows() != dec.dim || b.iso.cols() != b.n * b.d) throw ShapeError("from_structure: isometry shape");
    total += b.n * b.d;
  }
  if (total != dec.dim || dec.blocks.empty()) throw ShapeError("from_structure: sum of n_J*d_J must equal dim");
  detail::canonicalize(dec);
  std::vector<CMatrix> basis;
  for (const auto& b : dec.blocks) {
    const double norm = std::sqrt(static_cast<double>(b.n));
    for (int l = 0; l < b.d; ++l)
      for (int m = 0; m < b.d; ++m) basis.push_back(detail::block_unit(b, l, m) / norm);
  }
  auto alg = from_orthonormal(dec.dim, std::move(basis));
  alg.state_->structure = std::move(dec);
  alg.state_->attached = true;
  return alg;
}

/// Commutant A'. Uses the structure when it is known; otherwise the nullspace
/// of stacked commutator maps X -> [X, h] over generic hermitian elements h of
/// A, verified against every basis element.
inline OperatorAlgebra commutant(const OperatorAlgebra& a) {
  if (const auto* dec = a.known_structure(); dec != nullptr && a.has_attached_structure()) {
    return OperatorAlgebra::from_structure(detail::commutant_structure(*dec));
  }
  return OperatorAlgebra::from_orthonormal(a.dim(), detail::numeric_commutant_basis(a));
}

inline OperatorAlgebra algebra_intersection(const OperatorAlgebra& a, const OperatorAlgebra& b) {
  if (a.dim() != b.dim()) throw ShapeError("algebra_intersection: ambient dimensions differ");
  const CMatrix q = detail::subspace_intersection(a.basis_columns(), b.basis_columns());
  if (q.cols() == 0) throw NumericalError("algebra_intersection: empty intersection (identity lost)");
  return OperatorAlgebra::from_orthonormal(a.dim(), detail::columns_to_matrices(q, a.dim()));
}

/// Center Z(A) = A intersect A'.
inline OperatorAlgebra center(const OperatorAlgebra& a) {
  if (a.has_attached_structure()) {
    return OperatorAlgebra::from_structure(detail::center_structure(*a.known_structure()));
  }
  return algebra_intersection(a, a.cached_commutant());
}

/// Central-block decomposition. Central projections come from the spectrum of
/// a random hermitian center element; matrix units inside each block from a
/// random block element. Degenerate random draws are retried.
inline StructuralDecomposition decompose(const OperatorAlgebra& a, RngStream rng) {
  if (a.has_attached_structure()) return *a.known_structure();
  const OperatorAlgebra z = center(a);
  for (int attempt = 0; attempt < detail::kMaxDecomposeAttempts; ++attempt) {
    try {
      return detail::try_decompose(a, z, rng);
    } catch (const detail::RetryDecomposition&) {
    }
  }
  throw DecompositionError("decompose: could not recover the block structure after " +
                           std::to_string(detail::kMaxDecomposeAttempts) + " attempts");
}

inline StructuralDecomposition decompose(const OperatorAlgebra& a) {
  return decompose(a, RngStream(detail::kStructureSeed, 2));
}

inline Collinearity is_collinear(const StructuralDecomposition& dec) {
  const double ratio = static_cast<double>(dec.blocks.front().n) / dec.blocks.front().d;
  for (const auto& b : dec.blocks) {
    if (std::abs(static_cast<double>(b.n) / b.d - ratio) > 1e-9) return {false, std::nullopt};
  }
  return {true, ratio};
}

inline BlockBases block_bases(const StructuralDecomposition& dec) {
  BlockBases out;
  for (const auto& b : dec.blocks) {
    const double sd = std::sqrt(static_cast<double>(b.d));
    const double sn = std::sqrt(static_cast<double>(b.n));
    for (int l = 0; l < b.d; ++l)
      for (int m = 0; m < b.d; ++m) out.e.push_back(detail::block_unit(b, l, m) / sd);
    for (int p = 0; p < b.n; ++p)
      for (int q = 0; q < b.n; ++q) out.e_tilde.push_back(detail::block_unit_commutant(b, p, q) / sn);
  }
  return out;
}

/// P_A(X) = sum_k B_k <B_k, X> over the orthonormal basis.
inline SuperOperator projection_map(const OperatorAlgebra& a) {
  const CMatrix& q = a.basis_columns();
  return {a.dim(), q * q.adjoint()};
}

/// Kraus form of P_A: X -> sum_beta e~_beta X e~_beta^dagger.
inline SuperOperator kraus_projection_map(const StructuralDecomposition& dec) {
  const auto bases = block_bases(dec);
  const CMatrix f = stack_vec(bases.e_tilde);
  // Transfer sum kron(f, conj f) is the realignment of sum vec(f) vec(f)^dagger.
  return {dec.dim, realign(f * f.adjoint(), dec.dim)};
}

/// Haar unitary of A: sum_J iso_J (1_{n_J} (x) U_J) iso_J^dagger, U_J
/// independent Haar on C^{d_J}.
inline CMatrix haar_algebra_unitary(const StructuralDecomposition& dec, RngStream& rng) {
  CMatrix u = CMatrix::Zero(dec.dim, dec.dim);
  for (const auto& b : dec.blocks) {
    const CMatrix uj = haar_unitary(b.d, rng);
    u += b.iso * kron(identity(b.n), uj) * b.iso.adjoint();
  }
  return u;
}

/// A_S = L(H_S) (x) 1_{S^c} with 0-based region indices into site_dims.
inline OperatorAlgebra lattice_algebra(std::span<const int> site_dims, std::span<const int> region) {
  detail::check_dims(site_dims, "lattice_algebra");
  const auto mask = detail::region_mask(site_dims.size(), region, "lattice_algebra");
  const auto strides = detail::strides_of(site_dims);
  const int dim = detail::product(site_dims);
  std::vector<int> inside;
  std::vector<int> outside;
  for (std::size_t k = 0; k < site_dims.size(); ++k) (mask[k] ? inside : outside).push_back(site_dims[k]);
  const int d_in = detail::product(inside);
  const int d_out = dim / d_in;

  // iso column (p * d_in + l): p enumerates S^c configurations, l those of S.
  CMatrix iso = CMatrix::Zero(dim, dim);
  for (int x = 0; x < dim; ++x) {
    int p = 0;
    int l = 0;
    for (std::size_t k = 0; k < site_dims.size(); ++k) {
      const int digit = (x / strides[k]) % site_dims[k];
      if (mask[k]) {
        l = l * site_dims[k] + digit;
      } else {
        p = p * site_dims[k] + digit;
      }
    }
    iso(x, p * d_in + l) = 1.0;
  }
  return OperatorAlgebra::from_structure({dim, {Block{d_out, d_in, identity(dim), iso}}});
}

inline OperatorAlgebra full_algebra(int d) {
  return OperatorAlgebra::from_structure({d, {Block{1, d, identity(d), identity(d)}}});
}

inline OperatorAlgebra trivial_algebra(int d) {
  return OperatorAlgebra::from_structure({d, {Block{d, 1, identity(d), identity(d)}}});
}

/// Maximal abelian algebra of the orthonormal basis given by the columns of w.
inline OperatorAlgebra masa_algebra(const CMatrix& w) {
  require_square(w, "masa_algebra");
  if (unitarity_defect(w) > 1e-9) throw PreconditionError("masa_algebra: basis is not orthonormal");
  const auto d = static_cast<int>(w.rows());
  StructuralDecomposition dec{d, {}};
  for (int j = 0; j < d; ++j) dec.blocks.push_back(Block{1, 1, w.col(j) * w.col(j).adjoint(), w.col(j)});
  return OperatorAlgebra::from_structure(std::move(dec));
}

/// Algebra with prescribed blocks (n_J, d_J), optionally rotated by a unitary.
inline OperatorAlgebra structural_algebra(std::span<const std::pair<int, int>> blocks,
                                          const std::optional<CMatrix>& basis_change = std::nullopt) {
  int dim = 0;
  for (auto [n, d] : blocks) {
    if (n < 1 || d < 1) throw ShapeError("structural_algebra: block sizes must be positive");
    dim += n * d;
  }
  if (blocks.empty()) throw ShapeError("structural_algebra: no blocks");
  const CMatrix w = basis_change.value_or(identity(dim));
  if (w.rows() != dim || w.cols() != dim) throw ShapeError("structural_algebra: basis change has wrong dimension");
  if (unitarity_defect(w) > 1e-9) throw PreconditionError("structural_algebra: basis change is not unitary");
  StructuralDecomposition dec{dim, {}};
  int offset = 0;
  for (auto [n, d] : blocks) {
    const CMatrix iso = w.middleCols(offset, n * d);
    dec.blocks.push_back(Block{n, d, iso * iso.adjoint(), iso});
    offset += n * d;
  }
  return OperatorAlgebra::from_structure(std::move(dec));
}

/// Smallest hermitian-closed unital algebra containing `gens`: the identity,
/// the generators and their adjoints, closed under products until the
/// dimension stabilizes.
inline OperatorAlgebra algebra_from_generators(std::span<const CMatrix> gens, int d) {
  if (d < 1) throw ShapeError("algebra_from_generators: dimension must be positive");
  std::vector<CMatrix> seed{identity(d)};
  for (const auto& g : gens) {
    if (g.rows() != d || g.cols() != d) throw ShapeError("algebra_from_generators: generator has wrong shape");
    seed.push_back(g);
    seed.push_back(g.adjoint());
  }
  CMatrix q = detail::column_range(stack_vec(seed), stack_vec(seed).colwise().norm().maxCoeff());
  CMatrix fresh = q;
  for (int round = 0; fresh.cols() > 0; ++round) {
    if (round > d * d) throw NumericalError("algebra_from_generators: closure did not stabilize");
    const auto all = detail::columns_to_matrices(q, d);
    const auto added = detail::columns_to_matrices(fresh, d);
    std::vector<CMatrix> products;
    products.reserve(2 * all.size() * added.size());
    for (const auto& x : added) {
      for (const auto& y : all) {
        products.push_back(x * y);
        products.push_back(y * x);
      }
    }
    fresh = detail::extend_range(q, stack_vec(products));
    if (fresh.cols() > 0) {
      CMatrix grown(q.rows(), q.cols() + fresh.cols());
      grown << q, fresh;
      q = std::move(grown);
    }
  }
  return OperatorAlgebra::from_orthonormal(d, detail::columns_to_matrices(q, d));
}

/// U(A) = {U a U^dagger}; keeps the structure when it is known.
inline OperatorAlgebra conjugate(const OperatorAlgebra& a, const CMatrix& u) {
  if (u.rows() != a.dim() || u.cols() != a.dim()) throw ShapeError("conjugate: unitary has wrong dimension");
  if (const auto* dec = a.known_structure(); dec != nullptr) {
    StructuralDecomposition moved = *dec;
    for (auto& b : moved.blocks) {
      b.iso = (u * b.iso).eval();
      b.projector = (u * b.projector * u.adjoint()).eval();
    }
    return OperatorAlgebra::from_structure(std::move(moved));
  }
  std::vector<CMatrix> basis;
  for (const auto& b : a.basis()) basis.push_back(u * b * u.adjoint());
  return OperatorAlgebra::from_orthonormal(a.dim(), std::move(basis));
}

/// ||P_A - P_B||_HS, basis-free algebra distance.
inline double projector_distance(const OperatorAlgebra& a, const OperatorAlgebra& b) {
  if (a.dim() != b.dim()) throw ShapeError("projector_distance: dimension mismatch");
  // |P_a - P_b|^2 = |(1 - P_b) P_a|^2 + |(1 - P_a) P_b|^2, which avoids the
  // cancellation in Tr P_a + Tr P_b - 2 Tr P_a P_b.
  const CMatrix& qa = a.basis_columns();
  const CMatrix& qb = b.basis_columns();
  const CMatrix ab = qb.adjoint() * qa;
  const double left = (qa - qb * ab).squaredNorm();
  const double right = (qb - qa * ab.adjoint()).squaredNorm();
  return std::sqrt(left + right);
}

inline bool same_algebra(const OperatorAlgebra& a, const OperatorAlgebra& b, double tol = 1e-8) {
  return a.dim() == b.dim() && projector_distance(a, b) <= tol;
}

/// Closure residuals of an algebra (all should be ~0).
struct AlgebraCheck {
  double identity_residual = 0.0;
  double adjoint_residual = 0.0;
  double product_residual = 0.0;
};

inline AlgebraCheck check_algebra(const OperatorAlgebra& a) {
  AlgebraCheck out;
  out.identity_residual = a.residual(identity(a.dim()));
  for (const auto& x : a.basis()) {
    out.adjoint_residual = std::max(out.adjoint_residual, a.residual(x.adjoint()));
    for (const auto& y : a.basis()) out.product_residual = std::max(out.product_residual, a.residual(x * y));
  }
  return out;
}

}  // namespace manlab
