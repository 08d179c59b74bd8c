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

// Dense complex matrices, Hilbert-Schmidt geometry, tensor utilities, Haar
// sampling and superoperators.
//
// Vectorization convention (used everywhere): row stacking,
//   vec(X)[i*d + j] = X(i, j).
// With it the map X -> A X B^dagger has transfer matrix kron(A, conj(B)), and
// a transfer matrix sum_k kron(A_k, B_k^T) belongs to X -> sum_k A_k X B_k.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "manlab/errors.hpp"
#include "manlab/rng.hpp"

namespace manlab {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Relative singular-value cutoff for rank and nullspace decisions.
inline constexpr double kRankTolerance = 1e-9;

inline CMatrix identity(Eigen::Index d) { return CMatrix::Identity(d, d); }

inline void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ShapeError(std::string(what) + ": expected a non-empty square matrix, got " + std::to_string(m.rows()) +
                     "x" + std::to_string(m.cols()));
  }
}

/// Hilbert-Schmidt pairing Tr(A^dagger B).
inline cplx hs_inner(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("hs_inner: shape mismatch");
  }
  return (a.array().conjugate() * b.array()).sum();
}

inline double hs_norm2(const CMatrix& a) { return a.squaredNorm(); }

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

inline CVector vec(const CMatrix& x) {
  CVector v(x.size());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) v(i * x.cols() + j) = x(i, j);
  }
  return v;
}

inline CMatrix unvec(const Eigen::Ref<const CVector>& v, Eigen::Index d) {
  if (v.size() != d * d) throw ShapeError("unvec: length is not d^2");
  CMatrix x(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = v(i * d + j);
  }
  return x;
}

/// Columns vec(m_k) for a list of d x d matrices.
inline CMatrix stack_vec(std::span<const CMatrix> ms) {
  if (ms.empty()) return {};
  CMatrix out(ms.front().size(), static_cast<Eigen::Index>(ms.size()));
  for (std::size_t k = 0; k < ms.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = vec(ms[k]);
  return out;
}

/// Realignment of a d^2 x d^2 matrix: out[(a,b),(c,e)] = m[(a,c),(b,e)].
/// An involution; maps transfer matrices to (d times) Choi matrices.
inline CMatrix realign(const CMatrix& m, Eigen::Index d) {
  if (m.rows() != d * d || m.cols() != d * d) throw ShapeError("realign: expected a d^2 x d^2 matrix");
  CMatrix out(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b)
      for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index e = 0; e < d; ++e) out(a * d + b, c * d + e) = m(a * d + c, b * d + e);
  return out;
}

/// Partial transpose of the second tensor factor of a d^2 x d^2 matrix.
inline CMatrix partial_transpose_second(const CMatrix& m, Eigen::Index d) {
  if (m.rows() != d * d || m.cols() != d * d) throw ShapeError("partial_transpose_second: expected d^2 x d^2");
  CMatrix out(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index b = 0; b < d; ++b) out(i * d + b, j * d + a) = m(i * d + a, j * d + b);
  return out;
}

namespace detail {

inline std::vector<int> strides_of(std::span<const int> dims) {
  std::vector<int> strides(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) strides[k - 1] = strides[k] * dims[k];
  return strides;
}

inline int product(std::span<const int> dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

inline void check_dims(std::span<const int> dims, const char* what) {
  if (dims.empty()) throw ShapeError(std::string(what) + ": empty dims");
  for (int d : dims) {
    if (d < 1) throw ShapeError(std::string(what) + ": non-positive factor dimension");
  }
}

inline std::vector<bool> region_mask(std::size_t n, std::span<const int> region, const char* what) {
  std::vector<bool> mask(n, false);
  for (int r : region) {
    if (r < 0 || static_cast<std::size_t>(r) >= n) {
      throw ShapeError(std::string(what) + ": region index " + std::to_string(r) + " out of range");
    }
    mask[static_cast<std::size_t>(r)] = true;
  }
  return mask;
}

}  // namespace detail

/// Swap T_S on (H_0 (x) ... (x) H_{n-1})^{(x)2} exchanging the two copies of
/// every factor listed in `region` (0-based) and acting trivially elsewhere.
inline CMatrix swap_operator(std::span<const int> dims, std::span<const int> region) {
  detail::check_dims(dims, "swap_operator");
  const auto mask = detail::region_mask(dims.size(), region, "swap_operator");
  const auto strides = detail::strides_of(dims);
  const int big = detail::product(dims);
  CMatrix t = CMatrix::Zero(static_cast<Eigen::Index>(big) * big, static_cast<Eigen::Index>(big) * big);
  for (int x = 0; x < big; ++x) {
    for (int y = 0; y < big; ++y) {
      int xs = 0;
      int ys = 0;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        const int xk = (x / strides[k]) % dims[k];
        const int yk = (y / strides[k]) % dims[k];
        xs += (mask[k] ? yk : xk) * strides[k];
        ys += (mask[k] ? xk : yk) * strides[k];
      }
      t(static_cast<Eigen::Index>(xs) * big + ys, static_cast<Eigen::Index>(x) * big + y) = 1.0;
    }
  }
  return t;
}

/// Plain swap on C^d (x) C^d.
inline CMatrix swap_operator(int d) {
  const int dims[] = {d};
  const int region[] = {0};
  return swap_operator(dims, region);
}

/// Re Tr(S m n) for d^2 x d^2 matrices, S the swap of the two C^d factors.
/// O(d^4): S m is a row permutation of m.
inline double swap_trace(const CMatrix& m, const CMatrix& n, Eigen::Index d) {
  if (m.rows() != d * d || n.rows() != d * d || m.cols() != d * d || n.cols() != d * d) {
    throw ShapeError("swap_trace: expected d^2 x d^2 operands");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const Eigen::Index r = i * d + j;
      const Eigen::Index sr = j * d + i;
      acc += (m.row(sr).transpose().array() * n.col(r).array()).sum().real();
    }
  }
  return acc;
}

/// Partial trace keeping the (0-based) factors listed in `keep`, in their
/// original order.
inline CMatrix partial_trace(const CMatrix& m, std::span<const int> dims, std::span<const int> keep) {
  detail::check_dims(dims, "partial_trace");
  const int big = detail::product(dims);
  if (m.rows() != big || m.cols() != big) throw ShapeError("partial_trace: matrix dimension does not match dims");
  const auto mask = detail::region_mask(dims.size(), keep, "partial_trace");
  const auto strides = detail::strides_of(dims);

  std::vector<int> kept_dims;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (mask[k]) kept_dims.push_back(dims[k]);
  }
  const int small = detail::product(kept_dims);
  const auto kept_strides = detail::strides_of(kept_dims);

  // Split each index into (kept part, traced part).
  std::vector<int> kept_index(static_cast<std::size_t>(big));
  std::vector<int> traced_index(static_cast<std::size_t>(big));
  for (int x = 0; x < big; ++x) {
    int kx = 0;
    int tx = 0;
    std::size_t kk = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      const int digit = (x / strides[k]) % dims[k];
      if (mask[k]) {
        kx += digit * kept_strides[kk++];
      } else {
        tx = tx * dims[k] + digit;
      }
    }
    kept_index[static_cast<std::size_t>(x)] = kx;
    traced_index[static_cast<std::size_t>(x)] = tx;
  }

  CMatrix out = CMatrix::Zero(small, small);
  for (int x = 0; x < big; ++x) {
    for (int y = 0; y < big; ++y) {
      if (traced_index[static_cast<std::size_t>(x)] == traced_index[static_cast<std::size_t>(y)]) {
        out(kept_index[static_cast<std::size_t>(x)], kept_index[static_cast<std::size_t>(y)]) += m(x, y);
      }
    }
  }
  return out;
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of diag(R) moved into Q.
inline CMatrix haar_unitary(int d, RngStream& rng) {
  if (d < 1) throw ShapeError("haar_unitary: dimension must be positive");
  CMatrix z(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) z(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  const CMatrix& r = qr.matrixQR();
  for (int k = 0; k < d; ++k) {
    const cplx rk = r(k, k);
    const double mag = std::abs(rk);
    q.col(k) *= (mag > 0.0 ? rk / mag : cplx(1.0));
  }
  return q;
}

/// Haar-random unit vector in C^d.
inline CVector haar_state(int d, RngStream& rng) {
  if (d < 1) throw ShapeError("haar_state: dimension must be positive");
  CVector v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.complex_normal();
  const double n = v.norm();
  return n > 0.0 ? CVector(v / n) : haar_state(d, rng);
}

namespace detail {

/// Multiply a unit vector by the phase making its first dominant entry real
/// and positive.
inline void fix_phase(Eigen::Ref<CVector> v) {
  const double top = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= (1.0 - 1e-9) * top) {
      v *= std::conj(v(i)) / std::abs(v(i));
      return;
    }
  }
}

/// Orthonormal basis (as columns) of the column span of `m`, with rank decided
/// by the pivoted-QR diagonal above kRankTolerance * `scale`. (Column-pivoted
/// QR rather than BDCSVD: the latter is unstable on the exactly degenerate
/// spectra that algebra bases produce.)
inline CMatrix column_range(const CMatrix& m, double scale) {
  if (m.cols() == 0 || scale <= 0.0) return CMatrix(m.rows(), 0);
  Eigen::ColPivHouseholderQR<CMatrix> qr(m);
  const auto r = qr.matrixQR().diagonal().cwiseAbs();
  Eigen::Index rank = 0;
  while (rank < r.size() && r(rank) > kRankTolerance * scale) ++rank;
  CMatrix q = qr.householderQ() * CMatrix::Identity(m.rows(), rank);
  for (Eigen::Index k = 0; k < rank; ++k) fix_phase(q.col(k));
  return q;
}

/// New orthonormal directions contributed by `candidates` (columns) outside
/// the span of the orthonormal columns of `q`.
inline CMatrix extend_range(const CMatrix& q, const CMatrix& candidates) {
  if (candidates.cols() == 0) return CMatrix(candidates.rows(), 0);
  const double scale = candidates.colwise().norm().maxCoeff();
  CMatrix r = candidates;
  if (q.cols() > 0) {
    for (int pass = 0; pass < 2; ++pass) r -= q * (q.adjoint() * r);
  }
  return column_range(r, scale);
}

}  // namespace detail

/// HS-orthonormal basis of span(ms). Rank is decided relative to the largest
/// input norm. Each element's phase is fixed so that its first
/// dominant entry is real positive.
inline std::vector<CMatrix> orthonormalize_hs(std::span<const CMatrix> ms) {
  if (ms.empty()) throw ShapeError("orthonormalize_hs: empty input");
  for (const auto& m : ms) {
    if (m.rows() != ms.front().rows() || m.cols() != ms.front().cols()) {
      throw ShapeError("orthonormalize_hs: inconsistent shapes");
    }
  }
  const CMatrix stacked = stack_vec(ms);
  const double scale = stacked.colwise().norm().maxCoeff();
  if (scale == 0.0) throw ShapeError("orthonormalize_hs: all inputs are zero");
  const CMatrix q = detail::column_range(stacked, scale);
  std::vector<CMatrix> out;
  out.reserve(static_cast<std::size_t>(q.cols()));
  for (Eigen::Index k = 0; k < q.cols(); ++k) out.push_back(unvec(q.col(k), ms.front().rows()));
  return out;
}

/// Linear map on d x d matrices stored as its d^2 x d^2 transfer matrix.
struct SuperOperator {
  Eigen::Index dim = 0;
  CMatrix transfer;

  [[nodiscard]] CMatrix apply(const CMatrix& x) const {
    if (x.rows() != dim || x.cols() != dim) throw ShapeError("SuperOperator::apply: operand shape mismatch");
    return unvec(transfer * vec(x), dim);
  }

  /// X -> sum_k a_k X a_k^dagger.
  static SuperOperator from_kraus(std::span<const CMatrix> kraus) {
    if (kraus.empty()) throw ShapeError("SuperOperator::from_kraus: no Kraus operators");
    const Eigen::Index d = kraus.front().rows();
    SuperOperator op{d, CMatrix::Zero(d * d, d * d)};
    for (const auto& k : kraus) {
      require_square(k, "SuperOperator::from_kraus");
      if (k.rows() != d) throw ShapeError("SuperOperator::from_kraus: inconsistent Kraus shapes");
      op.transfer += kron(k, k.conjugate());
    }
    return op;
  }

  /// X -> a X b^dagger.
  static SuperOperator sandwich(const CMatrix& a, const CMatrix& b) {
    require_square(a, "SuperOperator::sandwich");
    if (b.rows() != a.rows() || b.cols() != a.cols()) throw ShapeError("SuperOperator::sandwich: shape mismatch");
    return {a.rows(), kron(a, b.conjugate())};
  }

  static SuperOperator identity_map(Eigen::Index d) { return {d, CMatrix::Identity(d * d, d * d)}; }

  /// X -> Tr(X) 1/d.
  static SuperOperator depolarizing(Eigen::Index d) {
    const CVector v = vec(identity(d));
    return {d, v * v.adjoint() / static_cast<double>(d)};
  }

  /// Conjugation by a unitary, U o this o U^dagger.
  [[nodiscard]] SuperOperator conjugated(const CMatrix& u) const {
    const CMatrix w = kron(u, u.conjugate());
    return {dim, w * transfer * w.adjoint()};
  }

  /// Tr_HS(this^dagger other).
  [[nodiscard]] cplx hs_inner(const SuperOperator& other) const { return manlab::hs_inner(transfer, other.transfer); }
};

struct Reshuffled {
  CMatrix choi;         ///< (map (x) id)|Phi+><Phi+|
  CMatrix omega_style;  ///< sum_k A_k (x) B_k for transfer sum_k A_k (x) B_k^T
};

inline Reshuffled reshuffle(const SuperOperator& map) {
  const Eigen::Index d = map.dim;
  if (map.transfer.rows() != map.transfer.cols() || map.transfer.rows() != d * d) {
    throw ShapeError("reshuffle: transfer matrix must be d^2 x d^2");
  }
  return {realign(map.transfer, d) / static_cast<double>(d), partial_transpose_second(map.transfer, d)};
}

inline SuperOperator from_choi(const CMatrix& choi, Eigen::Index d) {
  return {d, realign(choi, d) * static_cast<double>(d)};
}

inline SuperOperator from_omega_style(const CMatrix& omega, Eigen::Index d) {
  return {d, partial_transpose_second(omega, d)};
}

/// Hermitian eigen-decomposition with eigenvalues in ascending order.
inline Eigen::SelfAdjointEigenSolver<CMatrix> hermitian_eig(const CMatrix& h) {
  return Eigen::SelfAdjointEigenSolver<CMatrix>(CMatrix((h + h.adjoint()) / 2.0));
}

/// Trace norm (sum of singular values).
inline double trace_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().sum();
}

/// Operator-norm distance of U^dagger U from the identity.
inline double unitarity_defect(const CMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u.adjoint() * u - identity(u.rows())).norm();
}

}  // namespace manlab
