//
// Copyright 2026 The mmbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Dense symmetric-matrix kernels shared by every other module: validated
// symmetric storage, sorted eigendecompositions, PSD powers, and the
// pseudoinverse traces that the error formulas reduce to.

#ifndef MMBOUND_NUMKERNEL_HPP_
#define MMBOUND_NUMKERNEL_HPP_

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "mmbound/error.hpp"

namespace mmbound {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Eigenvalues at or below this fraction of the largest one are treated as
// exact zeros when inverting or taking ranks.
inline constexpr double kZeroEigenvalueRelTol = 1e-12;
// A PSD input may dip this far (relative to its largest eigenvalue) below zero.
inline constexpr double kPsdRelTol = 1e-9;
inline constexpr double kSymmetryRelTol = 1e-9;

namespace internal {

inline double MaxAbs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool AllFinite(const Matrix& m) { return m.allFinite(); }

}  // namespace internal

// A real symmetric n x n matrix. Construction checks finiteness and symmetry
// (to 1e-9 of the largest entry) and then stores the exactly symmetrized
// average, so downstream solvers never see asymmetric round-off.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(Matrix entries) : entries_(std::move(entries)) {
    internal::Require(entries_.rows() == entries_.cols(), ErrorCode::kDimensionMismatch,
                      "symmetric matrix must be square");
    internal::Require(internal::AllFinite(entries_), ErrorCode::kNonFinite,
                      "matrix has non-finite entries");
    const double scale = internal::MaxAbs(entries_);
    const double asym = internal::MaxAbs(entries_ - entries_.transpose());
    internal::Require(asym <= kSymmetryRelTol * scale, ErrorCode::kNonSymmetric,
                      "asymmetry " + std::to_string(asym) + " exceeds tolerance");
    Symmetrize();
  }

  static SymMatrix Identity(Index n) { return SymMatrix(Matrix::Identity(n, n)); }

  Index size() const { return entries_.rows(); }
  const Matrix& entries() const { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }
  double trace() const { return entries_.trace(); }
  double max_abs() const { return internal::MaxAbs(entries_); }

 private:
  void Symmetrize() {
    Matrix t = entries_.transpose();
    entries_ = 0.5 * (entries_ + t);
  }

  Matrix entries_;
};

// values are nonincreasing; the columns of vectors are the matching
// orthonormal eigenvectors.
struct EigenPair {
  Vector values;
  Matrix vectors;
};

enum class Definiteness { kIndefinite, kPsd };

namespace internal {

inline void ClampTinyEigenvalues(Vector& values) {
  if (values.size() == 0) return;
  const double top = values.cwiseAbs().maxCoeff();
  for (Index i = 0; i < values.size(); ++i) {
    if (std::abs(values(i)) <= kZeroEigenvalueRelTol * top) values(i) = 0.0;
  }
}

inline void RequirePsdSpectrum(const Vector& values) {
  if (values.size() == 0) return;
  const double top = std::max(values.maxCoeff(), 0.0);
  const double bottom = values.minCoeff();
  Require(bottom >= -kPsdRelTol * top, ErrorCode::kNotPsd,
          "minimum eigenvalue " + std::to_string(bottom) + " below -1e-9 * " +
              std::to_string(top));
}

}  // namespace internal

// Full eigendecomposition sorted in descending order. With kPsd, eigenvalues
// whose magnitude is below 1e-12 of the largest are set to exactly zero.
inline EigenPair SymmetricEigen(const SymMatrix& s,
                                Definiteness definiteness = Definiteness::kIndefinite) {
  const Index n = s.size();
  EigenPair out{Vector(n), Matrix(n, n)};
  if (n == 0) return out;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s.entries(), Eigen::ComputeEigenvectors);
  internal::Require(solver.info() == Eigen::Success, ErrorCode::kNonFinite,
                    "eigensolver did not converge");
  // Eigen returns ascending order.
  for (Index i = 0; i < n; ++i) {
    out.values(i) = solver.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  if (definiteness == Definiteness::kPsd) internal::ClampTinyEigenvalues(out.values);
  return out;
}

// Eigenvalues only (descending); several times cheaper for large n.
inline Vector SymmetricEigenvalues(const SymMatrix& s,
                                   Definiteness definiteness = Definiteness::kIndefinite) {
  const Index n = s.size();
  Vector values(n);
  if (n == 0) return values;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s.entries(), Eigen::EigenvaluesOnly);
  internal::Require(solver.info() == Eigen::Success, ErrorCode::kNonFinite,
                    "eigensolver did not converge");
  values = solver.eigenvalues().reverse();
  if (definiteness == Definiteness::kPsd) internal::ClampTinyEigenvalues(values);
  return values;
}

// S^p for PSD S via its spectrum; eigenvalues slightly below zero are clamped.
inline SymMatrix PsdPower(const SymMatrix& s, double power) {
  EigenPair eig = SymmetricEigen(s, Definiteness::kPsd);
  internal::RequirePsdSpectrum(eig.values);
  Vector scaled = eig.values.unaryExpr([power](double d) {
    return d <= 0.0 ? 0.0 : std::pow(d, power);
  });
  Matrix r = eig.vectors * scaled.asDiagonal() * eig.vectors.transpose();
  return SymMatrix(std::move(r));
}

inline SymMatrix PsdSqrt(const SymMatrix& s) {
  EigenPair eig = SymmetricEigen(s, Definiteness::kPsd);
  internal::RequirePsdSpectrum(eig.values);
  Vector root = eig.values.unaryExpr([](double d) { return d <= 0.0 ? 0.0 : std::sqrt(d); });
  Matrix r = eig.vectors * root.asDiagonal() * eig.vectors.transpose();
  return SymMatrix(std::move(r));
}

// trace(G_W * pinv(G_A)) together with the relative support residual
// trace(G_W (I - P)) / trace(G_W), where P projects onto range(G_A). A zero
// residual means every query behind G_W is a combination of those behind G_A.
struct PinvTraceResult {
  double trace = 0.0;
  double support_residual = 0.0;
};

inline PinvTraceResult PinvTraceWithSupport(const SymMatrix& gram_w, const SymMatrix& gram_a) {
  internal::Require(gram_w.size() == gram_a.size(), ErrorCode::kDimensionMismatch,
                    "Gram matrices differ in size");
  const Index n = gram_w.size();
  if (n == 0) return {};
  const double w_scale = gram_w.max_abs();
  internal::Require(gram_w.entries().diagonal().minCoeff() >= -kPsdRelTol * w_scale,
                    ErrorCode::kNotPsd, "workload Gram has a negative diagonal entry");
  const double w_trace = gram_w.trace();

  // Well-conditioned positive definite strategies take the Cholesky route,
  // where pinv coincides with the inverse.
  Eigen::LLT<Matrix> llt(gram_a.entries());
  if (llt.info() == Eigen::Success && llt.rcond() > 1e-10) {
    const Matrix solved = llt.solve(gram_w.entries());
    return {solved.trace(), 0.0};
  }

  EigenPair eig = SymmetricEigen(gram_a, Definiteness::kPsd);
  internal::RequirePsdSpectrum(eig.values);
  const Matrix gw_v = gram_w.entries() * eig.vectors;
  PinvTraceResult out;
  double represented = 0.0;
  for (Index k = 0; k < n; ++k) {
    if (eig.values(k) <= 0.0) continue;
    const double q = eig.vectors.col(k).dot(gw_v.col(k));
    represented += q;
    out.trace += q / eig.values(k);
  }
  out.support_residual = w_trace > 0.0 ? std::max(0.0, (w_trace - represented) / w_trace) : 0.0;
  return out;
}

inline double PinvTrace(const SymMatrix& gram_w, const SymMatrix& gram_a) {
  return PinvTraceWithSupport(gram_w, gram_a).trace;
}

// Moore-Penrose pseudoinverse through a thin SVD. Singular values at or below
// 1e-6 of the largest (1e-12 on the Gram spectrum) are dropped.
inline Matrix PseudoInverse(const Matrix& a) {
  internal::Require(internal::AllFinite(a), ErrorCode::kNonFinite, "matrix has non-finite entries");
  if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? std::sqrt(kZeroEigenvalueRelTol) * sv(0) : 0.0;
  Vector inv = sv.unaryExpr([cutoff](double s) { return s > cutoff && s > 0.0 ? 1.0 / s : 0.0; });
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

inline Matrix Kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// W^T W. Sparse rows (hierarchical and wavelet strategies) are accumulated
// row by row; dense inputs go through the blocked product.
inline SymMatrix ColumnGram(const Matrix& rows) {
  const Index n = rows.cols();
  const Index nnz = (rows.array() != 0.0).count();
  if (rows.rows() == 0 || 4 * nnz > rows.size()) {
    Matrix g = Matrix::Zero(n, n);
    g.selfadjointView<Eigen::Lower>().rankUpdate(rows.transpose());
    Matrix full = g.selfadjointView<Eigen::Lower>();
    return SymMatrix(std::move(full));
  }
  Matrix g = Matrix::Zero(n, n);
  std::vector<Index> idx;
  std::vector<double> val;
  for (Index r = 0; r < rows.rows(); ++r) {
    idx.clear();
    val.clear();
    for (Index c = 0; c < n; ++c) {
      const double v = rows(r, c);
      if (v != 0.0) {
        idx.push_back(c);
        val.push_back(v);
      }
    }
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = 0; b < idx.size(); ++b) g(idx[a], idx[b]) += val[a] * val[b];
    }
  }
  return SymMatrix(std::move(g));
}

}  // namespace mmbound

#endif  // MMBOUND_NUMKERNEL_HPP_
