// Copyright 2026 The spinlab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file linalg.hpp
 * @brief Dense linear-algebra helpers shared by all spinlab modules.
 *
 * Everything works on Eigen complex matrices. Hermitian eigensolves take a
 * real-arithmetic fast path when the input has no imaginary part, which is
 * the common case for the spin models in this library (the S^3 eigenbasis
 * makes XXX, XXZ and AKLT Hamiltonians real).
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinlab {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr cplx kI{0.0, 1.0};

/// Malformed or inconsistent user input (maps to CLI exit status 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested computation exceeds a configured size cap.
class CapExceeded : public InputError {
 public:
  using InputError::InputError;
};

/// A numerical routine failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline CMat identity(Index n) { return CMat::Identity(n, n); }

inline double max_abs(const CMat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_residual(const CMat& m) {
  return max_abs(m - m.adjoint());
}

inline bool is_real(const CMat& m) {
  return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() == 0.0;
}

struct HermitianEigen {
  RVec values;   // ascending
  CMat vectors;  // columns; empty when not requested
};

/// Eigen-decomposition of a Hermitian matrix (lower triangle is trusted).
inline HermitianEigen hermitian_eigen(const CMat& m, bool want_vectors = true) {
  HermitianEigen out;
  if (m.rows() == 0) return out;
  const auto opts = want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  if (is_real(m)) {
    Eigen::SelfAdjointEigenSolver<RMat> es(m.real(), opts);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
    out.values = es.eigenvalues();
    if (want_vectors) out.vectors = es.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<CMat> es(m, opts);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
    out.values = es.eigenvalues();
    if (want_vectors) out.vectors = es.eigenvectors();
  }
  return out;
}

/// Largest singular value.
inline double operator_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == m.cols() && hermiticity_residual(m) == 0.0) {
    const RVec ev = hermitian_eigen(m, false).values;
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  }
  // Norm of the smaller Gram matrix.
  const CMat gram = m.rows() >= m.cols() ? CMat(m.adjoint() * m) : CMat(m * m.adjoint());
  const RVec ev = hermitian_eigen(gram, false).values;
  return std::sqrt(std::max(0.0, ev(ev.size() - 1)));
}

/// Orthonormal basis of the orthogonal complement of span(cols) in C^n.
/// `cols` is assumed to have orthonormal columns.
inline CMat orthogonal_complement(const CMat& cols, Index n, double tol = 1e-8) {
  if (cols.cols() == 0) return identity(n);
  const CMat proj = identity(n) - cols * cols.adjoint();
  const HermitianEigen es = hermitian_eigen(CMat(0.5 * (proj + proj.adjoint())));
  std::vector<Index> keep;
  for (Index i = 0; i < es.values.size(); ++i)
    if (es.values(i) > 1.0 - tol) keep.push_back(i);
  CMat out(n, static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) out.col(static_cast<Index>(j)) = es.vectors.col(keep[j]);
  return out;
}

/**
 * Applies `op` (mid x mid) to the middle tensor factor of every column of
 * `v`, viewing each column as a (left, mid, right) array in row-major
 * (site-major) order.
 */
inline CMat apply_middle(const CMat& op, Index left, Index mid, Index right, const CMat& v) {
  if (op.rows() != mid || op.cols() != mid || v.rows() != left * mid * right)
    throw std::invalid_argument("apply_middle: dimension mismatch");
  CMat out = CMat::Zero(v.rows(), v.cols());
  for (Index c = 0; c < v.cols(); ++c) {
    for (Index l = 0; l < left; ++l) {
      for (Index r = 0; r < right; ++r) {
        const Index base = l * mid * right + r;
        for (Index j = 0; j < mid; ++j) {
          const cplx x = v(base + j * right, c);
          if (x == cplx{}) continue;
          for (Index i = 0; i < mid; ++i) {
            const cplx a = op(i, j);
            if (a != cplx{}) out(base + i * right, c) += a * x;
          }
        }
      }
    }
  }
  return out;
}

inline Index ipow(Index base, int exp) {
  Index r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace spinlab
