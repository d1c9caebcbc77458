// Copyright 2026 The spinlab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file fcs.hpp
 * @brief Finitely correlated (matrix product) states on a spin chain.
 *
 * A completely positive unital map E : M_n (x) M_k -> M_k is stored through
 * its isometric Stinespring pieces W_alpha : C^k -> C^n (x) C^k,
 *   E(A (x) B) = sum_alpha W_alpha^* (A (x) B) W_alpha,
 * so complete positivity holds by construction. Tensor order is physical
 * factor first: row index of W is (i * k + a) for physical i, auxiliary a.
 */

#pragma once

#include "spinlab/linalg.hpp"
#include "spinlab/spinops.hpp"

#include <Eigen/Eigenvalues>

#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace spinlab {

/// Linear isometry V : C^k -> C^n (x) C^k, stored as an (n*k) x k matrix.
class IsometryV {
 public:
  IsometryV(int physical_dim, int aux_dim, CMat v, double tol = 1e-12)
      : n_(physical_dim), k_(aux_dim), v_(std::move(v)) {
    if (n_ < 1 || k_ < 1) throw InputError("isometry dimensions must be positive");
    if (v_.rows() != static_cast<Index>(n_) * k_ || v_.cols() != k_) throw InputError("isometry has wrong shape");
    if (isometry_residual() > tol)
      throw InputError("V is not an isometry (||V*V - 1|| = " + format_double(isometry_residual()) + ")");
  }
  [[nodiscard]] int physical_dim() const { return n_; }
  [[nodiscard]] int aux_dim() const { return k_; }
  [[nodiscard]] const CMat& matrix() const { return v_; }
  [[nodiscard]] double isometry_residual() const { return max_abs(v_.adjoint() * v_ - identity(k_)); }
  /// k x k block V_i = (<i| (x) 1) V.
  [[nodiscard]] CMat kraus(int i) const { return v_.block(static_cast<Index>(i) * k_, 0, k_, k_); }

 private:
  int n_, k_;
  CMat v_;
};

class CpUnitalMap {
 public:
  explicit CpUnitalMap(std::vector<IsometryV> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw InputError("CP map needs at least one Stinespring piece");
    for (const auto& p : pieces_)
      if (p.physical_dim() != pieces_.front().physical_dim() || p.aux_dim() != pieces_.front().aux_dim())
        throw InputError("inconsistent Stinespring pieces");
  }
  [[nodiscard]] int physical_dim() const { return pieces_.front().physical_dim(); }
  [[nodiscard]] int aux_dim() const { return pieces_.front().aux_dim(); }
  [[nodiscard]] bool is_pure() const { return pieces_.size() == 1; }
  [[nodiscard]] const std::vector<IsometryV>& pieces() const { return pieces_; }

  /// E(A (x) B), with an overall weight 1/#pieces so that E(1 (x) 1) = 1.
  [[nodiscard]] CMat apply(const CMat& a, const CMat& b) const {
    const int n = physical_dim(), k = aux_dim();
    if (a.rows() != n || a.cols() != n || b.rows() != k || b.cols() != k)
      throw InputError("E(A (x) B): dimension mismatch");
    CMat out = CMat::Zero(k, k);
    for (const auto& p : pieces_) {
      std::vector<CMat> kr;
      for (int i = 0; i < n; ++i) kr.push_back(p.kraus(i));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (a(i, j) != cplx{}) out += a(i, j) * kr[static_cast<std::size_t>(i)].adjoint() * b * kr[static_cast<std::size_t>(j)];
    }
    return out / static_cast<double>(pieces_.size());
  }
  [[nodiscard]] double unitality_residual() const {
    return max_abs(apply(identity(physical_dim()), identity(aux_dim())) - identity(aux_dim()));
  }

 private:
  std::vector<IsometryV> pieces_;
};

inline CpUnitalMap make_pure_map(const IsometryV& v) { return CpUnitalMap({v}); }

/**
 * The AKLT isometry (n = 3, k = 2): the spin-1/2 component of spin-1 (x)
 * spin-1/2, i.e. the intertwiner V D^(1/2) = (D^(1) (x) D^(1/2)) V, with
 *   V|+1/2> =  sqrt(2/3) |+1>(x)|-1/2> - sqrt(1/3) |0>(x)|+1/2>
 *   V|-1/2> =  sqrt(1/3) |0>(x)|-1/2>  - sqrt(2/3) |-1>(x)|+1/2>
 * Bases: physical |1>,|0>,|-1>; auxiliary |1/2>,|-1/2>.
 */
inline IsometryV aklt_isometry() {
  const double a = std::sqrt(2.0 / 3.0), b = std::sqrt(1.0 / 3.0);
  CMat v = CMat::Zero(6, 2);
  v(0 * 2 + 1, 0) = a;
  v(1 * 2 + 0, 0) = -b;
  v(1 * 2 + 1, 1) = b;
  v(2 * 2 + 0, 1) = -a;
  return IsometryV(3, 2, std::move(v));
}

/// max_i || V S^i_(1/2) - (S^i_(1) (x) 1 + 1 (x) S^i_(1/2)) V ||_max.
inline double intertwiner_residual(const IsometryV& v, SpinValue physical, SpinValue aux) {
  const SpinMatrices sp = spin_matrices(physical), sa = spin_matrices(aux);
  double r = 0.0;
  for (int i = 0; i < 3; ++i) {
    const CMat gen = kron(sp[i], identity(aux.dim())) + kron(identity(physical.dim()), sa[i]);
    r = std::max(r, max_abs(v.matrix() * sa[i] - gen * v.matrix()));
  }
  return r;
}

/// Matrix of B -> E(1 (x) B) acting on column-major vec(B).
inline CMat transfer_matrix(const CpUnitalMap& map) {
  const int k = map.aux_dim();
  CMat t = CMat::Zero(k * k, k * k);
  for (const auto& p : map.pieces())
    for (int i = 0; i < map.physical_dim(); ++i) {
      const CMat ki = p.kraus(i);
      t += kron(CMat(ki.transpose()), CMat(ki.adjoint()));  // vec(X B Y) = (Y^T (x) X) vec(B)
    }
  return t / static_cast<double>(map.pieces().size());
}

struct InvariantState {
  CMat rho;
  bool unique = true;
  double residual = 0.0;  // max_B |tr(rho E(1(x)B)) - tr(rho B)| over matrix units
};

/// Fixed point of the adjoint transfer operator, Hermitized and trace-normalized.
inline InvariantState invariant_state(const CpUnitalMap& map) {
  const int k = map.aux_dim();
  const CMat t = transfer_matrix(map);
  const CMat tdag = t.adjoint();  // adjoint w.r.t. the Hilbert-Schmidt product
  Eigen::ComplexEigenSolver<CMat> es(tdag);
  const auto& ev = es.eigenvalues();
  Index best = 0;
  int near_one = 0;
  for (Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i) - 1.0) < std::abs(ev(best) - 1.0)) best = i;
    if (std::abs(ev(i) - 1.0) < 1e-8) ++near_one;
  }
  InvariantState out;
  out.unique = near_one <= 1;
  CMat rho(k, k);
  if (out.unique) {
    const CVec v = es.eigenvectors().col(best);
    rho = Eigen::Map<const CMat>(v.data(), k, k);
  } else {
    // Cesaro mean of the orbit of the maximally mixed state stays a state.
    CVec x = Eigen::Map<const CVec>(CMat(identity(k) / static_cast<double>(k)).data(), k * k);
    CVec acc = CVec::Zero(k * k);
    constexpr int kSteps = 2000;
    for (int s = 0; s < kSteps; ++s) {
      acc += x;
      x = tdag * x;
    }
    acc /= static_cast<double>(kSteps);
    rho = Eigen::Map<const CMat>(acc.data(), k, k);
  }
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint());
  out.rho = rho;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      CMat unit = CMat::Zero(k, k);
      unit(a, b) = 1.0;
      out.residual = std::max(out.residual, std::abs((rho * map.apply(identity(map.physical_dim()), unit)).trace() -
                                                     (rho * unit).trace()));
    }
  return out;
}

class FcsTriple {
 public:
  FcsTriple(CpUnitalMap map, CMat rho) : map_(std::move(map)), rho_(std::move(rho)) {
    const int k = map_.aux_dim();
    if (rho_.rows() != k || rho_.cols() != k) throw InputError("rho has wrong dimension");
    if (std::abs(rho_.trace() - 1.0) > 1e-10 || hermiticity_residual(rho_) > 1e-10)
      throw InputError("rho must be a Hermitian trace-one matrix");
    if (hermitian_eigen(rho_, false).values(0) < -1e-10) throw InputError("rho must be positive");
  }
  static FcsTriple from_map(CpUnitalMap map) {
    InvariantState s = invariant_state(map);
    return FcsTriple(std::move(map), std::move(s.rho));
  }
  [[nodiscard]] const CpUnitalMap& map() const { return map_; }
  [[nodiscard]] const CMat& rho() const { return rho_; }

 private:
  CpUnitalMap map_;
  CMat rho_;
};

/// omega(A_1 (x) ... (x) A_N) = Tr rho E_{A_1} o ... o E_{A_N}(1), evaluated right to left.
inline cplx fcs_expectation(const FcsTriple& triple, std::span<const CMat> observables) {
  const int n = triple.map().physical_dim();
  CMat b = identity(triple.map().aux_dim());
  for (auto it = observables.rbegin(); it != observables.rend(); ++it) {
    if (it->rows() != n || it->cols() != n) throw InputError("observable has wrong dimension");
    b = triple.map().apply(*it, b);
  }
  return (triple.rho() * b).trace();
}

/// Expectation of an operator on N contiguous sites, expanded in matrix units.
inline cplx fcs_expectation_local(const FcsTriple& triple, const CMat& op, int sites) {
  const int n = triple.map().physical_dim();
  const Index d = ipow(n, sites);
  if (op.rows() != d || op.cols() != d) throw InputError("local operator has wrong dimension");
  cplx total = 0.0;
  std::vector<CMat> units(static_cast<std::size_t>(sites), CMat::Zero(n, n));
  for (Index r = 0; r < d; ++r)
    for (Index c = 0; c < d; ++c) {
      if (op(r, c) == cplx{}) continue;
      Index rr = r, cc = c;
      for (int s = sites - 1; s >= 0; --s) {
        units[static_cast<std::size_t>(s)].setZero();
        units[static_cast<std::size_t>(s)](rr % n, cc % n) = 1.0;
        rr /= n;
        cc /= n;
      }
      total += op(r, c) * fcs_expectation(triple, units);
    }
  return total;
}

struct CorrelationLength {
  std::vector<cplx> spectrum;       // transfer eigenvalues, modulus descending
  std::optional<double> subleading; // second-largest modulus
  double xi = 0.0;                  // -1 / ln |subleading|; 0 when none
  bool dominant_degenerate = false;
};

inline CorrelationLength correlation_length(const CpUnitalMap& map) {
  Eigen::ComplexEigenSolver<CMat> es(transfer_matrix(map), false);
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::stable_sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });
  CorrelationLength out;
  out.spectrum = ev;
  if (ev.size() > 1) {
    out.subleading = std::abs(ev[1]);
    out.dominant_degenerate = std::abs(std::abs(ev[1]) - std::abs(ev[0])) < 1e-10;
    out.xi = (*out.subleading > 0.0 && *out.subleading < 1.0) ? -1.0 / std::log(*out.subleading)
                                                               : std::numeric_limits<double>::infinity();
    if (*out.subleading == 0.0) out.xi = 0.0;
  }
  return out;
}

/// Transfer eigenvalue of largest modulus other than the identity direction (signed).
inline cplx subleading_transfer_eigenvalue(const CpUnitalMap& map) {
  const CorrelationLength c = correlation_length(map);
  if (c.spectrum.size() < 2) return 0.0;
  return c.spectrum[1];
}

/// Two-point function <A_0 B_r> for r = 1..max_r.
inline std::vector<cplx> fcs_two_point(const FcsTriple& triple, const CMat& a, const CMat& b, int max_r) {
  const int n = triple.map().physical_dim();
  std::vector<cplx> out;
  for (int r = 1; r <= max_r; ++r) {
    std::vector<CMat> ops(static_cast<std::size_t>(r + 1), identity(n));
    ops.front() = a;
    ops.back() = b;
    out.push_back(fcs_expectation(triple, ops));
  }
  return out;
}

// CSV: header "n,k", the values, then "row,col,re,im" entries in row-major order.
inline void write_isometry_csv(std::ostream& os, const IsometryV& v) {
  os << "n,k\n" << v.physical_dim() << ',' << v.aux_dim() << "\nrow,col,re,im\n";
  const CMat& m = v.matrix();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c)
      os << r << ',' << c << ',' << format_double(m(r, c).real()) << ',' << format_double(m(r, c).imag()) << '\n';
}

inline IsometryV read_isometry_csv(std::istream& is) {
  std::string line;
  auto next = [&]() {
    if (!std::getline(is, line)) throw InputError("isometry CSV truncated");
    return line;
  };
  if (next() != "n,k") throw InputError("isometry CSV must start with 'n,k'");
  int n = 0, k = 0;
  {
    std::istringstream ss(next());
    char comma = 0;
    if (!(ss >> n >> comma >> k) || comma != ',') throw InputError("bad isometry dimensions");
  }
  if (n < 1 || k < 1) throw InputError("bad isometry dimensions");
  if (next() != "row,col,re,im") throw InputError("missing isometry entry header");
  CMat m = CMat::Zero(static_cast<Index>(n) * k, k);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    long r = 0, c = 0;
    double re = 0, im = 0;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(ss >> r >> c1 >> c >> c2 >> re >> c3 >> im) || c1 != ',' || c2 != ',' || c3 != ',')
      throw InputError("bad isometry entry line: " + line);
    if (r < 0 || c < 0 || r >= m.rows() || c >= m.cols()) throw InputError("isometry entry out of range");
    m(r, c) = cplx(re, im);
  }
  return IsometryV(n, k, std::move(m), 1e-10);
}

}  // namespace spinlab
