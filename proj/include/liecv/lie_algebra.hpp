#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/QR>

#include "liecv/types.hpp"

namespace liecv {

/// Finite-dimensional real Lie algebra given by structure constants in a
/// fixed frame: [X_i, X_j] = sum_k c(i,j,k) X_k.
class LieAlgebra {
 public:
  LieAlgebra(int dim, std::vector<std::string> names, std::vector<double> structure)
      : dim_(dim), names_(std::move(names)), c_(std::move(structure)) {
    if (dim_ <= 0) throw std::invalid_argument("LieAlgebra: dim must be positive");
    if (names_.empty()) {
      for (int i = 0; i < dim_; ++i) names_.push_back("X" + std::to_string(i));
    }
    if (static_cast<int>(names_.size()) != dim_)
      throw std::invalid_argument("LieAlgebra: name count mismatch");
    if (c_.size() != static_cast<std::size_t>(dim_) * dim_ * dim_)
      throw std::invalid_argument("LieAlgebra: structure tensor size mismatch");
    validate();
  }

  int dim() const { return dim_; }
  const std::vector<std::string>& names() const { return names_; }
  double c(int i, int j, int k) const { return c_[(i * dim_ + j) * dim_ + k]; }

  /// coefficients of [a, b] in the frame
  RVec bracket_coeffs(const RVec& a, const RVec& b) const {
    RVec r = RVec::Zero(dim_);
    for (int i = 0; i < dim_; ++i) {
      if (a(i) == 0) continue;
      for (int j = 0; j < dim_; ++j) {
        double ab = a(i) * b(j);
        if (ab == 0) continue;
        for (int k = 0; k < dim_; ++k) r(k) += ab * c(i, j, k);
      }
    }
    return r;
  }

  double max_jacobi_residual() const {
    double worst = 0;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int l = 0; l < dim_; ++l)
          for (int m = 0; m < dim_; ++m) {
            double s = 0;
            for (int k = 0; k < dim_; ++k)
              s += c(i, j, k) * c(k, l, m) + c(j, l, k) * c(k, i, m) +
                   c(l, i, k) * c(k, j, m);
            worst = std::max(worst, std::abs(s));
          }
    return worst;
  }

 private:
  void validate() const {
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k)
          if (std::abs(c(i, j, k) + c(j, i, k)) > kJacobiTol)
            throw validation_error("LieAlgebra: antisymmetry fails at (" +
                                   std::to_string(i) + "," + std::to_string(j) + ")");
    double jr = max_jacobi_residual();
    if (jr > kJacobiTol)
      throw validation_error("LieAlgebra: Jacobi residual " + std::to_string(jr));
  }

  int dim_;
  std::vector<std::string> names_;
  std::vector<double> c_;
};

using AlgebraPtr = std::shared_ptr<const LieAlgebra>;

/// Coefficient vector in an algebra frame; doubles as exponential coordinates
/// of the group element exp(sum x_j X_j).
struct AlgebraVector {
  AlgebraPtr algebra;
  RVec coeffs;

  AlgebraVector(AlgebraPtr alg, RVec v) : algebra(std::move(alg)), coeffs(std::move(v)) {
    if (coeffs.size() != algebra->dim())
      throw std::invalid_argument("AlgebraVector: coefficient count mismatch");
    if (!coeffs.allFinite())
      throw std::invalid_argument("AlgebraVector: non-finite coefficient");
  }
};

using GroupPoint = AlgebraVector;

inline void require_same_algebra(const AlgebraVector& a, const AlgebraVector& b) {
  if (a.algebra.get() != b.algebra.get())
    throw std::invalid_argument("operands belong to different algebras");
}

inline AlgebraVector bracket(const AlgebraVector& a, const AlgebraVector& b) {
  require_same_algebra(a, b);
  return AlgebraVector(a.algebra, a.algebra->bracket_coeffs(a.coeffs, b.coeffs));
}

/// frame vector e_i
inline AlgebraVector frame_vector(const AlgebraPtr& alg, int i) {
  RVec v = RVec::Zero(alg->dim());
  v(i) = 1;
  return AlgebraVector(alg, std::move(v));
}

// ---------------- subspace utilities ----------------

namespace detail {

/// Orthonormal basis of the column span, rank decided at `tol`.
inline RMat orthonormal_span(const RMat& cols, double tol = 1e-10) {
  if (cols.cols() == 0) return RMat(cols.rows(), 0);
  Eigen::ColPivHouseholderQR<RMat> qr(cols);
  qr.setThreshold(tol);
  int r = static_cast<int>(qr.rank());
  RMat q = qr.householderQ();
  return q.leftCols(r);
}

inline double residual_outside_span(const RMat& onb, const RVec& v) {
  if (onb.cols() == 0) return v.norm();
  return (v - onb * (onb.transpose() * v)).norm();
}

}  // namespace detail

/// Subspace of an algebra closed under bracketing with the whole frame.
struct Ideal {
  AlgebraPtr algebra;
  std::vector<AlgebraVector> basis;

  Ideal(AlgebraPtr alg, std::vector<AlgebraVector> b)
      : algebra(std::move(alg)), basis(std::move(b)) {
    int n = algebra->dim();
    RMat cols(n, basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (basis[i].algebra.get() != algebra.get())
        throw std::invalid_argument("Ideal: basis vector from different algebra");
      cols.col(i) = basis[i].coeffs;
    }
    RMat onb = detail::orthonormal_span(cols);
    for (int i = 0; i < n; ++i)
      for (const auto& b0 : basis) {
        RVec br = algebra->bracket_coeffs(
            RVec::Unit(n, i), b0.coeffs);
        double res = detail::residual_outside_span(onb, br);
        if (res > kIdealTol)
          throw validation_error("Ideal: [" + algebra->names()[i] +
                                 ", basis] leaves the span (residual " +
                                 std::to_string(res) + ")");
      }
  }

  RMat orthonormal_basis() const {
    RMat cols(algebra->dim(), basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) cols.col(i) = basis[i].coeffs;
    return detail::orthonormal_span(cols);
  }
};

/// Smallest s such that all (s+1)-fold nested brackets vanish, or nullopt if
/// the lower central series stabilizes at a nonzero subspace.
inline std::optional<int> nilpotency_step(const LieAlgebra& alg) {
  int n = alg.dim();
  RMat cur = RMat::Identity(n, n);  // g^1 = g
  int prev_rank = n;
  for (int s = 1; s <= n + 1; ++s) {
    // g^{s+1} = [g, g^s]
    std::vector<RVec> gen;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < cur.cols(); ++j)
        gen.push_back(alg.bracket_coeffs(RVec::Unit(n, i), cur.col(j)));
    RMat cols(n, gen.size());
    for (std::size_t k = 0; k < gen.size(); ++k) cols.col(k) = gen[k];
    RMat next = detail::orthonormal_span(cols);
    if (next.cols() == 0) return s;
    if (next.cols() == prev_rank) return std::nullopt;  // stabilized nonzero
    prev_rank = static_cast<int>(next.cols());
    cur = next;
  }
  return std::nullopt;
}

struct Quotient {
  AlgebraPtr algebra;  // quotient algebra
  RMat projection;     // (dim - m) x dim, coefficients onto the quotient frame
  RMat lift;           // dim x (dim - m), orthonormal complement basis
};

/// Quotient by a verified ideal. The quotient frame is the Gram-Schmidt
/// complement of the ideal inside the original frame, taken in frame order.
inline Quotient quotient(const AlgebraPtr& alg, const Ideal& ker) {
  if (ker.algebra.get() != alg.get())
    throw std::invalid_argument("quotient: ideal from different algebra");
  int n = alg->dim();
  RMat konb = ker.orthonormal_basis();
  int m = static_cast<int>(konb.cols());

  // complement by Gram-Schmidt of the standard frame against the ideal
  std::vector<RVec> comp;
  for (int i = 0; i < n && static_cast<int>(comp.size()) < n - m; ++i) {
    RVec v = RVec::Unit(n, i);
    if (konb.cols() > 0) v -= konb * (konb.transpose() * v);
    for (const auto& u : comp) v -= u * u.dot(v);
    double nv = v.norm();
    if (nv > 1e-10) comp.push_back(v / nv);
  }
  if (static_cast<int>(comp.size()) != n - m)
    throw validation_error("quotient: failed to complete complement basis");

  RMat P(n, n - m);
  for (int j = 0; j < n - m; ++j) P.col(j) = comp[j];

  int q = n - m;
  std::vector<double> cq(static_cast<std::size_t>(q) * q * q, 0.0);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      RVec br = alg->bracket_coeffs(P.col(i), P.col(j));
      if (konb.cols() > 0) br -= konb * (konb.transpose() * br);  // mod ideal
      RVec coeff = P.transpose() * br;
      double res = (br - P * coeff).norm();
      if (res > kIdealTol)
        throw validation_error("quotient: bracket not representable, residual " +
                               std::to_string(res));
      for (int k = 0; k < q; ++k) cq[(i * q + j) * q + k] = coeff(k);
    }
  // clean exact zeros from rounding
  for (auto& x : cq)
    if (std::abs(x) < 1e-13) x = 0;

  std::vector<std::string> names;
  for (int j = 0; j < q; ++j) names.push_back("Q" + std::to_string(j));
  auto qa = std::make_shared<LieAlgebra>(q, names, cq);
  return Quotient{qa, RMat(P.transpose()), P};
}

// ---------------- built-in algebras ----------------

inline AlgebraPtr abelian_algebra(int n) {
  return std::make_shared<LieAlgebra>(
      n, std::vector<std::string>{}, std::vector<double>(std::size_t(n) * n * n, 0.0));
}

/// h_n: frame (X0 central, X1..Xn, X_{n+1}..X_{2n}), [X_j, X_{j+n}] = X0.
inline AlgebraPtr heisenberg_algebra(int n) {
  int d = 2 * n + 1;
  std::vector<double> c(std::size_t(d) * d * d, 0.0);
  auto at = [&](int i, int j, int k) -> double& { return c[(i * d + j) * d + k]; };
  for (int j = 1; j <= n; ++j) {
    at(j, j + n, 0) = 1;
    at(j + n, j, 0) = -1;
  }
  std::vector<std::string> names;
  names.push_back("X0");
  for (int j = 1; j <= 2 * n; ++j) names.push_back("X" + std::to_string(j));
  return std::make_shared<LieAlgebra>(d, names, c);
}

/// h_n + h_n, frame (left copy 0..2n, right copy 2n+1..4n+1).
inline AlgebraPtr heisenberg_double_algebra(int n) {
  int s = 2 * n + 1, d = 2 * s;
  std::vector<double> c(std::size_t(d) * d * d, 0.0);
  auto at = [&](int i, int j, int k) -> double& { return c[(i * d + j) * d + k]; };
  for (int j = 1; j <= n; ++j) {
    at(j, j + n, 0) = 1;
    at(j + n, j, 0) = -1;
    at(s + j, s + j + n, s) = 1;
    at(s + j + n, s + j, s) = -1;
  }
  std::vector<std::string> names;
  for (int j = 0; j < s; ++j) names.push_back("Xl" + std::to_string(j));
  for (int j = 0; j < s; ++j) names.push_back("Xr" + std::to_string(j));
  return std::make_shared<LieAlgebra>(d, names, c);
}

/// ax+b algebra: [X_s, X_d] = X_s  (frame order: X_s shifts, X_d dilations)
inline AlgebraPtr ax_plus_b_algebra() {
  std::vector<double> c(8, 0.0);
  c[(0 * 2 + 1) * 2 + 0] = 1;   // [X_s, X_d] = X_s
  c[(1 * 2 + 0) * 2 + 0] = -1;
  return std::make_shared<LieAlgebra>(2, std::vector<std::string>{"Xs", "Xd"}, c);
}

}  // namespace liecv
