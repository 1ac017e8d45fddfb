#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "liecv/bch.hpp"
#include "liecv/fourier.hpp"
#include "liecv/frame_ops.hpp"
#include "liecv/grid.hpp"
#include "liecv/lie_algebra.hpp"
#include "liecv/types.hpp"

namespace liecv {

struct AssembleOptions {
  /// factor flows through operators that commute with the whole frame
  bool central_split = true;
  double commute_rel_tol = 1e-10;
  double block_rel_tol = 1e-8;
  double boundary_tol = 1e-10;
};

struct AssembleResult {
  LinOp op;
  /// kernel was not decayed below tolerance at the grid boundary
  bool truncated = false;
  double boundary_level = 0.0;
};

namespace detail {

inline double fro(const CMat& a) { return a.norm(); }

/// ops[c] commutes with every other op (within roundoff)
inline std::vector<int> central_indices(const std::vector<LinOp>& ops, double rel_tol) {
  int nops = static_cast<int>(ops.size());
  double n = static_cast<double>(ops[0].rows());
  std::vector<int> central;
  for (int c = 0; c < nops; ++c) {
    bool ok = true;
    for (int j = 0; j < nops && ok; ++j) {
      if (j == c) continue;
      double denom = std::max(fro(ops[c]) * fro(ops[j]) / std::sqrt(n), 1e-300);
      if (fro(CMat(ops[c] * ops[j] - ops[j] * ops[c])) > rel_tol * denom) ok = false;
    }
    if (ok) central.push_back(c);
  }
  return central;
}

struct CentralSplit {
  CMat basis;                            // joint eigenbasis U of the central ops
  std::vector<std::vector<int>> blocks;  // column groups (joint eigenspaces)
  RMat lambda;                           // |central| x n joint eigenvalues per column
  std::vector<std::vector<CMat>> tr;     // per non-central op, per block submatrix
  bool ok = false;
};

inline CentralSplit make_central_split(const std::vector<LinOp>& ops,
                                       const std::vector<int>& central,
                                       double block_rel_tol) {
  CentralSplit cs;
  const std::size_t n = ops[0].rows();
  CMat hmix = CMat::Zero(n, n);
  for (std::size_t k = 0; k < central.size(); ++k) {
    double scale = std::max(ops[central[k]].cwiseAbs().maxCoeff(), 1e-300);
    hmix += (std::pow(0.61803398875, double(k)) / scale) * ops[central[k]];
  }
  Eigen::SelfAdjointEigenSolver<CMat> es((hmix + hmix.adjoint()) / 2.0);
  cs.basis = es.eigenvectors();

  // joint eigenvalues of the central ops; they must be diagonal in this basis
  cs.lambda.resize(central.size(), n);
  for (std::size_t k = 0; k < central.size(); ++k) {
    CMat t = cs.basis.adjoint() * ops[central[k]] * cs.basis;
    double scale = std::max(t.norm(), 1e-300);
    CMat off = t;
    off.diagonal().setZero();
    if (off.norm() > block_rel_tol * scale) return cs;  // not jointly diagonal
    for (std::size_t i = 0; i < n; ++i) cs.lambda(k, i) = t(i, i).real();
  }

  // group contiguous columns with equal eigenvalue tuples
  std::vector<double> tol(central.size());
  for (std::size_t k = 0; k < central.size(); ++k)
    tol[k] = 1e-7 * std::max(cs.lambda.row(k).cwiseAbs().maxCoeff(), 1.0);
  cs.blocks.push_back({0});
  for (std::size_t i = 1; i < n; ++i) {
    int head = cs.blocks.back().front();
    bool same = true;
    for (std::size_t k = 0; k < central.size(); ++k)
      if (std::abs(cs.lambda(k, i) - cs.lambda(k, head)) > tol[k]) same = false;
    if (same) cs.blocks.back().push_back(static_cast<int>(i));
    else cs.blocks.push_back({static_cast<int>(i)});
  }

  // non-central ops must be block diagonal with respect to the grouping
  for (std::size_t j = 0; j < ops.size(); ++j) {
    if (std::find(central.begin(), central.end(), static_cast<int>(j)) != central.end())
      continue;
    CMat t = cs.basis.adjoint() * ops[j] * cs.basis;
    CMat blockdiag = CMat::Zero(n, n);
    std::vector<CMat> sub;
    for (const auto& b : cs.blocks) {
      CMat s(b.size(), b.size());
      for (std::size_t r = 0; r < b.size(); ++r)
        for (std::size_t c = 0; c < b.size(); ++c) {
          s(r, c) = t(b[r], b[c]);
          blockdiag(b[r], b[c]) = s(r, c);
        }
      sub.push_back(std::move(s));
    }
    double scale = std::max(t.norm(), 1e-300);
    if ((t - blockdiag).norm() > block_rel_tol * scale) return cs;
    cs.tr.push_back(std::move(sub));
  }
  cs.ok = true;
  return cs;
}

inline CMat hermitian_exp_i(const CMat& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es((h + h.adjoint()) / 2.0);
  CVec ph = (Complex(0, 1) * es.eigenvalues().array()).exp();
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Relative convolution operator
///   K = (2 pi)^{-N/2} * sum_x w_x khat(x) exp(i sum_j x_j X_j),
/// khat the symmetric-normalized transform of k, trapezoid weights on the
/// conjugate grid of the kernel grid.
inline AssembleResult assemble(const std::vector<LinOp>& ops, const GridFunction& k,
                               const AssembleOptions& opt = {}) {
  int nops = static_cast<int>(ops.size());
  if (nops == 0) throw std::invalid_argument("assemble: empty frame");
  if (k.grid.dim() != nops)
    throw std::invalid_argument("assemble: kernel dimension != number of operators");
  const std::size_t n = ops[0].rows();
  for (const auto& o : ops)
    if (o.rows() != static_cast<Eigen::Index>(n) || o.cols() != static_cast<Eigen::Index>(n))
      throw std::invalid_argument("assemble: operator dimensions differ");

  AssembleResult res;
  double kmax = k.values.cwiseAbs().maxCoeff();
  res.boundary_level = kmax > 0 ? boundary_max(k) / kmax : 0.0;
  res.truncated = res.boundary_level > opt.boundary_tol;

  GridFunction khat = fourier_forward(k);
  const Grid& qg = khat.grid;
  double pref = std::pow(2 * M_PI, -0.5 * nops);

  std::vector<int> central;
  if (opt.central_split) central = detail::central_indices(ops, opt.commute_rel_tol);

  if (!central.empty()) {
    auto cs = detail::make_central_split(ops, central, opt.block_rel_tol);
    if (cs.ok) {
      std::vector<int> ra;  // axes of non-central ops, in frame order
      for (int a = 0; a < nops; ++a)
        if (std::find(central.begin(), central.end(), a) == central.end())
          ra.push_back(a);

      // strides for flat addressing of khat
      std::vector<std::size_t> stride(nops, 1);
      for (int a = nops - 2; a >= 0; --a)
        stride[a] = stride[a + 1] * qg.axis(a + 1).count;

      // enumerate the central sub-grid: flat offsets, weights, coordinates
      std::size_t nca = 1;
      for (int c : central) nca *= qg.axis(c).count;
      std::vector<std::size_t> ca_off(nca);
      std::vector<double> ca_w(nca);
      RMat ca_q(central.size(), nca);
      for (std::size_t t = 0; t < nca; ++t) {
        std::size_t rem = t, off = 0;
        double w = 1;
        for (int ci = static_cast<int>(central.size()) - 1; ci >= 0; --ci) {
          int axis = central[ci];
          int idx = static_cast<int>(rem % qg.axis(axis).count);
          rem /= qg.axis(axis).count;
          off += idx * stride[axis];
          w *= qg.trap_weight(axis, idx);
          ca_q(ci, t) = qg.point(axis, idx);
        }
        ca_off[t] = off;
        ca_w[t] = w;
      }

      // phase table: per block, per central point
      std::size_t nblocks = cs.blocks.size();
      std::vector<CVec> phase(nblocks, CVec(nca));
      for (std::size_t b = 0; b < nblocks; ++b) {
        int head = cs.blocks[b].front();
        for (std::size_t t = 0; t < nca; ++t) {
          double arg = 0;
          for (std::size_t ci = 0; ci < central.size(); ++ci)
            arg += ca_q(ci, t) * cs.lambda(ci, head);
          phase[b](t) = ca_w[t] * std::exp(Complex(0, arg));
        }
      }

      std::vector<CMat> acc;
      for (const auto& b : cs.blocks) acc.push_back(CMat::Zero(b.size(), b.size()));

      std::size_t nra = 1;
      for (int a : ra) nra *= qg.axis(a).count;
      for (std::size_t t = 0; t < nra; ++t) {
        std::size_t rem = t, off = 0;
        double w = 1;
        RVec qr(ra.size());
        for (int ri = static_cast<int>(ra.size()) - 1; ri >= 0; --ri) {
          int axis = ra[ri];
          int idx = static_cast<int>(rem % qg.axis(axis).count);
          rem /= qg.axis(axis).count;
          off += idx * stride[axis];
          w *= qg.trap_weight(axis, idx);
          qr(ri) = qg.point(axis, idx);
        }
        for (std::size_t b = 0; b < nblocks; ++b) {
          Complex d = 0;
          for (std::size_t c = 0; c < nca; ++c)
            d += phase[b](c) * khat.values(ca_off[c] + off);
          if (ra.empty()) {
            acc[b] += (w * d) * CMat::Identity(acc[b].rows(), acc[b].cols());
            continue;
          }
          std::size_t bs = cs.blocks[b].size();
          CMat hb = CMat::Zero(bs, bs);
          for (std::size_t ri = 0; ri < ra.size(); ++ri) hb += qr(ri) * cs.tr[ri][b];
          acc[b] += (w * d) * detail::hermitian_exp_i(hb);
        }
      }

      CMat kt = CMat::Zero(n, n);
      for (std::size_t b = 0; b < nblocks; ++b)
        for (std::size_t r = 0; r < cs.blocks[b].size(); ++r)
          for (std::size_t c = 0; c < cs.blocks[b].size(); ++c)
            kt(cs.blocks[b][r], cs.blocks[b][c]) = acc[b](r, c);
      res.op = pref * (cs.basis * kt * cs.basis.adjoint());
      return res;
    }
  }

  // plain path
  CMat out = CMat::Zero(n, n);
  CMat h(n, n);
  for (std::size_t i = 0; i < qg.size(); ++i) {
    Complex kv = khat.values(i);
    if (std::abs(kv) == 0.0) continue;
    RVec q = qg.coords(i);
    h.setZero();
    for (int j = 0; j < nops; ++j) h += q(j) * ops[j];
    out += (qg.trap_weight(i) * kv) * detail::hermitian_exp_i(h);
  }
  res.op = pref * out;
  return res;
}

/// Axes that any iterated bracket can touch; the remaining coordinates of
/// bch(-y, x) equal x - y exactly.
inline std::vector<bool> bracket_support(const LieAlgebra& alg) {
  int n = alg.dim();
  std::vector<RVec> gen;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      RVec b = alg.bracket_coeffs(RVec::Unit(n, i), RVec::Unit(n, j));
      if (b.norm() > 0) gen.push_back(b);
    }
  RMat span(n, gen.size());
  for (std::size_t k = 0; k < gen.size(); ++k) span.col(k) = gen[k];
  RMat w = detail::orthonormal_span(span);
  for (int iter = 0; iter < n; ++iter) {
    std::vector<RVec> more;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < w.cols(); ++j)
        more.push_back(alg.bracket_coeffs(RVec::Unit(n, i), w.col(j)));
    RMat all(n, w.cols() + more.size());
    all.leftCols(w.cols()) = w;
    for (std::size_t k = 0; k < more.size(); ++k) all.col(w.cols() + k) = more[k];
    RMat w2 = detail::orthonormal_span(all);
    if (w2.cols() == w.cols()) break;
    w = w2;
  }
  std::vector<bool> touched(n, false);
  for (int a = 0; a < n; ++a)
    if (w.cols() > 0 && w.row(a).cwiseAbs().maxCoeff() > 1e-12) touched[a] = true;
  return touched;
}

/// Kernel of the composed operator of two relative convolutions:
///   (k2 * k1)(x) = (2 pi)^{-N/2} int k2(y) k1(CH[-y, x]) dy
/// by trapezoid quadrature; off-grid values of k1 from its band-limited
/// (trigonometric) representation, zero outside the grid box.
inline GridFunction compose_kernels(const AlgebraPtr& alg, const GridFunction& k2,
                                    const GridFunction& k1, int order) {
  if (order < 1) throw std::invalid_argument("compose_kernels: order must be >= 1");
  if (!(k2.grid == k1.grid))
    throw std::invalid_argument("compose_kernels: kernels on different grids");
  const Grid& g = k1.grid;
  int n = alg->dim();
  if (g.dim() != n)
    throw std::invalid_argument("compose_kernels: grid dimension != algebra dimension");

  GridFunction k1hat = fourier_forward(k1);
  const Grid& qg = k1hat.grid;

  std::vector<bool> touched = bracket_support(*alg);
  std::vector<int> clean, dirty;
  for (int a = 0; a < n; ++a) (touched[a] ? dirty : clean).push_back(a);

  std::vector<std::size_t> gstride(n, 1), qstride(n, 1);
  for (int a = n - 2; a >= 0; --a) {
    gstride[a] = gstride[a + 1] * g.axis(a + 1).count;
    qstride[a] = qstride[a + 1] * qg.axis(a + 1).count;
  }

  auto subgrid_size = [&](const std::vector<int>& axes) {
    std::size_t s = 1;
    for (int a : axes) s *= g.axis(a).count;
    return s;
  };
  std::size_t n_clean = subgrid_size(clean), n_dirty = subgrid_size(dirty);
  std::size_t nq_dirty = 1;
  for (int a : dirty) nq_dirty *= qg.axis(a).count;

  // decompose a sub-grid counter into per-axis indices
  auto decompose = [&](std::size_t t, const std::vector<int>& axes, const Grid& gr,
                       std::vector<int>& idx) {
    for (int i = static_cast<int>(axes.size()) - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(t % gr.axis(axes[i]).count);
      t /= gr.axis(axes[i]).count;
    }
  };

  double pref = std::pow(2 * M_PI, -0.5 * n);
  CVec out = CVec::Zero(g.size());
  RVec xv(n), yv(n);
  std::vector<int> xa(clean.size()), ya(clean.size());
  std::vector<int> xd(dirty.size()), yd(dirty.size());

  // dirty-axes mode offsets (compact enumeration of q-submodes)
  std::vector<std::size_t> qd_off(nq_dirty);
  {
    std::vector<int> mi(dirty.size());
    for (std::size_t t = 0; t < nq_dirty; ++t) {
      decompose(t, dirty, qg, mi);
      std::size_t off = 0;
      for (std::size_t i = 0; i < dirty.size(); ++i) off += mi[i] * qstride[dirty[i]];
      qd_off[t] = off;
    }
  }

  for (std::size_t tx = 0; tx < n_clean; ++tx) {
    decompose(tx, clean, g, xa);
    for (std::size_t ty = 0; ty < n_clean; ++ty) {
      decompose(ty, clean, g, ya);
      bool inside = true;
      for (std::size_t i = 0; i < clean.size(); ++i) {
        double p = g.point(clean[i], xa[i]) - g.point(clean[i], ya[i]);
        if (p < g.axis(clean[i]).lo - 1e-9 || p > g.axis(clean[i]).hi + 1e-9)
          inside = false;
      }
      if (!inside) continue;

      // contract clean-axis modes of k1hat at displacement x_clean - y_clean
      CVec coef = CVec::Zero(nq_dirty);
      {
        // per-axis twiddles for clean axes
        std::vector<std::vector<Complex>> tw(clean.size());
        for (std::size_t i = 0; i < clean.size(); ++i) {
          int a = clean[i];
          double p = g.point(a, xa[i]) - g.point(a, ya[i]);
          int m = qg.axis(a).count;
          tw[i].resize(m);
          Complex step = std::exp(Complex(0, qg.spacing(a) * p));
          Complex cur = std::exp(Complex(0, qg.point(a, 0) * p));
          for (int r = 0; r < m; ++r) {
            tw[i][r] = cur;
            cur *= step;
          }
        }
        std::vector<int> mi(n);
        for (std::size_t f = 0; f < qg.size(); ++f) {
          std::size_t rem = f;
          for (int a = n - 1; a >= 0; --a) {
            mi[a] = static_cast<int>(rem % qg.axis(a).count);
            rem /= qg.axis(a).count;
          }
          Complex v = k1hat.values(f);
          for (std::size_t i = 0; i < clean.size(); ++i) {
            int a = clean[i];
            v *= tw[i][mi[a]] * qg.trap_weight(a, mi[a]);
          }
          std::size_t td = 0;
          for (std::size_t i = 0; i < dirty.size(); ++i)
            td = td * qg.axis(dirty[i]).count + mi[dirty[i]];
          coef(td) += v;
        }
      }

      for (std::size_t sx = 0; sx < n_dirty; ++sx) {
        decompose(sx, dirty, g, xd);
        std::size_t xflat = 0;
        for (std::size_t i = 0; i < clean.size(); ++i) xflat += xa[i] * gstride[clean[i]];
        for (std::size_t i = 0; i < dirty.size(); ++i) xflat += xd[i] * gstride[dirty[i]];
        for (std::size_t i = 0; i < clean.size(); ++i) xv(clean[i]) = g.point(clean[i], xa[i]);
        for (std::size_t i = 0; i < dirty.size(); ++i) xv(dirty[i]) = g.point(dirty[i], xd[i]);

        for (std::size_t sy = 0; sy < n_dirty; ++sy) {
          decompose(sy, dirty, g, yd);
          std::size_t yflat = 0;
          for (std::size_t i = 0; i < clean.size(); ++i) yflat += ya[i] * gstride[clean[i]];
          for (std::size_t i = 0; i < dirty.size(); ++i) yflat += yd[i] * gstride[dirty[i]];
          Complex k2v = k2.values(yflat);
          if (std::abs(k2v) == 0.0) continue;
          for (std::size_t i = 0; i < clean.size(); ++i) yv(clean[i]) = g.point(clean[i], ya[i]);
          for (std::size_t i = 0; i < dirty.size(); ++i) yv(dirty[i]) = g.point(dirty[i], yd[i]);

          RVec z = bch_coeffs(*alg, RVec(-yv), xv, order);
          bool ok = true;
          for (std::size_t i = 0; i < dirty.size() && ok; ++i) {
            int a = dirty[i];
            if (z(a) < g.axis(a).lo - 1e-9 || z(a) > g.axis(a).hi + 1e-9) ok = false;
          }
          if (!ok) continue;

          // evaluate dirty-mode sum at z
          Complex val = 0;
          if (dirty.empty()) {
            val = coef(0);
          } else {
            std::vector<std::vector<Complex>> twd(dirty.size());
            for (std::size_t i = 0; i < dirty.size(); ++i) {
              int a = dirty[i];
              int m = qg.axis(a).count;
              twd[i].resize(m);
              Complex step = std::exp(Complex(0, qg.spacing(a) * z(a)));
              Complex cur = std::exp(Complex(0, qg.point(a, 0) * z(a)));
              for (int r = 0; r < m; ++r) {
                twd[i][r] = cur;
                cur *= step;
              }
            }
            std::vector<int> mi(dirty.size());
            for (std::size_t t = 0; t < nq_dirty; ++t) {
              std::size_t rem = t;
              Complex tv = coef(t);
              for (int i = static_cast<int>(dirty.size()) - 1; i >= 0; --i) {
                int c = static_cast<int>(rem % qg.axis(dirty[i]).count);
                rem /= qg.axis(dirty[i]).count;
                tv *= twd[i][c] * qg.trap_weight(dirty[i], c);
              }
              val += tv;
            }
          }
          val *= pref;  // inverse-transform normalization: k1 at z

          double wy = 1;
          for (std::size_t i = 0; i < clean.size(); ++i)
            wy *= g.trap_weight(clean[i], ya[i]);
          for (std::size_t i = 0; i < dirty.size(); ++i)
            wy *= g.trap_weight(dirty[i], yd[i]);
          out(xflat) += pref * wy * k2v * val;
        }
      }
    }
  }
  return GridFunction(g, std::move(out));
}

/// Marginal reduction of the kernel onto the quotient frame when the leading
/// m coordinates span the kernel ideal:
///   khat'(x'') = (2 pi)^{-m/2} int khat(x', x'') dx'.
inline GridFunction effective_decompose(const AlgebraPtr& alg, const Ideal& ker,
                                        const GridFunction& k) {
  if (ker.algebra.get() != alg.get())
    throw std::invalid_argument("effective_decompose: ideal from different algebra");
  int n = alg->dim();
  if (k.grid.dim() != n)
    throw std::invalid_argument("effective_decompose: kernel dimension mismatch");
  RMat onb = ker.orthonormal_basis();
  int m = static_cast<int>(onb.cols());
  if (m == 0) return k;
  // ideal must be spanned by the leading coordinates
  for (int r = m; r < n; ++r)
    if (onb.row(r).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument(
          "effective_decompose: kernel ideal not aligned with leading coordinates");

  GridFunction khat = fourier_forward(k);
  const Grid& qg = khat.grid;
  std::vector<Axis> tail_axes(qg.axes().begin() + m, qg.axes().end());
  Grid tail(tail_axes, SIZE_MAX);
  std::size_t head_n = 1;
  for (int a = 0; a < m; ++a) head_n *= qg.axis(a).count;
  std::size_t tail_n = tail.size();

  CVec hv = CVec::Zero(tail_n);
  for (std::size_t h = 0; h < head_n; ++h) {
    double w = 1;
    std::size_t rem = h;
    for (int a = m - 1; a >= 0; --a) {
      int idx = static_cast<int>(rem % qg.axis(a).count);
      rem /= qg.axis(a).count;
      w *= qg.trap_weight(a, idx);
    }
    for (std::size_t t = 0; t < tail_n; ++t) hv(t) += w * khat.values(h * tail_n + t);
  }
  hv *= std::pow(2 * M_PI, -0.5 * m);

  std::vector<Axis> out_axes(k.grid.axes().begin() + m, k.grid.axes().end());
  Grid out_grid(out_axes, SIZE_MAX);
  return fourier_inverse(GridFunction(tail, std::move(hv)), out_grid);
}

/// Jacobian-weighted pullback of a kernel through a linear algebra
/// automorphism: (Psi k)(x) = k(psi x) |det psi|^{1/2}.
inline GridFunction push_automorphism(const AlgebraPtr& alg, const RMat& psi,
                                      const GridFunction& k) {
  int n = alg->dim();
  if (psi.rows() != n || psi.cols() != n)
    throw std::invalid_argument("push_automorphism: map has wrong shape");
  if (k.grid.dim() != n)
    throw std::invalid_argument("push_automorphism: kernel dimension mismatch");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      RVec lhs = psi * alg->bracket_coeffs(RVec::Unit(n, i), RVec::Unit(n, j));
      RVec rhs = alg->bracket_coeffs(psi.col(i), psi.col(j));
      if ((lhs - rhs).norm() > 1e-10 * std::max(1.0, rhs.norm()))
        throw validation_error("push_automorphism: bracket [" + alg->names()[i] +
                               ", " + alg->names()[j] + "] is not preserved");
    }
  double jac = std::sqrt(std::abs(psi.determinant()));
  TrigEvaluator eval(k);
  CVec out(k.grid.size());
  for (std::size_t i = 0; i < k.grid.size(); ++i)
    out(i) = jac * eval(RVec(psi * k.grid.coords(i)));
  return GridFunction(k.grid, std::move(out));
}

}  // namespace liecv
