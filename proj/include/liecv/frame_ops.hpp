#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "liecv/grid.hpp"
#include "liecv/types.hpp"

namespace liecv {

/// Tagged description of one frame operator on a grid space.
struct FrameSpec {
  enum class Kind {
    Multiplication,    // coordinate multiplication on one axis
    Momentum,          // (1/i) d/d(axis), spectral
    HeisenbergLeft,    // h_n invariant field, index 0..2n on a (2n+1)-dim grid
    HeisenbergRight,
    FockField,         // Fock frame on a 2n-dim grid (ground-state transformed)
    IdentityMultiple,
  };
  Kind kind;
  int index = 0;       // axis (Multiplication/Momentum) or field index
  bool primed = true;  // FockField variant
  double scale = 1.0;

  static FrameSpec multiplication(int axis, double scale = 1.0) {
    return {Kind::Multiplication, axis, true, scale};
  }
  static FrameSpec momentum(int axis, double scale = 1.0) {
    return {Kind::Momentum, axis, true, scale};
  }
  static FrameSpec heisenberg_left(int index, double scale = 1.0) {
    return {Kind::HeisenbergLeft, index, true, scale};
  }
  static FrameSpec heisenberg_right(int index, double scale = 1.0) {
    return {Kind::HeisenbergRight, index, true, scale};
  }
  static FrameSpec fock_field(int index, bool primed, double scale = 1.0) {
    return {Kind::FockField, index, primed, scale};
  }
  static FrameSpec identity_multiple(double scale) {
    return {Kind::IdentityMultiple, 0, true, scale};
  }
};

namespace detail {

inline CMat dft_unitary(int m) {
  CMat F(m, m);
  for (int r = 0; r < m; ++r)
    for (int j = 0; j < m; ++j)
      F(r, j) = std::exp(Complex(0, -2.0 * M_PI * r * j / m)) / std::sqrt(double(m));
  return F;
}

/// 1-D spectral momentum (1/i) d/dy on the periodic extension; Hermitian.
inline CMat momentum_axis(int m, double h) {
  double L = m * h;
  CMat F = dft_unitary(m);
  RVec w(m);
  for (int r = 0; r < m; ++r) {
    int k = (r < (m + 1) / 2) ? r : r - m;
    w(r) = 2.0 * M_PI * k / L;
  }
  return F.adjoint() * w.asDiagonal() * F;
}

inline CMat coordinate_axis(const Grid& g, int axis) {
  int m = g.axis(axis).count;
  CVec d(m);
  for (int i = 0; i < m; ++i) d(i) = g.point(axis, i);
  return CMat(d.asDiagonal());
}

/// Kronecker placement of 1-D operators on distinct axes (identity elsewhere).
inline CMat place(const Grid& g, const std::vector<std::pair<int, CMat>>& factors) {
  int d = g.dim();
  std::size_t n = g.size();
  std::vector<const CMat*> fac(d, nullptr);
  for (const auto& [axis, m] : factors) {
    if (axis < 0 || axis >= d) throw std::invalid_argument("place: axis out of range");
    if (fac[axis]) throw std::invalid_argument("place: duplicate axis");
    fac[axis] = &m;
  }
  CMat r(n, n);
  std::vector<int> ii(d), jj(d);
  for (std::size_t i = 0; i < n; ++i) {
    auto iv = g.unflatten(i);
    for (std::size_t j = 0; j < n; ++j) {
      auto jv = g.unflatten(j);
      Complex v = 1.0;
      for (int a = 0; a < d && v != 0.0; ++a) {
        if (fac[a]) v *= (*fac[a])(iv[a], jv[a]);
        else if (iv[a] != jv[a]) v = 0.0;
      }
      r(i, j) = v;
    }
  }
  return r;
}

}  // namespace detail

/// Dense Hermitian realization of a frame operator on the given grid.
///
/// The Heisenberg fields follow the exponential-coordinate convention
///   left:  L0 = P0,  L_j = P_j - y_{j+n} P0 / 2,  L_{j+n} = P_{j+n} + y_j P0 / 2
///   right: R_j = -(mirror)
/// so that i[A,B] realizes the algebra bracket and flows compose by the group law;
/// in particular right(0) = -left(0) and left/right commute exactly.
inline LinOp frame_operator(const FrameSpec& spec, const Grid& grid) {
  using K = FrameSpec::Kind;
  std::size_t n = grid.size();
  int d = grid.dim();
  CMat op;
  switch (spec.kind) {
    case K::Multiplication: {
      if (spec.index < 0 || spec.index >= d)
        throw std::invalid_argument("frame_operator: axis out of range");
      op = detail::place(grid, {{spec.index, detail::coordinate_axis(grid, spec.index)}});
      break;
    }
    case K::Momentum: {
      if (spec.index < 0 || spec.index >= d)
        throw std::invalid_argument("frame_operator: axis out of range");
      CMat p = detail::momentum_axis(grid.axis(spec.index).count, grid.spacing(spec.index));
      op = detail::place(grid, {{spec.index, p}});
      break;
    }
    case K::HeisenbergLeft:
    case K::HeisenbergRight: {
      if (d % 2 == 0 || d < 3)
        throw std::invalid_argument("heisenberg field: grid dim must be 2n+1, n >= 1");
      int hn = (d - 1) / 2;
      int j = spec.index;
      if (j < 0 || j > 2 * hn)
        throw std::invalid_argument("heisenberg field: index out of range");
      double sgn = (spec.kind == K::HeisenbergLeft) ? 1.0 : -1.0;
      CMat p0 = detail::momentum_axis(grid.axis(0).count, grid.spacing(0));
      if (j == 0) {
        op = sgn * detail::place(grid, {{0, p0}});
      } else {
        int partner = (j <= hn) ? j + hn : j - hn;
        double half = (j <= hn) ? -0.5 : 0.5;
        CMat pj = detail::momentum_axis(grid.axis(j).count, grid.spacing(j));
        op = sgn * detail::place(grid, {{j, pj}}) +
             half * detail::place(grid, {{partner, detail::coordinate_axis(grid, partner)},
                                         {0, p0}});
      }
      break;
    }
    case K::FockField: {
      if (d % 2 != 0) throw std::invalid_argument("fock field: grid dim must be 2n");
      int fn = d / 2;
      int j = spec.index;
      if (j < 1 || j > fn) throw std::invalid_argument("fock field: index out of range");
      int re_axis = j - 1, im_axis = fn + j - 1;
      CMat pre = detail::momentum_axis(grid.axis(re_axis).count, grid.spacing(re_axis));
      CMat pim = detail::momentum_axis(grid.axis(im_axis).count, grid.spacing(im_axis));
      if (spec.primed)
        op = detail::place(grid, {{re_axis, pre}}) +
             detail::place(grid, {{im_axis, detail::coordinate_axis(grid, im_axis)}});
      else
        op = detail::place(grid, {{im_axis, pim}}) -
             detail::place(grid, {{re_axis, detail::coordinate_axis(grid, re_axis)}});
      break;
    }
    case K::IdentityMultiple:
      op = CMat::Identity(n, n);
      break;
  }
  if (spec.scale != 1.0) op *= spec.scale;
  return op;
}

inline std::vector<LinOp> frame_operators(const std::vector<FrameSpec>& specs,
                                          const Grid& grid) {
  std::vector<LinOp> ops;
  ops.reserve(specs.size());
  for (const auto& s : specs) ops.push_back(frame_operator(s, grid));
  return ops;
}

/// Bracket realized on Hermitian matrices: i(AB - BA). With the conventions of
/// frame_operator, frame matrices reproduce their algebra's structure constants
/// under this bracket on well-resolved states.
inline CMat algebra_bracket(const CMat& a, const CMat& b) {
  return Complex(0, 1) * (a * b - b * a);
}

inline double hermiticity_residual(const CMat& h) {
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

/// Unitary flow exp(i sum_j coeffs_j ops_j) via Hermitian eigendecomposition.
inline LinOp flow(const std::vector<LinOp>& ops, const RVec& coeffs) {
  if (ops.empty()) throw std::invalid_argument("flow: no operators");
  if (static_cast<int>(ops.size()) != coeffs.size())
    throw std::invalid_argument("flow: coefficient count mismatch");
  CMat h = CMat::Zero(ops[0].rows(), ops[0].cols());
  for (std::size_t j = 0; j < ops.size(); ++j) {
    if (ops[j].rows() != h.rows() || ops[j].cols() != h.cols())
      throw std::invalid_argument("flow: operator dimensions differ");
    h += coeffs(j) * ops[j];
  }
  double res = hermiticity_residual(h);
  double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (res > 1e-8 * scale)
    throw validation_error("flow: sum is not Hermitian (residual " +
                           std::to_string(res) + ")");
  Eigen::SelfAdjointEigenSolver<CMat> es((h + h.adjoint()) / 2.0);
  CVec phases = (Complex(0, 1) * es.eigenvalues().array()).exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Gaussian window centered on the grid box, scaled so the squared window is
/// below `floor` outside the inner `frac` of each axis. Used to restrict
/// spectral identities to the subspace where the discretization is faithful.
inline RVec gaussian_taper(const Grid& g, double frac = 0.6, double floor_ = 1e-10) {
  std::size_t n = g.size();
  RVec w(n);
  int d = g.dim();
  std::vector<double> c(d), sig(d);
  for (int a = 0; a < d; ++a) {
    c[a] = 0.5 * (g.axis(a).lo + g.axis(a).hi);
    double r = 0.5 * frac * (g.axis(a).hi - g.axis(a).lo);
    sig[a] = r / std::sqrt(std::log(1.0 / floor_));
  }
  for (std::size_t i = 0; i < n; ++i) {
    RVec p = g.coords(i);
    double s = 0;
    for (int a = 0; a < d; ++a) {
      double t = (p(a) - c[a]) / sig[a];
      s += 0.5 * t * t;
    }
    w(i) = std::exp(-s);
  }
  return w;
}

/// Spectral (2-)norm by power iteration with a deterministic start vector.
inline double operator_norm(const CMat& a, int iters = 120) {
  std::size_t n = a.cols();
  CVec v(n);
  for (std::size_t i = 0; i < n; ++i)
    v(i) = Complex(1.0 + 0.37 * std::sin(0.7 * double(i + 1)),
                   0.21 * std::cos(1.3 * double(i + 1)));
  v /= v.norm();
  double s = 0;
  for (int it = 0; it < iters; ++it) {
    CVec w = a.adjoint() * (a * v);
    double nw = w.norm();
    if (nw < 1e-300) return 0.0;
    s = std::sqrt(nw);
    v = w / nw;
  }
  return s;
}

/// || T D T || / || T A T ||  with T = diag(taper)
inline double tapered_rel_opnorm(const CMat& d, const CMat& a, const RVec& taper) {
  CMat t = taper.cast<Complex>().asDiagonal();
  return operator_norm(CMat(t * d * t)) / operator_norm(CMat(t * a * t));
}

}  // namespace liecv
