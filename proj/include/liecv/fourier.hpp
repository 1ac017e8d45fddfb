#pragma once

#include <cmath>
#include <vector>

#include "liecv/grid.hpp"
#include "liecv/types.hpp"

namespace liecv {

namespace detail {

/// Apply a per-axis transform matrix T (out_count x in_count) along `axis`
/// of a row-major tensor with the given axis counts.
inline CVec apply_axis(const CVec& v, const std::vector<int>& counts, int axis,
                       const CMat& T) {
  int d = static_cast<int>(counts.size());
  std::size_t inner = 1, outer = 1;
  for (int a = axis + 1; a < d; ++a) inner *= counts[a];
  for (int a = 0; a < axis; ++a) outer *= counts[a];
  int in_n = counts[axis];
  int out_n = static_cast<int>(T.rows());
  std::size_t out_size = outer * out_n * inner;
  CVec r = CVec::Zero(out_size);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t in = 0; in < inner; ++in) {
      for (int m = 0; m < out_n; ++m) {
        Complex s = 0;
        for (int j = 0; j < in_n; ++j)
          s += T(m, j) * v((o * in_n + j) * inner + in);
        r((o * out_n + m) * inner + in) = s;
      }
    }
  return r;
}

}  // namespace detail

/// Continuous-normalization Fourier transform of grid samples,
/// khat(q) = (2pi)^{-N/2} * sum_j h * k(y_j) * exp(-i q . y_j),
/// evaluated on the conjugate grid. Exact inverse of fourier_inverse.
inline GridFunction fourier_forward(const GridFunction& k) {
  const Grid& g = k.grid;
  Grid cg = g.conjugate(SIZE_MAX);
  std::vector<int> counts(g.dim());
  for (int a = 0; a < g.dim(); ++a) counts[a] = g.axis(a).count;
  CVec v = k.values;
  for (int a = 0; a < g.dim(); ++a) {
    int m = g.axis(a).count;
    CMat T(m, m);
    double h = g.spacing(a);
    for (int q = 0; q < m; ++q)
      for (int j = 0; j < m; ++j)
        T(q, j) = std::exp(Complex(0, -cg.point(a, q) * g.point(a, j))) * h /
                  std::sqrt(2 * M_PI);
    v = detail::apply_axis(v, counts, a, T);
  }
  return GridFunction(cg, std::move(v));
}

/// Inverse transform onto `target`: k(y) = (2pi)^{-N/2} sum_m dq khat(q_m) e^{+i q_m . y}.
/// With target = the grid whose conjugate carries khat, the round trip is exact.
inline GridFunction fourier_inverse(const GridFunction& khat, const Grid& target) {
  const Grid& cg = khat.grid;
  if (cg.dim() != target.dim())
    throw std::invalid_argument("fourier_inverse: dimension mismatch");
  std::vector<int> counts(cg.dim());
  for (int a = 0; a < cg.dim(); ++a) counts[a] = cg.axis(a).count;
  CVec v = khat.values;
  for (int a = 0; a < cg.dim(); ++a) {
    int mq = cg.axis(a).count, mj = target.axis(a).count;
    CMat T(mj, mq);
    double dq = cg.spacing(a);
    for (int j = 0; j < mj; ++j)
      for (int q = 0; q < mq; ++q)
        T(j, q) = std::exp(Complex(0, cg.point(a, q) * target.point(a, j))) * dq /
                  std::sqrt(2 * M_PI);
    v = detail::apply_axis(v, counts, a, T);
    counts[a] = mj;
  }
  return GridFunction(target, std::move(v));
}

/// Signature of the spec's transform: sign -1 forward, +1 inverse-style
/// (the inverse lands on the conjugate grid of the input).
inline GridFunction fourier(const GridFunction& k, int sign) {
  if (sign == -1) return fourier_forward(k);
  return fourier_inverse(k, k.grid.conjugate(SIZE_MAX));
}

/// Band-limited off-grid evaluation of a GridFunction: the inverse-transform
/// quadrature of its forward transform evaluated at an arbitrary point.
/// Exact at grid nodes; spectrally accurate between them for decayed samples.
class TrigEvaluator {
 public:
  explicit TrigEvaluator(const GridFunction& f)
      : grid_(f.grid), hat_(fourier_forward(f)) {
    for (int a = 0; a < grid_.dim(); ++a) counts_.push_back(grid_.axis(a).count);
  }

  /// f(p); returns 0 outside the grid box (zero extension).
  Complex operator()(const RVec& p) const {
    if (!grid_.contains(p, 1e-9)) return 0;
    const Grid& cg = hat_.grid;
    int d = cg.dim();
    // per-axis twiddles e^{i q_m p_a}, built from one exp per axis
    std::vector<std::vector<Complex>> tw(d);
    double norm = std::pow(2 * M_PI, -0.5 * d);
    for (int a = 0; a < d; ++a) {
      int m = counts_[a];
      tw[a].resize(m);
      Complex step = std::exp(Complex(0, cg.spacing(a) * p(a)));
      Complex cur = std::exp(Complex(0, cg.point(a, 0) * p(a))) * cg.spacing(a);
      for (int i = 0; i < m; ++i) {
        tw[a][i] = cur;
        cur *= step;
      }
    }
    // contract last axis innermost
    Complex s = 0;
    std::vector<int> idx(d, 0);
    std::size_t n = cg.size();
    for (std::size_t f = 0; f < n; ++f) {
      Complex t = hat_.values(f);
      std::size_t rem = f;
      for (int a = d - 1; a >= 0; --a) {
        t *= tw[a][rem % counts_[a]];
        rem /= counts_[a];
      }
      s += t;
    }
    return s * norm;
  }

  const GridFunction& hat() const { return hat_; }

 private:
  Grid grid_;
  GridFunction hat_;
  std::vector<int> counts_;
};

}  // namespace liecv
