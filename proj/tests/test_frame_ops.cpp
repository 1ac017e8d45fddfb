#include <catch2/catch_amalgamated.hpp>

#include "liecv/frame_ops.hpp"
#include "liecv/grid.hpp"
#include "liecv/rng.hpp"

using namespace liecv;

namespace {

CVec tapered_gaussian(const Grid& g, double sigma) {
  CVec v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    RVec p = g.coords(i);
    double r2 = 0;
    for (int a = 0; a < g.dim(); ++a) r2 += p(a) * p(a);
    v(i) = std::exp(-r2 / (2 * sigma * sigma));
  }
  return v / v.norm();
}

}  // namespace

TEST_CASE("coordinate multiplication is diagonal with grid abscissae") {
  Grid g({{16, -2.0, 3.0}});
  CMat m = frame_operator(FrameSpec::multiplication(0), g);
  for (int i = 0; i < 16; ++i) {
    REQUIRE(m(i, i).real() == Catch::Approx(g.point(0, i)));
    REQUIRE(m(i, i).imag() == 0.0);
  }
  REQUIRE((m - CMat(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("momentum operator is Hermitian and spectrally exact") {
  Grid g({{32, -4.0, 4.0}});
  CMat p = frame_operator(FrameSpec::momentum(0), g);
  REQUIRE(hermiticity_residual(p) < 1e-12);

  // exact on a representable grid frequency
  double omega = 3 * 2 * M_PI / (32 * g.spacing(0));
  CVec v(32);
  for (int i = 0; i < 32; ++i) v(i) = std::exp(Complex(0, omega * g.point(0, i)));
  REQUIRE(((p * v) - omega * v).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("heisenberg left fields satisfy the commutation relation on tapered states") {
  Grid g({{8, -4.0, 4.0}, {8, -4.0, 4.0}, {8, -4.0, 4.0}});
  CMat x0 = frame_operator(FrameSpec::heisenberg_left(0), g);
  CMat x1 = frame_operator(FrameSpec::heisenberg_left(1), g);
  CMat x2 = frame_operator(FrameSpec::heisenberg_left(2), g);
  REQUIRE(hermiticity_residual(x0) < 1e-12);
  REQUIRE(hermiticity_residual(x1) < 1e-12);
  REQUIRE(hermiticity_residual(x2) < 1e-12);

  CMat comm = algebra_bracket(x1, x2);
  CVec v = tapered_gaussian(g, 1.2);
  double rel = ((comm - x0) * v).norm() / (x0 * v).norm();
  REQUIRE(rel < 1e-6);

  // the central field commutes with the others exactly
  REQUIRE((x0 * x1 - x1 * x0).cwiseAbs().maxCoeff() < 1e-12);
  REQUIRE((x0 * x2 - x2 * x0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("heisenberg right fields: relations, kernel pair, commutation with left") {
  Grid g({{6, -3.5, 3.5}, {6, -3.5, 3.5}, {6, -3.5, 3.5}});
  std::vector<CMat> l, r;
  for (int j = 0; j < 3; ++j) {
    l.push_back(frame_operator(FrameSpec::heisenberg_left(j), g));
    r.push_back(frame_operator(FrameSpec::heisenberg_right(j), g));
  }
  // Xl0 + Xr0 = 0 exactly: the kernel of the two-sided action
  REQUIRE((l[0] + r[0]).cwiseAbs().maxCoeff() < 1e-14);

  CVec v = tapered_gaussian(g, 1.0);
  double rel = ((algebra_bracket(r[1], r[2]) - r[0]) * v).norm() / (r[0] * v).norm();
  REQUIRE(rel < 1e-6);

  // left and right fields commute on tapered states
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      CMat c = l[a] * r[b] - r[b] * l[a];
      REQUIRE((c * v).norm() < 1e-6 * std::max(1.0, (l[a] * v).norm() * (r[b] * v).norm()));
    }
}

TEST_CASE("flow: zero coefficients give the identity") {
  Grid g({{12, -3.0, 3.0}});
  std::vector<CMat> ops{frame_operator(FrameSpec::multiplication(0), g),
                        frame_operator(FrameSpec::momentum(0), g)};
  CMat u = flow(ops, RVec::Zero(2));
  REQUIRE((u - CMat::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("flow of a multiplication operator is a diagonal phase") {
  Grid g({{20, -2.0, 2.0}});
  std::vector<CMat> ops{frame_operator(FrameSpec::multiplication(0), g)};
  double t = 0.7;
  CMat u = flow(ops, (RVec(1) << t).finished());
  for (int i = 0; i < 20; ++i) {
    REQUIRE(std::abs(u(i, i) - std::exp(Complex(0, t * g.point(0, i)))) < 1e-12);
  }
}

TEST_CASE("flow unitarity and momentum flow shifts band-limited data") {
  Grid g({{96, -10.0, 10.0}});
  std::vector<CMat> ops{frame_operator(FrameSpec::momentum(0), g)};
  double a = 1.3;
  CMat u = flow(ops, (RVec(1) << -a).finished());
  REQUIRE((u.adjoint() * u - CMat::Identity(96, 96)).cwiseAbs().maxCoeff() < 1e-10);

  // e^{-ia P} f = f(y - a) for band-limited f
  CVec f(96), want(96);
  for (int i = 0; i < 96; ++i) {
    double y = g.point(0, i);
    f(i) = std::exp(-y * y / 2);
    want(i) = std::exp(-(y - a) * (y - a) / 2);
  }
  REQUIRE(((u * f) - want).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("flow rejects non-Hermitian sums") {
  CMat bad = CMat::Zero(4, 4);
  bad(0, 1) = 1.0;  // not Hermitian
  REQUIRE_THROWS_AS(flow({bad}, (RVec(1) << 1.0).finished()), validation_error);
}

TEST_CASE("fock fields: commutation relation and commutation with shifts") {
  Grid g({{10, -4.0, 4.0}, {10, -4.0, 4.0}});
  CMat xf1 = frame_operator(FrameSpec::fock_field(1, true), g);
  CMat xf2 = frame_operator(FrameSpec::fock_field(1, false), g);
  REQUIRE(hermiticity_residual(xf1) < 1e-12);
  REQUIRE(hermiticity_residual(xf2) < 1e-12);

  // the shift frame, as combinations of momentum and multiplication
  CMat p0 = frame_operator(FrameSpec::momentum(0), g);
  CMat p1 = frame_operator(FrameSpec::momentum(1), g);
  CMat y0 = frame_operator(FrameSpec::multiplication(0), g);
  CMat y1 = frame_operator(FrameSpec::multiplication(1), g);
  CMat af1 = p0 - y1, af2 = p1 + y0;

  CVec v = tapered_gaussian(g, 1.1);
  for (const CMat* a : {&af1, &af2})
    for (const CMat* x : {&xf1, &xf2}) {
      CMat c = (*a) * (*x) - (*x) * (*a);
      REQUIRE((c * v).norm() < 1e-6);
    }

  // [X', X''] = 2i I on tapered states (so i[X', X''] = -2 I)
  CMat comm = xf1 * xf2 - xf2 * xf1;
  REQUIRE(((comm - Complex(0, 2) * CMat::Identity(100, 100)) * v).norm() < 1e-6);
}

TEST_CASE("identity multiple and scaling") {
  Grid g({{8, 0.0, 1.0}});
  CMat id = frame_operator(FrameSpec::identity_multiple(2.5), g);
  REQUIRE((id - 2.5 * CMat::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);
  CMat p = frame_operator(FrameSpec::momentum(0, 3.0), g);
  CMat p1 = frame_operator(FrameSpec::momentum(0), g);
  REQUIRE((p - 3.0 * p1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("frame_operator rejects incompatible axes") {
  Grid g({{8, 0.0, 1.0}});
  REQUIRE_THROWS_AS(frame_operator(FrameSpec::momentum(1), g), std::invalid_argument);
  REQUIRE_THROWS_AS(frame_operator(FrameSpec::heisenberg_left(0), g),
                    std::invalid_argument);  // needs odd grid dimension >= 3
}
