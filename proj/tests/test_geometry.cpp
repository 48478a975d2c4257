#include "soliton/geometry.hpp"
#include "soliton/verify.hpp"
#include "support/poly_field.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace soliton;
using soliton::fixtures::PolyField;

namespace {

// Christoffel symbols of gbar straight from the metric, by central differences.
double fd_christoffel(const Signature& sig, const ScalarField& phi, const Point& x, std::size_t i,
                      std::size_t j, std::size_t k, double h) {
  auto g = [&](const Point& y, std::size_t a) { return sig[a] / std::pow(phi(y), 2); };
  auto dg = [&](std::size_t a, std::size_t dir) {
    Point p = x, m = x;
    p[static_cast<Eigen::Index>(dir)] += h;
    m[static_cast<Eigen::Index>(dir)] -= h;
    return (g(p, a) - g(m, a)) / (2 * h);
  };
  // metric is diagonal: Gamma^k_ij = 1/(2 g_kk) (d_i g_jk + d_j g_ik - d_k g_ij)
  double s = 0.0;
  if (j == k) s += dg(k, i);
  if (i == k) s += dg(k, j);
  if (i == j) s -= dg(i, k);
  return s / (2.0 * g(x, k));
}

ScalarJet2 linear_jet(double v, std::initializer_list<double> grad) {
  Vector g(static_cast<Eigen::Index>(grad.size()));
  Eigen::Index i = 0;
  for (double e : grad) g[i++] = e;
  return ScalarJet2(v, g, Matrix::Zero(g.size(), g.size()));
}

}  // namespace

TEST(Christoffel, ConstantFactorIsFlat) {
  const Signature sig{1, -1, 1};
  const auto phi = ScalarJet2::constant(3, 2.5);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(conformal_christoffel(sig, phi, i, j, k), 0.0);
}

TEST(Christoffel, HandFixtureAgainstFiniteDifferences) {
  const Signature sig{1, 1};
  const auto phi = linear_jet(2.0, {1.0, 3.0});
  EXPECT_DOUBLE_EQ(conformal_christoffel(sig, phi, 0, 1, 0), -1.5);
  EXPECT_DOUBLE_EQ(conformal_christoffel(sig, phi, 0, 0, 0), -0.5);
  EXPECT_DOUBLE_EQ(conformal_christoffel(sig, phi, 0, 0, 1), 1.5);
  EXPECT_DOUBLE_EQ(conformal_christoffel(sig, phi, 1, 1, 0), 0.5);

  const ScalarField field = [](const Point& x) { return 2.0 + x[0] + 3.0 * x[1]; };
  const Point x = Point::Zero(2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        EXPECT_NEAR(conformal_christoffel(sig, phi, i, j, k), fd_christoffel(sig, field, x, i, j, k, 1e-5),
                    1e-8)
            << i << j << k;
}

TEST(Christoffel, SymmetricInLowerIndices) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const Signature sig = fixtures::random_signature(4, rng);
    const auto phi = fixtures::random_jet(4, rng);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t k = 0; k < 4; ++k)
          EXPECT_EQ(conformal_christoffel(sig, phi, i, j, k), conformal_christoffel(sig, phi, j, i, k));
  }
}

TEST(Christoffel, DegenerateFactorThrows) {
  const Signature sig{1, 1};
  try {
    (void)conformal_christoffel(sig, ScalarJet2::constant(2, 0.0), 0, 0, 0);
    FAIL();
  } catch (const SolitonError& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateConformalFactor);
  }
}

TEST(Ricci, ConstantFactorGivesZero) {
  const Signature sig{1, -1, 1};
  EXPECT_EQ(conformal_ricci(sig, ScalarJet2::constant(3, -3.0)).max_abs(), 0.0);
}

TEST(Ricci, TwoDimensionsIsPureTrace) {
  std::mt19937_64 rng(5);
  const Signature sig{1, -1};
  const auto phi = fixtures::random_jet(2, rng);
  const SymTensor2 ric = conformal_ricci(sig, phi);
  const double lap = sig[0] * phi.hessian(0, 0) + sig[1] * phi.hessian(1, 1);
  const double grad2 = sig.dot(phi.gradient, phi.gradient);
  const double c = (phi.value * lap - grad2) / (phi.value * phi.value);
  EXPECT_NEAR(ric(0, 0), c * sig[0], 1e-14);
  EXPECT_NEAR(ric(1, 1), c * sig[1], 1e-14);
  EXPECT_NEAR(ric(0, 1), 0.0, 1e-14);
}

TEST(Ricci, RoundSphereAtOrigin) {
  // phi = 1 + |x|^2 / 4 in R^3: gbar is the unit sphere, Ric = 2 gbar and gbar = I at 0.
  const Signature sig = Signature::riemannian(3);
  const ScalarField field = [](const Point& x) { return 1.0 + 0.25 * x.squaredNorm(); };
  const Point o = Point::Zero(3);
  const ScalarJet2 phi(1.0, Vector::Zero(3), 0.5 * Matrix::Identity(3, 3));
  const SymTensor2 ric = conformal_ricci(sig, phi);
  const SymTensor2 fd = fd_ricci(sig, field, o, 1e-3);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(ric(i, i), 2.0, 1e-14);
    EXPECT_NEAR(fd(i, i), 2.0, 1e-5);
    for (std::size_t j = i + 1; j < 3; ++j) {
      EXPECT_EQ(ric(i, j), 0.0);
      EXPECT_NEAR(fd(i, j), 0.0, 1e-6);
    }
  }
}

TEST(Ricci, MatchesFiniteDifferenceOracleAtSecondOrder) {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 3);
    const Signature sig = fixtures::random_signature(n, rng);
    const PolyField poly = PolyField::random(n, rng, 2.0);
    const Point x = fixtures::random_point(n, rng, -0.5, 0.5);
    const ScalarField field = [&](const Point& y) { return poly.value(y); };
    const SymTensor2 exact = conformal_ricci(sig, poly.jet(x));
    const double h = 2e-2;
    const double e1 = (fd_ricci(sig, field, x, h) - exact).max_abs();
    const double e2 = (fd_ricci(sig, field, x, h / 2) - exact).max_abs();
    const double e3 = (fd_ricci(sig, field, x, h / 4) - exact).max_abs();
    EXPECT_LT(e3, 1e-4);
    const double r1 = std::log2(e1 / e2), r2 = std::log2(e2 / e3);
    EXPECT_NEAR(r1, 2.0, 0.2) << "trial " << t;
    EXPECT_NEAR(r2, 2.0, 0.2) << "trial " << t;
  }
}

TEST(Hessian, ConstantFunctionAndFlatBackground) {
  std::mt19937_64 rng(8);
  const Signature sig{1, 1, -1};
  const auto phi = fixtures::random_jet(3, rng);
  EXPECT_EQ(conformal_hessian(sig, phi, ScalarJet2::constant(3, 4.0)).max_abs(), 0.0);
  const auto f = fixtures::random_jet(3, rng);
  const SymTensor2 flat = conformal_hessian(sig, ScalarJet2::constant(3, 1.0), f);
  EXPECT_NEAR((flat.matrix() - f.hessian).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(Hessian, DiagonalClosedForm) {
  std::mt19937_64 rng(9);
  const Signature sig{1, -1, 1, 1};
  const auto phi = fixtures::random_jet(4, rng);
  const auto f = fixtures::random_jet(4, rng);
  const SymTensor2 h = conformal_hessian(sig, phi, f);
  const double cross = sig.dot(phi.gradient, f.gradient);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double expect = f.hessian(ii, ii) + 2 * phi.gradient[ii] * f.gradient[ii] / phi.value -
                          sig[i] * cross / phi.value;
    EXPECT_NEAR(h(i, i), expect, 1e-13);
  }
}

TEST(Hessian, CigarFixtureAgainstFiniteDifferences) {
  const Signature sig{1, 1};
  const ScalarField phi = [](const Point& x) { return 1.0 + x.squaredNorm(); };
  const ScalarField f = [](const Point& x) { return -std::log(1.0 + x.squaredNorm()); };
  Point x(2);
  x << 1.0, 0.0;
  const ScalarJet2 pj(2.0, Vector::Unit(2, 0) * 2.0, 2.0 * Matrix::Identity(2, 2));
  // f = -ln(1 + r^2): f_,i = -2x_i/(1+r^2), f_,ij = -2 delta_ij/(1+r^2) + 4 x_i x_j/(1+r^2)^2
  Matrix fh = -Matrix::Identity(2, 2);
  fh(0, 0) += 1.0;
  const ScalarJet2 fj(-std::log(2.0), Vector::Unit(2, 0) * -1.0, fh);
  const SymTensor2 exact = conformal_hessian(sig, pj, fj);
  const SymTensor2 fd = fd_hessian(sig, phi, f, x, 1e-4);
  EXPECT_LT((exact - fd).max_abs(), 1e-7);
}

TEST(Hessian, MatchesFiniteDifferenceOracleOnPolynomials) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 3);
    const Signature sig = fixtures::random_signature(n, rng);
    const PolyField pphi = PolyField::random(n, rng, 2.0);
    const PolyField pf = PolyField::random(n, rng, 0.0, 3, 6, 1.0);
    const Point x = fixtures::random_point(n, rng, -0.5, 0.5);
    const ScalarField phi = [&](const Point& y) { return pphi.value(y); };
    const ScalarField f = [&](const Point& y) { return pf.value(y); };
    const SymTensor2 exact = conformal_hessian(sig, pphi.jet(x), pf.jet(x));
    const double e1 = (fd_hessian(sig, phi, f, x, 1e-2) - exact).max_abs();
    const double e2 = (fd_hessian(sig, phi, f, x, 5e-3) - exact).max_abs();
    EXPECT_LT(e2, 1e-3);
    if (e1 > 1e-12) EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.25) << "trial " << t;
  }
}

TEST(ScalarCurvature, EqualsWeightedTraceOfRicci) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 5);
    const Signature sig = fixtures::random_signature(n, rng);
    const auto phi = fixtures::random_jet(n, rng);
    const SymTensor2 ric = conformal_ricci(sig, phi);
    double trace = 0.0;
    for (std::size_t k = 0; k < n; ++k) trace += sig[k] * phi.value * phi.value * ric(k, k);
    const double r = scalar_curvature(sig, phi);
    EXPECT_NEAR(r, trace, 1e-12 * std::max(1.0, std::abs(r)));
  }
  EXPECT_EQ(scalar_curvature(Signature{1, 1}, ScalarJet2::constant(2, 7.0)), 0.0);
}

TEST(ScalarCurvature, CigarAgainstFiniteDifferences) {
  // cigar: phi = sqrt(1 + |x|^2) gives R = 4 / (1 + |x|^2) in gbar-normalization
  const Signature sig{1, 1};
  const ScalarField field = [](const Point& x) { return std::sqrt(1.0 + x.squaredNorm()); };
  Point x(2);
  x << 1.0, 1.0;
  const double s = std::sqrt(3.0);
  Vector g(2);
  g << 1.0 / s, 1.0 / s;
  Matrix h(2, 2);
  h << 1.0 / s - 1.0 / (3 * s), -1.0 / (3 * s), -1.0 / (3 * s), 1.0 / s - 1.0 / (3 * s);
  const ScalarJet2 phi(s, g, h);
  const SymTensor2 fd = fd_ricci(sig, field, x, 1e-3);
  double fd_r = 0.0;
  for (std::size_t k = 0; k < 2; ++k) fd_r += sig[k] * 3.0 * fd(k, k);
  EXPECT_NEAR(scalar_curvature(sig, phi), 4.0 / 3.0, 1e-13);
  EXPECT_NEAR(fd_r, 4.0 / 3.0, 1e-5);
}

TEST(Laplacian, EqualsPhiSquaredTraceOfHessian) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 5);
    const Signature sig = fixtures::random_signature(n, rng);
    const auto phi = fixtures::random_jet(n, rng);
    const auto f = fixtures::random_jet(n, rng);
    const SymTensor2 h = conformal_hessian(sig, phi, f);
    double trace = 0.0;
    for (std::size_t k = 0; k < n; ++k) trace += sig[k] * h(k, k);
    const double lap = laplacian(sig, phi, f);
    EXPECT_NEAR(lap, phi.value * phi.value * trace, 1e-12 * std::max(1.0, std::abs(lap)));
  }
  const Signature sig{1, -1};
  std::mt19937_64 r2(1);
  const auto f = fixtures::random_jet(2, r2);
  EXPECT_NEAR(laplacian(sig, ScalarJet2::constant(2, 1.0), f), f.hessian(0, 0) - f.hessian(1, 1),
              1e-15);
  EXPECT_EQ(laplacian(sig, f, ScalarJet2::constant(2, 3.0)), 0.0);
}

TEST(Gauge, SignOfPhiDropsOut) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 4);
    const Signature sig = fixtures::random_signature(n, rng);
    const auto phi = fixtures::random_jet(n, rng);
    const auto f = fixtures::random_jet(n, rng);
    EXPECT_EQ((conformal_ricci(sig, phi) - conformal_ricci(sig, -phi)).max_abs(), 0.0);
    EXPECT_EQ((conformal_hessian(sig, phi, f) - conformal_hessian(sig, -phi, f)).max_abs(), 0.0);
    EXPECT_EQ(scalar_curvature(sig, phi), scalar_curvature(sig, -phi));
    EXPECT_EQ(laplacian(sig, phi, f), laplacian(sig, -phi, f));
  }
}
