#include "soliton/geometry.hpp"
#include "soliton/verify.hpp"
#include "support/poly_field.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace soliton;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) out[i++] = e;
  return out;
}

SampleSpec box_spec(std::size_t n, double half, std::uint64_t seed = 7, std::size_t count = 500) {
  SampleSpec s;
  s.seed = seed;
  s.count = count;
  s.box.assign(n, {-half, half});
  return s;
}

const QuadricAnsatz kRound2(Signature{1, 1}, 1.0, vec({0, 0}), vec({0, 0}));

}  // namespace

TEST(Rng, CounterBased) {
  const CounterRng a(42), b(42), c(43);
  for (std::uint64_t k = 0; k < 100; ++k) {
    EXPECT_EQ(a.bits(k), b.bits(k));
    EXPECT_NE(a.bits(k), c.bits(k));
    const double u = a.uniform(k);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  EXPECT_EQ(a.uniform(17), CounterRng(42).uniform(17));
}

TEST(Sampling, RespectsRangeAndExclusions) {
  const auto g = gallery(GalleryName::Cigar, {}, kRound2, 0.0, 0.0, 4.0);
  const SolitonProblem p{kRound2, 0.0};
  const auto pts = sample_points(p, g.profile, box_spec(2, 2.0));
  EXPECT_EQ(pts.size(), 500u);
  for (const auto& x : pts) EXPECT_LE(kRound2.xi(x), 4.0);

  SampleSpec grid = box_spec(2, 1.0);
  grid.mode = SampleMode::Grid;
  grid.count = 25;
  EXPECT_EQ(sample_points(p, g.profile, grid).size(), 25u);

  SampleSpec far;
  far.box = {{5.0, 6.0}, {5.0, 6.0}};
  far.count = 10;
  try {
    (void)sample_points(p, g.profile, far);
    FAIL();
  } catch (const SolitonError& e) {
    EXPECT_EQ(e.code(), ErrorCode::SamplingExhausted);
  }
}

TEST(Verify, CigarPasses) {
  const auto g = gallery(GalleryName::Cigar, {}, kRound2, 0.0, 0.0, 10.0);
  const ResidualReport r = verify_profile(SolitonProblem{kRound2, 0.0}, g.profile, box_spec(2, 2.0), 1e-8);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.points_evaluated, 500u);
  EXPECT_LT(r.max_tensor, 1e-10);
  EXPECT_LT(r.oracle_gap.max_gap, 1e-6);
  EXPECT_NEAR(r.oracle_gap.rate, 2.0, 0.2);
}

TEST(Verify, GaussianIsExact) {
  for (auto [k, tau, lambda] : {std::tuple{1.0, 1.0, 2.0}, std::tuple{2.0, -1.0, -3.0}}) {
    const QuadricAnsatz a(Signature{1, -1, 1}, tau, vec({0.3, 0, 0.1}), vec({0, 0, 0}));
    const auto g = gallery(GalleryName::Gaussian, {{"k", k}}, a, lambda, -30.0, 30.0);
    const ResidualReport r = verify_profile(SolitonProblem{a, lambda}, g.profile, box_spec(3, 3.0));
    EXPECT_TRUE(r.pass);
    EXPECT_LT(r.max_offdiag, 1e-12);
    EXPECT_LT(r.max_diag, 1e-12);
    EXPECT_LT(r.max_trace, 1e-12);
    EXPECT_LT(r.max_tensor, 1e-12);
  }
}

TEST(Verify, CorruptedProfileFails) {
  const auto g = gallery(GalleryName::Cigar, {}, kRound2, 0.0, 0.0, 10.0);
  const Profile good = g.profile;
  const Profile bad = good.with_first_order([good](double xi) {
    ReducedState s = good.first_order(xi);
    s.dphi *= 1.01;
    return s;
  });
  const ResidualReport r = verify_profile(SolitonProblem{kRound2, 0.0}, bad, box_spec(2, 2.0), 1e-8);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.max_diag, 1e-8);
  // a 1% slope error enters the equations linearly: O(1e-2)
  EXPECT_GT(r.max_diag, 1e-3);
  EXPECT_LT(r.max_diag, 1e-1);
}

TEST(Verify, ReportIsDeterministic) {
  const auto g = gallery(GalleryName::Cigar, {}, kRound2, 0.0, 0.0, 10.0);
  const SolitonProblem p{kRound2, 0.0};
  const auto a = to_json(verify_profile(p, g.profile, box_spec(2, 2.0, 99))).dump();
  const auto b = to_json(verify_profile(p, g.profile, box_spec(2, 2.0, 99))).dump();
  EXPECT_EQ(a, b);
  const auto j = nlohmann::json::parse(a);
  for (const char* key : {"max_offdiag", "max_diag", "max_trace", "max_tensor", "oracle_gap",
                          "points_evaluated", "verdict"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["verdict"], "pass");
}

TEST(Verify, ScalingFollowsTheEquations) {
  // phi -> c phi rescales gbar by 1/c^2; Ric and Hess f are unchanged, so lambda -> c^2 lambda.
  const QuadricAnsatz a(Signature::riemannian(3), 1.0, vec({0, 0, 0}), vec({0, 0, 0}));
  const double c = 2.0;
  const auto base = gallery(GalleryName::Gaussian, {{"k", 1.0}}, a, 2.0, 0.0, 12.0);
  const auto scaled = gallery(GalleryName::Gaussian, {{"k", c}}, a, c * c * 2.0, 0.0, 12.0);
  EXPECT_EQ(base.profile.at(3.0).df, scaled.profile.at(3.0).df);
  const auto spec = box_spec(3, 2.0);
  EXPECT_TRUE(verify_profile(SolitonProblem{a, 2.0}, base.profile, spec).pass);
  EXPECT_TRUE(verify_profile(SolitonProblem{a, c * c * 2.0}, scaled.profile, spec).pass);
  // scaling phi without compensating lambda: diag residual phi^2 T_ii = (c^2 - 1) lambda eps_i exactly
  const ResidualReport wrong = verify_profile(SolitonProblem{a, 2.0}, scaled.profile, spec);
  EXPECT_FALSE(wrong.pass);
  EXPECT_NEAR(wrong.max_diag * wrong.scale, (c * c - 1.0) * 2.0, 1e-12);
}

TEST(Oracle, FlatAndCigar) {
  const ScalarField one = [](const Point&) { return 1.0; };
  EXPECT_LT(fd_ricci(Signature{1, -1, 1}, one, vec({0.1, 0.2, 0.3}), 1e-4).max_abs(), 1e-10);

  const ScalarField cigar = [](const Point& x) { return std::sqrt(1.0 + x.squaredNorm()); };
  const Point x = vec({0.5, 0.5});
  const double u = 1.5, s = std::sqrt(u);
  const Matrix xx = x * x.transpose();
  const ScalarJet2 jet(s, x / s, Matrix::Identity(2, 2) / s - xx / (u * s));
  const SymTensor2 exact = conformal_ricci(Signature{1, 1}, jet);
  const double h = 2e-2;
  const double e1 = (fd_ricci(Signature{1, 1}, cigar, x, h) - exact).max_abs();
  const double e2 = (fd_ricci(Signature{1, 1}, cigar, x, h / 2) - exact).max_abs();
  const double e3 = (fd_ricci(Signature{1, 1}, cigar, x, h / 4) - exact).max_abs();
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.2);
  EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.2);
  const FdRicci r = fd_curvature_oracle(Signature{1, 1}, cigar, x, h);
  EXPECT_NEAR(r.rate, 2.0, 0.2);
}

TEST(Oracle, LorentzianPolynomial) {
  std::mt19937_64 rng(71);
  const Signature sig{1, -1, 1};
  const auto poly = fixtures::PolyField::random(3, rng, 2.0);
  const ScalarField field = [&](const Point& y) { return poly.value(y); };
  const Point x = vec({0.2, -0.1, 0.3});
  const SymTensor2 exact = conformal_ricci(sig, poly.jet(x));
  const double e1 = (fd_ricci(sig, field, x, 2e-2) - exact).max_abs();
  const double e2 = (fd_ricci(sig, field, x, 1e-2) - exact).max_abs();
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.2);
}

TEST(Oracle, StencilOutOfDomain) {
  const ScalarField bad = [](const Point& x) { return x[0]; };
  try {
    (void)fd_ricci(Signature{1, 1}, bad, vec({0.0, 0.0}), 1e-3);
    FAIL();
  } catch (const SolitonError& e) {
    EXPECT_EQ(e.code(), ErrorCode::StencilOutOfDomain);
  }
}
