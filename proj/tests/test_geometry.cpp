#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <random>

#include "symmax/geometry.hpp"
#include "symmax/media.hpp"

using namespace symmax;

TEST(Geometry, CartesianMetricIsIdentity) {
  const MetricSample m = metric_at(Chart::cartesian(), {0.3, -7.0, 2.0});
  EXPECT_EQ(m.g_lower, identity3());
  EXPECT_EQ(m.g_upper, identity3());
  EXPECT_EQ(m.sqrt_det, 1.0);
}

TEST(Geometry, CylindricalSqrtDetIsRadius) {
  const MetricSample m = metric_at(Chart::cylindrical(), {2.0, 0.7, -1.0});
  EXPECT_DOUBLE_EQ(m.sqrt_det, 2.0);
  EXPECT_DOUBLE_EQ(m.g_lower[1][1], 4.0);
  EXPECT_DOUBLE_EQ(m.g_upper[1][1], 0.25);
}

TEST(Geometry, NegativeComponentIsDegenerate) {
  const Chart bad("bad", {Expr::constant(-1), Expr::constant(0), Expr::constant(0),
                          Expr::constant(1), Expr::constant(0), Expr::constant(1)});
  EXPECT_THROW(metric_at(bad, {0, 0, 0}), DegenerateMetricError);
  // Determinant positive but not positive definite.
  const Chart neg("neg", {Expr::constant(-1), Expr::constant(0), Expr::constant(0),
                          Expr::constant(-1), Expr::constant(0), Expr::constant(1)});
  EXPECT_THROW(metric_at(neg, {0, 0, 0}), DegenerateMetricError);
  // Cylindrical at r = 0.
  EXPECT_THROW(metric_at(Chart::cylindrical(), {0, 0, 0}), DegenerateMetricError);
  const Chart stiff("stiff", {Expr::constant(1e13), Expr::constant(0), Expr::constant(0),
                              Expr::constant(1), Expr::constant(0), Expr::constant(1)});
  EXPECT_THROW(metric_at(stiff, {0, 0, 0}), DegenerateMetricError);
}

TEST(Geometry, LeviCivitaWeights) {
  EXPECT_EQ(levi_civita(2.0, Variance::lower, 0, 1, 2), 2.0);
  EXPECT_EQ(levi_civita(2.0, Variance::upper, 1, 0, 2), -0.5);
  for (auto v : {Variance::upper, Variance::lower}) {
    EXPECT_EQ(levi_civita(3.7, v, 0, 1, 1), 0.0);
    EXPECT_EQ(levi_civita(3.7, v, 2, 2, 2), 0.0);
  }
}

TEST(Geometry, LeviCivitaPermutationSigns) {
  std::array<int, 3> perm{0, 1, 2};
  int count = 0;
  do {
    // Parity by counting inversions.
    int inversions = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b)
        inversions += perm[a] > perm[b];
    const double sign = inversions % 2 == 0 ? 1.0 : -1.0;
    for (double s : {0.5, 1.0, 2.0, 17.25}) {
      EXPECT_EQ(levi_civita(s, Variance::lower, perm[0], perm[1], perm[2]) /
                    levi_civita(s, Variance::lower, 0, 1, 2),
                sign);
    }
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_EQ(count, 6);

  for (double s : {0.5, 2.0, 3.0})
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          const double prod = levi_civita(s, Variance::upper, i, j, k) *
                              levi_civita(s, Variance::lower, i, j, k);
          EXPECT_TRUE(prod == 0.0 || prod == 1.0) << prod;
        }
}

TEST(Geometry, LowerIndex) {
  const MetricSample cart = metric_at(Chart::cartesian(), {1, 1, 1});
  EXPECT_EQ(lower_index({1, 2, 3}, cart), (Vec3{1, 2, 3}));
  const MetricSample cyl = metric_at(Chart::cylindrical(), {2, 0, 0});
  EXPECT_EQ(lower_index({0, 1, 0}, cyl), (Vec3{0, 4, 0}));
  EXPECT_EQ(lower_index({0, 0, 0}, cyl), (Vec3{0, 0, 0}));
}

TEST(Geometry, RaiseUndoesLowerOnRandomMetrics) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    // A A^T + I is SPD.
    Mat3 a{};
    for (auto &row : a)
      for (double &x : row)
        x = u(rng);
    std::array<Expr, 6> comps;
    const int slots[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
    for (int s = 0; s < 6; ++s) {
      double g = slots[s][0] == slots[s][1] ? 1.0 : 0.0;
      for (int k = 0; k < 3; ++k)
        g += a[slots[s][0]][k] * a[slots[s][1]][k];
      comps[s] = Expr::constant(g);
    }
    const MetricSample m = metric_at(Chart("random", comps), {0, 0, 0});
    const Mat3 prod = mat_mul(m.g_lower, m.g_upper);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        EXPECT_NEAR(prod[i][j], i == j ? 1.0 : 0.0, 1e-12);
    EXPECT_NEAR(m.sqrt_det * m.sqrt_det, determinant(m.g_lower),
                1e-12 * determinant(m.g_lower));
    const Vec3 v{u(rng), u(rng), u(rng)};
    const Vec3 back = raise_index(lower_index(v, m), m);
    for (int i = 0; i < 3; ++i)
      EXPECT_NEAR(back[i], v[i], 1e-12 * std::max(1.0, std::abs(v[i])));
  }
}

TEST(Geometry, UserChartFromExpressions) {
  const Chart spherical("spherical", {Expr::constant(1), Expr::constant(0), Expr::constant(0),
                                      Expr::parse("x1^2"), Expr::constant(0),
                                      Expr::parse("(x1 * sin(x2))^2")});
  const MetricSample m = metric_at(spherical, {2.0, pi / 2, 0.0});
  EXPECT_NEAR(m.sqrt_det, 4.0, 1e-14);
}

TEST(Media, VacuumSampleIsIdentity) {
  const MediumSample s = sample_medium(Medium::vacuum(), {1, 2, 3});
  EXPECT_EQ(s.eps, identity3());
  EXPECT_EQ(s.eps_inv, identity3());
  EXPECT_EQ(s.mu, identity3());
  EXPECT_EQ(s.mu_inv, identity3());
}

TEST(Media, LuneburgProfile) {
  const Medium lens = Medium::luneburg(1.0);
  const MediumSample center = sample_medium(lens, {0, 0, 0});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      EXPECT_DOUBLE_EQ(center.eps[i][j], i == j ? 2.0 : 0.0);
      EXPECT_DOUBLE_EQ(center.eps_inv[i][j], i == j ? 0.5 : 0.0);
    }
  EXPECT_DOUBLE_EQ(sample_medium(lens, {0.6, 0, 0}).eps[0][0], 2.0 - 0.36);
  EXPECT_DOUBLE_EQ(sample_medium(lens, {3, 0, 0}).eps[1][1], 1.0);
  EXPECT_DOUBLE_EQ(sample_medium(Medium::luneburg(2.0), {1, 1, 0}).eps[2][2], 1.5);
}

TEST(Media, SingularTensorIsReported) {
  const Medium zero("zero", Medium::diagonal(Expr::constant(0)), Medium::identity_tensor());
  try {
    sample_medium(zero, {1, 2, 3});
    FAIL() << "expected SingularTensorError";
  } catch (const SingularTensorError &e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("eps"), std::string::npos);
    EXPECT_NE(what.find("(1, 2, 3)"), std::string::npos);
  }
  const Medium thin("thin", Medium::identity_tensor(),
                    Medium::diagonal(Expr::constant(1), Expr::constant(1e-9), Expr::constant(1)));
  EXPECT_THROW(sample_medium(thin, {0, 0, 0}), SingularTensorError);
}

TEST(Media, UniaxialAndConstitutiveRoundTrip) {
  const MediumSample u = sample_medium(Medium::uniaxial(2.0, 5.0, 2), {0, 0, 0});
  EXPECT_EQ(u.eps[0][0], 2.0);
  EXPECT_EQ(u.eps[2][2], 5.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const Medium aniso("aniso",
                     {Expr::parse("2 + sin(x1)"), Expr::parse("0.3 * cos(x2)"), Expr::constant(0.1),
                      Expr::constant(-0.2), Expr::parse("3 + x3^2"), Expr::constant(0),
                      Expr::constant(0.05), Expr::parse("0.1 * x1"), Expr::constant(1.5)},
                     Medium::identity_tensor());
  for (int trial = 0; trial < 200; ++trial) {
    const Point3 x{uni(rng), uni(rng), uni(rng)};
    const MediumSample s = sample_medium(aniso, x);
    const Vec3 e{uni(rng), uni(rng), uni(rng)};
    const Vec3 back = mat_vec(s.eps_inv, mat_vec(s.eps, e));
    for (int i = 0; i < 3; ++i)
      EXPECT_NEAR(back[i], e[i], 1e-12 * std::max(1.0, std::abs(e[i])));
    const Mat3 prod = mat_mul(s.eps, s.eps_inv);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        EXPECT_NEAR(prod[i][j], i == j ? 1.0 : 0.0, 1e-12);
  }
}
