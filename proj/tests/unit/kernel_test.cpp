#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <anykernel/errors.hpp>
#include <anykernel/gram.hpp>
#include <anykernel/kernel.hpp>

#include "oracles.hpp"
#include "shipped.hpp"

using namespace anykernel;

namespace {

Point at(double p) { return Point{Features(DenseVector{0.0}), p}; }

}  // namespace

TEST(Sobolev, ClosedFormValues) {
  const double e = std::numbers::e;
  EXPECT_NEAR(sobolev_unit(0.0, 1.0), 2.0 / (e - 1.0 / e), 1e-15);
  EXPECT_NEAR(sobolev_unit(0.0, 1.0), 0.850918, 1e-6);
  EXPECT_NEAR(sobolev_unit(0.0, 0.0), 1.0 / std::tanh(1.0), 1e-15);
  EXPECT_NEAR(sobolev_unit(0.0, 0.0), 1.313035, 1e-6);
}

TEST(Sobolev, MatchesHighPrecisionAndIsSymmetric) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double p = u(rng), q = u(rng);
    EXPECT_NEAR(sobolev_unit(p, q), oracle::sobolev_mp(p, q), 4e-16);
    EXPECT_EQ(sobolev_unit(p, q), sobolev_unit(q, p));
    EXPECT_GT(sobolev_unit(p, p), 0.0);
    EXPECT_LT(sobolev_unit(p, p), 3.0);
  }
}

TEST(Sobolev, RejectsOutsideUnitInterval) {
  EXPECT_THROW(sobolev_unit(-0.1, 0.5), DomainError);
  EXPECT_THROW(sobolev_unit(0.5, 1.01), DomainError);
}

TEST(LowDegree, CountsSubsetsOnDiagonal) {
  const BitVector x{{1, -1, 1, 1, -1}};
  EXPECT_DOUBLE_EQ(low_degree_boolean(x, x, 2), 16.0);
}

TEST(LowDegree, HandExample) {
  EXPECT_DOUBLE_EQ(low_degree_boolean(BitVector{{1, 1, 1}}, BitVector{{-1, 1, 1}}, 3), 0.0);
}

TEST(LowDegree, DynamicProgramMatchesSubsetEnumeration) {
  std::mt19937_64 rng(2);
  for (int n = 1; n <= 10; ++n)
    for (int d = 0; d <= std::min(n, 3); ++d)
      for (int rep = 0; rep < 20; ++rep) {
        const auto x = oracle::random_bits(rng, n), y = oracle::random_bits(rng, n);
        EXPECT_DOUBLE_EQ(low_degree_boolean(x, y, d), oracle::low_degree_subsets(x, y, d)) << n << " " << d;
      }
}

TEST(LowDegree, DiagonalBelowFourNToTheD) {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 10; ++n)
    for (int d = 1; d <= std::min(n, 3); ++d) {
      const auto x = oracle::random_bits(rng, n);
      EXPECT_LT(low_degree_boolean(x, x, d), 4.0 * std::pow(n, d));
    }
}

TEST(LowDegree, DomainErrors) {
  EXPECT_THROW(low_degree_boolean(BitVector{{1, 0}}, BitVector{{1, 1}}, 1), DomainError);
  EXPECT_THROW(low_degree_boolean(BitVector{{1, 1}}, BitVector{{1, 1}}, 3), DomainError);
}

TEST(GridBin, HalfOpenBinsWithClosedTop) {
  EXPECT_EQ(grid_bin(0.09, 0.05, 10), 1.0);
  EXPECT_EQ(grid_bin(0.10, 0.09, 10), 0.0);
  EXPECT_EQ(grid_bin(1.0, 0.95, 10), 1.0);
  EXPECT_EQ(grid_bin_index(1.0, 10), 9);
  EXPECT_THROW(grid_bin(0.5, 0.5, 0), DomainError);
}

TEST(FiniteFamily, Examples) {
  const auto one = finite_family_kernel({[](const Point&) { return 1.0; }}, 1.0);
  EXPECT_EQ(one(at(0.2), at(0.9)), 1.0);
  EXPECT_EQ(one.diag_bound(), 1.0);

  auto f = [](const Point& z) { return 2.0 * z.p - 0.3; };
  const auto pm = finite_family_kernel({f, [f](const Point& z) { return -f(z); }}, 2.0);
  EXPECT_DOUBLE_EQ(pm(at(0.2), at(0.7)), 2.0 * f(at(0.2)) * f(at(0.7)));

  std::vector<FiniteFamily::Function> sets;
  for (int g = 0; g < 4; ++g)
    sets.push_back([g](const Point& z) { return static_cast<int>(z.p * 4.0) == g ? 1.0 : 0.0; });
  const auto disjoint = finite_family_kernel(sets, 4.0);
  EXPECT_EQ(disjoint(at(0.1), at(0.2)), 1.0);
  EXPECT_EQ(disjoint(at(0.1), at(0.3)), 0.0);
}

TEST(FiniteFamily, MemberErrorsPropagate) {
  const auto k = finite_family_kernel({[](const Point&) -> double { throw std::runtime_error("boom"); }}, 1.0);
  EXPECT_THROW(k(at(0.1), at(0.2)), std::runtime_error);
}

TEST(Combinators, SumWithZeroIsIdentity) {
  const auto k = sobolev_unit_kernel() + zero_kernel();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double p = u(rng), q = u(rng);
    EXPECT_DOUBLE_EQ(k(at(p), at(q)), sobolev_unit(p, q));
  }
}

TEST(Combinators, ProductOfGridAndFamily) {
  const auto fam = finite_family_kernel({[](const Point& z) { return z.x.dense()[0]; }}, 1.0);
  const auto k = grid_bin_kernel(10) * fam;
  const Point a{Features(DenseVector{0.5}), 0.31}, b{Features(DenseVector{0.8}), 0.35};
  EXPECT_DOUBLE_EQ(k(a, b), grid_bin(0.31, 0.35, 10) * 0.5 * 0.8);
}

TEST(Combinators, FlagsAndBounds) {
  const auto s = sobolev_unit_kernel() + grid_bin_kernel(4);
  EXPECT_FALSE(s.continuous_in_p());
  ASSERT_TRUE(s.diag_bound().has_value());
  EXPECT_NEAR(*s.diag_bound(), *sobolev_unit_kernel().diag_bound() + 1.0, 1e-12);
  const auto p = scale_kernel(2.0, laplace_kernel()) * constant_kernel(3.0);
  EXPECT_TRUE(p.continuous_in_p());
  EXPECT_DOUBLE_EQ(*p.diag_bound(), 6.0);
  EXPECT_FALSE(sum_kernel({sobolev_unit_kernel(), polynomial_kernel(2)}).diag_bound().has_value());
  EXPECT_THROW(scale_kernel(-1.0, laplace_kernel()), DomainError);
}

TEST(Combinators, ComposeAppliesMap) {
  const auto k = compose_kernel(sobolev_unit_kernel(),
                                PointMap{[](const Point& z) { return Point{z.x, 1.0 - z.p}; }, "flip", true, true});
  EXPECT_DOUBLE_EQ(k(at(0.2), at(0.6)), sobolev_unit(0.8, 0.4));
  EXPECT_EQ(k.diag_bound(), sobolev_unit_kernel().diag_bound());
}

TEST(Catalog, RegisteredPresetsEvaluate) {
  const Point a{Features(DenseVector{1.0, 2.0}), 0.3}, b{Features(DenseVector{-1.0, 0.5}), 0.8};
  EXPECT_DOUBLE_EQ(linear_prediction_kernel()(a, b), 1.0 + 0.3 * 0.8);
  EXPECT_DOUBLE_EQ(polynomial_kernel(2)(a, b), std::pow(1.0 + (-1.0 + 1.0), 2));
  EXPECT_DOUBLE_EQ(laplace_kernel()(a, b), std::exp(-0.5));
  EXPECT_DOUBLE_EQ(gaussian_kernel(1.0)(a, b), std::exp(-(4.0 + 2.25)));
  EXPECT_DOUBLE_EQ(linear_features_kernel()(a, b), 0.0);
}

TEST(Shipped, SymmetricExactly) {
  std::mt19937_64 rng(5);
  for (const auto& c : shipped::scalar_cases()) {
    for (int i = 0; i < 1000; ++i) {
      const auto a = c.sample(rng), b = c.sample(rng);
      ASSERT_EQ(c.kernel(a, b), c.kernel(b, a)) << c.name;
      ASSERT_GE(c.kernel.diag(a), 0.0) << c.name;
      if (auto bound = c.kernel.diag_bound()) ASSERT_LE(c.kernel.diag(a), *bound * (1 + 1e-12)) << c.name;
    }
  }
}

TEST(Shipped, SumAndProductGramsArePsd) {
  std::mt19937_64 rng(6);
  for (const auto& k : {sobolev_unit_kernel() + gaussian_kernel(1.0), grid_bin_kernel(3) * polynomial_kernel(2)}) {
    std::vector<Point> pts;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g;
    for (int i = 0; i < 8; ++i) pts.push_back(Point{Features(DenseVector{g(rng), g(rng)}), u(rng)});
    EXPECT_TRUE(passes_psd_test(gram_matrix(k, pts).entries)) << k.describe();
  }
}

TEST(Gram, PsdTestRejectsIndefinite) {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 2.0, 2.0, 1.0;
  EXPECT_FALSE(passes_psd_test(m));
  EXPECT_NEAR(min_eigenvalue(m), -1.0, 1e-12);
}
