#include "gpbayes/errors.hpp"
#include "gpbayes/kernels.hpp"
#include "gpbayes/random.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace gpbayes;

namespace {

const KernelFamily kAll[] = {KernelFamily::Matern12, KernelFamily::Matern32, KernelFamily::Matern52,
                             KernelFamily::SquaredExponential};

oracle::Family to_oracle(KernelFamily f) {
  switch (f) {
    case KernelFamily::Matern12: return oracle::Family::M12;
    case KernelFamily::Matern32: return oracle::Family::M32;
    case KernelFamily::Matern52: return oracle::Family::M52;
    case KernelFamily::SquaredExponential: return oracle::Family::SE;
  }
  return oracle::Family::SE;
}

Point random_point(Rng& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  Point p(d);
  for (int i = 0; i < d; ++i) p[i] = n(rng);
  return p;
}

}  // namespace

TEST(Kernels, ClosedFormValues) {
  const Point a = point1(0.0);
  const Point b = point1(1.0);
  EXPECT_DOUBLE_EQ(KernelSpec(KernelFamily::Matern12, 1, 1)(a, a), 1.0);
  EXPECT_NEAR(KernelSpec(KernelFamily::Matern12, 1, 1)(a, b), 0.367879441171, 1e-12);
  EXPECT_NEAR(KernelSpec(KernelFamily::SquaredExponential, 1, 1)(a, b), 0.606530659713, 1e-12);
  EXPECT_NEAR(KernelSpec(KernelFamily::Matern32, 1, 1)(a, b), (1.0 + std::sqrt(3.0)) * std::exp(-std::sqrt(3.0)), 1e-15);
  EXPECT_NEAR(KernelSpec(KernelFamily::Matern32, 1, 1)(a, b), 0.483358, 1e-6);
}

TEST(Kernels, MatchIndependentFormulas) {
  Rng rng = make_rng(3);
  for (auto f : kAll) {
    for (int t = 0; t < 50; ++t) {
      const KernelSpec k(f, 0.3 + t * 0.05, 0.5 + 0.1 * t);
      const Point u = random_point(rng, 2);
      const Point v = random_point(rng, 2);
      EXPECT_NEAR(k(u, v), oracle::kernel(to_oracle(f), k.lengthscale(), k.variance(), u, v), 1e-13 * k.variance());
    }
  }
}

TEST(Kernels, SymmetryAndDiagonal) {
  Rng rng = make_rng(11);
  for (auto f : kAll) {
    const KernelSpec k(f, 0.7, 2.5);
    for (int t = 0; t < 100; ++t) {
      const Point u = random_point(rng, 3);
      const Point v = random_point(rng, 3);
      EXPECT_EQ(k(u, v), k(v, u));
      EXPECT_EQ(k(u, u), 2.5);
    }
  }
}

TEST(Kernels, MatrixIsNumericallyPsd) {
  Rng rng = make_rng(5);
  for (auto f : kAll) {
    const KernelSpec k(f, 1.3, 1.7);
    PointSet pts;
    for (int i = 0; i < 20; ++i) pts.push_back(random_point(rng, 2));
    const Eigen::MatrixXd m = kernel_matrix(k, pts);
    EXPECT_EQ((m - m.transpose()).norm(), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * 1.7);
  }
}

TEST(Kernels, MonotoneDecay) {
  for (auto f : kAll) {
    const KernelSpec k(f, 1.0, 1.0);
    double prev = k.at_distance(0.0);
    for (int i = 1; i <= 2000; ++i) {
      const double cur = k.at_distance(i * 0.005);
      EXPECT_LE(cur, prev);
      prev = cur;
    }
  }
}

// The ordering k_{1/2} <= k_{3/2} <= k_{5/2} <= k_inf holds for r up to about 1.95;
// beyond that the squared exponential drops below the Matern 5/2 tail.
TEST(Kernels, SmoothnessOrderingOnShortRange) {
  const KernelSpec k12(KernelFamily::Matern12, 1, 1), k32(KernelFamily::Matern32, 1, 1),
      k52(KernelFamily::Matern52, 1, 1), kse(KernelFamily::SquaredExponential, 1, 1);
  for (int i = 1; i <= 190; ++i) {
    const double r = 0.01 * i;
    EXPECT_LE(k12.at_distance(r), k32.at_distance(r));
    EXPECT_LE(k32.at_distance(r), k52.at_distance(r));
    EXPECT_LE(k52.at_distance(r), kse.at_distance(r));
  }
}

TEST(Kernels, MatrixAndCrossExamples) {
  const KernelSpec k(KernelFamily::Matern12, 1, 1);
  const Eigen::MatrixXd one = kernel_matrix(k, points1({0.3}));
  ASSERT_EQ(one.rows(), 1);
  EXPECT_EQ(one(0, 0), 1.0);
  const Eigen::MatrixXd dup = kernel_matrix(k, points1({0.2, 0.2}));
  EXPECT_EQ(dup, Eigen::MatrixXd::Ones(2, 2));
  const Eigen::MatrixXd two = kernel_matrix(k, points1({0.0, 1.0}));
  EXPECT_NEAR(two(0, 1), std::exp(-1.0), 1e-15);
  const Eigen::VectorXd c = kernel_cross(k, point1(0.5), points1({0.0, 1.0}));
  EXPECT_NEAR(c[0], std::exp(-0.5), 1e-15);
  EXPECT_NEAR(c[1], std::exp(-0.5), 1e-15);
  EXPECT_EQ(kernel_cross(k, point1(0.5), PointSet{}).size(), 0);
  EXPECT_EQ(kernel_cross(k, point1(0.0), points1({0.0, 3.0}))[0], 1.0);
}

TEST(Kernels, Validation) {
  EXPECT_THROW(KernelSpec(KernelFamily::Matern12, -1.0, 1.0), InvalidArgument);
  EXPECT_THROW(KernelSpec(KernelFamily::Matern12, 1.0, 0.0), InvalidArgument);
  EXPECT_THROW(KernelSpec(KernelFamily::Matern12, std::nan(""), 1.0), InvalidArgument);
  const KernelSpec k(KernelFamily::Matern32, 1, 1);
  EXPECT_THROW((void)k(point1(0), point2(0, 0)), InvalidArgument);
  EXPECT_THROW((void)kernel_cross(k, point2(0, 0), points1({0.0})), InvalidArgument);
  EXPECT_EQ(parse_kernel_family("sqexp"), KernelFamily::SquaredExponential);
  EXPECT_EQ(to_string(KernelFamily::Matern52), "matern52");
  EXPECT_THROW(parse_kernel_family("rbf"), InvalidArgument);
  EXPECT_TRUE(std::isinf(smoothness(KernelFamily::SquaredExponential)));
  EXPECT_DOUBLE_EQ(smoothness(KernelFamily::Matern32), 1.5);
}
