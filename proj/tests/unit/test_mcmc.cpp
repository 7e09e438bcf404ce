#include "gpbayes/errors.hpp"
#include "gpbayes/mcmc.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace gpbayes;

namespace {

double std_normal(const Point& u) { return -0.5 * u.squaredNorm(); }

}  // namespace

TEST(Mcmc, StandardNormalMoments) {
  const Chain c = metropolis_hastings(std_normal, random_walk_proposal(2.4), point1(0.0), 100000, 1);
  ASSERT_EQ(c.size(), 100000u);
  const auto d = chain_diagnostics(c, default_burn_in(c.size()));
  EXPECT_NEAR(d.mean[0], 0.0, 0.05);
  EXPECT_NEAR(d.variance[0], 1.0, 0.1);
  EXPECT_GT(d.iact[0], 1.0);
}

TEST(Mcmc, TinyStepAcceptsAlmostEverything) {
  const Chain c = metropolis_hastings(std_normal, random_walk_proposal(1e-3), point1(0.0), 20000, 2);
  EXPECT_GT(chain_diagnostics(c, 0).acceptance_rate, 0.99);
}

TEST(Mcmc, ConstantTargetAlwaysAccepts) {
  const Chain c = metropolis_hastings([](const Point&) { return 0.0; }, random_walk_proposal(0.5), point1(0.0), 1000, 3);
  EXPECT_EQ(chain_diagnostics(c, 0).acceptance_rate, 1.0);
}

TEST(Mcmc, RejectionsRepeatState) {
  auto box = [](const Point& u) {
    return std::abs(u[0]) < 1.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  };
  const Chain c = metropolis_hastings(box, random_walk_proposal(1.0), point1(0.0), 5000, 4);
  std::size_t rejected = 0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (!c.accepted[i]) {
      ++rejected;
      EXPECT_EQ(c.samples[i], c.samples[i - 1]);
    }
    EXPECT_LT(std::abs(c.samples[i][0]), 1.0);
  }
  EXPECT_GT(rejected, 0u);
  EXPECT_EQ(c.proposal_log_densities.size(), c.size());
}

TEST(Mcmc, ReproducibleAndSeedDependent) {
  const auto p = random_walk_proposal(Eigen::Vector2d(0.5, 1.0));
  const Chain a = metropolis_hastings(std_normal, p, Eigen::Vector2d(0, 0), 2000, 9);
  const Chain b = metropolis_hastings(std_normal, p, Eigen::Vector2d(0, 0), 2000, 9);
  const Chain c = metropolis_hastings(std_normal, p, Eigen::Vector2d(0, 0), 2000, 10);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.log_densities, b.log_densities);
  EXPECT_NE(a.samples, c.samples);
}

TEST(Mcmc, DetailedBalanceOnThreeStates) {
  // Lattice {0,1,2} with log-density weights; proposal +-1 wrapping (symmetric).
  const double w[3] = {0.2, 0.5, 0.3};
  Proposal q;
  q.draw = [](const Point& u, Rng& rng) {
    std::bernoulli_distribution up(0.5);
    const int s = static_cast<int>(u[0]);
    return point1(static_cast<double>((s + (up(rng) ? 1 : 2)) % 3));
  };
  auto lt = [&](const Point& u) { return std::log(w[static_cast<int>(u[0])]); };
  const std::size_t n = 1000000;
  const Chain c = metropolis_hastings(lt, q, point1(0.0), n, 5);
  double counts[3][3] = {};
  for (std::size_t i = 1; i < n; ++i) counts[static_cast<int>(c.samples[i - 1][0])][static_cast<int>(c.samples[i][0])] += 1;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      // pi_i P_ij and pi_j P_ji both estimate the joint frequency of the pair.
      const double fij = counts[i][j] / static_cast<double>(n - 1);
      const double fji = counts[j][i] / static_cast<double>(n - 1);
      const double se = std::sqrt((fij + fji) / static_cast<double>(n - 1));
      EXPECT_LE(std::abs(fij - fji), 3.0 * se + 1e-12);
    }
  }
  double visits[3] = {};
  for (const auto& s : c.samples) visits[static_cast<int>(s[0])] += 1;
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(visits[i] / static_cast<double>(n), w[i], 0.01);
}

TEST(Mcmc, Errors) {
  auto zero = [](const Point&) { return -std::numeric_limits<double>::infinity(); };
  EXPECT_THROW(metropolis_hastings(zero, random_walk_proposal(1.0), point1(0.0), 10, 1), InvalidArgument);
  auto nan = [](const Point& u) { return u[0] > 0.5 ? std::nan("") : 0.0; };
  try {
    (void)metropolis_hastings(nan, random_walk_proposal(5.0), point1(0.0), 1000, 1);
    FAIL() << "expected NaN error";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("u = ("), std::string::npos);
  }
  EXPECT_THROW(random_walk_proposal(0.0), InvalidArgument);
  EXPECT_THROW(random_walk_proposal(Eigen::Vector2d(1.0, -1.0)), InvalidArgument);
  EXPECT_THROW(metropolis_hastings(std_normal, random_walk_proposal(Eigen::Vector2d(1.0, 1.0)), point1(0.0), 10, 1),
               InvalidArgument);
  const Chain c = metropolis_hastings(std_normal, random_walk_proposal(1.0), point1(0.0), 10, 1);
  EXPECT_THROW(chain_diagnostics(c, 10), InvalidArgument);
}

TEST(Mcmc, DiagnosticsOnInjectedChains) {
  Chain constant;
  for (int i = 0; i < 100; ++i) {
    constant.samples.push_back(point1(2.0));
    constant.accepted.push_back(true);
    constant.log_densities.push_back(0.0);
  }
  const auto dc = chain_diagnostics(constant, 0);
  EXPECT_EQ(dc.variance[0], 0.0);
  EXPECT_EQ(dc.acceptance_rate, 1.0);

  Chain iid;
  Rng rng = make_rng(77);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 50000; ++i) {
    iid.samples.push_back(point1(n(rng)));
    iid.accepted.push_back(true);
    iid.log_densities.push_back(0.0);
  }
  const auto di = chain_diagnostics(iid, 0);
  EXPECT_GE(di.iact[0], 0.8);
  EXPECT_LE(di.iact[0], 1.3);
  EXPECT_NEAR(default_step(4), 1.2, 1e-15);
}
