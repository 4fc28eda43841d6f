#include <gtest/gtest.h>

#include <random>

#include "ccg/congestion.hpp"
#include "ccg/errors.hpp"

using namespace ccg;

namespace {

struct RandomPoint {
  std::vector<double> theta;
  std::vector<double> y;
};

RandomPoint random_point(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> raw(n);
  double sum = 0.0;
  for (double& x : raw) sum += (x = unit(rng) + 1e-3);
  RandomPoint p;
  for (double x : raw) p.theta.push_back(x * static_cast<double>(n) / sum);
  for (std::size_t i = 0; i < n; ++i) p.y.push_back(unit(rng));
  return p;
}

std::vector<double> random_d(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::vector<double> d(n);
  for (double& x : d) x = unit(rng);
  d[0] = 1.0;
  return d;
}

}  // namespace

TEST(ThetaType, Invariants) {
  EXPECT_NO_THROW(Theta::make({1.0, 1.0}));
  EXPECT_NO_THROW(Theta::make({2.0, 0.0}));
  EXPECT_THROW(Theta::make({1.5, 1.0}), ValidationError);
  EXPECT_THROW(Theta::make({3.0, -1.0}), ValidationError);
  EXPECT_THROW(Theta::make({}), ValidationError);
  EXPECT_EQ(Theta::barycenter(3).size(), 3U);
}

TEST(LoadVector, Band) {
  EXPECT_NO_THROW(validate_load(std::vector<double>{0.0, 1.0, -1e-13, 1.0 + 1e-13}));
  EXPECT_THROW(validate_load(std::vector<double>{-1e-6}), ValidationError);
  EXPECT_THROW(validate_load(std::vector<double>{1.1}), ValidationError);
}

TEST(Fractional, EdgeCostExamples) {
  const FractionalCost unit({1.0, 1.0}, 1.0);
  const auto c0 = unit.edge_costs(std::vector<double>{1, 1}, std::vector<double>{0, 0});
  EXPECT_DOUBLE_EQ(c0[0], 1.0);
  EXPECT_DOUBLE_EQ(c0[1], 1.0);

  const FractionalCost model({1.0, 0.5}, 2.0);
  const auto c = model.edge_costs(std::vector<double>{0, 2}, std::vector<double>{1, 0.5});
  EXPECT_DOUBLE_EQ(c[0], 3.0);
  EXPECT_DOUBLE_EQ(c[1], 2.0 / 3.0);

  const auto free = model.edge_costs(std::vector<double>{0.3, 1.7}, std::vector<double>{0, 0});
  EXPECT_DOUBLE_EQ(free[0], 1.0);
  EXPECT_DOUBLE_EQ(free[1], 0.5);
}

TEST(Fractional, PotentialAndSocialCostExamples) {
  const FractionalCost one({1.0}, 2.0);
  const std::vector<double> theta{1.0};
  EXPECT_EQ(one.potential(theta, std::vector<double>{0.0}), 0.0);
  EXPECT_DOUBLE_EQ(one.potential(theta, std::vector<double>{1.0}), 1.5);
  EXPECT_EQ(one.social_cost(theta, std::vector<double>{0.0}), 0.0);
  EXPECT_DOUBLE_EQ(one.social_cost(theta, std::vector<double>{1.0}), 2.0);

  // Separable: a two-resource potential is the sum of single-resource ones.
  const FractionalCost two({1.0, 0.4}, 3.0);
  const FractionalCost a({1.0}, 3.0);
  const FractionalCost b({0.4}, 3.0);
  const std::vector<double> t2{0.5, 1.5};
  const std::vector<double> y2{0.3, 0.8};
  EXPECT_DOUBLE_EQ(two.potential(t2, y2),
                   a.potential(std::vector<double>{0.5}, std::vector<double>{0.3}) +
                       b.potential(std::vector<double>{1.5}, std::vector<double>{0.8}));
}

TEST(Fractional, Validation) {
  EXPECT_THROW(FractionalCost({1.0}, 0.0), ValidationError);
  EXPECT_THROW(FractionalCost({1.5}, 1.0), ValidationError);
  EXPECT_THROW(FractionalCost({-0.1, 1.0}, 1.0), ValidationError);
  const FractionalCost model({1.0, 1.0}, 1.0);
  EXPECT_THROW(model.edge_costs(std::vector<double>{1.0}, std::vector<double>{0, 0}),
               ValidationError);
}

TEST(Fractional, ZeroWeightsAreClampedAndReported) {
  const FractionalCost model({1.0, 0.0, 0.5}, 10.0);
  EXPECT_EQ(model.clamped_resources(), 1U);
  EXPECT_DOUBLE_EQ(model.free_flow()[1], 1e-6);
  // Strictly increasing after the clamp.
  const std::vector<double> theta{1, 1, 1};
  const auto lo = model.edge_costs(theta, std::vector<double>{0, 0.2, 0});
  const auto hi = model.edge_costs(theta, std::vector<double>{0, 0.3, 0});
  EXPECT_LT(lo[1], hi[1]);
}

TEST(FractionalProperties, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 6;
    const FractionalCost model(random_d(rng, n), 1.0 + 50.0 * (trial % 3));
    auto p = random_point(rng, n);
    const auto c = model.edge_costs(p.theta, p.y);
    for (std::size_t i = 0; i < n; ++i) {
      const double h = 1e-5;
      auto plus = p.y;
      auto minus = p.y;
      plus[i] += h;
      minus[i] -= h;
      const double fd = (model.potential(p.theta, plus) - model.potential(p.theta, minus)) / (2 * h);
      EXPECT_LE(std::abs(fd - c[i]), 1e-6 * std::max(1.0, std::abs(c[i])));
    }
  }
}

TEST(FractionalProperties, DerivativeBounds) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const double big_c = 0.5 + 20.0 * (trial % 4);
    const FractionalCost model(random_d(rng, n), big_c);
    auto p = random_point(rng, n);
    const double h = 1e-6;
    const auto c = model.edge_costs(p.theta, p.y);
    for (std::size_t i = 0; i < n; ++i) {
      auto y2 = p.y;
      y2[i] += h;
      const double load_slope = (model.edge_costs(p.theta, y2)[i] - c[i]) / h;
      EXPECT_LE(load_slope, big_c * (1 + 1e-6));
      EXPECT_GT(load_slope, 0.0);
      // Strong convexity surrogate: curvature >= d_i C / (n + 1).
      EXPECT_GE(load_slope * (1 + 1e-6), model.free_flow()[i] * big_c / (static_cast<double>(n) + 1));
      auto t2 = p.theta;
      t2[i] += h;
      const double theta_slope = (model.edge_costs(t2, p.y)[i] - c[i]) / h;
      EXPECT_LE(std::abs(theta_slope), big_c * (1 + 1e-6));
    }
  }
}

TEST(FractionalProperties, SocialCostDominatesPotential) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 7;
    const FractionalCost model(random_d(rng, n), 0.1 + trial % 50);
    auto p = random_point(rng, n);
    EXPECT_GE(model.social_cost(p.theta, p.y), model.potential(p.theta, p.y));
  }
}

TEST(FractionalProperties, LoadSlopesMatchCosts) {
  const FractionalCost model({1.0, 0.25}, 8.0);
  const std::vector<double> theta{0.5, 1.5};
  const auto slopes = model.load_slopes(theta);
  ASSERT_TRUE(slopes.has_value());
  EXPECT_DOUBLE_EQ((*slopes)[0], 8.0 / 1.5);
  EXPECT_DOUBLE_EQ((*slopes)[1], 0.25 * 8.0 / 2.5);
}

TEST(OtherFamilies, TwoLinkAndParallelKinks) {
  const TwoLinkCost two;
  const auto c = two.edge_costs(std::vector<double>{0.5}, std::vector<double>{1.0, 0.0});
  EXPECT_DOUBLE_EQ(c[0], 1.0);
  EXPECT_DOUBLE_EQ(c[1], 0.5);
  EXPECT_DOUBLE_EQ(two.potential(std::vector<double>{0.5}, std::vector<double>{0.5, 0.5}),
                   0.125 + 0.25);

  const ParallelKinksCost kinks(5, 4.0);
  // phi_1 = -theta, phi_2 = -2 theta + 1 (1-based).
  EXPECT_DOUBLE_EQ(kinks.offset(0, 1.5), -1.5);
  EXPECT_DOUBLE_EQ(kinks.offset(1, 1.5), -2.0);
  const auto ck = kinks.edge_costs(std::vector<double>{1.5}, std::vector<double>{0, 1, 0, 0, 0});
  EXPECT_DOUBLE_EQ(ck[1], 1.0 + 4.0 * -2.0);
  EXPECT_THROW(ParallelKinksCost(2, 4.0), ValidationError);
  EXPECT_THROW(ParallelKinksCost(5, 2.0), ValidationError);
}
