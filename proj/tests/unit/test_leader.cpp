#include <gtest/gtest.h>

#include <cmath>
#include <mutex>
#include <numeric>

#include "ccg/errors.hpp"
#include "ccg/leader.hpp"
#include "ccg/oracles.hpp"
#include "ccg/zdd.hpp"

using namespace ccg;

namespace {

double norm(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::vector<double> values(const Theta& t) { return {t.values().begin(), t.values().end()}; }

void expect_in_theta(std::span<const double> theta, double tol = 1e-9) {
  double sum = 0.0;
  for (double x : theta) {
    EXPECT_GE(x, -1e-12);
    sum += x;
  }
  EXPECT_NEAR(sum, static_cast<double>(theta.size()), tol);
}

// Dense grid over the segment {(2 - s, s)} for the k = 2 projection example.
std::vector<double> grid_projection_2d(double v0, double v1) {
  double best_s = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 200000; ++i) {
    const double s = 2.0 * i / 200000.0;
    const double d = (2.0 - s - v0) * (2.0 - s - v0) + (s - v1) * (s - v1);
    if (d < best) {
      best = d;
      best_s = s;
    }
  }
  return {2.0 - best_s, best_s};
}

// Two links with d = (1, 0.6) and C = 10; the leader splits capacity 2.
struct TwoLinkLeader {
  TwoLinkLeader()
      : family{Strategy{0}, Strategy{1}},
        zdd(Zdd::from_family(2, family)),
        model({1.0, 0.6}, 10.0) {}
  PhiOracle oracle(std::size_t T) const {
    FwOptions o;
    o.T = T;
    return make_phi_oracle(model, LmoConfig::zdd_exact(zdd), o);
  }
  std::vector<Strategy> family;
  Zdd zdd;
  FractionalCost model;
};

}  // namespace

TEST(ProjectTheta, Examples) {
  EXPECT_EQ(values(project_theta(std::vector<double>{3.0, 3.0})), (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(values(project_theta(std::vector<double>{2.0, 0.0})), (std::vector<double>{2.0, 0.0}));
  const auto p = values(project_theta(std::vector<double>{3.0, -1.0}));
  EXPECT_EQ(p, (std::vector<double>{2.0, 0.0}));
  const auto grid = grid_projection_2d(3.0, -1.0);
  EXPECT_NEAR(p[0], grid[0], 1e-5);
  EXPECT_NEAR(p[1], grid[1], 1e-5);
  const auto q = values(project_theta(std::vector<double>{2.0, 1.0}));
  EXPECT_NEAR(q[0], 1.5, 1e-15);
  EXPECT_NEAR(q[1], 0.5, 1e-15);
  EXPECT_THROW(project_theta(std::vector<double>{1.0, NAN}), ValidationError);
  EXPECT_THROW(project_simplex(std::vector<double>{1.0, INFINITY}, 2.0), ValidationError);
}

TEST(ProjectTheta, FeasibleIdempotentNonexpansive) {
  Rng rng(5);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 2 + trial % 7;
    std::vector<double> a(k);
    std::vector<double> b(k);
    for (std::size_t i = 0; i < k; ++i) {
      a[i] = normal(rng);
      b[i] = normal(rng);
    }
    const auto pa = values(project_theta(a));
    const auto pb = values(project_theta(b));
    expect_in_theta(pa, 1e-12);
    expect_in_theta(pb, 1e-12);
    const auto again = values(project_theta(pa));
    for (std::size_t i = 0; i < k; ++i) EXPECT_NEAR(again[i], pa[i], 1e-12);
    EXPECT_LE(distance(pa, pb), distance(a, b) + 1e-12);
  }
}

TEST(ProjectTheta, InteriorFloor) {
  const auto p = project_theta_interior(std::vector<double>{2.0, 0.0}, 0.25);
  EXPECT_NEAR(p[0], 1.75, 1e-15);
  EXPECT_NEAR(p[1], 0.25, 1e-15);
  EXPECT_THROW(project_theta_interior(std::vector<double>{1.0, 1.0}, 1.5), ValidationError);
}

TEST(GradientMapping, Examples) {
  const std::vector<double> centre{1.0, 1.0};
  EXPECT_EQ(gradient_mapping_norm(centre, std::vector<double>{0.0, 0.0}, 0.5), 0.0);
  const std::vector<double> g{0.3, -0.3};
  EXPECT_NEAR(gradient_mapping_norm(centre, g, 0.5), norm(g), 1e-15);
  EXPECT_NEAR(gradient_mapping_norm(std::vector<double>{2.0, 0.0}, std::vector<double>{0.0, -1.0}, 1.0),
              std::sqrt(0.5), 1e-15);
}

TEST(Directions, Shapes) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto u = draw_direction(DirectionKind::Sphere, 4, false, rng);
    EXPECT_NEAR(norm(u), 1.0, 1e-12);
    const auto t = draw_direction(DirectionKind::Sphere, 4, true, rng);
    EXPECT_NEAR(norm(t), 1.0, 1e-12);
    EXPECT_NEAR(std::accumulate(t.begin(), t.end(), 0.0), 0.0, 1e-12);
    const auto r = draw_direction(DirectionKind::Rademacher, 4, false, rng);
    for (double x : r) EXPECT_EQ(std::abs(x), 1.0);
    const auto rt = draw_direction(DirectionKind::Rademacher, 4, true, rng);
    EXPECT_NEAR(std::accumulate(rt.begin(), rt.end(), 0.0), 0.0, 1e-12);
  }
  EXPECT_EQ(parse_direction_kind("rademacher"), DirectionKind::Rademacher);
  EXPECT_EQ(to_string(DirectionKind::Sphere), "sphere");
  EXPECT_THROW(parse_direction_kind("gaussian"), ValidationError);
}

TEST(TwoPointEstimate, LinearExamples) {
  const std::vector<double> a{1.0, 0.0};
  int calls = 0;
  auto phi = [&](std::span<const double> x) {
    ++calls;
    return std::inner_product(a.begin(), a.end(), x.begin(), 0.0);
  };
  const std::vector<double> theta{1.0, 1.0};
  const std::vector<std::vector<double>> along{{1.0, 0.0}};
  const auto g = two_point_estimate(phi, theta, 0.37, along);
  EXPECT_NEAR(g[0], 2.0, 1e-12);
  EXPECT_NEAR(g[1], 0.0, 1e-12);
  EXPECT_EQ(calls, 2);
  const std::vector<std::vector<double>> across{{0.0, 1.0}, {0.0, -1.0}, {0.0, 1.0}};
  const auto h = two_point_estimate(phi, theta, 0.05, across);
  EXPECT_EQ(h, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(calls, 8);
}

namespace {

// Mean and standard error of the single-direction estimator over `draws`
// full-space directions, each coordinate checked within 3 standard errors.
void expect_unbiased(const std::function<double(std::span<const double>)>& phi,
                     std::span<const double> theta, std::span<const double> target,
                     DirectionKind kind, bool tangent, std::uint64_t seed) {
  const std::size_t k = theta.size();
  const std::size_t draws = 100000;
  Rng rng(seed);
  std::vector<double> sum(k, 0.0);
  std::vector<double> sum_sq(k, 0.0);
  for (std::size_t n = 0; n < draws; ++n) {
    const std::vector<std::vector<double>> dirs{draw_direction(kind, k, tangent, rng)};
    const auto g = two_point_estimate(phi, theta, 0.05, dirs);
    for (std::size_t i = 0; i < k; ++i) {
      sum[i] += g[i];
      sum_sq[i] += g[i] * g[i];
    }
  }
  const double nd = static_cast<double>(draws);
  for (std::size_t i = 0; i < k; ++i) {
    const double mean = sum[i] / nd;
    const double var = (sum_sq[i] - nd * mean * mean) / (nd - 1.0);
    const double se = std::sqrt(var / nd);
    EXPECT_LE(std::abs(mean - target[i]), 3.0 * se + 1e-12) << "coordinate " << i;
  }
}

}  // namespace

TEST(TwoPointEstimate, MonteCarloLinear) {
  const std::vector<double> a{0.7, -1.2, 0.4};
  auto phi = [&](std::span<const double> x) {
    return std::inner_product(a.begin(), a.end(), x.begin(), 0.0);
  };
  const std::vector<double> theta{1.0, 1.0, 1.0};
  expect_unbiased(phi, theta, a, DirectionKind::Sphere, false, 41);
  // Raw Rademacher draws have E[uu^T] = I, so the k scaling inflates the mean by k.
  std::vector<double> scaled(a);
  for (double& x : scaled) x *= 3.0;
  expect_unbiased(phi, theta, scaled, DirectionKind::Rademacher, false, 42);
  // Tangent sphere draws have E[uu^T] = P / (k - 1) with P the centring projector.
  const double mean = std::accumulate(a.begin(), a.end(), 0.0) / 3.0;
  std::vector<double> tangent(3);
  for (std::size_t i = 0; i < 3; ++i) tangent[i] = 1.5 * (a[i] - mean);
  expect_unbiased(phi, theta, tangent, DirectionKind::Sphere, true, 43);
}

TEST(TwoPointEstimate, MonteCarloQuadratic) {
  const std::vector<double> centre{0.2, 1.9, 0.9};
  auto phi = [&](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - centre[i]) * (x[i] - centre[i]);
    return s;
  };
  const std::vector<double> theta{1.5, 0.5, 1.0};
  std::vector<double> grad(3);
  for (std::size_t i = 0; i < 3; ++i) grad[i] = 2.0 * (theta[i] - centre[i]);
  expect_unbiased(phi, theta, grad, DirectionKind::Sphere, false, 44);
}

TEST(ZoStackelberg, ZeroIterationsAuditsOnlyTheStart) {
  const TwoLinkLeader ex;
  ZoConfig cfg;
  cfg.K = 0;
  const std::vector<double> theta0{1.0, 1.0};
  const auto trace = zo_stackelberg(ex.oracle(300), theta0, cfg);
  ASSERT_EQ(trace.rows.size(), 1U);
  EXPECT_EQ(trace.rows[0].theta, theta0);
  EXPECT_EQ(trace.final_theta, theta0);
  EXPECT_NEAR(trace.rows[0].phi_hat, 2.625, 1e-3);
  EXPECT_FALSE(trace.rows[0].ghat_norm.has_value());
}

TEST(ZoStackelberg, ImprovesTwoLinkLeader) {
  const TwoLinkLeader ex;
  const auto exact = exact_phi(ex.model, ex.family);
  EXPECT_NEAR(exact(std::vector<double>{1.0, 1.0}), 2.625, 1e-9);
  EXPECT_NEAR(exact(std::vector<double>{0.0, 2.0}), 7.0 / 3.0, 1e-9);

  ZoConfig cfg;
  cfg.K = 60;
  cfg.seed = 7;
  const auto trace = zo_stackelberg(ex.oracle(300), std::vector<double>{1.0, 1.0}, cfg);
  ASSERT_EQ(trace.rows.size(), 61U);
  EXPECT_LT(trace.rows.back().phi_hat, trace.rows.front().phi_hat - 0.2);
  for (const auto& row : trace.rows) expect_in_theta(row.theta);
  expect_in_theta(trace.final_theta);
}

TEST(ZoStackelberg, SeededRunsAreIdentical) {
  const TwoLinkLeader ex;
  ZoConfig cfg;
  cfg.K = 10;
  cfg.seed = 3;
  cfg.directions = DirectionKind::Rademacher;
  const auto a = zo_stackelberg(ex.oracle(100), std::vector<double>{1.2, 0.8}, cfg);
  cfg.workers = 3;
  const auto b = zo_stackelberg(ex.oracle(100), std::vector<double>{1.2, 0.8}, cfg);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].theta, b.rows[i].theta);
    EXPECT_EQ(a.rows[i].phi_hat, b.rows[i].phi_hat);
    EXPECT_EQ(a.rows[i].ghat_norm, b.rows[i].ghat_norm);
  }
  EXPECT_EQ(a.final_theta, b.final_theta);
}

TEST(ZoStackelberg, InteriorizedQueriesStayFeasible) {
  for (auto kind : {DirectionKind::Sphere, DirectionKind::Rademacher}) {
    std::mutex mutex;
    std::vector<std::vector<double>> queries;
    const PhiOracle phi = [&](std::span<const double> theta, std::uint64_t) {
      std::lock_guard lock(mutex);
      queries.emplace_back(theta.begin(), theta.end());
      // Pulls the leader into the corner so the boundary is exercised.
      return PhiEvaluation{theta[0] + 0.1 * theta[1], 0.0, 0, 0};
    };
    ZoConfig cfg;
    cfg.K = 40;
    cfg.B = 3;
    cfg.rho = 0.2;
    cfg.eta = 0.3;
    cfg.interiorize = true;
    cfg.directions = kind;
    cfg.workers = 2;
    const auto trace = zo_stackelberg(phi, std::vector<double>{1.0, 1.0, 1.0, 1.0}, cfg);
    EXPECT_EQ(queries.size(), 41U + 40U * 6U);
    for (const auto& q : queries) expect_in_theta(q);
    EXPECT_LT(trace.final_theta[0], 0.05);
  }
}

TEST(ZoStackelberg, Validation) {
  const PhiOracle phi = [](std::span<const double>, std::uint64_t) { return PhiEvaluation{}; };
  ZoConfig cfg;
  cfg.B = 0;
  EXPECT_THROW(zo_stackelberg(phi, std::vector<double>{1.0, 1.0}, cfg), ValidationError);
  cfg = ZoConfig{};
  cfg.rho = 0.0;
  EXPECT_THROW(zo_stackelberg(phi, std::vector<double>{1.0, 1.0}, cfg), ValidationError);
  cfg = ZoConfig{};
  EXPECT_THROW(zo_stackelberg(phi, std::vector<double>{1.0, 2.0}, cfg), ValidationError);
  cfg.interiorize = true;
  cfg.rho = 3.0;
  EXPECT_THROW(zo_stackelberg(phi, std::vector<double>{1.0, 1.0}, cfg), ValidationError);
}
