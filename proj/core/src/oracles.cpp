#include "ccg/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ccg/errors.hpp"
#include "ccg/leader.hpp"

namespace ccg {

std::vector<double> brute_force_equilibrium(const CostFamily& model, std::span<const double> theta,
                                            std::span<const Strategy> family, std::size_t cap) {
  if (family.empty()) throw EmptyFamilyError("brute_force_equilibrium: empty family");
  if (family.size() > cap) {
    throw CapExceededError("brute_force_equilibrium: family has " +
                           std::to_string(family.size()) + " members, cap is " +
                           std::to_string(cap));
  }
  const std::size_t n = model.resource_count();
  for (const auto& s : family) s.check_bounds(n);
  const auto slopes = model.load_slopes(theta);
  if (!slopes) throw ValidationError("brute_force_equilibrium needs a quadratic cost family");

  // L <= max slope * ||A||_1 * ||A||_inf for y = A lambda.
  std::size_t longest = 0;
  std::vector<std::size_t> uses(n, 0);
  for (const auto& s : family) {
    longest = std::max(longest, s.size());
    for (Resource r : s.items()) ++uses[r];
  }
  const double max_slope = *std::max_element(slopes->begin(), slopes->end());
  const double max_uses = static_cast<double>(*std::max_element(uses.begin(), uses.end()));
  double lipschitz = max_slope * static_cast<double>(longest) * max_uses;
  if (!(lipschitz > 0.0)) lipschitz = 1.0;

  const std::size_t k = family.size();
  auto load = [&](std::span<const double> lambda) {
    std::vector<double> y(n, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      for (Resource r : family[j].items()) y[r] += lambda[j];
    }
    return y;
  };
  auto gradient = [&](std::span<const double> lambda) {
    const auto c = model.edge_costs(theta, load(lambda));
    std::vector<double> g(k);
    for (std::size_t j = 0; j < k; ++j) g[j] = family[j].cost(c);
    return g;
  };
  auto value = [&](std::span<const double> lambda) { return model.potential(theta, load(lambda)); };
  auto step = [&](std::span<const double> point) {
    const auto g = gradient(point);
    std::vector<double> v(k);
    for (std::size_t j = 0; j < k; ++j) v[j] = point[j] - g[j] / lipschitz;
    return project_simplex(v, 1.0);
  };

  // FISTA with function-value restart; stops on the gradient-mapping norm.
  std::vector<double> x(k, 1.0 / static_cast<double>(k));
  std::vector<double> z = x;
  double fx = value(x);
  double t = 1.0;
  constexpr std::size_t kMaxIterations = 2'000'000;
  for (std::size_t it = 0; it < kMaxIterations; ++it) {
    auto next = step(z);
    const double f_next = value(next);
    if (f_next > fx) {
      // A plain 1/L step from x cannot increase f, so this is rounding at the optimum.
      if (z == x) break;
      z = x;  // restart momentum
      t = 1.0;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    for (std::size_t j = 0; j < k; ++j) z[j] = next[j] + ((t - 1.0) / t_next) * (next[j] - x[j]);
    t = t_next;
    x = std::move(next);
    fx = f_next;
    if (it % 16 == 0) {
      const auto probe = step(x);
      double sq = 0.0;
      for (std::size_t j = 0; j < k; ++j) sq += (probe[j] - x[j]) * (probe[j] - x[j]);
      if (std::sqrt(sq) * lipschitz < 1e-13) break;
    }
  }
  return load(x);
}

std::vector<double> closed_form_equilibrium(const ClosedFormExample& example) {
  if (const auto* two = std::get_if<TwoLinkExample>(&example)) {
    if (!std::isfinite(two->theta)) throw ValidationError("theta must be finite");
    const double y1 = std::clamp(two->theta, 0.0, 1.0);
    return {y1, 1.0 - y1};
  }
  const auto& pk = std::get<ParallelKinksExample>(example);
  if (pk.n < 3) throw ValidationError("parallel_kinks needs n >= 3");
  if (!(pk.m > 2.0)) throw ValidationError("parallel_kinks needs M > 2");
  const double lo = 1.0 / pk.m;
  const double hi = static_cast<double>(pk.n) - 1.0 - 1.0 / pk.m;
  if (!(pk.theta >= lo && pk.theta <= hi)) {
    throw ValidationError("parallel_kinks theta must lie in [1/M, n - 1 - 1/M]");
  }
  std::vector<double> y(pk.n, 0.0);
  // Nearest integer i in 1..n-2 decides which window or pure region applies.
  const double i = std::clamp(std::round(pk.theta), 1.0, static_cast<double>(pk.n) - 2.0);
  const auto idx = static_cast<std::size_t>(i) - 1;  // 0-based index of link i
  if (std::abs(pk.theta - i) <= 1.0 / pk.m) {
    y[idx] = 0.5 + 0.5 * pk.m * (i - pk.theta);
    y[idx + 1] = 0.5 - 0.5 * pk.m * (i - pk.theta);
  } else if (pk.theta < i) {
    y[idx] = 1.0;
  } else {
    y[idx + 1] = 1.0;
  }
  return y;
}

PhiGrid brute_force_phi(const std::function<double(std::span<const double>)>& phi,
                        const ThetaSlice& slice) {
  const std::size_t dims = slice.axes.size();
  if (dims < 1 || dims > 2) throw ValidationError("theta slice must have one or two axes");
  if (slice.lo.size() != dims || slice.hi.size() != dims || slice.points.size() != dims) {
    throw ValidationError("theta slice bounds must match its axes");
  }
  for (std::size_t a = 0; a < dims; ++a) {
    if (slice.axes[a].size() != slice.origin.size()) {
      throw ValidationError("theta slice axis length differs from origin");
    }
    if (slice.points[a] < 2) throw ValidationError("theta slice needs >= 2 points per axis");
  }

  auto coordinate = [&](std::size_t a, std::size_t j) {
    const double frac = static_cast<double>(j) / static_cast<double>(slice.points[a] - 1);
    return slice.lo[a] + frac * (slice.hi[a] - slice.lo[a]);
  };
  const std::size_t second = dims == 2 ? slice.points[1] : 1;

  PhiGrid grid;
  for (std::size_t j0 = 0; j0 < slice.points[0]; ++j0) {
    for (std::size_t j1 = 0; j1 < second; ++j1) {
      PhiGridPoint p;
      p.coords.push_back(coordinate(0, j0));
      if (dims == 2) p.coords.push_back(coordinate(1, j1));
      p.theta = slice.origin;
      for (std::size_t a = 0; a < dims; ++a) {
        for (std::size_t i = 0; i < p.theta.size(); ++i) p.theta[i] += p.coords[a] * slice.axes[a][i];
      }
      p.phi = phi(p.theta);
      if (grid.points.empty() || p.phi < grid.points[grid.argmin].phi) {
        grid.argmin = grid.points.size();
      }
      grid.points.push_back(std::move(p));
    }
  }
  return grid;
}

std::function<double(std::span<const double>)> exact_phi(const CostFamily& model,
                                                         std::vector<Strategy> family) {
  return [&model, family = std::move(family)](std::span<const double> theta) {
    const auto y = brute_force_equilibrium(model, theta, family);
    return model.social_cost(theta, y);
  };
}

}  // namespace ccg
