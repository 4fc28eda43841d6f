#include "ccg/equilibrium.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "ccg/errors.hpp"

namespace ccg {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

// LmoConfig ------------------------------------------------------------------------

LmoConfig LmoConfig::shortest_path(const Network& net, NodeId s, NodeId t) {
  LmoConfig c;
  c.kind = LmoKind::ShortestPath;
  c.network = &net;
  c.s = s;
  c.t = t;
  return c;
}

LmoConfig LmoConfig::zdd_exact(const Zdd& zdd) {
  LmoConfig c;
  c.kind = LmoKind::ZddExact;
  c.zdd = &zdd;
  return c;
}

LmoConfig LmoConfig::zdd_subsampled(const ZddSampler& sampler, std::size_t m) {
  LmoConfig c;
  c.kind = LmoKind::ZddSubsampled;
  c.sampler = &sampler;
  c.zdd = &sampler.diagram();
  c.m = m;
  return c;
}

std::size_t LmoConfig::resource_count() const {
  validate();
  return kind == LmoKind::ShortestPath ? network->edge_count() : zdd->resource_count();
}

LmoConfig LmoConfig::exact() const {
  validate();
  if (kind == LmoKind::ZddSubsampled) return zdd_exact(sampler->diagram());
  return *this;
}

void LmoConfig::validate() const {
  switch (kind) {
    case LmoKind::ShortestPath:
      if (network == nullptr) throw ValidationError("shortest_path oracle needs a network");
      if (!network->has_node(s) || !network->has_node(t) || s == t) {
        throw ValidationError("shortest_path oracle needs distinct endpoints in the network");
      }
      break;
    case LmoKind::ZddExact:
      if (zdd == nullptr) throw ValidationError("zdd_exact oracle needs a diagram");
      break;
    case LmoKind::ZddSubsampled:
      if (sampler == nullptr) throw ValidationError("zdd_subsampled oracle needs a sampler");
      if (m < 1) throw ValidationError("subsampled oracle needs m >= 1");
      break;
  }
}

MinCostResult solve_lmo(const LmoConfig& lmo, std::span<const double> weights, Rng& rng) {
  switch (lmo.kind) {
    case LmoKind::ShortestPath: {
      auto path = shortest_path_lmo(*lmo.network, weights, lmo.s, lmo.t);
      const double cost = path.cost(weights);
      return {std::move(path), cost};
    }
    case LmoKind::ZddExact:
      return min_cost(*lmo.zdd, weights);
    case LmoKind::ZddSubsampled:
      return subsampled_lmo(*lmo.sampler, lmo.m, weights, rng);
  }
  throw ValidationError("unknown oracle kind");
}

// Line search ----------------------------------------------------------------------------

double line_search(const CostFamily& model, std::span<const double> theta,
                   std::span<const double> y, std::span<const double> s) {
  const auto slopes = model.load_slopes(theta);
  if (!slopes) return golden_section_line_search(model, theta, y, s);

  const auto g = model.edge_costs(theta, y);
  double a = 0.0;
  double b = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = s[i] - y[i];
    a += 0.5 * (*slopes)[i] * d * d;
    b += g[i] * d;
  }
  if (a <= 1e-15) return b < 0.0 ? 1.0 : 0.0;
  return std::clamp(-b / (2.0 * a), 0.0, 1.0);
}

double golden_section_line_search(const CostFamily& model, std::span<const double> theta,
                                  std::span<const double> y, std::span<const double> s,
                                  double tolerance) {
  std::vector<double> point(y.size());
  auto value = [&](double gamma) {
    for (std::size_t i = 0; i < y.size(); ++i) point[i] = y[i] + gamma * (s[i] - y[i]);
    return model.potential(theta, point);
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double hi = 1.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = value(x1);
  double f2 = value(x2);
  while (hi - lo > tolerance) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = value(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = value(x2);
    }
  }
  // The bracket never contains the endpoints exactly; compare against them.
  double best = 0.5 * (lo + hi);
  double best_value = value(best);
  for (double edge : {0.0, 1.0}) {
    const double v = value(edge);
    if (v < best_value) {
      best = edge;
      best_value = v;
    }
  }
  return best;
}

// Gap and residual -------------------------------------------------------------------------

double fw_gap(const CostFamily& model, std::span<const double> theta, std::span<const double> y,
              const LmoConfig& exact_oracle) {
  if (!exact_oracle.is_exact()) throw ValidationError("fw_gap needs an exact oracle");
  const auto c = model.edge_costs(theta, y);
  Rng unused(0);
  const auto best = solve_lmo(exact_oracle, c, unused);
  return dot(c, y) - best.cost;
}

double wardrop_residual(const CostFamily& model, std::span<const double> theta,
                        const FwResult& fw, const LmoConfig& exact_oracle) {
  if (fw.support.empty()) throw ValidationError("wardrop_residual needs a nonempty support");
  if (!exact_oracle.is_exact()) throw ValidationError("wardrop_residual needs an exact oracle");
  const auto c = model.edge_costs(theta, fw.y);
  Rng unused(0);
  const double best = solve_lmo(exact_oracle, c, unused).cost;
  double residual = 0.0;
  for (const auto& [strategy, weight] : fw.support) {
    if (weight > 1e-6) residual = std::max(residual, strategy.cost(c) - best);
  }
  return residual;
}

// Frank-Wolfe -----------------------------------------------------------------------------

FwResult fw_equilibrium(const CostFamily& model, std::span<const double> theta,
                        const LmoConfig& lmo, const FwOptions& options) {
  if (options.T < 1) throw ValidationError("fw_equilibrium needs T >= 1");
  lmo.validate();
  const std::size_t n = model.resource_count();
  if (lmo.resource_count() != n) {
    throw ValidationError("oracle has " + std::to_string(lmo.resource_count()) +
                          " resources but the cost model has " + std::to_string(n));
  }
  if (theta.size() != model.parameter_count()) {
    throw ValidationError("theta has length " + std::to_string(theta.size()) + ", expected " +
                          std::to_string(model.parameter_count()));
  }
  if (options.short_step && !(options.short_step->L > 0.0 && options.short_step->D2 > 0.0)) {
    throw ValidationError("short-step rule needs L > 0 and D^2 > 0");
  }

  const auto start = std::chrono::steady_clock::now();
  const LmoConfig exact = lmo.exact();
  Rng rng(options.seed);
  Rng unused(0);

  FwResult out;
  auto call_lmo = [&](std::span<const double> weights) {
    ++out.lmo_calls;
    if (lmo.kind == LmoKind::ZddSubsampled) out.samples_drawn += lmo.m;
    return solve_lmo(lmo, weights, rng);
  };

  Strategy s0;
  if (options.y0) {
    s0 = *options.y0;
    s0.check_bounds(n);
  } else {
    const std::vector<double> zero(n, 0.0);
    s0 = call_lmo(model.edge_costs(theta, zero)).strategy;
  }
  std::vector<double> y = s0.incidence(n);
  out.support.emplace(s0, 1.0);
  double f = model.potential(theta, y);

  std::optional<MinCostResult> exact_at_y;  // exact answer at the current y, reused by exact runs
  std::vector<double> vertex(n);
  std::vector<double> next(n);
  if (options.record_trace) out.trace.reserve(options.T);

  for (std::size_t t = 1; t <= options.T; ++t) {
    const auto g = model.edge_costs(theta, y);
    MinCostResult s;
    if (exact_at_y && lmo.is_exact()) {
      ++out.lmo_calls;
      s = std::move(*exact_at_y);
    } else {
      s = call_lmo(g);
    }
    exact_at_y.reset();

    std::fill(vertex.begin(), vertex.end(), 0.0);
    for (Resource r : s.strategy.items()) vertex[r] = 1.0;

    double gamma;
    if (options.short_step) {
      double slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) slope += g[i] * (y[i] - vertex[i]);
      gamma = std::clamp(slope / (options.short_step->L * options.short_step->D2), 0.0, 1.0);
    } else {
      gamma = line_search(model, theta, y, vertex);
    }

    if (gamma > 0.0) {
      for (std::size_t i = 0; i < n; ++i) next[i] = y[i] + gamma * (vertex[i] - y[i]);
      const double f_next = model.potential(theta, next);
      if (f_next > f) {
        gamma = 0.0;  // rounding pushed the step uphill
      } else {
        y.swap(next);
        f = f_next;
        if (gamma >= 1.0) {
          out.support.clear();
        } else {
          for (auto it = out.support.begin(); it != out.support.end();) {
            it->second *= 1.0 - gamma;
            it = it->second < 1e-12 ? out.support.erase(it) : std::next(it);
          }
        }
        out.support[s.strategy] += gamma;
      }
    }

    std::optional<double> gap;
    const bool audit = (options.gap_every > 0 && t % options.gap_every == 0) || t == options.T;
    if (audit) {
      const auto c = model.edge_costs(theta, y);
      auto best = solve_lmo(exact, c, unused);
      gap = dot(c, y) - best.cost;
      out.final_gap = *gap;
      ++out.gap_audits;
      exact_at_y = std::move(best);
    }
    if (options.record_trace) out.trace.push_back({t, f, gamma, gap, elapsed_ms(start)});
  }

  out.iterations = options.T;
  out.y = std::move(y);
  return out;
}

}  // namespace ccg
