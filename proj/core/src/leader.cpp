#include "ccg/leader.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "ccg/errors.hpp"
#include "ccg/parallel.hpp"
#include "ccg/sysinfo.hpp"

namespace ccg {

namespace {

double norm2(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

void require_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw ValidationError("projection input must be finite");
  }
}

}  // namespace

std::vector<double> project_simplex(std::span<const double> v, double total) {
  if (v.empty()) throw ValidationError("cannot project an empty vector");
  require_finite(v);
  if (!(total >= 0.0)) throw ValidationError("simplex total must be nonnegative");

  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    prefix += sorted[j];
    const double candidate = (prefix - total) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) tau = candidate;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - tau, 0.0);
  return out;
}

Theta project_theta(std::span<const double> v) {
  auto x = project_simplex(v, static_cast<double>(v.size()));
  // Absorb rounding so the sum check in Theta::make holds with margin.
  const double excess = std::accumulate(x.begin(), x.end(), 0.0) - static_cast<double>(x.size());
  auto largest = std::max_element(x.begin(), x.end());
  *largest = std::max(*largest - excess, 0.0);
  return Theta::make(std::move(x));
}

std::vector<double> project_theta_interior(std::span<const double> v, double floor) {
  const auto k = static_cast<double>(v.size());
  if (!(floor >= 0.0) || floor > 1.0) {
    throw ValidationError("interior floor must lie in [0, 1]");
  }
  std::vector<double> shifted(v.begin(), v.end());
  for (double& x : shifted) x -= floor;
  auto out = project_simplex(shifted, k - k * floor);
  for (double& x : out) x += floor;
  return out;
}

double gradient_mapping_norm(std::span<const double> theta, std::span<const double> g,
                             double eta) {
  if (theta.size() != g.size()) throw ValidationError("theta and g differ in length");
  if (!(eta > 0.0)) throw ValidationError("eta must be positive");
  std::vector<double> step(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) step[i] = theta[i] - eta * g[i];
  const auto projected = project_theta(step);
  double sq = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double d = theta[i] - projected[i];
    sq += d * d;
  }
  return std::sqrt(sq) / eta;
}

DirectionKind parse_direction_kind(std::string_view text) {
  if (text == "sphere") return DirectionKind::Sphere;
  if (text == "rademacher") return DirectionKind::Rademacher;
  throw ValidationError("unknown direction kind '" + std::string(text) +
                        "' (expected sphere or rademacher)");
}

std::string_view to_string(DirectionKind kind) {
  return kind == DirectionKind::Sphere ? "sphere" : "rademacher";
}

std::vector<double> draw_direction(DirectionKind kind, std::size_t k, bool tangent, Rng& rng) {
  if (k == 0) throw ValidationError("direction dimension must be positive");
  std::vector<double> u(k);
  auto center = [&] {
    const double mean = std::accumulate(u.begin(), u.end(), 0.0) / static_cast<double>(k);
    for (double& x : u) x -= mean;
  };
  if (kind == DirectionKind::Rademacher) {
    for (double& x : u) x = (rng() >> 63) != 0 ? 1.0 : -1.0;
    if (tangent) center();
    return u;
  }
  if (tangent && k == 1) return u;  // the tangent space of a point is {0}
  std::normal_distribution<double> normal;
  for (;;) {
    for (double& x : u) x = normal(rng);
    if (tangent) center();
    const double len = norm2(u);
    if (len > 1e-12) {
      for (double& x : u) x /= len;
      return u;
    }
  }
}

std::vector<double> combine_two_point(std::span<const double> plus, std::span<const double> minus,
                                      std::span<const std::vector<double>> directions,
                                      double rho) {
  if (directions.empty()) throw ValidationError("two-point estimate needs B >= 1 directions");
  if (plus.size() != directions.size() || minus.size() != directions.size()) {
    throw ValidationError("two-point estimate needs one value pair per direction");
  }
  const std::size_t k = directions.front().size();
  const double scale =
      static_cast<double>(k) / (2.0 * rho * static_cast<double>(directions.size()));
  std::vector<double> g(k, 0.0);
  for (std::size_t i = 0; i < directions.size(); ++i) {
    const double diff = plus[i] - minus[i];
    for (std::size_t j = 0; j < k; ++j) g[j] += scale * diff * directions[i][j];
  }
  return g;
}

std::vector<double> two_point_estimate(
    const std::function<double(std::span<const double>)>& phi, std::span<const double> theta,
    double rho, std::span<const std::vector<double>> directions) {
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  std::vector<double> plus(directions.size());
  std::vector<double> minus(directions.size());
  std::vector<double> query(theta.size());
  for (std::size_t i = 0; i < directions.size(); ++i) {
    if (directions[i].size() != theta.size()) {
      throw ValidationError("direction length differs from theta");
    }
    for (std::size_t j = 0; j < theta.size(); ++j) query[j] = theta[j] + rho * directions[i][j];
    plus[i] = phi(query);
    for (std::size_t j = 0; j < theta.size(); ++j) query[j] = theta[j] - rho * directions[i][j];
    minus[i] = phi(query);
  }
  return combine_two_point(plus, minus, directions, rho);
}

void ZoConfig::validate() const {
  if (B < 1) throw ValidationError("B must be >= 1");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ValidationError("rho must be positive");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ValidationError("eta must be positive");
  if (workers < 1) throw ValidationError("workers must be >= 1");
}

PhiOracle make_phi_oracle(const CostFamily& model, LmoConfig lmo, FwOptions options) {
  lmo.validate();
  options.record_trace = false;
  return [&model, lmo, options](std::span<const double> theta, std::uint64_t seed) {
    FwOptions local = options;
    local.seed = seed;
    const auto fw = fw_equilibrium(model, theta, lmo, local);
    return PhiEvaluation{model.social_cost(theta, fw.y), fw.final_gap, fw.lmo_calls,
                         fw.samples_drawn};
  };
}

ZoTrace zo_stackelberg(const PhiOracle& phi, std::span<const double> theta0,
                       const ZoConfig& config) {
  config.validate();
  const std::size_t k = theta0.size();
  const Theta initial = Theta::make({theta0.begin(), theta0.end()});
  std::vector<double> theta(initial.values().begin(), initial.values().end());

  // Largest coordinate magnitude of a tangent direction, so that queries
  // around an interiorized base stay nonnegative.
  const double kd = static_cast<double>(k);
  const double reach = config.directions == DirectionKind::Sphere
                           ? std::sqrt((kd - 1.0) / kd)
                           : 2.0 * (kd - 1.0) / kd;
  const double margin = config.rho * reach;
  if (config.interiorize && margin > 1.0) {
    throw ValidationError("rho is too large to interiorize a simplex of dimension " +
                          std::to_string(k));
  }

  const auto start = std::chrono::steady_clock::now();
  ZoTrace trace;
  trace.rows.reserve(config.K + 1);
  for (std::size_t t = 0; t <= config.K; ++t) {
    const bool update = t < config.K;
    const std::uint64_t iter_seed = split_seed(config.seed, t);
    Rng direction_rng(split_seed(iter_seed, 0));

    std::vector<std::vector<double>> directions;
    if (update) {
      for (std::size_t i = 0; i < config.B; ++i) {
        directions.push_back(draw_direction(config.directions, k, true, direction_rng));
      }
    }
    const std::vector<double> base =
        config.interiorize && update ? project_theta_interior(theta, margin) : theta;

    // Query 0 audits theta; queries 2i+1 and 2i+2 are base +- rho u_i and
    // share a seed so their inner noise cancels in the difference.
    std::vector<std::vector<double>> queries{theta};
    std::vector<std::uint64_t> seeds{split_seed(iter_seed, 1)};
    for (std::size_t i = 0; i < directions.size(); ++i) {
      for (double sign : {1.0, -1.0}) {
        std::vector<double> q(k);
        for (std::size_t j = 0; j < k; ++j) q[j] = base[j] + sign * config.rho * directions[i][j];
        if (config.interiorize) {
          const auto projected = project_theta(q);
          q.assign(projected.values().begin(), projected.values().end());
        }
        queries.push_back(std::move(q));
        seeds.push_back(split_seed(iter_seed, 2 + i));
      }
    }

    std::vector<PhiEvaluation> results(queries.size());
    parallel_for(queries.size(), config.workers,
                 [&](std::size_t q) { results[q] = phi(queries[q], seeds[q]); });

    ZoTraceRow row;
    row.outer_iter = t;
    row.theta = theta;
    row.phi_hat = results[0].phi;
    row.audit_gap = results[0].gap;
    for (const auto& r : results) {
      row.lmo_calls += r.lmo_calls;
      row.samples_drawn += r.samples_drawn;
    }

    if (update) {
      std::vector<double> plus(config.B);
      std::vector<double> minus(config.B);
      double max_gap = 0.0;
      for (std::size_t i = 0; i < config.B; ++i) {
        plus[i] = results[2 * i + 1].phi;
        minus[i] = results[2 * i + 2].phi;
        max_gap = std::max({max_gap, results[2 * i + 1].gap, results[2 * i + 2].gap});
      }
      const auto g = combine_two_point(plus, minus, directions, config.rho);
      row.ghat_norm = norm2(g);
      row.grad_map_norm = gradient_mapping_norm(theta, g, config.eta);
      row.max_inner_gap = max_gap;

      std::vector<double> step(k);
      for (std::size_t j = 0; j < k; ++j) step[j] = theta[j] - config.eta * g[j];
      const auto next = project_theta(step);
      theta.assign(next.values().begin(), next.values().end());
    }
    row.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    row.peak_memory_bytes = peak_memory_bytes();
    trace.rows.push_back(std::move(row));
  }
  trace.final_theta = theta;
  return trace;
}

}  // namespace ccg
