#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ccg/congestion.hpp"
#include "ccg/network.hpp"
#include "ccg/random.hpp"
#include "ccg/strategy.hpp"
#include "ccg/zdd.hpp"

namespace ccg {

enum class LmoKind { ShortestPath, ZddExact, ZddSubsampled };

/// Linear minimization oracle over the strategy family. Holds non-owning
/// pointers; the referenced network, diagram or sampler must outlive it.
struct LmoConfig {
  LmoKind kind = LmoKind::ZddExact;
  const Network* network = nullptr;
  NodeId s = 0;
  NodeId t = 0;
  const Zdd* zdd = nullptr;
  const ZddSampler* sampler = nullptr;
  std::size_t m = 1;

  static LmoConfig shortest_path(const Network& net, NodeId s, NodeId t);
  static LmoConfig zdd_exact(const Zdd& zdd);
  static LmoConfig zdd_subsampled(const ZddSampler& sampler, std::size_t m);

  bool is_exact() const noexcept { return kind != LmoKind::ZddSubsampled; }
  std::size_t resource_count() const;
  /// The exact oracle over the same family (identity for exact kinds).
  LmoConfig exact() const;
  void validate() const;
};

/// Best response to `weights`. `rng` is consulted only by the subsampled kind.
MinCostResult solve_lmo(const LmoConfig& lmo, std::span<const double> weights, Rng& rng);

struct FwOptions {
  std::size_t T = 3000;
  /// Exact gap audit cadence; 0 audits only at T.
  std::size_t gap_every = 100;
  std::uint64_t seed = 0;
  /// Initial vertex; defaults to the LMO answer at zero load.
  std::optional<Strategy> y0;
  /// Short-step rule min{max{<g, y - s>/(L D^2), 0}, 1} instead of exact line search.
  struct ShortStep {
    double L = 1.0;
    double D2 = 1.0;
  };
  std::optional<ShortStep> short_step;
  bool record_trace = true;
};

struct FwTraceRow {
  std::size_t iter = 0;
  double potential = 0.0;
  double gamma = 0.0;
  std::optional<double> gap;
  double wall_ms = 0.0;
};

struct FwResult {
  std::vector<double> y;
  std::vector<FwTraceRow> trace;
  std::size_t iterations = 0;
  std::size_t lmo_calls = 0;        ///< calls to the configured oracle
  std::size_t samples_drawn = 0;
  std::size_t gap_audits = 0;
  std::map<Strategy, double> support;
  double final_gap = 0.0;           ///< exact gap at y_T
};

/// Frank-Wolfe on the Beckmann potential over the load polytope.
FwResult fw_equilibrium(const CostFamily& model, std::span<const double> theta,
                        const LmoConfig& lmo, const FwOptions& options);

/// argmin over [0, 1] of gamma -> f(theta, y + gamma (s - y)).
double line_search(const CostFamily& model, std::span<const double> theta,
                   std::span<const double> y, std::span<const double> s);
/// Golden-section variant used when the model exposes no load slopes.
double golden_section_line_search(const CostFamily& model, std::span<const double> theta,
                                  std::span<const double> y, std::span<const double> s,
                                  double tolerance = 1e-12);

/// <c(y), y - s*> with s* from the exact oracle.
double fw_gap(const CostFamily& model, std::span<const double> theta, std::span<const double> y,
              const LmoConfig& exact_oracle);

/// Largest excess cost of a strategy carrying weight above 1e-6.
double wardrop_residual(const CostFamily& model, std::span<const double> theta,
                        const FwResult& fw, const LmoConfig& exact_oracle);

}  // namespace ccg
