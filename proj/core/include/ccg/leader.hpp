#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ccg/congestion.hpp"
#include "ccg/equilibrium.hpp"
#include "ccg/random.hpp"

namespace ccg {

/// Euclidean projection onto {x >= 0, sum x = total} by sort and threshold.
std::vector<double> project_simplex(std::span<const double> v, double total);
/// Projection onto the scaled simplex with total = v.size().
Theta project_theta(std::span<const double> v);
/// Projection onto {x >= floor, sum x = v.size()}; requires floor <= 1.
std::vector<double> project_theta_interior(std::span<const double> v, double floor);

/// ||theta - P(theta - eta g)|| / eta.
double gradient_mapping_norm(std::span<const double> theta, std::span<const double> g,
                             double eta);

enum class DirectionKind { Sphere, Rademacher };
DirectionKind parse_direction_kind(std::string_view text);
std::string_view to_string(DirectionKind kind);

/// One random direction in R^k. Sphere draws are uniform on the unit sphere;
/// Rademacher draws have entries +-1. With `tangent`, the mean is removed so
/// that sum(u) = 0, and sphere draws are renormalized to unit length.
std::vector<double> draw_direction(DirectionKind kind, std::size_t k, bool tangent, Rng& rng);

/// (k / (2 rho B)) sum_i (plus_i - minus_i) u_i.
std::vector<double> combine_two_point(std::span<const double> plus, std::span<const double> minus,
                                      std::span<const std::vector<double>> directions,
                                      double rho);

/// Two-point estimator with exactly 2B sequential calls to `phi`.
std::vector<double> two_point_estimate(
    const std::function<double(std::span<const double>)>& phi, std::span<const double> theta,
    double rho, std::span<const std::vector<double>> directions);

struct ZoConfig {
  std::size_t K = 200;
  std::size_t B = 4;
  double rho = 0.05;
  double eta = 0.05;
  DirectionKind directions = DirectionKind::Sphere;
  bool interiorize = false;
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  void validate() const;
};

/// One inner solve: Phi_hat(theta) = F(theta, y_T(theta)).
struct PhiEvaluation {
  double phi = 0.0;
  double gap = 0.0;
  std::size_t lmo_calls = 0;
  std::size_t samples_drawn = 0;
};

/// Must be safe to call concurrently.
using PhiOracle = std::function<PhiEvaluation(std::span<const double> theta, std::uint64_t seed)>;

/// Phi oracle backed by fw_equilibrium; `options.seed` is replaced per call.
/// The model and oracle targets must outlive the returned function.
PhiOracle make_phi_oracle(const CostFamily& model, LmoConfig lmo, FwOptions options);

struct ZoTraceRow {
  std::size_t outer_iter = 0;
  std::vector<double> theta;
  double phi_hat = 0.0;        ///< audited value at theta
  double audit_gap = 0.0;
  /// Estimator fields are absent on the final row, which has no update.
  std::optional<double> ghat_norm;
  std::optional<double> grad_map_norm;
  std::optional<double> max_inner_gap;
  double wall_ms = 0.0;
  std::optional<std::uint64_t> peak_memory_bytes;
  std::size_t lmo_calls = 0;
  std::size_t samples_drawn = 0;
};

struct ZoTrace {
  std::vector<ZoTraceRow> rows;  ///< outer iterations 0..K
  std::vector<double> final_theta;
};

/// Projected zeroth-order descent on Theta starting at theta0.
ZoTrace zo_stackelberg(const PhiOracle& phi, std::span<const double> theta0,
                       const ZoConfig& config);

}  // namespace ccg
