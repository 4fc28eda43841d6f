#include "ccg/congestion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ccg/errors.hpp"

namespace ccg {

namespace {

void check_sizes(const CostFamily& f, std::span<const double> theta, std::span<const double> y) {
  if (theta.size() != f.parameter_count()) {
    throw ValidationError(f.name() + ": expected theta of length " +
                          std::to_string(f.parameter_count()) + ", got " +
                          std::to_string(theta.size()));
  }
  if (y.size() != f.resource_count()) {
    throw ValidationError(f.name() + ": expected load of length " +
                          std::to_string(f.resource_count()) + ", got " + std::to_string(y.size()));
  }
}

}  // namespace

Theta Theta::make(std::vector<double> values) {
  if (values.empty()) throw ValidationError("theta must be nonempty");
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("theta entries must be finite and >= 0");
    sum += v;
  }
  const auto k = static_cast<double>(values.size());
  if (std::abs(sum - k) > 1e-9) {
    throw ValidationError("theta must sum to " + std::to_string(values.size()) + " (got " +
                          std::to_string(sum) + ")");
  }
  Theta t;
  t.values_ = std::move(values);
  return t;
}

Theta Theta::barycenter(std::size_t k) { return make(std::vector<double>(k, 1.0)); }

void validate_load(std::span<const double> y) {
  for (double v : y) {
    if (!(v >= -1e-12 && v <= 1.0 + 1e-12)) throw ValidationError("load entry outside [0, 1]");
  }
}

// CostFamily ------------------------------------------------------------------------

double CostFamily::social_cost(std::span<const double> theta, std::span<const double> y) const {
  const auto c = edge_costs(theta, y);
  return std::inner_product(y.begin(), y.end(), c.begin(), 0.0);
}

std::optional<std::vector<double>> CostFamily::load_slopes(std::span<const double>) const {
  return std::nullopt;
}

std::vector<double> CostFamily::edge_costs(std::span<const double> theta,
                                           std::span<const double> y) const {
  std::vector<double> out(resource_count());
  edge_costs(theta, y, out);
  return out;
}

// FractionalCost ----------------------------------------------------------------------

FractionalCost::FractionalCost(std::vector<double> free_flow, double c_scale)
    : d_(std::move(free_flow)), c_(c_scale) {
  if (d_.empty()) throw ValidationError("fractional cost needs at least one resource");
  if (!(c_ > 0.0) || !std::isfinite(c_)) throw ValidationError("cost scale C must be positive");
  for (double d : d_) {
    if (!(d >= 0.0 && d <= 1.0)) throw ValidationError("free-flow weights must lie in [0, 1]");
  }
  const double floor = 1e-6 * *std::max_element(d_.begin(), d_.end());
  for (double& d : d_) {
    if (d < floor) {
      d = floor;
      ++clamped_;
    }
  }
}

double FractionalCost::denominator(double theta_i) const {
  return std::max(theta_i + 1.0, kMinDenominator);
}

void FractionalCost::edge_costs(std::span<const double> theta, std::span<const double> y,
                                std::span<double> out) const {
  check_sizes(*this, theta, y);
  for (std::size_t i = 0; i < d_.size(); ++i) {
    out[i] = d_[i] * (1.0 + c_ * y[i] / denominator(theta[i]));
  }
}

double FractionalCost::potential(std::span<const double> theta, std::span<const double> y) const {
  check_sizes(*this, theta, y);
  double f = 0.0;
  for (std::size_t i = 0; i < d_.size(); ++i) {
    f += d_[i] * y[i] + d_[i] * c_ * y[i] * y[i] / (2.0 * denominator(theta[i]));
  }
  return f;
}

double FractionalCost::social_cost(std::span<const double> theta,
                                   std::span<const double> y) const {
  check_sizes(*this, theta, y);
  double total = 0.0;
  for (std::size_t i = 0; i < d_.size(); ++i) {
    total += y[i] * d_[i] * (1.0 + c_ * y[i] / denominator(theta[i]));
  }
  return total;
}

std::optional<std::vector<double>> FractionalCost::load_slopes(
    std::span<const double> theta) const {
  std::vector<double> slope(d_.size());
  for (std::size_t i = 0; i < d_.size(); ++i) slope[i] = d_[i] * c_ / denominator(theta[i]);
  return slope;
}

// TwoLinkCost -------------------------------------------------------------------------

void TwoLinkCost::edge_costs(std::span<const double> theta, std::span<const double> y,
                             std::span<double> out) const {
  check_sizes(*this, theta, y);
  out[0] = y[0];
  out[1] = theta[0];
}

double TwoLinkCost::potential(std::span<const double> theta, std::span<const double> y) const {
  check_sizes(*this, theta, y);
  return 0.5 * y[0] * y[0] + theta[0] * y[1];
}

std::optional<std::vector<double>> TwoLinkCost::load_slopes(std::span<const double>) const {
  return std::vector<double>{1.0, 0.0};
}

// ParallelKinksCost -----------------------------------------------------------------------

ParallelKinksCost::ParallelKinksCost(std::size_t n, double m) : n_(n), m_(m) {
  if (n < 3) throw ValidationError("parallel_kinks needs n >= 3");
  if (!(m > 2.0)) throw ValidationError("parallel_kinks needs M > 2");
}

double ParallelKinksCost::offset(std::size_t i, double theta) const {
  const auto k = static_cast<double>(i + 1);
  return -k * theta + k * (k - 1.0) / 2.0;
}

void ParallelKinksCost::edge_costs(std::span<const double> theta, std::span<const double> y,
                                   std::span<double> out) const {
  check_sizes(*this, theta, y);
  for (std::size_t i = 0; i < n_; ++i) out[i] = y[i] + m_ * offset(i, theta[0]);
}

double ParallelKinksCost::potential(std::span<const double> theta,
                                    std::span<const double> y) const {
  check_sizes(*this, theta, y);
  double f = 0.0;
  for (std::size_t i = 0; i < n_; ++i) f += 0.5 * y[i] * y[i] + m_ * offset(i, theta[0]) * y[i];
  return f;
}

std::optional<std::vector<double>> ParallelKinksCost::load_slopes(std::span<const double>) const {
  return std::vector<double>(n_, 1.0);
}

}  // namespace ccg
