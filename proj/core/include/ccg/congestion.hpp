#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ccg {

/// Leader parameter on the scaled simplex {theta >= 0, sum theta = k}.
class Theta {
 public:
  /// Throws ValidationError unless values are finite, >= 0 and sum to k
  /// within 1e-9.
  static Theta make(std::vector<double> values);
  /// All-ones barycenter.
  static Theta barycenter(std::size_t k);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
};

/// Throws ValidationError unless every entry lies in [-1e-12, 1 + 1e-12].
void validate_load(std::span<const double> y);

/// Separable, strictly increasing per-resource costs c_i(y_i; theta). The
/// gradient of the potential is the cost vector itself.
class CostFamily {
 public:
  virtual ~CostFamily() = default;

  virtual std::string name() const = 0;
  virtual std::size_t resource_count() const = 0;
  /// Dimension of theta expected by this family.
  virtual std::size_t parameter_count() const = 0;

  virtual void edge_costs(std::span<const double> theta, std::span<const double> y,
                          std::span<double> out) const = 0;
  virtual double potential(std::span<const double> theta, std::span<const double> y) const = 0;
  /// Leader objective; defaults to total cost sum_i y_i c_i(y_i).
  virtual double social_cost(std::span<const double> theta, std::span<const double> y) const;
  /// dc_i/dy_i when it does not depend on y (quadratic potential); lets line
  /// search use the closed form.
  virtual std::optional<std::vector<double>> load_slopes(std::span<const double> theta) const;

  std::vector<double> edge_costs(std::span<const double> theta, std::span<const double> y) const;
};

/// c_i(y_i; theta_i) = d_i (1 + C y_i / (theta_i + 1)).
///
/// Zero free-flow weights are raised to 1e-6 * max_j d_j so every cost stays
/// strictly increasing; `clamped_resources()` reports how many were touched.
class FractionalCost final : public CostFamily {
 public:
  FractionalCost(std::vector<double> free_flow, double c_scale);

  std::string name() const override { return "fractional"; }
  std::size_t resource_count() const override { return d_.size(); }
  std::size_t parameter_count() const override { return d_.size(); }
  void edge_costs(std::span<const double> theta, std::span<const double> y,
                  std::span<double> out) const override;
  double potential(std::span<const double> theta, std::span<const double> y) const override;
  double social_cost(std::span<const double> theta, std::span<const double> y) const override;
  std::optional<std::vector<double>> load_slopes(std::span<const double> theta) const override;
  using CostFamily::edge_costs;

  std::span<const double> free_flow() const noexcept { return d_; }
  double c_scale() const noexcept { return c_; }
  std::size_t clamped_resources() const noexcept { return clamped_; }

  /// theta_i + 1 is floored at this value when theta leaves the simplex.
  static constexpr double kMinDenominator = 1e-6;

 private:
  double denominator(double theta_i) const;
  std::vector<double> d_;
  double c_;
  std::size_t clamped_ = 0;
};

/// Two parallel links with c_1 = y_1 and c_2 = theta (scalar theta).
class TwoLinkCost final : public CostFamily {
 public:
  std::string name() const override { return "two_link"; }
  std::size_t resource_count() const override { return 2; }
  std::size_t parameter_count() const override { return 1; }
  void edge_costs(std::span<const double> theta, std::span<const double> y,
                  std::span<double> out) const override;
  double potential(std::span<const double> theta, std::span<const double> y) const override;
  std::optional<std::vector<double>> load_slopes(std::span<const double> theta) const override;
  using CostFamily::edge_costs;
};

/// n parallel links with c_i = y_i + M phi_i(theta),
/// phi_i(theta) = -i theta + i(i-1)/2 for 1-based i (scalar theta).
class ParallelKinksCost final : public CostFamily {
 public:
  ParallelKinksCost(std::size_t n, double m);

  std::string name() const override { return "parallel_kinks"; }
  std::size_t resource_count() const override { return n_; }
  std::size_t parameter_count() const override { return 1; }
  void edge_costs(std::span<const double> theta, std::span<const double> y,
                  std::span<double> out) const override;
  double potential(std::span<const double> theta, std::span<const double> y) const override;
  std::optional<std::vector<double>> load_slopes(std::span<const double> theta) const override;
  using CostFamily::edge_costs;

  double offset(std::size_t i, double theta) const;
  std::size_t links() const noexcept { return n_; }
  double m() const noexcept { return m_; }

 private:
  std::size_t n_;
  double m_;
};

}  // namespace ccg
