#pragma once

#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "ccg/congestion.hpp"
#include "ccg/strategy.hpp"

namespace ccg {

/// Minimizes the potential over the convex hull of `family` by accelerated
/// projected gradient on the strategy weights. Test oracle for families of
/// at most `cap` members; needs a model that reports load slopes.
std::vector<double> brute_force_equilibrium(const CostFamily& model, std::span<const double> theta,
                                            std::span<const Strategy> family,
                                            std::size_t cap = 50);

struct TwoLinkExample {
  double theta = 0.0;
};
struct ParallelKinksExample {
  std::size_t n = 5;
  double m = 4.0;
  double theta = 0.0;
};
using ClosedFormExample = std::variant<TwoLinkExample, ParallelKinksExample>;

/// Analytic equilibrium loads. Parallel kinks is defined for n >= 3, M > 2
/// and theta in [1/M, n - 1 - 1/M]; anything else is a ValidationError.
std::vector<double> closed_form_equilibrium(const ClosedFormExample& example);

/// Affine slice origin + sum_a s_a axes[a] with s_a on an evenly spaced grid.
struct ThetaSlice {
  std::vector<double> origin;
  std::vector<std::vector<double>> axes;  ///< one or two axes
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<std::size_t> points;        ///< grid points per axis, each >= 2
};

struct PhiGridPoint {
  std::vector<double> coords;  ///< slice coordinates s
  std::vector<double> theta;
  double phi = 0.0;
};

struct PhiGrid {
  std::vector<PhiGridPoint> points;  ///< row-major over the axes
  std::size_t argmin = 0;
  double min() const { return points.at(argmin).phi; }
};

PhiGrid brute_force_phi(const std::function<double(std::span<const double>)>& phi,
                        const ThetaSlice& slice);

/// Phi(theta) = F(theta, y*(theta)) with y* from brute_force_equilibrium.
std::function<double(std::span<const double>)> exact_phi(const CostFamily& model,
                                                         std::vector<Strategy> family);

}  // namespace ccg
