#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace ccg {

/// Index of a resource (an undirected edge of the network), in [0, n).
using Resource = std::uint32_t;

/// A feasible strategy: a sorted, duplicate-free set of resource indices.
class Strategy {
 public:
  Strategy() = default;
  Strategy(std::initializer_list<Resource> items);

  /// Sorts and validates; throws ValidationError on duplicates.
  static Strategy from_indices(std::vector<Resource> items);
  /// Support of a 0/1 vector. Entries other than 0 and 1 are rejected.
  static Strategy from_incidence(std::span<const double> indicator);

  std::span<const Resource> items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  bool contains(Resource r) const noexcept;

  /// Throws ValidationError if some index is >= n.
  void check_bounds(std::size_t n) const;
  std::vector<double> incidence(std::size_t n) const;
  /// Sum of `weights` over the members.
  double cost(std::span<const double> weights) const;

  std::string to_string() const;

  friend auto operator<=>(const Strategy&, const Strategy&) = default;
  friend bool operator==(const Strategy&, const Strategy&) = default;

 private:
  std::vector<Resource> items_;
};

}  // namespace ccg
