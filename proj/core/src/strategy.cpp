#include "ccg/strategy.hpp"

#include <algorithm>
#include <sstream>

#include "ccg/errors.hpp"

namespace ccg {

Strategy::Strategy(std::initializer_list<Resource> items)
    : Strategy(from_indices(std::vector<Resource>(items))) {}

Strategy Strategy::from_indices(std::vector<Resource> items) {
  std::sort(items.begin(), items.end());
  if (std::adjacent_find(items.begin(), items.end()) != items.end()) {
    throw ValidationError("strategy contains a duplicate resource index");
  }
  Strategy s;
  s.items_ = std::move(items);
  return s;
}

Strategy Strategy::from_incidence(std::span<const double> indicator) {
  std::vector<Resource> items;
  for (std::size_t i = 0; i < indicator.size(); ++i) {
    if (indicator[i] == 1.0) {
      items.push_back(static_cast<Resource>(i));
    } else if (indicator[i] != 0.0) {
      throw ValidationError("incidence vector entry is neither 0 nor 1");
    }
  }
  Strategy s;
  s.items_ = std::move(items);
  return s;
}

bool Strategy::contains(Resource r) const noexcept {
  return std::binary_search(items_.begin(), items_.end(), r);
}

void Strategy::check_bounds(std::size_t n) const {
  if (!items_.empty() && items_.back() >= n) {
    throw ValidationError("strategy resource index " + std::to_string(items_.back()) +
                          " out of range for " + std::to_string(n) + " resources");
  }
}

std::vector<double> Strategy::incidence(std::size_t n) const {
  check_bounds(n);
  std::vector<double> v(n, 0.0);
  for (Resource r : items_) v[r] = 1.0;
  return v;
}

double Strategy::cost(std::span<const double> weights) const {
  double total = 0.0;
  for (Resource r : items_) total += weights[r];
  return total;
}

std::string Strategy::to_string() const {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (i) out << ' ';
    out << items_[i];
  }
  out << '}';
  return out.str();
}

}  // namespace ccg
