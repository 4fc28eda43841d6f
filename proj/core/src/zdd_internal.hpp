#pragma once

#include <cmath>
#include <limits>
#include <unordered_map>
#include <vector>

#include "ccg/zdd.hpp"

namespace ccg {

/// Hash-consing node factory shared by the compilers. `make` applies the
/// zero-suppression and merge rules, so every diagram it produces is reduced.
class ZddBuilder {
 public:
  explicit ZddBuilder(std::vector<Resource> order);

  NodeRef make(Resource label, NodeRef lo, NodeRef hi);
  /// Drops nodes unreachable from `root` and returns the finished diagram.
  Zdd finish(NodeRef root) &&;

 private:
  struct Key {
    Resource label;
    NodeRef lo;
    NodeRef hi;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::uint64_t h = k.label;
      h = h * 0x9e3779b97f4a7c15ULL ^ k.lo;
      h = h * 0x9e3779b97f4a7c15ULL ^ k.hi;
      return static_cast<std::size_t>(h ^ (h >> 29));
    }
  };

  std::vector<Resource> order_;
  std::vector<ZddNode> nodes_;
  std::unordered_map<Key, NodeRef, KeyHash> unique_;
};

inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace ccg
