#include "ccg/zdd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <tuple>

#include "ccg/errors.hpp"
#include "zdd_internal.hpp"

namespace ccg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kExactLimit = std::uint64_t{1} << 63;

std::vector<std::size_t> invert_order(std::span<const Resource> order) {
  std::vector<std::size_t> level(order.size(), order.size());
  for (std::size_t p = 0; p < order.size(); ++p) {
    if (order[p] >= order.size() || level[order[p]] != order.size()) {
      throw ValidationError("variable order is not a permutation of [0, n)");
    }
    level[order[p]] = p;
  }
  return level;
}

bool checked_add(std::uint64_t a, std::uint64_t b, std::uint64_t& out) {
  return !__builtin_add_overflow(a, b, &out) && out <= kExactLimit;
}

}  // namespace

std::vector<Resource> identity_order(std::size_t n) {
  std::vector<Resource> order(n);
  std::iota(order.begin(), order.end(), Resource{0});
  return order;
}

// Builder ------------------------------------------------------------------------

ZddBuilder::ZddBuilder(std::vector<Resource> order) : order_(std::move(order)) {}

NodeRef ZddBuilder::make(Resource label, NodeRef lo, NodeRef hi) {
  if (hi == kBottom) return lo;
  const Key key{label, lo, hi};
  if (auto it = unique_.find(key); it != unique_.end()) return it->second;
  const auto ref = static_cast<NodeRef>(nodes_.size() + 2);
  nodes_.push_back({label, lo, hi});
  unique_.emplace(key, ref);
  return ref;
}

Zdd ZddBuilder::finish(NodeRef root) && {
  std::vector<bool> reachable(nodes_.size() + 2, false);
  reachable[root] = true;
  for (std::size_t ref = nodes_.size() + 1; ref >= 2; --ref) {
    if (!reachable[ref]) continue;
    const ZddNode& n = nodes_[ref - 2];
    reachable[n.lo] = reachable[n.hi] = true;
  }
  std::vector<NodeRef> remap(nodes_.size() + 2, kBottom);
  remap[kTop] = kTop;
  std::vector<ZddNode> kept;
  for (std::size_t ref = 2; ref < nodes_.size() + 2; ++ref) {
    if (!reachable[ref]) continue;
    const ZddNode& n = nodes_[ref - 2];
    remap[ref] = static_cast<NodeRef>(kept.size() + 2);
    kept.push_back({n.label, remap[n.lo], remap[n.hi]});
  }
  Zdd zdd;
  zdd.level_ = invert_order(order_);
  zdd.order_ = std::move(order_);
  zdd.nodes_ = std::move(kept);
  zdd.root_ = remap[root];
  return zdd;
}

// Zdd ------------------------------------------------------------------------------

Zdd Zdd::from_nodes(std::size_t resource_count, std::vector<Resource> variable_order,
                    std::vector<ZddNode> nodes, NodeRef root) {
  if (variable_order.empty()) variable_order = identity_order(resource_count);
  if (variable_order.size() != resource_count) {
    throw ValidationError("variable order length does not match resource count");
  }
  Zdd zdd;
  zdd.level_ = invert_order(variable_order);
  zdd.order_ = std::move(variable_order);
  zdd.nodes_ = std::move(nodes);
  zdd.root_ = root;
  zdd.check_invariants();
  return zdd;
}

void Zdd::check_invariants() const {
  const std::size_t n = order_.size();
  if (level_.size() != n) throw ValidationError("level table does not match variable order");
  const std::size_t refs = nodes_.size() + 2;
  if (root_ >= refs) throw ValidationError("root reference out of range");
  if (is_terminal(root_) && !nodes_.empty()) {
    throw ValidationError("terminal-rooted diagram has unreachable nodes");
  }
  std::set<std::tuple<Resource, NodeRef, NodeRef>> seen;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ZddNode& v = nodes_[i];
    const auto ref = static_cast<NodeRef>(i + 2);
    if (v.label >= n) throw ValidationError("node label out of range");
    if (v.lo >= ref || v.hi >= ref) {
      throw ValidationError("child reference not below its parent (cycle or bad ordering)");
    }
    if (v.hi == kBottom) throw ValidationError("node with hi = bottom violates zero-suppression");
    for (NodeRef c : {v.lo, v.hi}) {
      if (!is_terminal(c) && level_[nodes_[c - 2].label] <= level_[v.label]) {
        throw ValidationError("labels do not increase along a path");
      }
    }
    if (!seen.emplace(v.label, v.lo, v.hi).second) {
      throw ValidationError("duplicate node violates the merge rule");
    }
  }
  std::vector<bool> reachable(refs, false);
  reachable[root_] = true;
  for (std::size_t ref = refs - 1; ref >= 2; --ref) {
    if (!reachable[ref]) throw ValidationError("node " + std::to_string(ref) + " is unreachable");
    reachable[nodes_[ref - 2].lo] = reachable[nodes_[ref - 2].hi] = true;
  }
}

Zdd Zdd::from_family(std::size_t resource_count, std::span<const Strategy> family,
                     std::vector<Resource> variable_order) {
  if (variable_order.empty()) variable_order = identity_order(resource_count);
  if (variable_order.size() != resource_count) {
    throw ValidationError("variable order length does not match resource count");
  }
  const auto level = invert_order(variable_order);
  // Each member as ascending levels; the set removes duplicates.
  std::set<std::vector<std::size_t>> members;
  for (const Strategy& s : family) {
    s.check_bounds(resource_count);
    std::vector<std::size_t> lv;
    for (Resource r : s.items()) lv.push_back(level[r]);
    std::sort(lv.begin(), lv.end());
    members.insert(std::move(lv));
  }
  std::vector<std::vector<std::size_t>> sets(members.begin(), members.end());

  ZddBuilder builder(variable_order);
  // items holds (member index, cursor into that member's levels); compiles
  // the listed members restricted to positions >= p.
  auto build = [&](auto& self, std::vector<std::pair<std::size_t, std::size_t>>& items,
                   std::size_t p) -> NodeRef {
    if (items.empty()) return kBottom;
    if (p == resource_count) return kTop;
    std::vector<std::pair<std::size_t, std::size_t>> with, without;
    for (auto [m, c] : items) {
      if (c < sets[m].size() && sets[m][c] == p) {
        with.emplace_back(m, c + 1);
      } else {
        without.emplace_back(m, c);
      }
    }
    const NodeRef hi = self(self, with, p + 1);
    const NodeRef lo = self(self, without, p + 1);
    return builder.make(variable_order[p], lo, hi);
  };
  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (std::size_t m = 0; m < sets.size(); ++m) all.emplace_back(m, 0);
  const NodeRef root = build(build, all, 0);
  return std::move(builder).finish(root);
}

// Queries ----------------------------------------------------------------------------

FamilyCount count(const Zdd& zdd) {
  const std::size_t refs = zdd.node_count() + 2;
  std::vector<double> logn(refs, kNegInf);
  std::vector<std::uint64_t> exact(refs, 0);
  logn[kTop] = 0.0;
  exact[kTop] = 1;
  bool exact_ok = true;
  for (std::size_t ref = 2; ref < refs; ++ref) {
    const ZddNode& v = zdd.nodes()[ref - 2];
    logn[ref] = log_add_exp(logn[v.lo], logn[v.hi]);
    if (exact_ok) exact_ok = checked_add(exact[v.lo], exact[v.hi], exact[ref]);
  }
  FamilyCount out;
  out.log_count = logn[zdd.root()];
  if (exact_ok) out.exact = exact[zdd.root()];
  return out;
}

std::vector<Strategy> enumerate(const Zdd& zdd, std::size_t cap) {
  const FamilyCount c = count(zdd);
  if (!c.exact || *c.exact > cap) {
    throw CapExceededError("family has more than " + std::to_string(cap) + " strategies");
  }
  std::vector<Strategy> out;
  out.reserve(static_cast<std::size_t>(*c.exact));
  std::vector<Resource> path;
  auto walk = [&](auto& self, NodeRef ref) -> void {
    if (ref == kBottom) return;
    if (ref == kTop) {
      out.push_back(Strategy::from_indices(path));
      return;
    }
    const ZddNode& v = zdd.node(ref);
    self(self, v.lo);
    path.push_back(v.label);
    self(self, v.hi);
    path.pop_back();
  };
  walk(walk, zdd.root());
  std::sort(out.begin(), out.end());
  return out;
}

MinCostResult min_cost(const Zdd& zdd, std::span<const double> weights) {
  if (weights.size() != zdd.resource_count()) {
    throw ValidationError("weight vector length does not match resource count");
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw ValidationError("min_cost requires finite weights");
  }
  if (zdd.root() == kBottom) throw EmptyFamilyError("min_cost over an empty family");

  const std::size_t refs = zdd.node_count() + 2;
  std::vector<double> cost(refs, std::numeric_limits<double>::infinity());
  std::vector<bool> take_hi(refs, false);
  cost[kTop] = 0.0;
  for (std::size_t ref = 2; ref < refs; ++ref) {
    const ZddNode& v = zdd.nodes()[ref - 2];
    const double via_hi = weights[v.label] + cost[v.hi];
    if (via_hi < cost[v.lo]) {
      cost[ref] = via_hi;
      take_hi[ref] = true;
    } else {
      cost[ref] = cost[v.lo];
    }
  }
  std::vector<Resource> items;
  for (NodeRef ref = zdd.root(); !Zdd::is_terminal(ref);) {
    const ZddNode& v = zdd.node(ref);
    if (take_hi[ref]) {
      items.push_back(v.label);
      ref = v.hi;
    } else {
      ref = v.lo;
    }
  }
  MinCostResult out;
  out.strategy = Strategy::from_indices(std::move(items));
  out.cost = out.strategy.cost(weights);
  return out;
}

// Length-refined counts -----------------------------------------------------------------

LengthCountTable::LengthCountTable(const Zdd& zdd) : root_(zdd.root()) {
  const std::size_t refs = zdd.node_count() + 2;
  std::vector<long> longest(refs, -1);
  longest[kTop] = 0;
  for (std::size_t ref = 2; ref < refs; ++ref) {
    const ZddNode& v = zdd.nodes()[ref - 2];
    longest[ref] = std::max(longest[v.lo], longest[v.hi] >= 0 ? longest[v.hi] + 1 : -1);
  }
  max_length_ = longest[root_] > 0 ? static_cast<std::size_t>(longest[root_]) : 0;

  const std::size_t w = width();
  log_.assign(refs * w, kNegInf);
  exact_.assign(refs * w, 0);
  bool exact_ok = true;
  log_[kTop * w + 0] = 0.0;
  exact_[kTop * w + 0] = 1;
  for (std::size_t ref = 2; ref < refs; ++ref) {
    const ZddNode& v = zdd.nodes()[ref - 2];
    for (std::size_t r = 0; r < w; ++r) {
      const double from_hi = r > 0 ? log_[v.hi * w + r - 1] : kNegInf;
      log_[ref * w + r] = log_add_exp(log_[v.lo * w + r], from_hi);
      if (exact_ok) {
        const std::uint64_t hi_count = r > 0 ? exact_[v.hi * w + r - 1] : 0;
        exact_ok = checked_add(exact_[v.lo * w + r], hi_count, exact_[ref * w + r]);
      }
    }
  }
  if (!exact_ok) exact_.clear();
  for (std::size_t r = 0; r < w; ++r) {
    if (log_[root_ * w + r] > kNegInf) feasible_.push_back(r);
  }
}

double LengthCountTable::log_count(NodeRef ref, std::size_t r) const {
  if (r > max_length_) return kNegInf;
  return log_.at(ref * width() + r);
}

std::optional<std::uint64_t> LengthCountTable::exact_count(NodeRef ref, std::size_t r) const {
  if (exact_.empty()) return std::nullopt;
  if (r > max_length_) return 0;
  return exact_.at(ref * width() + r);
}

LengthCountTable count_by_length(const Zdd& zdd) { return LengthCountTable(zdd); }

}  // namespace ccg
