// Frontier-based top-down compilation of path and cycle families.
//
// Edges are processed in variable order. A subproblem is keyed by the degree
// (0, 1 or 2) and component label of every frontier vertex, plus a flag that
// records whether the single allowed structure has already been completed.
// Component labels are renumbered by first appearance so equivalent states
// compare equal.

#include <algorithm>
#include <string>
#include <unordered_map>

#include "ccg/errors.hpp"
#include "ccg/zdd.hpp"
#include "zdd_internal.hpp"

namespace ccg {

namespace {

enum class Kind { Paths, Hamiltonian, Cycles };

enum Role : std::uint8_t { kPlain = 0, kEndpoint = 1, kTerminal = 2 };

constexpr NodeRef kPending = 0xffffffffU;

struct Plan {
  Kind kind = Kind::Paths;
  std::vector<Resource> order;
  std::vector<Edge> ends;                       // endpoints of the edge at each position
  std::vector<std::vector<NodeId>> entering;    // vertices first seen at position p
  std::vector<std::vector<NodeId>> leaving;     // vertices last seen at position p
  std::vector<std::vector<NodeId>> frontier;    // vertices live before position p
  std::vector<std::uint8_t> role;
};

class FrontierCompiler {
 public:
  explicit FrontierCompiler(const Plan& plan) : plan_(plan) {}

  /// Child of `state` at position p. Returns a terminal, or kPending with the
  /// encoded next state written to `next`.
  NodeRef step(std::size_t p, const std::string& state, bool take, std::string& next) const {
    const auto& front = plan_.frontier[p];
    const auto& enter = plan_.entering[p];

    work_.clear();
    std::merge(front.begin(), front.end(), enter.begin(), enter.end(), std::back_inserter(work_));
    const std::size_t w = work_.size();
    deg_.assign(w, 0);
    comp_.assign(w, 0);
    alive_.assign(w, 1);
    for (std::size_t j = 0, f = 0; j < w; ++j) {
      if (f < front.size() && front[f] == work_[j]) {
        deg_[j] = static_cast<unsigned char>(state[2 * f]);
        comp_[j] = static_cast<unsigned char>(state[2 * f + 1]);
        ++f;
      } else {
        comp_[j] = 1000 + static_cast<int>(j);
      }
    }
    bool done = state.back() != 0;

    if (take) {
      if (done) return kBottom;
      const Edge& e = plan_.ends[p];
      const std::size_t a = index_of(e.u), b = index_of(e.v);
      if (deg_[a] >= limit(e.u) || deg_[b] >= limit(e.v)) return kBottom;
      if (comp_[a] == comp_[b] && plan_.kind != Kind::Cycles) return kBottom;
      ++deg_[a];
      ++deg_[b];
      const int from = comp_[b], to = comp_[a];
      for (int& c : comp_) {
        if (c == from) c = to;
      }
    }

    for (NodeId v : plan_.leaving[p]) {
      const std::size_t j = index_of(v);
      if (!final_degree_ok(v, deg_[j])) return kBottom;
      if (deg_[j] > 0) {
        bool closed = true;
        for (std::size_t k = 0; k < w; ++k) {
          if (k != j && alive_[k] && comp_[k] == comp_[j]) {
            closed = false;
            break;
          }
        }
        if (closed) {
          if (done) return kBottom;
          done = true;
          for (std::size_t k = 0; k < w; ++k) {
            if (k != j && alive_[k] && deg_[k] > 0) return kBottom;
          }
        }
      }
      alive_[j] = 0;
    }

    if (p + 1 == plan_.order.size()) return done ? kTop : kBottom;

    next.clear();
    relabel_.clear();
    for (std::size_t j = 0; j < w; ++j) {
      if (!alive_[j]) continue;
      auto it = std::find(relabel_.begin(), relabel_.end(), comp_[j]);
      const auto label = static_cast<std::size_t>(it - relabel_.begin());
      if (it == relabel_.end()) relabel_.push_back(comp_[j]);
      next.push_back(static_cast<char>(deg_[j]));
      next.push_back(static_cast<char>(label));
    }
    next.push_back(static_cast<char>(done ? 1 : 0));
    return kPending;
  }

 private:
  std::size_t index_of(NodeId v) const {
    return static_cast<std::size_t>(std::lower_bound(work_.begin(), work_.end(), v) - work_.begin());
  }

  int limit(NodeId v) const {
    if (plan_.kind != Kind::Cycles && plan_.role[v] == kEndpoint) return 1;
    return 2;
  }

  bool final_degree_ok(NodeId v, int d) const {
    switch (plan_.kind) {
      case Kind::Paths:
        return plan_.role[v] == kEndpoint ? d == 1 : (d == 0 || d == 2);
      case Kind::Hamiltonian:
        return plan_.role[v] == kEndpoint ? d == 1 : d == 2;
      case Kind::Cycles:
        return plan_.role[v] == kTerminal ? d == 2 : (d == 0 || d == 2);
    }
    return false;
  }

  const Plan& plan_;
  mutable std::vector<NodeId> work_;
  mutable std::vector<int> deg_;
  mutable std::vector<int> comp_;
  mutable std::vector<char> alive_;
  mutable std::vector<int> relabel_;
};

Plan make_plan(const Network& net, const FamilySpec& spec, std::vector<Resource> order) {
  Plan plan;
  plan.order = std::move(order);
  plan.role.assign(static_cast<std::size_t>(net.node_count()) + 1, kPlain);
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, SteinerCycles>) {
          plan.kind = Kind::Cycles;
          for (NodeId v : f.terminals) plan.role[v] = kTerminal;
        } else {
          plan.kind = std::is_same_v<T, StPaths> ? Kind::Paths : Kind::Hamiltonian;
          plan.role[f.s] = plan.role[f.t] = kEndpoint;
        }
      },
      spec);

  const std::size_t n = plan.order.size();
  const auto size = static_cast<std::size_t>(net.node_count()) + 1;
  std::vector<std::size_t> first(size, n), last(size, 0);
  for (std::size_t p = 0; p < n; ++p) {
    const Edge& e = net.edge(plan.order[p]);
    plan.ends.push_back(e);
    for (NodeId v : {e.u, e.v}) {
      first[v] = std::min(first[v], p);
      last[v] = std::max(last[v], p);
    }
  }
  plan.entering.resize(n);
  plan.leaving.resize(n);
  plan.frontier.resize(n + 1);
  for (NodeId v = 1; v < static_cast<NodeId>(size); ++v) {
    if (first[v] == n) continue;
    plan.entering[first[v]].push_back(v);
    plan.leaving[last[v]].push_back(v);
    for (std::size_t p = first[v] + 1; p <= last[v]; ++p) plan.frontier[p].push_back(v);
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (plan.frontier[p].size() + plan.entering[p].size() > 255) {
      throw ValidationError("frontier wider than 255 vertices; choose another variable order");
    }
  }
  return plan;
}

bool required_nodes_present(const Network& net, const FamilySpec& spec) {
  auto active = [&](NodeId v) { return !net.incident(v).empty(); };
  return std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, SteinerCycles>) {
          return std::all_of(f.terminals.begin(), f.terminals.end(), active);
        } else {
          return active(f.s) && active(f.t);
        }
      },
      spec);
}

}  // namespace

Zdd build_family(const Network& net, const FamilySpec& spec, std::vector<Resource> variable_order) {
  validate(spec);
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        std::vector<NodeId> ids;
        if constexpr (std::is_same_v<T, SteinerCycles>) {
          ids = f.terminals;
        } else {
          ids = {f.s, f.t};
        }
        for (NodeId v : ids) {
          if (!net.has_node(v)) {
            throw ValidationError("family node " + std::to_string(v) + " is not in the network");
          }
        }
      },
      spec);

  const std::size_t n = net.edge_count();
  if (variable_order.empty()) variable_order = identity_order(n);
  if (variable_order.size() != n) {
    throw ValidationError("variable order length does not match edge count");
  }
  if (n == 0 || !required_nodes_present(net, spec)) {
    // Validate the order even for trivially empty families.
    return Zdd::from_nodes(n, std::move(variable_order), {}, kBottom);
  }

  const Plan plan = make_plan(net, spec, variable_order);
  const FrontierCompiler compiler(plan);

  // Unreduced diagram, one layer per position. Child references encode
  // terminals as 0/1 and a state s at the next layer as s + 2.
  std::vector<std::vector<std::pair<NodeRef, NodeRef>>> children(n);
  std::vector<std::string> layer{std::string(1, '\0')};
  std::string next;
  for (std::size_t p = 0; p < n; ++p) {
    std::unordered_map<std::string, NodeRef> next_index;
    std::vector<std::string> next_layer;
    children[p].reserve(layer.size());
    for (const std::string& state : layer) {
      NodeRef kids[2];
      for (int take = 0; take < 2; ++take) {
        NodeRef r = compiler.step(p, state, take == 1, next);
        if (r == kPending) {
          auto [it, inserted] = next_index.emplace(next, static_cast<NodeRef>(next_layer.size()));
          if (inserted) next_layer.push_back(next);
          r = it->second + 2;
        }
        kids[take] = r;
      }
      children[p].emplace_back(kids[0], kids[1]);
    }
    layer = std::move(next_layer);
  }

  ZddBuilder builder(variable_order);
  std::vector<NodeRef> below;  // reduced refs of the layer under construction's children
  for (std::size_t p = n; p-- > 0;) {
    std::vector<NodeRef> here(children[p].size());
    auto resolve = [&](NodeRef r) { return r < 2 ? r : below[r - 2]; };
    for (std::size_t i = 0; i < children[p].size(); ++i) {
      const auto [lo, hi] = children[p][i];
      here[i] = builder.make(variable_order[p], resolve(lo), resolve(hi));
    }
    below = std::move(here);
  }
  return std::move(builder).finish(below.at(0));
}

}  // namespace ccg
