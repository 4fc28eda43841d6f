#include "ccg/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "ccg/errors.hpp"

namespace ccg {

namespace {

std::string edge_name(NodeId a, NodeId b) {
  return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

}  // namespace

Network::Network(int node_count, std::vector<Edge> edges, std::vector<double> weights)
    : node_count_(node_count), edges_(std::move(edges)), weights_(std::move(weights)) {
  if (node_count_ <= 0) throw ValidationError("network must have a positive node count");
  if (weights_.size() != edges_.size()) {
    throw ValidationError("network has " + std::to_string(edges_.size()) + " edges but " +
                          std::to_string(weights_.size()) + " weights");
  }
  adjacency_.resize(static_cast<std::size_t>(node_count_) + 1);
  std::set<std::pair<NodeId, NodeId>> seen;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    Edge& e = edges_[i];
    if (e.u > e.v) std::swap(e.u, e.v);
    if (!has_node(e.u) || !has_node(e.v)) {
      throw ValidationError("edge " + edge_name(e.u, e.v) + " references a node outside [1, " +
                            std::to_string(node_count_) + "]");
    }
    if (e.u == e.v) throw ValidationError("self-loop at node " + std::to_string(e.u));
    if (!seen.emplace(e.u, e.v).second) {
      throw ValidationError("duplicate undirected edge " + edge_name(e.u, e.v));
    }
    if (!std::isfinite(weights_[i]) || weights_[i] < 0.0) {
      throw ValidationError("edge " + edge_name(e.u, e.v) + " has an invalid weight");
    }
    adjacency_[e.u].emplace_back(e.v, static_cast<Resource>(i));
    adjacency_[e.v].emplace_back(e.u, static_cast<Resource>(i));
  }
}

std::span<const std::pair<NodeId, Resource>> Network::incident(NodeId v) const {
  if (!has_node(v)) throw ValidationError("node " + std::to_string(v) + " does not exist");
  return adjacency_[static_cast<std::size_t>(v)];
}

std::optional<Resource> Network::find_edge(NodeId a, NodeId b) const {
  if (!has_node(a) || !has_node(b)) return std::nullopt;
  for (const auto& [w, e] : adjacency_[static_cast<std::size_t>(a)]) {
    if (w == b) return e;
  }
  return std::nullopt;
}

std::vector<NodeId> Network::active_nodes() const {
  std::vector<NodeId> out;
  for (NodeId v = 1; v <= node_count_; ++v) {
    if (!adjacency_[static_cast<std::size_t>(v)].empty()) out.push_back(v);
  }
  return out;
}

Network Network::with_weights(std::vector<double> weights) const {
  Network copy(node_count_, edges_, std::move(weights));
  copy.coordinates_ = coordinates_;
  copy.warnings_ = warnings_;
  return copy;
}

Network Network::with_coordinates(std::map<NodeId, Point> coords) const {
  Network copy = *this;
  copy.coordinates_ = std::move(coords);
  return copy;
}

Network Network::with_warning(std::string message) const {
  Network copy = *this;
  copy.warnings_.push_back(std::move(message));
  return copy;
}

// Families -----------------------------------------------------------------------

void validate(const FamilySpec& spec) {
  std::visit(
      [](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, SteinerCycles>) {
          if (f.terminals.empty()) throw ValidationError("steiner_cycles needs at least one terminal");
          std::set<NodeId> unique(f.terminals.begin(), f.terminals.end());
          if (unique.size() != f.terminals.size()) {
            throw ValidationError("steiner_cycles terminal set contains duplicates");
          }
        } else {
          if (f.s == f.t) throw ValidationError("path family requires s != t");
        }
      },
      spec);
}

std::string to_string(const FamilySpec& spec) {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, StPaths>) {
          return "st_paths(" + std::to_string(f.s) + "," + std::to_string(f.t) + ")";
        } else if constexpr (std::is_same_v<T, HamiltonianStPaths>) {
          return "hamiltonian_st_paths(" + std::to_string(f.s) + "," + std::to_string(f.t) + ")";
        } else {
          std::string out = "steiner_cycles(";
          for (std::size_t i = 0; i < f.terminals.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(f.terminals[i]);
          }
          return out + ")";
        }
      },
      spec);
}

// Preprocessing ----------------------------------------------------------------

Network symmetrize(const DirectedNetwork& net) {
  if (net.node_count <= 0) throw ValidationError("network must have a positive node count");
  std::map<std::pair<NodeId, NodeId>, double> merged;
  for (const Arc& a : net.arcs) {
    if (a.tail < 1 || a.tail > net.node_count || a.head < 1 || a.head > net.node_count) {
      throw ValidationError("arc " + edge_name(a.tail, a.head) + " references a node outside [1, " +
                            std::to_string(net.node_count) + "]");
    }
    if (!(a.free_flow_time >= 0.0) || !std::isfinite(a.free_flow_time)) {
      throw ValidationError("arc " + edge_name(a.tail, a.head) + " has an invalid free-flow time");
    }
    if (a.tail == a.head) continue;
    auto key = std::minmax(a.tail, a.head);
    auto [it, inserted] = merged.emplace(key, a.free_flow_time);
    if (!inserted) it->second = std::min(it->second, a.free_flow_time);
  }
  if (merged.empty()) throw ValidationError("network has no edges");

  std::vector<NodeId> parent(static_cast<std::size_t>(net.node_count) + 1);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<NodeId(NodeId)> find = [&](NodeId x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::vector<bool> touched(parent.size(), false);
  for (const auto& [key, w] : merged) {
    touched[key.first] = touched[key.second] = true;
    NodeId a = find(key.first), b = find(key.second);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  // Roots are the smallest node of each component, so scanning ids in order
  // visits components by their smallest member.
  std::map<NodeId, int> size_by_root;
  for (NodeId v = 1; v <= net.node_count; ++v) {
    if (touched[v]) ++size_by_root[find(v)];
  }
  NodeId best_root = 0;
  int best_size = 0;
  for (const auto& [root, size] : size_by_root) {
    if (size > best_size) {
      best_root = root;
      best_size = size;
    }
  }

  std::vector<Edge> edges;
  std::vector<double> weights;
  for (const auto& [key, w] : merged) {
    if (find(key.first) != best_root) continue;
    edges.push_back({key.first, key.second});
    weights.push_back(w);
  }
  return Network(net.node_count, std::move(edges), std::move(weights));
}

DirectedNetwork lift(const Network& net) {
  DirectedNetwork out;
  out.node_count = net.node_count();
  for (std::size_t i = 0; i < net.edge_count(); ++i) {
    Arc a;
    a.tail = net.edge(i).u;
    a.head = net.edge(i).v;
    a.free_flow_time = net.weights()[i];
    a.raw_attributes["free_flow_time"] = a.free_flow_time;
    out.arcs.push_back(std::move(a));
  }
  return out;
}

Network normalize_freeflow(const Network& net) {
  if (net.edge_count() == 0) throw ValidationError("cannot normalize a network without edges");
  const auto w = net.weights();
  const double peak = *std::max_element(w.begin(), w.end());
  if (peak <= 0.0) {
    return net.with_warning("all free-flow weights are zero; normalization skipped");
  }
  std::vector<double> scaled(w.begin(), w.end());
  for (double& x : scaled) x /= peak;
  return net.with_weights(std::move(scaled));
}

Network induced_subgraph(const Network& net, std::span<const NodeId> nodes) {
  std::set<NodeId> keep;
  for (NodeId v : nodes) {
    if (!net.has_node(v)) throw ValidationError("subgraph node " + std::to_string(v) + " does not exist");
    keep.insert(v);
  }
  std::vector<Edge> edges;
  std::vector<double> weights;
  for (std::size_t i = 0; i < net.edge_count(); ++i) {
    const Edge& e = net.edge(i);
    if (keep.count(e.u) && keep.count(e.v)) {
      edges.push_back(e);
      weights.push_back(net.weights()[i]);
    }
  }
  Network sub(net.node_count(), std::move(edges), std::move(weights));
  if (net.coordinates()) sub = sub.with_coordinates(*net.coordinates());
  return sub;
}

Network euclidean_weights(const Network& net) {
  if (!net.coordinates()) throw ValidationError("network has no node coordinates");
  const auto& coords = *net.coordinates();
  std::vector<double> weights;
  weights.reserve(net.edge_count());
  for (const Edge& e : net.edges()) {
    auto a = coords.find(e.u), b = coords.find(e.v);
    if (a == coords.end() || b == coords.end()) {
      throw ValidationError("missing coordinates for edge " + edge_name(e.u, e.v));
    }
    weights.push_back(std::hypot(a->second.x - b->second.x, a->second.y - b->second.y));
  }
  return net.with_weights(std::move(weights));
}

Strategy shortest_path_lmo(const Network& net, std::span<const double> weights, NodeId s,
                           NodeId t) {
  if (weights.size() != net.edge_count()) {
    throw ValidationError("weight vector length does not match edge count");
  }
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError("shortest_path_lmo requires finite nonnegative weights");
    }
  }
  if (!net.has_node(s) || !net.has_node(t)) throw ValidationError("source or target does not exist");
  if (s == t) throw ValidationError("shortest_path_lmo requires s != t");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr Resource kNone = std::numeric_limits<Resource>::max();
  const auto size = static_cast<std::size_t>(net.node_count()) + 1;
  std::vector<double> dist(size, kInf);
  std::vector<Resource> pred(size, kNone);
  std::vector<bool> done(size, false);

  using Entry = std::pair<double, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  dist[s] = 0.0;
  frontier.emplace(0.0, s);
  while (!frontier.empty()) {
    auto [d, v] = frontier.top();
    frontier.pop();
    if (done[v] || d > dist[v]) continue;
    done[v] = true;
    if (v == t) break;
    for (const auto& [w, e] : net.incident(v)) {
      if (done[w]) continue;
      const double nd = d + weights[e];
      if (nd < dist[w]) {
        dist[w] = nd;
        pred[w] = e;
        frontier.emplace(nd, w);
      } else if (nd == dist[w] && e < pred[w]) {
        pred[w] = e;
      }
    }
  }
  if (dist[t] == kInf) {
    throw NoPathError("no path from node " + std::to_string(s) + " to node " + std::to_string(t));
  }
  std::vector<Resource> path;
  for (NodeId v = t; v != s;) {
    const Resource e = pred[v];
    path.push_back(e);
    const Edge& edge = net.edge(e);
    v = edge.u == v ? edge.v : edge.u;
  }
  return Strategy::from_indices(std::move(path));
}

std::uint64_t network_hash(const Network& net) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  auto mix = [&h](std::uint64_t value) {
    for (int i = 0; i < 8; ++i) {
      h ^= (value >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<std::uint64_t>(net.node_count()));
  for (std::size_t i = 0; i < net.edge_count(); ++i) {
    mix(static_cast<std::uint64_t>(net.edge(i).u));
    mix(static_cast<std::uint64_t>(net.edge(i).v));
    mix(std::bit_cast<std::uint64_t>(net.weights()[i]));
  }
  return h;
}

}  // namespace ccg
