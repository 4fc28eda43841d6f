#include "brute_force.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

namespace ccg::bf {

namespace {

void dfs(const Network& net, NodeId v, NodeId t, std::vector<bool>& on_path,
         std::vector<Resource>& edges, std::vector<std::vector<NodeId>>* vertex_paths,
         std::vector<NodeId>& vertices, std::vector<Strategy>& out) {
  if (v == t) {
    out.push_back(Strategy::from_indices(edges));
    if (vertex_paths) vertex_paths->push_back(vertices);
    return;
  }
  for (std::size_t e = 0; e < net.edge_count(); ++e) {
    const auto& edge = net.edge(e);
    NodeId w;
    if (edge.u == v) {
      w = edge.v;
    } else if (edge.v == v) {
      w = edge.u;
    } else {
      continue;
    }
    if (on_path[w]) continue;
    on_path[w] = true;
    edges.push_back(static_cast<Resource>(e));
    vertices.push_back(w);
    dfs(net, w, t, on_path, edges, vertex_paths, vertices, out);
    vertices.pop_back();
    edges.pop_back();
    on_path[w] = false;
  }
}

std::vector<Strategy> paths_with_vertices(const Network& net, NodeId s, NodeId t,
                                          std::vector<std::vector<NodeId>>* vertex_paths) {
  std::vector<Strategy> out;
  if (!net.has_node(s) || !net.has_node(t)) return out;
  std::vector<bool> on_path(net.node_count() + 1, false);
  std::vector<Resource> edges;
  std::vector<NodeId> vertices{s};
  on_path[s] = true;
  dfs(net, s, t, on_path, edges, vertex_paths, vertices, out);
  return out;
}

int find(std::vector<int>& parent, int x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

}  // namespace

std::vector<Strategy> brute_st_paths(const Network& net, NodeId s, NodeId t) {
  auto out = paths_with_vertices(net, s, t, nullptr);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Strategy> brute_hamiltonian_paths(const Network& net, NodeId s, NodeId t) {
  std::vector<std::vector<NodeId>> vertices;
  const auto paths = paths_with_vertices(net, s, t, &vertices);
  std::set<NodeId> active;
  for (const auto& e : net.edges()) {
    active.insert(e.u);
    active.insert(e.v);
  }
  std::vector<Strategy> out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (vertices[i].size() == active.size()) out.push_back(paths[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Strategy> brute_steiner_cycles(const Network& net,
                                           const std::vector<NodeId>& terminals) {
  const std::size_t m = net.edge_count();
  std::vector<Strategy> out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<int> degree(net.node_count() + 1, 0);
    std::vector<int> parent(net.node_count() + 1);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<Resource> items;
    for (std::size_t e = 0; e < m; ++e) {
      if (!(mask >> e & 1U)) continue;
      const auto& edge = net.edge(e);
      ++degree[edge.u];
      ++degree[edge.v];
      parent[find(parent, edge.u)] = find(parent, edge.v);
      items.push_back(static_cast<Resource>(e));
    }
    bool ok = true;
    int root = -1;
    for (NodeId v = 1; v <= net.node_count() && ok; ++v) {
      if (degree[v] == 0) continue;
      if (degree[v] != 2) ok = false;
      const int r = find(parent, v);
      if (root == -1) root = r;
      if (r != root) ok = false;
    }
    for (NodeId term : terminals) {
      if (!net.has_node(term) || degree[term] != 2) ok = false;
    }
    if (ok) out.push_back(Strategy::from_indices(items));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Strategy> brute_family(const Network& net, const FamilySpec& spec) {
  if (const auto* p = std::get_if<StPaths>(&spec)) return brute_st_paths(net, p->s, p->t);
  if (const auto* h = std::get_if<HamiltonianStPaths>(&spec)) {
    return brute_hamiltonian_paths(net, h->s, h->t);
  }
  return brute_steiner_cycles(net, std::get<SteinerCycles>(spec).terminals);
}

Network random_network(std::mt19937_64& rng, int nodes, std::size_t edges) {
  std::vector<Edge> all;
  for (NodeId u = 1; u <= nodes; ++u) {
    for (NodeId v = u + 1; v <= nodes; ++v) all.push_back({u, v});
  }
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::min(edges, all.size()));
  std::sort(all.begin(), all.end(),
            [](const Edge& a, const Edge& b) { return std::pair(a.u, a.v) < std::pair(b.u, b.v); });
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> w(all.size());
  for (double& x : w) x = unit(rng);
  return Network(nodes, all, w);
}

std::vector<FamilySpec> sample_specs(std::mt19937_64& rng, const Network& net) {
  const auto active = net.active_nodes();
  std::vector<FamilySpec> specs;
  if (active.size() < 2) return specs;
  std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
  NodeId s = active[pick(rng)];
  NodeId t = s;
  while (t == s) t = active[pick(rng)];
  specs.emplace_back(StPaths{s, t});
  specs.emplace_back(HamiltonianStPaths{s, t});
  std::vector<NodeId> terminals{s};
  if (pick(rng) % 2 == 0) terminals.push_back(t);
  specs.emplace_back(SteinerCycles{terminals});
  return specs;
}

double brute_min_cost(const std::vector<Strategy>& family, const std::vector<double>& w) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : family) best = std::min(best, s.cost(w));
  return best;
}

}  // namespace ccg::bf
