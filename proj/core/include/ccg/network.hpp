#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ccg/strategy.hpp"

namespace ccg {

/// Node identifier, 1-based as in TNTP files.
using NodeId = int;

struct Arc {
  NodeId tail = 0;
  NodeId head = 0;
  double free_flow_time = 0.0;
  std::map<std::string, double> raw_attributes;
};

/// A network as read from a TNTP link file.
struct DirectedNetwork {
  int node_count = 0;
  std::vector<Arc> arcs;
};

/// Undirected edge with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Undirected resource graph. Edge i is resource i; `weights()[i]` is its
/// free-flow weight d_i. Immutable after construction.
class Network {
 public:
  /// Validates ids, rejects self-loops and duplicate edges. Endpoints are
  /// stored with u < v; edge order is kept as given.
  Network(int node_count, std::vector<Edge> edges, std::vector<double> weights);

  int node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t i) const { return edges_.at(i); }
  std::span<const double> weights() const noexcept { return weights_; }

  /// (neighbor, edge index) pairs, sorted by edge index.
  std::span<const std::pair<NodeId, Resource>> incident(NodeId v) const;
  std::optional<Resource> find_edge(NodeId a, NodeId b) const;
  /// Sorted ids of nodes with at least one incident edge.
  std::vector<NodeId> active_nodes() const;
  bool has_node(NodeId v) const noexcept { return v >= 1 && v <= node_count_; }

  const std::optional<std::map<NodeId, Point>>& coordinates() const noexcept {
    return coordinates_;
  }
  std::span<const std::string> warnings() const noexcept { return warnings_; }

  Network with_weights(std::vector<double> weights) const;
  Network with_coordinates(std::map<NodeId, Point> coords) const;
  Network with_warning(std::string message) const;

 private:
  int node_count_;
  std::vector<Edge> edges_;
  std::vector<double> weights_;
  std::vector<std::vector<std::pair<NodeId, Resource>>> adjacency_;
  std::optional<std::map<NodeId, Point>> coordinates_;
  std::vector<std::string> warnings_;
};

// Strategy families ----------------------------------------------------------

struct StPaths {
  NodeId s = 0;
  NodeId t = 0;
};
struct HamiltonianStPaths {
  NodeId s = 0;
  NodeId t = 0;
};
struct SteinerCycles {
  std::vector<NodeId> terminals;
};

using FamilySpec = std::variant<StPaths, HamiltonianStPaths, SteinerCycles>;

/// Throws ValidationError for s == t or an empty / duplicated terminal set.
void validate(const FamilySpec& spec);
/// Canonical text such as "st_paths(1,4)"; used in cache keys and logs.
std::string to_string(const FamilySpec& spec);

// TNTP ingestion and preprocessing ---------------------------------------------

DirectedNetwork parse_tntp(std::istream& in);
DirectedNetwork parse_tntp_file(const std::filesystem::path& path);

/// Node coordinate rows "node_id x y" (an optional header line and trailing
/// ';' are tolerated).
std::map<NodeId, Point> parse_coordinates(std::istream& in);
std::map<NodeId, Point> parse_coordinates_file(const std::filesystem::path& path);

/// Merges antiparallel arcs (minimum free-flow time), drops self-loops,
/// restricts to the largest connected component and orders edges
/// lexicographically by (min endpoint, max endpoint).
Network symmetrize(const DirectedNetwork& net);

/// One arc per edge, tail < head.
DirectedNetwork lift(const Network& net);

/// Divides weights by their maximum. All-zero weights are left unchanged and
/// a warning is attached to the returned network.
Network normalize_freeflow(const Network& net);

/// Keeps the edges whose endpoints both lie in `nodes`. Node ids are kept.
Network induced_subgraph(const Network& net, std::span<const NodeId> nodes);

/// Replaces weights with Euclidean edge lengths. Requires coordinates for
/// every endpoint.
Network euclidean_weights(const Network& net);

/// Dijkstra over nonnegative weights. Ties: smaller node id pops first, and
/// on equal tentative distance the smaller predecessor edge index is kept.
Strategy shortest_path_lmo(const Network& net, std::span<const double> weights, NodeId s,
                           NodeId t);

/// Stable 64-bit fingerprint of node count, edges and weights.
std::uint64_t network_hash(const Network& net);

}  // namespace ccg
