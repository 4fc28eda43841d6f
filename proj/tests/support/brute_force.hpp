#pragma once

// Exhaustive enumerators used as independent oracles for the diagram
// compiler. They only work on small graphs and share no code with it.

#include <cstdint>
#include <random>
#include <vector>

#include "ccg/network.hpp"
#include "ccg/strategy.hpp"

namespace ccg::bf {

/// Simple s-t paths by depth-first search over vertices.
std::vector<Strategy> brute_st_paths(const Network& net, NodeId s, NodeId t);
/// Simple s-t paths that visit every node with an incident edge.
std::vector<Strategy> brute_hamiltonian_paths(const Network& net, NodeId s, NodeId t);
/// Edge subsets forming one simple cycle through every terminal.
std::vector<Strategy> brute_steiner_cycles(const Network& net, const std::vector<NodeId>& terminals);
std::vector<Strategy> brute_family(const Network& net, const FamilySpec& spec);

/// Random simple graph on `nodes` vertices with `edges` edges (edge order
/// lexicographic) and weights uniform in [0, 1].
Network random_network(std::mt19937_64& rng, int nodes, std::size_t edges);

/// Every s-t pair / terminal set used for property sweeps on `net`.
std::vector<FamilySpec> sample_specs(std::mt19937_64& rng, const Network& net);

/// Minimum of sum w over the listed strategies.
double brute_min_cost(const std::vector<Strategy>& family, const std::vector<double>& w);

}  // namespace ccg::bf
