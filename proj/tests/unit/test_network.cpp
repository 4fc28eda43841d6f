#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "brute_force.hpp"
#include "ccg/errors.hpp"
#include "ccg/network.hpp"

using namespace ccg;

namespace {

DirectedNetwork parse(const std::string& text) {
  std::istringstream in(text);
  return parse_tntp(in);
}

constexpr const char* kHeader =
    "<NUMBER OF ZONES> 1\n<NUMBER OF NODES> 4\n<END OF METADATA>\n\n"
    "~ init term cap length fft b power speed toll type ;\n";

}  // namespace

TEST(Tntp, SingleRow) {
  const auto net = parse("<NUMBER OF NODES> 2\n1 2 100 1 5.0 0 0 0 0 1 ;\n");
  EXPECT_EQ(net.node_count, 2);
  ASSERT_EQ(net.arcs.size(), 1U);
  EXPECT_EQ(net.arcs[0].tail, 1);
  EXPECT_EQ(net.arcs[0].head, 2);
  EXPECT_DOUBLE_EQ(net.arcs[0].free_flow_time, 5.0);
  EXPECT_DOUBLE_EQ(net.arcs[0].raw_attributes.at("capacity"), 100.0);
  EXPECT_DOUBLE_EQ(net.arcs[0].raw_attributes.at("link_type"), 1.0);
}

TEST(Tntp, MetadataAndCommentsOnly) {
  const auto net = parse(std::string(kHeader) + "~ nothing here\n\n");
  EXPECT_EQ(net.node_count, 4);
  EXPECT_TRUE(net.arcs.empty());
}

TEST(Tntp, TwoRowsKeepDistinctTimes) {
  const auto net = parse(std::string(kHeader) + "1 2 100 1 5.0 0 0 0 0 1 ;\n2 1 100 1 3.0 0 0 0 0 1 ;\n");
  ASSERT_EQ(net.arcs.size(), 2U);
  EXPECT_DOUBLE_EQ(net.arcs[0].free_flow_time, 5.0);
  EXPECT_DOUBLE_EQ(net.arcs[1].free_flow_time, 3.0);
}

TEST(Tntp, ExtraColumnsAndTabs) {
  const auto net = parse("<NUMBER OF NODES> 3\n\t2\t3\t1\t1\t2.5\t0\t0\t0\t0\t1\t9\t;\n");
  EXPECT_DOUBLE_EQ(net.arcs.at(0).raw_attributes.at("column_10"), 9.0);
}

TEST(Tntp, ShortRowWithoutFreeFlowTime) {
  const auto net = parse("<NUMBER OF NODES> 3\n1 3 7 ;\n");
  EXPECT_DOUBLE_EQ(net.arcs.at(0).free_flow_time, 0.0);
}

TEST(Tntp, Errors) {
  try {
    parse("<NUMBER OF NODES 2\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1U);
  }
  try {
    parse("<NUMBER OF NODES> 2\n\n1 2 ;\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3U);
  }
  EXPECT_THROW(parse("<NUMBER OF NODES> 2\n1 2 100 1 5.0\n"), ParseError);
  EXPECT_THROW(parse("<NUMBER OF NODES> x\n"), ParseError);
  EXPECT_THROW(parse("1 2 100 1 5.0 ;\n"), ParseError);
  EXPECT_THROW(parse("~ only comments\n"), ParseError);
  EXPECT_THROW(parse("<NUMBER OF NODES> 2\n1 3 100 1 5.0 ;\n"), ValidationError);
  EXPECT_THROW(parse("<NUMBER OF NODES> 2\n1 2 100 1 -5.0 ;\n"), ValidationError);
  EXPECT_THROW(parse_tntp_file("/nonexistent/net.tntp"), ValidationError);
}

TEST(Coordinates, ParsesWithHeaderAndSemicolons) {
  std::istringstream in("Node X Y ;\n1 0.5 1.5 ;\n2 3 4\n");
  const auto c = parse_coordinates(in);
  ASSERT_EQ(c.size(), 2U);
  EXPECT_DOUBLE_EQ(c.at(1).y, 1.5);
  EXPECT_DOUBLE_EQ(c.at(2).x, 3.0);
}

TEST(Symmetrize, MergesAntiparallelByMinimum) {
  DirectedNetwork d{2, {{1, 2, 5.0, {}}, {2, 1, 3.0, {}}}};
  const auto net = symmetrize(d);
  ASSERT_EQ(net.edge_count(), 1U);
  EXPECT_EQ(net.edge(0), (Edge{1, 2}));
  EXPECT_DOUBLE_EQ(net.weights()[0], 3.0);
}

TEST(Symmetrize, SingleArc) {
  const auto net = symmetrize(DirectedNetwork{2, {{1, 2, 5.0, {}}}});
  ASSERT_EQ(net.edge_count(), 1U);
  EXPECT_DOUBLE_EQ(net.weights()[0], 5.0);
}

TEST(Symmetrize, EqualComponentsKeepSmallestNode) {
  const auto net = symmetrize(DirectedNetwork{4, {{3, 4, 1.0, {}}, {1, 2, 1.0, {}}}});
  ASSERT_EQ(net.edge_count(), 1U);
  EXPECT_EQ(net.edge(0), (Edge{1, 2}));
}

TEST(Symmetrize, LargestComponentAndLexicographicOrder) {
  const auto net = symmetrize(DirectedNetwork{
      6, {{5, 6, 1.0, {}}, {3, 1, 2.0, {}}, {2, 3, 1.0, {}}, {1, 2, 4.0, {}}, {2, 2, 1.0, {}}}});
  ASSERT_EQ(net.edge_count(), 3U);
  EXPECT_EQ(net.edge(0), (Edge{1, 2}));
  EXPECT_EQ(net.edge(1), (Edge{1, 3}));
  EXPECT_EQ(net.edge(2), (Edge{2, 3}));
  EXPECT_EQ(net.node_count(), 6);
}

TEST(Symmetrize, EmptyIsAnError) {
  EXPECT_THROW(symmetrize(DirectedNetwork{3, {}}), ValidationError);
}

TEST(Symmetrize, Idempotent) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    DirectedNetwork d{7, {}};
    std::uniform_int_distribution<int> node(1, 7);
    std::uniform_real_distribution<double> w(0.0, 10.0);
    for (int a = 0; a < 14; ++a) d.arcs.push_back({node(rng), node(rng), w(rng), {}});
    d.arcs.push_back({1, 2, 1.0, {}});
    const auto once = symmetrize(d);
    const auto twice = symmetrize(lift(once));
    ASSERT_EQ(once.edge_count(), twice.edge_count());
    for (std::size_t i = 0; i < once.edge_count(); ++i) {
      EXPECT_EQ(once.edge(i), twice.edge(i));
      EXPECT_EQ(once.weights()[i], twice.weights()[i]);
    }
  }
}

TEST(Pipeline, DeterministicOnIdenticalInput) {
  const std::string text = std::string(kHeader) +
                           "1 2 100 1 5.0 0 0 0 0 1 ;\n2 1 100 1 3.0 0 0 0 0 1 ;\n"
                           "2 3 100 1 2.0 0 0 0 0 1 ;\n3 4 100 1 6.0 0 0 0 0 1 ;\n";
  const auto a = normalize_freeflow(symmetrize(parse(text)));
  const auto b = normalize_freeflow(symmetrize(parse(text)));
  EXPECT_EQ(network_hash(a), network_hash(b));
  ASSERT_EQ(a.edge_count(), 3U);
  for (std::size_t i = 0; i < a.edge_count(); ++i) {
    EXPECT_EQ(a.edge(i), b.edge(i));
    EXPECT_EQ(a.weights()[i], b.weights()[i]);
  }
  EXPECT_DOUBLE_EQ(a.weights()[2], 1.0);
  EXPECT_DOUBLE_EQ(a.weights()[0], 0.5);
}

TEST(Normalize, Examples) {
  const Network two(3, {{1, 2}, {2, 3}}, {5.0, 3.0});
  const auto n2 = normalize_freeflow(two);
  EXPECT_DOUBLE_EQ(n2.weights()[0], 1.0);
  EXPECT_DOUBLE_EQ(n2.weights()[1], 0.6);
  EXPECT_TRUE(n2.warnings().empty());

  const auto n1 = normalize_freeflow(Network(2, {{1, 2}}, {1.0}));
  EXPECT_DOUBLE_EQ(n1.weights()[0], 1.0);

  const auto n0 = normalize_freeflow(Network(3, {{1, 2}, {2, 3}}, {0.0, 0.0}));
  EXPECT_EQ(n0.weights()[0], 0.0);
  EXPECT_EQ(n0.weights()[1], 0.0);
  EXPECT_EQ(n0.warnings().size(), 1U);
}

TEST(NetworkType, RejectsBadEdges) {
  EXPECT_THROW(Network(2, {{1, 1}}, {1.0}), ValidationError);
  EXPECT_THROW(Network(2, {{1, 2}, {2, 1}}, {1.0, 1.0}), ValidationError);
  EXPECT_THROW(Network(2, {{1, 3}}, {1.0}), ValidationError);
  EXPECT_THROW(Network(2, {{1, 2}}, {-1.0}), ValidationError);
}

TEST(NetworkType, SubgraphAndEuclidean) {
  const Network net(4, {{1, 2}, {2, 3}, {3, 4}}, {1.0, 1.0, 1.0});
  const std::vector<NodeId> keep{1, 2, 3};
  const auto sub = induced_subgraph(net, keep);
  EXPECT_EQ(sub.edge_count(), 2U);
  EXPECT_THROW(euclidean_weights(net), ValidationError);
  const auto geo = euclidean_weights(
      net.with_coordinates({{1, {0, 0}}, {2, {3, 4}}, {3, {3, 5}}, {4, {3, 7}}}));
  EXPECT_DOUBLE_EQ(geo.weights()[0], 5.0);
  EXPECT_DOUBLE_EQ(geo.weights()[1], 1.0);
  EXPECT_DOUBLE_EQ(geo.weights()[2], 2.0);
}

TEST(FamilySpecType, Validation) {
  EXPECT_THROW(validate(FamilySpec{StPaths{1, 1}}), ValidationError);
  EXPECT_THROW(validate(FamilySpec{HamiltonianStPaths{2, 2}}), ValidationError);
  EXPECT_THROW(validate(FamilySpec{SteinerCycles{{}}}), ValidationError);
  EXPECT_THROW(validate(FamilySpec{SteinerCycles{{1, 2, 1}}}), ValidationError);
  EXPECT_NO_THROW(validate(FamilySpec{SteinerCycles{{1, 2}}}));
  EXPECT_EQ(to_string(FamilySpec{StPaths{1, 4}}), "st_paths(1,4)");
}

TEST(ShortestPath, Triangle) {
  // s=1, u=2, t=3
  const Network net(3, {{1, 2}, {1, 3}, {2, 3}}, {1, 1, 1});
  const std::vector<double> w{1.0, 3.0, 1.0};
  const auto path = shortest_path_lmo(net, w, 1, 3);
  EXPECT_EQ(path, (Strategy{0, 2}));
  EXPECT_DOUBLE_EQ(path.cost(w), 2.0);
}

TEST(ShortestPath, SingleZeroEdge) {
  const Network net(2, {{1, 2}}, {1});
  const std::vector<double> w{0.0};
  EXPECT_EQ(shortest_path_lmo(net, w, 1, 2), (Strategy{0}));
}

TEST(ShortestPath, EqualRoutesPickSmallerIndexSet) {
  // 4-cycle 1-2-4 and 1-3-4 with equal total cost.
  const Network net(4, {{1, 2}, {1, 3}, {2, 4}, {3, 4}}, {1, 1, 1, 1});
  const std::vector<double> w{1.0, 1.0, 1.0, 1.0};
  const auto brute = bf::brute_st_paths(net, 1, 4);
  ASSERT_EQ(brute.size(), 2U);
  EXPECT_EQ(shortest_path_lmo(net, w, 1, 4), std::min(brute[0], brute[1]));
  EXPECT_EQ(shortest_path_lmo(net, w, 1, 4), (Strategy{0, 2}));
}

TEST(ShortestPath, Errors) {
  const Network net(4, {{1, 2}, {3, 4}}, {1, 1});
  const std::vector<double> w{1.0, 1.0};
  EXPECT_THROW(shortest_path_lmo(net, w, 1, 4), NoPathError);
  const std::vector<double> negative{-1.0, 1.0};
  EXPECT_THROW(shortest_path_lmo(net, negative, 1, 2), ValidationError);
  EXPECT_THROW(shortest_path_lmo(net, w, 1, 1), ValidationError);
}

TEST(ShortestPath, MatchesBruteForceOnSmallGraphs) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int checked = 0;
  for (int g = 0; g < 30; ++g) {
    const auto net = bf::random_network(rng, 7, 6 + g % 7);
    const auto active = net.active_nodes();
    const NodeId s = active.front();
    const NodeId t = active.back();
    const auto paths = bf::brute_st_paths(net, s, t);
    if (paths.empty()) continue;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> w(net.edge_count());
      for (double& x : w) x = trial % 10 == 0 ? std::floor(unit(rng) * 3) : unit(rng);
      const auto got = shortest_path_lmo(net, w, s, t);
      EXPECT_NEAR(got.cost(w), bf::brute_min_cost(paths, w), 1e-12);
      EXPECT_NE(std::find(paths.begin(), paths.end(), got), paths.end());
    }
    ++checked;
  }
  EXPECT_GE(checked, 10);
}
