#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "djet/graph.h"
#include "djet/random.h"
#include "oracles.h"

using namespace djet;

namespace {
std::string parse_error_of(const std::string &text) {
  try {
    (void)parse_metis(text);
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    return e.what();
  }
  return "";
}
} // namespace

TEST(ParseMetis, SmallestValidFile) {
  const Graph g = parse_metis("2 1\n2\n1\n");
  EXPECT_EQ(g.n(), 2u);
  EXPECT_EQ(g.m(), 1u);
  EXPECT_EQ(g.neighbors(0)[0], 1u);
  EXPECT_EQ(g.neighbor_weights(0)[0], 1);
}

TEST(ParseMetis, WeightedPath) {
  const Graph g = parse_metis("3 2 1\n2 5\n1 5 3 7\n2 7\n");
  ASSERT_EQ(g.n(), 3u);
  EXPECT_EQ(g.m(), 2u);
  const auto edges = oracle::edge_list(g);
  EXPECT_EQ(edges, (oracle::EdgeList{{{0, 1}, 5}, {{1, 2}, 7}}));
  EXPECT_EQ(g.total_node_weight(), 3);
}

TEST(ParseMetis, AllFormatCodes) {
  const Graph plain = parse_metis("3 2 0\n2\n1 3\n2\n");
  const Graph node_weighted = parse_metis("3 2 10\n4 2\n5 1 3\n6 2\n");
  const Graph both = parse_metis("% comment\n3 2 11\n4 2 9\n5 1 9 3 2\n6 2 2\n");
  EXPECT_EQ(plain.m(), 2u);
  EXPECT_EQ(node_weighted.total_node_weight(), 15);
  EXPECT_EQ(node_weighted.node_weight(2), 6);
  EXPECT_EQ(both.total_edge_weight(), 11);
  EXPECT_EQ(both.node_weight(1), 5);
}

TEST(ParseMetis, SelfLoopsDroppedAndDuplicatesMerged) {
  // Vertex 1 lists itself and vertex 2 twice; the header counts the merged edge.
  const Graph g = parse_metis("2 1 1\n1 4 2 3 2 4\n1 7\n");
  EXPECT_EQ(g.m(), 1u);
  EXPECT_EQ(g.neighbor_weights(0)[0], 7);
  EXPECT_EQ(g.neighbor_weights(1)[0], 7);
}

TEST(ParseMetis, ErrorsNameTheLine) {
  EXPECT_NE(parse_error_of("3 1\n2\n3\n").find("line"), std::string::npos); // asymmetric
  EXPECT_NE(parse_error_of("2 1\n3\n1\n").find("line 2"), std::string::npos); // out of range
  EXPECT_NE(parse_error_of("2 x\n2\n1\n").find("line 1"), std::string::npos);
  EXPECT_NE(parse_error_of("2 1 7\n2\n1\n").find("line 1"), std::string::npos);
  EXPECT_NE(parse_error_of("2 1 100\n2\n1\n").find("line 1"), std::string::npos); // vertex sizes
  EXPECT_NE(parse_error_of("3 2\n2\n1\n").find("line"), std::string::npos);       // truncated
  EXPECT_NE(parse_error_of("2 2\n2\n1\n").find("line 1"), std::string::npos);     // wrong m
  EXPECT_NE(parse_error_of("2 1 1\n2 0\n1 0\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_error_of("2 1 1\n2 3\n1 4\n").find("line"), std::string::npos); // asymmetric weights
  EXPECT_NE(parse_error_of("").find("line"), std::string::npos);
}

TEST(ParseMetis, EmptyAndIsolated) {
  const Graph empty = parse_metis("0 0\n");
  EXPECT_EQ(empty.n(), 0u);
  const Graph isolated = parse_metis("3 0\n\n\n\n");
  EXPECT_EQ(isolated.n(), 3u);
  EXPECT_EQ(isolated.m(), 0u);
}

TEST(WriteMetis, RoundTripPreservesGraph) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = oracle::random_graph(rng, 30, 0.2, trial % 2 == 0 ? 1 : 9, trial % 3 == 0 ? 1 : 5);
    std::ostringstream out;
    write_metis(g, out);
    EXPECT_EQ(parse_metis(out.str()), g);
  }
}

TEST(WriteMetis, FileRoundTripAndIoErrors) {
  const auto path = std::filesystem::temp_directory_path() / "djet_graph_roundtrip.graph";
  const Graph g = gen_grid(5, 3);
  write_metis(g, path.string());
  EXPECT_EQ(read_metis(path.string()), g);
  std::filesystem::remove(path);
  try {
    (void)read_metis("/nonexistent/djet.graph");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIO);
  }
}

TEST(GraphBuilder, RejectsInvalidEdges) {
  GraphBuilder builder(2);
  EXPECT_THROW(builder.add_edge(0, 2), Error);
  EXPECT_THROW(builder.add_edge(0, 1, 0), Error);
}

TEST(Graph, ValidatingConstructorRejectsAsymmetry) {
  EXPECT_THROW(Graph({0, 1, 1}, {1}, {1}, {1, 1}), Error);
  EXPECT_THROW(Graph({0, 1, 2}, {0, 0}, {1, 1}, {1, 1}), Error); // self-loop
  EXPECT_NO_THROW(Graph({0, 1, 2}, {1, 0}, {3, 3}, {1, 1}));
}

TEST(GenGrid, Examples) {
  const Graph g22 = gen_grid(2, 2);
  EXPECT_EQ(g22.n(), 4u);
  EXPECT_EQ(g22.m(), 4u);
  const Graph path = gen_grid(3, 1);
  EXPECT_EQ(path.n(), 3u);
  EXPECT_EQ(path.m(), 2u);
  const Graph g44 = gen_grid(4, 4);
  EXPECT_EQ(g44.n(), 16u);
  EXPECT_EQ(g44.m(), 24u); // 2 * 4 * 3
  EXPECT_THROW((void)gen_grid(0, 3), Error);
}

TEST(GenGrid, NeighborsAreManhattanAdjacent) {
  const std::int64_t w = 7;
  const std::int64_t h = 5;
  const Graph g = gen_grid(w, h);
  for (NodeID u = 0; u < g.n(); ++u) {
    for (const NodeID v : g.neighbors(u)) {
      const auto dx = std::abs(static_cast<std::int64_t>(u % w) - static_cast<std::int64_t>(v % w));
      const auto dy = std::abs(static_cast<std::int64_t>(u / w) - static_cast<std::int64_t>(v / w));
      EXPECT_EQ(dx + dy, 1);
    }
  }
  EXPECT_EQ(g.m(), static_cast<EdgeID>((w - 1) * h + w * (h - 1)));
}

TEST(GenRgg2d, DeterministicAndErrors) {
  EXPECT_EQ(gen_rgg2d(100, 0.2, 7), gen_rgg2d(100, 0.2, 7));
  EXPECT_NE(gen_rgg2d(100, 0.2, 7), gen_rgg2d(100, 0.2, 8));
  EXPECT_THROW((void)gen_rgg2d(0, 0.2, 1), Error);
  EXPECT_THROW((void)gen_rgg2d(10, 0.0, 1), Error);
  EXPECT_THROW((void)gen_rgg2d(10, 1.0, 1), Error);
}

// All-pairs distance check against the same point sequence.
TEST(GenRgg2d, MatchesAllPairsOracle) {
  for (const double radius : {0.05, 0.15, 0.4}) {
    const std::int64_t n = 300;
    const Graph g = gen_rgg2d(n, radius, 3);
    CounterRandom random(3, streams::kGenerator);
    std::vector<std::pair<double, double>> points(n);
    for (auto &[x, y] : points) {
      x = random.next_unit();
      y = random.next_unit();
    }
    oracle::EdgeList expected;
    for (NodeID u = 0; u < n; ++u) {
      for (NodeID v = u + 1; v < n; ++v) {
        const double dx = points[u].first - points[v].first;
        const double dy = points[u].second - points[v].second;
        if (dx * dx + dy * dy <= radius * radius) {
          expected[{u, v}] = 1;
        }
      }
    }
    EXPECT_EQ(oracle::edge_list(g), expected) << "radius " << radius;
  }
}

TEST(EdgeCut, Examples) {
  const Graph cycle = oracle::graph_from_edges(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 0, 1}});
  EXPECT_EQ(edge_cut(cycle, std::vector<BlockID>{0, 0, 1, 1}), 2);
  const Graph path = parse_metis("3 2 1\n2 5\n1 5 3 7\n2 7\n");
  EXPECT_EQ(edge_cut(path, std::vector<BlockID>{0, 1, 1}), 5);
  EXPECT_EQ(edge_cut(path, std::vector<BlockID>{0, 0, 0}), 0);
  EXPECT_THROW((void)edge_cut(path, std::vector<BlockID>{0, 0}), Error);
}

TEST(EdgeCut, MatchesEdgeListOracle) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Graph g = oracle::random_graph(rng, 40, 0.15, 10, 1);
    std::vector<BlockID> assignment(g.n());
    for (auto &b : assignment) {
      b = static_cast<BlockID>(rng() % 4);
    }
    EXPECT_EQ(edge_cut(g, assignment), oracle::brute_cut(oracle::edge_list(g), assignment));
  }
}
