#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "djet/jet.h"
#include "oracles.h"

using namespace djet;

namespace {
struct OracleCandidate {
  NodeID u;
  BlockID to;
  Weight gain;
};

// Sequential reference for one Jet iteration on the global graph.
std::vector<BlockID> oracle_iteration(
    const Graph &g,
    const std::vector<BlockID> &assignment,
    [[maybe_unused]] const BlockID k,
    const double temperature,
    const std::set<NodeID> &locked,
    std::set<NodeID> *moved_out
) {
  const auto edges = oracle::edge_list(g);
  std::vector<std::optional<OracleCandidate>> candidate(g.n());
  for (NodeID u = 0; u < g.n(); ++u) {
    if (locked.contains(u)) {
      continue;
    }
    const BlockID from = assignment[u];
    std::set<BlockID> adjacent;
    for (const NodeID v : g.neighbors(u)) {
      adjacent.insert(assignment[v]);
    }
    BlockID best = kInvalidBlockID;
    Weight best_conn = -1;
    for (const BlockID b : adjacent) { // ascending, so ties keep the lowest ID
      const Weight c = oracle::brute_conn(edges, u, assignment, b);
      if (b != from && c > best_conn) {
        best = b;
        best_conn = c;
      }
    }
    if (best == kInvalidBlockID) {
      continue;
    }
    const Weight own = oracle::brute_conn(edges, u, assignment, from);
    const Weight gain = best_conn - own;
    if (gain >= -static_cast<Weight>(std::floor(temperature * static_cast<double>(own)))) {
      candidate[u] = OracleCandidate{u, best, gain};
    }
  }

  auto beats = [&](const NodeID a, const NodeID b) {
    return candidate[a]->gain > candidate[b]->gain || (candidate[a]->gain == candidate[b]->gain && a > b);
  };
  std::vector<BlockID> result = assignment;
  for (NodeID u = 0; u < g.n(); ++u) {
    if (!candidate[u]) {
      continue;
    }
    std::vector<BlockID> view = assignment;
    for (NodeID v = 0; v < g.n(); ++v) {
      if (v != u && candidate[v] && beats(v, u)) {
        view[v] = candidate[v]->to;
      }
    }
    const Weight gain = oracle::brute_conn(edges, u, view, candidate[u]->to) -
                        oracle::brute_conn(edges, u, view, assignment[u]);
    if (gain >= 0) {
      result[u] = candidate[u]->to;
      if (moved_out != nullptr) {
        moved_out->insert(u);
      }
    }
  }
  return result;
}

const std::vector<Executor> &executors() {
  static const std::vector<Executor> list{
      Executor(ExecutionMode::kSequential),
      Executor(ExecutionMode::kReverse),
      Executor(ExecutionMode::kShuffled, 7),
      Executor(ExecutionMode::kThreaded, 0, 4),
  };
  return list;
}

std::vector<NodeID> sorted(std::vector<NodeID> ids) {
  std::sort(ids.begin(), ids.end());
  return ids;
}
} // namespace

TEST(HasPriority, GainThenHigherId) {
  EXPECT_TRUE(has_priority(3, 0, 2, 5));
  EXPECT_TRUE(has_priority(2, 5, 2, 4));
  EXPECT_FALSE(has_priority(2, 4, 2, 5));
  EXPECT_FALSE(has_priority(-1, 9, 0, 0));
}

TEST(BuildCandidates, TemperatureThreshold) {
  // Vertex 0 in block 0: conn 5 to its own block, 3 to block 1.
  const Graph g = oracle::graph_from_edges(3, {{0, 1, 5}, {0, 2, 3}});
  const DistGraph dg = distribute(g, 1);
  const DistPartition dp = scatter(dg, BalanceSpec(2, 0.5, 3), std::vector<BlockID>{0, 0, 1});
  const LockSet none(dg);

  auto has_vertex_0 = [&](const double tau) {
    const CandidateSet candidates = build_candidates(dg, dp, tau, none);
    for (const MoveCandidate &c : candidates[0]) {
      if (c.global == 0) {
        EXPECT_EQ(c.gain, -2);
        EXPECT_EQ(c.to, 1u);
        return true;
      }
    }
    return false;
  };
  EXPECT_TRUE(has_vertex_0(0.5)); // -2 >= -floor(2.5)
  EXPECT_TRUE(has_vertex_0(0.4)); // -2 >= -floor(2.0)
  EXPECT_FALSE(has_vertex_0(0.3)); // -2 < -floor(1.5)
  EXPECT_TRUE(has_vertex_0(1.0));
  EXPECT_THROW((void)build_candidates(dg, dp, 1.5, none), Error);
  EXPECT_THROW((void)build_candidates(dg, dp, -0.1, none), Error);
}

TEST(BuildCandidates, TemperatureZeroOnlyNonNegative) {
  std::mt19937_64 rng(3);
  const Graph g = oracle::random_graph(rng, 40, 0.15, 4, 1);
  std::vector<BlockID> assignment(g.n());
  for (auto &b : assignment) {
    b = rng() % 3;
  }
  const DistGraph dg = distribute(g, 3);
  const DistPartition dp = scatter(dg, BalanceSpec(3, 0.03, g.total_node_weight()), assignment);
  for (const auto &list : build_candidates(dg, dp, 0.0, LockSet(dg))) {
    for (const MoveCandidate &c : list) {
      EXPECT_GE(c.gain, 0);
      EXPECT_NE(c.from, c.to);
    }
  }
}

TEST(BuildCandidates, TargetIsAdjacentBestBlockWithLowestIdTie) {
  // Vertex 0 (block 0) has equal connectivity to blocks 2 and 1.
  const Graph g = oracle::graph_from_edges(3, {{0, 1, 2}, {0, 2, 2}});
  const DistGraph dg = distribute(g, 1);
  const DistPartition dp = scatter(dg, BalanceSpec(3, 0.5, 3), std::vector<BlockID>{0, 2, 1});
  const auto candidates = build_candidates(dg, dp, 0.0, LockSet(dg));
  ASSERT_FALSE(candidates[0].empty());
  EXPECT_EQ(candidates[0][0].global, 0u);
  EXPECT_EQ(candidates[0][0].to, 1u);
  EXPECT_EQ(candidates[0][0].gain, 2);
}

TEST(FilterCandidates, AfterburnerDropsWorsenedMove) {
  // u=0 (block 0) and v=1 (block 1) want to swap sides; g(u)=2 > g(v)=1.
  // With u relocated first, v's move would raise the cut and is dropped.
  const Graph g = oracle::graph_from_edges(4, {{0, 1, 1}, {0, 2, 1}, {1, 3, 1}, {1, 2, 1}});
  const std::vector<BlockID> assignment{0, 1, 1, 0};
  for (const PEID p : {1u, 2u, 4u}) {
    const DistGraph dg = distribute(g, p);
    for (const Executor &exec : executors()) {
      DistPartition dp = scatter(dg, BalanceSpec(2, 1.0, 4), assignment);
      LockSet locks(dg);
      const JetIterationResult result = jet_iteration(dg, dp, 0.0, locks, exec);
      const auto after = gather(dg, dp);
      EXPECT_EQ(after[0], 1u) << "u keeps its move, P=" << p;
      EXPECT_EQ(after[1], 1u) << "v is filtered out, P=" << p;
      EXPECT_EQ(result.candidates, 4u);
      EXPECT_EQ(result.kept, 3u);
      const auto locked = sorted(locks.global_ids(dg));
      EXPECT_EQ(std::find(locked.begin(), locked.end(), 1u), locked.end());
      EXPECT_NE(std::find(locked.begin(), locked.end(), 0u), locked.end());
    }
  }
}

TEST(LockSet, MovedVerticesSkipNextIterationOnly) {
  const Graph g = gen_grid(6, 6);
  std::vector<BlockID> assignment(g.n());
  for (NodeID u = 0; u < g.n(); ++u) {
    assignment[u] = (u % 6 < 3) ? 0 : 1;
  }
  assignment[2] = 1; // a protrusion that wants to move back
  const DistGraph dg = distribute(g, 2);
  DistPartition dp = scatter(dg, BalanceSpec(2, 0.5, g.total_node_weight()), assignment);
  LockSet locks(dg);
  (void)jet_iteration(dg, dp, 0.5, locks, Executor{});
  const auto locked = locks.global_ids(dg);
  ASSERT_FALSE(locked.empty());
  const auto next = build_candidates(dg, dp, 1.0, locks);
  for (const auto &list : next) {
    for (const MoveCandidate &c : list) {
      EXPECT_EQ(std::find(locked.begin(), locked.end(), c.global), locked.end());
    }
  }
  LockSet other;
  EXPECT_THROW(other.replace(next), Error);
}

// Several iterations on random graphs: every P and schedule equals the
// sequential oracle, including the exact cut delta.
TEST(JetIteration, MatchesOracleForEveryPeCountAndSchedule) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 12; ++trial) {
    const Graph g = oracle::random_graph(rng, 40, 0.12, 3, 1);
    const auto edges = oracle::edge_list(g);
    const BlockID k = 2 + trial % 3;
    std::vector<BlockID> start(g.n());
    for (auto &b : start) {
      b = rng() % k;
    }
    const double tau = 0.25 * (trial % 5);

    // Oracle trajectory.
    std::vector<std::vector<BlockID>> expected{start};
    std::set<NodeID> locked;
    for (int it = 0; it < 4; ++it) {
      std::set<NodeID> moved;
      expected.push_back(oracle_iteration(g, expected.back(), k, tau, locked, &moved));
      locked = moved;
    }

    for (const PEID p : {1u, 2u, 4u, 8u}) {
      const DistGraph dg = distribute(g, p);
      for (const Executor &exec : executors()) {
        DistPartition dp = scatter(dg, BalanceSpec(k, 0.03, g.total_node_weight()), start);
        LockSet locks(dg);
        for (int it = 0; it < 4; ++it) {
          const Weight before = oracle::brute_cut(edges, gather(dg, dp));
          const JetIterationResult result = jet_iteration(dg, dp, tau, locks, exec);
          const auto now = gather(dg, dp);
          ASSERT_EQ(now, expected[it + 1]) << "trial " << trial << " P=" << p << " iteration " << it;
          ASSERT_EQ(result.moves.cut_delta, oracle::brute_cut(edges, now) - before);
        }
      }
    }
  }
}

TEST(JetIteration, InteriorCandidatesIndependentOfPeCount) {
  // Two disconnected grids; with P=2 each component lives on one PE.
  GraphBuilder builder(32);
  for (NodeID base : {0u, 16u}) {
    for (NodeID y = 0; y < 4; ++y) {
      for (NodeID x = 0; x < 4; ++x) {
        const NodeID u = base + y * 4 + x;
        if (x + 1 < 4) {
          builder.add_edge(u, u + 1);
        }
        if (y + 1 < 4) {
          builder.add_edge(u, u + 4);
        }
      }
    }
  }
  const Graph g = std::move(builder).build();
  std::vector<BlockID> start(g.n());
  for (NodeID u = 0; u < g.n(); ++u) {
    start[u] = (u * 7 + u / 3) % 2;
  }
  std::vector<std::vector<BlockID>> results;
  for (const PEID p : {1u, 2u, 4u}) {
    const DistGraph dg = distribute(g, p);
    DistPartition dp = scatter(dg, BalanceSpec(2, 0.5, g.total_node_weight()), start);
    LockSet locks(dg);
    for (int it = 0; it < 3; ++it) {
      (void)jet_iteration(dg, dp, 0.5, locks, Executor{});
    }
    results.push_back(gather(dg, dp));
  }
  EXPECT_EQ(results[0], results[1]);
  EXPECT_EQ(results[0], results[2]);
}
