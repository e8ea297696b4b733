/*******************************************************************************
 * Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
 *
 * @file:   acceptance.cc
 ******************************************************************************/
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "djet/multilevel.h"
#include "djet/profile.h"
#include "djet/rebalance.h"
#include "oracles.h"

using namespace djet;

namespace {
struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
public:
  void expect(const bool condition, const std::string &what) {
    if (!condition) {
      if (_failures++ < 5) {
        _messages += (_messages.empty() ? "" : "; ") + what;
      }
    }
  }

  [[nodiscard]] Outcome outcome(const std::string &summary) const {
    if (_failures == 0) {
      return {true, summary};
    }
    return {false, std::to_string(_failures) + " violation(s): " + _messages};
  }

private:
  std::size_t _failures = 0;
  std::string _messages;
};

struct SuiteGraph {
  std::string name;
  Graph graph;
};

std::vector<SuiteGraph> build_suite() {
  std::vector<SuiteGraph> suite;
  const std::pair<std::int64_t, double> rggs[] = {
      {1000, 0.05931}, {4000, 0.03250}, {10000, 0.02166}, {30000, 0.01323}, {60000, 0.00966}, {100000, 0.00766}
  };
  for (const auto &[n, radius] : rggs) {
    suite.push_back({"rgg2d_" + std::to_string(n), gen_rgg2d(n, radius, 7)});
  }
  for (const std::int64_t side : {32, 64, 100, 150, 220, 316}) {
    suite.push_back({"grid_" + std::to_string(side), gen_grid(side, side)});
  }
  return suite;
}

constexpr double kEpsilon = 0.03;
constexpr PEID kSuitePes = 4;
const BlockID kSuiteKs[] = {2, 4, 8, 16};
const std::uint64_t kSuiteSeeds[] = {1, 2, 3};

JetConfig suite_config(const RefinerKind refiner, const std::uint64_t seed) {
  JetConfig config;
  config.refiner = refiner;
  config.seed = seed;
  config.pe_count = kSuitePes;
  return config;
}

struct SuiteRun {
  std::size_t graph;
  BlockID k;
  std::uint64_t seed;
  PartitionResult jet;
  PartitionResult lp;
};

std::vector<SuiteRun> run_suite(const std::vector<SuiteGraph> &suite) {
  std::vector<SuiteRun> runs;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    for (const BlockID k : kSuiteKs) {
      for (const std::uint64_t seed : kSuiteSeeds) {
        SuiteRun run{i, k, seed, {}, {}};
        run.jet = partition(suite[i].graph, k, kEpsilon, suite_config(RefinerKind::kJet, seed));
        run.lp = partition(suite[i].graph, k, kEpsilon, suite_config(RefinerKind::kLabelPropagation, seed));
        runs.push_back(std::move(run));
      }
    }
    std::cerr << "  suite: " << suite[i].name << " done\n";
  }
  return runs;
}

// 1. Every jet partition satisfies c(V_i) <= L_max, checked by recomputation.
Outcome balance(const std::vector<SuiteGraph> &suite, const std::vector<SuiteRun> &runs) {
  Check check;
  for (const SuiteRun &run : runs) {
    const Graph &g = suite[run.graph].graph;
    const auto weights = oracle::brute_block_weights(g, run.jet.assignment, run.k);
    const auto eps_num = static_cast<std::int64_t>(std::llround(kEpsilon * 1e9));
    for (BlockID b = 0; b < run.k; ++b) {
      check.expect(
          oracle::brute_fits(weights[b], g.total_node_weight(), run.k, eps_num),
          suite[run.graph].name + " k=" + std::to_string(run.k) + " seed=" + std::to_string(run.seed) +
              " block " + std::to_string(b)
      );
    }
    check.expect(run.jet.balanced, suite[run.graph].name + " reported unbalanced");
  }
  return check.outcome(std::to_string(runs.size()) + " jet partitions within L_max");
}

// 2. jet <= lp on >= 70% of instances and geometric-mean ratio <= 0.97.
Outcome quality(const std::vector<SuiteGraph> &suite, const std::vector<SuiteRun> &runs) {
  std::size_t no_worse = 0;
  double log_sum = 0.0;
  Check check;
  for (const SuiteRun &run : runs) {
    const Graph &g = suite[run.graph].graph;
    const Weight jet = edge_cut(g, run.jet.assignment);
    const Weight lp = edge_cut(g, run.lp.assignment);
    check.expect(jet == run.jet.cut && lp == run.lp.cut, "reported cut differs from recomputation");
    check.expect(jet > 0 && lp > 0, "zero cut on a connected suite graph");
    no_worse += jet <= lp ? 1 : 0;
    log_sum += std::log(static_cast<double>(std::max<Weight>(jet, 1)) / std::max<Weight>(lp, 1));
  }
  const double fraction = static_cast<double>(no_worse) / runs.size();
  const double geomean = std::exp(log_sum / runs.size());
  check.expect(fraction >= 0.70, "jet <= lp on only " + std::to_string(fraction));
  check.expect(geomean <= 0.97, "geometric-mean ratio " + std::to_string(geomean));
  std::ostringstream summary;
  summary << "jet <= lp on " << no_worse << "/" << runs.size() << " instances, geometric-mean jet/lp = " << geomean;
  return check.outcome(summary.str());
}

// 3. Snapshot guarantee of jet_round, both standalone and inside every
// pipeline level.
Outcome round_monotonicity(const std::vector<SuiteGraph> &suite, const std::vector<SuiteRun> &runs) {
  Check check;
  std::size_t rounds = 0;
  for (const SuiteRun &run : runs) {
    for (const JetRoundStats &stats : run.jet.jet_rounds) {
      check.expect(stats.output_cut <= stats.input_cut, suite[run.graph].name + " pipeline round increased cut");
      ++rounds;
    }
  }
  std::size_t standalone = 0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const Graph &g = suite[i].graph;
    if (g.n() > 10000) {
      continue;
    }
    for (const BlockID k : kSuiteKs) {
      const Partition start = initial_partition(g, k, kEpsilon, JetConfig{});
      const Weight input = edge_cut(g, start.assignment());
      for (const double tau : {0.75, 0.625, 0.5, 0.375}) {
        const DistGraph dg = distribute(g, kSuitePes);
        DistPartition dp = scatter(dg, start.spec(), start.assignment());
        RefinementState state;
        state.seed = k;
        const JetRoundStats stats = jet_round(dg, dp, tau, JetConfig{}, state);
        const auto output = gather(dg, dp);
        const std::string where = suite[i].name + " k=" + std::to_string(k) + " tau=" + std::to_string(tau);
        check.expect(stats.input_cut == input, where + " input cut");
        check.expect(edge_cut(g, output) <= input, where + " output cut larger");
        check.expect(stats.output_cut == edge_cut(g, output), where + " output cut bookkeeping");
        check.expect(Partition(g, k, kEpsilon, output).is_balanced(), where + " output unbalanced");
        ++standalone;
      }
    }
  }
  return check.outcome(
      std::to_string(rounds) + " pipeline rounds and " + std::to_string(standalone) +
      " standalone rounds monotone and balanced"
  );
}

// 4. edge_cut, conn and incremental bookkeeping (sequential and batched
// distributed) against recomputation.
Outcome oracle_equivalence() {
  Check check;
  std::mt19937_64 rng(2024);
  std::size_t moves_checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const NodeID n = 2 + static_cast<NodeID>(rng() % 63);
    const Graph g = oracle::random_graph(rng, n, 0.05 + 0.3 * (rng() % 100) / 100.0, 9, 5);
    const auto edges = oracle::edge_list(g);
    const BlockID k = 2 + static_cast<BlockID>(rng() % 7);
    std::vector<BlockID> assignment(n);
    for (auto &b : assignment) {
      b = static_cast<BlockID>(rng() % k);
    }
    Partition p(g, k, 0.03, assignment);
    const PEID pes = std::min<PEID>(1 + static_cast<PEID>(trial % 8), n);
    const DistGraph dg = distribute(g, pes);
    DistPartition dp = scatter(dg, p.spec(), assignment);
    Weight cut = edge_cut(g, assignment);
    check.expect(cut == oracle::brute_cut(edges, assignment), "edge_cut");

    for (int sequence = 0; sequence < 1000; ++sequence) {
      const int length = 1 + static_cast<int>(rng() % 4);
      std::vector<std::vector<LocalMove>> batch(pes);
      for (int step = 0; step < length; ++step) {
        const NodeID u = static_cast<NodeID>(rng() % n);
        const BlockID to = static_cast<BlockID>(rng() % k);
        const NodeID probe = static_cast<NodeID>(rng() % n);
        const BlockID probe_block = static_cast<BlockID>(rng() % k);
        check.expect(
            conn(g, p, probe, probe_block) == oracle::brute_conn(edges, probe, assignment, probe_block), "conn"
        );
        check.expect(
            conn(g, assignment, probe, probe_block) == oracle::brute_conn(edges, probe, assignment, probe_block),
            "conn(assignment)"
        );
        if (to == p.block(u)) {
          continue;
        }
        cut += conn(g, p, u, p.block(u)) - conn(g, p, u, to);
        p.apply_move(g, u, to);
        assignment[u] = to;
        ++moves_checked;
        check.expect(cut == oracle::brute_cut(edges, assignment), "incremental cut");
        check.expect(edge_cut(g, assignment) == cut, "edge_cut after move");
        const PEID owner = dg.owner_of(u);
        batch[owner].push_back({dg.local(owner).global_to_local(u), to});
      }
      check.expect(
          std::vector<Weight>(p.block_weights().begin(), p.block_weights().end()) ==
              oracle::brute_block_weights(g, assignment, k),
          "block weights"
      );
      // The same sequence as one batch; sequential moves of one vertex
      // collapse to its last target, so replay only the final positions.
      std::vector<std::vector<LocalMove>> final_moves(pes);
      const auto current = gather(dg, dp);
      for (NodeID u = 0; u < n; ++u) {
        if (current[u] != assignment[u]) {
          const PEID owner = dg.owner_of(u);
          final_moves[owner].push_back({dg.local(owner).global_to_local(u), assignment[u]});
        }
      }
      const Weight before = dist_edge_cut(dg, dp);
      const MoveBatchResult result = apply_moves(dg, dp, final_moves);
      check.expect(before + result.cut_delta == cut, "batched cut delta");
      check.expect(dist_edge_cut(dg, dp) == cut, "distributed edge cut");
      check.expect(gather(dg, dp) == assignment, "batched assignment");
    }
  }
  return check.outcome(
      "100 random graphs x 1000 move sequences, " + std::to_string(moves_checked) + " moves exact"
  );
}

// 5. bucket_index against the MPFR oracle.
Outcome bucket_oracle() {
  Check check;
  std::vector<double> grid;
  for (int i = 0; i < 8000; ++i) {
    grid.push_back(-std::pow(10.0, -6.0 + 12.0 * i / 7999.0));
  }
  for (int i = 0; i < 1000; ++i) {
    grid.push_back(i == 0 ? 0.0 : std::pow(10.0, -3.0 + 6.0 * i / 999.0));
  }
  std::size_t points = 0;
  for (const double alpha : {1.05, 1.1, 1.5}) {
    std::vector<double> boundary;
    double power = alpha;
    for (int e = 1; boundary.size() < 999; ++e, power *= alpha) {
      const double r = 1.0 - power;
      boundary.push_back(r);
      boundary.push_back(std::nextafter(r, 0.0));
      boundary.push_back(std::nextafter(r, -INFINITY));
    }
    boundary.resize(1000);
    for (const auto *values : {&grid, &boundary}) {
      for (const double r : *values) {
        const int got = bucket_index(r, alpha);
        const int want = oracle::mpfr_bucket_index(r, alpha);
        check.expect(got == want, "r=" + std::to_string(r) + " alpha=" + std::to_string(alpha));
        ++points;
      }
    }
  }
  check.expect(bucket_index(0.0, 1.1) == 0, "worked value 0 -> 0");
  check.expect(bucket_index(-0.1, 1.1) == 2, "worked value -0.1 -> 2");
  check.expect(bucket_index(-1.0, 1.1) == 9, "worked value -1 -> 9");
  return check.outcome(std::to_string(points) + " points exact, worked values 0->0, -0.1->2, -1->9");
}

// 6. Expected inflow of a probabilistic round with p_u = 0.5, W_u = 40 for
// two targets; overload never increases.
Outcome probabilistic_expectation() {
  // L_max = 100. Block 0 (140): 40 vertices adjacent to block 1, 40 adjacent
  // to block 2, 60 on a path. Blocks 1 and 2 hold 80 each.
  std::vector<std::tuple<NodeID, NodeID, Weight>> edges;
  std::vector<BlockID> assignment(300, 0);
  for (NodeID i = 0; i < 40; ++i) {
    edges.emplace_back(i, 140 + i, 1);
    edges.emplace_back(40 + i, 220 + i, 1);
  }
  for (NodeID i = 80; i + 1 < 140; ++i) {
    edges.emplace_back(i, i + 1, 1);
  }
  for (NodeID i = 140; i < 300; ++i) {
    assignment[i] = i < 220 ? 1 : 2;
  }
  const Graph g = oracle::graph_from_edges(300, edges);
  const BalanceSpec spec(3, 0.0, g.total_node_weight());

  Check check;
  constexpr int kSeeds = 1000;
  const double tolerance = 3.0 * std::sqrt(40 * 0.25 / kSeeds);
  std::ostringstream summary;
  for (const PEID pes : {1u, 4u}) {
    const DistGraph dg = distribute(g, pes);
    double inflow[3] = {0.0, 0.0, 0.0};
    for (int seed = 0; seed < kSeeds; ++seed) {
      DistPartition dp = scatter(dg, spec, assignment);
      const double before = dp.total_overload();
      BucketTable table = build_buckets(dg, dp, 1.1);
      compute_cutoffs_and_probs(table, dp);
      if (seed == 0) {
        for (const BlockID b : {1u, 2u}) {
          check.expect(table.candidate_weight[b] == 40, "W_u != 40");
          check.expect(table.probability[b] == 0.5, "p_u != 0.5");
        }
      }
      const MoveBatchResult result = probabilistic_round(dg, dp, table, seed, 0);
      for (const BlockID b : {1u, 2u}) {
        inflow[b] += static_cast<double>(result.weight_in[b]);
      }
      check.expect(dp.total_overload() <= before, "overload increased for seed " + std::to_string(seed));
    }
    for (const BlockID b : {1u, 2u}) {
      const double mean = inflow[b] / kSeeds;
      check.expect(std::abs(mean - 20.0) <= tolerance, "mean inflow " + std::to_string(mean));
      summary << "P=" << pes << " block " << b << " mean " << mean << "; ";
    }
  }
  summary << "expected 20 +- " << tolerance;
  return check.outcome(summary.str());
}

// 7. Identical runs give identical assignments for fixed P (any schedule);
// distributed metrics equal the sequential oracle for P in {1, 2, 4, 8}.
Outcome determinism(const std::vector<SuiteGraph> &suite, const std::vector<SuiteRun> &runs) {
  Check check;
  std::size_t repeats = 0;
  for (const SuiteRun &run : runs) {
    if (suite[run.graph].graph.n() > 10000 || run.seed != 1) {
      continue;
    }
    JetConfig config = suite_config(RefinerKind::kJet, run.seed);
    config.execution = (run.k == 4 || run.k == 16) ? ExecutionMode::kThreaded : ExecutionMode::kShuffled;
    const PartitionResult again = partition(suite[run.graph].graph, run.k, kEpsilon, config);
    check.expect(again.assignment == run.jet.assignment, suite[run.graph].name + " rerun differs");
    ++repeats;
  }

  std::mt19937_64 rng(7);
  std::size_t metric_checks = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    const Graph &g = suite[i % 2 == 0 ? i / 2 : 6 + i / 2].graph;
    const auto edges = oracle::edge_list(g);
    for (const BlockID k : kSuiteKs) {
      std::vector<BlockID> assignment(g.n());
      for (auto &b : assignment) {
        b = static_cast<BlockID>(rng() % k);
      }
      const Weight cut = oracle::brute_cut(edges, assignment);
      const auto weights = oracle::brute_block_weights(g, assignment, k);
      const BalanceSpec spec(k, kEpsilon, g.total_node_weight());
      for (const PEID pes : {1u, 2u, 4u, 8u}) {
        const DistGraph dg = distribute(g, pes);
        const DistPartition dp = scatter(dg, spec, assignment);
        for (const ExecutionMode mode : {ExecutionMode::kSequential, ExecutionMode::kThreaded}) {
          const Executor exec(mode, 0, 4);
          check.expect(dist_edge_cut(dg, dp, exec) == cut, "distributed cut P=" + std::to_string(pes));
          check.expect(dist_block_weights(dg, dp, exec) == weights, "block weights P=" + std::to_string(pes));
          ++metric_checks;
        }
      }
    }
  }
  return check.outcome(
      std::to_string(repeats) + " reruns identical, " + std::to_string(metric_checks) +
      " distributed metric evaluations equal the oracle"
  );
}

// 8. Schedule and the values recorded by a pipeline run.
Outcome schedule(const std::vector<SuiteRun> &runs) {
  Check check;
  const std::vector<double> expected{0.75, 0.625, 0.5, 0.375};
  check.expect(temperature_schedule(JetConfig{}) == expected, "temperature_schedule");
  for (const SuiteRun &run : runs) {
    check.expect(run.jet.temperatures == expected, "recorded schedule");
    for (std::size_t i = 0; i < run.jet.jet_rounds.size(); ++i) {
      check.expect(run.jet.jet_rounds[i].temperature == expected[i % 4], "round temperature");
    }
  }
  return check.outcome("tau = (0.75, 0.625, 0.5, 0.375) computed and recorded on every level");
}

// 9. Two algorithms with cuts 10 and 11 on one instance.
Outcome profile_example() {
  Check check;
  std::istringstream csv("algorithm,graph,k,seed,cut,time_s\nA,g,2,1,10,0.1\nB,g,2,1,11,0.1\n");
  const auto curves = performance_profile(parse_run_records(csv), {1.0, 1.1});
  check.expect(curves.size() == 2, "two curves");
  if (curves.size() == 2) {
    check.expect(curves[0].algorithm == "A" && curves[0].fractions == std::vector<double>{1.0, 1.0}, "A curve");
    check.expect(curves[1].algorithm == "B" && curves[1].fractions == std::vector<double>{0.0, 1.0}, "B curve");
  }
  std::stringstream out;
  write_profile(out, curves);
  check.expect(out.str() == "algorithm,delta,fraction\nA,1,1\nA,1.1,1\nB,1,0\nB,1.1,1\n", "profile CSV");
  return check.outcome("delta=1: (1, 0), delta=1.1: (1, 1)");
}

// Block 0 holds `good` vertices with gain +1 towards block 1 and `interior`
// path vertices; blocks 1 to 3 hold isolated vertices. k = 4, eps = 0.5.
Outcome trigger_case(const NodeID good, const NodeID interior, const std::array<NodeID, 3> others,
                     const double overload, const int rounds, const int epochs) {
  const NodeID n = good + interior + others[0] + others[1] + others[2];
  std::vector<std::tuple<NodeID, NodeID, Weight>> edges;
  std::vector<BlockID> assignment(n, 0);
  const NodeID block1_first = good + interior;
  for (NodeID i = 0; i < good; ++i) {
    edges.emplace_back(i, block1_first + i % others[0], 1);
  }
  for (NodeID i = good; i + 1 < good + interior; ++i) {
    edges.emplace_back(i, i + 1, 1);
  }
  NodeID next = block1_first;
  for (BlockID b = 1; b <= 3; ++b) {
    for (NodeID i = 0; i < others[b - 1]; ++i) {
      assignment[next++] = b;
    }
  }
  const Graph g = oracle::graph_from_edges(n, edges);
  Check check;
  for (const PEID pes : {1u, 4u}) {
    const DistGraph dg = distribute(g, pes);
    DistPartition dp = scatter(dg, BalanceSpec(4, 0.5, g.total_node_weight()), assignment);
    check.expect(dp.total_overload() == overload, "initial overload");
    std::uint64_t round = 0;
    const RebalanceStats stats = rebalance(dg, dp, RebalanceConfig{}, 3, round);
    check.expect(stats.probabilistic_rounds == rounds, "probabilistic rounds " + std::to_string(stats.probabilistic_rounds));
    check.expect(stats.coordinated_epochs == epochs, "coordinated epochs " + std::to_string(stats.coordinated_epochs));
    check.expect(stats.balanced, "not balanced");
  }
  return check.outcome("");
}

// 10. 5% reduction triggers exactly one probabilistic round, 20% none.
Outcome trigger() {
  Check check;
  check.expect(triggers_probabilistic_round(100, 95, 0.1), "100 -> 95 must trigger");
  check.expect(!triggers_probabilistic_round(100, 80, 0.1), "100 -> 80 must not trigger");
  const Outcome five = trigger_case(200, 1460, {340, 1000, 1000}, 160.0, 1, 1);
  const Outcome twenty = trigger_case(200, 1340, {460, 1000, 1000}, 40.0, 0, 5);
  check.expect(five.pass, "5% scenario: " + five.detail);
  check.expect(twenty.pass, "20% scenario: " + twenty.detail);
  return check.outcome("epoch 160 -> 152 (5%): 1 probabilistic round; 40 -> 32 (20%): none");
}
} // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  bool all = true;
  auto report = [&](const int id, const std::string &name, const Outcome &outcome) {
    all = all && outcome.pass;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << outcome.detail
              << std::endl;
  };

  const auto run = [](auto &&fn) -> Outcome {
    try {
      return fn();
    } catch (const std::exception &e) {
      return {false, std::string("exception: ") + e.what()};
    }
  };

  std::cerr << "building suite\n";
  const std::vector<SuiteGraph> suite = build_suite();
  std::vector<SuiteRun> runs;
  Outcome suite_error{true, ""};
  try {
    runs = run_suite(suite);
  } catch (const std::exception &e) {
    suite_error = {false, std::string("suite run failed: ") + e.what()};
  }
  auto with_suite = [&](auto &&fn) -> Outcome {
    return suite_error.pass ? run(fn) : suite_error;
  };

  report(1, "balance", with_suite([&] { return balance(suite, runs); }));
  report(2, "quality regression", with_suite([&] { return quality(suite, runs); }));
  report(3, "round monotonicity", with_suite([&] { return round_monotonicity(suite, runs); }));
  report(4, "oracle equivalence", run(oracle_equivalence));
  report(5, "bucket index", run(bucket_oracle));
  report(6, "probabilistic expectation", run(probabilistic_expectation));
  report(7, "determinism and PE invariance", with_suite([&] { return determinism(suite, runs); }));
  report(8, "temperature schedule", with_suite([&] { return schedule(runs); }));
  report(9, "performance profile", run(profile_example));
  report(10, "trigger logic", run(trigger));

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << (all ? "ALL PASS" : "SOME FAILED") << " (" << seconds << " s)" << std::endl;
  return all ? 0 : 1;
}
