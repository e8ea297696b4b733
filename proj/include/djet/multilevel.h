/*******************************************************************************
 * Multilevel pipeline: size-constrained label propagation coarsening, greedy
 * graph growing initial partitioning, and per-level refinement with label
 * propagation followed by t Jet rounds of decreasing temperature.
 *
 * @file:   multilevel.h
 ******************************************************************************/
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "djet/definitions.h"
#include "djet/dist.h"
#include "djet/graph.h"
#include "djet/partition.h"
#include "djet/rebalance.h"

namespace djet {
enum class RefinerKind {
  kLabelPropagation,
  kJet,
};

std::string to_string(RefinerKind kind);
RefinerKind parse_refiner(const std::string &name);

struct JetConfig {
  int rounds = 4;             // t
  double initial_temperature = 0.75; // tau_0
  double final_temperature = 0.25;   // tau_1
  int patience = 12;
  RefinerKind refiner = RefinerKind::kJet;
  std::uint64_t seed = 0;
  PEID pe_count = 1;
  int lp_rounds = 5;
  int initial_repetitions = 8;
  RebalanceConfig rebalance;
  ExecutionMode execution = ExecutionMode::kSequential;
  unsigned threads = 0;

  // Throws on violated invariants (0 <= tau_1 <= tau_0 <= 1, t >= 1, ...).
  void validate() const;

  // key = value lines; unknown keys are rejected by parse.
  [[nodiscard]] std::string to_text() const;
  static JetConfig parse_text(const std::string &text);
  // Applies key = value assignments on top of this config.
  void apply_text(const std::string &text);
  void set(const std::string &key, const std::string &value);
};

// tau_i = tau_0 + (i / t) * (tau_1 - tau_0) for i = 0 .. t-1.
std::vector<double> temperature_schedule(const JetConfig &config);

//
// Coarsening
//

struct Level {
  Graph graph;
  std::vector<NodeID> to_coarse; // empty on the coarsest level
};

class Hierarchy {
public:
  [[nodiscard]] std::size_t num_levels() const {
    return _levels.size();
  }
  [[nodiscard]] const Graph &graph(std::size_t level) const {
    return _levels[level].graph;
  }
  [[nodiscard]] const Graph &coarsest() const {
    return _levels.back().graph;
  }
  [[nodiscard]] std::span<const NodeID> mapping(std::size_t level) const {
    return _levels[level].to_coarse;
  }

  // Assignment of level `level` induced by an assignment of level `level + 1`.
  [[nodiscard]] std::vector<BlockID>
  project(std::size_t level, std::span<const BlockID> coarse_assignment) const;

  void push(Graph graph) {
    _levels.push_back({std::move(graph), {}});
  }
  void set_mapping(std::size_t level, std::vector<NodeID> to_coarse) {
    _levels[level].to_coarse = std::move(to_coarse);
  }

private:
  std::vector<Level> _levels;
};

struct CoarseningConfig {
  NodeID contraction_limit_per_block = 160;
  double min_shrink_factor = 0.95;
  int lp_iterations = 5;
};

// Size-constrained label propagation clustering; returns a dense cluster ID
// per vertex (IDs in order of first occurrence).
std::vector<NodeID> cluster(const Graph &graph, Weight max_cluster_weight, int iterations, std::uint64_t seed);

// Contracts clusters; coarse weights are sums of fine weights.
Graph contract(const Graph &graph, std::span<const NodeID> clustering);

Hierarchy coarsen(const Graph &graph, BlockID k, std::uint64_t seed, const CoarseningConfig &config = {});

//
// Initial partitioning
//

// Recursive bisection by greedy graph growing.
std::vector<BlockID> greedy_bisection(const Graph &graph, BlockID k, std::uint64_t seed, std::uint64_t repetition);

Partition initial_partition(const Graph &coarsest, BlockID k, double epsilon, const JetConfig &config);

//
// Refinement
//

struct RefinementState {
  std::uint64_t seed = 0;
  std::uint64_t rebalance_round = 0; // advanced by every probabilistic round
  Executor exec;
};

struct LpStats {
  int rounds = 0;
  std::uint64_t moved = 0;
  Weight cut_delta = 0;
  bool rolled_back = false;
};

// Balance-preserving label propagation; never increases the cut.
LpStats lp_refine(const DistGraph &dg, DistPartition &dp, int max_rounds, RefinementState &state);

struct JetRoundStats {
  double temperature = 0.0;
  int iterations = 0;
  int improvements = 0;
  Weight input_cut = 0;
  Weight output_cut = 0;
  std::uint64_t jet_moves = 0;
  int rebalance_calls = 0;
  int probabilistic_rounds = 0;
};

// Repeats {Jet iteration; rebalance} until `patience` consecutive repetitions
// did not produce a balanced partition with a strictly smaller cut than the
// best seen so far (input included); leaves the best partition in dp.
JetRoundStats jet_round(
    const DistGraph &dg, DistPartition &dp, double temperature, const JetConfig &config, RefinementState &state
);

//
// Pipeline
//

struct PartitionResult {
  std::vector<BlockID> assignment;
  BlockID k = 1;
  double epsilon = 0.0;
  double l_max = 0.0;
  Weight cut = 0;
  double imbalance = 0.0;
  bool balanced = true;
  double residual_overload = 0.0;
  std::vector<Weight> block_weights;

  std::size_t levels = 1;
  NodeID coarsest_n = 0;
  std::vector<double> temperatures; // schedule used on every level
  std::vector<JetRoundStats> jet_rounds;
  std::uint64_t lp_moves = 0;
  int probabilistic_rounds = 0;

  double time_coarsening = 0.0;
  double time_initial = 0.0;
  double time_refinement = 0.0;
  double time_total = 0.0;
};

PartitionResult partition(const Graph &graph, BlockID k, double epsilon, const JetConfig &config);
} // namespace djet
