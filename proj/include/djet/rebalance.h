/*******************************************************************************
 * Rebalancing after unconstrained moves.
 *
 * Two algorithms cooperate:
 *  - a coordinated finisher that admits a few best relocation candidates per
 *    overloaded block and epoch against live target capacities (never creates
 *    new overload),
 *  - a highly parallel probabilistic round: vertices of overloaded blocks are
 *    sorted into exponentially spaced buckets by relative gain, a global
 *    cut-off bucket is computed per overloaded block, and every candidate below
 *    it moves to its target V_u with probability p_u = (L_max - c(V_u)) / W_u.
 * The probabilistic round runs whenever a coordinated epoch reduces the total
 * overload by less than the trigger threshold.
 *
 * @file:   rebalance.h
 ******************************************************************************/
#pragma once

#include <cstdint>
#include <vector>

#include "djet/definitions.h"
#include "djet/dist.h"

namespace djet {
struct RebalanceConfig {
  double alpha = 1.1;
  double trigger_threshold = 0.1;
  int max_iterations = 64;
  int admissions_per_block = 8;
  // Candidates per overloaded block each PE reports to the coordinator.
  int reported_per_block = 32;
};

// r_v = g * c(v) if g > 0, else g / c(v).
double relative_gain(Weight gain, Weight weight);

// 0 if r >= 0, else 1 + ceil(log_alpha(1 - r)).
int bucket_index(double relative_gain, double alpha);

struct RelocationCandidate {
  NodeID local;
  NodeID global;
  Weight weight;
  BlockID from;
  BlockID to;
  Weight gain;
  double relative_gain;
  int bucket;
};

// Best relocation of every vertex in an overloaded block w.r.t. round-start
// block weights; a target V_u is feasible if it is not the source and
// c(V_u) + c(v) <= L_max.
struct RelocationScan {
  std::vector<std::vector<RelocationCandidate>> candidates; // per PE
  std::uint64_t excluded = 0; // vertices of overloaded blocks without feasible target
};

RelocationScan scan_relocations(
    const DistGraph &dg, const DistPartition &dp, double alpha, const Executor &exec = {}
);

struct BucketTable {
  std::vector<Weight> round_start_weights;
  std::vector<BlockID> overloaded;   // ascending block IDs
  std::vector<int> slot_of;          // block -> index into `overloaded`, -1 otherwise
  int num_buckets = 0;               // global

  std::vector<std::vector<RelocationCandidate>> candidates;  // per PE
  std::vector<std::vector<Weight>> local_bucket_weights;     // per PE, [slot * num_buckets + j]
  std::uint64_t excluded = 0;

  // Filled by compute_cutoffs_and_probs().
  std::vector<Weight> global_bucket_weights; // [slot * num_buckets + j]
  std::vector<int> cutoff;                   // per slot, in [0, num_buckets]
  std::vector<bool> cutoff_uncovered;        // bucketed weight < excess
  std::vector<Weight> candidate_weight;      // W_u per block
  std::vector<double> probability;           // p_u per block, clamped to 1

  [[nodiscard]] bool empty() const {
    return overloaded.empty();
  }
  [[nodiscard]] Weight global_bucket_weight(std::size_t slot, int bucket) const {
    return global_bucket_weights[slot * num_buckets + bucket];
  }
};

BucketTable build_buckets(
    const DistGraph &dg, const DistPartition &dp, double alpha, const Executor &exec = {}
);

// All-reduces bucket weights; cut-off B_o = min{ j | sum_{i<j} c(B^i_o) >= c(V_o) - L_max };
// W_u and p_u from the candidates below the cut-offs.
void compute_cutoffs_and_probs(BucketTable &table, const DistPartition &dp);

// First bucket index whose prefix (exclusive) covers `excess`; size() when
// even the full sum falls short.
int cutoff_bucket(std::span<const Weight> bucket_weights, Weight excess);

// Every candidate below its block's cut-off moves with probability p_(target).
// Coins are keyed by (seed, round, global vertex ID).
MoveBatchResult probabilistic_round(
    const DistGraph &dg,
    DistPartition &dp,
    const BucketTable &table,
    std::uint64_t seed,
    std::uint64_t round,
    const Executor &exec = {}
);

// One centrally coordinated epoch.
MoveBatchResult coordinated_round(
    const DistGraph &dg, DistPartition &dp, const RebalanceConfig &config, const Executor &exec = {}
);

// True if an epoch that reduced the overload from `before` to `after` calls
// for a probabilistic round.
bool triggers_probabilistic_round(double before, double after, double threshold);

struct RebalanceStats {
  int iterations = 0;
  int coordinated_epochs = 0;
  int probabilistic_rounds = 0;
  int finisher_epochs = 0;
  std::uint64_t moved = 0;
  Weight cut_delta = 0;
  double overload_before = 0.0;
  double overload_after = 0.0;
  bool balanced = false;
  bool hit_iteration_cap = false;
};

// `round` is advanced once per probabilistic round so that repeated calls
// draw fresh coins.
RebalanceStats rebalance(
    const DistGraph &dg,
    DistPartition &dp,
    const RebalanceConfig &config,
    std::uint64_t seed,
    std::uint64_t &round,
    const Executor &exec = {}
);
} // namespace djet
