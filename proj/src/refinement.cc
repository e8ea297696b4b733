/*******************************************************************************
 * Per-level refinement: balance-preserving label propagation and Jet rounds.
 *
 * @file:   refinement.cc
 ******************************************************************************/
#include "djet/jet.h"
#include "djet/multilevel.h"

namespace djet {
namespace {
// Strictly improving moves to the strongest connected block that has room at
// round start.
CandidateSet lp_candidates(const DistGraph &dg, const DistPartition &dp, const Executor &exec) {
  const BalanceSpec &spec = dp.spec;
  const std::vector<Weight> weights(dp.block_weights().begin(), dp.block_weights().end());

  CandidateSet candidates(dg.num_pes());
  exec.superstep(dg.num_pes(), [&](const PEID pe) {
    const LocalGraph &local = dg.local(pe);
    const auto &blocks = dp.locals[pe].blocks;
    std::vector<Weight> rating(dp.k(), 0);
    std::vector<BlockID> touched;

    for (NodeID u = 0; u < local.n_owned(); ++u) {
      const BlockID from = blocks[u];
      const Weight w = local.node_weight(u);
      local.for_each_neighbor(u, [&](const NodeID v, const Weight ew) {
        const BlockID b = blocks[v];
        if (rating[b] == 0) {
          touched.push_back(b);
        }
        rating[b] += ew;
      });
      BlockID to = kInvalidBlockID;
      for (const BlockID b : touched) {
        if (b != from && spec.fits(weights[b] + w) &&
            (to == kInvalidBlockID || rating[b] > rating[to] || (rating[b] == rating[to] && b < to))) {
          to = b;
        }
      }
      if (to != kInvalidBlockID && rating[to] > rating[from]) {
        candidates[pe].push_back({u, local.local_to_global(u), from, to, rating[to] - rating[from]});
      }
      for (const BlockID b : touched) {
        rating[b] = 0;
      }
      touched.clear();
    }
  });
  return candidates;
}

// Each PE may send at most its proportional share of a block's free capacity.
std::vector<std::vector<LocalMove>>
admit_with_quotas(const DistGraph &dg, const DistPartition &dp, CandidateSet &kept, const Executor &exec) {
  const BlockID k = dp.k();
  const PEID num_pes = dg.num_pes();
  std::vector<std::vector<Weight>> requested(num_pes, std::vector<Weight>(k, 0));
  for (PEID pe = 0; pe < num_pes; ++pe) {
    for (const MoveCandidate &candidate : kept[pe]) {
      requested[pe][candidate.to] += dg.local(pe).node_weight(candidate.local);
    }
  }
  const std::vector<Weight> total_requested = allreduce_sum(requested);

  std::vector<std::vector<LocalMove>> moves(num_pes);
  exec.superstep(num_pes, [&](const PEID pe) {
    const LocalGraph &local = dg.local(pe);
    auto &list = kept[pe];
    std::sort(list.begin(), list.end(), [](const auto &a, const auto &b) {
      return has_priority(a.gain, a.global, b.gain, b.global);
    });

    std::vector<Weight> quota(k);
    for (BlockID b = 0; b < k; ++b) {
      const Weight capacity = std::max<Weight>(0, dp.spec.max_block_weight() - dp.block_weights()[b]);
      if (total_requested[b] <= capacity) {
        quota[b] = requested[pe][b];
      } else {
        quota[b] = static_cast<Weight>(
            static_cast<__int128>(capacity) * requested[pe][b] / total_requested[b]
        );
      }
    }
    for (const MoveCandidate &candidate : list) {
      const Weight w = local.node_weight(candidate.local);
      if (w <= quota[candidate.to]) {
        quota[candidate.to] -= w;
        moves[pe].push_back({candidate.local, candidate.to});
      }
    }
  });
  return moves;
}
} // namespace

LpStats lp_refine(const DistGraph &dg, DistPartition &dp, const int max_rounds, RefinementState &state) {
  LpStats stats;
  const Executor &exec = state.exec;
  for (int round = 0; round < max_rounds; ++round) {
    ++stats.rounds;
    const CandidateSet candidates = lp_candidates(dg, dp, exec);
    const auto ghost_gains = exchange_interface_gains(dg, interface_gains(dg, candidates), exec);
    CandidateSet kept = filter_candidates(dg, dp, candidates, ghost_gains, exec);
    const auto moves = admit_with_quotas(dg, dp, kept, exec);

    std::vector<std::vector<LocalMove>> undo(dg.num_pes());
    for (PEID pe = 0; pe < dg.num_pes(); ++pe) {
      for (const LocalMove &move : moves[pe]) {
        undo[pe].push_back({move.local, dp.locals[pe].blocks[move.local]});
      }
    }

    const MoveBatchResult result = apply_moves(dg, dp, moves, exec);
    if (result.cut_delta > 0) {
      // Simultaneous moves interfered; the round is discarded.
      apply_moves(dg, dp, undo, exec);
      stats.rolled_back = true;
      break;
    }
    stats.moved += result.moved;
    stats.cut_delta += result.cut_delta;
    if (result.moved == 0) {
      break;
    }
  }
  return stats;
}

JetRoundStats jet_round(
    const DistGraph &dg,
    DistPartition &dp,
    const double temperature,
    const JetConfig &config,
    RefinementState &state
) {
  const Executor &exec = state.exec;
  JetRoundStats stats;
  stats.temperature = temperature;

  Weight cut = dist_edge_cut(dg, dp, exec);
  stats.input_cut = cut;

  DistPartition best = dp;
  Weight best_cut = cut;
  bool best_balanced = dp.is_balanced();

  LockSet locks(dg);
  int failures = 0;
  while (failures < config.patience) {
    ++stats.iterations;
    const JetIterationResult iteration = jet_iteration(dg, dp, temperature, locks, exec);
    cut += iteration.moves.cut_delta;
    stats.jet_moves += iteration.moves.moved;

    if (!dp.is_balanced()) {
      const RebalanceStats rebalance_stats =
          rebalance(dg, dp, config.rebalance, state.seed, state.rebalance_round, exec);
      cut += rebalance_stats.cut_delta;
      ++stats.rebalance_calls;
      stats.probabilistic_rounds += rebalance_stats.probabilistic_rounds;
    }

    if (dp.is_balanced() && (!best_balanced || cut < best_cut)) {
      best = dp;
      best_cut = cut;
      best_balanced = true;
      failures = 0;
      ++stats.improvements;
    } else {
      ++failures;
    }
  }

  dp = std::move(best);
  stats.output_cut = best_cut;
  return stats;
}
} // namespace djet
