/*******************************************************************************
 * Deterministic simulation of the distributed-memory model.
 *
 * @file:   dist.cc
 ******************************************************************************/
#include "djet/dist.h"

#include <exception>
#include <numeric>
#include <thread>

#include "djet/random.h"

namespace djet {
void Executor::superstep(const PEID num_pes, const std::function<void(PEID)> &body) const {
  switch (_mode) {
  case ExecutionMode::kSequential:
    for (PEID pe = 0; pe < num_pes; ++pe) {
      body(pe);
    }
    break;

  case ExecutionMode::kReverse:
    for (PEID pe = num_pes; pe-- > 0;) {
      body(pe);
    }
    break;

  case ExecutionMode::kShuffled: {
    std::vector<PEID> order(num_pes);
    std::iota(order.begin(), order.end(), 0);
    CounterRandom random(_shuffle_seed, _superstep_counter++);
    for (PEID i = num_pes; i > 1; --i) {
      std::swap(order[i - 1], order[random.next_below(i)]);
    }
    for (const PEID pe : order) {
      body(pe);
    }
    break;
  }

  case ExecutionMode::kThreaded: {
    const unsigned hw = std::max(2u, std::thread::hardware_concurrency());
    const unsigned num_threads = std::min<unsigned>(_threads == 0 ? hw : _threads, num_pes);
    std::vector<std::thread> workers;
    std::vector<std::pair<PEID, std::exception_ptr>> failures(num_threads, {num_pes, nullptr});
    workers.reserve(num_threads);
    for (unsigned t = 0; t < num_threads; ++t) {
      workers.emplace_back([&, t] {
        for (PEID pe = t; pe < num_pes; pe += num_threads) {
          try {
            body(pe);
          } catch (...) {
            failures[t] = {pe, std::current_exception()};
            return;
          }
        }
      });
    }
    // join() is the barrier and provides the happens-before edge.
    for (std::thread &worker : workers) {
      worker.join();
    }
    // Same exception as a sequential run would surface first.
    const auto first = std::min_element(failures.begin(), failures.end(), [](const auto &a, const auto &b) {
      return a.first < b.first;
    });
    if (first != failures.end() && first->second) {
      std::rethrow_exception(first->second);
    }
    break;
  }
  }
}

namespace {
template <typename Op>
std::vector<Weight> allreduce(const std::vector<std::vector<Weight>> &contributions, Op op) {
  if (contributions.empty()) {
    return {};
  }
  const std::size_t length = contributions.front().size();
  for (const auto &contribution : contributions) {
    if (contribution.size() != length) {
      throw_invalid_argument("allreduce: contributions differ in length");
    }
  }
  std::vector<Weight> result = contributions.front();
  for (std::size_t pe = 1; pe < contributions.size(); ++pe) {
    for (std::size_t i = 0; i < length; ++i) {
      result[i] = op(result[i], contributions[pe][i]);
    }
  }
  return result;
}
} // namespace

std::vector<Weight> allreduce_sum(const std::vector<std::vector<Weight>> &contributions) {
  return allreduce(contributions, std::plus<>{});
}

std::vector<Weight> allreduce_max(const std::vector<std::vector<Weight>> &contributions) {
  return allreduce(contributions, [](const Weight a, const Weight b) { return std::max(a, b); });
}

NodeID LocalGraph::global_to_local(const NodeID global) const {
  if (global >= first && global < last) {
    return global - first;
  }
  const auto it = std::lower_bound(ghost_global.begin(), ghost_global.end(), global);
  if (it == ghost_global.end() || *it != global) {
    return kInvalidNodeID;
  }
  return n_owned() + static_cast<NodeID>(it - ghost_global.begin());
}

PEID DistGraph::owner_of(const NodeID global) const {
  const auto it = std::upper_bound(_vtxdist.begin(), _vtxdist.end(), global);
  return static_cast<PEID>(it - _vtxdist.begin() - 1);
}

Graph DistGraph::reassemble() const {
  std::vector<Weight> node_weights(global_n());
  for (const LocalGraph &local : _locals) {
    for (NodeID u = 0; u < local.n_owned(); ++u) {
      node_weights[local.first + u] = local.node_weight(u);
    }
  }
  GraphBuilder builder(std::move(node_weights));
  for (const LocalGraph &local : _locals) {
    for (NodeID u = 0; u < local.n_owned(); ++u) {
      const NodeID gu = local.local_to_global(u);
      local.for_each_neighbor(u, [&](const NodeID v, const Weight w) {
        const NodeID gv = local.local_to_global(v);
        if (gu < gv) {
          builder.add_edge(gu, gv, w);
        }
      });
    }
  }
  return std::move(builder).build();
}

DistGraph distribute(const Graph &graph, const PEID num_pes) {
  const NodeID n = graph.n();
  if (num_pes < 1 || num_pes > n) {
    throw_invalid_argument(
        "PE count " + std::to_string(num_pes) + " must lie in [1, " + std::to_string(n) + "]"
    );
  }

  DistGraph dg;
  dg._global_m = graph.m();
  dg._total_node_weight = graph.total_node_weight();
  dg._vtxdist.assign(num_pes + 1, 0);
  dg._vtxdist.back() = n;

  const auto prefix = graph.raw_nodes();
  const EdgeID total = graph.num_arcs();
  for (PEID i = 1; i < num_pes; ++i) {
    const NodeID lo = dg._vtxdist[i - 1] + 1;
    const NodeID hi = n - (num_pes - i);
    NodeID split = 0;
    if (total == 0) {
      split = static_cast<NodeID>(static_cast<std::uint64_t>(i) * n / num_pes);
    } else {
      // |prefix[b] * P - i * total| is the scaled distance to the ideal split.
      auto distance = [&](const NodeID b) {
        const auto scaled = static_cast<__int128>(prefix[b]) * num_pes;
        const auto ideal = static_cast<__int128>(i) * total;
        return scaled > ideal ? scaled - ideal : ideal - scaled;
      };
      const auto it = std::lower_bound(
          prefix.begin(),
          prefix.end(),
          i,
          [&](const EdgeID value, const PEID pe) {
            return static_cast<__int128>(value) * num_pes < static_cast<__int128>(pe) * total;
          }
      );
      split = static_cast<NodeID>(std::min<std::size_t>(it - prefix.begin(), n));
      if (split > 0 && distance(split - 1) <= distance(split)) {
        --split;
      }
    }
    dg._vtxdist[i] = std::clamp(split, lo, hi);
  }

  dg._locals.resize(num_pes);
  for (PEID pe = 0; pe < num_pes; ++pe) {
    LocalGraph &local = dg._locals[pe];
    local.pe = pe;
    local.first = dg._vtxdist[pe];
    local.last = dg._vtxdist[pe + 1];

    for (NodeID u = local.first; u < local.last; ++u) {
      for (const NodeID v : graph.neighbors(u)) {
        if (v < local.first || v >= local.last) {
          local.ghost_global.push_back(v);
        }
      }
    }
    std::sort(local.ghost_global.begin(), local.ghost_global.end());
    local.ghost_global.erase(
        std::unique(local.ghost_global.begin(), local.ghost_global.end()), local.ghost_global.end()
    );
    local.ghost_owner.reserve(local.ghost_global.size());
    for (const NodeID g : local.ghost_global) {
      local.ghost_owner.push_back(dg.owner_of(g));
    }

    const NodeID n_owned = local.n_owned();
    local.nodes.assign(n_owned + 1, 0);
    local.node_weights.resize(local.n_local());
    for (NodeID u = 0; u < n_owned; ++u) {
      const NodeID gu = local.first + u;
      local.nodes[u + 1] = local.nodes[u] + graph.degree(gu);
      local.node_weights[u] = graph.node_weight(gu);

      std::vector<PEID> replicas;
      graph.for_each_neighbor(gu, [&](const NodeID gv, const Weight w) {
        const NodeID v = local.global_to_local(gv);
        local.edges.push_back(v);
        local.edge_weights.push_back(w);
        if (!local.is_owned(v)) {
          replicas.push_back(local.owner(v));
        }
      });
      std::sort(replicas.begin(), replicas.end());
      replicas.erase(std::unique(replicas.begin(), replicas.end()), replicas.end());
      local.replica_pes.insert(local.replica_pes.end(), replicas.begin(), replicas.end());
      local.replica_offsets.push_back(local.replica_pes.size());
    }
    for (NodeID g = 0; g < local.n_ghosts(); ++g) {
      local.node_weights[n_owned + g] = graph.node_weight(local.ghost_global[g]);
    }
  }

  return dg;
}

bool DistPartition::is_balanced() const {
  const auto weights = block_weights();
  return std::all_of(weights.begin(), weights.end(), [&](const Weight w) { return spec.fits(w); });
}

double DistPartition::total_overload() const {
  return overload_report(spec, block_weights()).total_overload;
}

DistPartition
scatter(const DistGraph &dg, const BalanceSpec &spec, const std::span<const BlockID> assignment) {
  if (assignment.size() != dg.global_n()) {
    throw_invalid_argument("assignment does not match the distributed graph");
  }
  DistPartition dp;
  dp.spec = spec;
  dp.locals.resize(dg.num_pes());

  std::vector<Weight> weights(spec.k(), 0);
  for (PEID pe = 0; pe < dg.num_pes(); ++pe) {
    const LocalGraph &local = dg.local(pe);
    LocalPartition &lp = dp.locals[pe];
    lp.blocks.resize(local.n_local());
    for (NodeID u = 0; u < local.n_local(); ++u) {
      const BlockID b = assignment[local.local_to_global(u)];
      if (b >= spec.k()) {
        throw_invalid_argument("block ID out of range");
      }
      lp.blocks[u] = b;
      if (local.is_owned(u)) {
        weights[b] += local.node_weight(u);
      }
    }
  }
  for (LocalPartition &lp : dp.locals) {
    lp.block_weights = weights;
  }
  return dp;
}

std::vector<BlockID> gather(const DistGraph &dg, const DistPartition &dp) {
  std::vector<BlockID> assignment(dg.global_n());
  for (PEID pe = 0; pe < dg.num_pes(); ++pe) {
    const LocalGraph &local = dg.local(pe);
    std::copy_n(dp.locals[pe].blocks.begin(), local.n_owned(), assignment.begin() + local.first);
  }
  return assignment;
}

void sync_ghost_blocks(const DistGraph &dg, DistPartition &dp, const Executor &exec) {
  MessageQueue<BlockID> queue(dg.num_pes());
  exec.superstep(dg.num_pes(), [&](const PEID pe) {
    const LocalGraph &local = dg.local(pe);
    for (NodeID u = 0; u < local.n_owned(); ++u) {
      for (const PEID to : local.replicas(u)) {
        queue.send(pe, to, local.local_to_global(u), dp.locals[pe].blocks[u]);
      }
    }
  });
  const auto inboxes = queue.deliver();
  exec.superstep(dg.num_pes(), [&](const PEID pe) {
    const LocalGraph &local = dg.local(pe);
    for (const auto &message : inboxes[pe]) {
      dp.locals[pe].blocks[local.global_to_local(message.global)] = message.payload;
    }
  });
}

std::vector<GhostGains> exchange_interface_gains(
    const DistGraph &dg, const std::vector<std::vector<InterfaceGain>> &gains, const Executor &exec
) {
  if (gains.size() != dg.num_pes()) {
    throw_invalid_argument("exchange_interface_gains: one gain list per PE expected");
  }
  MessageQueue<GhostGain> queue(dg.num_pes());
  exec.superstep(dg.num_pes(), [&](const PEID pe) {
    const LocalGraph &local = dg.local(pe);
    for (const InterfaceGain &entry : gains[pe]) {
      for (const PEID to : local.replicas(entry.local)) {
        queue.send(pe, to, local.local_to_global(entry.local), {entry.gain, entry.target});
      }
    }
  });
  const auto inboxes = queue.deliver();

  std::vector<GhostGains> result(dg.num_pes());
  exec.superstep(dg.num_pes(), [&](const PEID pe) {
    const LocalGraph &local = dg.local(pe);
    result[pe].assign(local.n_ghosts(), std::nullopt);
    for (const auto &message : inboxes[pe]) {
      result[pe][local.global_to_local(message.global) - local.n_owned()] = message.payload;
    }
  });
  return result;
}

MoveBatchResult apply_moves(
    const DistGraph &dg,
    DistPartition &dp,
    const std::vector<std::vector<LocalMove>> &moves,
    const Executor &exec
) {
  const PEID num_pes = dg.num_pes();
  const BlockID k = dp.k();
  if (moves.size() != num_pes) {
    throw_invalid_argument("apply_moves: one move list per PE expected");
  }

  // Old block of every local vertex that changed in this batch.
  std::vector<std::vector<BlockID>> previous(num_pes);
  std::vector<std::vector<NodeID>> applied(num_pes);
  std::vector<std::vector<Weight>> weight_deltas(num_pes, std::vector<Weight>(2 * k, 0));

  MessageQueue<BlockID> queue(num_pes);
  exec.superstep(num_pes, [&](const PEID pe) {
    const LocalGraph &local = dg.local(pe);
    LocalPartition &lp = dp.locals[pe];
    previous[pe].assign(local.n_local(), kInvalidBlockID);
    for (const LocalMove &move : moves[pe]) {
      if (!local.is_owned(move.local) || move.target >= k) {
        throw_invalid_argument("apply_moves: invalid move");
      }
      const BlockID from = lp.blocks[move.local];
      if (from == move.target || previous[pe][move.local] != kInvalidBlockID) {
        continue;
      }
      previous[pe][move.local] = from;
      applied[pe].push_back(move.local);
      lp.blocks[move.local] = move.target;
      const Weight w = local.node_weight(move.local);
      weight_deltas[pe][move.target] += w;
      weight_deltas[pe][k + from] += w;
      for (const PEID to : local.replicas(move.local)) {
        queue.send(pe, to, local.local_to_global(move.local), move.target);
      }
    }
  });
  const auto inboxes = queue.deliver();

  // S1: arcs from a moved vertex to an unmoved one (each such edge seen once).
  // S2: arcs between two moved vertices (each such edge seen twice).
  std::vector<std::vector<Weight>> cut_terms(num_pes, std::vector<Weight>(2, 0));
  exec.superstep(num_pes, [&](const PEID pe) {
    const LocalGraph &local = dg.local(pe);
    LocalPartition &lp = dp.locals[pe];
    auto &old_blocks = previous[pe];
    for (const auto &message : inboxes[pe]) {
      const NodeID ghost = local.global_to_local(message.global);
      old_blocks[ghost] = lp.blocks[ghost];
      lp.blocks[ghost] = message.payload;
    }

    for (const NodeID u : applied[pe]) {
      const BlockID old_u = old_blocks[u];
      const BlockID new_u = lp.blocks[u];
      local.for_each_neighbor(u, [&](const NodeID v, const Weight w) {
        const BlockID new_v = lp.blocks[v];
        const BlockID old_v = old_blocks[v];
        if (old_v == kInvalidBlockID) {
          cut_terms[pe][0] += w * ((new_u != new_v) - (old_u != new_v));
        } else {
          cut_terms[pe][1] += w * ((new_u != new_v) - (old_u != old_v));
        }
      });
    }
  });

  const std::vector<Weight> total_deltas = allreduce_sum(weight_deltas);
  const std::vector<Weight> total_cut_terms = allreduce_sum(cut_terms);

  MoveBatchResult result;
  result.weight_in.assign(total_deltas.begin(), total_deltas.begin() + k);
  result.weight_out.assign(total_deltas.begin() + k, total_deltas.end());
  for (const auto &list : applied) {
    result.moved += list.size();
  }
  result.moved_weight = std::accumulate(result.weight_in.begin(), result.weight_in.end(), Weight{0});
  result.cut_delta = total_cut_terms[0] + total_cut_terms[1] / 2;

  exec.superstep(num_pes, [&](const PEID pe) {
    auto &weights = dp.locals[pe].block_weights;
    for (BlockID b = 0; b < k; ++b) {
      weights[b] += result.weight_in[b] - result.weight_out[b];
    }
  });
  return result;
}

Weight dist_edge_cut(const DistGraph &dg, const DistPartition &dp, const Executor &exec) {
  std::vector<std::vector<Weight>> partial(dg.num_pes(), std::vector<Weight>(1, 0));
  exec.superstep(dg.num_pes(), [&](const PEID pe) {
    const LocalGraph &local = dg.local(pe);
    const auto &blocks = dp.locals[pe].blocks;
    for (NodeID u = 0; u < local.n_owned(); ++u) {
      local.for_each_neighbor(u, [&](const NodeID v, const Weight w) {
        if (blocks[u] != blocks[v]) {
          partial[pe][0] += w;
        }
      });
    }
  });
  return allreduce_sum(partial)[0] / 2;
}

std::vector<Weight> dist_block_weights(const DistGraph &dg, const DistPartition &dp, const Executor &exec) {
  std::vector<std::vector<Weight>> partial(dg.num_pes(), std::vector<Weight>(dp.k(), 0));
  exec.superstep(dg.num_pes(), [&](const PEID pe) {
    const LocalGraph &local = dg.local(pe);
    for (NodeID u = 0; u < local.n_owned(); ++u) {
      partial[pe][dp.locals[pe].blocks[u]] += local.node_weight(u);
    }
  });
  return allreduce_sum(partial);
}
} // namespace djet
