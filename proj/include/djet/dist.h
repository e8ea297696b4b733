/*******************************************************************************
 * Deterministic simulation of the distributed-memory model.
 *
 * The graph is split into P consecutive vertex ranges with roughly equal arc
 * counts. Each logical PE stores its owned vertices with their outgoing arcs
 * plus ghost replicas (weight and block only) of adjacent vertices owned by
 * other PEs. PEs run as callbacks between explicit barriers; messages are
 * buffered per sender and delivered at the barrier, sorted by
 * (source PE, global vertex ID).
 *
 * @file:   dist.h
 ******************************************************************************/
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "djet/definitions.h"
#include "djet/graph.h"
#include "djet/partition.h"

namespace djet {
//
// Superstep executor
//

enum class ExecutionMode {
  kSequential,
  kReverse,  // PEs in descending rank order
  kShuffled, // seeded permutation of PEs
  kThreaded, // PEs spread over worker threads
};

class Executor {
public:
  Executor() = default;
  explicit Executor(ExecutionMode mode, std::uint64_t shuffle_seed = 0, unsigned threads = 0)
      : _mode(mode),
        _shuffle_seed(shuffle_seed),
        _threads(threads) {}

  // Runs body(pe) for every PE, then returns (barrier). Each invocation may
  // only touch state owned by its PE.
  void superstep(PEID num_pes, const std::function<void(PEID)> &body) const;

  [[nodiscard]] ExecutionMode mode() const {
    return _mode;
  }

private:
  ExecutionMode _mode = ExecutionMode::kSequential;
  std::uint64_t _shuffle_seed = 0;
  unsigned _threads = 0;
  mutable std::uint64_t _superstep_counter = 0;
};

template <typename Payload> struct Message {
  PEID source;
  NodeID global;
  Payload payload;
};

// Buffers point-to-point messages of one communication phase. send() may be
// called concurrently by different source PEs.
template <typename Payload> class MessageQueue {
public:
  explicit MessageQueue(const PEID num_pes)
      : _outboxes(num_pes, std::vector<std::vector<Message<Payload>>>(num_pes)) {}

  void send(const PEID from, const PEID to, const NodeID global, Payload payload) {
    _outboxes[from][to].push_back({from, global, std::move(payload)});
  }

  // Barrier: returns one inbox per PE, sorted by (source, global ID).
  std::vector<std::vector<Message<Payload>>> deliver() {
    const PEID num_pes = static_cast<PEID>(_outboxes.size());
    std::vector<std::vector<Message<Payload>>> inboxes(num_pes);
    for (PEID to = 0; to < num_pes; ++to) {
      for (PEID from = 0; from < num_pes; ++from) {
        auto &box = _outboxes[from][to];
        std::move(box.begin(), box.end(), std::back_inserter(inboxes[to]));
        box.clear();
      }
      std::stable_sort(inboxes[to].begin(), inboxes[to].end(), [](const auto &a, const auto &b) {
        return a.source < b.source || (a.source == b.source && a.global < b.global);
      });
    }
    return inboxes;
  }

private:
  std::vector<std::vector<std::vector<Message<Payload>>>> _outboxes;
};

// Component-wise sum over all PEs, accumulated in rank order.
std::vector<Weight> allreduce_sum(const std::vector<std::vector<Weight>> &contributions);
std::vector<Weight> allreduce_max(const std::vector<std::vector<Weight>> &contributions);

//
// Distributed graph
//

// Local IDs: [0, n_owned) are owned vertices (global first + local),
// [n_owned, n_owned + n_ghosts) are ghosts in ascending global ID order.
class LocalGraph {
public:
  [[nodiscard]] NodeID n_owned() const {
    return last - first;
  }
  [[nodiscard]] NodeID n_ghosts() const {
    return static_cast<NodeID>(ghost_global.size());
  }
  [[nodiscard]] NodeID n_local() const {
    return n_owned() + n_ghosts();
  }

  [[nodiscard]] bool is_owned(const NodeID local) const {
    return local < n_owned();
  }
  [[nodiscard]] NodeID local_to_global(const NodeID local) const {
    return is_owned(local) ? first + local : ghost_global[local - n_owned()];
  }
  [[nodiscard]] PEID owner(const NodeID local) const {
    return is_owned(local) ? pe : ghost_owner[local - n_owned()];
  }

  // kInvalidNodeID if the vertex is neither owned nor a ghost here.
  [[nodiscard]] NodeID global_to_local(NodeID global) const;

  [[nodiscard]] Weight node_weight(const NodeID local) const {
    return node_weights[local];
  }

  template <typename Lambda> void for_each_neighbor(const NodeID u, Lambda &&l) const {
    for (EdgeID e = nodes[u]; e < nodes[u + 1]; ++e) {
      l(edges[e], edge_weights[e]);
    }
  }

  // PEs holding a ghost replica of owned vertex u; empty for non-interface
  // vertices.
  [[nodiscard]] std::span<const PEID> replicas(const NodeID u) const {
    return {replica_pes.data() + replica_offsets[u], replica_pes.data() + replica_offsets[u + 1]};
  }

  [[nodiscard]] bool is_interface(const NodeID u) const {
    return replica_offsets[u] != replica_offsets[u + 1];
  }

  PEID pe = 0;
  NodeID first = 0;
  NodeID last = 0;

  std::vector<EdgeID> nodes{0};
  std::vector<NodeID> edges;
  std::vector<Weight> edge_weights;
  std::vector<Weight> node_weights;

  std::vector<NodeID> ghost_global;
  std::vector<PEID> ghost_owner;

  std::vector<EdgeID> replica_offsets{0};
  std::vector<PEID> replica_pes;
};

class DistGraph {
public:
  [[nodiscard]] PEID num_pes() const {
    return static_cast<PEID>(_locals.size());
  }
  [[nodiscard]] NodeID global_n() const {
    return _vtxdist.back();
  }
  [[nodiscard]] EdgeID global_m() const {
    return _global_m;
  }
  [[nodiscard]] Weight total_node_weight() const {
    return _total_node_weight;
  }
  [[nodiscard]] std::span<const NodeID> vtxdist() const {
    return _vtxdist;
  }
  [[nodiscard]] PEID owner_of(NodeID global) const;

  [[nodiscard]] const LocalGraph &local(const PEID pe) const {
    return _locals[pe];
  }

  // Union of the owned subgraphs.
  [[nodiscard]] Graph reassemble() const;

private:
  friend DistGraph distribute(const Graph &graph, PEID num_pes);

  std::vector<NodeID> _vtxdist;
  std::vector<LocalGraph> _locals;
  EdgeID _global_m = 0;
  Weight _total_node_weight = 0;
};

// Splits on the arc prefix sum: boundary i snaps to the vertex boundary whose
// prefix is nearest to i * 2m / P (earlier boundary on ties).
DistGraph distribute(const Graph &graph, PEID num_pes);

//
// Distributed partition
//

struct LocalPartition {
  std::vector<BlockID> blocks;        // owned + ghosts
  std::vector<Weight> block_weights;  // replicated
};

struct DistPartition {
  BalanceSpec spec;
  std::vector<LocalPartition> locals;

  [[nodiscard]] BlockID k() const {
    return spec.k();
  }
  [[nodiscard]] std::span<const Weight> block_weights() const {
    return locals.front().block_weights;
  }
  [[nodiscard]] bool is_balanced() const;
  [[nodiscard]] double total_overload() const;

  friend bool operator==(const DistPartition &, const DistPartition &) = default;
};

DistPartition scatter(const DistGraph &dg, const BalanceSpec &spec, std::span<const BlockID> assignment);
std::vector<BlockID> gather(const DistGraph &dg, const DistPartition &dp);

// Refreshes every ghost's block ID from its owner.
void sync_ghost_blocks(const DistGraph &dg, DistPartition &dp, const Executor &exec = {});

struct InterfaceGain {
  NodeID local; // owned local vertex
  Weight gain;
  BlockID target;
};

struct GhostGain {
  Weight gain;
  BlockID target;

  friend bool operator==(const GhostGain &, const GhostGain &) = default;
};

// Indexed by ghost index (local ID - n_owned); nullopt for ghosts that are not
// move candidates.
using GhostGains = std::vector<std::optional<GhostGain>>;

// Sends each candidate's gain (and target block) to the PEs replicating it.
// Entries for non-interface vertices are ignored.
std::vector<GhostGains> exchange_interface_gains(
    const DistGraph &dg,
    const std::vector<std::vector<InterfaceGain>> &gains,
    const Executor &exec = {}
);

struct LocalMove {
  NodeID local; // owned local vertex
  BlockID target;
};

struct MoveBatchResult {
  std::uint64_t moved = 0;
  Weight moved_weight = 0;
  std::vector<Weight> weight_in;  // per block
  std::vector<Weight> weight_out; // per block
  Weight cut_delta = 0;           // exact change of the global edge cut
};

// Applies all moves simultaneously, updates ghost replicas of moved vertices
// and re-aggregates block weights. Moves whose target equals the current
// block are ignored.
MoveBatchResult apply_moves(
    const DistGraph &dg,
    DistPartition &dp,
    const std::vector<std::vector<LocalMove>> &moves,
    const Executor &exec = {}
);

// Owned arcs with differently-assigned endpoints, summed over PEs and halved.
Weight dist_edge_cut(const DistGraph &dg, const DistPartition &dp, const Executor &exec = {});

// All-reduced owned block weights.
std::vector<Weight> dist_block_weights(const DistGraph &dg, const DistPartition &dp, const Executor &exec = {});
} // namespace djet
