/*******************************************************************************
 * One iteration of distributed Jet refinement: temperature-controlled move
 * candidates, gain exchange for interface vertices, conditional-gain filter
 * (afterburner), simultaneous application and locking.
 *
 * @file:   jet.h
 ******************************************************************************/
#pragma once

#include <vector>

#include "djet/definitions.h"
#include "djet/dist.h"

namespace djet {
struct MoveCandidate {
  NodeID local;  // owned local ID on the generating PE
  NodeID global;
  BlockID from;
  BlockID to;
  Weight gain;   // conn(v, to) - conn(v, from), may be negative

  friend bool operator==(const MoveCandidate &, const MoveCandidate &) = default;
};

// One candidate list per PE, in ascending local vertex order.
using CandidateSet = std::vector<std::vector<MoveCandidate>>;

// Total order used by the filter: higher gain first, then higher global ID.
[[nodiscard]] constexpr bool
has_priority(const Weight gain_u, const NodeID u, const Weight gain_v, const NodeID v) {
  return gain_u > gain_v || (gain_u == gain_v && u > v);
}

// Vertices moved in the previous Jet iteration; they are skipped by the next
// candidate generation only.
class LockSet {
public:
  LockSet() = default;
  explicit LockSet(const DistGraph &dg);

  [[nodiscard]] bool is_locked(const PEID pe, const NodeID local) const {
    return !_locked.empty() && _locked[pe][local] != 0;
  }

  [[nodiscard]] std::size_t size() const {
    return _size;
  }

  void clear();

  // Replaces the locked set with the vertices of `moved`.
  void replace(const CandidateSet &moved);

  [[nodiscard]] std::vector<NodeID> global_ids(const DistGraph &dg) const;

private:
  std::vector<std::vector<std::uint8_t>> _locked;
  std::size_t _size = 0;
};

// Includes an owned, unlocked vertex v of block V_i if it has a neighbor in
// some other block and
//   g(v) = max_{j != i} conn(v, V_j) - conn(v, V_i) >= -floor(tau * conn(v, V_i)).
// The target is the strongest connected other block (lowest ID on ties).
// Purely local: needs synchronized ghost blocks but no communication.
CandidateSet build_candidates(
    const DistGraph &dg,
    const DistPartition &dp,
    double temperature,
    const LockSet &locks,
    const Executor &exec = {}
);

// Gains of interface candidates in the form expected by the gain exchange.
std::vector<std::vector<InterfaceGain>> interface_gains(const DistGraph &dg, const CandidateSet &candidates);

// Keeps candidate v iff its gain towards its target, recomputed under the
// assumption that every candidate neighbor with higher priority already sits
// in its own target block, is non-negative.
CandidateSet filter_candidates(
    const DistGraph &dg,
    const DistPartition &dp,
    const CandidateSet &candidates,
    const std::vector<GhostGains> &ghost_gains,
    const Executor &exec = {}
);

// Moves all kept candidates at once, syncs ghosts and block weights, and
// locks exactly the moved vertices for the next iteration.
MoveBatchResult apply_and_lock(
    const DistGraph &dg,
    DistPartition &dp,
    const CandidateSet &kept,
    LockSet &locks,
    const Executor &exec = {}
);

struct JetIterationResult {
  std::size_t candidates = 0;
  std::size_t kept = 0;
  MoveBatchResult moves;
};

// build_candidates -> exchange_interface_gains -> filter_candidates ->
// apply_and_lock
JetIterationResult jet_iteration(
    const DistGraph &dg,
    DistPartition &dp,
    double temperature,
    LockSet &locks,
    const Executor &exec = {}
);
} // namespace djet
