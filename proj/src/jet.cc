/*******************************************************************************
 * One iteration of distributed Jet refinement.
 *
 * @file:   jet.cc
 ******************************************************************************/
#include "djet/jet.h"

#include <cmath>

namespace djet {
namespace {
std::size_t total_size(const CandidateSet &set) {
  std::size_t size = 0;
  for (const auto &list : set) {
    size += list.size();
  }
  return size;
}
} // namespace

LockSet::LockSet(const DistGraph &dg) : _locked(dg.num_pes()) {
  for (PEID pe = 0; pe < dg.num_pes(); ++pe) {
    _locked[pe].assign(dg.local(pe).n_owned(), 0);
  }
}

void LockSet::clear() {
  for (auto &flags : _locked) {
    std::fill(flags.begin(), flags.end(), 0);
  }
  _size = 0;
}

void LockSet::replace(const CandidateSet &moved) {
  if (moved.size() > _locked.size()) {
    throw_invalid_argument("lock set was not created for this distributed graph");
  }
  clear();
  for (PEID pe = 0; pe < moved.size(); ++pe) {
    for (const MoveCandidate &candidate : moved[pe]) {
      _locked[pe][candidate.local] = 1;
      ++_size;
    }
  }
}

std::vector<NodeID> LockSet::global_ids(const DistGraph &dg) const {
  std::vector<NodeID> ids;
  for (PEID pe = 0; pe < _locked.size(); ++pe) {
    for (NodeID u = 0; u < _locked[pe].size(); ++u) {
      if (_locked[pe][u] != 0) {
        ids.push_back(dg.local(pe).local_to_global(u));
      }
    }
  }
  return ids;
}

CandidateSet build_candidates(
    const DistGraph &dg,
    const DistPartition &dp,
    const double temperature,
    const LockSet &locks,
    const Executor &exec
) {
  if (!(temperature >= 0.0 && temperature <= 1.0)) {
    throw_invalid_argument("temperature must lie in [0, 1]");
  }

  CandidateSet candidates(dg.num_pes());
  exec.superstep(dg.num_pes(), [&](const PEID pe) {
    const LocalGraph &local = dg.local(pe);
    const auto &blocks = dp.locals[pe].blocks;
    std::vector<Weight> rating(dp.k(), 0);
    std::vector<BlockID> touched;

    for (NodeID u = 0; u < local.n_owned(); ++u) {
      if (locks.is_locked(pe, u)) {
        continue;
      }
      const BlockID from = blocks[u];
      local.for_each_neighbor(u, [&](const NodeID v, const Weight w) {
        const BlockID b = blocks[v];
        if (rating[b] == 0) {
          touched.push_back(b);
        }
        rating[b] += w;
      });

      BlockID to = kInvalidBlockID;
      for (const BlockID b : touched) {
        if (b != from && (to == kInvalidBlockID || rating[b] > rating[to] ||
                          (rating[b] == rating[to] && b < to))) {
          to = b;
        }
      }
      const Weight conn_from = rating[from];
      if (to != kInvalidBlockID) {
        const Weight gain = rating[to] - conn_from;
        const auto threshold =
            -static_cast<Weight>(std::floor(temperature * static_cast<double>(conn_from)));
        if (gain >= threshold) {
          candidates[pe].push_back({u, local.local_to_global(u), from, to, gain});
        }
      }

      for (const BlockID b : touched) {
        rating[b] = 0;
      }
      touched.clear();
    }
  });
  return candidates;
}

std::vector<std::vector<InterfaceGain>>
interface_gains(const DistGraph &dg, const CandidateSet &candidates) {
  std::vector<std::vector<InterfaceGain>> gains(dg.num_pes());
  for (PEID pe = 0; pe < dg.num_pes(); ++pe) {
    const LocalGraph &local = dg.local(pe);
    for (const MoveCandidate &candidate : candidates[pe]) {
      if (local.is_interface(candidate.local)) {
        gains[pe].push_back({candidate.local, candidate.gain, candidate.to});
      }
    }
  }
  return gains;
}

CandidateSet filter_candidates(
    const DistGraph &dg,
    const DistPartition &dp,
    const CandidateSet &candidates,
    const std::vector<GhostGains> &ghost_gains,
    const Executor &exec
) {
  CandidateSet kept(dg.num_pes());
  exec.superstep(dg.num_pes(), [&](const PEID pe) {
    const LocalGraph &local = dg.local(pe);
    const auto &blocks = dp.locals[pe].blocks;
    const auto &list = candidates[pe];
    const NodeID n_owned = local.n_owned();

    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> index_of(n_owned, kNone);
    for (std::uint32_t i = 0; i < list.size(); ++i) {
      index_of[list[i].local] = i;
    }

    for (const MoveCandidate &candidate : list) {
      Weight conn_to = 0;
      Weight conn_from = 0;
      local.for_each_neighbor(candidate.local, [&](const NodeID v, const Weight w) {
        BlockID block = blocks[v];
        if (v < n_owned) {
          if (const std::uint32_t i = index_of[v]; i != kNone) {
            const MoveCandidate &other = list[i];
            if (has_priority(other.gain, other.global, candidate.gain, candidate.global)) {
              block = other.to;
            }
          }
        } else if (const auto &ghost = ghost_gains[pe][v - n_owned]; ghost.has_value()) {
          if (has_priority(ghost->gain, local.local_to_global(v), candidate.gain, candidate.global)) {
            block = ghost->target;
          }
        }
        if (block == candidate.to) {
          conn_to += w;
        } else if (block == candidate.from) {
          conn_from += w;
        }
      });
      if (conn_to - conn_from >= 0) {
        kept[pe].push_back(candidate);
      }
    }
  });
  return kept;
}

MoveBatchResult apply_and_lock(
    const DistGraph &dg,
    DistPartition &dp,
    const CandidateSet &kept,
    LockSet &locks,
    const Executor &exec
) {
  std::vector<std::vector<LocalMove>> moves(dg.num_pes());
  for (PEID pe = 0; pe < dg.num_pes(); ++pe) {
    moves[pe].reserve(kept[pe].size());
    for (const MoveCandidate &candidate : kept[pe]) {
      moves[pe].push_back({candidate.local, candidate.to});
    }
  }
  MoveBatchResult result = apply_moves(dg, dp, moves, exec);
  locks.replace(kept);
  return result;
}

JetIterationResult jet_iteration(
    const DistGraph &dg,
    DistPartition &dp,
    const double temperature,
    LockSet &locks,
    const Executor &exec
) {
  JetIterationResult result;
  const CandidateSet candidates = build_candidates(dg, dp, temperature, locks, exec);
  const auto ghost_gains = exchange_interface_gains(dg, interface_gains(dg, candidates), exec);
  const CandidateSet kept = filter_candidates(dg, dp, candidates, ghost_gains, exec);
  result.candidates = total_size(candidates);
  result.kept = total_size(kept);
  result.moves = apply_and_lock(dg, dp, kept, locks, exec);
  return result;
}
} // namespace djet
