/*******************************************************************************
 * Initial partitioning of the coarsest graph: recursive bisection by greedy
 * graph growing, followed by rebalancing and label propagation; the best of
 * several repetitions wins.
 *
 * @file:   initial_partitioning.cc
 ******************************************************************************/
#include <numeric>
#include <queue>

#include "djet/multilevel.h"
#include "djet/random.h"

namespace djet {
namespace {
class GreedyGrower {
public:
  GreedyGrower(const Graph &graph, CounterRandom &random)
      : _graph(graph),
        _random(random),
        _state(graph.n(), kOutside),
        _gain(graph.n(), 0) {}

  void split(const std::vector<NodeID> &subset, const BlockID offset, const BlockID k, std::vector<BlockID> &out) {
    if (k == 1 || subset.empty()) {
      for (const NodeID u : subset) {
        out[u] = offset;
      }
      return;
    }

    const BlockID k_first = k / 2;
    Weight total = 0;
    for (const NodeID u : subset) {
      total += _graph.node_weight(u);
    }
    const double target = static_cast<double>(total) * k_first / k;

    const std::vector<bool> in_first = grow(subset, target);
    std::vector<NodeID> first;
    std::vector<NodeID> second;
    for (std::size_t i = 0; i < subset.size(); ++i) {
      (in_first[i] ? first : second).push_back(subset[i]);
    }
    split(first, offset, k_first, out);
    split(second, offset + k_first, k - k_first, out);
  }

private:
  static constexpr std::uint8_t kOutside = 0;
  static constexpr std::uint8_t kAvailable = 1;
  static constexpr std::uint8_t kGrown = 2;
  static constexpr std::uint8_t kRejected = 3;

  std::vector<bool> grow(const std::vector<NodeID> &subset, const double target) {
    for (const NodeID u : subset) {
      _state[u] = kAvailable;
    }
    // Joining gain: conn to the grown region minus conn to the rest.
    for (const NodeID u : subset) {
      Weight inside = 0;
      _graph.for_each_neighbor(u, [&](const NodeID v, const Weight w) {
        if (_state[v] != kOutside) {
          inside += w;
        }
      });
      _gain[u] = -inside;
    }

    using Entry = std::pair<Weight, std::int64_t>; // (gain, -id)
    std::priority_queue<Entry> queue;
    double weight = 0.0;
    std::size_t remaining = subset.size();

    auto add = [&](const NodeID u) {
      _state[u] = kGrown;
      --remaining;
      weight += static_cast<double>(_graph.node_weight(u));
      _graph.for_each_neighbor(u, [&](const NodeID v, const Weight w) {
        if (_state[v] == kAvailable) {
          _gain[v] += 2 * w;
          queue.emplace(_gain[v], -static_cast<std::int64_t>(v));
        }
      });
    };

    while (weight < target && remaining > 0) {
      NodeID next = kInvalidNodeID;
      while (!queue.empty()) {
        const auto [gain, neg_id] = queue.top();
        queue.pop();
        const auto v = static_cast<NodeID>(-neg_id);
        if (_state[v] == kAvailable && _gain[v] == gain) {
          next = v;
          break;
        }
      }
      if (next == kInvalidNodeID) {
        // Frontier exhausted: new random seed vertex.
        const std::size_t start = _random.next_below(subset.size());
        for (std::size_t i = 0; i < subset.size(); ++i) {
          const NodeID candidate = subset[(start + i) % subset.size()];
          if (_state[candidate] == kAvailable) {
            next = candidate;
            break;
          }
        }
      }
      if (next == kInvalidNodeID) {
        break;
      }

      const double after = weight + static_cast<double>(_graph.node_weight(next));
      if (after > target && after - target > target - weight) {
        _state[next] = kRejected;
        --remaining;
        continue;
      }
      add(next);
    }

    std::vector<bool> in_first(subset.size());
    for (std::size_t i = 0; i < subset.size(); ++i) {
      in_first[i] = _state[subset[i]] == kGrown;
    }
    for (const NodeID u : subset) {
      _state[u] = kOutside;
    }
    return in_first;
  }

  const Graph &_graph;
  CounterRandom &_random;
  std::vector<std::uint8_t> _state;
  std::vector<Weight> _gain;
};
} // namespace

std::vector<BlockID> greedy_bisection(
    const Graph &graph, const BlockID k, const std::uint64_t seed, const std::uint64_t repetition
) {
  std::vector<BlockID> assignment(graph.n(), 0);
  CounterRandom random(seed, (streams::kInitialPartitioning << 16) + repetition);
  std::vector<NodeID> all(graph.n());
  std::iota(all.begin(), all.end(), 0);
  GreedyGrower(graph, random).split(all, 0, k, assignment);
  return assignment;
}

Partition
initial_partition(const Graph &coarsest, const BlockID k, const double epsilon, const JetConfig &config) {
  if (k == 1 || coarsest.n() == 0) {
    return Partition(coarsest, k, epsilon);
  }

  const BalanceSpec spec(k, epsilon, coarsest.total_node_weight());
  const DistGraph dg = distribute(coarsest, 1);

  std::vector<BlockID> best;
  bool best_balanced = false;
  Weight best_cut = 0;
  double best_overload = 0.0;

  const int repetitions = std::max(1, config.initial_repetitions);
  for (int repetition = 0; repetition < repetitions; ++repetition) {
    std::vector<BlockID> assignment = greedy_bisection(coarsest, k, config.seed, repetition);
    DistPartition dp = scatter(dg, spec, assignment);

    RefinementState state;
    state.seed = random_bits(config.seed, streams::kInitialPartitioning, repetition);
    if (!dp.is_balanced()) {
      rebalance(dg, dp, config.rebalance, state.seed, state.rebalance_round, state.exec);
    }
    lp_refine(dg, dp, config.lp_rounds, state);

    assignment = gather(dg, dp);
    const bool balanced = dp.is_balanced();
    const Weight cut = edge_cut(coarsest, assignment);
    const double overload = dp.total_overload();

    const bool better = best.empty() || (balanced && !best_balanced) ||
                        (balanced == best_balanced &&
                         (balanced ? cut < best_cut
                                   : (overload < best_overload || (overload == best_overload && cut < best_cut))));
    if (better) {
      best = std::move(assignment);
      best_balanced = balanced;
      best_cut = cut;
      best_overload = overload;
    }
  }
  return Partition(coarsest, k, epsilon, std::move(best));
}
} // namespace djet
