/*******************************************************************************
 * Block assignment, block weights and the balance constraint.
 *
 * @file:   partition.h
 ******************************************************************************/
#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "djet/definitions.h"
#include "djet/graph.h"

namespace djet {
// The balance constraint c(V_i) <= L_max = (1 + eps) * c(V) / k.
//
// eps is stored as a fixed-point rational eps_num / kEpsilonDenominator so that
// the comparison w <= L_max is decided exactly as
//   w * k * den <= (den + eps_num) * c(V)
// in 128 bit integer arithmetic.
class BalanceSpec {
public:
  static constexpr std::int64_t kEpsilonDenominator = 1'000'000'000;

  BalanceSpec() = default;
  BalanceSpec(BlockID k, double epsilon, Weight total_weight);

  [[nodiscard]] BlockID k() const {
    return _k;
  }
  [[nodiscard]] double epsilon() const;
  [[nodiscard]] Weight total_weight() const {
    return _total_weight;
  }

  // Real-valued L_max.
  [[nodiscard]] double l_max() const;

  // Largest integer block weight that satisfies the constraint, floor(L_max).
  [[nodiscard]] Weight max_block_weight() const {
    return _max_block_weight;
  }

  [[nodiscard]] bool fits(const Weight block_weight) const {
    return block_weight <= _max_block_weight;
  }

  // max(0, w - L_max), computed from the exact rational difference.
  [[nodiscard]] double overload(Weight block_weight) const;

  // L_max - w as a real number (may be negative).
  [[nodiscard]] double slack(Weight block_weight) const;

  friend bool operator==(const BalanceSpec &, const BalanceSpec &) = default;

private:
  BlockID _k = 1;
  std::int64_t _epsilon_num = 0;
  Weight _total_weight = 0;
  Weight _max_block_weight = 0;
};

struct OverloadReport {
  std::vector<double> block_overload;
  double total_overload = 0.0;
  BlockID num_overloaded = 0;
};

OverloadReport overload_report(const BalanceSpec &spec, std::span<const Weight> block_weights);

class Partition {
public:
  Partition() = default;

  // All vertices start in block 0.
  Partition(const Graph &graph, BlockID k, double epsilon);
  Partition(const Graph &graph, BlockID k, double epsilon, std::vector<BlockID> assignment);

  [[nodiscard]] BlockID k() const {
    return _spec.k();
  }
  [[nodiscard]] const BalanceSpec &spec() const {
    return _spec;
  }
  [[nodiscard]] double l_max() const {
    return _spec.l_max();
  }

  [[nodiscard]] BlockID block(const NodeID u) const {
    return _assignment[u];
  }
  [[nodiscard]] std::span<const BlockID> assignment() const {
    return _assignment;
  }
  [[nodiscard]] Weight block_weight(const BlockID b) const {
    return _block_weights[b];
  }
  [[nodiscard]] std::span<const Weight> block_weights() const {
    return _block_weights;
  }

  // Unconstrained: never checks the balance constraint.
  void apply_move(const Graph &graph, NodeID u, BlockID target);

  [[nodiscard]] bool is_balanced() const;
  [[nodiscard]] OverloadReport overload_report() const;

  // max_i c(V_i) * k / c(V) - 1
  [[nodiscard]] double imbalance() const;

  [[nodiscard]] std::vector<Weight> recompute_block_weights(const Graph &graph) const;

  friend bool operator==(const Partition &, const Partition &) = default;

private:
  BalanceSpec _spec;
  std::vector<BlockID> _assignment;
  std::vector<Weight> _block_weights;
};

// Summed weight of edges between u and vertices of the given block.
Weight conn(const Graph &graph, std::span<const BlockID> assignment, NodeID u, BlockID block);
Weight conn(const Graph &graph, const Partition &p, NodeID u, BlockID block);

double imbalance(const BalanceSpec &spec, std::span<const Weight> block_weights);

// One 0-based block ID per line, in vertex order.
void write_partition(std::span<const BlockID> assignment, std::ostream &out);
void write_partition(std::span<const BlockID> assignment, const std::string &path);
std::vector<BlockID> read_partition(std::istream &in, NodeID n, BlockID k);
std::vector<BlockID> read_partition(const std::string &path, NodeID n, BlockID k);
} // namespace djet
