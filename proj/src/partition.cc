/*******************************************************************************
 * Block assignment, block weights and the balance constraint.
 *
 * @file:   partition.cc
 ******************************************************************************/
#include "djet/partition.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace djet {
namespace {
using Int128 = __int128;
}

BalanceSpec::BalanceSpec(const BlockID k, const double epsilon, const Weight total_weight)
    : _k(k),
      _total_weight(total_weight) {
  if (k == 0) {
    throw_invalid_argument("k must be at least 1");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon) || epsilon > 1e6) {
    throw_invalid_argument("epsilon must be a finite non-negative number");
  }
  if (total_weight < 0) {
    throw_invalid_argument("total weight must be non-negative");
  }
  _epsilon_num = std::llround(epsilon * static_cast<double>(kEpsilonDenominator));

  const Int128 numerator = static_cast<Int128>(kEpsilonDenominator + _epsilon_num) * total_weight;
  const Int128 denominator = static_cast<Int128>(k) * kEpsilonDenominator;
  _max_block_weight = static_cast<Weight>(numerator / denominator);
}

double BalanceSpec::epsilon() const {
  return static_cast<double>(_epsilon_num) / static_cast<double>(kEpsilonDenominator);
}

double BalanceSpec::l_max() const {
  return slack(0);
}

double BalanceSpec::slack(const Weight block_weight) const {
  // (den + num) * c(V) - w * k * den, over k * den
  const Int128 numerator =
      static_cast<Int128>(kEpsilonDenominator + _epsilon_num) * _total_weight -
      static_cast<Int128>(block_weight) * _k * kEpsilonDenominator;
  const Int128 denominator = static_cast<Int128>(_k) * kEpsilonDenominator;
  // Split into integral and fractional part to keep precision for large
  // weights.
  const Int128 quotient = numerator / denominator;
  const Int128 remainder = numerator % denominator;
  return static_cast<double>(quotient) +
         static_cast<double>(remainder) / static_cast<double>(denominator);
}

double BalanceSpec::overload(const Weight block_weight) const {
  if (fits(block_weight)) {
    return 0.0;
  }
  return -slack(block_weight);
}

OverloadReport overload_report(const BalanceSpec &spec, const std::span<const Weight> block_weights) {
  OverloadReport report;
  report.block_overload.resize(block_weights.size());
  for (std::size_t b = 0; b < block_weights.size(); ++b) {
    report.block_overload[b] = spec.overload(block_weights[b]);
    report.total_overload += report.block_overload[b];
    if (!spec.fits(block_weights[b])) {
      ++report.num_overloaded;
    }
  }
  return report;
}

double imbalance(const BalanceSpec &spec, const std::span<const Weight> block_weights) {
  if (spec.total_weight() == 0 || block_weights.empty()) {
    return 0.0;
  }
  const Weight heaviest = *std::max_element(block_weights.begin(), block_weights.end());
  return static_cast<double>(heaviest) * spec.k() / static_cast<double>(spec.total_weight()) - 1.0;
}

Partition::Partition(const Graph &graph, const BlockID k, const double epsilon)
    : Partition(graph, k, epsilon, std::vector<BlockID>(graph.n(), 0)) {}

Partition::Partition(
    const Graph &graph, const BlockID k, const double epsilon, std::vector<BlockID> assignment
)
    : _spec(k, epsilon, graph.total_node_weight()),
      _assignment(std::move(assignment)) {
  if (_assignment.size() != graph.n()) {
    throw_invalid_argument(
        "assignment covers " + std::to_string(_assignment.size()) + " of " +
        std::to_string(graph.n()) + " vertices"
    );
  }
  for (const BlockID b : _assignment) {
    if (b >= k) {
      throw_invalid_argument("block ID " + std::to_string(b) + " out of range for k=" + std::to_string(k));
    }
  }
  _block_weights = recompute_block_weights(graph);
}

void Partition::apply_move(const Graph &graph, const NodeID u, const BlockID target) {
  if (u >= _assignment.size()) {
    throw_invalid_argument("vertex out of range");
  }
  if (target >= k()) {
    throw_invalid_argument("target block " + std::to_string(target) + " out of range");
  }
  const BlockID source = _assignment[u];
  if (source == target) {
    throw_invalid_argument("vertex already assigned to the target block");
  }
  const Weight w = graph.node_weight(u);
  _block_weights[source] -= w;
  _block_weights[target] += w;
  _assignment[u] = target;
}

bool Partition::is_balanced() const {
  return std::all_of(_block_weights.begin(), _block_weights.end(), [&](const Weight w) {
    return _spec.fits(w);
  });
}

OverloadReport Partition::overload_report() const {
  return djet::overload_report(_spec, _block_weights);
}

double Partition::imbalance() const {
  return djet::imbalance(_spec, _block_weights);
}

std::vector<Weight> Partition::recompute_block_weights(const Graph &graph) const {
  std::vector<Weight> weights(k(), 0);
  for (NodeID u = 0; u < graph.n(); ++u) {
    weights[_assignment[u]] += graph.node_weight(u);
  }
  return weights;
}

Weight conn(
    const Graph &graph, const std::span<const BlockID> assignment, const NodeID u, const BlockID block
) {
  Weight sum = 0;
  graph.for_each_neighbor(u, [&](const NodeID v, const Weight w) {
    if (assignment[v] == block) {
      sum += w;
    }
  });
  return sum;
}

Weight conn(const Graph &graph, const Partition &p, const NodeID u, const BlockID block) {
  return conn(graph, p.assignment(), u, block);
}

void write_partition(const std::span<const BlockID> assignment, std::ostream &out) {
  for (const BlockID b : assignment) {
    out << b << '\n';
  }
}

void write_partition(const std::span<const BlockID> assignment, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::kIO, "cannot write partition file '" + path + "'");
  }
  write_partition(assignment, out);
  if (!out) {
    throw Error(ErrorKind::kIO, "error while writing '" + path + "'");
  }
}

std::vector<BlockID> read_partition(std::istream &in, const NodeID n, const BlockID k) {
  std::vector<BlockID> assignment;
  assignment.reserve(n);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    BlockID b = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), b);
    if (ec != std::errc{} || ptr != line.data() + line.size() || b >= k) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_number) + ": invalid block ID");
    }
    assignment.push_back(b);
  }
  if (assignment.size() != n) {
    throw Error(
        ErrorKind::kParse,
        "partition file has " + std::to_string(assignment.size()) + " entries, expected " +
            std::to_string(n)
    );
  }
  return assignment;
}

std::vector<BlockID> read_partition(const std::string &path, const NodeID n, const BlockID k) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIO, "cannot open partition file '" + path + "'");
  }
  return read_partition(in, n, k);
}
} // namespace djet
