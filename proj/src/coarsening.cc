/*******************************************************************************
 * Size-constrained label propagation clustering and cluster contraction.
 *
 * @file:   coarsening.cc
 ******************************************************************************/
#include <numeric>

#include "djet/multilevel.h"
#include "djet/random.h"

namespace djet {
std::vector<NodeID> cluster(
    const Graph &graph, const Weight max_cluster_weight, const int iterations, const std::uint64_t seed
) {
  const NodeID n = graph.n();
  std::vector<NodeID> clusters(n);
  std::iota(clusters.begin(), clusters.end(), 0);
  std::vector<Weight> cluster_weights(graph.raw_node_weights().begin(), graph.raw_node_weights().end());

  std::vector<NodeID> order(n);
  std::iota(order.begin(), order.end(), 0);
  CounterRandom random(seed, streams::kCoarsening);
  for (NodeID i = n; i > 1; --i) {
    std::swap(order[i - 1], order[random.next_below(i)]);
  }

  std::vector<Weight> rating(n, 0);
  std::vector<NodeID> touched;
  for (int iteration = 0; iteration < iterations; ++iteration) {
    std::uint64_t moved = 0;
    for (const NodeID u : order) {
      const NodeID own = clusters[u];
      const Weight w = graph.node_weight(u);
      graph.for_each_neighbor(u, [&](const NodeID v, const Weight ew) {
        const NodeID c = clusters[v];
        if (rating[c] == 0) {
          touched.push_back(c);
        }
        rating[c] += ew;
      });

      NodeID best = own;
      Weight best_rating = rating[own];
      for (const NodeID c : touched) {
        if (c == own || cluster_weights[c] + w > max_cluster_weight) {
          continue;
        }
        if (rating[c] > best_rating || (rating[c] == best_rating && best != own && c < best)) {
          best = c;
          best_rating = rating[c];
        }
      }
      for (const NodeID c : touched) {
        rating[c] = 0;
      }
      touched.clear();

      if (best != own) {
        cluster_weights[own] -= w;
        cluster_weights[best] += w;
        clusters[u] = best;
        ++moved;
      }
    }
    if (moved == 0) {
      break;
    }
  }

  // Dense IDs in order of first occurrence.
  std::vector<NodeID> dense(n, kInvalidNodeID);
  NodeID next = 0;
  for (NodeID u = 0; u < n; ++u) {
    NodeID &id = dense[clusters[u]];
    if (id == kInvalidNodeID) {
      id = next++;
    }
    clusters[u] = id;
  }
  return clusters;
}

Graph contract(const Graph &graph, const std::span<const NodeID> clustering) {
  if (clustering.size() != graph.n()) {
    throw_invalid_argument("clustering does not cover the graph");
  }
  const NodeID coarse_n =
      clustering.empty() ? 0 : *std::max_element(clustering.begin(), clustering.end()) + 1;
  std::vector<Weight> node_weights(coarse_n, 0);
  for (NodeID u = 0; u < graph.n(); ++u) {
    node_weights[clustering[u]] += graph.node_weight(u);
  }
  GraphBuilder builder(std::move(node_weights));
  for (NodeID u = 0; u < graph.n(); ++u) {
    graph.for_each_neighbor(u, [&](const NodeID v, const Weight w) {
      if (u < v && clustering[u] != clustering[v]) {
        builder.add_edge(clustering[u], clustering[v], w);
      }
    });
  }
  return std::move(builder).build();
}

std::vector<BlockID>
Hierarchy::project(const std::size_t level, const std::span<const BlockID> coarse_assignment) const {
  const auto mapping = _levels[level].to_coarse;
  std::vector<BlockID> assignment(mapping.size());
  for (std::size_t u = 0; u < mapping.size(); ++u) {
    assignment[u] = coarse_assignment[mapping[u]];
  }
  return assignment;
}

Hierarchy
coarsen(const Graph &graph, const BlockID k, const std::uint64_t seed, const CoarseningConfig &config) {
  if (k < 2) {
    throw_invalid_argument("coarsening needs k >= 2");
  }
  Hierarchy hierarchy;
  hierarchy.push(graph);

  const std::uint64_t limit = static_cast<std::uint64_t>(config.contraction_limit_per_block) * k;
  const Weight max_cluster_weight = std::max<Weight>(1, graph.total_node_weight() / (4 * static_cast<Weight>(k)));

  for (std::size_t level = 0; hierarchy.graph(level).n() > limit; ++level) {
    const Graph &current = hierarchy.graph(level);
    std::vector<NodeID> clustering =
        cluster(current, max_cluster_weight, config.lp_iterations, random_bits(seed, streams::kCoarsening, level));
    Graph coarse = contract(current, clustering);
    const NodeID fine_n = current.n();
    const NodeID coarse_n = coarse.n();
    if (coarse_n >= fine_n) {
      break;
    }
    hierarchy.set_mapping(level, std::move(clustering));
    hierarchy.push(std::move(coarse));
    if (static_cast<double>(coarse_n) > config.min_shrink_factor * static_cast<double>(fine_n)) {
      break;
    }
  }
  return hierarchy;
}
} // namespace djet
