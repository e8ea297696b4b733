/*******************************************************************************
 * Static undirected graph in compressed adjacency form, METIS I/O, synthetic
 * generators and the edge cut.
 *
 * @file:   graph.h
 ******************************************************************************/
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "djet/definitions.h"

namespace djet {
// Each undirected edge {u, v} is stored as the two arcs (u, v) and (v, u).
// Adjacency lists are sorted by neighbor ID, free of self-loops and parallel
// arcs, and all weights are positive.
class Graph {
public:
  Graph() = default;

  // Takes ownership of CSR arrays. Validates symmetry, positivity and absence
  // of self-loops; throws on violation.
  Graph(
      std::vector<EdgeID> nodes,
      std::vector<NodeID> edges,
      std::vector<Weight> edge_weights,
      std::vector<Weight> node_weights
  );

  [[nodiscard]] NodeID n() const {
    return static_cast<NodeID>(_node_weights.size());
  }

  [[nodiscard]] EdgeID m() const {
    return _edges.size() / 2;
  }

  [[nodiscard]] EdgeID num_arcs() const {
    return _edges.size();
  }

  [[nodiscard]] Weight node_weight(const NodeID u) const {
    return _node_weights[u];
  }

  [[nodiscard]] Weight total_node_weight() const {
    return _total_node_weight;
  }

  [[nodiscard]] Weight max_node_weight() const {
    return _max_node_weight;
  }

  [[nodiscard]] Weight total_edge_weight() const {
    return _total_edge_weight;
  }

  [[nodiscard]] EdgeID first_arc(const NodeID u) const {
    return _nodes[u];
  }

  [[nodiscard]] EdgeID degree(const NodeID u) const {
    return _nodes[u + 1] - _nodes[u];
  }

  [[nodiscard]] std::span<const NodeID> neighbors(const NodeID u) const {
    return {_edges.data() + _nodes[u], _edges.data() + _nodes[u + 1]};
  }

  [[nodiscard]] std::span<const Weight> neighbor_weights(const NodeID u) const {
    return {_edge_weights.data() + _nodes[u], _edge_weights.data() + _nodes[u + 1]};
  }

  template <typename Lambda> void for_each_neighbor(const NodeID u, Lambda &&l) const {
    for (EdgeID e = _nodes[u]; e < _nodes[u + 1]; ++e) {
      l(_edges[e], _edge_weights[e]);
    }
  }

  [[nodiscard]] std::span<const EdgeID> raw_nodes() const {
    return _nodes;
  }
  [[nodiscard]] std::span<const NodeID> raw_edges() const {
    return _edges;
  }
  [[nodiscard]] std::span<const Weight> raw_edge_weights() const {
    return _edge_weights;
  }
  [[nodiscard]] std::span<const Weight> raw_node_weights() const {
    return _node_weights;
  }

  [[nodiscard]] bool has_unit_node_weights() const;
  [[nodiscard]] bool has_unit_edge_weights() const;

  friend bool operator==(const Graph &, const Graph &) = default;

private:
  std::vector<EdgeID> _nodes{0};
  std::vector<NodeID> _edges;
  std::vector<Weight> _edge_weights;
  std::vector<Weight> _node_weights;
  Weight _total_node_weight = 0;
  Weight _max_node_weight = 0;
  Weight _total_edge_weight = 0;
};

// Collects undirected edges and turns them into a Graph. Self-loops are
// dropped and parallel edges are merged by summing their weights.
class GraphBuilder {
public:
  explicit GraphBuilder(NodeID n);
  GraphBuilder(std::vector<Weight> node_weights);

  void add_edge(NodeID u, NodeID v, Weight weight = 1);

  [[nodiscard]] Graph build() &&;

private:
  std::vector<Weight> _node_weights;
  std::vector<std::tuple<NodeID, NodeID, Weight>> _arcs;
};

//
// METIS / Chaco text format
//

// Throws Error(kParse) naming the offending line.
Graph parse_metis(std::string_view text);
Graph parse_metis(std::istream &in);
Graph read_metis(const std::string &path);

void write_metis(const Graph &graph, std::ostream &out);
void write_metis(const Graph &graph, const std::string &path);

//
// Generators
//

// width * height unit weight grid with 4-neighborhood; vertex (x, y) has ID
// y * width + x.
Graph gen_grid(std::int64_t width, std::int64_t height);

// n uniform points in the unit square, connected when their Euclidean distance
// is at most radius.
Graph gen_rgg2d(std::int64_t n, double radius, std::uint64_t seed);

//
// Metrics
//

// Total weight of edges whose endpoints lie in different blocks; each
// undirected edge is counted once.
Weight edge_cut(const Graph &graph, std::span<const BlockID> assignment);
} // namespace djet
