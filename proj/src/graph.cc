/*******************************************************************************
 * Static undirected graph, METIS I/O, generators and the edge cut.
 *
 * @file:   graph.cc
 ******************************************************************************/
#include "djet/graph.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <numeric>
#include <ostream>
#include <sstream>

#include "djet/random.h"

namespace djet {
namespace {
using Adjacency = std::vector<std::pair<NodeID, Weight>>;

void sort_and_merge(Adjacency &adjacency) {
  std::sort(adjacency.begin(), adjacency.end(), [](const auto &a, const auto &b) {
    return a.first < b.first;
  });
  std::size_t out = 0;
  for (std::size_t i = 0; i < adjacency.size(); ++i) {
    if (out > 0 && adjacency[out - 1].first == adjacency[i].first) {
      adjacency[out - 1].second += adjacency[i].second;
    } else {
      adjacency[out++] = adjacency[i];
    }
  }
  adjacency.resize(out);
}

// Returns the weight of arc (u, v) or 0 if there is none; neighbors sorted.
Weight find_arc(std::span<const NodeID> neighbors, std::span<const Weight> weights, NodeID v) {
  const auto it = std::lower_bound(neighbors.begin(), neighbors.end(), v);
  if (it == neighbors.end() || *it != v) {
    return 0;
  }
  return weights[static_cast<std::size_t>(it - neighbors.begin())];
}

Graph assemble(std::vector<Adjacency> lists, std::vector<Weight> node_weights) {
  std::vector<EdgeID> nodes(lists.size() + 1, 0);
  for (std::size_t u = 0; u < lists.size(); ++u) {
    nodes[u + 1] = nodes[u] + lists[u].size();
  }
  std::vector<NodeID> edges(nodes.back());
  std::vector<Weight> edge_weights(nodes.back());
  for (std::size_t u = 0; u < lists.size(); ++u) {
    EdgeID e = nodes[u];
    for (const auto &[v, w] : lists[u]) {
      edges[e] = v;
      edge_weights[e] = w;
      ++e;
    }
  }
  return {std::move(nodes), std::move(edges), std::move(edge_weights), std::move(node_weights)};
}

[[noreturn]] void parse_error(const std::size_t line, const std::string &what) {
  throw Error(ErrorKind::kParse, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) {
      ++pos;
    }
    const std::size_t start = pos;
    while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) {
      ++pos;
    }
    if (pos > start) {
      tokens.push_back(line.substr(start, pos - start));
    }
  }
  return tokens;
}

std::int64_t parse_integer(const std::string_view token, const std::size_t line) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    parse_error(line, "expected an integer, got '" + std::string(token) + "'");
  }
  return value;
}
} // namespace

Graph::Graph(
    std::vector<EdgeID> nodes,
    std::vector<NodeID> edges,
    std::vector<Weight> edge_weights,
    std::vector<Weight> node_weights
)
    : _nodes(std::move(nodes)),
      _edges(std::move(edges)),
      _edge_weights(std::move(edge_weights)),
      _node_weights(std::move(node_weights)) {
  if (_nodes.size() != _node_weights.size() + 1 || _nodes.front() != 0 ||
      _nodes.back() != _edges.size() || _edges.size() != _edge_weights.size()) {
    throw_invalid_argument("inconsistent CSR array sizes");
  }
  if (_node_weights.size() > static_cast<std::size_t>(kInvalidNodeID)) {
    throw_invalid_argument("too many vertices");
  }

  const NodeID num_nodes = n();
  for (NodeID u = 0; u < num_nodes; ++u) {
    if (_nodes[u] > _nodes[u + 1]) {
      throw_invalid_argument("CSR offsets are not monotone");
    }
    if (_node_weights[u] <= 0) {
      throw_invalid_argument("vertex " + std::to_string(u) + " has non-positive weight");
    }

    // Canonical order: ascending neighbor IDs.
    std::vector<std::pair<NodeID, Weight>> adjacency;
    adjacency.reserve(degree(u));
    for (EdgeID e = _nodes[u]; e < _nodes[u + 1]; ++e) {
      adjacency.emplace_back(_edges[e], _edge_weights[e]);
    }
    std::sort(adjacency.begin(), adjacency.end());
    EdgeID e = _nodes[u];
    for (std::size_t i = 0; i < adjacency.size(); ++i, ++e) {
      const auto [v, w] = adjacency[i];
      if (v >= num_nodes) {
        throw_invalid_argument("arc target out of range");
      }
      if (v == u) {
        throw_invalid_argument("self-loop at vertex " + std::to_string(u));
      }
      if (w <= 0) {
        throw_invalid_argument("non-positive edge weight");
      }
      if (i > 0 && adjacency[i - 1].first == v) {
        throw_invalid_argument("parallel arcs at vertex " + std::to_string(u));
      }
      _edges[e] = v;
      _edge_weights[e] = w;
    }
  }

  for (NodeID u = 0; u < num_nodes; ++u) {
    for (EdgeID e = _nodes[u]; e < _nodes[u + 1]; ++e) {
      const NodeID v = _edges[e];
      if (find_arc(neighbors(v), neighbor_weights(v), u) != _edge_weights[e]) {
        throw_invalid_argument(
            "arc (" + std::to_string(u) + ", " + std::to_string(v) + ") has no matching reverse arc"
        );
      }
    }
  }

  _total_node_weight = std::accumulate(_node_weights.begin(), _node_weights.end(), Weight{0});
  _max_node_weight =
      _node_weights.empty() ? 0 : *std::max_element(_node_weights.begin(), _node_weights.end());
  _total_edge_weight =
      std::accumulate(_edge_weights.begin(), _edge_weights.end(), Weight{0}) / 2;
}

bool Graph::has_unit_node_weights() const {
  return _max_node_weight <= 1;
}

bool Graph::has_unit_edge_weights() const {
  return std::all_of(_edge_weights.begin(), _edge_weights.end(), [](const Weight w) {
    return w == 1;
  });
}

GraphBuilder::GraphBuilder(const NodeID n) : _node_weights(n, 1) {}

GraphBuilder::GraphBuilder(std::vector<Weight> node_weights)
    : _node_weights(std::move(node_weights)) {}

void GraphBuilder::add_edge(const NodeID u, const NodeID v, const Weight weight) {
  if (u >= _node_weights.size() || v >= _node_weights.size()) {
    throw_invalid_argument("edge endpoint out of range");
  }
  if (weight <= 0) {
    throw_invalid_argument("edge weights must be positive");
  }
  if (u != v) {
    _arcs.emplace_back(u, v, weight);
  }
}

Graph GraphBuilder::build() && {
  std::vector<Adjacency> lists(_node_weights.size());
  for (const auto &[u, v, w] : _arcs) {
    lists[u].emplace_back(v, w);
    lists[v].emplace_back(u, w);
  }
  for (Adjacency &list : lists) {
    sort_and_merge(list);
  }
  return assemble(std::move(lists), std::move(_node_weights));
}

Graph parse_metis(const std::string_view text) {
  std::size_t line_number = 0;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view &line) {
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) {
        end = text.size();
      }
      line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_number;
      if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
      }
      if (!line.empty() && line.front() == '%') {
        continue;
      }
      return true;
    }
    return false;
  };

  std::string_view line;
  if (!next_line(line)) {
    throw Error(ErrorKind::kParse, "line 1: missing header");
  }
  const std::size_t header_line = line_number;
  const auto header = split_tokens(line);
  if (header.size() < 2 || header.size() > 4) {
    parse_error(header_line, "header must be 'n m [fmt [ncon]]'");
  }
  const std::int64_t n = parse_integer(header[0], header_line);
  const std::int64_t m = parse_integer(header[1], header_line);
  if (n < 0 || m < 0 || n >= static_cast<std::int64_t>(kInvalidNodeID)) {
    parse_error(header_line, "vertex and edge counts must be non-negative");
  }

  bool has_node_weights = false;
  bool has_edge_weights = false;
  if (header.size() >= 3) {
    const std::string_view code = header[2];
    if (code.find_first_not_of("01") != std::string_view::npos || code.size() > 3) {
      parse_error(header_line, "unsupported format code '" + std::string(code) + "'");
    }
    // Three digit form: vertex sizes, vertex weights, edge weights.
    const std::string fmt = std::string(3 - code.size(), '0') + std::string(code);
    if (fmt[0] == '1') {
      parse_error(header_line, "vertex sizes are not supported");
    }
    has_node_weights = fmt[1] == '1';
    has_edge_weights = fmt[2] == '1';
  }
  if (header.size() == 4) {
    const std::int64_t ncon = parse_integer(header[3], header_line);
    if (ncon != 1) {
      parse_error(header_line, "multi-constraint graphs are not supported");
    }
  }

  std::vector<Adjacency> lists(static_cast<std::size_t>(n));
  std::vector<std::size_t> lines(static_cast<std::size_t>(n));
  std::vector<Weight> node_weights(static_cast<std::size_t>(n), 1);
  std::int64_t listed_arcs = 0;

  for (std::int64_t u = 0; u < n; ++u) {
    if (!next_line(line)) {
      parse_error(
          line_number + 1,
          "unexpected end of input: expected " + std::to_string(n) + " vertex lines, got " +
              std::to_string(u)
      );
    }
    lines[u] = line_number;
    const auto tokens = split_tokens(line);
    std::size_t t = 0;
    if (has_node_weights) {
      if (tokens.empty()) {
        parse_error(line_number, "missing vertex weight");
      }
      node_weights[u] = parse_integer(tokens[t++], line_number);
      if (node_weights[u] <= 0) {
        parse_error(line_number, "vertex weights must be positive");
      }
    }
    const std::size_t stride = has_edge_weights ? 2 : 1;
    if ((tokens.size() - t) % stride != 0) {
      parse_error(line_number, "odd number of neighbor/weight tokens");
    }
    for (; t < tokens.size(); t += stride) {
      const std::int64_t v = parse_integer(tokens[t], line_number);
      if (v < 1 || v > n) {
        parse_error(line_number, "neighbor " + std::to_string(v) + " out of range 1.." + std::to_string(n));
      }
      Weight w = 1;
      if (has_edge_weights) {
        w = parse_integer(tokens[t + 1], line_number);
        if (w <= 0) {
          parse_error(line_number, "edge weights must be positive");
        }
      }
      if (v - 1 == u) {
        continue;
      }
      ++listed_arcs;
      lists[u].emplace_back(static_cast<NodeID>(v - 1), w);
    }
    sort_and_merge(lists[u]);
  }

  while (next_line(line)) {
    if (!split_tokens(line).empty()) {
      parse_error(line_number, "trailing data after " + std::to_string(n) + " vertex lines");
    }
  }

  std::int64_t merged_arcs = 0;
  for (std::int64_t u = 0; u < n; ++u) {
    merged_arcs += static_cast<std::int64_t>(lists[u].size());
    for (const auto &[v, w] : lists[u]) {
      const Adjacency &reverse = lists[v];
      const auto it = std::lower_bound(
          reverse.begin(),
          reverse.end(),
          static_cast<NodeID>(u),
          [](const auto &entry, const NodeID key) { return entry.first < key; }
      );
      if (it == reverse.end() || it->first != u) {
        parse_error(
            lines[u],
            "edge {" + std::to_string(u + 1) + ", " + std::to_string(v + 1) +
                "} is missing in the adjacency of vertex " + std::to_string(v + 1)
        );
      }
      if (it->second != w) {
        parse_error(
            lines[u],
            "edge {" + std::to_string(u + 1) + ", " + std::to_string(v + 1) +
                "} has different weights in both directions"
        );
      }
    }
  }
  if (listed_arcs != 2 * m && merged_arcs != 2 * m) {
    parse_error(
        header_line,
        "header announces " + std::to_string(m) + " edges, adjacency lists contain " +
            std::to_string(merged_arcs / 2)
    );
  }

  return assemble(std::move(lists), std::move(node_weights));
}

Graph parse_metis(std::istream &in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_metis(std::string_view(text));
}

Graph read_metis(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIO, "cannot open graph file '" + path + "'");
  }
  return parse_metis(in);
}

void write_metis(const Graph &graph, std::ostream &out) {
  const bool node_weights = !graph.has_unit_node_weights();
  const bool edge_weights = !graph.has_unit_edge_weights();

  out << graph.n() << ' ' << graph.m();
  if (node_weights || edge_weights) {
    out << ' ' << (node_weights ? "1" : "") << (edge_weights ? "1" : "0");
  }
  out << '\n';

  for (NodeID u = 0; u < graph.n(); ++u) {
    bool first = true;
    auto separator = [&] {
      if (!first) {
        out << ' ';
      }
      first = false;
    };
    if (node_weights) {
      separator();
      out << graph.node_weight(u);
    }
    graph.for_each_neighbor(u, [&](const NodeID v, const Weight w) {
      separator();
      out << v + 1;
      if (edge_weights) {
        out << ' ' << w;
      }
    });
    out << '\n';
  }
}

void write_metis(const Graph &graph, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::kIO, "cannot write graph file '" + path + "'");
  }
  write_metis(graph, out);
  if (!out) {
    throw Error(ErrorKind::kIO, "error while writing '" + path + "'");
  }
}

Graph gen_grid(const std::int64_t width, const std::int64_t height) {
  if (width < 1 || height < 1) {
    throw_invalid_argument("grid dimensions must be at least 1");
  }
  if (width * height >= static_cast<std::int64_t>(kInvalidNodeID)) {
    throw_invalid_argument("grid too large");
  }
  GraphBuilder builder(static_cast<NodeID>(width * height));
  for (std::int64_t y = 0; y < height; ++y) {
    for (std::int64_t x = 0; x < width; ++x) {
      const auto u = static_cast<NodeID>(y * width + x);
      if (x + 1 < width) {
        builder.add_edge(u, u + 1);
      }
      if (y + 1 < height) {
        builder.add_edge(u, static_cast<NodeID>(u + width));
      }
    }
  }
  return std::move(builder).build();
}

Graph gen_rgg2d(const std::int64_t n, const double radius, const std::uint64_t seed) {
  if (n <= 0) {
    throw_invalid_argument("rgg2d needs at least one vertex");
  }
  if (n >= static_cast<std::int64_t>(kInvalidNodeID)) {
    throw_invalid_argument("rgg2d: too many vertices");
  }
  if (!(radius > 0.0 && radius < 1.0)) {
    throw_invalid_argument("rgg2d radius must lie in (0, 1)");
  }

  CounterRandom random(seed, streams::kGenerator);
  std::vector<double> xs(static_cast<std::size_t>(n));
  std::vector<double> ys(static_cast<std::size_t>(n));
  for (std::int64_t u = 0; u < n; ++u) {
    xs[u] = random.next_unit();
    ys[u] = random.next_unit();
  }

  // Cells of side >= radius: all neighbors of a point lie in the 3x3 block
  // around its cell.
  const auto cells = static_cast<std::int64_t>(
      std::clamp(std::floor(1.0 / radius), 1.0, std::sqrt(static_cast<double>(n)) + 1.0)
  );
  auto cell_of = [&](const double coord) {
    return std::min(cells - 1, static_cast<std::int64_t>(coord * static_cast<double>(cells)));
  };
  std::vector<std::vector<NodeID>> grid(static_cast<std::size_t>(cells * cells));
  for (std::int64_t u = 0; u < n; ++u) {
    grid[cell_of(ys[u]) * cells + cell_of(xs[u])].push_back(static_cast<NodeID>(u));
  }

  const double r2 = radius * radius;
  GraphBuilder builder(static_cast<NodeID>(n));
  for (std::int64_t u = 0; u < n; ++u) {
    const std::int64_t cx = cell_of(xs[u]);
    const std::int64_t cy = cell_of(ys[u]);
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        const std::int64_t nx = cx + dx;
        const std::int64_t ny = cy + dy;
        if (nx < 0 || ny < 0 || nx >= cells || ny >= cells) {
          continue;
        }
        for (const NodeID v : grid[ny * cells + nx]) {
          if (v <= u) {
            continue;
          }
          const double ddx = xs[u] - xs[v];
          const double ddy = ys[u] - ys[v];
          if (ddx * ddx + ddy * ddy <= r2) {
            builder.add_edge(static_cast<NodeID>(u), v);
          }
        }
      }
    }
  }
  return std::move(builder).build();
}

Weight edge_cut(const Graph &graph, const std::span<const BlockID> assignment) {
  if (assignment.size() != graph.n()) {
    throw_invalid_argument(
        "assignment covers " + std::to_string(assignment.size()) + " of " +
        std::to_string(graph.n()) + " vertices"
    );
  }
  Weight cut = 0;
  for (NodeID u = 0; u < graph.n(); ++u) {
    graph.for_each_neighbor(u, [&](const NodeID v, const Weight w) {
      if (v > u && assignment[u] != assignment[v]) {
        cut += w;
      }
    });
  }
  return cut;
}
} // namespace djet
