#pragma once

// Street network model: a directed, strictly-positive-weighted graph over
// planar intersections, with deterministic shortest-path routing, a
// node/edge text format, and a synthetic grid generator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ridepool {

using NodeId = std::uint32_t;

inline constexpr double kInfDistance = std::numeric_limits<double>::infinity();

struct HalfEdge {
  NodeId node;    // neighbor
  double length;  // meters, > 0
};

/// Immutable after construction; safe for concurrent reads.
class RoadGraph {
 public:
  struct Edge {
    NodeId from;
    NodeId to;
    double length;
  };

  RoadGraph(std::vector<std::pair<double, double>> coords,
            const std::vector<Edge>& edges)
      : coords_(std::move(coords)),
        out_(coords_.size()),
        in_(coords_.size()) {
    if (coords_.empty()) throw std::invalid_argument("graph has no nodes");
    for (const auto& [x, y] : coords_) {
      if (!std::isfinite(x) || !std::isfinite(y))
        throw std::invalid_argument("node coordinates must be finite");
    }
    for (const Edge& e : edges) {
      if (e.from >= coords_.size() || e.to >= coords_.size())
        throw std::invalid_argument("edge references unknown node " +
                                    std::to_string(e.from >= coords_.size()
                                                       ? e.from
                                                       : e.to));
      if (!(e.length > 0.0) || !std::isfinite(e.length))
        throw std::invalid_argument("edge length must be positive and finite");
      out_[e.from].push_back({e.to, e.length});
      in_[e.to].push_back({e.from, e.length});
      ++edge_count_;
    }
    // Sorted adjacency gives deterministic iteration everywhere downstream.
    auto by_node = [](const HalfEdge& a, const HalfEdge& b) {
      return a.node < b.node || (a.node == b.node && a.length < b.length);
    };
    for (auto& v : out_) std::sort(v.begin(), v.end(), by_node);
    for (auto& v : in_) std::sort(v.begin(), v.end(), by_node);
    check_strongly_connected();
  }

  std::size_t node_count() const { return coords_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  double x(NodeId n) const { return coords_[check(n)].first; }
  double y(NodeId n) const { return coords_[check(n)].second; }

  const std::vector<HalfEdge>& out(NodeId n) const { return out_[check(n)]; }
  const std::vector<HalfEdge>& in(NodeId n) const { return in_[check(n)]; }

  std::pair<double, double> coord(NodeId n) const { return coords_[check(n)]; }

  /// Length of the cheapest direct edge from -> to; throws if absent.
  double edge_length(NodeId from, NodeId to) const {
    for (const HalfEdge& e : out(from))
      if (e.node == to) return e.length;  // sorted: first hit is cheapest
    throw std::logic_error("no edge between adjacent nodes");
  }

  bool valid(NodeId n) const { return n < coords_.size(); }

 private:
  NodeId check(NodeId n) const {
    if (n >= coords_.size())
      throw std::out_of_range("node id " + std::to_string(n) +
                              " out of range");
    return n;
  }

  void check_strongly_connected() const {
    auto reaches_all = [this](const std::vector<std::vector<HalfEdge>>& adj) {
      std::vector<char> seen(coords_.size(), 0);
      std::vector<NodeId> stack{0};
      seen[0] = 1;
      std::size_t count = 1;
      while (!stack.empty()) {
        NodeId n = stack.back();
        stack.pop_back();
        for (const HalfEdge& e : adj[n]) {
          if (!seen[e.node]) {
            seen[e.node] = 1;
            ++count;
            stack.push_back(e.node);
          }
        }
      }
      return count == coords_.size();
    };
    if (!reaches_all(out_) || !reaches_all(in_))
      throw std::invalid_argument("graph is not strongly connected");
  }

  std::vector<std::pair<double, double>> coords_;
  std::vector<std::vector<HalfEdge>> out_;
  std::vector<std::vector<HalfEdge>> in_;
  std::size_t edge_count_ = 0;
};

struct PathResult {
  double distance = 0.0;           // meters
  std::vector<NodeId> nodes;       // origin .. destination
};

namespace detail {

/// Distances from every node TO `target` (Dijkstra over reversed edges).
inline std::vector<double> distances_to(const RoadGraph& g, NodeId target) {
  std::vector<double> dist(g.node_count(), kInfDistance);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[target] = 0.0;
  open.emplace(0.0, target);
  while (!open.empty()) {
    auto [d, n] = open.top();
    open.pop();
    if (d > dist[n]) continue;
    for (const HalfEdge& e : g.in(n)) {
      const double nd = e.length + d;
      if (nd < dist[e.node]) {
        dist[e.node] = nd;
        open.emplace(nd, e.node);
      }
    }
  }
  return dist;
}

/// Lowest-id successor of `from` that stays on a minimum-distance path to the
/// target whose distance column is `to_target`.
inline NodeId greedy_next_hop(const RoadGraph& g, NodeId from,
                              const std::vector<double>& to_target) {
  for (const HalfEdge& e : g.out(from)) {  // ascending node id
    if (e.length + to_target[e.node] == to_target[from]) return e.node;
  }
  throw std::logic_error("no shortest-path successor; distances inconsistent");
}

}  // namespace detail

/// Minimum-distance path with deterministic tie-breaking: among shortest
/// paths, the walk always takes the lowest next node id.
inline PathResult shortest_path(const RoadGraph& g, NodeId from, NodeId to) {
  if (!g.valid(from) || !g.valid(to))
    throw std::out_of_range("shortest_path: invalid node id");
  if (from == to) return {0.0, {from}};
  const std::vector<double> dist = detail::distances_to(g, to);
  if (!std::isfinite(dist[from]))
    throw std::runtime_error("destination unreachable from origin");
  PathResult result;
  result.distance = dist[from];
  NodeId cur = from;
  result.nodes.push_back(cur);
  while (cur != to) {
    cur = detail::greedy_next_hop(g, cur, dist);
    result.nodes.push_back(cur);
  }
  return result;
}

/// Constant-speed travel time in seconds.
inline double travel_time(double distance_m, double speed_mps) {
  if (!(speed_mps > 0.0)) throw std::invalid_argument("speed must be > 0");
  if (distance_m < 0.0) throw std::invalid_argument("distance must be >= 0");
  return distance_m / speed_mps;
}

/// Node minimizing Euclidean distance to (x, y); ties -> lowest id.
inline NodeId snap_to_nearest_node(const RoadGraph& g, double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y))
    throw std::invalid_argument("snap_to_nearest_node: coordinates not finite");
  NodeId best = 0;
  double best_d2 = kInfDistance;
  for (NodeId n = 0; n < g.node_count(); ++n) {
    const auto [nx, ny] = g.coord(n);
    const double d2 = (nx - x) * (nx - x) + (ny - y) * (ny - y);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = n;
    }
  }
  return best;
}

/// Bidirectional square lattice; rows*cols nodes spaced `spacing` meters.
inline RoadGraph generate_grid(int rows, int cols, double spacing) {
  if (rows < 2 || cols < 2)
    throw std::invalid_argument("grid needs rows >= 2 and cols >= 2");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw std::invalid_argument("grid spacing must be > 0");
  std::vector<std::pair<double, double>> coords;
  coords.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      coords.emplace_back(c * spacing, r * spacing);
  std::vector<RoadGraph::Edge> edges;
  auto id = [cols](int r, int c) {
    return static_cast<NodeId>(r * cols + c);
  };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) {
        edges.push_back({id(r, c), id(r, c + 1), spacing});
        edges.push_back({id(r, c + 1), id(r, c), spacing});
      }
      if (r + 1 < rows) {
        edges.push_back({id(r, c), id(r + 1, c), spacing});
        edges.push_back({id(r + 1, c), id(r, c), spacing});
      }
    }
  }
  return RoadGraph(std::move(coords), edges);
}

// ---------------------------------------------------------------------------
// Node/edge text document
//
//   [nodes]
//   id,x,y
//   0,0.0,0.0
//   [edges]
//   from,to,length_m
//   0,1,100.0
//
// Node ids must cover 0..n-1. Lines starting with '#' and blank lines are
// ignored.
// ---------------------------------------------------------------------------

inline RoadGraph load_graph(std::istream& input) {
  enum class Section { None, Nodes, Edges };
  Section section = Section::None;
  bool nodes_header_seen = false, edges_header_seen = false;
  std::vector<std::pair<std::uint64_t, std::pair<double, double>>> raw_nodes;
  std::vector<std::tuple<std::uint64_t, std::uint64_t, double>> raw_edges;

  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
  };
  auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : s) {
      if (ch == ',') {
        fields.push_back(cur);
        cur.clear();
      } else if (ch != '\r') {
        cur.push_back(ch);
      }
    }
    fields.push_back(cur);
    return fields;
  };
  auto parse_num = [&](const std::string& s, const char* what) {
    try {
      std::size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos != s.size()) fail(std::string("bad ") + what + " '" + s + "'");
      return v;
    } catch (const std::logic_error&) {
      fail(std::string("bad ") + what + " '" + s + "'");
    }
    return 0.0;  // unreachable
  };

  while (std::getline(input, line)) {
    ++line_no;
    // strip trailing CR and whitespace-only lines
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line == "[nodes]") {
      section = Section::Nodes;
      continue;
    }
    if (line == "[edges]") {
      section = Section::Edges;
      continue;
    }
    if (section == Section::None) fail("expected [nodes] or [edges] section");
    const auto fields = split(line);
    if (section == Section::Nodes) {
      if (!nodes_header_seen) {
        if (fields != std::vector<std::string>{"id", "x", "y"})
          fail("nodes header must be 'id,x,y'");
        nodes_header_seen = true;
        continue;
      }
      if (fields.size() != 3) fail("node row needs 3 fields");
      const double id = parse_num(fields[0], "node id");
      if (id < 0 || id != std::floor(id)) fail("node id must be a non-negative integer");
      raw_nodes.push_back({static_cast<std::uint64_t>(id),
                           {parse_num(fields[1], "x"), parse_num(fields[2], "y")}});
    } else {
      if (!edges_header_seen) {
        if (fields != std::vector<std::string>{"from", "to", "length_m"})
          fail("edges header must be 'from,to,length_m'");
        edges_header_seen = true;
        continue;
      }
      if (fields.size() != 3) fail("edge row needs 3 fields");
      const double from = parse_num(fields[0], "from id");
      const double to = parse_num(fields[1], "to id");
      if (from < 0 || from != std::floor(from) || to < 0 || to != std::floor(to))
        fail("edge endpoints must be non-negative integers");
      raw_edges.emplace_back(static_cast<std::uint64_t>(from),
                             static_cast<std::uint64_t>(to),
                             parse_num(fields[2], "length_m"));
    }
  }
  if (!nodes_header_seen) throw std::runtime_error("missing [nodes] section");
  if (!edges_header_seen) throw std::runtime_error("missing [edges] section");
  if (raw_nodes.empty()) throw std::runtime_error("no nodes defined");

  // ids must cover 0..n-1 exactly
  const std::size_t n = raw_nodes.size();
  std::vector<std::pair<double, double>> coords(n);
  std::vector<char> seen(n, 0);
  for (const auto& [id, xy] : raw_nodes) {
    if (id >= n) throw std::runtime_error("node ids must be dense in [0, node_count); found " + std::to_string(id));
    if (seen[id]) throw std::runtime_error("duplicate node id " + std::to_string(id));
    seen[id] = 1;
    coords[id] = xy;
  }
  std::vector<RoadGraph::Edge> edges;
  edges.reserve(raw_edges.size());
  for (const auto& [from, to, len] : raw_edges) {
    if (from >= n || to >= n)
      throw std::runtime_error("edge references unknown node " +
                               std::to_string(from >= n ? from : to));
    edges.push_back({static_cast<NodeId>(from), static_cast<NodeId>(to), len});
  }
  return RoadGraph(std::move(coords), edges);
}

inline void write_graph(std::ostream& out, const RoadGraph& g) {
  out << "[nodes]\nid,x,y\n";
  char buf[96];
  for (NodeId n = 0; n < g.node_count(); ++n) {
    const auto [x, y] = g.coord(n);
    std::snprintf(buf, sizeof buf, "%u,%.12g,%.12g\n", n, x, y);
    out << buf;
  }
  out << "[edges]\nfrom,to,length_m\n";
  for (NodeId n = 0; n < g.node_count(); ++n) {
    for (const HalfEdge& e : g.out(n)) {
      std::snprintf(buf, sizeof buf, "%u,%u,%.12g\n", n, e.node, e.length);
      out << buf;
    }
  }
}

/// Network-distance queries used throughout matching and motion. Graphs up to
/// `dense_limit` nodes get a precomputed all-pairs table (the matching loop
/// is distance-query-bound); larger graphs fall back to per-target columns
/// computed on demand behind a mutex. Results are identical either way.
class DistanceOracle {
 public:
  explicit DistanceOracle(const RoadGraph& g, std::size_t dense_limit = 2500)
      : g_(g), dense_(g.node_count() <= dense_limit) {
    if (dense_) {
      const std::size_t n = g.node_count();
      table_.resize(n * n);
      for (NodeId t = 0; t < n; ++t) {
        const auto col = detail::distances_to(g, t);
        std::copy(col.begin(), col.end(), table_.begin() + t * n);
      }
    }
  }

  const RoadGraph& graph() const { return g_; }

  /// Network distance in meters from -> to.
  double distance(NodeId from, NodeId to) const {
    if (dense_) return table_[static_cast<std::size_t>(to) * g_.node_count() + from];
    return column(to)[from];
  }

  /// First node after `from` on the canonical shortest path to `to`.
  NodeId next_hop(NodeId from, NodeId to) const {
    if (from == to) return to;
    if (dense_) {
      const double* col = table_.data() +
                          static_cast<std::size_t>(to) * g_.node_count();
      for (const HalfEdge& e : g_.out(from))
        if (e.length + col[e.node] == col[from]) return e.node;
      throw std::logic_error("next_hop: inconsistent distance table");
    }
    return detail::greedy_next_hop(g_, from, column(to));
  }

 private:
  const std::vector<double>& column(NodeId to) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(to);
    if (it == cache_.end())
      it = cache_.emplace(to, detail::distances_to(g_, to)).first;
    return it->second;
  }

  const RoadGraph& g_;
  bool dense_;
  std::vector<double> table_;  // [to * n + from]
  mutable std::unordered_map<NodeId, std::vector<double>> cache_;
  mutable std::mutex mu_;
};

}  // namespace ridepool
