#pragma once

// Shared test utilities: seeded random graphs with integer edge lengths so
// distance comparisons against oracles are exact.

#include <random>
#include <vector>

#include "ridepool/road_network.hpp"

namespace test_helpers {

using ridepool::NodeId;
using ridepool::RoadGraph;

/// Strongly connected random digraph: a ring plus `extra` random edges.
/// Lengths are integers in [50, 500] stored as doubles.
inline RoadGraph random_graph(std::mt19937_64& rng, int nodes, int extra) {
  std::uniform_int_distribution<int> len(50, 500);
  std::uniform_int_distribution<int> pick(0, nodes - 1);
  std::uniform_real_distribution<double> coord(0.0, 1000.0);
  std::vector<std::pair<double, double>> coords;
  coords.reserve(nodes);
  for (int i = 0; i < nodes; ++i) coords.emplace_back(coord(rng), coord(rng));
  std::vector<RoadGraph::Edge> edges;
  for (int i = 0; i < nodes; ++i)
    edges.push_back({static_cast<NodeId>(i),
                     static_cast<NodeId>((i + 1) % nodes),
                     static_cast<double>(len(rng))});
  for (int i = 0; i < extra; ++i) {
    const int a = pick(rng), b = pick(rng);
    if (a == b) continue;
    edges.push_back({static_cast<NodeId>(a), static_cast<NodeId>(b),
                     static_cast<double>(len(rng))});
  }
  return RoadGraph(std::move(coords), edges);
}

}  // namespace test_helpers
