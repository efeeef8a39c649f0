#pragma once

// Request stream production: trip-record filtering, uniform subsampling, and
// synthetic Poisson demand over a road network.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ridepool/random.hpp"
#include "ridepool/road_network.hpp"

namespace ridepool {

/// Minimum network distance for a trip to enter the system, meters.
inline constexpr double kMinTripDistance = 500.0;

struct Request {
  std::int64_t id = 0;
  NodeId origin = 0;
  NodeId destination = 0;
  double request_time = 0.0;     // seconds, multiple of the matching interval
  double direct_distance = 0.0;  // meters, shortest path origin -> destination
  double direct_time = 0.0;      // seconds, direct_distance / speed
};

struct RawTrip {
  double timestamp = 0.0;  // seconds
  double origin_x = 0.0, origin_y = 0.0;
  double dest_x = 0.0, dest_y = 0.0;
};

struct BoundingBox {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
  bool contains(double x, double y) const {
    return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
  }
};

/// Origin/destination sampling model for synthetic demand.
struct OdDistribution {
  enum class Kind { Uniform, Hotspot, Explicit };

  struct PairWeight {
    NodeId origin;
    NodeId destination;
    double weight;
  };

  Kind kind = Kind::Uniform;
  // Hotspot: Gaussian bump of origin weight centered at (center_x, center_y);
  // destinations uniform.
  double center_x = 0.0, center_y = 0.0, sigma = 1.0;
  std::vector<PairWeight> pairs;  // Explicit only

  static OdDistribution uniform() { return {}; }

  static OdDistribution hotspot(double cx, double cy, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("hotspot sigma must be > 0");
    OdDistribution d;
    d.kind = Kind::Hotspot;
    d.center_x = cx;
    d.center_y = cy;
    d.sigma = sigma;
    return d;
  }

  static OdDistribution explicit_pairs(std::vector<PairWeight> pairs) {
    if (pairs.empty())
      throw std::invalid_argument("explicit OD distribution needs pairs");
    double total = 0.0;
    for (const auto& p : pairs) {
      if (p.weight < 0.0)
        throw std::invalid_argument("OD pair weights must be non-negative");
      total += p.weight;
    }
    if (!(total > 0.0))
      throw std::invalid_argument("OD pair weights must not all be zero");
    OdDistribution d;
    d.kind = Kind::Explicit;
    d.pairs = std::move(pairs);
    return d;
  }
};

struct DemandConfig {
  double arrival_rate = 0.0;  // requests per second
  double horizon = 0.0;       // seconds
  OdDistribution od;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(arrival_rate >= 0.0) || !std::isfinite(arrival_rate))
      throw std::invalid_argument("demand.arrival_rate must be >= 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("demand.horizon must be > 0");
  }
};

/// Ingestion filter. Keeps trips whose endpoints fall inside `area`, snaps
/// them to intersections, drops short trips (network distance <= 500 m), and
/// rounds timestamps to the nearest multiple of `delta` (ties round up).
/// Ids are assigned sequentially ordered by (request_time, input order).
inline std::vector<Request> filter_trips(const std::vector<RawTrip>& raw,
                                         const RoadGraph& g,
                                         const DistanceOracle& oracle,
                                         double delta, const BoundingBox& area,
                                         double speed) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  if (!(speed > 0.0)) throw std::invalid_argument("speed must be > 0");
  struct Candidate {
    double request_time;
    std::size_t input_index;
    NodeId origin, destination;
    double direct_distance;
  };
  std::vector<Candidate> kept;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const RawTrip& t = raw[i];
    if (!std::isfinite(t.timestamp) || !std::isfinite(t.origin_x) ||
        !std::isfinite(t.origin_y) || !std::isfinite(t.dest_x) ||
        !std::isfinite(t.dest_y))
      throw std::runtime_error("trip record " + std::to_string(i) +
                               ": non-finite field");
    if (!area.contains(t.origin_x, t.origin_y) ||
        !area.contains(t.dest_x, t.dest_y))
      continue;
    const NodeId o = snap_to_nearest_node(g, t.origin_x, t.origin_y);
    const NodeId d = snap_to_nearest_node(g, t.dest_x, t.dest_y);
    if (o == d) continue;
    const double dist = oracle.distance(o, d);
    if (dist <= kMinTripDistance) continue;
    const double rounded = std::floor(t.timestamp / delta + 0.5) * delta;
    kept.push_back({rounded, i, o, d, dist});
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.request_time < b.request_time;
                   });
  std::vector<Request> out;
  out.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const Candidate& c = kept[i];
    out.push_back({static_cast<std::int64_t>(i), c.origin, c.destination,
                   c.request_time, c.direct_distance,
                   c.direct_distance / speed});
  }
  return out;
}

/// Independent Bernoulli keep per request via a threshold on one uniform draw
/// each; for a fixed seed, the sample at rate r1 < r2 is a subset of the
/// sample at r2.
inline std::vector<Request> subsample(const std::vector<Request>& requests,
                                      double rate, std::uint64_t seed) {
  if (!(rate > 0.0) || rate > 1.0)
    throw std::invalid_argument("subsample rate must be in (0, 1]");
  std::mt19937_64 rng(seed);
  std::vector<Request> out;
  out.reserve(requests.size());
  for (const Request& r : requests)
    if (uniform01(rng) < rate) out.push_back(r);
  return out;
}

namespace detail {

struct OdSampler {
  const RoadGraph& g;
  const OdDistribution& od;
  std::vector<double> origin_cum;  // Hotspot
  std::vector<double> pair_cum;    // Explicit

  OdSampler(const RoadGraph& graph, const OdDistribution& dist)
      : g(graph), od(dist) {
    if (od.kind == OdDistribution::Kind::Hotspot) {
      origin_cum.reserve(g.node_count());
      double acc = 0.0;
      const double inv = 1.0 / (2.0 * od.sigma * od.sigma);
      for (NodeId n = 0; n < g.node_count(); ++n) {
        const auto [x, y] = g.coord(n);
        const double d2 = (x - od.center_x) * (x - od.center_x) +
                          (y - od.center_y) * (y - od.center_y);
        acc += std::exp(-d2 * inv);
        origin_cum.push_back(acc);
      }
    } else if (od.kind == OdDistribution::Kind::Explicit) {
      double acc = 0.0;
      for (const auto& p : od.pairs) {
        if (!g.valid(p.origin) || !g.valid(p.destination))
          throw std::invalid_argument("OD pair references unknown node");
        acc += p.weight;
        pair_cum.push_back(acc);
      }
    }
  }

  std::pair<NodeId, NodeId> draw(std::mt19937_64& rng) const {
    switch (od.kind) {
      case OdDistribution::Kind::Uniform:
        return {static_cast<NodeId>(uniform_index(rng, g.node_count())),
                static_cast<NodeId>(uniform_index(rng, g.node_count()))};
      case OdDistribution::Kind::Hotspot:
        return {static_cast<NodeId>(categorical_draw(rng, origin_cum)),
                static_cast<NodeId>(uniform_index(rng, g.node_count()))};
      case OdDistribution::Kind::Explicit: {
        const auto& p = od.pairs[categorical_draw(rng, pair_cum)];
        return {p.origin, p.destination};
      }
    }
    throw std::logic_error("unreachable");
  }
};

}  // namespace detail

/// Synthetic demand: per matching step of length `delta`, a Poisson(rate *
/// delta) number of requests with OD pairs drawn from the configured
/// distribution, resampled until the network distance exceeds 500 m.
inline std::vector<Request> generate_poisson(const DemandConfig& cfg,
                                             const RoadGraph& g,
                                             const DistanceOracle& oracle,
                                             double delta, double speed) {
  cfg.validate();
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  if (!(speed > 0.0)) throw std::invalid_argument("speed must be > 0");
  constexpr int kMaxRetries = 10000;
  std::mt19937_64 rng(cfg.seed);
  detail::OdSampler sampler(g, cfg.od);
  std::vector<Request> out;
  const auto steps = static_cast<std::int64_t>(std::ceil(cfg.horizon / delta - 1e-9));
  std::int64_t next_id = 0;
  for (std::int64_t s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * delta;
    const std::uint64_t count = poisson_draw(rng, cfg.arrival_rate * delta);
    for (std::uint64_t k = 0; k < count; ++k) {
      NodeId o = 0, d = 0;
      double dist = 0.0;
      int attempts = 0;
      for (;;) {
        if (++attempts > kMaxRetries)
          throw std::runtime_error(
              "OD distribution admits no pair with network distance > 500 m");
        auto [co, cd] = sampler.draw(rng);
        if (co == cd) continue;
        dist = oracle.distance(co, cd);
        if (dist > kMinTripDistance) {
          o = co;
          d = cd;
          break;
        }
      }
      out.push_back({next_id++, o, d, t, dist, dist / speed});
    }
  }
  return out;
}

/// Arithmetic mean of direct distances, meters.
inline double mean_direct_distance(const std::vector<Request>& requests) {
  if (requests.empty())
    throw std::invalid_argument("mean_direct_distance: empty request list");
  double sum = 0.0;
  for (const Request& r : requests) sum += r.direct_distance;
  return sum / static_cast<double>(requests.size());
}

/// Id -> Request lookup over an immutable request list.
class RequestIndex {
 public:
  RequestIndex() = default;
  explicit RequestIndex(const std::vector<Request>& requests) {
    by_id_.reserve(requests.size());
    for (const Request& r : requests) {
      if (!by_id_.emplace(r.id, &r).second)
        throw std::invalid_argument("duplicate request id " +
                                    std::to_string(r.id));
    }
  }

  const Request& at(std::int64_t id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end())
      throw std::out_of_range("unknown request id " + std::to_string(id));
    return *it->second;
  }

 private:
  std::unordered_map<std::int64_t, const Request*> by_id_;
};

}  // namespace ridepool
