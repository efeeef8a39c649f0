#pragma once

// Dispatching core: pre-assignment by matching area, route feasibility
// (exhaustive enumeration and nearest-neighbor construction), trip-vehicle
// graph building with downward-closure pruning, trip valuation, and exact
// assignment via branch-and-bound.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ridepool/demand.hpp"
#include "ridepool/fleet.hpp"
#include "ridepool/road_network.hpp"

namespace ridepool {

struct ConstraintSet {
  double max_pickup_time = 900.0;      // seconds from request to boarding
  double max_detour_ratio = 0.5;       // extra in-vehicle time / direct time
  double max_wait_time = 300.0;        // seconds a request may wait unassigned
  double matching_radius_time = 900.0; // pre-assignment reach, seconds

  void validate() const {
    if (!(max_pickup_time > 0.0) || !(max_detour_ratio > 0.0) ||
        !(max_wait_time > 0.0) || !(matching_radius_time > 0.0))
      throw std::invalid_argument("constraints must all be positive");
    if (matching_radius_time < max_pickup_time)
      throw std::invalid_argument(
          "constraints.matching_radius_time must be >= max_pickup_time");
  }
};

struct ServiceQuality {
  double pickup_time = 0.0;     // boarding - request time, seconds
  double detour_ratio = 0.0;    // extra in-vehicle time / direct time
  double detour_seconds = 0.0;  // extra in-vehicle time
};

struct FeasibleRoute {
  std::vector<Stop> stops;
  double total_cost = 0.0;  // summed delay seconds over all served passengers
  // Requests boarded along this route (new + previously assigned); onboard
  // passengers contribute to total_cost but have no pickup here.
  std::map<std::int64_t, ServiceQuality> per_request;
};

using Trip = std::vector<std::int64_t>;  // sorted unique request ids

struct RtvEdge {
  Trip trip;
  int vehicle_id = 0;
  FeasibleRoute route;
  double value = 0.0;
};

struct RtvGraph {
  std::vector<RtvEdge> edges;
};

struct AssignmentSolution {
  std::vector<std::size_t> chosen;  // indices into RtvGraph::edges
  double objective = 0.0;

  std::vector<std::pair<Trip, int>> chosen_trips(const RtvGraph& rtv) const {
    std::vector<std::pair<Trip, int>> out;
    out.reserve(chosen.size());
    for (std::size_t e : chosen)
      out.emplace_back(rtv.edges[e].trip, rtv.edges[e].vehicle_id);
    return out;
  }
};

enum class RoutingMode { Exhaustive, NearestNeighbor, Auto };

/// Auto mode switches from enumeration to the greedy heuristic above this
/// many stops.
inline constexpr int kAutoExhaustiveStopLimit = 8;
/// Enumeration refuses instances above this many stops outright.
inline constexpr int kExhaustiveStopCap = 10;

namespace detail {

constexpr double kSlack = 1e-9;

struct PlanItem {
  std::int64_t request_id = 0;
  bool onboard = false;
  NodeId pickup_node = 0;   // unused when onboard
  NodeId dropoff_node = 0;
  double request_time = 0.0;
  double direct_time = 0.0;
  double boarded_at = 0.0;  // onboard only
};

inline PlanItem item_for(const Request& r) {
  PlanItem it;
  it.request_id = r.id;
  it.pickup_node = r.origin;
  it.dropoff_node = r.destination;
  it.request_time = r.request_time;
  it.direct_time = r.direct_time;
  return it;
}

struct RoutingInstance {
  NodeId start = 0;
  double start_offset_s = 0.0;  // time to finish the current edge
  std::vector<PlanItem> items;  // ascending request id
  int stop_count = 0;
};

struct Action {
  int item = 0;
  StopKind kind = StopKind::Pickup;
};

/// Base plan of a vehicle (onboard dropoffs plus already scheduled rides),
/// sorted by request id; new trips merge into it.
inline std::vector<PlanItem> base_items(const Vehicle& vehicle,
                                        const RequestIndex& all) {
  std::map<std::int64_t, PlanItem> items;
  for (const auto& [rid, info] : vehicle.onboard) {
    const Request& r = all.at(rid);
    PlanItem it = item_for(r);
    it.onboard = true;
    it.direct_time = info.direct_time;
    it.boarded_at = info.pickup_time;
    items[rid] = it;
  }
  for (const Stop& s : vehicle.schedule) {
    if (s.kind != StopKind::Pickup) continue;
    items[s.request_id] = item_for(all.at(s.request_id));
  }
  std::vector<PlanItem> out;
  out.reserve(items.size());
  for (auto& [rid, it] : items) out.push_back(std::move(it));
  return out;
}

inline RoutingInstance merge_instance(const Vehicle& vehicle,
                                      const std::vector<PlanItem>& base,
                                      const std::vector<const PlanItem*>& extra,
                                      double speed) {
  RoutingInstance inst;
  inst.start = vehicle.anchor;
  inst.start_offset_s = vehicle.edge_remaining / speed;
  inst.items.reserve(base.size() + extra.size());
  std::size_t bi = 0, ei = 0;
  while (bi < base.size() || ei < extra.size()) {
    const bool take_base =
        ei >= extra.size() ||
        (bi < base.size() && base[bi].request_id < extra[ei]->request_id);
    if (!take_base && bi < base.size() &&
        base[bi].request_id == extra[ei]->request_id)
      throw std::invalid_argument("request already involved with vehicle");
    if (take_base)
      inst.items.push_back(base[bi++]);
    else
      inst.items.push_back(*extra[ei++]);
  }
  for (const PlanItem& it : inst.items) inst.stop_count += it.onboard ? 1 : 2;
  if (static_cast<int>(inst.items.size()) > vehicle.capacity)
    throw std::invalid_argument(
        "onboard + scheduled + new requests exceed vehicle capacity");
  return inst;
}

inline RoutingInstance make_instance(const Vehicle& vehicle,
                                     const std::vector<Request>& new_requests,
                                     const RequestIndex& all, double speed) {
  std::vector<PlanItem> extra_storage;
  extra_storage.reserve(new_requests.size());
  for (const Request& r : new_requests) extra_storage.push_back(item_for(r));
  std::sort(extra_storage.begin(), extra_storage.end(),
            [](const PlanItem& a, const PlanItem& b) {
              return a.request_id < b.request_id;
            });
  std::vector<const PlanItem*> extra;
  extra.reserve(extra_storage.size());
  for (const PlanItem& it : extra_storage) extra.push_back(&it);
  return merge_instance(vehicle, base_items(vehicle, all), extra, speed);
}

/// Times an action sequence and checks every passenger's constraints.
/// Arithmetic is kept identical to the enumerator's incremental form so both
/// agree bit-for-bit.
inline std::optional<FeasibleRoute> evaluate_sequence(
    const RoutingInstance& inst, const std::vector<Action>& seq,
    const ConstraintSet& cs, const DistanceOracle& oracle, double speed,
    double now) {
  FeasibleRoute route;
  NodeId cur = inst.start;
  double t = now + inst.start_offset_s;
  double boarded[kExhaustiveStopCap] = {0};
  for (const Action& a : seq) {
    const PlanItem& item = inst.items[static_cast<std::size_t>(a.item)];
    const NodeId node =
        a.kind == StopKind::Pickup ? item.pickup_node : item.dropoff_node;
    t += oracle.distance(cur, node) / speed;
    cur = node;
    if (a.kind == StopKind::Pickup) {
      const double pickup_time = t - item.request_time;
      if (pickup_time > cs.max_pickup_time + kSlack) return std::nullopt;
      boarded[a.item] = t;
      route.per_request[item.request_id].pickup_time = pickup_time;
      route.total_cost += pickup_time;
      route.stops.push_back({StopKind::Pickup, item.request_id, node});
    } else {
      const double picked_at = item.onboard ? item.boarded_at : boarded[a.item];
      double detour = (t - picked_at) - item.direct_time;
      if (detour > cs.max_detour_ratio * item.direct_time + kSlack)
        return std::nullopt;
      if (detour < 0.0) detour = 0.0;
      if (!item.onboard) {
        auto& q = route.per_request[item.request_id];
        q.detour_seconds = detour;
        q.detour_ratio = detour / item.direct_time;
      }
      route.total_cost += detour;
      route.stops.push_back({StopKind::Dropoff, item.request_id, node});
    }
  }
  return route;
}

struct RouteScratch {
  char picked[kExhaustiveStopCap];
  char done[kExhaustiveStopCap];
  double boarded[kExhaustiveStopCap];
  std::vector<Action> seq, best_seq;
};

inline RouteScratch& route_scratch() {
  thread_local RouteScratch s;
  return s;
}

inline std::optional<FeasibleRoute> solve_nn(const RoutingInstance& inst,
                                             const ConstraintSet& cs,
                                             const DistanceOracle& oracle,
                                             double speed, double now);

/// Minimum-cost precedence-valid ordering via depth-first enumeration with
/// cost and constraint pruning. Candidate order is fixed (ascending request
/// id, pickups before dropoffs) so equal-cost ties resolve deterministically.
/// Pruning only discards orderings that cannot beat the incumbent, so the
/// result equals plain enumeration: the greedy route's cost seeds the
/// incumbent bound, and a branch dies once its cost plus the delay already
/// owed to still-unpicked passengers reaches it.
inline std::optional<FeasibleRoute> solve_exhaustive(
    const RoutingInstance& inst, const ConstraintSet& cs,
    const DistanceOracle& oracle, double speed, double now) {
  if (inst.stop_count > kExhaustiveStopCap)
    throw std::invalid_argument("route enumeration capped at " +
                                std::to_string(kExhaustiveStopCap) + " stops");
  const std::size_t n = inst.items.size();
  if (n == 0) return FeasibleRoute{};

  double nn_cost = std::numeric_limits<double>::infinity();
  {
    const auto nn = solve_nn(inst, cs, oracle, speed, now);
    if (nn) nn_cost = nn->total_cost;
  }

  RouteScratch& s = route_scratch();
  for (std::size_t i = 0; i < n; ++i) {
    s.picked[i] = 0;
    s.done[i] = 0;
    s.boarded[i] = 0.0;
  }
  s.seq.clear();
  s.best_seq.clear();
  double best_cost = std::numeric_limits<double>::infinity();
  double prune_at = nn_cost < best_cost ? nn_cost + 1e-9 : best_cost;
  bool found = false;

  // pending pickup delay accrues at least until `t` for unpicked passengers
  double unpicked_rt_sum = 0.0;
  int unpicked = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!inst.items[i].onboard) {
      ++unpicked;
      unpicked_rt_sum += inst.items[i].request_time;
    }
  }

  auto dfs = [&](auto&& self, NodeId cur, double t, double cost,
                 int remaining) -> void {
    if (remaining == 0) {
      if (cost < prune_at) {
        best_cost = cost;
        prune_at = cost;
        s.best_seq = s.seq;
        found = true;
      }
      return;
    }
    if (cost + static_cast<double>(unpicked) * t - unpicked_rt_sum >= prune_at)
      return;
    for (std::size_t i = 0; i < n; ++i) {
      const PlanItem& item = inst.items[i];
      Action act;
      if (!item.onboard && !s.picked[i]) {
        act = {static_cast<int>(i), StopKind::Pickup};
      } else if ((item.onboard || s.picked[i]) && !s.done[i]) {
        act = {static_cast<int>(i), StopKind::Dropoff};
      } else {
        continue;
      }
      const NodeId node = act.kind == StopKind::Pickup ? item.pickup_node
                                                       : item.dropoff_node;
      const double arrive = t + oracle.distance(cur, node) / speed;
      double add = 0.0;
      if (act.kind == StopKind::Pickup) {
        const double pickup_time = arrive - item.request_time;
        if (pickup_time > cs.max_pickup_time + kSlack) continue;
        add = pickup_time;
        s.picked[i] = 1;
        s.boarded[i] = arrive;
        --unpicked;
        unpicked_rt_sum -= item.request_time;
      } else {
        const double picked_at = item.onboard ? item.boarded_at : s.boarded[i];
        double detour = (arrive - picked_at) - item.direct_time;
        if (detour > cs.max_detour_ratio * item.direct_time + kSlack) continue;
        if (detour < 0.0) detour = 0.0;
        add = detour;
        s.done[i] = 1;
      }
      s.seq.push_back(act);
      self(self, node, arrive, cost + add, remaining - 1);
      s.seq.pop_back();
      if (act.kind == StopKind::Pickup) {
        s.picked[i] = 0;
        ++unpicked;
        unpicked_rt_sum += item.request_time;
      } else {
        s.done[i] = 0;
      }
    }
  };
  dfs(dfs, inst.start, now + inst.start_offset_s, 0.0, inst.stop_count);

  if (!found) {
    if (nn_cost < std::numeric_limits<double>::infinity()) {
      // nothing beat the greedy ordering: rebuild and return it
      auto nn = solve_nn(inst, cs, oracle, speed, now);
      if (nn) return nn;
    }
    return std::nullopt;
  }
  auto route = evaluate_sequence(inst, s.best_seq, cs, oracle, speed, now);
  if (!route)
    throw std::logic_error("enumerated best route failed re-evaluation");
  return route;
}

/// Greedy nearest-eligible-stop ordering (dropoffs eligible after their
/// pickup; ties by lowest request id, pickups first), then one constraint
/// check of the single resulting sequence.
inline std::optional<FeasibleRoute> solve_nn(const RoutingInstance& inst,
                                             const ConstraintSet& cs,
                                             const DistanceOracle& oracle,
                                             double speed, double now) {
  const std::size_t n = inst.items.size();
  if (n == 0) return FeasibleRoute{};
  RouteScratch& s = route_scratch();
  for (std::size_t i = 0; i < n; ++i) {
    s.picked[i] = 0;
    s.done[i] = 0;
  }
  s.seq.clear();
  NodeId cur = inst.start;
  for (int placed = 0; placed < inst.stop_count; ++placed) {
    double best_d = std::numeric_limits<double>::infinity();
    int best_i = -1;
    StopKind best_kind = StopKind::Pickup;
    for (std::size_t i = 0; i < n; ++i) {  // ascending request id
      const PlanItem& item = inst.items[i];
      StopKind kind;
      NodeId node;
      if (!item.onboard && !s.picked[i]) {
        kind = StopKind::Pickup;
        node = item.pickup_node;
      } else if ((item.onboard || s.picked[i]) && !s.done[i]) {
        kind = StopKind::Dropoff;
        node = item.dropoff_node;
      } else {
        continue;
      }
      const double d = oracle.distance(cur, node);
      if (d < best_d) {  // ties keep the earlier (lower id / pickup) choice
        best_d = d;
        best_i = static_cast<int>(i);
        best_kind = kind;
      }
    }
    if (best_i < 0) throw std::logic_error("nearest-neighbor ran out of stops");
    if (best_kind == StopKind::Pickup)
      s.picked[best_i] = 1;
    else
      s.done[best_i] = 1;
    s.seq.push_back({best_i, best_kind});
    cur = best_kind == StopKind::Pickup
              ? inst.items[static_cast<std::size_t>(best_i)].pickup_node
              : inst.items[static_cast<std::size_t>(best_i)].dropoff_node;
  }
  return evaluate_sequence(inst, s.seq, cs, oracle, speed, now);
}

}  // namespace detail

/// Minimum-cost stop ordering over the vehicle's onboard passengers, already
/// scheduled pickups, and `new_requests`, subject to every passenger's pickup
/// and detour constraints, or infeasible when no ordering satisfies them.
inline std::optional<FeasibleRoute> route_exhaustive(
    const Vehicle& vehicle, const std::vector<Request>& new_requests,
    const ConstraintSet& cs, const DistanceOracle& oracle,
    const RequestIndex& all, double speed, double now) {
  return detail::solve_exhaustive(
      detail::make_instance(vehicle, new_requests, all, speed), cs, oracle,
      speed, now);
}

/// Greedy ordering: always drive to the nearest eligible stop, then check the
/// single resulting ordering against all constraints.
inline std::optional<FeasibleRoute> route_nn(
    const Vehicle& vehicle, const std::vector<Request>& new_requests,
    const ConstraintSet& cs, const DistanceOracle& oracle,
    const RequestIndex& all, double speed, double now) {
  return detail::solve_nn(detail::make_instance(vehicle, new_requests, all, speed),
                          cs, oracle, speed, now);
}

/// Vehicle j is a candidate for request r when it can reach r's origin within
/// the matching radius and still has capacity for one more passenger.
/// Requests with no candidates are absent from the result.
inline std::map<std::int64_t, std::vector<int>> preassign(
    const std::vector<Request>& waiting, const std::vector<Vehicle>& vehicles,
    const ConstraintSet& cs, const DistanceOracle& oracle, double speed) {
  std::map<std::int64_t, std::vector<int>> out;
  for (const Request& r : waiting) {
    std::vector<int> cand;
    for (const Vehicle& v : vehicles) {
      if (v.scheduled_count() >= v.capacity) continue;
      const double dist = v.edge_remaining + oracle.distance(v.anchor, r.origin);
      if (travel_time(dist, speed) <= cs.matching_radius_time + detail::kSlack)
        cand.push_back(v.id);
    }
    if (!cand.empty()) {
      std::sort(cand.begin(), cand.end());
      out.emplace(r.id, std::move(cand));
    }
  }
  return out;
}

/// Value of assigning `trip` to a vehicle via `route`: per request, the
/// request value minus its delay cost (pickup time plus detour seconds).
inline double trip_value(const Trip& trip, const FeasibleRoute& route,
                         double request_value) {
  double total = 0.0;
  for (std::int64_t rid : trip) {
    const auto it = route.per_request.find(rid);
    if (it == route.per_request.end())
      throw std::invalid_argument("trip request missing from route");
    total += request_value - (it->second.pickup_time + it->second.detour_seconds);
  }
  return total;
}

/// Builds the trip-vehicle graph: size-1 trips from the pre-assignment
/// candidates, then size-k trips grown from feasible (k-1)-trips and kept
/// only when every (k-1)-subset is feasible (downward closure) and the
/// vehicle admits a constraint-satisfying route. Each retained edge stores
/// its route and value. Deterministic: vehicles ascending, trips in
/// lexicographic order within each size.
inline RtvGraph build_rtv(
    const std::map<std::int64_t, std::vector<int>>& candidates,
    const std::vector<Vehicle>& vehicles, const RequestIndex& all,
    const ConstraintSet& cs, const DistanceOracle& oracle, double speed,
    double now, RoutingMode mode, double request_value) {
  RtvGraph rtv;

  std::map<int, std::vector<std::int64_t>> per_vehicle;  // vehicle -> requests
  std::map<std::int64_t, detail::PlanItem> item_of;
  for (const auto& [rid, vids] : candidates) {
    item_of.emplace(rid, detail::item_for(all.at(rid)));
    for (int vid : vids) per_vehicle[vid].push_back(rid);
  }

  std::map<int, const Vehicle*> by_id;
  for (const Vehicle& v : vehicles) by_id[v.id] = &v;

  std::vector<const detail::PlanItem*> extra;
  for (auto& [vid, rids] : per_vehicle) {
    const auto it = by_id.find(vid);
    if (it == by_id.end())
      throw std::invalid_argument("candidate references unknown vehicle");
    const Vehicle& vehicle = *it->second;
    std::sort(rids.begin(), rids.end());

    const auto base = detail::base_items(vehicle, all);
    const int base_stops = static_cast<int>(vehicle.schedule.size());
    const int k_max = vehicle.capacity - vehicle.scheduled_count();
    if (k_max < 1) continue;

    auto route_for = [&](const Trip& trip) -> std::optional<FeasibleRoute> {
      extra.clear();
      for (std::int64_t rid : trip) extra.push_back(&item_of.at(rid));
      const auto inst = detail::merge_instance(vehicle, base, extra, speed);
      const int stops = base_stops + 2 * static_cast<int>(trip.size());
      const bool exhaustive =
          mode == RoutingMode::Exhaustive ||
          (mode == RoutingMode::Auto && stops <= kAutoExhaustiveStopLimit);
      return exhaustive ? detail::solve_exhaustive(inst, cs, oracle, speed, now)
                        : detail::solve_nn(inst, cs, oracle, speed, now);
    };

    auto add_edge = [&](const Trip& trip, FeasibleRoute&& route) {
      const double value = trip_value(trip, route, request_value);
      rtv.edges.push_back({trip, vid, std::move(route), value});
    };

    std::vector<Trip> prev;  // feasible (k-1)-trips, lexicographically sorted
    for (std::int64_t rid : rids) {
      Trip trip{rid};
      if (auto route = route_for(trip)) {
        add_edge(trip, std::move(*route));
        prev.push_back(std::move(trip));
      }
    }

    Trip candidate;
    for (int k = 2; k <= k_max && !prev.empty(); ++k) {
      std::vector<Trip> next;
      for (const Trip& trip : prev) {
        // extend with ids above the trip's maximum; each union is generated
        // exactly once, in lexicographic order
        const auto start =
            std::upper_bound(rids.begin(), rids.end(), trip.back());
        for (auto rit = start; rit != rids.end(); ++rit) {
          candidate = trip;
          candidate.push_back(*rit);
          // downward closure: all other (k-1)-subsets must be feasible
          bool closed = true;
          Trip sub;
          sub.reserve(candidate.size() - 1);
          for (std::size_t drop = 0; drop + 1 < candidate.size() && closed;
               ++drop) {
            sub.clear();
            for (std::size_t i = 0; i < candidate.size(); ++i)
              if (i != drop) sub.push_back(candidate[i]);
            closed = std::binary_search(prev.begin(), prev.end(), sub);
          }
          if (!closed) continue;
          if (auto route = route_for(candidate)) {
            add_edge(candidate, std::move(*route));
            next.push_back(candidate);
          }
        }
      }
      prev = std::move(next);
    }
  }
  return rtv;
}

namespace detail {

struct IlpEdge {
  std::size_t index;               // position in RtvGraph::edges
  double value;
  std::vector<std::uint64_t> mask; // request bitset
};

inline bool mask_compatible(const std::vector<std::uint64_t>& a,
                            const std::vector<std::uint64_t>& b) {
  for (std::size_t w = 0; w < a.size(); ++w)
    if (a[w] & b[w]) return false;
  return true;
}

}  // namespace detail

/// Exact maximum-value assignment: at most one trip per vehicle, each request
/// in at most one chosen trip. Two branch-and-bound passes over vehicles in
/// id order with an admissible bound (sum of each remaining vehicle's best
/// still-compatible edge): the first pass establishes the optimal value while
/// pruning ties, the second walks choices in lexicographic order and stops at
/// the first optimum, which is therefore the lexicographically smallest
/// chosen (vehicle, trip) set.
inline AssignmentSolution solve_ilp(const RtvGraph& rtv) {
  AssignmentSolution best;  // empty assignment, objective 0
  if (rtv.edges.empty()) return best;

  // request id -> bit
  std::map<std::int64_t, std::size_t> bit_of;
  for (const RtvEdge& e : rtv.edges)
    for (std::int64_t rid : e.trip) bit_of.emplace(rid, 0);
  std::size_t next_bit = 0;
  for (auto& [rid, bit] : bit_of) bit = next_bit++;
  const std::size_t words = (bit_of.size() + 63) / 64;

  std::map<int, std::vector<detail::IlpEdge>> grouped;
  for (std::size_t i = 0; i < rtv.edges.size(); ++i) {
    const RtvEdge& e = rtv.edges[i];
    std::vector<std::uint64_t> mask(words, 0);
    for (std::int64_t rid : e.trip) {
      const std::size_t b = bit_of[rid];
      mask[b / 64] |= std::uint64_t{1} << (b % 64);
    }
    grouped[e.vehicle_id].push_back({i, e.value, std::move(mask)});
  }
  std::vector<std::vector<detail::IlpEdge>> lanes;  // sorted by value desc
  lanes.reserve(grouped.size());
  for (auto& [vid, edges] : grouped) {
    std::sort(edges.begin(), edges.end(),
              [&](const detail::IlpEdge& a, const detail::IlpEdge& b) {
                if (a.value != b.value) return a.value > b.value;
                return rtv.edges[a.index].trip < rtv.edges[b.index].trip;
              });
    lanes.push_back(std::move(edges));
  }

  // static optimistic completion: best edge per remaining vehicle, conflicts
  // ignored
  std::vector<double> suffix_best(lanes.size() + 1, 0.0);
  for (std::size_t v = lanes.size(); v-- > 0;) {
    const double top = lanes[v].empty() ? 0.0 : std::max(0.0, lanes[v][0].value);
    suffix_best[v] = suffix_best[v + 1] + top;
  }

  constexpr double kTie = 1e-9;
  std::vector<std::uint64_t> used(words, 0);
  std::vector<std::uint64_t> claims(words, 0);

  // optimistic completion from `lane` on: every remaining vehicle takes its
  // best edge compatible with `used`, conflicts between them ignored
  auto used_bound = [&](std::size_t lane, double value) {
    double bound = value;
    for (std::size_t v = lane; v < lanes.size(); ++v) {
      for (const auto& e : lanes[v]) {  // descending value
        if (e.value <= 0.0) break;
        if (detail::mask_compatible(e.mask, used)) {
          bound += e.value;
          break;
        }
      }
    }
    return bound;
  };

  // feasible completion from `lane` on: greedy best-compatible walk; a valid
  // incumbent value at any node
  auto greedy_completion = [&](std::size_t lane, double value) {
    std::fill(claims.begin(), claims.end(), 0);
    double total = value;
    for (std::size_t v = lane; v < lanes.size(); ++v) {
      for (const auto& e : lanes[v]) {
        if (e.value <= 0.0) break;
        bool free = true;
        for (std::size_t w = 0; w < words; ++w)
          if (e.mask[w] & (used[w] | claims[w])) {
            free = false;
            break;
          }
        if (free) {
          total += e.value;
          for (std::size_t w = 0; w < words; ++w) claims[w] |= e.mask[w];
          break;
        }
      }
    }
    return total;
  };

  // pass 1: optimal value, pruning everything that cannot strictly improve;
  // starts from the greedy assignment and treats a node as solved when the
  // optimistic and greedy completions meet
  double best_value = greedy_completion(0, 0.0);
  auto find_value = [&](auto&& self, std::size_t lane, double value) -> void {
    if (lane == lanes.size()) {
      if (value > best_value) best_value = value;
      return;
    }
    if (value + suffix_best[lane] <= best_value + kTie) return;
    const double optimistic = used_bound(lane, value);
    if (optimistic <= best_value + kTie) return;
    const double achievable = greedy_completion(lane, value);
    if (achievable > best_value) best_value = achievable;
    if (optimistic <= achievable + kTie) return;  // suffix solved exactly
    for (const auto& e : lanes[lane]) {
      if (!detail::mask_compatible(e.mask, used)) continue;
      for (std::size_t w = 0; w < words; ++w) used[w] |= e.mask[w];
      self(self, lane + 1, value + e.value);
      for (std::size_t w = 0; w < words; ++w) used[w] &= ~e.mask[w];
    }
    self(self, lane + 1, value);  // leave this vehicle unassigned
  };
  find_value(find_value, 0, 0.0);

  // pass 2: first optimum in lexicographic choice order (trips ascending per
  // vehicle, unassigned last)
  std::vector<std::vector<detail::IlpEdge>> lex_lanes = lanes;
  for (auto& lane : lex_lanes)
    std::sort(lane.begin(), lane.end(),
              [&](const detail::IlpEdge& a, const detail::IlpEdge& b) {
                return rtv.edges[a.index].trip < rtv.edges[b.index].trip;
              });
  std::vector<std::size_t> current;
  bool found = false;
  auto find_lex = [&](auto&& self, std::size_t lane, double value) -> void {
    if (found) return;
    if (lane == lex_lanes.size()) {
      if (value >= best_value - kTie) {
        best.chosen = current;
        found = true;
      }
      return;
    }
    if (value + suffix_best[lane] < best_value - kTie) return;
    if (used_bound(lane, value) < best_value - kTie) return;
    for (const auto& e : lex_lanes[lane]) {
      if (found) return;
      if (!detail::mask_compatible(e.mask, used)) continue;
      for (std::size_t w = 0; w < words; ++w) used[w] |= e.mask[w];
      current.push_back(e.index);
      self(self, lane + 1, value + e.value);
      current.pop_back();
      for (std::size_t w = 0; w < words; ++w) used[w] &= ~e.mask[w];
    }
    self(self, lane + 1, value);
  };
  find_lex(find_lex, 0, 0.0);
  if (!found) throw std::logic_error("assignment search lost its optimum");

  best.objective = 0.0;
  for (std::size_t e : best.chosen) best.objective += rtv.edges[e].value;
  return best;
}

}  // namespace ridepool
