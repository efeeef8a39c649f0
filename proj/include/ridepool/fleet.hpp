#pragma once

// Vehicle state machine: planned stop sequences, boarding/alighting, and
// constant-speed motion along canonical shortest paths.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ridepool/demand.hpp"
#include "ridepool/random.hpp"
#include "ridepool/road_network.hpp"

namespace ridepool {

enum class StopKind { Pickup, Dropoff };

struct Stop {
  StopKind kind = StopKind::Pickup;
  std::int64_t request_id = 0;
  NodeId node = 0;
};

struct FleetConfig {
  int fleet_size = 0;
  int capacity = 0;
  double speed = 0.0;  // meters per second
  std::uint64_t seed = 0;

  void validate() const {
    if (fleet_size < 1) throw std::invalid_argument("fleet.size must be >= 1");
    if (capacity < 1) throw std::invalid_argument("fleet.capacity must be >= 1");
    if (!(speed > 0.0)) throw std::invalid_argument("fleet.speed must be > 0");
  }
};

struct OnboardPassenger {
  double pickup_time = 0.0;  // boarding timestamp, seconds
  double direct_time = 0.0;  // no-detour ride time, seconds
};

struct Vehicle {
  int id = 0;
  int capacity = 1;
  // Position: the node the vehicle is at, or the node it is committed to
  // reach with `edge_remaining` meters still to drive. A vehicle re-routed
  // mid-edge finishes the edge first.
  NodeId anchor = 0;
  double edge_remaining = 0.0;
  std::vector<Stop> schedule;
  std::map<std::int64_t, OnboardPassenger> onboard;  // ordered: deterministic

  bool at_node() const { return edge_remaining == 0.0; }
  bool idle() const { return schedule.empty(); }

  int pending_pickups() const {
    int n = 0;
    for (const Stop& s : schedule)
      if (s.kind == StopKind::Pickup) ++n;
    return n;
  }

  /// Onboard passengers plus passengers scheduled to be picked up.
  int scheduled_count() const {
    return static_cast<int>(onboard.size()) + pending_pickups();
  }

  /// Internal consistency; violations are bugs, not data errors.
  void check_invariants() const {
    if (static_cast<int>(onboard.size()) > capacity)
      throw std::logic_error("vehicle " + std::to_string(id) +
                             ": onboard exceeds capacity");
    if (scheduled_count() > capacity)
      throw std::logic_error("vehicle " + std::to_string(id) +
                             ": scheduled count exceeds capacity");
    std::map<std::int64_t, int> picked;  // request -> not-yet-dropped count
    for (const auto& entry : onboard) picked[entry.first] = 1;
    for (const Stop& s : schedule) {
      if (s.kind == StopKind::Pickup) {
        if (onboard.count(s.request_id))
          throw std::logic_error("pickup scheduled for onboard passenger");
        if (++picked[s.request_id] > 1)
          throw std::logic_error("duplicate pickup in schedule");
      } else {
        if (picked[s.request_id] != 1)
          throw std::logic_error("dropoff without preceding pickup");
        --picked[s.request_id];
      }
    }
    for (const auto& [rid, net] : picked)
      if (net != 0)
        throw std::logic_error("passenger " + std::to_string(rid) +
                               " has no pending dropoff");
  }
};

enum class EventKind { PickedUp, DroppedOff };

struct LifecycleEvent {
  EventKind kind = EventKind::PickedUp;
  std::int64_t request_id = 0;
  int vehicle_id = 0;
  double time = 0.0;
  NodeId node = 0;
};

/// Places vehicles at nodes sampled from the empirical origin distribution of
/// `requests` (uniform over nodes when the list is empty), with empty
/// schedules.
inline std::vector<Vehicle> initialize_fleet(const FleetConfig& cfg,
                                             const std::vector<Request>& requests,
                                             const RoadGraph& g) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::vector<Vehicle> fleet;
  fleet.reserve(cfg.fleet_size);
  for (int i = 0; i < cfg.fleet_size; ++i) {
    Vehicle v;
    v.id = i;
    v.capacity = cfg.capacity;
    v.anchor = requests.empty()
                   ? static_cast<NodeId>(uniform_index(rng, g.node_count()))
                   : requests[uniform_index(rng, requests.size())].origin;
    fleet.push_back(std::move(v));
  }
  return fleet;
}

/// Moves the vehicle speed*dt meters along its planned stop sequence,
/// executing pickups/dropoffs (zero dwell) with exact intra-step timestamps.
/// An idle vehicle stays where it is. Returns the lifecycle events emitted.
inline std::vector<LifecycleEvent> advance(Vehicle& vehicle, double dt,
                                           const DistanceOracle& oracle,
                                           double speed, double now,
                                           const RequestIndex& requests) {
  if (!(dt > 0.0)) throw std::invalid_argument("advance: dt must be > 0");
  if (!(speed > 0.0)) throw std::invalid_argument("advance: speed must be > 0");
  std::vector<LifecycleEvent> events;
  double budget = speed * dt;
  double traveled = 0.0;

  auto execute_due_stops = [&] {
    while (vehicle.at_node() && !vehicle.schedule.empty() &&
           vehicle.schedule.front().node == vehicle.anchor) {
      const Stop stop = vehicle.schedule.front();
      vehicle.schedule.erase(vehicle.schedule.begin());
      const double t = now + traveled / speed;
      if (stop.kind == StopKind::Pickup) {
        if (static_cast<int>(vehicle.onboard.size()) >= vehicle.capacity)
          throw std::logic_error("pickup would exceed capacity");
        const Request& r = requests.at(stop.request_id);
        vehicle.onboard[stop.request_id] = {t, r.direct_time};
        events.push_back({EventKind::PickedUp, stop.request_id, vehicle.id, t,
                          vehicle.anchor});
      } else {
        if (vehicle.onboard.erase(stop.request_id) == 0)
          throw std::logic_error("dropoff for passenger not onboard");
        events.push_back({EventKind::DroppedOff, stop.request_id, vehicle.id,
                          t, vehicle.anchor});
      }
    }
  };

  constexpr double kEps = 1e-9;  // meters
  for (;;) {
    execute_due_stops();
    if (vehicle.schedule.empty() || budget <= kEps) break;
    if (vehicle.at_node()) {
      const NodeId target = vehicle.schedule.front().node;
      const NodeId next = oracle.next_hop(vehicle.anchor, target);
      vehicle.edge_remaining = oracle.graph().edge_length(vehicle.anchor, next);
      vehicle.anchor = next;
    }
    const double step = budget < vehicle.edge_remaining ? budget
                                                        : vehicle.edge_remaining;
    vehicle.edge_remaining -= step;
    budget -= step;
    traveled += step;
  }
  return events;
}

}  // namespace ridepool
