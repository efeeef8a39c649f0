#pragma once

// Time-stepped simulation: admit requests each matching interval, expire
// stale ones, run the dispatch pipeline, move vehicles, and accumulate the
// occupancy / service-rate / service-time statistics.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ridepool/demand.hpp"
#include "ridepool/fleet.hpp"
#include "ridepool/laws.hpp"
#include "ridepool/matching.hpp"
#include "ridepool/random.hpp"
#include "ridepool/road_network.hpp"

namespace ridepool {

struct SimConfig {
  double delta = 2.0;      // matching interval, seconds
  double horizon = 7200.0; // seconds
  double warmup = -1.0;    // seconds; < 0 resolves to 10% of horizon
  FleetConfig fleet;
  ConstraintSet constraints;
  std::optional<DemandConfig> demand;  // synthetic demand
  std::vector<Request> requests;       // ingested demand when `demand` unset
  RoutingMode routing_mode = RoutingMode::Auto;
  std::uint64_t seed = 0;
  double network_complexity = 0.0;
  // Requests still waiting or riding at the horizon are dropped from the
  // service-rate denominator (avoids horizon-edge bias on short runs).
  bool exclude_inflight_from_denominator = true;
  // Per-request value in the assignment objective; < 0 resolves to
  // 10 * max_wait_time so serving more requests always dominates delay.
  double request_value = -1.0;
  // When set, assigned-but-not-picked-up requests re-enter the pool every
  // round and may switch vehicles (or lose their assignment entirely).
  bool allow_reassignment = false;

  SimConfig resolved() const {
    SimConfig c = *this;
    if (c.warmup < 0.0) c.warmup = 0.1 * c.horizon;
    if (c.request_value < 0.0) c.request_value = 10.0 * c.constraints.max_wait_time;
    return c;
  }

  void validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("sim.delta must be > 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("sim.horizon must be > 0");
    if (warmup >= horizon)
      throw std::invalid_argument("sim.warmup must be < horizon");
    fleet.validate();
    constraints.validate();
    if (demand) demand->validate();
  }
};

struct Histogram {
  double bin_width = 30.0;
  std::vector<std::uint64_t> counts;

  void add(double value) {
    if (value < 0.0) value = 0.0;
    const auto bin = static_cast<std::size_t>(value / bin_width);
    if (bin >= counts.size()) counts.resize(bin + 1, 0);
    ++counts[bin];
  }
};

struct SimReport {
  double occupancy = 0.0;          // mean scheduled passengers per vehicle
  double service_rate = 1.0;       // served / (served + expired), post-warmup
  bool service_rate_defined = false;
  double mean_service_time = 0.0;  // assignment to dropoff, served requests
  double mean_pickup_time = 0.0;   // request to boarding, served requests
  double max_pickup_time = 0.0;    // over all pickups
  double mean_trip_distance = 0.0; // over the full request stream
  double arrival_rate_realized = 0.0;  // post-warmup admissions / window
  double u = 0.0;                  // measured system load
  Histogram pickup_histogram;
  std::vector<double> step_occupancy;  // per-step mean scheduled count

  std::uint64_t admitted = 0, served = 0, expired = 0, in_flight = 0;
  std::uint64_t admitted_pw = 0, served_pw = 0, expired_pw = 0;

  int fleet_size = 0;
  int capacity = 0;
  double delta = 0.0, horizon = 0.0, warmup = 0.0, speed = 0.0;
};

using EventSink = std::function<void(const LifecycleEvent&)>;
using RtvSink =
    std::function<void(double, const RtvGraph&, const AssignmentSolution&)>;

inline SimReport run(const SimConfig& config, const RoadGraph& g,
                     const DistanceOracle& oracle,
                     const EventSink& event_sink = {},
                     const RtvSink& rtv_sink = {}) {
  config.validate();
  const SimConfig cfg = config.resolved();
  const double speed = cfg.fleet.speed;

  std::vector<Request> requests;
  if (cfg.demand) {
    DemandConfig dc = *cfg.demand;
    dc.horizon = cfg.horizon;
    dc.seed = mix_seed(cfg.seed, 0xD17);
    requests = generate_poisson(dc, g, oracle, cfg.delta, speed);
  } else {
    requests = cfg.requests;
    std::stable_sort(requests.begin(), requests.end(),
                     [](const Request& a, const Request& b) {
                       return a.request_time < b.request_time ||
                              (a.request_time == b.request_time && a.id < b.id);
                     });
  }
  const RequestIndex index(requests);

  FleetConfig fc = cfg.fleet;
  fc.seed = mix_seed(cfg.seed, 0xF7EE7);
  std::vector<Vehicle> fleet = initialize_fleet(fc, requests, g);

  SimReport report;
  report.fleet_size = cfg.fleet.fleet_size;
  report.capacity = cfg.fleet.capacity;
  report.delta = cfg.delta;
  report.horizon = cfg.horizon;
  report.warmup = cfg.warmup;
  report.speed = speed;
  if (!requests.empty()) report.mean_trip_distance = mean_direct_distance(requests);

  const auto steps =
      static_cast<std::int64_t>(std::ceil(cfg.horizon / cfg.delta - 1e-9));
  std::vector<Request> waiting;
  std::unordered_map<std::int64_t, double> assignment_time;
  std::unordered_set<std::int64_t> ever_assigned;
  std::unordered_map<std::int64_t, double> boarding_time;
  std::uint64_t dropped_total = 0;

  double service_time_sum = 0.0, pickup_sum = 0.0;
  std::uint64_t pickup_count_pw = 0;
  double occupancy_sum_pw = 0.0;
  std::uint64_t occupancy_samples_pw = 0;

  std::size_t admit_cursor = 0;
  for (std::int64_t s = 0; s < steps; ++s) {
    const double now = static_cast<double>(s) * cfg.delta;
    const bool post_warmup = now >= cfg.warmup;

    // 1. admit requests due this step
    while (admit_cursor < requests.size() &&
           std::llround(requests[admit_cursor].request_time / cfg.delta) <= s) {
      const Request& r = requests[admit_cursor++];
      waiting.push_back(r);
      ++report.admitted;
      if (r.request_time >= cfg.warmup) ++report.admitted_pw;
    }

    // 2. cancel requests that waited unassigned beyond the limit
    {
      std::vector<Request> still;
      still.reserve(waiting.size());
      for (const Request& r : waiting) {
        if (now - r.request_time > cfg.constraints.max_wait_time + detail::kSlack) {
          ++report.expired;
          if (r.request_time >= cfg.warmup) ++report.expired_pw;
        } else {
          still.push_back(r);
        }
      }
      waiting = std::move(still);
    }

    // optional reassignment: unpicked passengers re-enter the pool
    if (cfg.allow_reassignment) {
      for (Vehicle& v : fleet) {
        std::vector<std::int64_t> stripped;
        for (const Stop& st : v.schedule)
          if (st.kind == StopKind::Pickup) stripped.push_back(st.request_id);
        if (stripped.empty()) continue;
        for (std::int64_t rid : stripped) waiting.push_back(index.at(rid));
        Vehicle bare = v;
        bare.schedule.clear();
        auto route = route_exhaustive(bare, {}, cfg.constraints, oracle, index,
                                      speed, now);
        if (!route)
          throw std::logic_error("onboard-only replan infeasible");
        v.schedule = route->stops;
      }
      std::sort(waiting.begin(), waiting.end(),
                [](const Request& a, const Request& b) { return a.id < b.id; });
    }

    // 3. match
    if (!waiting.empty()) {
      const auto candidates =
          preassign(waiting, fleet, cfg.constraints, oracle, speed);
      if (!candidates.empty()) {
        const RtvGraph rtv =
            build_rtv(candidates, fleet, index, cfg.constraints, oracle, speed,
                      now, cfg.routing_mode, cfg.request_value);
        const AssignmentSolution sol = solve_ilp(rtv);
        if (rtv_sink) rtv_sink(now, rtv, sol);
        std::unordered_set<std::int64_t> assigned_now;
        for (std::size_t e : sol.chosen) {
          const RtvEdge& edge = rtv.edges[e];
          Vehicle& v = fleet[static_cast<std::size_t>(edge.vehicle_id)];
          if (v.id != edge.vehicle_id)
            throw std::logic_error("fleet must be indexed by vehicle id");
          v.schedule = edge.route.stops;
          v.check_invariants();
          for (std::int64_t rid : edge.trip) {
            assigned_now.insert(rid);
            if (!ever_assigned.count(rid)) {
              ever_assigned.insert(rid);
              assignment_time.emplace(rid, now);
            }
          }
        }
        if (!assigned_now.empty()) {
          std::vector<Request> still;
          still.reserve(waiting.size());
          for (const Request& r : waiting)
            if (!assigned_now.count(r.id)) still.push_back(r);
          waiting = std::move(still);
        }
      }
    }

    // 4. move vehicles, collecting lifecycle events
    for (Vehicle& v : fleet) {
      const auto events = advance(v, cfg.delta, oracle, speed, now, index);
      for (const LifecycleEvent& ev : events) {
        if (event_sink) event_sink(ev);
        const Request& r = index.at(ev.request_id);
        if (ev.kind == EventKind::PickedUp) {
          boarding_time[ev.request_id] = ev.time;
          const double pt = ev.time - r.request_time;
          if (pt > report.max_pickup_time) report.max_pickup_time = pt;
        } else {
          ++dropped_total;
          ++report.served;
          if (r.request_time >= cfg.warmup) {
            ++report.served_pw;
            service_time_sum += ev.time - assignment_time.at(ev.request_id);
            const double pt = boarding_time.at(ev.request_id) - r.request_time;
            pickup_sum += pt;
            ++pickup_count_pw;
            report.pickup_histogram.add(pt);
          }
        }
      }
    }

    // 5. sample occupancy
    std::int64_t scheduled = 0;
    for (const Vehicle& v : fleet) scheduled += v.scheduled_count();
    const double mean_scheduled =
        static_cast<double>(scheduled) / static_cast<double>(fleet.size());
    report.step_occupancy.push_back(mean_scheduled);
    if (post_warmup) {
      occupancy_sum_pw += mean_scheduled;
      ++occupancy_samples_pw;
    }
  }

  // aggregates over the post-warmup window
  report.in_flight = report.admitted - report.served - report.expired;
  if (report.admitted != report.served + report.expired + report.in_flight)
    throw std::logic_error("request conservation violated");
  report.occupancy = occupancy_samples_pw
                         ? occupancy_sum_pw / static_cast<double>(occupancy_samples_pw)
                         : 0.0;
  std::uint64_t denominator =
      cfg.exclude_inflight_from_denominator
          ? report.served_pw + report.expired_pw
          : report.admitted_pw;
  if (denominator > 0) {
    report.service_rate =
        static_cast<double>(report.served_pw) / static_cast<double>(denominator);
    report.service_rate_defined = true;
  } else {
    report.service_rate = 1.0;
    report.service_rate_defined = false;
  }
  if (report.served_pw > 0) {
    report.mean_service_time =
        service_time_sum / static_cast<double>(report.served_pw);
  }
  if (pickup_count_pw > 0)
    report.mean_pickup_time = pickup_sum / static_cast<double>(pickup_count_pw);
  const double window = cfg.horizon - cfg.warmup;
  report.arrival_rate_realized =
      window > 0.0 ? static_cast<double>(report.admitted_pw) / window : 0.0;
  report.u = report.arrival_rate_realized * report.mean_service_time /
             static_cast<double>(cfg.fleet.fleet_size);
  return report;
}

struct SweepRow {
  double arrival_rate = 0.0;  // configured
  int fleet_size = 0;
  int capacity = 0;
  std::uint64_t seed = 0;
  std::optional<SimReport> report;
  std::string error;
};

/// Cross product of arrival rates x fleet sizes x capacities, one seeded run
/// per cell (seed = base seed XOR cell index). Rows keep input order; per-run
/// failures are recorded and the sweep continues.
inline std::vector<SweepRow> sweep(const SimConfig& base,
                                   const std::vector<double>& arrival_rates,
                                   const std::vector<int>& fleet_sizes,
                                   const std::vector<int>& capacities,
                                   const RoadGraph& g,
                                   const DistanceOracle& oracle, int jobs = 0) {
  if (arrival_rates.empty() || fleet_sizes.empty() || capacities.empty())
    throw std::invalid_argument("sweep axes must be non-empty");
  if (!base.demand)
    throw std::invalid_argument("sweep requires synthetic demand config");

  std::vector<SweepRow> rows;
  for (double rate : arrival_rates)
    for (int n : fleet_sizes)
      for (int c : capacities) {
        SweepRow row;
        row.arrival_rate = rate;
        row.fleet_size = n;
        row.capacity = c;
        row.seed = base.seed ^ static_cast<std::uint64_t>(rows.size());
        rows.push_back(row);
      }

  int workers = jobs > 0 ? jobs
                         : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min<int>(workers, static_cast<int>(rows.size()));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= rows.size()) return;
      SweepRow& row = rows[i];
      try {
        SimConfig cfg = base;
        cfg.seed = row.seed;
        cfg.demand->arrival_rate = row.arrival_rate;
        cfg.fleet.fleet_size = row.fleet_size;
        cfg.fleet.capacity = row.capacity;
        row.report = run(cfg, g, oracle);
      } catch (const std::exception& ex) {
        row.error = ex.what();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return rows;
}

/// Successful sweep rows as law-validation points (measured load, occupancy,
/// service rate, and the exogenous normalized load).
inline std::vector<laws::SweepPoint> sweep_points(const std::vector<SweepRow>& rows) {
  std::vector<laws::SweepPoint> points;
  for (const SweepRow& row : rows) {
    if (!row.report) continue;
    const SimReport& r = *row.report;
    laws::SweepPoint p;
    p.arrival_rate = row.arrival_rate;
    p.fleet_size = row.fleet_size;
    p.capacity = row.capacity;
    p.u = r.u;
    p.occupancy = r.occupancy;
    p.service_rate = r.service_rate;
    p.mean_service_time = r.mean_service_time;
    p.mean_trip_distance = r.mean_trip_distance;
    p.x = r.mean_trip_distance > 0.0
              ? laws::normalized_load(r.arrival_rate_realized,
                                      r.mean_trip_distance,
                                      static_cast<double>(row.fleet_size),
                                      r.speed)
              : 0.0;
    points.push_back(p);
  }
  return points;
}

}  // namespace ridepool
