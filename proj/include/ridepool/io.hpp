#pragma once

// File formats and configuration: delimited tables for requests, trips,
// sweep results, residuals and series; JSON run configuration with strict
// field checking; and the reproducibility manifest written next to outputs.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "ridepool/demand.hpp"
#include "ridepool/engine.hpp"
#include "ridepool/laws.hpp"
#include "ridepool/road_network.hpp"
#include "ridepool/version.hpp"

namespace ridepool::io {

using json = nlohmann::ordered_json;

/// Raised for malformed configs / input files; the CLI maps it to exit 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(context + ": bad number '" + s + "'");
  }
}

inline std::int64_t parse_int(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(context + ": bad integer '" + s + "'");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Raw trips and requests
// ---------------------------------------------------------------------------

inline constexpr const char* kTripHeader =
    "timestamp,origin_x,origin_y,dest_x,dest_y";
inline constexpr const char* kRequestHeader =
    "timestamp,origin_x,origin_y,dest_x,dest_y,id,origin_node,dest_node,"
    "request_time_s,direct_distance_m,direct_time_s";

inline std::vector<RawTrip> read_raw_trips(std::istream& in) {
  std::vector<RawTrip> trips;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto f = detail::split_csv(line);
    if (!header_seen) {
      if (line.find("timestamp") != std::string::npos) {
        if (f != detail::split_csv(kTripHeader))
          throw ConfigError("trips header must be '" + std::string(kTripHeader) + "'");
        header_seen = true;
        continue;
      }
      header_seen = true;  // headerless files are accepted
    }
    const std::string ctx = "trips record " + std::to_string(trips.size());
    if (f.size() != 5) throw ConfigError(ctx + ": expected 5 fields");
    trips.push_back({detail::parse_double(f[0], ctx),
                     detail::parse_double(f[1], ctx),
                     detail::parse_double(f[2], ctx),
                     detail::parse_double(f[3], ctx),
                     detail::parse_double(f[4], ctx)});
  }
  return trips;
}

inline void write_requests(std::ostream& out, const std::vector<Request>& requests,
                           const RoadGraph& g) {
  out << kRequestHeader << "\n";
  for (const Request& r : requests) {
    const auto [ox, oy] = g.coord(r.origin);
    const auto [dx, dy] = g.coord(r.destination);
    out << fmt(r.request_time) << ',' << fmt(ox) << ',' << fmt(oy) << ','
        << fmt(dx) << ',' << fmt(dy) << ',' << r.id << ',' << r.origin << ','
        << r.destination << ',' << fmt(r.request_time) << ','
        << fmt(r.direct_distance) << ',' << fmt(r.direct_time) << "\n";
  }
}

/// Reads a request table (as written by write_requests); network distances
/// and times are recomputed from the graph and validated.
inline std::vector<Request> read_requests(std::istream& in, const RoadGraph& g,
                                          const DistanceOracle& oracle,
                                          double speed) {
  std::vector<Request> out;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (detail::split_csv(line) != detail::split_csv(kRequestHeader))
        throw ConfigError("requests header must be '" +
                          std::string(kRequestHeader) + "'");
      header_seen = true;
      continue;
    }
    const auto f = detail::split_csv(line);
    const std::string ctx = "request record " + std::to_string(out.size());
    if (f.size() != 11) throw ConfigError(ctx + ": expected 11 fields");
    Request r;
    r.id = detail::parse_int(f[5], ctx);
    const std::int64_t onode = detail::parse_int(f[6], ctx);
    const std::int64_t dnode = detail::parse_int(f[7], ctx);
    if (onode < 0 || dnode < 0 ||
        !g.valid(static_cast<NodeId>(onode)) || !g.valid(static_cast<NodeId>(dnode)))
      throw ConfigError(ctx + ": node id out of range");
    r.origin = static_cast<NodeId>(onode);
    r.destination = static_cast<NodeId>(dnode);
    if (r.origin == r.destination)
      throw ConfigError(ctx + ": origin equals destination");
    r.request_time = detail::parse_double(f[8], ctx);
    r.direct_distance = oracle.distance(r.origin, r.destination);
    if (r.direct_distance <= kMinTripDistance)
      throw ConfigError(ctx + ": trip shorter than the 500 m minimum");
    r.direct_time = r.direct_distance / speed;
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simulation outputs
// ---------------------------------------------------------------------------

inline void write_series(std::ostream& out, const SimReport& report) {
  out << "step,time_s,mean_scheduled\n";
  for (std::size_t i = 0; i < report.step_occupancy.size(); ++i)
    out << i << ',' << fmt(static_cast<double>(i) * report.delta) << ','
        << fmt(report.step_occupancy[i]) << "\n";
}

inline void write_events_header(std::ostream& out) {
  out << "time_s,vehicle_id,event,request_id,node\n";
}

inline void write_event(std::ostream& out, const LifecycleEvent& ev) {
  out << fmt(ev.time) << ',' << ev.vehicle_id << ','
      << (ev.kind == EventKind::PickedUp ? "picked_up" : "dropped_off") << ','
      << ev.request_id << ',' << ev.node << "\n";
}

inline json report_to_json(const SimReport& r) {
  json j;
  j["occupancy"] = r.occupancy;
  j["service_rate"] = r.service_rate;
  j["service_rate_defined"] = r.service_rate_defined;
  j["mean_service_time_s"] = r.mean_service_time;
  j["mean_pickup_time_s"] = r.mean_pickup_time;
  j["max_pickup_time_s"] = r.max_pickup_time;
  j["mean_trip_distance_m"] = r.mean_trip_distance;
  j["arrival_rate_realized_per_s"] = r.arrival_rate_realized;
  j["u"] = r.u;
  j["counts"] = {{"admitted", r.admitted},
                 {"served", r.served},
                 {"expired", r.expired},
                 {"in_flight", r.in_flight},
                 {"admitted_post_warmup", r.admitted_pw},
                 {"served_post_warmup", r.served_pw},
                 {"expired_post_warmup", r.expired_pw}};
  j["pickup_histogram"] = {{"bin_width_s", r.pickup_histogram.bin_width},
                           {"counts", r.pickup_histogram.counts}};
  j["fleet_size"] = r.fleet_size;
  j["capacity"] = r.capacity;
  j["delta_s"] = r.delta;
  j["horizon_s"] = r.horizon;
  j["warmup_s"] = r.warmup;
  j["speed_mps"] = r.speed;
  return j;
}

inline constexpr const char* kSweepHeader =
    "arrival_rate,fleet_size,capacity,seed,u,occupancy,service_rate,"
    "mean_service_time_s,mean_pickup_time_s,max_pickup_time_s,"
    "mean_trip_distance_m,x,arrival_rate_realized,admitted,served,expired,"
    "in_flight,admitted_pw,served_pw,expired_pw,error";

inline void write_sweep_table(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << "\n";
  for (const SweepRow& row : rows) {
    out << fmt(row.arrival_rate) << ',' << row.fleet_size << ','
        << row.capacity << ',' << row.seed << ',';
    if (row.report) {
      const SimReport& r = *row.report;
      const double x =
          r.mean_trip_distance > 0.0
              ? laws::normalized_load(r.arrival_rate_realized,
                                      r.mean_trip_distance,
                                      static_cast<double>(row.fleet_size), r.speed)
              : 0.0;
      out << fmt(r.u) << ',' << fmt(r.occupancy) << ',' << fmt(r.service_rate)
          << ',' << fmt(r.mean_service_time) << ',' << fmt(r.mean_pickup_time)
          << ',' << fmt(r.max_pickup_time) << ',' << fmt(r.mean_trip_distance)
          << ',' << fmt(x) << ',' << fmt(r.arrival_rate_realized) << ','
          << r.admitted << ',' << r.served << ',' << r.expired << ','
          << r.in_flight << ',' << r.admitted_pw << ',' << r.served_pw << ','
          << r.expired_pw << ',';
    } else {
      out << ",,,,,,,,,,,,,,,,";
    }
    out << row.error << "\n";
  }
}

/// Reads back the sweep table as validation points (failed rows skipped).
inline std::vector<laws::SweepPoint> read_sweep_points(std::istream& in) {
  std::vector<laws::SweepPoint> points;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (detail::split_csv(line) != detail::split_csv(kSweepHeader))
        throw ConfigError("sweep table header mismatch");
      header_seen = true;
      continue;
    }
    const auto f = detail::split_csv(line);
    const std::string ctx = "sweep row " + std::to_string(points.size());
    if (f.size() != detail::split_csv(kSweepHeader).size())
      throw ConfigError(ctx + ": wrong field count");
    if (f[4].empty()) continue;  // failed run
    laws::SweepPoint p;
    p.arrival_rate = detail::parse_double(f[0], ctx);
    p.fleet_size = static_cast<int>(detail::parse_int(f[1], ctx));
    p.capacity = static_cast<int>(detail::parse_int(f[2], ctx));
    p.u = detail::parse_double(f[4], ctx);
    p.occupancy = detail::parse_double(f[5], ctx);
    p.service_rate = detail::parse_double(f[6], ctx);
    p.mean_service_time = detail::parse_double(f[7], ctx);
    p.mean_trip_distance = detail::parse_double(f[10], ctx);
    p.x = detail::parse_double(f[11], ctx);
    points.push_back(p);
  }
  return points;
}

inline void write_residuals(std::ostream& out,
                            const std::vector<laws::ResidualRow>& rows) {
  out << "arrival_rate,fleet_size,capacity,u,measured,predicted,residual\n";
  for (const auto& r : rows)
    out << fmt(r.arrival_rate) << ',' << r.fleet_size << ',' << r.capacity
        << ',' << fmt(r.u) << ',' << fmt(r.measured) << ',' << fmt(r.predicted)
        << ',' << fmt(r.residual) << "\n";
}

inline void write_fit_summary(std::ostream& out,
                              const laws::ValidationReport& report) {
  out << "scope,r2,mse,rmse,mae,mape_pct\n";
  auto line = [&](const std::string& scope, const laws::FitResult& f) {
    out << scope << ',' << fmt(f.r2) << ',' << fmt(f.mse) << ',' << fmt(f.rmse)
        << ',' << fmt(f.mae) << ',' << fmt(f.mape * 100.0) << "\n";
  };
  line("all", report.overall);
  for (const auto& [capacity, fit] : report.per_capacity)
    line("C=" + std::to_string(capacity), fit);
}

inline void write_law_curves(std::ostream& out, const std::vector<int>& capacities,
                             double u_max, double du = 0.05) {
  out << "capacity,u,occupancy_law,service_rate_law\n";
  for (int c : capacities) {
    for (double u = 0.0; u <= u_max + 1e-9; u += du)
      out << c << ',' << fmt(u) << ',' << fmt(laws::predicted_occupancy(u, c))
          << ',' << fmt(laws::predicted_service_rate(u, c)) << "\n";
  }
}

inline void write_u_vs_x(std::ostream& out,
                         const std::vector<laws::SweepPoint>& points,
                         double detour_ratio_cap, double network_complexity) {
  out << "arrival_rate,fleet_size,capacity,x,predictor,u\n";
  for (const auto& p : points) {
    const double z = laws::approximate_load(p.x, detour_ratio_cap,
                                            network_complexity, p.capacity);
    out << fmt(p.arrival_rate) << ',' << p.fleet_size << ',' << p.capacity
        << ',' << fmt(p.x) << ',' << fmt(z) << ',' << fmt(p.u) << "\n";
  }
}

// ---------------------------------------------------------------------------
// Run configuration (JSON document with sections; unknown keys rejected)
// ---------------------------------------------------------------------------

struct GridSpec {
  int rows = 0;
  int cols = 0;
  double spacing = 0.0;
};

struct LoadedConfig {
  SimConfig sim;
  std::string network_path;          // exclusive with grid
  std::optional<GridSpec> grid;
  std::string requests_path;         // demand from file when non-empty
};

namespace detail {

inline void check_known_keys(const json& obj, const std::string& where,
                             const std::vector<std::string>& known) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("config field '" + where + key + "' is not recognized");
  }
}

template <typename T>
T get_field(const json& obj, const std::string& where, const std::string& key,
            std::optional<T> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError("config field '" + where + key + "' is required");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config field '" + where + key + "' has the wrong type");
  }
}

}  // namespace detail

inline LoadedConfig parse_config(const json& doc) {
  LoadedConfig out;
  detail::check_known_keys(doc, "", {"network", "sim", "fleet", "constraints",
                                     "demand", "network_complexity"});

  if (!doc.contains("network"))
    throw ConfigError("config field 'network' is required");
  const json& net = doc.at("network");
  if (net.is_string()) {
    out.network_path = net.get<std::string>();
  } else if (net.is_object()) {
    detail::check_known_keys(net, "network.", {"grid"});
    const json& grid = net.at("grid");
    detail::check_known_keys(grid, "network.grid.", {"rows", "cols", "spacing_m"});
    GridSpec gs;
    gs.rows = detail::get_field<int>(grid, "network.grid.", "rows");
    gs.cols = detail::get_field<int>(grid, "network.grid.", "cols");
    gs.spacing = detail::get_field<double>(grid, "network.grid.", "spacing_m");
    out.grid = gs;
  } else {
    throw ConfigError("config field 'network' must be a path or {\"grid\": ...}");
  }

  const json sim = doc.value("sim", json::object());
  detail::check_known_keys(sim, "sim.",
                           {"delta_s", "horizon_s", "warmup_s", "seed",
                            "routing_mode", "exclude_inflight",
                            "allow_reassignment", "request_value"});
  out.sim.delta = detail::get_field<double>(sim, "sim.", "delta_s",
                                            std::optional<double>(2.0));
  out.sim.horizon = detail::get_field<double>(sim, "sim.", "horizon_s",
                                              std::optional<double>(7200.0));
  out.sim.warmup = detail::get_field<double>(sim, "sim.", "warmup_s",
                                             std::optional<double>(-1.0));
  out.sim.seed = detail::get_field<std::uint64_t>(
      sim, "sim.", "seed", std::optional<std::uint64_t>(0));
  const std::string mode = detail::get_field<std::string>(
      sim, "sim.", "routing_mode", std::optional<std::string>("auto"));
  if (mode == "auto")
    out.sim.routing_mode = RoutingMode::Auto;
  else if (mode == "exhaustive")
    out.sim.routing_mode = RoutingMode::Exhaustive;
  else if (mode == "nn")
    out.sim.routing_mode = RoutingMode::NearestNeighbor;
  else
    throw ConfigError("config field 'sim.routing_mode' must be auto, exhaustive or nn");
  out.sim.exclude_inflight_from_denominator = detail::get_field<bool>(
      sim, "sim.", "exclude_inflight", std::optional<bool>(true));
  out.sim.allow_reassignment = detail::get_field<bool>(
      sim, "sim.", "allow_reassignment", std::optional<bool>(false));
  out.sim.request_value = detail::get_field<double>(
      sim, "sim.", "request_value", std::optional<double>(-1.0));

  if (!doc.contains("fleet")) throw ConfigError("config field 'fleet' is required");
  const json& fleet = doc.at("fleet");
  detail::check_known_keys(fleet, "fleet.", {"size", "capacity", "speed_mps", "seed"});
  out.sim.fleet.fleet_size = detail::get_field<int>(fleet, "fleet.", "size");
  out.sim.fleet.capacity = detail::get_field<int>(fleet, "fleet.", "capacity");
  out.sim.fleet.speed = detail::get_field<double>(fleet, "fleet.", "speed_mps");

  const json cons = doc.value("constraints", json::object());
  detail::check_known_keys(cons, "constraints.",
                           {"max_pickup_time_s", "max_detour_ratio",
                            "max_wait_time_s", "matching_radius_time_s"});
  out.sim.constraints.max_pickup_time = detail::get_field<double>(
      cons, "constraints.", "max_pickup_time_s", std::optional<double>(900.0));
  out.sim.constraints.max_detour_ratio = detail::get_field<double>(
      cons, "constraints.", "max_detour_ratio", std::optional<double>(0.5));
  out.sim.constraints.max_wait_time = detail::get_field<double>(
      cons, "constraints.", "max_wait_time_s", std::optional<double>(300.0));
  out.sim.constraints.matching_radius_time = detail::get_field<double>(
      cons, "constraints.", "matching_radius_time_s", std::optional<double>(900.0));

  if (!doc.contains("demand")) throw ConfigError("config field 'demand' is required");
  const json& demand = doc.at("demand");
  detail::check_known_keys(demand, "demand.",
                           {"arrival_rate_per_s", "od", "hotspot", "requests_file"});
  if (demand.contains("requests_file")) {
    out.requests_path = detail::get_field<std::string>(demand, "demand.", "requests_file");
    if (demand.contains("arrival_rate_per_s") || demand.contains("od"))
      throw ConfigError("config field 'demand' mixes requests_file with synthetic options");
  } else {
    DemandConfig dc;
    dc.arrival_rate =
        detail::get_field<double>(demand, "demand.", "arrival_rate_per_s");
    dc.horizon = out.sim.horizon;
    const std::string od = detail::get_field<std::string>(
        demand, "demand.", "od", std::optional<std::string>("uniform"));
    if (od == "uniform") {
      dc.od = OdDistribution::uniform();
    } else if (od == "hotspot") {
      const json hs = demand.value("hotspot", json::object());
      detail::check_known_keys(hs, "demand.hotspot.", {"center_x", "center_y", "sigma_m"});
      dc.od = OdDistribution::hotspot(
          detail::get_field<double>(hs, "demand.hotspot.", "center_x"),
          detail::get_field<double>(hs, "demand.hotspot.", "center_y"),
          detail::get_field<double>(hs, "demand.hotspot.", "sigma_m"));
    } else {
      throw ConfigError("config field 'demand.od' must be uniform or hotspot");
    }
    out.sim.demand = dc;
  }

  out.sim.network_complexity = detail::get_field<double>(
      doc, "", "network_complexity", std::optional<double>(0.0));
  return out;
}

inline LoadedConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& ex) {
    throw ConfigError("config file '" + path + "': " + ex.what());
  }
  return parse_config(doc);
}

/// Fully resolved settings, serialized next to every output set.
inline json manifest_json(const LoadedConfig& loaded, const std::string& command,
                          const json& extras = json::object()) {
  const SimConfig resolved = loaded.sim.resolved();
  json j;
  j["tool"] = "ridepool";
  j["version"] = kVersion;
  j["command"] = command;
  j["seed"] = resolved.seed;
  json net;
  if (loaded.grid) {
    net["grid"] = {{"rows", loaded.grid->rows},
                   {"cols", loaded.grid->cols},
                   {"spacing_m", loaded.grid->spacing}};
  } else {
    net = loaded.network_path;
  }
  j["network"] = net;
  j["sim"] = {{"delta_s", resolved.delta},
              {"horizon_s", resolved.horizon},
              {"warmup_s", resolved.warmup},
              {"seed", resolved.seed},
              {"routing_mode",
               resolved.routing_mode == RoutingMode::Auto
                   ? "auto"
                   : (resolved.routing_mode == RoutingMode::Exhaustive
                          ? "exhaustive"
                          : "nn")},
              {"exclude_inflight", resolved.exclude_inflight_from_denominator},
              {"allow_reassignment", resolved.allow_reassignment},
              {"request_value", resolved.request_value}};
  j["fleet"] = {{"size", resolved.fleet.fleet_size},
                {"capacity", resolved.fleet.capacity},
                {"speed_mps", resolved.fleet.speed}};
  j["constraints"] = {
      {"max_pickup_time_s", resolved.constraints.max_pickup_time},
      {"max_detour_ratio", resolved.constraints.max_detour_ratio},
      {"max_wait_time_s", resolved.constraints.max_wait_time},
      {"matching_radius_time_s", resolved.constraints.matching_radius_time}};
  if (resolved.demand) {
    json d;
    d["arrival_rate_per_s"] = resolved.demand->arrival_rate;
    switch (resolved.demand->od.kind) {
      case OdDistribution::Kind::Uniform:
        d["od"] = "uniform";
        break;
      case OdDistribution::Kind::Hotspot:
        d["od"] = "hotspot";
        d["hotspot"] = {{"center_x", resolved.demand->od.center_x},
                        {"center_y", resolved.demand->od.center_y},
                        {"sigma_m", resolved.demand->od.sigma}};
        break;
      case OdDistribution::Kind::Explicit:
        d["od"] = "explicit";
        break;
    }
    j["demand"] = d;
  } else {
    j["demand"] = {{"requests_file", loaded.requests_path}};
  }
  j["network_complexity"] = resolved.network_complexity;
  for (const auto& [key, value] : extras.items()) j[key] = value;
  return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ridepool::io
