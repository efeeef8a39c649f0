// Command-line front end: network/demand generation, single simulation runs,
// sweeps with law validation, and re-validation of existing sweep tables.
// All outputs are delimited/structured text with stable column contracts
// (see README).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ridepool/ridepool.hpp"

namespace fs = std::filesystem;
using namespace ridepool;

namespace {

struct GridFlag {
  int rows = 0;
  int cols = 0;
};

GridFlag parse_grid(const std::string& spec) {
  const auto x = spec.find('x');
  if (x == std::string::npos || x == 0 || x + 1 == spec.size())
    throw io::ConfigError("--grid expects ROWSxCOLS, e.g. 20x20");
  GridFlag g;
  try {
    g.rows = std::stoi(spec.substr(0, x));
    g.cols = std::stoi(spec.substr(x + 1));
  } catch (const std::logic_error&) {
    throw io::ConfigError("--grid expects ROWSxCOLS, e.g. 20x20");
  }
  return g;
}

RoadGraph load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io::ConfigError("cannot open network file '" + path + "'");
  return load_graph(in);
}

RoadGraph network_from_config(const io::LoadedConfig& cfg) {
  if (cfg.grid)
    return generate_grid(cfg.grid->rows, cfg.grid->cols, cfg.grid->spacing);
  return load_network_file(cfg.network_path);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "'");
}

std::string trip_ids(const Trip& trip) {
  std::string s;
  for (std::size_t i = 0; i < trip.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(trip[i]);
  }
  return s;
}

int cmd_gen_network(const std::string& grid_spec, double spacing,
                    const std::string& out_path) {
  const GridFlag gf = parse_grid(grid_spec);
  const RoadGraph g = generate_grid(gf.rows, gf.cols, spacing);
  std::ostringstream buf;
  write_graph(buf, g);
  io::write_text_file(out_path, buf.str());
  std::cout << "wrote " << g.node_count() << " nodes, " << g.edge_count()
            << " edges to " << out_path << "\n";
  return 0;
}

struct GenDemandArgs {
  std::string network;
  std::string out;
  std::string trips;        // raw trip records to filter
  std::vector<double> area; // minx,miny,maxx,maxy
  double rate = 0.0;
  double horizon = 0.0;
  double interval = 2.0;
  double speed = 6.0;
  std::string od = "uniform";
  std::vector<double> hotspot_center;
  double hotspot_sigma = 0.0;
  std::uint64_t seed = 0;
  double subsample_rate = 1.0;
  std::uint64_t subsample_seed = 0;
};

int cmd_gen_demand(const GenDemandArgs& a) {
  const RoadGraph g = load_network_file(a.network);
  const DistanceOracle oracle(g);
  std::vector<Request> requests;
  if (!a.trips.empty()) {
    if (a.area.size() != 4)
      throw io::ConfigError("--trips requires --area minx,miny,maxx,maxy");
    std::ifstream in(a.trips);
    if (!in) throw io::ConfigError("cannot open trips file '" + a.trips + "'");
    const auto raw = io::read_raw_trips(in);
    const BoundingBox box{a.area[0], a.area[1], a.area[2], a.area[3]};
    requests = filter_trips(raw, g, oracle, a.interval, box, a.speed);
  } else {
    if (!(a.rate > 0.0) || !(a.horizon > 0.0))
      throw io::ConfigError("synthetic demand requires --rate and --horizon");
    DemandConfig dc;
    dc.arrival_rate = a.rate;
    dc.horizon = a.horizon;
    dc.seed = a.seed;
    if (a.od == "uniform") {
      dc.od = OdDistribution::uniform();
    } else if (a.od == "hotspot") {
      if (a.hotspot_center.size() != 2 || !(a.hotspot_sigma > 0.0))
        throw io::ConfigError(
            "--od hotspot requires --hotspot-center X,Y and --hotspot-sigma");
      dc.od = OdDistribution::hotspot(a.hotspot_center[0], a.hotspot_center[1],
                                      a.hotspot_sigma);
    } else {
      throw io::ConfigError("--od must be uniform or hotspot");
    }
    requests = generate_poisson(dc, g, oracle, a.interval, a.speed);
  }
  if (a.subsample_rate < 1.0)
    requests = subsample(requests, a.subsample_rate, a.subsample_seed);
  std::ostringstream buf;
  io::write_requests(buf, requests, g);
  io::write_text_file(a.out, buf.str());
  std::cout << "wrote " << requests.size() << " requests to " << a.out << "\n";
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 bool trace, bool rtv_dump) {
  const io::LoadedConfig loaded = io::load_config_file(config_path);
  const RoadGraph g = network_from_config(loaded);
  const DistanceOracle oracle(g);

  SimConfig cfg = loaded.sim;
  if (!loaded.requests_path.empty()) {
    std::ifstream in(loaded.requests_path);
    if (!in)
      throw io::ConfigError("cannot open requests file '" +
                            loaded.requests_path + "'");
    cfg.requests = io::read_requests(in, g, oracle, cfg.fleet.speed);
  }

  ensure_dir(out_dir);
  std::ostringstream events;
  EventSink event_sink;
  if (trace) {
    io::write_events_header(events);
    event_sink = [&events](const LifecycleEvent& ev) {
      io::write_event(events, ev);
    };
  }
  std::ostringstream rtv_log;
  RtvSink rtv_sink;
  if (rtv_dump) {
    rtv_log << "time_s,vehicle_id,trip,value,chosen\n";
    rtv_sink = [&rtv_log](double now, const RtvGraph& rtv,
                          const AssignmentSolution& sol) {
      std::vector<char> chosen(rtv.edges.size(), 0);
      for (std::size_t e : sol.chosen) chosen[e] = 1;
      for (std::size_t i = 0; i < rtv.edges.size(); ++i) {
        const RtvEdge& e = rtv.edges[i];
        rtv_log << io::fmt(now) << ',' << e.vehicle_id << ','
                << trip_ids(e.trip) << ',' << io::fmt(e.value) << ','
                << int(chosen[i]) << "\n";
      }
    };
  }

  const SimReport report = run(cfg, g, oracle, event_sink, rtv_sink);

  io::write_text_file((fs::path(out_dir) / "summary.json").string(),
                      io::report_to_json(report).dump(2) + "\n");
  std::ostringstream series;
  io::write_series(series, report);
  io::write_text_file((fs::path(out_dir) / "series.csv").string(), series.str());
  if (trace)
    io::write_text_file((fs::path(out_dir) / "events.csv").string(),
                        events.str());
  if (rtv_dump)
    io::write_text_file((fs::path(out_dir) / "rtv_log.csv").string(),
                        rtv_log.str());
  io::json extras;
  extras["config_file"] = config_path;
  extras["output_dir"] = out_dir;
  io::write_text_file(
      (fs::path(out_dir) / "manifest.json").string(),
      io::manifest_json(loaded, "simulate", extras).dump(2) + "\n");

  std::cout << "u=" << io::fmt(report.u)
            << " occupancy=" << io::fmt(report.occupancy)
            << " service_rate=" << io::fmt(report.service_rate)
            << " served=" << report.served << "/" << report.admitted << "\n";
  return 0;
}

template <typename T>
std::vector<T> dedupe(const std::vector<T>& values, const char* axis) {
  std::vector<T> out;
  for (const T& v : values) {
    if (std::find(out.begin(), out.end(), v) == out.end())
      out.push_back(v);
    else
      std::cerr << "warning: duplicate " << axis << " value ignored\n";
  }
  return out;
}

int cmd_sweep(const std::string& config_path, std::vector<double> rates,
              std::vector<int> fleets, std::vector<int> capacities,
              const std::string& out_dir, int jobs) {
  const io::LoadedConfig loaded = io::load_config_file(config_path);
  if (!loaded.sim.demand)
    throw io::ConfigError("sweep requires synthetic demand in the config");
  const RoadGraph g = network_from_config(loaded);
  const DistanceOracle oracle(g);

  rates = dedupe(rates, "rate");
  fleets = dedupe(fleets, "fleet");
  capacities = dedupe(capacities, "capacity");
  if (fleets.empty()) fleets = {loaded.sim.fleet.fleet_size};
  if (capacities.empty()) capacities = {loaded.sim.fleet.capacity};
  if (rates.empty()) throw io::ConfigError("--rates must be non-empty");

  const auto rows = sweep(loaded.sim, rates, fleets, capacities, g, oracle, jobs);
  const auto points = sweep_points(rows);

  ensure_dir(out_dir);
  std::ostringstream table;
  io::write_sweep_table(table, rows);
  io::write_text_file((fs::path(out_dir) / "sweep.csv").string(), table.str());

  io::json extras;
  extras["config_file"] = config_path;
  extras["output_dir"] = out_dir;
  extras["rates"] = rates;
  extras["fleets"] = fleets;
  extras["capacities"] = capacities;
  io::write_text_file((fs::path(out_dir) / "manifest.json").string(),
                      io::manifest_json(loaded, "sweep", extras).dump(2) + "\n");

  double u_max = 1.0;
  for (const auto& p : points) u_max = std::max(u_max, p.u);
  std::ostringstream curves;
  io::write_law_curves(curves, capacities, u_max * 1.05);
  io::write_text_file((fs::path(out_dir) / "law_curves.csv").string(),
                      curves.str());

  const double r_dt = loaded.sim.constraints.max_detour_ratio;
  const double T = loaded.sim.network_complexity;
  std::ostringstream ux;
  io::write_u_vs_x(ux, points, r_dt, T);
  io::write_text_file((fs::path(out_dir) / "u_vs_x.csv").string(), ux.str());

  bool validations_ok = true;
  io::json fit_summary;
  try {
    const auto occ = laws::validate_sweep(points, laws::LawMetric::Occupancy);
    const auto srv = laws::validate_sweep(points, laws::LawMetric::ServiceRate);
    std::ostringstream occ_fit, srv_fit, occ_res, srv_res;
    io::write_fit_summary(occ_fit, occ);
    io::write_fit_summary(srv_fit, srv);
    io::write_residuals(occ_res, occ.residuals);
    io::write_residuals(srv_res, srv.residuals);
    io::write_text_file((fs::path(out_dir) / "fit_occupancy.csv").string(),
                        occ_fit.str());
    io::write_text_file((fs::path(out_dir) / "fit_service_rate.csv").string(),
                        srv_fit.str());
    io::write_text_file((fs::path(out_dir) / "residuals_occupancy.csv").string(),
                        occ_res.str());
    io::write_text_file(
        (fs::path(out_dir) / "residuals_service_rate.csv").string(),
        srv_res.str());
    const auto ufit = laws::fit_load_approximation(points, r_dt, T);
    fit_summary["occupancy_r2"] = occ.overall.r2;
    fit_summary["service_rate_r2"] = srv.overall.r2;
    fit_summary["u_approximation"] = {
        {"slope", ufit.slope}, {"r2", ufit.r2}, {"points", ufit.n}};
    io::write_text_file((fs::path(out_dir) / "fit_summary.json").string(),
                        fit_summary.dump(2) + "\n");
    std::cout << "occupancy R2=" << io::fmt(occ.overall.r2)
              << " service-rate R2=" << io::fmt(srv.overall.r2)
              << " u-approx R2=" << io::fmt(ufit.r2) << "\n";
  } catch (const std::exception& ex) {
    validations_ok = false;
    std::cerr << "validation failed: " << ex.what() << "\n";
  }

  std::size_t failures = 0;
  for (const auto& row : rows)
    if (!row.report) ++failures;
  if (failures)
    std::cerr << failures << " of " << rows.size() << " runs failed\n";
  return (failures == 0 && validations_ok) ? 0 : 1;
}

int cmd_validate(const std::string& sweep_path, const std::string& out_dir,
                 double r_dt, double T) {
  std::ifstream in(sweep_path);
  if (!in) throw io::ConfigError("cannot open sweep table '" + sweep_path + "'");
  const auto points = io::read_sweep_points(in);
  if (points.empty()) throw io::ConfigError("sweep table has no successful rows");

  const auto occ = laws::validate_sweep(points, laws::LawMetric::Occupancy);
  const auto srv = laws::validate_sweep(points, laws::LawMetric::ServiceRate);
  const auto ufit = laws::fit_load_approximation(points, r_dt, T);

  ensure_dir(out_dir);
  std::ostringstream occ_fit, srv_fit, occ_res, srv_res;
  io::write_fit_summary(occ_fit, occ);
  io::write_fit_summary(srv_fit, srv);
  io::write_residuals(occ_res, occ.residuals);
  io::write_residuals(srv_res, srv.residuals);
  io::write_text_file((fs::path(out_dir) / "fit_occupancy.csv").string(),
                      occ_fit.str());
  io::write_text_file((fs::path(out_dir) / "fit_service_rate.csv").string(),
                      srv_fit.str());
  io::write_text_file((fs::path(out_dir) / "residuals_occupancy.csv").string(),
                      occ_res.str());
  io::write_text_file((fs::path(out_dir) / "residuals_service_rate.csv").string(),
                      srv_res.str());
  io::json summary;
  summary["occupancy_r2"] = occ.overall.r2;
  summary["service_rate_r2"] = srv.overall.r2;
  summary["u_approximation"] = {
      {"slope", ufit.slope}, {"r2", ufit.r2}, {"points", ufit.n}};
  io::write_text_file((fs::path(out_dir) / "fit_summary.json").string(),
                      summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ridepool: dynamic ride-pooling simulator and scaling-law toolkit"};
  app.require_subcommand(1);

  // gen-network
  auto* gen_net = app.add_subcommand("gen-network", "Generate a grid network file");
  std::string grid_spec, net_out;
  double spacing = 100.0;
  gen_net->add_option("--grid", grid_spec, "Grid size ROWSxCOLS, e.g. 20x20")
      ->required();
  gen_net->add_option("--spacing", spacing, "Node spacing in meters");
  gen_net->add_option("--out", net_out, "Output network file")->required();

  // gen-demand
  auto* gen_dem = app.add_subcommand(
      "gen-demand", "Generate Poisson demand or filter raw trip records");
  GenDemandArgs da;
  gen_dem->add_option("--network", da.network, "Network file")->required();
  gen_dem->add_option("--out", da.out, "Output requests file")->required();
  gen_dem->add_option("--trips", da.trips,
                      "Raw trips CSV (timestamp,origin_x,origin_y,dest_x,dest_y)");
  gen_dem->add_option("--area", da.area, "Study area minx,miny,maxx,maxy")
      ->delimiter(',');
  gen_dem->add_option("--rate", da.rate, "Arrival rate, requests/second");
  gen_dem->add_option("--horizon", da.horizon, "Demand horizon, seconds");
  gen_dem->add_option("--interval", da.interval, "Matching interval, seconds");
  gen_dem->add_option("--speed", da.speed, "Vehicle speed, m/s");
  gen_dem->add_option("--od", da.od, "OD preset: uniform or hotspot");
  gen_dem->add_option("--hotspot-center", da.hotspot_center, "Hotspot center X,Y")
      ->delimiter(',');
  gen_dem->add_option("--hotspot-sigma", da.hotspot_sigma, "Hotspot spread, m");
  gen_dem->add_option("--seed", da.seed, "Demand seed");
  gen_dem->add_option("--subsample", da.subsample_rate, "Keep fraction (0,1]");
  gen_dem->add_option("--subsample-seed", da.subsample_seed, "Subsample seed");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run one simulation from a config");
  std::string sim_config, sim_out = "out";
  bool trace = false, rtv_dump = false;
  sim->add_option("--config", sim_config, "JSON config file")->required();
  sim->add_option("--out", sim_out, "Output directory");
  sim->add_flag("--trace", trace, "Write the vehicle event log");
  sim->add_flag("--rtv-dump", rtv_dump, "Write the per-step trip-vehicle graph");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Run a sweep and validate the laws");
  std::string sweep_config, sweep_out = "sweep_out";
  std::vector<double> rates;
  std::vector<int> fleets, capacities;
  int jobs = 0;
  sw->add_option("--config", sweep_config, "JSON config file")->required();
  sw->add_option("--rates", rates, "Arrival rates to sweep")
      ->delimiter(',')
      ->required();
  sw->add_option("--fleets", fleets, "Fleet sizes (default: config value)")
      ->delimiter(',');
  sw->add_option("--capacities", capacities,
                 "Vehicle capacities (default: config value)")
      ->delimiter(',');
  sw->add_option("--out", sweep_out, "Output directory");
  sw->add_option("--jobs", jobs, "Parallel runs (default: cores)");

  // validate
  auto* val = app.add_subcommand("validate", "Validate laws on a sweep table");
  std::string val_sweep, val_out = "validate_out";
  double val_rdt = 0.5, val_T = 0.0;
  val->add_option("--sweep", val_sweep, "sweep.csv from a previous sweep")
      ->required();
  val->add_option("--out", val_out, "Output directory");
  val->add_option("--r-dt", val_rdt, "Detour ratio cap used in the sweep");
  val->add_option("--T", val_T, "Network complexity");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_net->parsed()) return cmd_gen_network(grid_spec, spacing, net_out);
    if (gen_dem->parsed()) return cmd_gen_demand(da);
    if (sim->parsed()) return cmd_simulate(sim_config, sim_out, trace, rtv_dump);
    if (sw->parsed())
      return cmd_sweep(sweep_config, rates, fleets, capacities, sweep_out, jobs);
    if (val->parsed()) return cmd_validate(val_sweep, val_out, val_rdt, val_T);
  } catch (const io::ConfigError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
