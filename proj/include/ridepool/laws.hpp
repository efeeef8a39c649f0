#pragma once

// Closed-form performance laws for dynamic ride-pooling and the error
// metrics used to validate them against simulation sweeps: the dimensionless
// system load, piecewise occupancy/service-rate curves in that load, the
// linear remaining-capacity relation, the exogenous load approximation, and
// grouped goodness-of-fit measures.

#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ridepool::laws {

struct LoadInputs {
  double arrival_rate = 0.0;        // requests / second
  int fleet_size = 0;
  double mean_service_time = 0.0;   // seconds, assignment to dropoff
  double mean_trip_distance = 0.0;  // meters
  double speed = 0.0;               // meters / second
  double detour_ratio_cap = 0.0;
  double network_complexity = 0.0;  // >= 0, regular grids are 0
  int capacity = 0;

  void validate() const {
    if (!(arrival_rate > 0.0) || fleet_size < 1 || !(mean_service_time > 0.0) ||
        !(mean_trip_distance > 0.0) || !(speed > 0.0) ||
        !(detour_ratio_cap > 0.0) || network_complexity < 0.0 || capacity < 1)
      throw std::invalid_argument("invalid load inputs");
  }
};

/// Demand-to-supply ratio: arrivals per unit time over vehicles freed per
/// unit time.
inline double system_load(double arrival_rate, double fleet_size,
                          double mean_service_time) {
  if (!(arrival_rate > 0.0) || !(fleet_size > 0.0) || !(mean_service_time > 0.0))
    throw std::invalid_argument("system_load: inputs must be positive");
  return arrival_rate * mean_service_time / fleet_size;
}

/// Mean scheduled passengers per vehicle as a function of the system load:
/// u below saturation, then a hyperbolic approach to the capacity C.
inline double predicted_occupancy(double u, int capacity) {
  if (!(u >= 0.0)) throw std::invalid_argument("predicted_occupancy: u < 0");
  if (capacity < 1) throw std::invalid_argument("predicted_occupancy: C < 1");
  if (u <= 1.0) return u;
  return static_cast<double>(capacity) * u /
         (static_cast<double>(capacity) - 1.0 + u);
}

/// Fraction of requests served: 1 below saturation, then C / (C - 1 + u).
inline double predicted_service_rate(double u, int capacity) {
  if (!(u >= 0.0)) throw std::invalid_argument("predicted_service_rate: u < 0");
  if (capacity < 1) throw std::invalid_argument("predicted_service_rate: C < 1");
  if (u <= 1.0) return 1.0;
  return static_cast<double>(capacity) /
         (static_cast<double>(capacity) - 1.0 + u);
}

/// Slope of the linear service-rate / remaining-capacity relation.
inline double correlation_factor(int capacity) {
  if (capacity < 2)
    throw std::invalid_argument(
        "correlation_factor: needs capacity >= 2 (no sharing below)");
  return 1.0 / (static_cast<double>(capacity) - 1.0);
}

/// Service rate as a linear function of remaining capacity, clamped to [0,1].
inline double linear_remaining_capacity(int capacity, double occupancy) {
  if (capacity < 2)
    throw std::invalid_argument("linear_remaining_capacity: needs capacity >= 2");
  const double r = (static_cast<double>(capacity) - occupancy) /
                   (static_cast<double>(capacity) - 1.0);
  return r < 0.0 ? 0.0 : (r > 1.0 ? 1.0 : r);
}

/// Exogenous-only load: demanded distance per unit time over fleet distance
/// capacity per unit time.
inline double normalized_load(double arrival_rate, double mean_trip_distance,
                              double fleet_size, double speed) {
  if (!(arrival_rate >= 0.0) || !(mean_trip_distance > 0.0) ||
      !(fleet_size > 0.0) || !(speed > 0.0))
    throw std::invalid_argument("normalized_load: inputs must be positive");
  return arrival_rate * mean_trip_distance / (fleet_size * speed);
}

/// System-load approximation from exogenous variables only.
inline double approximate_load(double x, double detour_ratio_cap,
                               double network_complexity, int capacity) {
  if (!(x >= 0.0)) throw std::invalid_argument("approximate_load: x < 0");
  if (!(detour_ratio_cap > 0.0) || network_complexity < 0.0 || capacity < 1)
    throw std::invalid_argument("approximate_load: invalid parameters");
  return (detour_ratio_cap + network_complexity +
          std::cbrt(static_cast<double>(capacity))) *
         x;
}

struct FitResult {
  double r2 = 0.0;    // mean of per-scenario R^2
  double mse = 0.0;   // pooled
  double rmse = 0.0;
  double mae = 0.0;
  double mape = 0.0;  // fraction, not percent
};

/// Goodness of fit between observations and predictions, grouped into
/// scenarios: R^2 is computed per scenario and averaged, the other metrics
/// are pooled over all points. Throws when a scenario has fewer than two
/// points or zero variance (R^2 undefined) or an observation is zero (MAPE
/// undefined).
inline FitResult error_metrics(const std::vector<std::vector<double>>& observed,
                               const std::vector<std::vector<double>>& predicted) {
  if (observed.empty() || observed.size() != predicted.size())
    throw std::invalid_argument("error_metrics: scenario shape mismatch");
  double r2_sum = 0.0, sq_sum = 0.0, abs_sum = 0.0, ape_sum = 0.0;
  std::size_t n_points = 0;
  for (std::size_t f = 0; f < observed.size(); ++f) {
    const auto& y = observed[f];
    const auto& yhat = predicted[f];
    if (y.size() != yhat.size())
      throw std::invalid_argument("error_metrics: point count mismatch");
    if (y.size() < 2)
      throw std::invalid_argument("error_metrics: scenario needs >= 2 points");
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double e = y[i] - yhat[i];
      ss_res += e * e;
      ss_tot += (y[i] - mean) * (y[i] - mean);
      sq_sum += e * e;
      abs_sum += std::abs(e);
      if (y[i] == 0.0)
        throw std::invalid_argument("error_metrics: zero observation, MAPE undefined");
      ape_sum += std::abs(e / y[i]);
      ++n_points;
    }
    if (ss_tot == 0.0)
      throw std::invalid_argument("error_metrics: zero variance, R^2 undefined");
    r2_sum += 1.0 - ss_res / ss_tot;
  }
  FitResult fit;
  fit.r2 = r2_sum / static_cast<double>(observed.size());
  fit.mse = sq_sum / static_cast<double>(n_points);
  fit.rmse = std::sqrt(fit.mse);
  fit.mae = abs_sum / static_cast<double>(n_points);
  fit.mape = ape_sum / static_cast<double>(n_points);
  return fit;
}

/// One sweep observation, as produced by the simulation engine.
struct SweepPoint {
  double arrival_rate = 0.0;  // configured requests / second
  int fleet_size = 0;
  int capacity = 0;
  double u = 0.0;      // measured system load
  double occupancy = 0.0;
  double service_rate = 0.0;
  double mean_service_time = 0.0;
  double mean_trip_distance = 0.0;
  double x = 0.0;      // measured normalized load
};

enum class LawMetric { Occupancy, ServiceRate };

struct ResidualRow {
  double arrival_rate = 0.0;
  int fleet_size = 0;
  int capacity = 0;
  double u = 0.0;
  double measured = 0.0;
  double predicted = 0.0;
  double residual = 0.0;
};

struct ValidationReport {
  FitResult overall;                      // scenarios = (capacity, fleet) groups
  std::map<int, FitResult> per_capacity;  // scenarios = fleet sizes
  std::vector<ResidualRow> residuals;
};

/// Pairs each measured point with the law's prediction at the measured load
/// and evaluates fit quality, grouping points into scenarios by fleet size
/// within each capacity.
inline ValidationReport validate_sweep(const std::vector<SweepPoint>& points,
                                       LawMetric which) {
  if (points.empty())
    throw std::invalid_argument("validate_sweep: no points");
  ValidationReport report;
  // capacity -> fleet -> (observed, predicted)
  std::map<int, std::map<int, std::pair<std::vector<double>, std::vector<double>>>>
      groups;
  for (const SweepPoint& p : points) {
    const double measured =
        which == LawMetric::Occupancy ? p.occupancy : p.service_rate;
    const double predicted = which == LawMetric::Occupancy
                                 ? predicted_occupancy(p.u, p.capacity)
                                 : predicted_service_rate(p.u, p.capacity);
    auto& [obs, pred] = groups[p.capacity][p.fleet_size];
    obs.push_back(measured);
    pred.push_back(predicted);
    report.residuals.push_back({p.arrival_rate, p.fleet_size, p.capacity, p.u,
                                measured, predicted, measured - predicted});
  }
  std::vector<std::vector<double>> all_obs, all_pred;
  for (const auto& [capacity, fleets] : groups) {
    std::vector<std::vector<double>> c_obs, c_pred;
    for (const auto& [fleet, series] : fleets) {
      c_obs.push_back(series.first);
      c_pred.push_back(series.second);
      all_obs.push_back(series.first);
      all_pred.push_back(series.second);
    }
    report.per_capacity.emplace(capacity, error_metrics(c_obs, c_pred));
  }
  report.overall = error_metrics(all_obs, all_pred);
  return report;
}

struct OriginFit {
  double slope = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

/// Least-squares line through the origin for measured u against the
/// exogenous predictor (r_dt + T + cbrt(C)) * x; R^2 is computed about the
/// mean of u.
inline OriginFit fit_load_approximation(const std::vector<SweepPoint>& points,
                                        double detour_ratio_cap,
                                        double network_complexity) {
  if (points.size() < 2)
    throw std::invalid_argument("fit_load_approximation: needs >= 2 points");
  double zz = 0.0, zu = 0.0, u_mean = 0.0;
  for (const SweepPoint& p : points) {
    const double z = approximate_load(p.x, detour_ratio_cap,
                                      network_complexity, p.capacity);
    zz += z * z;
    zu += z * p.u;
    u_mean += p.u;
  }
  if (!(zz > 0.0))
    throw std::invalid_argument("fit_load_approximation: degenerate predictor");
  u_mean /= static_cast<double>(points.size());
  OriginFit fit;
  fit.slope = zu / zz;
  fit.n = points.size();
  double ss_res = 0.0, ss_tot = 0.0;
  for (const SweepPoint& p : points) {
    const double z = approximate_load(p.x, detour_ratio_cap,
                                      network_complexity, p.capacity);
    const double e = p.u - fit.slope * z;
    ss_res += e * e;
    ss_tot += (p.u - u_mean) * (p.u - u_mean);
  }
  if (ss_tot == 0.0)
    throw std::invalid_argument("fit_load_approximation: zero variance in u");
  fit.r2 = 1.0 - ss_res / ss_tot;
  return fit;
}

}  // namespace ridepool::laws
