#include "tees/devices.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "tees/error.hpp"

namespace tees {

void GeneratorModel::validate() const {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidConfig, "generator alpha must be positive");
  if (c0 < 0.0) throw Error(ErrorCode::InvalidConfig, "generator no-load cost must be >= 0");
  if (!(unit_capacity_kw > 0.0) || unit_capacity_kw > p_max_kw) {
    throw Error(ErrorCode::InvalidConfig, "generator unit capacity must lie in (0, p_max]");
  }
  if (!(fuel_efficiency_kwh_per_gal > 0.0)) throw Error(ErrorCode::InvalidConfig, "fuel efficiency must be positive");
}

void BatteryModel::validate() const {
  if (!(capacity_kwh > 0.0)) throw Error(ErrorCode::InvalidConfig, "battery capacity must be positive");
  if (!(eta > 0.0 && eta <= 1.0)) throw Error(ErrorCode::InvalidConfig, "battery efficiency must be in (0, 1]");
  if (!(soc_min >= 0.0 && soc_min < soc_max && soc_max <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "battery SoC limits must satisfy 0 <= min < max <= 1");
  }
  if (soc_init < soc_min || soc_init > soc_max) throw Error(ErrorCode::InvalidConfig, "initial SoC outside limits");
  if (p_max_kw < 0.0) throw Error(ErrorCode::InvalidConfig, "battery power must be >= 0");
}

void HouseThermalParams::validate() const {
  if (!(c_a > 0.0 && c_m > 0.0 && u_a > 0.0 && h_m > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "house thermal parameters must be positive");
  }
  if (q_oil_max < 0.0) throw Error(ErrorCode::InvalidConfig, "oil heater capacity must be >= 0");
}

CopCurve::CopCurve(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
  if (points_.empty()) throw Error(ErrorCode::InvalidConfig, "COP curve needs at least one point");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i].second > 0.0)) throw Error(ErrorCode::InvalidConfig, "COP must be positive");
    if (i > 0 && !(points_[i].first > points_[i - 1].first)) {
      throw Error(ErrorCode::InvalidConfig, "COP temperatures must be strictly increasing");
    }
    if (i > 0 && points_[i].second < points_[i - 1].second) {
      throw Error(ErrorCode::InvalidConfig, "COP must be non-decreasing in temperature");
    }
  }
}

double generator_cost(const GeneratorModel& g, double p_g) {
  if (p_g < 0.0 || p_g > g.p_max_kw) {
    throw Error(ErrorCode::OutOfRange, "generator output " + std::to_string(p_g) + " kW outside [0, " +
                                           std::to_string(g.p_max_kw) + "]");
  }
  return g.alpha * p_g + g.c0;
}

CostFit fit_cost_curve(const std::vector<std::pair<double, double>>& heat_rate_points, double fuel_price,
                       double rating_kw) {
  if (heat_rate_points.size() < 2) throw Error(ErrorCode::DegenerateFit, "need at least two points");
  if (!(fuel_price > 0.0) || !(rating_kw > 0.0)) throw Error(ErrorCode::DegenerateFit, "price and rating must be positive");
  const double n = static_cast<double>(heat_rate_points.size());
  double sx = 0.0, sy = 0.0;
  std::vector<std::pair<double, double>> xy;
  for (const auto& [pu, rate] : heat_rate_points) {
    if (!(pu > 0.0) || !(rate > 0.0)) throw Error(ErrorCode::DegenerateFit, "points must be positive");
    const double p = pu * rating_kw;
    const double cost = p * rate * fuel_price;
    xy.emplace_back(p, cost);
    sx += p;
    sy += cost;
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : xy) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx <= 1e-12 * std::max(1.0, mx * mx)) throw Error(ErrorCode::DegenerateFit, "all powers identical");
  CostFit fit;
  fit.alpha = sxy / sxx;
  fit.c0 = my - fit.alpha * mx;
  double ss_res = 0.0;
  for (const auto& [x, y] : xy) {
    const double r = y - (fit.alpha * x + fit.c0);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

double battery_step(const BatteryModel& b, double soc, double p_c, double p_d, double dt_hours) {
  if (p_c < 0.0 || p_d < 0.0 || p_c > b.p_max_kw || p_d > b.p_max_kw) {
    throw Error(ErrorCode::OutOfRange, "battery power outside [0, p_max]");
  }
  if (p_c > 0.0 && p_d > 0.0) {
    throw Error(ErrorCode::SimultaneousChargeDischarge, "battery cannot charge and discharge in one step");
  }
  return soc + dt_hours / b.capacity_kwh * (b.eta * p_c - p_d / b.eta);
}

double cop_lookup(const CopCurve& curve, double t_out) {
  const auto& pts = curve.points();
  if (pts.empty()) throw Error(ErrorCode::InvalidConfig, "empty COP curve");
  if (t_out <= pts.front().first) return pts.front().second;
  if (t_out >= pts.back().first) return pts.back().second;
  const auto hi = std::upper_bound(pts.begin(), pts.end(), t_out,
                                   [](double t, const auto& p) { return t < p.first; });
  const auto lo = hi - 1;
  const double w = (t_out - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

EtpState etp_step(const HouseThermalParams& h, EtpState s, double t_out, double p_hp, double cop, double q_oil,
                  double dt_hours) {
  const double heat = s.t_m * h.h_m - (h.u_a + h.h_m) * s.t_a + t_out * h.u_a + p_hp * cop + q_oil;
  return {s.t_a + dt_hours / h.c_a * heat, s.t_m + dt_hours / h.c_m * h.h_m * (s.t_a - s.t_m)};
}

double etp_spectral_radius(const HouseThermalParams& h, double dt_hours) {
  const double a11 = 1.0 - dt_hours / h.c_a * (h.u_a + h.h_m);
  const double a12 = dt_hours / h.c_a * h.h_m;
  const double a21 = dt_hours / h.c_m * h.h_m;
  const double a22 = 1.0 - dt_hours / h.c_m * h.h_m;
  const double tr = a11 + a22;
  const double det = a11 * a22 - a12 * a21;
  const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4.0 * det));
  return std::max(std::abs((tr + disc) / 2.0), std::abs((tr - disc) / 2.0));
}

double oil_fuel_gallons(const TimeSeries& q_oil, double furnace_efficiency, double energy_density_btu_per_gal) {
  if (!(furnace_efficiency > 0.0 && furnace_efficiency <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "furnace efficiency must be in (0, 1]");
  }
  if (!(energy_density_btu_per_gal > 0.0)) throw Error(ErrorCode::InvalidConfig, "energy density must be positive");
  return q_oil.energy() * kBtuPerKwh / (energy_density_btu_per_gal * furnace_efficiency);
}

}  // namespace tees
