#pragma once

#include <array>
#include <utility>
#include <vector>

#include "tees/timeseries.hpp"

namespace tees {

inline constexpr double kBtuPerKwh = 3412.14;

struct GeneratorModel {
  double alpha = 0.0;  // $/kWh
  double c0 = 0.0;     // $/h while online
  double p_max_kw = 0.0;
  double unit_capacity_kw = 0.0;  // one genset, for adequacy accounting
  double fuel_efficiency_kwh_per_gal = 0.0;

  void validate() const;
};

struct BatteryModel {
  double capacity_kwh = 0.0;
  double eta = 1.0;
  double p_max_kw = 0.0;
  double soc_min = 0.0;
  double soc_max = 1.0;
  double soc_init = 0.5;

  void validate() const;
};

// Two-state ETP envelope. Mass heat gain is always zero.
struct HouseThermalParams {
  double c_a = 0.0;  // kWh/degC
  double c_m = 0.0;  // kWh/degC
  double u_a = 0.0;  // kW/degC
  double h_m = 0.0;  // kW/degC
  double q_oil_max = 0.0;  // kW

  void validate() const;
};

class CopCurve {
 public:
  CopCurve() = default;
  explicit CopCurve(std::vector<std::pair<double, double>> points);

  const std::vector<std::pair<double, double>>& points() const { return points_; }

 private:
  std::vector<std::pair<double, double>> points_;
};

double generator_cost(const GeneratorModel& g, double p_g);

struct CostFit {
  double alpha = 0.0;
  double c0 = 0.0;
  double r_squared = 0.0;
};

// Least-squares line through fuel cost ($/h) against output (kW). Each point
// is (per-unit output, heat rate in gal/kWh).
CostFit fit_cost_curve(const std::vector<std::pair<double, double>>& heat_rate_points, double fuel_price,
                       double rating_kw);

double battery_step(const BatteryModel& b, double soc, double p_c, double p_d, double dt_hours);

double cop_lookup(const CopCurve& curve, double t_out);

struct EtpState {
  double t_a = 0.0;
  double t_m = 0.0;
};

// Forward-Euler step of the air/mass temperatures.
EtpState etp_step(const HouseThermalParams& h, EtpState s, double t_out, double p_hp, double cop, double q_oil,
                  double dt_hours);

// Spectral radius of the homogeneous ETP step matrix; below 1 means the
// discrete system decays to its fixed point.
double etp_spectral_radius(const HouseThermalParams& h, double dt_hours);

double oil_fuel_gallons(const TimeSeries& q_oil, double furnace_efficiency, double energy_density_btu_per_gal);

}  // namespace tees
