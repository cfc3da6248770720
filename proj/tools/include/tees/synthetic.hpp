#pragma once

#include <cstdint>

#include "tees/scenario.hpp"
#include "tees/timeseries.hpp"

namespace tees {

// Arctic village climate and load shapes driven by a seeded generator.
// Daily weather and cloud cover follow AR(1) processes so that cold spells
// and overcast stretches last several days.
struct ProfileOptions {
  Timestamp start{};
  int days = 7;
  Minutes dt{60};
  std::uint64_t seed = 1;
  double mean_demand_kw = 190.0;
  double seasonal_demand_kw = 35.0;  // winter above, summer below the mean
  double pv_capacity_kw = 223.6;
  double latitude_deg = 66.9;
  double mean_temp_c = -4.0;
  double seasonal_temp_c = 18.5;  // amplitude of the annual cycle
  double diurnal_temp_c = 2.5;
  double weather_sd_c = 6.0;     // day-to-day anomaly in midwinter, 0.3x in midsummer
};

struct Profiles {
  TimeSeries demand;
  TimeSeries pv;
  TimeSeries outdoor_temp;
};

Profiles synthesize_profiles(const ProfileOptions& options);

// Case-study parameters with a synthetic topology: `houses` houses spread
// over LV units of `houses_per_transformer`, plus one LV unit without
// houses that carries the rest of the village's connections. The seven
// pathways TP1 .. TP4b are defined.
struct SyntheticOptions {
  ProfileOptions profile;
  Minutes dispatch_dt{5};
  int houses = 10;
  int houses_per_transformer = 5;
  double transformer_kva = 15.0;
  int village_residential = 116;
  int village_community = 12;
  int village_commercial = 18;
  bool battery = true;
};

Scenario synthetic_scenario(const SyntheticOptions& options);

// Heat-pump curve used by the bundled scenario.
CopCurve arctic_cop_curve();

std::vector<PathwayConfig> case_study_pathways();

}  // namespace tees
