#include "tees/parameters.hpp"

#include <algorithm>
#include <cmath>

#include "tees/error.hpp"

namespace tees {

namespace {

void check_catalog(const std::vector<CatalogEntry>& catalog, const char* name) {
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (!(catalog[i].kva > 0.0) || catalog[i].cost < 0.0) {
      throw Error(ErrorCode::InvalidConfig, std::string(name) + " catalog entries need kva > 0 and cost >= 0");
    }
    if (i > 0 && !(catalog[i].kva > catalog[i - 1].kva)) {
      throw Error(ErrorCode::InvalidConfig, std::string(name) + " catalog must be sorted by kva");
    }
  }
}

}  // namespace

void EconomicParams::validate() const {
  if (fuel_price_gen < 0.0 || fuel_price_heat < 0.0 || o_and_m_annual < 0.0 || ipp_energy_kwh < 0.0 ||
      ipp_rate < 0.0 || base_system_cost < 0.0 || baseline_heating_gal_per_house < 0.0) {
    throw Error(ErrorCode::InvalidConfig, "economic quantities must be >= 0");
  }
  if (!(fuel_efficiency_kwh_per_gal > 0.0)) throw Error(ErrorCode::InvalidConfig, "fuel efficiency must be positive");
  if (!(cea.eta > 0.0 && cea.eta <= 1.0)) throw Error(ErrorCode::InvalidConfig, "CEA efficiency must be in (0, 1]");
  if (!(cea.r_base < cea.r_max)) throw Error(ErrorCode::InvalidConfig, "CEA r_base must be below r_max");
  if (cea.eligible_kwh_per_month < 0.0) throw Error(ErrorCode::InvalidConfig, "eligible kWh must be >= 0");
  check_catalog(lv_catalog, "LV");
  check_catalog(mv_catalog, "MV");
  if (!(upgrade_trigger_ratio >= 1.0)) throw Error(ErrorCode::InvalidConfig, "upgrade trigger ratio must be >= 1");
  if (!(furnace_efficiency > 0.0 && furnace_efficiency <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "furnace efficiency must be in (0, 1]");
  }
  if (!(oil_energy_density_btu_per_gal > 0.0)) throw Error(ErrorCode::InvalidConfig, "oil energy density must be positive");
}

void EmissionParams::validate() const {
  for (const auto* f : {&generation, &heating}) {
    if (f->co2 < 0.0 || f->ch4 < 0.0 || f->n2o < 0.0 || f->gwp_co2 < 0.0 || f->gwp_ch4 < 0.0 || f->gwp_n2o < 0.0) {
      throw Error(ErrorCode::InvalidConfig, "emission factors must be >= 0");
    }
  }
  if (pm25_ei_g_per_mmbtu < 0.0) throw Error(ErrorCode::InvalidConfig, "PM2.5 index must be >= 0");
  if (!(air_volume_m3 > 0.0)) throw Error(ErrorCode::InvalidConfig, "air volume must be positive");
  if (!(generation_fuel_btu_per_gal > 0.0)) throw Error(ErrorCode::InvalidConfig, "fuel heat content must be positive");
}

void SocialParams::validate() const {
  double total = 0.0;
  for (const auto& b : income_brackets) {
    if (!(b.mean_income > 0.0) || b.population_fraction < 0.0) {
      throw Error(ErrorCode::InvalidConfig, "income brackets need positive income and non-negative fraction");
    }
    total += b.population_fraction;
  }
  if (income_brackets.empty() || std::abs(total - 1.0) > 1e-6) {
    throw Error(ErrorCode::InvalidConfig, "income bracket fractions must sum to 1");
  }
  if (survey_indicators.empty()) throw Error(ErrorCode::InvalidConfig, "at least one survey indicator is required");
  for (double x : survey_indicators) {
    if (x < 0.0 || x > 1.0) throw Error(ErrorCode::InvalidConfig, "survey indicators must lie in [0, 1]");
  }
  if (households < 0) throw Error(ErrorCode::InvalidConfig, "household count must be >= 0");
}

}  // namespace tees
