#pragma once

#include <string>
#include <vector>

namespace tees {

struct CatalogEntry {
  double kva = 0.0;
  double cost = 0.0;
};

struct CeaParams {
  double r_base = 0.1985;  // $/kWh
  double r_max = 1.0;      // $/kWh
  double eta = 0.95;
  double eligible_kwh_per_month = 750.0;
};

struct EconomicParams {
  double fuel_price_gen = 0.0;   // $/gal
  double fuel_price_heat = 0.0;  // $/gal
  double fuel_efficiency_kwh_per_gal = 0.0;
  double o_and_m_annual = 0.0;  // $
  double ipp_energy_kwh = 0.0;  // per year
  double ipp_rate = 0.0;        // $/kWh
  CeaParams cea;
  std::vector<CatalogEntry> lv_catalog;
  std::vector<CatalogEntry> mv_catalog;
  double upgrade_trigger_ratio = 1.5;
  double base_system_cost = 0.0;
  // Heating oil.
  double furnace_efficiency = 0.8;
  double oil_energy_density_btu_per_gal = 138500.0;
  // Annual oil use of a house that has no heat pump.
  double baseline_heating_gal_per_house = 0.0;

  void validate() const;
};

struct FuelEmissionFactors {
  double co2 = 0.0;  // kg/mmBtu
  double ch4 = 0.0;
  double n2o = 0.0;
  double gwp_co2 = 1.0;
  double gwp_ch4 = 0.0;
  double gwp_n2o = 0.0;

  // kg CO2e per mmBtu.
  double composite() const { return co2 * gwp_co2 + ch4 * gwp_ch4 + n2o * gwp_n2o; }
};

enum class GenerationEmissionBasis { ElectricalOutput, FuelInput };

struct EmissionParams {
  FuelEmissionFactors generation;
  FuelEmissionFactors heating;
  double pm25_ei_g_per_mmbtu = 5.9;
  double air_volume_m3 = 4.3e9;
  GenerationEmissionBasis generation_basis = GenerationEmissionBasis::ElectricalOutput;
  // Heat content of generator fuel, used by the fuel-input basis.
  double generation_fuel_btu_per_gal = 138500.0;

  void validate() const;
};

struct IncomeBracket {
  double mean_income = 0.0;
  double population_fraction = 0.0;
};

struct SocialParams {
  std::vector<IncomeBracket> income_brackets;
  std::vector<double> survey_indicators;
  int households = 0;  // 0 means: count the houses in the topology

  void validate() const;
};

}  // namespace tees
