#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "tees/dispatch.hpp"
#include "tees/parameters.hpp"
#include "tees/scenario.hpp"

namespace tees {

struct TransformerUpgrade {
  std::string id;
  TransformerKind kind = TransformerKind::LV;
  double rated_kva = 0.0;
  double peak_kva = 0.0;
  double upgraded_kva = 0.0;  // equals rated_kva when no upgrade is needed

  bool upgraded() const { return upgraded_kva != rated_kva; }
};

// Keeps a unit whose peak stays within trigger_ratio * rating; otherwise picks
// the smallest catalog size that carries the peak.
TransformerUpgrade size_transformer(const Transformer& t, double peak_kva, const std::vector<CatalogEntry>& catalog,
                                    double trigger_ratio);

// Sizes every transformer for its peak against the LV or MV catalog.
std::vector<TransformerUpgrade> plan_upgrades(const std::vector<double>& peak_kva, const Topology& topo,
                                              const EconomicParams& econ);

double iuf(const std::vector<TransformerUpgrade>& upgrades);

double infra_cost(const std::vector<TransformerUpgrade>& upgrades, const EconomicParams& econ);

// Percent of steps at which the generator runs above threshold * one unit.
double resource_adequacy(const std::vector<double>& p_g, double unit_capacity_kw, double threshold_fraction = 0.8);

// Supply cost per kWh sold.
double retail_rate(double annual_gen_kwh, const EconomicParams& econ, double total_kwh_sold);

struct CeaLevel {
  double r_cea = 0.0;
  double r_subsidized = 0.0;
};

CeaLevel cea_level(double r, const CeaParams& cea);

// Eligible kWh of each month bill at the subsidized rate, the rest at r.
double annual_household_electric_cost(const std::array<double, 12>& monthly_kwh, double r, double r_subsidized,
                                      double eligible_kwh_per_month);
double annual_household_electric_cost(const std::array<double, 12>& monthly_kwh, double r, const CeaParams& cea);

double annual_heating_cost(double gallons_per_house, double fuel_price_heat);

// Metric tons of CO2e from the fuel energy of one fuel.
double emissions_co2e(double energy_mmbtu, const FuelEmissionFactors& factors);

// Annual particulate mass spread over the fixed air box, in ug/m3.
double pm25(double energy_mmbtu, const EmissionParams& params);

struct EnergyBurden {
  double mean_pct = 0.0;
  std::vector<double> bracket_pct;
  double burdened_population_pct = 0.0;  // share of people above 10 %
};

EnergyBurden energy_burden(double annual_energy_cost_per_house, const std::vector<IncomeBracket>& brackets);

double epi(const SocialParams& social);
double epi_tp(double epi_base, double savings_fraction);

struct CriteriaReport {
  std::string pathway;
  double iuf = 1.0;
  double resource_adequacy_pct = 0.0;
  double infra_cost = 0.0;
  double retail_rate = 0.0;
  double cea_level = 0.0;
  double subsidized_rate = 0.0;
  double annual_elec_cost_per_house = 0.0;
  double annual_heat_cost_per_house = 0.0;
  double total_energy_cost_per_house = 0.0;
  double saving_pct = 0.0;
  double co2e_power_t = 0.0;
  double co2e_heating_t = 0.0;
  double co2e_reduction_pct = 0.0;
  double pm25_ugm3 = 0.0;
  double energy_burden_pct = 0.0;
  double epi_pct = 0.0;
};

// Column names in report order, shared by the CSV files and the scorer.
const std::vector<std::string>& criteria_columns();
std::vector<double> criteria_values(const CriteriaReport& report);
CriteriaReport report_from_values(const std::string& pathway, const std::vector<double>& values);

// Energy flows of the solved windows scaled to a year month by month: each
// calendar month runs at the rate seen inside it, months no window touches
// run at the mean rate. A full-year run is therefore taken as is.
struct AnnualFlows {
  double window_hours = 0.0;
  double generation_kwh = 0.0;
  double sold_kwh = 0.0;
  std::array<double, 12> house_monthly_kwh{};
  double house_oil_gallons = 0.0;  // per average house; NaN when heating is not simulated
  std::vector<double> transformer_peak_kva;
  std::vector<double> p_g;  // every solved step, for adequacy counting
};

AnnualFlows annual_flows(const std::vector<RollingResult>& runs, const Scenario& scenario);

// All criteria of one pathway from one or more disjoint solved windows.
// Relative fields compare against `baseline`; the baseline pathway itself
// may pass nullptr.
CriteriaReport assess(const std::vector<RollingResult>& runs, const Scenario& scenario, const PathwayConfig& pathway,
                      const CriteriaReport* baseline);
CriteriaReport assess(const DispatchSolution& solution, const DispatchProblem& problem, const Scenario& scenario,
                      const PathwayConfig& pathway, const CriteriaReport* baseline);

void write_criteria_csv(const std::filesystem::path& path, const std::vector<CriteriaReport>& reports);
std::vector<CriteriaReport> read_criteria_csv(const std::filesystem::path& path);

}  // namespace tees
