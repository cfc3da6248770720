#include "tees/criteria.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "tees/error.hpp"
#include "tees/format.hpp"

namespace tees {

namespace {

constexpr double kHoursPerYear = 8760.0;
constexpr double kBurdenThresholdPct = 10.0;

double mmbtu_from_kwh(double kwh) { return kwh * kBtuPerKwh / 1e6; }

double relative_drop_pct(double base, double value) {
  if (base == 0.0) return 0.0;
  return (base - value) / base * 100.0;
}

unsigned month_of(Timestamp t) {
  const std::chrono::year_month_day ymd{std::chrono::floor<std::chrono::days>(t)};
  return static_cast<unsigned>(ymd.month()) - 1;
}

double hours_in_month(int year, unsigned month0) {
  using namespace std::chrono;
  const year_month ym{std::chrono::year{year}, std::chrono::month{month0 + 1}};
  const auto days = (year_month_day_last{ym / last}).day();
  return 24.0 * static_cast<unsigned>(days);
}

int households(const Scenario& sc) {
  return sc.social.households > 0 ? sc.social.households : sc.topology.household_count();
}

int residential_connections(const Topology& topo) {
  int n = 0;
  for (const auto& t : topo.transformers()) {
    if (t.kind == TransformerKind::LV && t.connections) n += t.connections->residential;
  }
  return n;
}

}  // namespace

TransformerUpgrade size_transformer(const Transformer& t, double peak_kva, const std::vector<CatalogEntry>& catalog,
                                    double trigger_ratio) {
  TransformerUpgrade u{t.id, t.kind, t.rated_kva, peak_kva, t.rated_kva};
  if (peak_kva <= trigger_ratio * t.rated_kva) return u;
  const auto it = std::find_if(catalog.begin(), catalog.end(), [&](const CatalogEntry& e) { return e.kva >= peak_kva; });
  if (it == catalog.end()) {
    throw Error(ErrorCode::PeakExceedsCatalog,
                t.id + " peaks at " + format_number(peak_kva) + " kVA, above the largest catalog size");
  }
  u.upgraded_kva = it->kva;
  return u;
}

std::vector<TransformerUpgrade> plan_upgrades(const std::vector<double>& peak_kva, const Topology& topo,
                                              const EconomicParams& econ) {
  const auto& units = topo.transformers();
  if (peak_kva.size() != units.size()) {
    throw Error(ErrorCode::LengthMismatch, "one peak per transformer expected");
  }
  std::vector<TransformerUpgrade> out;
  out.reserve(units.size());
  for (std::size_t t = 0; t < units.size(); ++t) {
    const auto& catalog = units[t].kind == TransformerKind::LV ? econ.lv_catalog : econ.mv_catalog;
    out.push_back(size_transformer(units[t], peak_kva[t], catalog, econ.upgrade_trigger_ratio));
  }
  return out;
}

double iuf(const std::vector<TransformerUpgrade>& upgrades) {
  if (upgrades.empty()) return 1.0;
  double sum = 0.0;
  for (const auto& u : upgrades) sum += u.upgraded_kva / u.rated_kva;
  return sum / static_cast<double>(upgrades.size());
}

double infra_cost(const std::vector<TransformerUpgrade>& upgrades, const EconomicParams& econ) {
  double cost = 0.0;
  for (const auto& u : upgrades) {
    if (!u.upgraded()) continue;
    const auto& catalog = u.kind == TransformerKind::LV ? econ.lv_catalog : econ.mv_catalog;
    const auto it = std::find_if(catalog.begin(), catalog.end(),
                                 [&](const CatalogEntry& e) { return std::abs(e.kva - u.upgraded_kva) < 1e-9; });
    if (it == catalog.end()) throw Error(ErrorCode::UnknownSize, format_number(u.upgraded_kva) + " kVA is not in the catalog");
    cost += it->cost;
  }
  return cost;
}

double resource_adequacy(const std::vector<double>& p_g, double unit_capacity_kw, double threshold_fraction) {
  if (!(threshold_fraction > 0.0 && threshold_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "adequacy threshold must be in (0, 1]");
  }
  if (p_g.empty()) return 0.0;
  const double limit = threshold_fraction * unit_capacity_kw;
  const auto above = std::count_if(p_g.begin(), p_g.end(), [&](double g) { return g > limit; });
  return 100.0 * static_cast<double>(above) / static_cast<double>(p_g.size());
}

double retail_rate(double annual_gen_kwh, const EconomicParams& econ, double total_kwh_sold) {
  if (!(total_kwh_sold > 0.0)) throw Error(ErrorCode::ZeroSales, "no electricity sold");
  const double fuel = econ.fuel_price_gen / econ.fuel_efficiency_kwh_per_gal * annual_gen_kwh;
  return (fuel + econ.o_and_m_annual + econ.ipp_energy_kwh * econ.ipp_rate) / total_kwh_sold;
}

CeaLevel cea_level(double r, const CeaParams& cea) {
  if (r < 0.0) throw Error(ErrorCode::OutOfRange, "negative electricity rate");
  const double r_cea = std::max(0.0, (std::min(r, cea.r_max) - cea.r_base) * cea.eta);
  return {r_cea, r - r_cea};
}

double annual_household_electric_cost(const std::array<double, 12>& monthly_kwh, double r, double r_subsidized,
                                      double eligible_kwh_per_month) {
  double cost = 0.0;
  for (double use : monthly_kwh) {
    if (use < 0.0) throw Error(ErrorCode::OutOfRange, "negative monthly usage");
    const double eligible = std::min(use, eligible_kwh_per_month);
    cost += eligible * r_subsidized + (use - eligible) * r;
  }
  return cost;
}

double annual_household_electric_cost(const std::array<double, 12>& monthly_kwh, double r, const CeaParams& cea) {
  return annual_household_electric_cost(monthly_kwh, r, cea_level(r, cea).r_subsidized, cea.eligible_kwh_per_month);
}

double annual_heating_cost(double gallons_per_house, double fuel_price_heat) {
  return gallons_per_house * fuel_price_heat;
}

double emissions_co2e(double energy_mmbtu, const FuelEmissionFactors& factors) {
  if (energy_mmbtu < 0.0) throw Error(ErrorCode::OutOfRange, "negative fuel energy");
  return factors.composite() * energy_mmbtu / 1000.0;
}

double pm25(double energy_mmbtu, const EmissionParams& params) {
  if (!(params.air_volume_m3 > 0.0)) throw Error(ErrorCode::InvalidConfig, "air volume must be positive");
  return params.pm25_ei_g_per_mmbtu * energy_mmbtu * 1e6 / params.air_volume_m3;
}

EnergyBurden energy_burden(double annual_energy_cost_per_house, const std::vector<IncomeBracket>& brackets) {
  EnergyBurden b;
  for (const auto& br : brackets) {
    if (!(br.mean_income > 0.0)) throw Error(ErrorCode::InvalidConfig, "income must be positive");
    const double pct = annual_energy_cost_per_house / br.mean_income * 100.0;
    b.bracket_pct.push_back(pct);
    b.mean_pct += br.population_fraction * pct;
    if (pct > kBurdenThresholdPct) b.burdened_population_pct += 100.0 * br.population_fraction;
  }
  return b;
}

double epi(const SocialParams& social) {
  if (social.survey_indicators.empty()) throw Error(ErrorCode::InvalidConfig, "no survey indicators");
  return std::accumulate(social.survey_indicators.begin(), social.survey_indicators.end(), 0.0) /
         static_cast<double>(social.survey_indicators.size());
}

double epi_tp(double epi_base, double savings_fraction) {
  if (!(savings_fraction >= 0.0 && savings_fraction <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "savings fraction must be in [0, 1]");
  }
  return epi_base * (1.0 - savings_fraction);
}

const std::vector<std::string>& criteria_columns() {
  static const std::vector<std::string> names{
      "iuf",          "resource_adequacy_pct",      "infra_cost",
      "retail_rate",  "cea_level",                  "subsidized_rate",
      "annual_elec_cost_per_house",                 "annual_heat_cost_per_house",
      "total_energy_cost_per_house",                "saving_pct",
      "co2e_power_t", "co2e_heating_t",             "co2e_reduction_pct",
      "pm25_ugm3",    "energy_burden_pct",          "epi_pct"};
  return names;
}

std::vector<double> criteria_values(const CriteriaReport& r) {
  return {r.iuf,
          r.resource_adequacy_pct,
          r.infra_cost,
          r.retail_rate,
          r.cea_level,
          r.subsidized_rate,
          r.annual_elec_cost_per_house,
          r.annual_heat_cost_per_house,
          r.total_energy_cost_per_house,
          r.saving_pct,
          r.co2e_power_t,
          r.co2e_heating_t,
          r.co2e_reduction_pct,
          r.pm25_ugm3,
          r.energy_burden_pct,
          r.epi_pct};
}

CriteriaReport report_from_values(const std::string& pathway, const std::vector<double>& v) {
  if (v.size() != criteria_columns().size()) throw Error(ErrorCode::LengthMismatch, "criteria row has the wrong width");
  CriteriaReport r;
  r.pathway = pathway;
  double* fields[] = {&r.iuf,
                      &r.resource_adequacy_pct,
                      &r.infra_cost,
                      &r.retail_rate,
                      &r.cea_level,
                      &r.subsidized_rate,
                      &r.annual_elec_cost_per_house,
                      &r.annual_heat_cost_per_house,
                      &r.total_energy_cost_per_house,
                      &r.saving_pct,
                      &r.co2e_power_t,
                      &r.co2e_heating_t,
                      &r.co2e_reduction_pct,
                      &r.pm25_ugm3,
                      &r.energy_burden_pct,
                      &r.epi_pct};
  for (std::size_t i = 0; i < v.size(); ++i) *fields[i] = v[i];
  return r;
}

AnnualFlows annual_flows(const std::vector<RollingResult>& runs, const Scenario& sc) {
  if (runs.empty()) throw Error(ErrorCode::EmptySeries, "no solved windows");
  int connections = residential_connections(sc.topology);
  if (connections == 0) connections = households(sc);
  if (connections == 0) throw Error(ErrorCode::InvalidConfig, "no residential customers");
  const double residential_share = sc.topology.shares().residential / static_cast<double>(connections);
  const bool heating = !runs.front().problem.houses.empty();
  const std::size_t nt = sc.topology.transformers().size();

  // Per calendar month: hours covered, generation, sales, house kWh, oil kWh.
  struct Month {
    double hours = 0.0, gen = 0.0, sold = 0.0, house = 0.0, oil = 0.0;
  };
  std::array<Month, 12> months{};
  AnnualFlows f;
  f.transformer_peak_kva.assign(nt, 0.0);
  for (const auto& run : runs) {
    const auto& p = run.problem;
    const auto& s = run.solution;
    if (s.steps() != p.steps || p.steps == 0) throw Error(ErrorCode::LengthMismatch, "solution does not match its problem");
    if (p.houses.empty() == heating) throw Error(ErrorCode::InvalidConfig, "windows disagree on the heat-pump fleet");
    if (s.transformer_load.size() != nt) {
      throw Error(ErrorCode::LengthMismatch, "solution and topology disagree on the transformer count");
    }
    double fleet = 0.0;
    for (double c : p.house_count) fleet += c;
    const double dt_h = p.dt_hours();
    for (std::size_t k = 0; k < p.steps; ++k) {
      Month& m = months[month_of(p.start + p.dt * static_cast<long>(k))];
      m.hours += dt_h;
      m.gen += s.p_g[k] * dt_h;
      m.sold += s.total_demand[k] * dt_h;
      double house_kw = residential_share * p.base_demand[k];
      for (std::size_t h = 0; h < p.houses.size(); ++h) {
        house_kw += p.house_count[h] * s.p_hp[h][k] / fleet;
        m.oil += p.house_count[h] * s.q_oil[h][k] / fleet * dt_h;
      }
      m.house += house_kw * dt_h;
    }
    for (std::size_t t = 0; t < nt; ++t) {
      for (double load : s.transformer_load[t]) f.transformer_peak_kva[t] = std::max(f.transformer_peak_kva[t], load);
    }
    f.p_g.insert(f.p_g.end(), s.p_g.begin(), s.p_g.end());
  }

  Month total;
  for (const auto& m : months) {
    total.hours += m.hours;
    total.gen += m.gen;
    total.sold += m.sold;
    total.house += m.house;
    total.oil += m.oil;
  }
  f.window_hours = total.hours;
  const int year =
      static_cast<int>(std::chrono::year_month_day{std::chrono::floor<std::chrono::days>(runs.front().problem.start)}.year());
  double oil_kwh = 0.0;
  for (unsigned i = 0; i < 12; ++i) {
    const Month& m = months[i].hours > 0.0 ? months[i] : total;
    const double scale = hours_in_month(year, i) / m.hours;
    f.generation_kwh += m.gen * scale;
    f.sold_kwh += m.sold * scale;
    f.house_monthly_kwh[i] = m.house * scale;
    oil_kwh += m.oil * scale;
  }
  if (heating) {
    const TimeSeries oil(runs.front().problem.start, Minutes{60}, {oil_kwh}, Unit::Kilowatt);
    f.house_oil_gallons =
        oil_fuel_gallons(oil, sc.economics.furnace_efficiency, sc.economics.oil_energy_density_btu_per_gal);
  } else {
    f.house_oil_gallons = std::numeric_limits<double>::quiet_NaN();
  }
  return f;
}

CriteriaReport assess(const std::vector<RollingResult>& runs, const Scenario& sc, const PathwayConfig& pathway,
                      const CriteriaReport* baseline) {
  if (baseline == nullptr && pathway.name != sc.baseline_pathway) {
    throw Error(ErrorCode::MissingBaseline, pathway.name + " needs the baseline report");
  }
  const auto& econ = sc.economics;
  const auto& em = sc.emissions;
  const AnnualFlows f = annual_flows(runs, sc);

  CriteriaReport r;
  r.pathway = pathway.name;

  const auto upgrades = plan_upgrades(f.transformer_peak_kva, sc.topology, econ);
  r.iuf = iuf(upgrades);
  r.infra_cost = infra_cost(upgrades, econ);
  r.resource_adequacy_pct = resource_adequacy(f.p_g, sc.generator.unit_capacity_kw);

  r.retail_rate = retail_rate(f.generation_kwh, econ, f.sold_kwh);
  const CeaLevel cea = cea_level(r.retail_rate, econ.cea);
  r.cea_level = cea.r_cea;
  r.subsidized_rate = cea.r_subsidized;
  r.annual_elec_cost_per_house = annual_household_electric_cost(f.house_monthly_kwh, r.retail_rate, econ.cea);

  const double gallons = std::isnan(f.house_oil_gallons) ? econ.baseline_heating_gal_per_house : f.house_oil_gallons;
  r.annual_heat_cost_per_house = annual_heating_cost(gallons, econ.fuel_price_heat);
  r.total_energy_cost_per_house = r.annual_elec_cost_per_house + r.annual_heat_cost_per_house;

  const double gen_mmbtu = em.generation_basis == GenerationEmissionBasis::ElectricalOutput
                               ? mmbtu_from_kwh(f.generation_kwh)
                               : f.generation_kwh / econ.fuel_efficiency_kwh_per_gal *
                                     em.generation_fuel_btu_per_gal / 1e6;
  const double heat_mmbtu = gallons * econ.oil_energy_density_btu_per_gal / 1e6 * households(sc);
  r.co2e_power_t = emissions_co2e(gen_mmbtu, em.generation);
  r.co2e_heating_t = emissions_co2e(heat_mmbtu, em.heating);
  r.pm25_ugm3 = pm25(gen_mmbtu + heat_mmbtu, em);

  r.energy_burden_pct = energy_burden(r.total_energy_cost_per_house, sc.social.income_brackets).mean_pct;

  const CriteriaReport& base = baseline ? *baseline : r;
  r.saving_pct = relative_drop_pct(base.total_energy_cost_per_house, r.total_energy_cost_per_house);
  r.co2e_reduction_pct = relative_drop_pct(base.co2e_power_t + base.co2e_heating_t, r.co2e_power_t + r.co2e_heating_t);
  // A pathway that costs more than the baseline leaves the index unchanged.
  r.epi_pct = 100.0 * epi_tp(epi(sc.social), std::clamp(r.saving_pct / 100.0, 0.0, 1.0));
  return r;
}

CriteriaReport assess(const DispatchSolution& solution, const DispatchProblem& problem, const Scenario& sc,
                      const PathwayConfig& pathway, const CriteriaReport* baseline) {
  return assess(std::vector<RollingResult>{{solution, problem, {}}}, sc, pathway, baseline);
}

void write_criteria_csv(const std::filesystem::path& path, const std::vector<CriteriaReport>& reports) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "pathway";
  for (const auto& c : criteria_columns()) out << ',' << c;
  out << '\n';
  for (const auto& r : reports) {
    out << r.pathway;
    for (double v : criteria_values(r)) out << ',' << format_number(v);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

std::vector<CriteriaReport> read_criteria_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, path.string() + " is empty");
  const auto header = split_csv_line(line);
  const auto& columns = criteria_columns();
  if (header.size() != columns.size() + 1 || header[0] != "pathway" ||
      !std::equal(columns.begin(), columns.end(), header.begin() + 1)) {
    throw Error(ErrorCode::ParseError, path.string() + " does not have the criteria header");
  }
  std::vector<CriteriaReport> reports;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(row) + ": wrong field count");
    }
    std::vector<double> values;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(fields[i], &used));
        if (used != fields[i].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(row) + ": bad number '" + fields[i] + "'");
      }
    }
    reports.push_back(report_from_values(fields[0], values));
  }
  return reports;
}

}  // namespace tees
