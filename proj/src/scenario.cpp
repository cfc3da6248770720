#include "tees/scenario.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "json.hpp"

#include "tees/error.hpp"

namespace tees {

using nlohmann::json;

Topology::Topology(std::vector<Transformer> transformers, std::vector<House> houses, SectorShares shares)
    : transformers_(std::move(transformers)), houses_(std::move(houses)), shares_(shares) {
  if (transformers_.empty()) throw Error(ErrorCode::InvalidConfig, "topology has no transformers");
  const double sum = shares_.residential + shares_.community + shares_.commercial;
  if (std::abs(sum - 1.0) > 1e-9 || shares_.residential < 0.0 || shares_.community < 0.0 || shares_.commercial < 0.0) {
    throw Error(ErrorCode::InvalidConfig, "sector shares must be non-negative and sum to 1");
  }
  std::set<std::string> ids;
  for (const auto& t : transformers_) {
    if (!(t.rated_kva > 0.0)) throw Error(ErrorCode::InvalidConfig, "transformer " + t.id + " needs rated_kva > 0");
    if (t.phase_count < 1) throw Error(ErrorCode::InvalidConfig, "transformer " + t.id + " needs phase_count >= 1");
    if (!ids.insert(t.id).second) throw Error(ErrorCode::InvalidConfig, "duplicate transformer id " + t.id);
    if (t.kind == TransformerKind::LV && !t.downstream.empty()) {
      throw Error(ErrorCode::InvalidConfig, "LV transformer " + t.id + " cannot feed other transformers");
    }
  }

  const int n = static_cast<int>(transformers_.size());
  served_.assign(n, {});
  leaves_.assign(n, {});
  for (int t = 0; t < n; ++t) {
    const auto& tr = transformers_[t];
    if (tr.kind == TransformerKind::LV) {
      leaves_[t].push_back(t);
      continue;
    }
    for (const auto& d : tr.downstream) {
      const int child = transformer_index(d);
      if (transformers_[child].kind != TransformerKind::LV) {
        throw Error(ErrorCode::InvalidConfig, "MV transformer " + tr.id + " may only feed LV units");
      }
      leaves_[t].push_back(child);
    }
  }
  for (int h = 0; h < static_cast<int>(houses_.size()); ++h) {
    if (houses_[h].count < 1) throw Error(ErrorCode::InvalidConfig, "house " + houses_[h].id + " needs count >= 1");
    const int t = transformer_index(houses_[h].transformer_id);
    if (transformers_[t].kind != TransformerKind::LV) {
      throw Error(ErrorCode::InvalidConfig, "house " + houses_[h].id + " must hang off an LV transformer");
    }
    served_[t].push_back(h);
  }
  for (int t = 0; t < n; ++t) {
    if (transformers_[t].kind != TransformerKind::MV) continue;
    for (int leaf : leaves_[t]) served_[t].insert(served_[t].end(), served_[leaf].begin(), served_[leaf].end());
  }
}

int Topology::household_count() const {
  int total = 0;
  for (const auto& h : houses_) total += h.count;
  return total;
}

int Topology::transformer_index(const std::string& id) const {
  for (std::size_t i = 0; i < transformers_.size(); ++i) {
    if (transformers_[i].id == id) return static_cast<int>(i);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown transformer '" + id + "'");
}

std::map<std::string, TimeSeries> disaggregate_demand(const TimeSeries& total, const Topology& topo) {
  const auto& trs = topo.transformers();
  SectorCounts sums;
  for (const auto& t : trs) {
    if (t.kind != TransformerKind::LV) continue;
    if (!t.connections) throw Error(ErrorCode::MissingCounts, "transformer " + t.id + " has no connection counts");
    sums.residential += t.connections->residential;
    sums.community += t.connections->community;
    sums.commercial += t.connections->commercial;
  }
  const auto& s = topo.shares();
  const auto check = [](double share, int count, const char* sector) {
    if (share > 0.0 && count == 0) {
      throw Error(ErrorCode::ZeroSectorConnections, std::string(sector) + " share is positive but has no connections");
    }
  };
  check(s.residential, sums.residential, "residential");
  check(s.community, sums.community, "community");
  check(s.commercial, sums.commercial, "commercial");

  const auto fraction = [](double share, int mine, int all) {
    return all > 0 ? share * static_cast<double>(mine) / static_cast<double>(all) : 0.0;
  };
  std::vector<double> weight(trs.size(), 0.0);
  for (std::size_t t = 0; t < trs.size(); ++t) {
    if (trs[t].kind != TransformerKind::LV) continue;
    const auto& c = *trs[t].connections;
    weight[t] = fraction(s.residential, c.residential, sums.residential) +
                fraction(s.community, c.community, sums.community) +
                fraction(s.commercial, c.commercial, sums.commercial);
  }

  std::map<std::string, TimeSeries> out;
  for (std::size_t t = 0; t < trs.size(); ++t) {
    double w = 0.0;
    for (int leaf : topo.leaves_served(static_cast<int>(t))) w += weight[leaf];
    std::vector<double> values(total.values());
    for (double& v : values) v *= w;
    out.emplace(trs[t].id, TimeSeries(total.start(), total.dt(), std::move(values), total.unit()));
  }
  return out;
}

void PathwayConfig::validate() const {
  if (pv_scale < 0.0) throw Error(ErrorCode::InvalidConfig, "pathway " + name + ": pv_scale must be >= 0");
  if (coordination_gamma < 0.0) throw Error(ErrorCode::InvalidConfig, "pathway " + name + ": gamma must be >= 0");
  if (!(comfort.t_min < comfort.t_max)) throw Error(ErrorCode::InvalidConfig, "pathway " + name + ": empty comfort band");
  if (hp_rated_power_kw < 0.0 || hp_min_power_kw < 0.0 || hp_min_power_kw > hp_rated_power_kw) {
    throw Error(ErrorCode::InvalidConfig, "pathway " + name + ": heat pump power bounds invalid");
  }
}

std::vector<HouseThermalParams> draw_house_params(const HouseParamRanges& ranges, std::size_t count,
                                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // 53 random bits mapped to [0, 1), independent of the library's distributions.
  const auto uniform = [&rng](const std::array<double, 2>& r) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return r[0] + (r[1] - r[0]) * u;
  };
  std::vector<HouseThermalParams> out(count);
  for (auto& h : out) {
    h.c_a = uniform(ranges.c_a);
    h.c_m = uniform(ranges.c_m);
    h.h_m = uniform(ranges.h_m);
    h.u_a = uniform(ranges.u_a);
    h.q_oil_max = ranges.q_oil_max_kw;
    h.validate();
  }
  return out;
}

double InitialIndoorTemperature::resolve(const ComfortBand& band) const {
  switch (rule) {
    case Rule::ComfortMin:
      return band.t_min;
    case Rule::Fixed:
      return value_c;
    case Rule::ComfortMidpoint:
      break;
  }
  return 0.5 * (band.t_min + band.t_max);
}

const PathwayConfig& Scenario::pathway(const std::string& name) const {
  for (const auto& p : pathways) {
    if (p.name == name) return p;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown pathway '" + name + "'");
}

namespace {

std::array<double, 2> range_of(const json& j) {
  const auto r = j.get<std::vector<double>>();
  if (r.size() != 2 || !(r[0] > 0.0) || r[1] < r[0]) {
    throw Error(ErrorCode::InvalidConfig, "parameter ranges are [low, high] with 0 < low <= high");
  }
  return {r[0], r[1]};
}

std::vector<CatalogEntry> catalog_of(const json& j) {
  std::vector<CatalogEntry> out;
  for (const auto& e : j) out.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
  return out;
}

FuelEmissionFactors factors_of(const json& j) {
  FuelEmissionFactors f;
  f.co2 = j.at("co2").get<double>();
  f.ch4 = j.at("ch4").get<double>();
  f.n2o = j.at("n2o").get<double>();
  const auto gwp = j.at("gwp").get<std::vector<double>>();
  if (gwp.size() != 3) throw Error(ErrorCode::InvalidConfig, "gwp must list CO2, CH4 and N2O");
  f.gwp_co2 = gwp[0];
  f.gwp_ch4 = gwp[1];
  f.gwp_n2o = gwp[2];
  return f;
}

Topology topology_of(const json& j) {
  SectorShares shares;
  const auto& s = j.at("sector_shares");
  shares.residential = s.at("residential").get<double>();
  shares.community = s.at("community").get<double>();
  shares.commercial = s.at("commercial").get<double>();

  std::vector<Transformer> transformers;
  std::vector<House> houses;
  for (const auto& t : j.at("transformers")) {
    Transformer tr;
    tr.id = t.at("id").get<std::string>();
    tr.rated_kva = t.at("rated_kva").get<double>();
    const auto kind = t.value("kind", std::string("LV"));
    if (kind != "LV" && kind != "MV") throw Error(ErrorCode::InvalidConfig, "transformer kind must be LV or MV");
    tr.kind = kind == "MV" ? TransformerKind::MV : TransformerKind::LV;
    tr.phase_count = t.value("phase_count", tr.kind == TransformerKind::MV ? 3 : 1);
    if (t.contains("connections")) {
      const auto& c = t.at("connections");
      tr.connections = SectorCounts{c.value("residential", 0), c.value("community", 0), c.value("commercial", 0)};
    }
    if (t.contains("downstream")) tr.downstream = t.at("downstream").get<std::vector<std::string>>();
    // Shorthands: "houses": N creates houses <id>-h1 .. <id>-hN, while
    // "represented_houses": N creates one entry <id>-rep standing for N.
    if (t.contains("houses")) {
      const int n = t.at("houses").get<int>();
      for (int h = 1; h <= n; ++h) houses.push_back({tr.id + "-h" + std::to_string(h), tr.id, 1});
    }
    if (t.contains("represented_houses")) {
      houses.push_back({tr.id + "-rep", tr.id, t.at("represented_houses").get<int>()});
    }
    transformers.push_back(std::move(tr));
  }
  if (j.contains("houses")) {
    for (const auto& h : j.at("houses")) {
      houses.push_back({h.at("id").get<std::string>(), h.at("transformer_id").get<std::string>(), h.value("count", 1)});
    }
  }
  return Topology(std::move(transformers), std::move(houses), shares);
}

PathwayConfig pathway_of(const json& j) {
  PathwayConfig p;
  p.name = j.at("name").get<std::string>();
  p.hp_size_mbtu_h = j.value("hp_size_mbtu_h", 0.0);
  p.hp_rated_power_kw = j.value("hp_rated_power_kw", 0.0);
  p.hp_min_power_kw = j.value("hp_min_power_kw", 0.0);
  p.hp_cutoff_temp_c = j.value("hp_cutoff_temp_c", -20.0);
  p.coordination_gamma = j.value("coordination_gamma", 0.0);
  p.pv_scale = j.value("pv_scale", 1.0);
  if (j.contains("comfort_band")) {
    const auto band = j.at("comfort_band").get<std::vector<double>>();
    if (band.size() != 2) throw Error(ErrorCode::InvalidConfig, "comfort_band is [t_min, t_max]");
    p.comfort = {band[0], band[1]};
  }
  p.validate();
  return p;
}

Scenario scenario_of(const json& j, const std::filesystem::path& dir) {
  Scenario sc;
  sc.name = j.value("name", std::string("scenario"));
  const auto& series = j.at("series");
  sc.demand = load_timeseries(dir / series.at("demand").get<std::string>(), Unit::Kilowatt);
  sc.pv = load_timeseries(dir / series.at("pv").get<std::string>(), Unit::Kilowatt);
  sc.outdoor_temp = load_timeseries(dir / series.at("outdoor_temp").get<std::string>(), Unit::Celsius);
  sc.dt = Minutes{j.value("dt_minutes", 5)};
  sc.chunk_days = j.value("chunk_days", 7);
  if (sc.chunk_days < 1) throw Error(ErrorCode::InvalidConfig, "chunk_days must be >= 1");
  if (j.contains("window")) {
    sc.window_from = parse_timestamp(j.at("window").at("from").get<std::string>());
    sc.window_to = parse_timestamp(j.at("window").at("to").get<std::string>());
    sc.sample_days_per_month = j.at("window").value("sample_days_per_month", 0);
    if (sc.sample_days_per_month < 0 || sc.sample_days_per_month > 28) {
      throw Error(ErrorCode::InvalidConfig, "sample_days_per_month must be in [0, 28]");
    }
  }

  if (j.contains("initial_indoor_temperature")) {
    const auto& t = j.at("initial_indoor_temperature");
    using Rule = InitialIndoorTemperature::Rule;
    if (t.is_number()) {
      sc.initial_indoor = {Rule::Fixed, t.get<double>()};
    } else if (t == "comfort_midpoint") {
      sc.initial_indoor.rule = Rule::ComfortMidpoint;
    } else if (t == "comfort_min") {
      sc.initial_indoor.rule = Rule::ComfortMin;
    } else {
      throw Error(ErrorCode::InvalidConfig, "initial_indoor_temperature is comfort_midpoint, comfort_min or degC");
    }
  }

  const auto& g = j.at("generator");
  sc.generator.alpha = g.at("alpha").get<double>();
  sc.generator.c0 = g.at("c0").get<double>();
  sc.generator.p_max_kw = g.at("p_max_kw").get<double>();
  sc.generator.unit_capacity_kw = g.at("unit_capacity_kw").get<double>();
  sc.generator.fuel_efficiency_kwh_per_gal = g.at("fuel_efficiency_kwh_per_gal").get<double>();
  sc.generator.validate();

  const auto& b = j.at("battery");
  sc.battery.capacity_kwh = b.at("capacity_kwh").get<double>();
  sc.battery.eta = b.at("eta").get<double>();
  sc.battery.p_max_kw = b.at("p_max_kw").get<double>();
  sc.battery.soc_min = b.at("soc_min").get<double>();
  sc.battery.soc_max = b.at("soc_max").get<double>();
  sc.battery.soc_init = b.value("soc_init", 0.5);
  sc.battery.validate();

  std::vector<std::pair<double, double>> cop;
  for (const auto& p : j.at("cop_curve")) cop.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  sc.cop = CopCurve(std::move(cop));

  const auto& hp = j.at("house_params");
  sc.house_ranges.c_a = range_of(hp.at("c_a"));
  sc.house_ranges.c_m = range_of(hp.at("c_m"));
  sc.house_ranges.h_m = range_of(hp.at("h_m"));
  sc.house_ranges.u_a = range_of(hp.at("u_a"));
  sc.house_ranges.q_oil_max_kw = hp.at("q_oil_max_kw").get<double>();

  sc.topology = topology_of(j.at("topology"));

  const auto& e = j.at("economics");
  auto& ec = sc.economics;
  ec.fuel_price_gen = e.at("fuel_price_gen").get<double>();
  ec.fuel_price_heat = e.at("fuel_price_heat").get<double>();
  ec.fuel_efficiency_kwh_per_gal = e.value("fuel_efficiency_kwh_per_gal", sc.generator.fuel_efficiency_kwh_per_gal);
  ec.o_and_m_annual = e.value("o_and_m_annual", 0.0);
  ec.ipp_energy_kwh = e.value("ipp_energy_kwh", 0.0);
  ec.ipp_rate = e.value("ipp_rate", 0.0);
  if (e.contains("cea")) {
    const auto& c = e.at("cea");
    ec.cea.r_base = c.at("r_base").get<double>();
    ec.cea.r_max = c.at("r_max").get<double>();
    ec.cea.eta = c.at("eta").get<double>();
    ec.cea.eligible_kwh_per_month = c.at("eligible_kwh_per_month").get<double>();
  }
  ec.lv_catalog = catalog_of(e.at("lv_catalog"));
  ec.mv_catalog = catalog_of(e.at("mv_catalog"));
  ec.upgrade_trigger_ratio = e.value("upgrade_trigger_ratio", 1.5);
  ec.base_system_cost = e.value("base_system_cost", 0.0);
  ec.furnace_efficiency = e.value("furnace_efficiency", 0.8);
  ec.oil_energy_density_btu_per_gal = e.value("oil_energy_density_btu_per_gal", 138500.0);
  ec.baseline_heating_gal_per_house = e.value("baseline_heating_gal_per_house", 0.0);
  ec.validate();

  const auto& em = j.at("emissions");
  sc.emissions.generation = factors_of(em.at("generation"));
  sc.emissions.heating = factors_of(em.at("heating"));
  sc.emissions.pm25_ei_g_per_mmbtu = em.value("pm25_ei_g_per_mmbtu", 5.9);
  sc.emissions.air_volume_m3 = em.value("air_volume_m3", 4.3e9);
  const auto basis = em.value("generation_emission_basis", std::string("electrical_output"));
  if (basis == "electrical_output") {
    sc.emissions.generation_basis = GenerationEmissionBasis::ElectricalOutput;
  } else if (basis == "fuel_input") {
    sc.emissions.generation_basis = GenerationEmissionBasis::FuelInput;
  } else {
    throw Error(ErrorCode::InvalidConfig, "generation_emission_basis is electrical_output or fuel_input");
  }
  sc.emissions.generation_fuel_btu_per_gal = em.value("generation_fuel_btu_per_gal", 138500.0);
  sc.emissions.validate();

  const auto& so = j.at("social");
  for (const auto& br : so.at("income_brackets")) {
    sc.social.income_brackets.push_back({br.at("mean_income").get<double>(), br.at("fraction").get<double>()});
  }
  sc.social.survey_indicators = so.at("survey_indicators").get<std::vector<double>>();
  sc.social.households = so.value("households", 0);
  sc.social.validate();

  for (const auto& p : j.at("pathways")) sc.pathways.push_back(pathway_of(p));
  if (sc.pathways.empty()) throw Error(ErrorCode::InvalidConfig, "scenario defines no pathways");
  std::set<std::string> names;
  for (const auto& p : sc.pathways) {
    if (!names.insert(p.name).second) throw Error(ErrorCode::InvalidConfig, "duplicate pathway " + p.name);
  }
  sc.baseline_pathway = j.value("baseline", sc.pathways.front().name);
  sc.pathway(sc.baseline_pathway);
  return sc;
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    const json j = json::parse(in);
    return scenario_of(j, path.parent_path());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

}  // namespace tees
