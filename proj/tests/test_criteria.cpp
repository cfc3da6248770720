#include <cmath>
#include <random>

#include "doctest.h"
#include "scratch_dir.hpp"
#include "support/oracle.hpp"
#include "tees/criteria.hpp"
#include "tees/error.hpp"
#include "tees/synthetic.hpp"

using namespace tees;

namespace {

EconomicParams case_economics() {
  SyntheticOptions o;
  o.profile.start = parse_timestamp("2023-01-01");
  o.profile.days = 1;
  return synthetic_scenario(o).economics;
}

Transformer lv(const std::string& id, double kva) {
  Transformer t;
  t.id = id;
  t.rated_kva = kva;
  t.connections = SectorCounts{1, 0, 0};
  return t;
}

}  // namespace

TEST_CASE("upgrade factor averages upgraded over original capacity") {
  const auto econ = case_economics();
  const std::vector<TransformerUpgrade> none{size_transformer(lv("a", 15), 20.0, econ.lv_catalog, 1.5),
                                             size_transformer(lv("b", 25), 37.5, econ.lv_catalog, 1.5)};
  CHECK(iuf(none) == 1.0);
  CHECK(infra_cost(none, econ) == 0.0);

  const std::vector<TransformerUpgrade> mixed{size_transformer(lv("a", 10), 20.0, econ.lv_catalog, 1.5),
                                              size_transformer(lv("b", 15), 15.0, econ.lv_catalog, 1.5)};
  CHECK(mixed[0].upgraded_kva == 25.0);
  CHECK(iuf(mixed) == doctest::Approx(1.75));

  // A peak just above the trigger picks the smallest catalog size that carries it.
  CHECK(size_transformer(lv("c", 25), 37.6, econ.lv_catalog, 1.5).upgraded_kva == 50.0);
  CHECK(size_transformer(lv("c", 25), 30.0, econ.lv_catalog, 1.0).upgraded_kva == 37.5);

  std::vector<TransformerUpgrade> doubled;
  for (double kva : {50.0, 75.0}) {
    doubled.push_back({"x", TransformerKind::LV, kva / 2.0, kva, kva});
  }
  CHECK(iuf(doubled) == 2.0);
  CHECK(infra_cost(doubled, econ) == 10000.0);

  const std::vector<TransformerUpgrade> mv{{"m", TransformerKind::MV, 75.0, 120.0, 112.5}};
  CHECK(infra_cost(mv, econ) == 33226.0);
  const std::vector<TransformerUpgrade> odd{{"m", TransformerKind::LV, 25.0, 40.0, 40.0}};
  CHECK_THROWS_AS(infra_cost(odd, econ), Error);
  try {
    size_transformer(lv("big", 25), 150.0, econ.lv_catalog, 1.5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PeakExceedsCatalog);
  }
}

TEST_CASE("resource adequacy counts steps above the threshold") {
  CHECK(resource_adequacy({100, 200, 300}, 505.0) == 0.0);
  CHECK(resource_adequacy({100, 405, 300, 404}, 505.0) == 25.0);
  // 2.5 % of a 1000-step profile above 404 kW.
  std::vector<double> p(1000, 350.0);
  for (int k = 0; k < 25; ++k) p[static_cast<std::size_t>(k * 40)] = 420.0;
  CHECK(resource_adequacy(p, 505.0, 0.8) == doctest::Approx(2.5));
  CHECK_THROWS_AS(resource_adequacy(p, 505.0, 0.0), Error);
}

TEST_CASE("retail rate spreads supply cost over sales") {
  EconomicParams e;
  e.fuel_price_gen = 10.17;
  e.fuel_efficiency_kwh_per_gal = 12.23;
  CHECK(retail_rate(1e6, e, 1e6) == doctest::Approx(10.17 / 12.23).epsilon(1e-12));
  CHECK(retail_rate(1e6, e, 1e6) == doctest::Approx(0.8316).epsilon(1e-4));
  e.o_and_m_annual = 50000.0;
  CHECK(retail_rate(0.0, e, 2e5) == doctest::Approx(0.25));
  e.ipp_energy_kwh = 1e5;
  e.ipp_rate = 0.2;
  CHECK(retail_rate(0.0, e, 2e5) == doctest::Approx(0.35));
  try {
    retail_rate(1.0, e, 0.0);
    FAIL("expected an error");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::ZeroSales);
  }
}

TEST_CASE("assistance level") {
  const CeaParams cea;
  const auto high = cea_level(1.2, cea);
  CHECK(high.r_cea == doctest::Approx((1.0 - 0.1985) * 0.95).epsilon(1e-12));
  CHECK(high.r_subsidized == doctest::Approx(1.2 - high.r_cea).epsilon(1e-12));
  CHECK(std::abs(high.r_cea - 0.7614) < 5e-5);
  CHECK(std::abs(high.r_subsidized - 0.4386) < 5e-5);
  CHECK(cea_level(0.99, cea).r_cea == doctest::Approx(0.751925).epsilon(1e-12));
  CHECK(cea_level(cea.r_base, cea).r_cea == 0.0);
  CHECK(cea_level(0.1, cea).r_cea == 0.0);

  double last = 0.0;
  for (double r = 0.0; r < 2.0; r += 0.01) {
    const auto c = cea_level(r, cea);
    CHECK(c.r_cea + c.r_subsidized == doctest::Approx(r).epsilon(1e-15));
    CHECK(c.r_cea >= last);
    if (r >= cea.r_max) CHECK(c.r_cea == doctest::Approx(high.r_cea));
    last = c.r_cea;
  }
}

TEST_CASE("household electric cost") {
  std::array<double, 12> months{};
  CHECK(annual_household_electric_cost(months, 0.99, 0.4386, 750.0) == 0.0);
  months[0] = 900.0;
  CHECK(annual_household_electric_cost(months, 0.99, 0.4386, 750.0) == doctest::Approx(477.45));
  std::array<double, 12> same;
  same.fill(900.0);
  CHECK(annual_household_electric_cost(same, 0.99, 0.4386, 750.0) == doctest::Approx(12 * 477.45));

  // Continuous and non-decreasing through the eligibility limit.
  double last = -1.0;
  for (double use = 700.0; use <= 800.0; use += 0.5) {
    months[0] = use;
    const double c = annual_household_electric_cost(months, 0.99, CeaParams{});
    CHECK(c >= last);
    if (last >= 0.0) CHECK(c - last <= 0.5 * 0.99 + 1e-9);
    last = c;
  }
}

TEST_CASE("heating cost") {
  CHECK(annual_heating_cost(650.0, 16.14) == doctest::Approx(10491.0).epsilon(1e-12));
  CHECK(annual_heating_cost(0.0, 16.14) == 0.0);
}

TEST_CASE("emission factors") {
  EmissionParams p;
  p.generation = {73.96, 0.003, 0.0006, 1.0, 28.0, 265.0};
  CHECK(p.generation.composite() == doctest::Approx(74.203).epsilon(1e-12));
  CHECK(emissions_co2e(1000.0, p.generation) == doctest::Approx(74.203).epsilon(1e-12));
  CHECK(emissions_co2e(0.0, p.generation) == 0.0);
  CHECK(pm25(0.0, p) == 0.0);
  CHECK(p.air_volume_m3 == 43e6 * 100.0);
  // 1000 mmBtu at 5.9 g each over 4.3e9 m3.
  CHECK(pm25(1000.0, p) == doctest::Approx(5.9e9 / 4.3e9).epsilon(1e-12));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(0.0, 1e5);
  for (int i = 0; i < 50; ++i) {
    const double a = d(rng), b = d(rng), s = d(rng) / 1e4;
    CHECK(emissions_co2e(a + b, p.generation) ==
          doctest::Approx(emissions_co2e(a, p.generation) + emissions_co2e(b, p.generation)).epsilon(1e-12));
    CHECK(emissions_co2e(s * a, p.generation) == doctest::Approx(s * emissions_co2e(a, p.generation)).epsilon(1e-12));
    CHECK(pm25(a + b, p) == doctest::Approx(pm25(a, p) + pm25(b, p)).epsilon(1e-12));
  }
}

TEST_CASE("energy burden and poverty") {
  const auto single = energy_burden(2000.0, {{10000.0, 1.0}});
  CHECK(single.mean_pct == doctest::Approx(20.0));
  CHECK(single.burdened_population_pct == 100.0);

  const std::vector<IncomeBracket> brackets{{15000.0, 0.5}, {60000.0, 0.5}};
  const auto full = energy_burden(9000.0, brackets);
  const auto half = energy_burden(4500.0, brackets);
  CHECK(half.mean_pct == doctest::Approx(full.mean_pct / 2.0));
  CHECK(full.bracket_pct[0] == doctest::Approx(60.0));
  CHECK(full.burdened_population_pct == 100.0);
  CHECK(half.burdened_population_pct == 50.0);

  SocialParams s;
  s.survey_indicators = {0.0, 0.0};
  CHECK(epi(s) == 0.0);
  CHECK(epi_tp(0.40, 0.33) == doctest::Approx(0.268));
  CHECK(epi_tp(0.40, 0.0) == 0.40);
  for (double sv = 0.0; sv <= 1.0; sv += 0.1) CHECK(epi_tp(0.4, sv) <= 0.4);
  CHECK_THROWS_AS(epi_tp(0.4, 1.5), Error);
  s.survey_indicators.clear();
  CHECK_THROWS_AS(epi(s), Error);
}

TEST_CASE("assessment of a solved week") {
  SyntheticOptions o;
  o.houses = 4;
  o.profile.start = parse_timestamp("2023-01-09");
  o.profile.days = 7;
  const auto sc = synthetic_scenario(o);
  const auto houses = draw_house_params(sc.house_ranges, 4, 11);
  const auto run = [&](const std::string& name) {
    const auto p = build_problem(sc, sc.pathway(name), houses, sc.demand.start(), sc.demand.end());
    return std::pair{p, solve(p)};
  };
  const auto [p1, s1] = run("TP1");
  const auto [p2, s2] = run("TP2b");

  const auto flows = annual_flows({{s1, p1, {}}}, sc);
  CHECK(flows.window_hours == doctest::Approx(168.0));
  double month_sum = 0.0;
  for (double m : flows.house_monthly_kwh) month_sum += m;
  // The whole window lies in January, so every month runs at the window's rate.
  double window_kwh = 0.0;
  for (double d : p1.base_demand) window_kwh += 0.4 / 116.0 * d * p1.dt_hours();
  CHECK(month_sum == doctest::Approx(window_kwh * 8760.0 / 168.0).epsilon(1e-9));
  CHECK(std::isnan(flows.house_oil_gallons));

  const auto base = assess(s1, p1, sc, sc.pathway("TP1"), nullptr);
  CHECK(base.saving_pct == 0.0);
  CHECK(base.co2e_reduction_pct == 0.0);
  CHECK(base.annual_heat_cost_per_house == doctest::Approx(10491.0));
  CHECK(base.epi_pct == doctest::Approx(100.0 * (0.6326 + 0.3674 + 0.2311) / 3.0));
  CHECK(base.retail_rate == doctest::Approx(retail_rate(flows.generation_kwh, sc.economics, flows.sold_kwh)));
  // Heating emissions: 650 gal of oil per household.
  CHECK(base.co2e_heating_t ==
        doctest::Approx(650.0 * 138500.0 / 1e6 * 116 * sc.emissions.heating.composite() / 1000.0));

  try {
    assess(s2, p2, sc, sc.pathway("TP2b"), nullptr);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingBaseline);
  }
  const auto hp = assess(s2, p2, sc, sc.pathway("TP2b"), &base);
  for (double v : criteria_values(hp)) CHECK(std::isfinite(v));
  CHECK(hp.iuf >= 1.0);
  CHECK(hp.annual_heat_cost_per_house < base.annual_heat_cost_per_house);
  CHECK(hp.saving_pct == doctest::Approx(100.0 * (base.total_energy_cost_per_house - hp.total_energy_cost_per_house) /
                                         base.total_energy_cost_per_house));
  CHECK(hp.co2e_power_t > base.co2e_power_t);
  CHECK(hp.co2e_heating_t < base.co2e_heating_t);
}

TEST_CASE("windows in different months are scaled month by month") {
  SyntheticOptions o;
  o.houses = 0;
  o.profile.start = parse_timestamp("2023-01-01");
  o.profile.days = 1;
  const auto sc = synthetic_scenario(o);
  const auto window = [&](const char* start, double kw, double transformer_kw) {
    auto p = oracle::toy_problem(288, {}, 0.0);
    p.start = parse_timestamp(start);
    p.base_demand.assign(288, kw);
    p.transformer_houses = {{}};
    p.transformer_demand = {std::vector<double>(288, transformer_kw)};
    auto s = solve(p);
    return RollingResult{std::move(s), std::move(p), {}};
  };
  const auto f = annual_flows({window("2023-01-10", 100.0, 30.0), window("2023-07-04", 50.0, 80.0)}, sc);
  CHECK(f.window_hours == doctest::Approx(48.0));
  // January and July at their own rates, the other 7272 h at the mean 75 kW.
  CHECK(f.generation_kwh == doctest::Approx(100.0 * 744 + 50.0 * 744 + 75.0 * 7272).epsilon(1e-9));
  CHECK(f.sold_kwh == doctest::Approx(f.generation_kwh).epsilon(1e-9));
  CHECK(f.transformer_peak_kva == std::vector<double>{80.0});
  CHECK(f.p_g.size() == 576);
  const double per_house = 0.4 / 116.0;
  CHECK(f.house_monthly_kwh[0] == doctest::Approx(per_house * 100.0 * 744));
  CHECK(f.house_monthly_kwh[6] == doctest::Approx(per_house * 50.0 * 744));
  CHECK(f.house_monthly_kwh[1] == doctest::Approx(per_house * 75.0 * 672));
}

TEST_CASE("criteria CSV round trip") {
  ScratchDir dir;
  CriteriaReport a = report_from_values("TP1", std::vector<double>(16, 1.5));
  CriteriaReport b = report_from_values("TP2a", {2.4, 2.5, 172000, 0.93, 0.70, 0.23, 4430, 4240, 8670, 32.7, 520, 312,
                                                 23.9, 17.9, 13.3, 26.9});
  write_criteria_csv(dir.path() / "c.csv", {a, b});
  const auto back = read_criteria_csv(dir.path() / "c.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[1].pathway == "TP2a");
  CHECK(criteria_values(back[1]) == criteria_values(b));
  CHECK(criteria_values(back[0]) == criteria_values(a));

  dir.write("bad.csv", "pathway,iuf\nTP1,1\n");
  CHECK_THROWS_AS(read_criteria_csv(dir.path() / "bad.csv"), Error);
}
