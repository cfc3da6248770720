#include <numeric>

#include "doctest.h"
#include "scratch_dir.hpp"
#include "tees/error.hpp"
#include "tees/scenario.hpp"

using namespace tees;

namespace {

TimeSeries flat(double kw, std::size_t n = 4) {
  return TimeSeries(parse_timestamp("2023-01-01"), std::chrono::minutes{5}, std::vector<double>(n, kw), Unit::Kilowatt);
}

Transformer lv(std::string id, int res, int com, int cml, double kva = 25.0) {
  Transformer t;
  t.id = std::move(id);
  t.rated_kva = kva;
  t.connections = SectorCounts{res, com, cml};
  return t;
}

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

constexpr const char* kScenarioJson = R"({
  "name": "tiny",
  "series": {"demand": "demand.csv", "pv": "pv.csv", "outdoor_temp": "temp.csv"},
  "dt_minutes": 5,
  "chunk_days": 1,
  "window": {"from": "2023-01-01", "to": "2023-01-02"},
  "generator": {"alpha": 0.99, "c0": 35.5, "p_max_kw": 1373, "unit_capacity_kw": 505,
                "fuel_efficiency_kwh_per_gal": 12.23},
  "battery": {"capacity_kwh": 384, "eta": 0.95, "p_max_kw": 250, "soc_min": 0.2, "soc_max": 0.9},
  "cop_curve": [[-30, 1.45], [15, 3.5]],
  "house_params": {"c_a": [0.21, 0.25], "c_m": [0.81, 0.99], "h_m": [1.76, 2.17], "u_a": [0.09, 0.12],
                   "q_oil_max_kw": 10},
  "topology": {
    "sector_shares": {"residential": 0.4, "community": 0.25, "commercial": 0.35},
    "transformers": [
      {"id": "T1", "rated_kva": 25, "connections": {"residential": 3, "community": 1}, "houses": 3},
      {"id": "T2", "rated_kva": 15, "connections": {"residential": 4, "commercial": 2}, "represented_houses": 4},
      {"id": "M1", "rated_kva": 75, "kind": "MV", "downstream": ["T1", "T2"]}
    ]
  },
  "economics": {"fuel_price_gen": 10.17, "fuel_price_heat": 16.14, "o_and_m_annual": 1000,
                "lv_catalog": [[25, 2500], [50, 4000]], "mv_catalog": [[112.5, 33226]],
                "baseline_heating_gal_per_house": 650},
  "emissions": {"generation": {"co2": 73.96, "ch4": 0.003, "n2o": 0.0006, "gwp": [1, 28, 265]},
                "heating": {"co2": 73.25, "ch4": 0.003, "n2o": 0.0006, "gwp": [1, 25, 298]}},
  "social": {"income_brackets": [{"mean_income": 20000, "fraction": 0.5}, {"mean_income": 60000, "fraction": 0.5}],
             "survey_indicators": [0.5, 0.3]},
  "pathways": [{"name": "base"}, {"name": "hp", "hp_size_mbtu_h": 12, "hp_rated_power_kw": 2.81,
                "coordination_gamma": 80, "comfort_band": [18, 22]}],
  "baseline": "base"
})";

void write_series(const ScratchDir& dir) {
  std::string csv = "timestamp,value\n";
  for (int h = 0; h < 24; ++h) csv += "2023-01-01T" + std::string(h < 10 ? "0" : "") + std::to_string(h) + ":00Z,1\n";
  dir.write("demand.csv", csv);
  dir.write("pv.csv", csv);
  dir.write("temp.csv", csv);
}

}  // namespace

TEST_CASE("demand split by sector share and connection count") {
  SUBCASE("one transformer with 2 of 10 residential connections") {
    const Topology topo({lv("A", 2, 0, 0), lv("B", 8, 4, 6)}, {}, SectorShares{});
    const auto parts = disaggregate_demand(flat(100.0), topo);
    for (double v : parts.at("A").values()) CHECK(v == doctest::Approx(8.0).epsilon(1e-12));
  }
  SUBCASE("a single transformer owning everything gets the whole total") {
    const Topology topo({lv("A", 5, 2, 1)}, {}, SectorShares{});
    const auto parts = disaggregate_demand(flat(123.4), topo);
    for (double v : parts.at("A").values()) CHECK(v == doctest::Approx(123.4).epsilon(1e-12));
  }
  SUBCASE("sector pools of 40, 25 and 35 kW") {
    const Topology topo({lv("R", 1, 0, 0), lv("C", 0, 1, 0), lv("M", 0, 0, 1)}, {}, SectorShares{});
    const auto parts = disaggregate_demand(flat(100.0), topo);
    CHECK(parts.at("R")[0] == doctest::Approx(40.0));
    CHECK(parts.at("C")[0] == doctest::Approx(25.0));
    CHECK(parts.at("M")[0] == doctest::Approx(35.0));
  }
}

TEST_CASE("disaggregation conserves the total and aggregates MV units") {
  std::vector<Transformer> trs{lv("A", 3, 1, 0), lv("B", 7, 0, 2), lv("C", 0, 3, 5)};
  Transformer mv;
  mv.id = "M";
  mv.kind = TransformerKind::MV;
  mv.rated_kva = 75.0;
  mv.phase_count = 3;
  mv.downstream = {"A", "B"};
  trs.push_back(mv);
  const Topology topo(trs, {}, SectorShares{});
  std::vector<double> v{50.0, 180.5, 260.25, 0.0, 1e-3};
  const TimeSeries total(parse_timestamp("2023-01-01"), std::chrono::minutes{5}, v, Unit::Kilowatt);
  const auto parts = disaggregate_demand(total, topo);
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double sum = parts.at("A")[k] + parts.at("B")[k] + parts.at("C")[k];
    CHECK(sum == doctest::Approx(v[k]).epsilon(1e-12));
    CHECK(parts.at("M")[k] == doctest::Approx(parts.at("A")[k] + parts.at("B")[k]).epsilon(1e-12));
  }
}

TEST_CASE("disaggregation errors") {
  Transformer bare;
  bare.id = "X";
  bare.rated_kva = 10.0;
  CHECK(code_of([&] { disaggregate_demand(flat(1.0), Topology({bare, lv("A", 1, 1, 1)}, {}, SectorShares{})); }) ==
        ErrorCode::MissingCounts);
  CHECK(code_of([] { disaggregate_demand(flat(1.0), Topology({lv("A", 4, 0, 2)}, {}, SectorShares{})); }) ==
        ErrorCode::ZeroSectorConnections);
  // A zero share needs no connections.
  const auto parts = disaggregate_demand(flat(10.0), Topology({lv("A", 4, 0, 2)}, {}, SectorShares{0.5, 0.0, 0.5}));
  CHECK(parts.at("A")[0] == doctest::Approx(10.0));
}

TEST_CASE("topology validation") {
  CHECK(code_of([] { Topology({lv("A", 1, 1, 1, 0.0)}, {}, SectorShares{}); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { Topology({lv("A", 1, 1, 1)}, {{"h", "B", 1}}, SectorShares{}); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { Topology({lv("A", 1, 1, 1)}, {}, SectorShares{0.5, 0.5, 0.5}); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { Topology({lv("A", 1, 1, 1), lv("A", 1, 1, 1)}, {}, SectorShares{}); }) ==
        ErrorCode::InvalidConfig);
  const Topology topo({lv("A", 2, 0, 0), lv("B", 1, 1, 1)}, {{"a1", "A", 1}, {"a2", "A", 3}, {"b1", "B", 1}},
                      SectorShares{});
  CHECK(topo.household_count() == 5);
  CHECK(topo.houses_served(0) == std::vector<int>{0, 1});
  CHECK(topo.houses_served(1) == std::vector<int>{2});
}

TEST_CASE("house parameters are seeded draws inside the ranges") {
  const HouseParamRanges r;
  const auto a = draw_house_params(r, 50, 42);
  const auto b = draw_house_params(r, 50, 42);
  const auto c = draw_house_params(r, 50, 43);
  REQUIRE(a.size() == 50);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].c_a == b[i].c_a);
    CHECK(a[i].u_a == b[i].u_a);
    differs = differs || a[i].c_a != c[i].c_a;
    CHECK(a[i].c_a >= 0.21);
    CHECK(a[i].c_a <= 0.25);
    CHECK(a[i].c_m >= 0.81);
    CHECK(a[i].c_m <= 0.99);
    CHECK(a[i].h_m >= 1.76);
    CHECK(a[i].h_m <= 2.17);
    CHECK(a[i].u_a >= 0.09);
    CHECK(a[i].u_a <= 0.12);
  }
  CHECK(differs);
}

TEST_CASE("pathway validation") {
  PathwayConfig p;
  p.name = "x";
  CHECK_NOTHROW(p.validate());
  CHECK_FALSE(p.has_heat_pumps());
  p.pv_scale = -1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p.pv_scale = 1.0;
  p.comfort = {22.0, 18.0};
  CHECK_THROWS_AS(p.validate(), Error);
  p.comfort = {18.0, 22.0};
  p.coordination_gamma = -80.0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("scenario file loads") {
  ScratchDir dir;
  write_series(dir);
  const auto path = dir.write("scenario.json", kScenarioJson);
  const auto sc = load_scenario(path);
  CHECK(sc.name == "tiny");
  CHECK(sc.demand.size() == 24);
  CHECK(sc.demand.dt() == std::chrono::minutes{60});
  CHECK(sc.dt == std::chrono::minutes{5});
  CHECK(sc.chunk_days == 1);
  REQUIRE(sc.window_from.has_value());
  CHECK(*sc.window_to - *sc.window_from == std::chrono::hours{24});
  CHECK(sc.generator.c0 == 35.5);
  CHECK(sc.battery.soc_init == 0.5);
  CHECK(sc.economics.fuel_efficiency_kwh_per_gal == 12.23);
  CHECK(sc.emissions.heating.composite() == doctest::Approx(73.25 + 0.075 + 0.1788));
  REQUIRE(sc.topology.transformers().size() == 3);
  CHECK(sc.topology.houses().size() == 4);
  CHECK(sc.topology.household_count() == 7);
  CHECK(sc.topology.houses().back().id == "T2-rep");
  CHECK(sc.topology.houses_served(2).size() == 4);
  CHECK(sc.pathways.size() == 2);
  CHECK(sc.pathway("hp").coordination_gamma == 80.0);
  CHECK(sc.pathway("hp").has_heat_pumps());
  CHECK(sc.baseline_pathway == "base");
  CHECK_THROWS_AS(sc.pathway("nope"), Error);
}

TEST_CASE("scenario file errors") {
  ScratchDir dir;
  write_series(dir);
  CHECK(code_of([&] { load_scenario(dir.path() / "absent.json"); }) == ErrorCode::IoError);
  CHECK(code_of([&] { load_scenario(dir.write("bad.json", "{ not json")); }) == ErrorCode::InvalidConfig);
  std::string broken = kScenarioJson;
  broken.replace(broken.find("\"baseline\": \"base\""), 18, "\"baseline\": \"zzz\"");
  CHECK(code_of([&] { load_scenario(dir.write("b.json", broken)); }) == ErrorCode::InvalidConfig);
  std::string missing = kScenarioJson;
  missing.replace(missing.find("\"generator\""), 11, "\"genset\"");
  CHECK(code_of([&] { load_scenario(dir.write("m.json", missing)); }) == ErrorCode::InvalidConfig);
}
