#include "tees/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "tees/error.hpp"

namespace tees {

namespace {

using namespace std::chrono;

// Box-Muller on 53-bit uniforms so the stream does not depend on the
// standard library's distribution implementations.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stationary AR(1) path with the given marginal standard deviation.
std::vector<double> ar1(Gaussian& rng, std::size_t n, double phi, double sd) {
  std::vector<double> out(n);
  double x = sd * rng();
  const double innovation = sd * std::sqrt(1.0 - phi * phi);
  for (auto& v : out) {
    v = x;
    x = phi * x + innovation * rng();
  }
  return out;
}

// Linear interpolation between knots placed at 0, 1, 2, ...
double knot_value(const std::vector<double>& knots, double x) {
  if (x <= 0.0) return knots.front();
  const auto i = static_cast<std::size_t>(x);
  if (i + 1 >= knots.size()) return knots.back();
  const double f = x - static_cast<double>(i);
  return knots[i] * (1.0 - f) + knots[i + 1] * f;
}

double deg(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace

Profiles synthesize_profiles(const ProfileOptions& o) {
  if (o.days < 1) throw Error(ErrorCode::InvalidConfig, "profile needs at least one day");
  if (o.dt.count() <= 0 || 1440 % o.dt.count() != 0) {
    throw Error(ErrorCode::IncompatibleStep, "profile step must divide a day");
  }
  const auto days = static_cast<std::size_t>(o.days);
  const std::size_t n = days * static_cast<std::size_t>(1440 / o.dt.count());

  Gaussian rng(o.seed);
  const auto weather = ar1(rng, days + 2, 0.75, o.weather_sd_c);
  const auto cloud = ar1(rng, days + 2, 0.6, 1.2);
  const auto noise = ar1(rng, days * 24 + 2, 0.7, 0.03 * o.mean_demand_kw);

  const auto day0 = floor<std::chrono::days>(o.start);
  const year_month_day ymd{day0};
  const sys_days jan1{ymd.year() / January / 1};
  const double doy0 = static_cast<double>((day0 - jan1).count()) +
                      static_cast<double>(duration_cast<minutes>(o.start - day0).count()) / 1440.0;
  const double phi = deg(o.latitude_deg);

  std::vector<double> demand(n), pv(n), temp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // Sample at the middle of each interval.
    const double elapsed_days = (static_cast<double>(k) + 0.5) * static_cast<double>(o.dt.count()) / 1440.0;
    const double doy = doy0 + elapsed_days;
    const double hour = std::fmod(doy, 1.0) * 24.0;
    const double season = std::cos(2.0 * std::numbers::pi * (doy - 20.0) / 365.25);

    // Winter spells swing far wider than summer weather does.
    const double spread = 0.65 + 0.35 * season;
    temp[k] = o.mean_temp_c - o.seasonal_temp_c * season + spread * knot_value(weather, elapsed_days + 0.5) -
              o.diurnal_temp_c * std::cos(2.0 * std::numbers::pi * (hour - 4.0) / 24.0);

    // Clock time runs about 1.5 h ahead of solar time in the region.
    const double decl = deg(23.44) * std::sin(2.0 * std::numbers::pi * (284.0 + doy) / 365.25);
    const double omega = deg(15.0 * (hour - 1.5 - 12.0));
    const double sin_el = std::sin(phi) * std::sin(decl) + std::cos(phi) * std::cos(decl) * std::cos(omega);
    const double clearness = 0.15 + 0.85 / (1.0 + std::exp(-(0.8 + knot_value(cloud, elapsed_days + 0.5))));
    pv[k] = sin_el > 0.0 ? o.pv_capacity_kw * 0.85 * std::pow(sin_el, 0.8) * clearness : 0.0;

    const double diurnal = -0.12 * std::cos(2.0 * std::numbers::pi * (hour - 5.0) / 24.0);
    demand[k] = std::max(0.2 * o.mean_demand_kw, o.mean_demand_kw * (1.0 + diurnal) + o.seasonal_demand_kw * season +
                                                     knot_value(noise, elapsed_days * 24.0));
  }
  return {TimeSeries(o.start, o.dt, std::move(demand), Unit::Kilowatt),
          TimeSeries(o.start, o.dt, std::move(pv), Unit::Kilowatt),
          TimeSeries(o.start, o.dt, std::move(temp), Unit::Celsius)};
}

CopCurve arctic_cop_curve() {
  return CopCurve({{-30.0, 1.45},
                   {-25.0, 1.6},
                   {-20.0, 1.75},
                   {-15.0, 1.95},
                   {-10.0, 2.2},
                   {-5.0, 2.45},
                   {0.0, 2.75},
                   {5.0, 3.05},
                   {10.0, 3.3},
                   {15.0, 3.5}});
}

std::vector<PathwayConfig> case_study_pathways() {
  const auto hp = [](std::string name, bool large, double gamma, double pv_scale) {
    PathwayConfig p;
    p.name = std::move(name);
    p.hp_size_mbtu_h = large ? 18.0 : 12.0;
    p.hp_rated_power_kw = large ? 4.14 : 2.81;
    p.hp_cutoff_temp_c = -20.0;
    p.coordination_gamma = gamma;
    p.pv_scale = pv_scale;
    return p;
  };
  PathwayConfig base;
  base.name = "TP1";
  return {base,
          hp("TP2a", true, 0.0, 1.0),
          hp("TP2b", false, 0.0, 1.0),
          hp("TP3a", true, 80.0, 1.0),
          hp("TP3b", false, 80.0, 1.0),
          hp("TP4a", true, 80.0, 2.118),
          hp("TP4b", false, 80.0, 2.118)};
}

Scenario synthetic_scenario(const SyntheticOptions& o) {
  if (o.houses < 0 || o.houses_per_transformer < 1) throw Error(ErrorCode::InvalidConfig, "bad synthetic topology");
  auto profile = o.profile;
  if (profile.dt > o.dispatch_dt) profile.dt = o.dispatch_dt;
  const Profiles prof = synthesize_profiles(profile);

  Scenario sc;
  sc.name = "synthetic";
  sc.demand = prof.demand;
  sc.pv = prof.pv;
  sc.outdoor_temp = prof.outdoor_temp;
  sc.dt = o.dispatch_dt;
  sc.chunk_days = 7;

  sc.generator = {0.99, 35.50, 1373.0, 505.0, 12.23};
  sc.battery = {384.0, 0.95, o.battery ? 250.0 : 0.0, 0.2, 0.9, 0.5};
  sc.cop = arctic_cop_curve();

  std::vector<Transformer> transformers;
  std::vector<House> houses;
  int remaining = o.houses;
  for (int t = 1; remaining > 0; ++t) {
    const int here = std::min(remaining, o.houses_per_transformer);
    Transformer tr;
    tr.id = "L" + std::to_string(t);
    tr.rated_kva = o.transformer_kva;
    tr.connections = SectorCounts{here, 0, 0};
    for (int h = 1; h <= here; ++h) houses.push_back({tr.id + "-h" + std::to_string(h), tr.id, 1});
    transformers.push_back(std::move(tr));
    remaining -= here;
  }
  Transformer rest;
  rest.id = "REST";
  rest.rated_kva = 500.0;
  rest.connections = SectorCounts{std::max(0, o.village_residential - o.houses), o.village_community,
                                  o.village_commercial};
  transformers.push_back(std::move(rest));
  sc.topology = Topology(std::move(transformers), std::move(houses), SectorShares{});

  auto& ec = sc.economics;
  ec.fuel_price_gen = 10.17;
  ec.fuel_price_heat = 16.14;
  ec.fuel_efficiency_kwh_per_gal = 12.23;
  ec.o_and_m_annual = 440000.0;
  ec.lv_catalog = {{25.0, 2500.0}, {37.5, 3000.0}, {50.0, 4000.0}, {75.0, 6000.0}, {100.0, 10000.0}};
  ec.mv_catalog = {{112.5, 33226.0}, {150.0, 36672.0}, {225.0, 48259.0}, {300.0, 52533.0}, {500.0, 70905.0}};
  ec.base_system_cost = 1.3e6;
  ec.baseline_heating_gal_per_house = 650.0;

  sc.emissions.generation = {73.96, 0.003, 0.0006, 1.0, 28.0, 265.0};
  sc.emissions.heating = {73.25, 0.003, 0.0006, 1.0, 25.0, 298.0};

  sc.social.income_brackets = {{15000.0, 0.08}, {56000.0, 0.34}, {120000.0, 0.32}, {200000.0, 0.26}};
  sc.social.survey_indicators = {0.6326, 0.3674, 0.2311};
  sc.social.households = o.village_residential;

  sc.pathways = case_study_pathways();
  sc.baseline_pathway = "TP1";
  return sc;
}

}  // namespace tees
