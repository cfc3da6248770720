// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "scratch_dir.hpp"
#include "support/oracle.hpp"
#include "support/table8.hpp"
#include "tees/cli.hpp"
#include "tees/criteria.hpp"
#include "tees/devices.hpp"
#include "tees/dispatch.hpp"
#include "tees/error.hpp"
#include "tees/mcda.hpp"
#include "tees/scenario.hpp"
#include "tees/synthetic.hpp"

using namespace tees;
namespace fs = std::filesystem;

namespace {

const fs::path kExample = TEES_EXAMPLE_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Every solved instance, for the feasibility sweep.
struct Solved {
  std::string label;
  DispatchProblem problem;
  DispatchSolution solution;
};
std::vector<Solved> g_solved;

const DispatchSolution& keep(const std::string& label, const DispatchProblem& p, DispatchSolution s) {
  g_solved.push_back({label, p, std::move(s)});
  return g_solved.back().solution;
}

Scenario synthetic(int houses, const char* start, int days, std::uint64_t seed) {
  SyntheticOptions o;
  o.houses = houses;
  o.profile.start = parse_timestamp(start);
  o.profile.days = days;
  o.profile.seed = seed;
  return synthetic_scenario(o);
}

double peak(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

Outcome pce_anchor() {
  const auto sc = load_scenario(kExample / "scenario.json");
  const auto t0 = Clock::now();
  const auto level = cea_level(1.2, sc.economics.cea);
  const double ms = seconds_since(t0) * 1e3;
  const double d1 = std::abs(level.r_cea - 0.7614);
  const double d2 = std::abs(level.r_subsidized - 0.4386);
  return {d1 <= 1e-6 && d2 <= 1e-6 && ms < 1.0,
          fmt("got (%.6f, %.6f), printed (0.7614, 0.4386), |diff| %.1e/%.1e, %.3f ms", level.r_cea,
              level.r_subsidized, d1, d2, ms)};
}

Outcome generator_anchor() {
  const auto sc = load_scenario(kExample / "scenario.json");
  const double c = generator_cost(sc.generator, 100.0);
  return {c == 134.50, fmt("alpha %.2f, C %.2f -> %.10g $/h at 100 kW", sc.generator.alpha, sc.generator.c0, c)};
}

Outcome heating_anchor() {
  const auto sc = load_scenario(kExample / "scenario.json");
  const double c = annual_heating_cost(sc.economics.baseline_heating_gal_per_house, sc.economics.fuel_price_heat);
  return {c == 10491.0, fmt("%.0f gal x $%.2f = %.10g $/house-year", sc.economics.baseline_heating_gal_per_house,
                            sc.economics.fuel_price_heat, c)};
}

Outcome co2e_factor() {
  const auto sc = load_scenario(kExample / "scenario.json");
  const auto& f = sc.emissions.generation;
  const double composite = f.composite();
  bool linear = emissions_co2e(0.0, f) == 0.0;
  double worst = 0.0;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(0.0, 2e4);
  for (int i = 0; i < 200; ++i) {
    // Generator energy in MWh converted to fuel-equivalent mmBtu.
    const double a = d(rng) * 3.41214, b = d(rng) * 3.41214, s = d(rng) / 1e4;
    const double e_sum = emissions_co2e(a + b, f) - emissions_co2e(a, f) - emissions_co2e(b, f);
    const double e_scale = emissions_co2e(s * a, f) - s * emissions_co2e(a, f);
    worst = std::max({worst, std::abs(e_sum) / (1.0 + emissions_co2e(a + b, f)),
                      std::abs(e_scale) / (1.0 + emissions_co2e(s * a, f))});
  }
  linear = linear && worst < 1e-12;
  return {std::abs(composite - 74.203) < 1e-12 && linear,
          fmt("composite %.6f kg/mmBtu, additivity/homogeneity residual %.1e over 200 draws", composite, worst)};
}

Outcome oracle_equivalence() {
  constexpr int kLevels = 5;
  std::mt19937_64 rng(20230);
  const auto t0 = Clock::now();
  int agree = 0, total = 0;
  double worst_excess = 0.0;
  std::string failure;
  const auto check = [&](const DispatchProblem& p, const oracle::GridResult& grid, const std::string& label) {
    ++total;
    const auto& s = keep(label, p, solve(p));
    const double slack = grid.objective - s.objective;
    const double bound = oracle::discretization_bound(p, kLevels);
    const bool ok = grid.feasible() && s.objective <= grid.objective * (1.0 + 1e-7) && slack <= bound + 1e-7;
    worst_excess = std::max(worst_excess, slack / std::max(bound, 1e-12));
    if (ok) {
      ++agree;
    } else if (failure.empty()) {
      failure = fmt(", first miss %s: solver %.6f grid %.6f bound %.6f", label.c_str(), s.objective, grid.objective, bound);
    }
  };
  for (int i = 0; i < 10; ++i) {
    const auto p = oracle::random_instance(rng, 2, 12, false);
    check(p, oracle::separable_grid_search(p, kLevels), fmt("separable #%d", i));
  }
  for (int i = 0; i < 8; ++i) {
    const auto p = oracle::random_instance(rng, 1, 12, true);
    check(p, oracle::grid_search(p, kLevels), fmt("coupled 1x12 #%d", i));
  }
  for (int i = 0; i < 6; ++i) {
    const auto p = oracle::random_instance(rng, 2, 5, true);
    check(p, oracle::grid_search(p, kLevels), fmt("coupled 2x5 #%d", i));
  }
  const double secs = seconds_since(t0);
  return {agree == total && total >= 20 && secs < 60.0,
          fmt("%d/%d instances within the grid bound (worst gap %.0f%% of bound), %.1f s", agree, total,
              100.0 * worst_excess, secs) +
              failure};
}

Outcome coordination() {
  const auto t0 = Clock::now();
  // Ten houses through a late-winter week, heat pumps running most days.
  const auto sc = synthetic(10, "2023-03-06", 7, 21);
  const auto houses = draw_house_params(sc.house_ranges, 10, 21);
  auto loose = sc.pathway("TP2a");
  auto tight = loose;
  tight.coordination_gamma = 80.0;
  const auto p0 = build_problem(sc, loose, houses, sc.demand.start(), sc.demand.end());
  const auto p1 = build_problem(sc, tight, houses, sc.demand.start(), sc.demand.end());
  const auto& s0 = keep("winter week, gamma 0", p0, solve(p0));
  const auto& s1 = keep("winter week, gamma 80", p1, solve(p1));
  bool never_higher = true;
  double worst = -1e300;
  for (std::size_t t = 0; t < p0.transformer_ids.size(); ++t) {
    if (p0.transformer_houses[t].empty()) continue;
    const double rise = peak(s1.transformer_load[t]) - peak(s0.transformer_load[t]);
    worst = std::max(worst, rise);
    never_higher = never_higher && rise <= 1e-3;
  }

  // Surplus spring PV makes uncoordinated heat pumps draw at the same time.
  const auto spring = synthetic(10, "2023-03-20", 2, 8);
  const auto spring_houses = draw_house_params(spring.house_ranges, 10, 4);
  auto c0 = spring.pathway("TP2a");
  c0.pv_scale = 3.0;
  auto c1 = c0;
  c1.coordination_gamma = 80.0;
  const auto q0 = build_problem(spring, c0, spring_houses, spring.demand.start(), spring.demand.end());
  const auto q1 = build_problem(spring, c1, spring_houses, spring.demand.start(), spring.demand.end());
  const auto& r0 = keep("coincident, gamma 0", q0, solve(q0));
  const auto& r1 = keep("coincident, gamma 80", q1, solve(q1));
  double best_drop = 0.0;
  for (std::size_t t = 0; t < q0.transformer_ids.size(); ++t) {
    if (q0.transformer_houses[t].empty()) continue;
    best_drop = std::max(best_drop, peak(r0.transformer_load[t]) - peak(r1.transformer_load[t]));
  }
  const double secs = seconds_since(t0);
  return {never_higher && best_drop > 1e-3 && secs < 300.0,
          fmt("winter week max peak rise %+.2e kW; coincident instance peak drop %.2f kW; %.1f s", worst, best_drop,
              secs)};
}

Outcome pv_monotonicity() {
  const auto sc = synthetic(10, "2023-04-10", 7, 13);
  const auto houses = draw_house_params(sc.house_ranges, 10, 13);
  std::vector<double> objectives;
  for (double m : {1.0, 1.5, 2.0}) {
    auto pw = sc.pathway("TP3b");
    pw.pv_scale = m;
    const auto p = build_problem(sc, pw, houses, sc.demand.start(), sc.demand.end());
    objectives.push_back(keep(fmt("pv x%.1f", m), p, solve(p)).objective);
  }
  const bool ok = objectives[1] <= objectives[0] * (1.0 + 1e-7) && objectives[2] <= objectives[1] * (1.0 + 1e-7);
  return {ok, fmt("objective $%.2f, $%.2f, $%.2f at pv_scale 1.0, 1.5, 2.0", objectives[0], objectives[1],
                  objectives[2])};
}

Outcome etp_numerics() {
  const HouseThermalParams mid{0.23, 0.90, 0.105, 1.965, 10.0};
  const double dt = 5.0 / 60.0, t_out = -10.0, q = 3.2;
  EtpState s{20.0, 20.0};
  for (int k = 0; k < 48 * 12; ++k) s = etp_step(mid, s, t_out, 0.0, 1.0, q, dt);
  const double err = std::abs(s.t_a - (t_out + q / mid.u_a));
  double worst_rho = 0.0;
  bool decays = true;
  for (double ca : {0.21, 0.25})
    for (double cm : {0.81, 0.99})
      for (double hm : {1.76, 2.17})
        for (double ua : {0.09, 0.12}) {
          const HouseThermalParams c{ca, cm, ua, hm, 10.0};
          worst_rho = std::max(worst_rho, etp_spectral_radius(c, dt));
          EtpState x{30.0, 5.0};
          double prev = std::hypot(x.t_a, x.t_m);
          for (int day = 0; day < 5; ++day) {
            for (int k = 0; k < 288; ++k) x = etp_step(c, x, 0.0, 0.0, 1.0, 0.0, dt);
            const double dev = std::hypot(x.t_a, x.t_m);
            decays = decays && dev < prev;
            prev = dev;
          }
        }
  return {err < 0.01 && worst_rho < 1.0 && decays,
          fmt("48 h error %.2e degC; worst spectral radius %.4f over 16 corners; decay %s", err, worst_rho,
              decays ? "monotone" : "broken")};
}

Outcome mcda_reproduction() {
  const auto t0 = Clock::now();
  auto m = table8::matrix();
  const auto scores = score(normalize(m), m.weights);
  const auto order = rank(scores);
  const double secs = seconds_since(t0);
  // Printed ranking is TP4b, TP4a, TP3b, TP3a, TP2b, TP2a, TP1.
  bool ordering = true;
  for (std::size_t i = 0; i < order.size(); ++i) ordering = ordering && order[i] == order.size() - 1 - i;
  double worst = 0.0;
  std::string got;
  for (std::size_t p = 0; p < scores.size(); ++p) {
    worst = std::max(worst, std::abs(scores[p] - table8::kScores[p]));
    got += fmt("%s%.3f", p ? " " : "", scores[p]);
  }
  return {ordering && worst <= 0.02 && secs < 1.0,
          fmt("ordering %s; scores [%s] vs printed [0.42 0.52 0.58 0.62 0.63 0.74 0.75], max |diff| %.3f",
              ordering ? "reproduced" : "differs", got.c_str(), worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  ScratchDir a, b;
  const auto args = [&](const fs::path& out) {
    return std::vector<std::string>{"run",        "--scenario", (kExample / "scenario.json").string(),
                                    "--pathways", "TP1,TP2b,TP3b,TP4b",
                                    "--from",     "2023-02-13", "--to", "2023-02-15", "--seed", "42",
                                    "--out",      out.string()};
  };
  std::ostringstream sink;
  const int ra = cli::run(args(a.path()), sink, sink);
  const int rb = cli::run(args(b.path()), sink, sink);
  if (ra != 0 || rb != 0) return {false, "run failed: " + sink.str()};
  int same = 0, total = 0;
  std::string differing;
  for (const auto& e : fs::directory_iterator(a.path())) {
    const auto name = e.path().filename();
    // Wall-clock times are the one artifact that is not a function of the inputs.
    if (name == "timing.csv") continue;
    ++total;
    if (fs::exists(b.path() / name) && slurp(e.path()) == slurp(b.path() / name)) {
      ++same;
    } else {
      differing += " " + name.string();
    }
  }
  return {same == total && total >= 8,
          fmt("%d/%d artifacts byte-identical across two seeded runs (timing.csv excluded)", same, total) + differing};
}

Outcome desk_performance() {
  const auto sc = synthetic(20, "2023-03-06", 7, 9);
  const auto houses = draw_house_params(sc.house_ranges, 20, 9);
  const auto p = build_problem(sc, sc.pathway("TP3a"), houses, sc.demand.start(), sc.demand.end());
  const auto t0 = Clock::now();
  const auto& s = keep("20 houses x 1 week", p, solve(p));
  const double secs = seconds_since(t0);
  return {s.gap <= 0.005 && secs < 60.0,
          fmt("%zu steps, 20 houses: status %s, gap %.2e, %.1f s", p.steps, s.status.c_str(), s.gap, secs)};
}

Outcome feasibility_sweep() {
  std::size_t clean = 0;
  std::string first;
  for (const auto& x : g_solved) {
    const auto v = validate(x.solution, x.problem);
    if (v.empty()) {
      ++clean;
    } else if (first.empty()) {
      first = fmt("; %s: %zu violation(s), first %s at step %zu by %.2e", x.label.c_str(), v.size(),
                  v.front().constraint.c_str(), v.front().step, v.front().amount);
    }
  }
  return {clean == g_solved.size() && !g_solved.empty(),
          fmt("%zu/%zu solved instances pass validate()", clean, g_solved.size()) + first};
}

Outcome guarded(const std::function<Outcome()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {false, std::string("threw ") + e.what()};
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  // Criterion 6 checks the instances solved by the others, so it runs last.
  const std::vector<Criterion> criteria{
      {1, "assistance level anchor", pce_anchor},
      {2, "generator cost anchor", generator_anchor},
      {3, "heating cost anchor", heating_anchor},
      {4, "CO2e factor and linearity", co2e_factor},
      {5, "dispatch oracle equivalence", oracle_equivalence},
      {7, "coordination property", coordination},
      {8, "PV monotonicity", pv_monotonicity},
      {9, "ETP numerics", etp_numerics},
      {10, "MCDA reproduction", mcda_reproduction},
      {11, "end-to-end determinism", determinism},
      {12, "desk-scale performance", desk_performance},
      {6, "feasibility suite", feasibility_sweep},
  };
  std::vector<std::string> lines(13);
  int failed = 0;
  for (const auto& c : criteria) {
    const auto out = guarded(c.run);
    failed += out.pass ? 0 : 1;
    lines[c.id] = fmt("[%s] %2d %-28s ", out.pass ? "PASS" : "FAIL", c.id, c.name) + out.detail;
  }
  for (int i = 1; i <= 12; ++i) std::printf("%s\n", lines[i].c_str());
  std::printf("%d/12 criteria pass\n", 12 - failed);
  return failed == 0 ? 0 : 1;
}
