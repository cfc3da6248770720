#include "tees/dispatch.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>

#include "tees/error.hpp"
#include "tees/format.hpp"
#include "tees/lp/branch_and_bound.hpp"

namespace tees {

namespace {

constexpr std::chrono::hours kDay{24};

double comfort_mid(const ComfortBand& band) { return 0.5 * (band.t_min + band.t_max); }

}  // namespace

std::vector<HeatingMode> heating_mode_schedule(const TimeSeries& t_out, double cutoff) {
  const auto per_day = static_cast<std::size_t>(std::chrono::duration_cast<Minutes>(kDay) / t_out.dt());
  if (per_day == 0 || kDay % t_out.dt() != Minutes{0} || t_out.size() % per_day != 0) {
    throw Error(ErrorCode::PartialDay, "outdoor temperature does not cover whole days");
  }
  std::vector<HeatingMode> modes;
  for (std::size_t k = 0; k < t_out.size(); k += per_day) {
    const auto first = t_out.values().begin() + static_cast<long>(k);
    const double lowest = *std::min_element(first, first + static_cast<long>(per_day));
    modes.push_back(lowest < cutoff ? HeatingMode::Oil : HeatingMode::HeatPump);
  }
  return modes;
}

void DispatchProblem::validate() const {
  const auto check = [this](std::size_t n, const char* what) {
    if (n != steps) throw Error(ErrorCode::LengthMismatch, std::string(what) + " length differs from horizon");
  };
  if (steps == 0) throw Error(ErrorCode::EmptySeries, "empty horizon");
  check(pv.size(), "pv");
  check(base_demand.size(), "demand");
  check(t_out.size(), "outdoor temperature");
  check(cop.size(), "cop");
  if (gamma < 0.0) throw Error(ErrorCode::InvalidConfig, "gamma must be >= 0");
  generator.validate();
  battery.validate();
  if (!houses.empty()) {
    if (steps_per_day == 0 || day_modes.size() * steps_per_day < steps) {
      throw Error(ErrorCode::PartialDay, "heating schedule does not cover the horizon");
    }
    if (!(comfort.t_min < comfort.t_max)) throw Error(ErrorCode::InvalidConfig, "empty comfort band");
    if (hp_min_kw < 0.0 || hp_max_kw < hp_min_kw) throw Error(ErrorCode::InvalidConfig, "bad heat pump bounds");
    for (const auto& h : houses) h.validate();
    if (house_count.size() != houses.size()) throw Error(ErrorCode::LengthMismatch, "house counts missing");
    for (double c : house_count) {
      if (!(c >= 1.0)) throw Error(ErrorCode::InvalidConfig, "house count must be >= 1");
    }
  }
  const std::size_t nt = transformer_ids.size();
  if (transformer_demand.size() != nt || transformer_rating_kw.size() != nt || transformer_houses.size() != nt) {
    throw Error(ErrorCode::LengthMismatch, "transformer tables disagree in size");
  }
  for (const auto& d : transformer_demand) check(d.size(), "transformer demand");
  for (const auto& hs : transformer_houses) {
    for (int h : hs) {
      if (h < 0 || static_cast<std::size_t>(h) >= houses.size()) {
        throw Error(ErrorCode::InvalidConfig, "transformer refers to an unknown house");
      }
    }
  }
}

DispatchProblem build_problem(const Scenario& scenario, const PathwayConfig& pathway,
                              const std::vector<HouseThermalParams>& houses, Timestamp from, Timestamp to) {
  if (to <= from || (to - from) % kDay != std::chrono::seconds{0}) {
    throw Error(ErrorCode::WindowMismatch, "window must span a positive number of whole days");
  }
  const auto prepare = [&](const TimeSeries& ts) { return slice(resample(ts, scenario.dt), from, to); };
  const TimeSeries demand = prepare(scenario.demand);
  const TimeSeries pv = scale_renewable(prepare(scenario.pv), pathway.pv_scale);
  const TimeSeries t_out = prepare(scenario.outdoor_temp);

  DispatchProblem p;
  p.start = from;
  p.dt = scenario.dt;
  p.steps = demand.size();
  p.pv = pv.values();
  p.base_demand = demand.values();
  p.t_out = t_out.values();
  p.cop.reserve(p.steps);
  for (double t : p.t_out) p.cop.push_back(cop_lookup(scenario.cop, t));
  p.generator = scenario.generator;
  p.battery = scenario.battery;
  p.steps_per_day = static_cast<std::size_t>(std::chrono::duration_cast<Minutes>(kDay) / scenario.dt);
  p.comfort = pathway.comfort;
  p.initial_indoor_temperature = scenario.initial_indoor.resolve(pathway.comfort);
  p.gamma = pathway.coordination_gamma;

  const auto& topo = scenario.topology;
  if (pathway.has_heat_pumps()) {
    if (houses.size() != topo.houses().size()) {
      throw Error(ErrorCode::LengthMismatch, "need thermal parameters for each of the " +
                                                 std::to_string(topo.houses().size()) + " houses");
    }
    p.houses = houses;
    for (const auto& h : topo.houses()) p.house_count.push_back(h.count);
    p.day_modes = heating_mode_schedule(t_out, pathway.hp_cutoff_temp_c);
    p.hp_min_kw = pathway.hp_min_power_kw;
    p.hp_max_kw = pathway.hp_rated_power_kw;
  }

  const auto demands = disaggregate_demand(demand, topo);
  for (std::size_t t = 0; t < topo.transformers().size(); ++t) {
    const auto& tr = topo.transformers()[t];
    p.transformer_ids.push_back(tr.id);
    p.transformer_demand.push_back(demands.at(tr.id).values());
    p.transformer_rating_kw.push_back(tr.rated_kva);
    p.transformer_houses.push_back(p.houses.empty() ? std::vector<int>{} : topo.houses_served(static_cast<int>(t)));
  }
  p.validate();
  return p;
}

namespace {

// Column indices of the dispatch LP.
struct Layout {
  std::vector<int> g, pv, c, d, e;
  std::vector<std::vector<int>> hp, oil, ta, tm, ex;
};

struct Model {
  lp::LinearProgram lp;
  lp::ComplementarityPairs pairs;
  Layout at;
};

Model build_lp(const DispatchProblem& p) {
  Model m;
  auto& lp = m.lp;
  auto& at = m.at;
  const std::size_t n = p.steps;
  const double dt = p.dt_hours();
  const auto& gen = p.generator;
  const auto& bat = p.battery;
  const double e_init = bat.soc_init * bat.capacity_kwh;

  for (std::size_t k = 0; k < n; ++k) {
    at.g.push_back(lp.add_variable(gen.alpha * dt, 0.0, gen.p_max_kw));
    at.pv.push_back(lp.add_variable(0.0, 0.0, p.pv[k]));
    at.c.push_back(lp.add_variable(0.0, 0.0, bat.p_max_kw));
    at.d.push_back(lp.add_variable(0.0, 0.0, bat.p_max_kw));
  }
  lp.add_objective_offset(gen.c0 * dt * static_cast<double>(n));
  for (std::size_t k = 0; k <= n; ++k) {
    const bool pinned = k == 0 || k == n;
    at.e.push_back(pinned ? lp.add_variable(0.0, e_init, e_init)
                          : lp.add_variable(0.0, bat.soc_min * bat.capacity_kwh, bat.soc_max * bat.capacity_kwh));
  }

  const double t0 = p.initial_indoor_temperature.value_or(comfort_mid(p.comfort));
  const std::size_t nh = p.houses.size();
  at.hp.resize(nh);
  at.oil.resize(nh);
  at.ta.resize(nh);
  at.tm.resize(nh);
  for (std::size_t h = 0; h < nh; ++h) {
    for (std::size_t k = 0; k < n; ++k) {
      const bool hp_day = p.mode_at(k) == HeatingMode::HeatPump;
      at.hp[h].push_back(hp_day ? lp.add_variable(0.0, p.hp_min_kw, p.hp_max_kw) : lp.add_variable(0.0, 0.0, 0.0));
      at.oil[h].push_back(hp_day ? lp.add_variable(0.0, 0.0, 0.0)
                                 : lp.add_variable(0.0, 0.0, p.houses[h].q_oil_max));
    }
    for (std::size_t k = 0; k <= n; ++k) {
      const bool pinned = k == 0 || (k == n && p.periodic_indoor_temperature);
      at.ta[h].push_back(pinned ? lp.add_variable(0.0, t0, t0)
                                : lp.add_variable(0.0, p.comfort.t_min, p.comfort.t_max));
      at.tm[h].push_back(k == 0 ? lp.add_variable(0.0, t0, t0) : lp.add_variable(0.0, -100.0, 100.0));
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    // Supply equals base demand plus heat pumps plus charging.
    const int balance = lp.add_row(p.base_demand[k], p.base_demand[k]);
    lp.add_coefficient(balance, at.g[k], 1.0);
    lp.add_coefficient(balance, at.pv[k], 1.0);
    lp.add_coefficient(balance, at.d[k], 1.0);
    lp.add_coefficient(balance, at.c[k], -1.0);
    for (std::size_t h = 0; h < nh; ++h) lp.add_coefficient(balance, at.hp[h][k], -p.house_count[h]);

    if (bat.p_max_kw > 0.0) {
      const int source = lp.add_row(-lp::kInf, p.pv[k]);
      lp.add_coefficient(source, at.c[k], 1.0);
      lp.add_coefficient(source, at.g[k], -1.0);
      const int hull = lp.add_row(-lp::kInf, bat.p_max_kw);
      lp.add_coefficient(hull, at.c[k], 1.0);
      lp.add_coefficient(hull, at.d[k], 1.0);
      m.pairs.emplace_back(at.c[k], at.d[k]);
    }

    const int soc = lp.add_row(0.0, 0.0);
    lp.add_coefficient(soc, at.e[k + 1], 1.0);
    lp.add_coefficient(soc, at.e[k], -1.0);
    lp.add_coefficient(soc, at.c[k], -dt * bat.eta);
    lp.add_coefficient(soc, at.d[k], dt / bat.eta);

    for (std::size_t h = 0; h < nh; ++h) {
      const auto& hp = p.houses[h];
      // Air node, multiplied through by C_a / dt.
      const int air = lp.add_row(hp.u_a * p.t_out[k], hp.u_a * p.t_out[k]);
      lp.add_coefficient(air, at.ta[h][k + 1], hp.c_a / dt);
      lp.add_coefficient(air, at.ta[h][k], -hp.c_a / dt + hp.u_a + hp.h_m);
      lp.add_coefficient(air, at.tm[h][k], -hp.h_m);
      lp.add_coefficient(air, at.hp[h][k], -p.cop[k]);
      lp.add_coefficient(air, at.oil[h][k], -1.0);
      // Mass node, multiplied through by C_m / dt.
      const int mass = lp.add_row(0.0, 0.0);
      lp.add_coefficient(mass, at.tm[h][k + 1], hp.c_m / dt);
      lp.add_coefficient(mass, at.tm[h][k], -hp.c_m / dt + hp.h_m);
      lp.add_coefficient(mass, at.ta[h][k], -hp.h_m);
    }
  }

  // Transformer overload penalty; only meaningful with heat pumps to steer.
  const std::size_t nt = p.transformer_ids.size();
  at.ex.resize(nt);
  if (p.gamma > 0.0 && nh > 0) {
    for (std::size_t t = 0; t < nt; ++t) {
      if (p.transformer_houses[t].empty()) continue;
      for (std::size_t k = 0; k < n; ++k) {
        const int ex = lp.add_variable(p.gamma, 0.0, lp::kInf);
        at.ex[t].push_back(ex);
        const int row = lp.add_row(-lp::kInf, p.transformer_rating_kw[t] - p.transformer_demand[t][k]);
        for (int h : p.transformer_houses[t]) lp.add_coefficient(row, at.hp[h][k], p.house_count[h]);
        lp.add_coefficient(row, ex, -1.0);
      }
    }
  }
  return m;
}

double snap(double value, double lo, double hi) {
  const double tol = 1e-7;
  if (value < lo + tol * (1.0 + std::abs(lo))) return lo;
  if (value > hi - tol * (1.0 + std::abs(hi))) return hi;
  return value;
}

void fill_transformers(const DispatchProblem& p, DispatchSolution& s) {
  const std::size_t nt = p.transformer_ids.size();
  s.transformer_load.assign(nt, std::vector<double>(p.steps));
  s.transformer_excess.assign(nt, std::vector<double>(p.steps));
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t k = 0; k < p.steps; ++k) {
      double load = p.transformer_demand[t][k];
      for (int h : p.transformer_houses[t]) load += p.house_count[h] * s.p_hp[h][k];
      s.transformer_load[t][k] = load;
      s.transformer_excess[t][k] = std::max(0.0, load - p.transformer_rating_kw[t]);
    }
  }
}

double evaluate_objective(const DispatchProblem& p, const DispatchSolution& s) {
  const double dt = p.dt_hours();
  double cost = 0.0;
  for (double g : s.p_g) cost += (p.generator.alpha * g + p.generator.c0) * dt;
  if (p.gamma > 0.0 && !p.houses.empty()) {
    for (std::size_t t = 0; t < s.transformer_excess.size(); ++t) {
      if (p.transformer_houses[t].empty()) continue;
      for (double ex : s.transformer_excess[t]) cost += p.gamma * ex;
    }
  }
  return cost;
}

}  // namespace

DispatchSolution solve(const DispatchProblem& problem, const SolveOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  problem.validate();
  const auto& p = problem;
  for (std::size_t k = 0; k < p.steps; ++k) {
    const double supply = p.generator.p_max_kw + p.pv[k] + p.battery.p_max_kw;
    double need = p.base_demand[k];
    if (!p.houses.empty() && p.mode_at(k) == HeatingMode::HeatPump) {
      need += p.hp_min_kw * std::accumulate(p.house_count.begin(), p.house_count.end(), 0.0);
    }
    if (need > supply) {
      throw Error(ErrorCode::Infeasible, "demand " + format_number(need) + " kW exceeds available supply at " +
                                             format_timestamp(p.start + p.dt * static_cast<long>(k)));
    }
  }

  const Model model = build_lp(p);
  lp::BranchOptions bo;
  bo.relative_gap = options.relative_gap;
  bo.time_limit_seconds = options.time_limit_seconds;
  bo.ipm.parallel = options.parallel_kernels;
  const lp::BranchResult r = lp::solve_with_complementarity(model.lp, model.pairs, bo);
  if (r.status == lp::BranchStatus::Infeasible) {
    throw Error(ErrorCode::Infeasible, "no dispatch satisfies the constraints (comfort band, supply or SoC limits)");
  }
  if (r.status == lp::BranchStatus::NumericalFailure) {
    throw Error(ErrorCode::NumericalFailure, "interior-point solver failed to converge");
  }
  if (r.status == lp::BranchStatus::Timeout && r.x.empty()) {
    throw Error(ErrorCode::SolverTimeout, "no complementary incumbent within the node or time limit");
  }

  const auto& x = r.x;
  const auto& at = model.at;
  const std::size_t n = p.steps;
  const std::size_t nh = p.houses.size();
  DispatchSolution s;
  s.start = p.start;
  s.dt = p.dt;
  s.p_g.resize(n);
  s.p_pv.resize(n);
  s.p_b_c.resize(n);
  s.p_b_d.resize(n);
  s.total_demand.resize(n);
  s.soc.resize(n + 1);
  s.p_hp.assign(nh, std::vector<double>(n));
  s.q_oil.assign(nh, std::vector<double>(n));
  s.t_a.assign(nh, std::vector<double>(n + 1));
  s.t_m.assign(nh, std::vector<double>(n + 1));

  for (std::size_t h = 0; h < nh; ++h) {
    for (std::size_t k = 0; k < n; ++k) {
      const bool hp_day = p.mode_at(k) == HeatingMode::HeatPump;
      s.p_hp[h][k] = hp_day ? snap(x[at.hp[h][k]], p.hp_min_kw, p.hp_max_kw) : 0.0;
      s.q_oil[h][k] = hp_day ? 0.0 : snap(x[at.oil[h][k]], 0.0, p.houses[h].q_oil_max);
    }
    for (std::size_t k = 0; k <= n; ++k) {
      s.t_a[h][k] = x[at.ta[h][k]];
      s.t_m[h][k] = x[at.tm[h][k]];
    }
  }
  for (std::size_t k = 0; k <= n; ++k) s.soc[k] = x[at.e[k]] / p.battery.capacity_kwh;
  for (std::size_t k = 0; k < n; ++k) {
    s.p_b_c[k] = snap(x[at.c[k]], 0.0, p.battery.p_max_kw);
    s.p_b_d[k] = snap(x[at.d[k]], 0.0, p.battery.p_max_kw);
    s.p_pv[k] = snap(x[at.pv[k]], 0.0, p.pv[k]);
    double hp = 0.0;
    for (std::size_t h = 0; h < nh; ++h) hp += p.house_count[h] * s.p_hp[h][k];
    s.total_demand[k] = p.base_demand[k] + hp;
    // Generator output closes the balance exactly after snapping.
    const double g = s.total_demand[k] + s.p_b_c[k] - s.p_pv[k] - s.p_b_d[k];
    s.p_g[k] = std::clamp(g, 0.0, p.generator.p_max_kw);
  }
  fill_transformers(p, s);

  s.objective = evaluate_objective(p, s);
  s.bound = r.bound;
  s.gap = std::max(0.0, (s.objective - r.bound) / std::max(std::abs(s.objective), 1e-9));
  s.status = r.status == lp::BranchStatus::Optimal ? "optimal" : "timeout";
  s.lp_solves = r.nodes;
  s.ipm_iterations = r.lp_iterations;
  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return s;
}

namespace {

struct ChunkPlan {
  Timestamp from;
  Timestamp to;
};

std::vector<ChunkPlan> plan_chunks(Timestamp from, Timestamp to, int chunk_days) {
  if (chunk_days < 1) throw Error(ErrorCode::InvalidConfig, "chunk must be at least one day");
  if (to <= from || (to - from) % kDay != std::chrono::seconds{0}) {
    throw Error(ErrorCode::WindowMismatch, "window must span a positive number of whole days");
  }
  std::vector<ChunkPlan> chunks;
  const auto span = kDay * chunk_days;
  for (Timestamp t = from; t < to; t += span) chunks.push_back({t, std::min<Timestamp>(t + span, to)});
  return chunks;
}

DispatchSolution solve_chunk(const Scenario& scenario, const PathwayConfig& pathway,
                             const std::vector<HouseThermalParams>& houses, const ChunkPlan& chunk,
                             const SolveOptions& options) {
  return solve(build_problem(scenario, pathway, houses, chunk.from, chunk.to), options);
}

template <typename T>
void append(std::vector<T>& dst, const std::vector<T>& src, std::size_t count) {
  dst.insert(dst.end(), src.begin(), src.begin() + static_cast<long>(count));
}

RollingResult merge(const Scenario& scenario, const PathwayConfig& pathway,
                    const std::vector<HouseThermalParams>& houses, Timestamp from, Timestamp to,
                    const std::vector<ChunkPlan>& plans, std::vector<DispatchSolution>& parts) {
  RollingResult out;
  out.problem = build_problem(scenario, pathway, houses, from, to);
  out.problem.chunk_starts.clear();
  auto& s = out.solution;
  s.start = from;
  s.dt = scenario.dt;
  const std::size_t nh = out.problem.houses.size();
  s.p_hp.resize(nh);
  s.q_oil.resize(nh);
  s.t_a.resize(nh);
  s.t_m.resize(nh);
  s.status = "optimal";
  double bound = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& part = parts[i];
    const std::size_t n = part.steps();
    out.problem.chunk_starts.push_back(s.p_g.size());
    append(s.p_g, part.p_g, n);
    append(s.p_pv, part.p_pv, n);
    append(s.p_b_c, part.p_b_c, n);
    append(s.p_b_d, part.p_b_d, n);
    append(s.soc, part.soc, n);
    append(s.total_demand, part.total_demand, n);
    for (std::size_t h = 0; h < nh; ++h) {
      append(s.p_hp[h], part.p_hp[h], n);
      append(s.q_oil[h], part.q_oil[h], n);
      append(s.t_a[h], part.t_a[h], n);
      append(s.t_m[h], part.t_m[h], n);
    }
    s.objective += part.objective;
    bound += part.bound;
    s.lp_solves += part.lp_solves;
    s.ipm_iterations += part.ipm_iterations;
    s.wall_seconds += part.wall_seconds;
    if (part.status != "optimal") s.status = part.status;
    out.chunks.push_back({i, plans[i].from, part.objective, part.gap, part.wall_seconds});
  }
  // Closing state of the last chunk.
  const auto& last = parts.back();
  s.soc.push_back(last.soc.back());
  for (std::size_t h = 0; h < nh; ++h) {
    s.t_a[h].push_back(last.t_a[h].back());
    s.t_m[h].push_back(last.t_m[h].back());
  }
  fill_transformers(out.problem, s);
  s.bound = bound;
  s.gap = std::max(0.0, (s.objective - bound) / std::max(std::abs(s.objective), 1e-9));
  return out;
}

[[noreturn]] void rethrow_with_chunk(std::size_t index, const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const Error& e) {
    std::string detail = e.what();
    const std::string prefix = std::string(to_string(e.code())) + ": ";
    if (detail.starts_with(prefix)) detail.erase(0, prefix.size());
    throw Error(e.code(), "chunk " + std::to_string(index) + ": " + detail);
  }
}

}  // namespace

RollingResult rolling_solve(const Scenario& scenario, const PathwayConfig& pathway,
                            const std::vector<HouseThermalParams>& houses, Timestamp from, Timestamp to,
                            int chunk_days, int workers, const SolveOptions& options) {
  const auto plans = plan_chunks(from, to, chunk_days);
  const auto count = static_cast<long>(plans.size());
  std::vector<DispatchSolution> parts(plans.size());
  std::vector<std::exception_ptr> errors(plans.size());
  SolveOptions inner = options;
  inner.parallel_kernels = false;  // each chunk solve stays on one thread
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, workers))
  for (long i = 0; i < count; ++i) {
    try {
      parts[i] = solve_chunk(scenario, pathway, houses, plans[i], inner);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i]) rethrow_with_chunk(i, errors[i]);
  }
  return merge(scenario, pathway, houses, from, to, plans, parts);
}

RollingResult rolling_solve_serial(const Scenario& scenario, const PathwayConfig& pathway,
                                   const std::vector<HouseThermalParams>& houses, Timestamp from, Timestamp to,
                                   int chunk_days, const SolveOptions& options) {
  const auto plans = plan_chunks(from, to, chunk_days);
  std::vector<DispatchSolution> parts;
  SolveOptions inner = options;
  inner.parallel_kernels = false;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    try {
      parts.push_back(solve_chunk(scenario, pathway, houses, plans[i], inner));
    } catch (...) {
      rethrow_with_chunk(i, std::current_exception());
    }
  }
  return merge(scenario, pathway, houses, from, to, plans, parts);
}

std::vector<Violation> validate(const DispatchSolution& s, const DispatchProblem& p, double tol) {
  std::vector<Violation> out;
  const auto flag = [&out, tol](const char* what, std::size_t k, int index, double amount) {
    if (amount > tol) out.push_back({what, k, index, amount});
  };
  const std::size_t n = p.steps;
  const std::size_t nh = p.houses.size();
  if (s.steps() != n || s.p_pv.size() != n || s.p_b_c.size() != n || s.p_b_d.size() != n ||
      s.soc.size() != n + 1 || s.p_hp.size() != nh || s.q_oil.size() != nh || s.t_a.size() != nh ||
      s.t_m.size() != nh) {
    out.push_back({"shape", 0, -1, 1.0});
    return out;
  }
  const double dt = p.dt_hours();
  const auto& bat = p.battery;
  std::vector<bool> chunk_end(n, false);
  for (std::size_t c : p.chunk_starts) {
    if (c > 0 && c <= n) chunk_end[c - 1] = true;
  }

  for (std::size_t k = 0; k < n; ++k) {
    double hp = 0.0;
    for (std::size_t h = 0; h < nh; ++h) hp += p.house_count[h] * s.p_hp[h][k];
    const double residual = p.base_demand[k] + hp + s.p_b_c[k] - s.p_g[k] - s.p_pv[k] - s.p_b_d[k];
    flag("power_balance", k, -1, std::abs(residual));
    flag("generator_bounds", k, -1, std::max(-s.p_g[k], s.p_g[k] - p.generator.p_max_kw));
    flag("pv_bounds", k, -1, std::max(-s.p_pv[k], s.p_pv[k] - p.pv[k]));
    flag("battery_power", k, -1,
         std::max({-s.p_b_c[k], -s.p_b_d[k], s.p_b_c[k] - bat.p_max_kw, s.p_b_d[k] - bat.p_max_kw}));
    flag("charge_discharge_exclusivity", k, -1, std::min(s.p_b_c[k], s.p_b_d[k]));
    flag("charge_source", k, -1, s.p_b_c[k] - p.pv[k] - s.p_g[k]);
    flag("soc_bounds", k, -1, std::max(bat.soc_min - s.soc[k], s.soc[k] - bat.soc_max));
    const double soc_next = s.soc[k] + dt / bat.capacity_kwh * (bat.eta * s.p_b_c[k] - s.p_b_d[k] / bat.eta);
    flag("soc_dynamics", k, -1, std::abs(s.soc[k + 1] - soc_next));
  }
  flag("soc_bounds", n, -1, std::max(bat.soc_min - s.soc[n], s.soc[n] - bat.soc_max));
  flag("soc_periodicity", n, -1, std::abs(s.soc[n] - s.soc[0]));

  for (std::size_t h = 0; h < nh; ++h) {
    const auto& hp = p.houses[h];
    for (std::size_t k = 0; k < n; ++k) {
      const bool hp_day = p.mode_at(k) == HeatingMode::HeatPump;
      if (hp_day) {
        flag("heat_pump_bounds", k, static_cast<int>(h),
             std::max(p.hp_min_kw - s.p_hp[h][k], s.p_hp[h][k] - p.hp_max_kw));
        flag("mode_exclusivity", k, static_cast<int>(h), std::abs(s.q_oil[h][k]));
      } else {
        flag("oil_bounds", k, static_cast<int>(h), std::max(-s.q_oil[h][k], s.q_oil[h][k] - hp.q_oil_max));
        flag("mode_exclusivity", k, static_cast<int>(h), std::abs(s.p_hp[h][k]));
      }
      flag("comfort_band", k + 1, static_cast<int>(h),
           std::max(p.comfort.t_min - s.t_a[h][k + 1], s.t_a[h][k + 1] - p.comfort.t_max));
      const EtpState next =
          etp_step(hp, {s.t_a[h][k], s.t_m[h][k]}, p.t_out[k], s.p_hp[h][k], p.cop[k], s.q_oil[h][k], dt);
      flag("air_temperature_dynamics", k, static_cast<int>(h), std::abs(s.t_a[h][k + 1] - next.t_a));
      if (!chunk_end[k]) {
        flag("mass_temperature_dynamics", k, static_cast<int>(h), std::abs(s.t_m[h][k + 1] - next.t_m));
      }
    }
    if (p.periodic_indoor_temperature) {
      flag("indoor_periodicity", n, static_cast<int>(h), std::abs(s.t_a[h][n] - s.t_a[h][0]));
    }
  }
  return out;
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

void dispatch_rows(std::ostream& out, const DispatchSolution& s) {
  for (std::size_t k = 0; k < s.steps(); ++k) {
    out << format_timestamp(s.start + s.dt * static_cast<long>(k)) << ',' << format_number(s.p_g[k]) << ','
        << format_number(s.p_pv[k]) << ',' << format_number(s.p_b_c[k]) << ',' << format_number(s.p_b_d[k]) << ','
        << format_number(s.soc[k]) << ',' << format_number(s.total_demand[k]) << '\n';
  }
}

void transformer_rows(std::ostream& out, const DispatchSolution& s) {
  for (std::size_t k = 0; k < s.steps(); ++k) {
    out << format_timestamp(s.start + s.dt * static_cast<long>(k));
    for (std::size_t t = 0; t < s.transformer_load.size(); ++t) {
      out << ',' << format_number(s.transformer_load[t][k]) << ',' << format_number(s.transformer_excess[t][k]);
    }
    out << '\n';
  }
}

void house_rows(std::ostream& out, const DispatchSolution& s) {
  for (std::size_t h = 0; h < s.p_hp.size(); ++h) {
    for (std::size_t k = 0; k < s.steps(); ++k) {
      out << format_timestamp(s.start + s.dt * static_cast<long>(k)) << ',' << h << ','
          << format_number(s.p_hp[h][k]) << ',' << format_number(s.q_oil[h][k]) << ','
          << format_number(s.t_a[h][k]) << ',' << format_number(s.t_m[h][k]) << '\n';
    }
  }
}

constexpr const char* kDispatchHeader = "timestamp,p_g,p_pv,p_b_c,p_b_d,soc,total_demand\n";
constexpr const char* kHouseHeader = "timestamp,house,p_hp,q_oil,t_a,t_m\n";

void transformer_header(std::ostream& out, const DispatchProblem& p) {
  out << "timestamp";
  for (const auto& id : p.transformer_ids) out << ',' << id << "_load," << id << "_excess";
  out << '\n';
}

}  // namespace

void write_dispatch_csv(const std::filesystem::path& path, const DispatchSolution& s) {
  auto out = open_csv(path);
  out << kDispatchHeader;
  dispatch_rows(out, s);
}

void write_dispatch_csv(const std::filesystem::path& path, const std::vector<RollingResult>& runs) {
  auto out = open_csv(path);
  out << kDispatchHeader;
  for (const auto& r : runs) dispatch_rows(out, r.solution);
}

void write_transformer_csv(const std::filesystem::path& path, const DispatchSolution& s,
                           const DispatchProblem& p) {
  auto out = open_csv(path);
  transformer_header(out, p);
  transformer_rows(out, s);
}

void write_transformer_csv(const std::filesystem::path& path, const std::vector<RollingResult>& runs) {
  auto out = open_csv(path);
  if (runs.empty()) return;
  transformer_header(out, runs.front().problem);
  for (const auto& r : runs) transformer_rows(out, r.solution);
}

void write_house_csv(const std::filesystem::path& path, const DispatchSolution& s) {
  auto out = open_csv(path);
  out << kHouseHeader;
  house_rows(out, s);
}

void write_house_csv(const std::filesystem::path& path, const std::vector<RollingResult>& runs) {
  auto out = open_csv(path);
  out << kHouseHeader;
  for (const auto& r : runs) house_rows(out, r.solution);
}

}  // namespace tees
