#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tees/devices.hpp"
#include "tees/scenario.hpp"
#include "tees/timeseries.hpp"

namespace tees {

enum class HeatingMode { HeatPump, Oil };

// One mode per 24 h window from the series start. A day is Oil when its
// minimum outdoor temperature is strictly below the cutoff.
std::vector<HeatingMode> heating_mode_schedule(const TimeSeries& t_out, double cutoff);

struct DispatchProblem {
  Timestamp start{};
  Minutes dt{5};
  std::size_t steps = 0;
  std::vector<double> pv;           // available PV, kW
  std::vector<double> base_demand;  // community demand without heat pumps, kW
  std::vector<double> t_out;        // degC
  std::vector<double> cop;
  GeneratorModel generator;
  BatteryModel battery;

  // Heat-pump fleet; empty when the pathway has no heat pumps.
  std::vector<HouseThermalParams> houses;
  std::vector<double> house_count;  // identical houses behind each entry
  std::vector<HeatingMode> day_modes;
  std::size_t steps_per_day = 288;
  double hp_min_kw = 0.0;
  double hp_max_kw = 0.0;
  ComfortBand comfort;
  // End each solve at the starting indoor temperature. Only small test
  // instances switch this off.
  bool periodic_indoor_temperature = true;
  // Air and mass temperature at the first step; the comfort midpoint if unset.
  std::optional<double> initial_indoor_temperature;

  // Transformers: base demand D_tau, rating and the houses each one serves.
  std::vector<std::string> transformer_ids;
  std::vector<std::vector<double>> transformer_demand;
  std::vector<double> transformer_rating_kw;
  std::vector<std::vector<int>> transformer_houses;
  double gamma = 0.0;  // $/kVA per step of excess

  // Steps at which an independently solved chunk begins (always contains 0).
  // Mass temperature is reset there, so its dynamics are not checked across.
  std::vector<std::size_t> chunk_starts{0};

  double dt_hours() const { return static_cast<double>(dt.count()) / 60.0; }
  HeatingMode mode_at(std::size_t k) const { return day_modes[k / steps_per_day]; }
  void validate() const;
};

struct DispatchSolution {
  Timestamp start{};
  Minutes dt{5};
  std::vector<double> p_g;
  std::vector<double> p_pv;  // PV actually used; the rest is curtailed
  std::vector<double> p_b_c;
  std::vector<double> p_b_d;
  std::vector<double> soc;  // fraction at the start of each step; size steps + 1
  std::vector<double> total_demand;
  std::vector<std::vector<double>> p_hp;   // [house][step], per single house
  std::vector<std::vector<double>> q_oil;  // [house][step]
  std::vector<std::vector<double>> t_a;    // [house][step], size steps + 1
  std::vector<std::vector<double>> t_m;
  std::vector<std::vector<double>> transformer_load;    // [transformer][step]
  std::vector<std::vector<double>> transformer_excess;  // [transformer][step]
  double objective = 0.0;  // $
  double bound = 0.0;
  double gap = 0.0;
  std::string status;
  int lp_solves = 0;
  int ipm_iterations = 0;
  double wall_seconds = 0.0;

  std::size_t steps() const { return p_g.size(); }
};

// Builds the problem for the window [from, to) of the scenario; the window
// must cover whole days inside every input series.
DispatchProblem build_problem(const Scenario& scenario, const PathwayConfig& pathway,
                              const std::vector<HouseThermalParams>& houses, Timestamp from, Timestamp to);

struct SolveOptions {
  double relative_gap = 0.005;
  double time_limit_seconds = 600.0;
  bool parallel_kernels = true;
};

DispatchSolution solve(const DispatchProblem& problem, const SolveOptions& options = {});

struct ChunkLog {
  std::size_t index = 0;
  Timestamp start{};
  double objective = 0.0;
  double gap = 0.0;
  double wall_seconds = 0.0;
};

struct RollingResult {
  DispatchSolution solution;
  DispatchProblem problem;  // concatenated inputs, used by validation and criteria
  std::vector<ChunkLog> chunks;
};

// Independent solves of consecutive chunk_days windows, run in parallel
// across up to `workers` threads and concatenated in chunk order.
RollingResult rolling_solve(const Scenario& scenario, const PathwayConfig& pathway,
                            const std::vector<HouseThermalParams>& houses, Timestamp from, Timestamp to,
                            int chunk_days, int workers, const SolveOptions& options = {});

// Same result computed one chunk after another on the calling thread.
RollingResult rolling_solve_serial(const Scenario& scenario, const PathwayConfig& pathway,
                                   const std::vector<HouseThermalParams>& houses, Timestamp from, Timestamp to,
                                   int chunk_days, const SolveOptions& options = {});

struct Violation {
  std::string constraint;
  std::size_t step = 0;
  int index = -1;  // house or transformer, -1 when not applicable
  double amount = 0.0;
};

inline constexpr double kFeasibilityTolerance = 1e-4;

std::vector<Violation> validate(const DispatchSolution& solution, const DispatchProblem& problem,
                                double tolerance = kFeasibilityTolerance);

void write_dispatch_csv(const std::filesystem::path& path, const DispatchSolution& solution);
void write_transformer_csv(const std::filesystem::path& path, const DispatchSolution& solution,
                           const DispatchProblem& problem);
void write_house_csv(const std::filesystem::path& path, const DispatchSolution& solution);

// Consecutive windows of one pathway in a single file.
void write_dispatch_csv(const std::filesystem::path& path, const std::vector<RollingResult>& runs);
void write_transformer_csv(const std::filesystem::path& path, const std::vector<RollingResult>& runs);
void write_house_csv(const std::filesystem::path& path, const std::vector<RollingResult>& runs);

}  // namespace tees
