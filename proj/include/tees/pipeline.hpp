#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tees/criteria.hpp"
#include "tees/dispatch.hpp"
#include "tees/mcda.hpp"
#include "tees/scenario.hpp"

namespace tees {

struct Window {
  Timestamp from{};
  Timestamp to{};
};

// The first `days_per_month` days of every calendar month inside
// [from, to), clipped to it. Zero returns the window unchanged.
std::vector<Window> sample_windows(Timestamp from, Timestamp to, int days_per_month);

struct RunOptions {
  std::vector<std::string> pathways;  // empty runs every pathway
  std::optional<Timestamp> from;      // defaults: scenario window, then the series span
  std::optional<Timestamp> to;
  std::optional<Minutes> dt;
  std::optional<int> sample_days_per_month;  // default: 0 with an explicit window, else the scenario's
  std::uint64_t seed = 1;
  int workers = 1;
  SolveOptions solve;
};

struct PathwayRun {
  std::string pathway;
  std::vector<RollingResult> windows;
  CriteriaReport report;
};

struct RunResult {
  std::vector<Window> windows;
  std::vector<HouseThermalParams> houses;
  std::vector<PathwayRun> pathways;  // requested order; the baseline is added first when missing
};

// Applies the dt override and checks the selected pathways exist.
Scenario prepare_scenario(Scenario scenario, const RunOptions& options);

// Dispatch and assessment of every selected pathway. (pathway, window) jobs
// run on up to options.workers threads.
RunResult run_pathways(const Scenario& scenario, const RunOptions& options);

struct ScoreTable {
  std::vector<std::string> pathways;
  std::vector<Criterion> criteria;
  std::vector<double> weights;
  NormalizedMatrix normalized;
  std::vector<double> scores;
  std::vector<std::size_t> order;  // best first
};

ScoreTable score_reports(const std::vector<CriteriaReport>& reports, const std::vector<double>& weights);
void write_scores_csv(const std::filesystem::path& path, const ScoreTable& table);
void write_normalized_csv(const std::filesystem::path& path, const ScoreTable& table);

enum class SensitivityParameter { CutoffTemp, IndoorSetpoint, PvScale };

SensitivityParameter parse_sensitivity_parameter(const std::string& text);
std::string to_string(SensitivityParameter parameter);

// Sets the parameter on every heat-pump pathway; the baseline is left as is.
Scenario with_parameter(Scenario scenario, SensitivityParameter parameter, double value);

struct SensitivityRow {
  double value = 0.0;
  std::string pathway;
  double saving_pct = 0.0;
  double co2e_reduction_pct = 0.0;
  std::string status;  // "ok" or the error that stopped this point
};

std::vector<SensitivityRow> run_sensitivity(const Scenario& scenario, const RunOptions& options,
                                            SensitivityParameter parameter, const std::vector<double>& grid);
void write_sensitivity_csv(const std::filesystem::path& path, SensitivityParameter parameter,
                           const std::vector<SensitivityRow>& rows);

}  // namespace tees
