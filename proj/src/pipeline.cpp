#include "tees/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <fstream>

#include "tees/error.hpp"
#include "tees/format.hpp"

namespace tees {

namespace {

using std::chrono::days;

Timestamp day_floor(Timestamp t) { return std::chrono::floor<days>(t); }

Timestamp series_begin(const Scenario& sc) {
  return std::max({sc.demand.start(), sc.pv.start(), sc.outdoor_temp.start()});
}

Timestamp series_end(const Scenario& sc) { return std::min({sc.demand.end(), sc.pv.end(), sc.outdoor_temp.end()}); }

std::vector<std::string> selected(const Scenario& sc, const RunOptions& o) {
  std::vector<std::string> names = o.pathways;
  if (names.empty()) {
    for (const auto& p : sc.pathways) names.push_back(p.name);
  }
  for (const auto& n : names) sc.pathway(n);  // throws on unknown names
  if (std::find(names.begin(), names.end(), sc.baseline_pathway) == names.end()) {
    names.insert(names.begin(), sc.baseline_pathway);
  }
  return names;
}

}  // namespace

std::vector<Window> sample_windows(Timestamp from, Timestamp to, int days_per_month) {
  if (!(from < to)) throw Error(ErrorCode::WindowMismatch, "window is empty");
  if (days_per_month < 0) throw Error(ErrorCode::InvalidConfig, "negative sample days");
  if (days_per_month == 0) return {{from, to}};
  using namespace std::chrono;
  std::vector<Window> out;
  year_month ym{year_month_day{floor<std::chrono::days>(from)}.year(), year_month_day{floor<std::chrono::days>(from)}.month()};
  while (true) {
    const Timestamp month_start = sys_days{ym / 1};
    if (month_start >= to) break;
    const Timestamp a = std::max(month_start, from);
    const Timestamp b = std::min(month_start + std::chrono::days{days_per_month}, to);
    if (a < b) out.push_back({a, b});
    ym += months{1};
  }
  return out;
}

Scenario prepare_scenario(Scenario sc, const RunOptions& o) {
  if (o.dt) {
    if (o.dt->count() <= 0) throw Error(ErrorCode::InvalidConfig, "dt must be positive");
    sc.dt = *o.dt;
  }
  selected(sc, o);
  return sc;
}

RunResult run_pathways(const Scenario& sc, const RunOptions& o) {
  RunResult result;
  const auto names = selected(sc, o);
  Timestamp from = o.from.value_or(sc.window_from.value_or(day_floor(series_begin(sc))));
  Timestamp to = o.to.value_or(sc.window_to.value_or(series_end(sc)));
  if (!o.to && !sc.window_to) to = from + std::chrono::floor<days>(to - from);
  // An explicit window is solved whole unless sampling is asked for too.
  const int sample_days = o.sample_days_per_month.value_or(o.from || o.to ? 0 : sc.sample_days_per_month);
  result.windows = sample_windows(from, to, sample_days);
  result.houses = draw_house_params(sc.house_ranges, sc.topology.houses().size(), o.seed);

  const std::size_t nw = result.windows.size();
  const std::size_t jobs = names.size() * nw;
  const int workers = std::max(1, o.workers);
  std::vector<RollingResult> solved(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  const auto job = [&](std::size_t i, int inner_workers) {
    const auto& pathway = sc.pathway(names[i / nw]);
    const auto& w = result.windows[i % nw];
    try {
      solved[i] = inner_workers > 1
                      ? rolling_solve(sc, pathway, result.houses, w.from, w.to, sc.chunk_days, inner_workers, o.solve)
                      : rolling_solve_serial(sc, pathway, result.houses, w.from, w.to, sc.chunk_days, o.solve);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (jobs >= static_cast<std::size_t>(workers)) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (long i = 0; i < static_cast<long>(jobs); ++i) job(static_cast<std::size_t>(i), 1);
  } else {
    // Too few jobs to fill the workers: spread each job's chunks instead.
    for (std::size_t i = 0; i < jobs; ++i) job(i, workers);
  }
  for (std::size_t i = 0; i < jobs; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      std::string what = e.what();
      const std::string prefix = std::string(to_string(e.code())) + ": ";
      if (what.rfind(prefix, 0) == 0) what.erase(0, prefix.size());
      std::string where = names[i / nw];
      if (nw > 1) where += " [" + format_timestamp(result.windows[i % nw].from) + "]";
      throw Error(e.code(), where + ": " + what);
    }
  }

  for (std::size_t p = 0; p < names.size(); ++p) {
    PathwayRun run;
    run.pathway = names[p];
    for (std::size_t w = 0; w < nw; ++w) run.windows.push_back(std::move(solved[p * nw + w]));
    result.pathways.push_back(std::move(run));
  }
  const auto base = std::find_if(result.pathways.begin(), result.pathways.end(),
                                 [&](const PathwayRun& r) { return r.pathway == sc.baseline_pathway; });
  base->report = assess(base->windows, sc, sc.pathway(base->pathway), nullptr);
  for (auto& run : result.pathways) {
    if (&run != &*base) run.report = assess(run.windows, sc, sc.pathway(run.pathway), &base->report);
  }
  return result;
}

ScoreTable score_reports(const std::vector<CriteriaReport>& reports, const std::vector<double>& weights) {
  ScoreTable t;
  CriteriaMatrix m;
  m.criteria = report_criteria();
  for (const auto& r : reports) {
    m.pathways.push_back(r.pathway);
    m.values.push_back(criteria_values(r));
  }
  m.weights = weights;
  t.normalized = normalize(m);
  t.pathways = m.pathways;
  t.criteria = m.criteria;
  t.weights = weights;
  t.scores = score(t.normalized, weights);
  t.order = rank(t.scores);
  return t;
}

void write_scores_csv(const std::filesystem::path& path, const ScoreTable& t) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  std::vector<std::size_t> position(t.pathways.size());
  for (std::size_t i = 0; i < t.order.size(); ++i) position[t.order[i]] = i + 1;
  out << "pathway,score,rank\n";
  for (std::size_t p = 0; p < t.pathways.size(); ++p) {
    out << t.pathways[p] << ',' << format_number(t.scores[p]) << ',' << position[p] << '\n';
  }
}

void write_normalized_csv(const std::filesystem::path& path, const ScoreTable& t) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "pathway";
  for (const auto& c : t.criteria) out << ',' << c.name;
  out << '\n';
  for (std::size_t p = 0; p < t.pathways.size(); ++p) {
    out << t.pathways[p];
    for (double v : t.normalized.values[p]) out << ',' << format_number(v);
    out << '\n';
  }
}

SensitivityParameter parse_sensitivity_parameter(const std::string& text) {
  if (text == "cutoff_temp") return SensitivityParameter::CutoffTemp;
  if (text == "indoor_setpoint") return SensitivityParameter::IndoorSetpoint;
  if (text == "pv_scale") return SensitivityParameter::PvScale;
  throw Error(ErrorCode::InvalidConfig, "unknown sensitivity parameter '" + text + "'");
}

std::string to_string(SensitivityParameter p) {
  switch (p) {
    case SensitivityParameter::CutoffTemp:
      return "cutoff_temp";
    case SensitivityParameter::IndoorSetpoint:
      return "indoor_setpoint";
    case SensitivityParameter::PvScale:
      return "pv_scale";
  }
  return "?";
}

Scenario with_parameter(Scenario sc, SensitivityParameter parameter, double value) {
  for (auto& p : sc.pathways) {
    if (!p.has_heat_pumps()) continue;
    switch (parameter) {
      case SensitivityParameter::CutoffTemp:
        p.hp_cutoff_temp_c = value;
        break;
      case SensitivityParameter::IndoorSetpoint: {
        const double width = p.comfort.t_max - p.comfort.t_min;
        p.comfort = {value, value + width};
        break;
      }
      case SensitivityParameter::PvScale:
        p.pv_scale = value;
        break;
    }
    p.validate();
  }
  return sc;
}

std::vector<SensitivityRow> run_sensitivity(const Scenario& sc, const RunOptions& o, SensitivityParameter parameter,
                                            const std::vector<double>& grid) {
  if (grid.empty()) throw Error(ErrorCode::InvalidConfig, "sensitivity grid is empty");
  std::vector<SensitivityRow> rows;
  for (double value : grid) {
    try {
      const auto result = run_pathways(with_parameter(sc, parameter, value), o);
      for (const auto& run : result.pathways) {
        if (run.pathway == sc.baseline_pathway) continue;
        rows.push_back({value, run.pathway, run.report.saving_pct, run.report.co2e_reduction_pct, "ok"});
      }
    } catch (const Error& e) {
      rows.push_back({value, "", 0.0, 0.0, e.what()});
    }
  }
  return rows;
}

void write_sensitivity_csv(const std::filesystem::path& path, SensitivityParameter parameter,
                           const std::vector<SensitivityRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << to_string(parameter) << ",pathway,cost_saving_pct,co2e_reduction_pct,status\n";
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    out << format_number(r.value) << ',' << r.pathway << ',' << format_number(r.saving_pct) << ','
        << format_number(r.co2e_reduction_pct) << ',' << status << '\n';
  }
}

}  // namespace tees
