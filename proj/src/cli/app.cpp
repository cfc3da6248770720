#include "tees/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "tees/error.hpp"
#include "tees/format.hpp"
#include "tees/pipeline.hpp"

namespace tees::cli {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct Flags {
  std::string scenario;
  std::vector<std::string> pathways;
  std::string from;
  std::string to;
  int dt = 0;
  int sample_days = -1;
  std::string out = "out";
  std::string weights;
  std::uint64_t seed = 1;
  int workers = 1;
  bool detail = false;
  // compare
  std::string criteria;
  // sensitivity
  std::string parameter;
  std::vector<double> grid;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--scenario", f.scenario, "scenario JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--pathways", f.pathways, "comma-separated pathway names (default: all)")->delimiter(',');
  cmd->add_option("--from", f.from, "window start, YYYY-MM-DD[THH:MM:SSZ]");
  cmd->add_option("--to", f.to, "window end (exclusive)");
  cmd->add_option("--dt", f.dt, "dispatch step in minutes")->check(CLI::PositiveNumber);
  cmd->add_option("--sample-days", f.sample_days, "solve the first N days of each month (0 = every day)")
      ->check(CLI::Range(0, 28));
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--weights", f.weights, "JSON object of criterion weights")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "seed for the house thermal parameters");
  cmd->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
}

RunOptions options_of(const Flags& f) {
  RunOptions o;
  o.pathways = f.pathways;
  if (!f.from.empty()) o.from = parse_timestamp(f.from);
  if (!f.to.empty()) o.to = parse_timestamp(f.to);
  if (f.dt > 0) o.dt = Minutes{f.dt};
  if (f.sample_days >= 0) o.sample_days_per_month = f.sample_days;
  o.seed = f.seed;
  o.workers = f.workers;
  return o;
}

std::vector<double> weights_of(const Flags& f) {
  const auto criteria = report_criteria();
  if (f.weights.empty()) return std::vector<double>(criteria.size(), 1.0);
  return load_weights(f.weights, criteria);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::IoError, "cannot create output directory " + dir.string());
}

// Output directory for a fresh command; an error record left by an earlier
// failed run would otherwise sit next to good artifacts.
fs::path output_dir(const Flags& f) {
  const fs::path out = f.out;
  ensure_dir(out);
  std::error_code ec;
  fs::remove(out / "error.json", ec);
  return out;
}

void write_json(const fs::path& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void print_scores(std::ostream& os, const ScoreTable& t) {
  os << std::left << std::setw(10) << "rank" << std::setw(12) << "pathway" << "score\n";
  for (std::size_t i = 0; i < t.order.size(); ++i) {
    os << std::setw(10) << i + 1 << std::setw(12) << t.pathways[t.order[i]] << format_number(t.scores[t.order[i]])
       << '\n';
  }
  for (const auto& c : t.normalized.degenerate) os << "degenerate criterion: " << c << '\n';
}

// Per-chunk solver records. Everything here is a pure function of the inputs;
// wall times go to timing.csv instead.
void write_solve_log(const fs::path& path, const RunResult& result) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "pathway,window_from,chunk,chunk_start,objective,gap,status,lp_solves,ipm_iterations\n";
  for (const auto& run : result.pathways) {
    for (const auto& w : run.windows) {
      for (const auto& c : w.chunks) {
        out << run.pathway << ',' << format_timestamp(w.problem.start) << ',' << c.index << ','
            << format_timestamp(c.start) << ',' << format_number(c.objective) << ',' << format_number(c.gap) << ','
            << w.solution.status << ',' << w.solution.lp_solves << ',' << w.solution.ipm_iterations << '\n';
      }
    }
  }
}

void write_timing(const fs::path& path, const RunResult& result) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "pathway,window_from,chunk,wall_seconds\n";
  for (const auto& run : result.pathways) {
    for (const auto& w : run.windows) {
      for (const auto& c : w.chunks) {
        out << run.pathway << ',' << format_timestamp(w.problem.start) << ',' << c.index << ','
            << format_number(c.wall_seconds) << '\n';
      }
    }
  }
}

ordered_json summary_of(const Scenario& sc, std::uint64_t seed, const RunResult& result,
                        const std::optional<ScoreTable>& scores) {
  ordered_json j;
  j["scenario"] = sc.name;
  j["seed"] = seed;
  j["dt_minutes"] = sc.dt.count();
  j["chunk_days"] = sc.chunk_days;
  j["baseline"] = sc.baseline_pathway;
  ordered_json names = ordered_json::array();
  for (const auto& run : result.pathways) names.push_back(run.pathway);
  j["pathways"] = names;
  ordered_json windows = ordered_json::array();
  for (const auto& w : result.windows) windows.push_back({{"from", format_timestamp(w.from)}, {"to", format_timestamp(w.to)}});
  j["windows"] = windows;
  j["house_entries"] = result.houses.size();
  j["households"] = sc.topology.household_count();
  if (scores) {
    ordered_json ranking = ordered_json::array();
    for (auto i : scores->order) ranking.push_back(scores->pathways[i]);
    j["ranking"] = ranking;
    j["degenerate_criteria"] = scores->normalized.degenerate;
  } else {
    j["ranking"] = ordered_json::array();
    j["degenerate_criteria"] = ordered_json::array();
  }
  return j;
}

int do_run(const Flags& f, std::ostream& os) {
  const auto options = options_of(f);
  const Scenario sc = prepare_scenario(load_scenario(f.scenario), options);
  const auto weights = weights_of(f);
  const fs::path out = output_dir(f);

  const RunResult result = run_pathways(sc, options);
  std::vector<CriteriaReport> reports;
  for (const auto& run : result.pathways) {
    write_dispatch_csv(out / ("dispatch_" + run.pathway + ".csv"), run.windows);
    if (f.detail) {
      write_transformer_csv(out / ("transformers_" + run.pathway + ".csv"), run.windows);
      write_house_csv(out / ("houses_" + run.pathway + ".csv"), run.windows);
    }
    reports.push_back(run.report);
  }
  write_criteria_csv(out / "criteria.csv", reports);
  write_solve_log(out / "solve_log.csv", result);
  write_timing(out / "timing.csv", result);

  std::optional<ScoreTable> scores;
  if (reports.size() >= 2) {
    scores = score_reports(reports, weights);
    write_scores_csv(out / "scores.csv", *scores);
    write_normalized_csv(out / "normalized.csv", *scores);
  }
  write_json(out / "run_summary.json", summary_of(sc, f.seed, result, scores));

  os << result.pathways.size() << " pathway(s), " << result.windows.size() << " window(s) -> " << out.string() << '\n';
  if (scores) print_scores(os, *scores);
  return kExitOk;
}

int do_compare(const Flags& f, std::ostream& os) {
  const auto reports = read_criteria_csv(f.criteria);
  if (reports.size() < 2) throw Error(ErrorCode::TooFewPathways, "scoring needs at least two pathways");
  const auto table = score_reports(reports, weights_of(f));
  const fs::path out = output_dir(f);
  write_scores_csv(out / "scores.csv", table);
  write_normalized_csv(out / "normalized.csv", table);
  print_scores(os, table);
  return kExitOk;
}

int do_sensitivity(const Flags& f, std::ostream& os) {
  const auto parameter = parse_sensitivity_parameter(f.parameter);
  const auto options = options_of(f);
  const Scenario sc = prepare_scenario(load_scenario(f.scenario), options);
  const fs::path out = output_dir(f);
  const auto rows = run_sensitivity(sc, options, parameter, f.grid);
  write_sensitivity_csv(out / "sensitivity.csv", parameter, rows);
  bool any_ok = false;
  for (const auto& r : rows) {
    if (r.status == "ok") {
      any_ok = true;
      os << to_string(parameter) << '=' << format_number(r.value) << ' ' << r.pathway
         << " saving=" << format_number(r.saving_pct) << "% co2e=" << format_number(r.co2e_reduction_pct) << "%\n";
    } else {
      os << to_string(parameter) << '=' << format_number(r.value) << " failed: " << r.status << '\n';
    }
  }
  return any_ok ? kExitOk : kExitError;
}

int do_validate(const Flags& f, std::ostream& os) {
  const auto options = options_of(f);
  const Scenario sc = prepare_scenario(load_scenario(f.scenario), options);
  const fs::path out = output_dir(f);
  const RunResult result = run_pathways(sc, options);

  std::ofstream csv(out / "violations.csv");
  if (!csv) throw Error(ErrorCode::IoError, "cannot write " + (out / "violations.csv").string());
  csv << "pathway,window_from,constraint,step,index,amount\n";
  std::size_t total = 0;
  for (const auto& run : result.pathways) {
    std::size_t count = 0;
    for (const auto& w : run.windows) {
      for (const auto& v : validate(w.solution, w.problem)) {
        csv << run.pathway << ',' << format_timestamp(w.problem.start) << ',' << v.constraint << ',' << v.step << ','
            << v.index << ',' << format_number(v.amount) << '\n';
        ++count;
      }
    }
    os << run.pathway << ": " << (count == 0 ? "feasible" : std::to_string(count) + " violation(s)") << '\n';
    total += count;
  }
  return total == 0 ? kExitOk : kExitViolations;
}

void write_error(const std::string& out_dir, const std::string& command, const std::string& code,
                 const std::string& message) {
  if (out_dir.empty()) return;
  try {
    ensure_dir(out_dir);
    ordered_json j;
    j["command"] = command;
    j["code"] = code;
    j["message"] = message;
    write_json(fs::path(out_dir) / "error.json", j);
  } catch (const Error&) {
    // The error record itself could not be written; stderr still has it.
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Techno-economic, environmental and social assessment of microgrid transition pathways", "tees"};
  app.require_subcommand(1);
  Flags f;

  auto* run_cmd = app.add_subcommand("run", "dispatch and assess pathways, then score them");
  add_run_flags(run_cmd, f);
  run_cmd->add_flag("--detail", f.detail, "also write per-transformer and per-house series");

  auto* compare_cmd = app.add_subcommand("compare", "score pathways from an existing criteria.csv");
  compare_cmd->add_option("--criteria", f.criteria, "criteria.csv from a previous run")
      ->required()
      ->check(CLI::ExistingFile);
  compare_cmd->add_option("--weights", f.weights, "JSON object of criterion weights")->check(CLI::ExistingFile);
  compare_cmd->add_option("--out", f.out, "output directory");

  auto* sens_cmd = app.add_subcommand("sensitivity", "rerun heat-pump pathways over a parameter grid");
  add_run_flags(sens_cmd, f);
  sens_cmd->add_option("--parameter", f.parameter, "cutoff_temp, indoor_setpoint or pv_scale")->required();
  sens_cmd->add_option("--grid", f.grid, "comma-separated parameter values")->required()->delimiter(',');

  auto* validate_cmd = app.add_subcommand("validate", "dispatch pathways and check every constraint");
  add_run_flags(validate_cmd, f);

  std::vector<const char*> argv{"tees"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "run") return do_run(f, out);
    if (command == "compare") return do_compare(f, out);
    if (command == "sensitivity") return do_sensitivity(f, out);
    return do_validate(f, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    write_error(f.out, command, std::string(to_string(e.code())), e.what());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    write_error(f.out, command, "InternalError", e.what());
  }
  return kExitError;
}

}  // namespace tees::cli
