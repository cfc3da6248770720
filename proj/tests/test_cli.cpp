#include <fstream>
#include <iterator>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "scratch_dir.hpp"
#include "support/table8.hpp"
#include "tees/cli.hpp"
#include "tees/criteria.hpp"
#include "tees/format.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kScenario = std::string(TEES_EXAMPLE_DIR) + "/scenario.json";

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome tees_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = tees::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t data_rows(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n == 0 ? 0 : n - 1;
}

std::vector<std::string> short_run(const fs::path& out, const std::string& pathways, const std::string& seed = "7") {
  return {"run",    "--scenario", kScenario,  "--pathways", pathways,      "--from", "2023-03-06",
          "--to",   "2023-03-07", "--out",    out.string(), "--seed",    seed};
}

void write_table8_csv(const fs::path& path) {
  std::vector<tees::CriteriaReport> reports;
  for (std::size_t p = 0; p < table8::kPathways.size(); ++p) {
    reports.push_back(tees::report_from_values(table8::kPathways[p], table8::kValues[p]));
  }
  tees::write_criteria_csv(path, reports);
}

}  // namespace

TEST_CASE("a baseline-only run writes one criteria row and no scores") {
  ScratchDir dir;
  const auto r = tees_cli(short_run(dir.path(), "TP1"));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(data_rows(dir.path() / "criteria.csv") == 1);
  CHECK(fs::exists(dir.path() / "dispatch_TP1.csv"));
  CHECK(data_rows(dir.path() / "dispatch_TP1.csv") == 288);
  CHECK_FALSE(fs::exists(dir.path() / "scores.csv"));
  CHECK_FALSE(fs::exists(dir.path() / "error.json"));

  const auto summary = nlohmann::json::parse(slurp(dir.path() / "run_summary.json"));
  CHECK(summary.at("seed").get<int>() == 7);
  CHECK(summary.at("dt_minutes").get<int>() == 5);
  CHECK(summary.at("households").get<int>() == 116);
}

TEST_CASE("four pathways give four ranked scores, baseline included") {
  ScratchDir dir;
  const auto r = tees_cli(short_run(dir.path(), "TP2b,TP3b,TP4b"));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(data_rows(dir.path() / "criteria.csv") == 4);
  CHECK(data_rows(dir.path() / "scores.csv") == 4);
  CHECK(data_rows(dir.path() / "normalized.csv") == 4);
  const auto criteria = tees::read_criteria_csv(dir.path() / "criteria.csv");
  CHECK(criteria.front().pathway == "TP1");
}

TEST_CASE("seeded reruns are byte-identical apart from wall times") {
  ScratchDir a, b;
  REQUIRE(tees_cli(short_run(a.path(), "TP1,TP3b,TP4b")).code == 0);
  REQUIRE(tees_cli(short_run(b.path(), "TP1,TP3b,TP4b")).code == 0);
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(a.path())) {
    const auto name = entry.path().filename();
    if (name == "timing.csv") continue;
    INFO(name.string());
    REQUIRE(fs::exists(b.path() / name));
    CHECK(slurp(entry.path()) == slurp(b.path() / name));
    ++compared;
  }
  CHECK(compared >= 7);
}

TEST_CASE("a different seed draws different houses") {
  ScratchDir a, b;
  REQUIRE(tees_cli(short_run(a.path(), "TP1,TP2b", "1")).code == 0);
  REQUIRE(tees_cli(short_run(b.path(), "TP1,TP2b", "2")).code == 0);
  CHECK(slurp(a.path() / "dispatch_TP2b.csv") != slurp(b.path() / "dispatch_TP2b.csv"));
}

TEST_CASE("criteria.csv round-trips at six significant digits") {
  ScratchDir dir;
  REQUIRE(tees_cli(short_run(dir.path(), "TP1,TP2a")).code == 0);
  const auto reports = tees::read_criteria_csv(dir.path() / "criteria.csv");
  const auto again = dir.path() / "again.csv";
  tees::write_criteria_csv(again, reports);
  CHECK(slurp(again) == slurp(dir.path() / "criteria.csv"));
}

TEST_CASE("compare ranks the printed assessment table with TP4b on top") {
  ScratchDir dir;
  write_table8_csv(dir.path() / "table8.csv");
  const auto r = tees_cli({"compare", "--criteria", (dir.path() / "table8.csv").string(), "--out", dir.path().string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  std::ifstream in(dir.path() / "scores.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "pathway,score,rank");
  std::string top;
  while (std::getline(in, line)) {
    const auto cells = tees::split_csv_line(line);
    if (cells[2] == "1") top = cells[0];
  }
  CHECK(top == "TP4b");
}

TEST_CASE("compare scores identical rows equally") {
  ScratchDir dir;
  const auto same = table8::kValues[3];
  tees::write_criteria_csv(dir.path() / "c.csv",
                           {tees::report_from_values("A", same), tees::report_from_values("B", same)});
  REQUIRE(tees_cli({"compare", "--criteria", (dir.path() / "c.csv").string(), "--out", dir.path().string()}).code == 0);
  std::ifstream in(dir.path() / "scores.csv");
  std::string header, a, b;
  std::getline(in, header);
  std::getline(in, a);
  std::getline(in, b);
  CHECK(tees::split_csv_line(a)[1] == tees::split_csv_line(b)[1]);
}

TEST_CASE("raising one weight raises the score of the pathway best on it") {
  ScratchDir dir;
  write_table8_csv(dir.path() / "table8.csv");
  const auto score_of = [&](const std::string& weights_json, const std::string& pathway) {
    const auto w = dir.write("w.json", weights_json);
    REQUIRE(tees_cli({"compare", "--criteria", (dir.path() / "table8.csv").string(), "--weights", w.string(), "--out",
                      dir.path().string()})
                .code == 0);
    std::ifstream in(dir.path() / "scores.csv");
    for (std::string line; std::getline(in, line);) {
      const auto cells = tees::split_csv_line(line);
      if (cells[0] == pathway) return std::stod(cells[1]);
    }
    FAIL("pathway missing");
    return 0.0;
  };
  // TP1 has the lowest emissions from power, so that weight favours it.
  const double w1 = score_of(R"({"co2e_power_t": 1})", "TP1");
  const double w3 = score_of(R"({"co2e_power_t": 3})", "TP1");
  CHECK(w3 > w1);
}

TEST_CASE("errors leave a machine-readable record and a nonzero exit") {
  ScratchDir dir;
  tees::write_criteria_csv(dir.path() / "one.csv", {tees::report_from_values("A", table8::kValues[0])});
  const auto out = dir.path() / "out";
  const auto r = tees_cli({"compare", "--criteria", (dir.path() / "one.csv").string(), "--out", out.string()});
  CHECK(r.code == tees::cli::kExitError);
  const auto error = nlohmann::json::parse(slurp(out / "error.json"));
  CHECK(error.at("code") == "TooFewPathways");
  CHECK(error.at("command") == "compare");

  const auto bad = tees_cli(short_run(out, "TP9"));
  CHECK(bad.code == tees::cli::kExitError);
  CHECK(nlohmann::json::parse(slurp(out / "error.json")).at("code") == "InvalidConfig");

  // A later good run clears the stale record.
  REQUIRE(tees_cli(short_run(out, "TP1")).code == 0);
  CHECK_FALSE(fs::exists(out / "error.json"));

  CHECK(tees_cli({"run", "--pathways", "TP1"}).code == tees::cli::kExitUsage);
}

TEST_CASE("a single-point sensitivity grid repeats the run") {
  ScratchDir run_dir, sens_dir;
  REQUIRE(tees_cli(short_run(run_dir.path(), "TP1,TP2b")).code == 0);
  auto args = short_run(sens_dir.path(), "TP1,TP2b");
  args[0] = "sensitivity";
  args.insert(args.end(), {"--parameter", "cutoff_temp", "--grid", "-20"});
  const auto r = tees_cli(args);
  REQUIRE_MESSAGE(r.code == 0, r.err);

  const auto reports = tees::read_criteria_csv(run_dir.path() / "criteria.csv");
  std::ifstream in(sens_dir.path() / "sensitivity.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "cutoff_temp,pathway,cost_saving_pct,co2e_reduction_pct,status");
  const auto cells = tees::split_csv_line(row);
  CHECK(cells[1] == "TP2b");
  CHECK(cells[2] == tees::format_number(reports[1].saving_pct));
  CHECK(cells[3] == tees::format_number(reports[1].co2e_reduction_pct));
  CHECK(cells[4] == "ok");
}

TEST_CASE("a failing grid point is recorded and the rest still run") {
  ScratchDir dir;
  auto args = short_run(dir.path(), "TP1,TP2b");
  args[0] = "sensitivity";
  // A 40 degC setpoint cannot be held by a heat pump in March.
  args.insert(args.end(), {"--parameter", "indoor_setpoint", "--grid", "40,18"});
  const auto r = tees_cli(args);
  CHECK(r.code == 0);
  std::ifstream in(dir.path() / "sensitivity.csv");
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  CHECK(first.find("Infeasible") != std::string::npos);
  CHECK(tees::split_csv_line(second).back() == "ok");
}

TEST_CASE("validate reports every pathway feasible") {
  ScratchDir dir;
  auto args = short_run(dir.path(), "TP1,TP3a,TP4b");
  args[0] = "validate";
  const auto r = tees_cli(args);
  CHECK_MESSAGE(r.code == 0, r.err);
  CHECK(data_rows(dir.path() / "violations.csv") == 0);
  CHECK(r.out.find("TP3a: feasible") != std::string::npos);
}
