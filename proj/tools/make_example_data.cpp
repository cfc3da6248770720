// Writes the hourly demand, PV and outdoor temperature series of the bundled
// example scenario.
#include <cstdint>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "tees/error.hpp"
#include "tees/synthetic.hpp"
#include "tees/timeseries.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic input series of the example scenario"};
  std::filesystem::path out = "data/example";
  std::uint64_t seed = 2023;
  std::string start = "2023-01-01T00:00:00Z";
  int days = 365;
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", seed, "weather and load seed");
  app.add_option("--start", start, "first timestamp (UTC)");
  app.add_option("--days", days, "number of days")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  try {
    tees::ProfileOptions options;
    options.start = tees::parse_timestamp(start);
    options.days = days;
    options.dt = tees::Minutes{60};
    options.seed = seed;
    const auto profiles = tees::synthesize_profiles(options);
    std::filesystem::create_directories(out);
    tees::write_timeseries(out / "demand.csv", profiles.demand);
    tees::write_timeseries(out / "pv.csv", profiles.pv);
    tees::write_timeseries(out / "outdoor_temp.csv", profiles.outdoor_temp);
  } catch (const tees::Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  std::cout << "wrote " << days << " days to " << out.string() << '\n';
  return 0;
}
