#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tees/devices.hpp"
#include "tees/parameters.hpp"
#include "tees/timeseries.hpp"

namespace tees {

enum class TransformerKind { LV, MV };

struct SectorCounts {
  int residential = 0;
  int community = 0;
  int commercial = 0;
};

struct SectorShares {
  double residential = 0.40;
  double community = 0.25;
  double commercial = 0.35;
};

struct Transformer {
  std::string id;
  double rated_kva = 0.0;
  TransformerKind kind = TransformerKind::LV;
  int phase_count = 1;
  // LV units carry connection counts; MV units aggregate the LV units they feed.
  std::optional<SectorCounts> connections;
  std::vector<std::string> downstream;
};

struct House {
  std::string id;
  std::string transformer_id;
  // Number of identical houses this entry stands for.
  int count = 1;
};

class Topology {
 public:
  Topology() = default;
  Topology(std::vector<Transformer> transformers, std::vector<House> houses, SectorShares shares);

  const std::vector<Transformer>& transformers() const { return transformers_; }
  const std::vector<House>& houses() const { return houses_; }
  const SectorShares& shares() const { return shares_; }
  int household_count() const;

  int transformer_index(const std::string& id) const;
  // Houses whose load flows through transformer t, directly or via the LV
  // units an MV unit feeds.
  const std::vector<int>& houses_served(int t) const { return served_[t]; }
  // LV units whose base demand flows through transformer t.
  const std::vector<int>& leaves_served(int t) const { return leaves_[t]; }

 private:
  std::vector<Transformer> transformers_;
  std::vector<House> houses_;
  SectorShares shares_;
  std::vector<std::vector<int>> served_;
  std::vector<std::vector<int>> leaves_;
};

// Base demand per transformer, split by sector share and connection count.
// MV units receive the sum over the LV units they feed.
std::map<std::string, TimeSeries> disaggregate_demand(const TimeSeries& total, const Topology& topo);

struct ComfortBand {
  double t_min = 18.0;
  double t_max = 22.0;
};

struct PathwayConfig {
  std::string name;
  double hp_size_mbtu_h = 0.0;
  double hp_rated_power_kw = 0.0;
  double hp_min_power_kw = 0.0;
  double hp_cutoff_temp_c = -20.0;
  double coordination_gamma = 0.0;  // $/kVA
  double pv_scale = 1.0;
  ComfortBand comfort;

  bool has_heat_pumps() const { return hp_size_mbtu_h > 0.0 && hp_rated_power_kw > 0.0; }
  void validate() const;
};

struct HouseParamRanges {
  std::array<double, 2> c_a{0.21, 0.25};
  std::array<double, 2> c_m{0.81, 0.99};
  std::array<double, 2> h_m{1.76, 2.17};
  std::array<double, 2> u_a{0.09, 0.12};
  double q_oil_max_kw = 10.0;
};

// Uniform draws inside the ranges, one record per house, reproducible from
// the seed on every platform.
std::vector<HouseThermalParams> draw_house_params(const HouseParamRanges& ranges, std::size_t count,
                                                  std::uint64_t seed);

// Indoor temperature every house starts (and, by periodicity, ends) a chunk at.
struct InitialIndoorTemperature {
  enum class Rule { ComfortMidpoint, ComfortMin, Fixed };
  Rule rule = Rule::ComfortMidpoint;
  double value_c = 0.0;  // used by Fixed

  double resolve(const ComfortBand& band) const;
};

struct Scenario {
  std::string name;
  TimeSeries demand;        // kW, whole community
  TimeSeries pv;            // kW, installed base
  TimeSeries outdoor_temp;  // degC
  Minutes dt{5};
  int chunk_days = 7;
  std::optional<Timestamp> window_from;
  std::optional<Timestamp> window_to;
  // Solve only the first days of each month of the window; 0 solves it all.
  int sample_days_per_month = 0;
  InitialIndoorTemperature initial_indoor;
  GeneratorModel generator;
  BatteryModel battery;
  CopCurve cop;
  HouseParamRanges house_ranges;
  Topology topology;
  EconomicParams economics;
  EmissionParams emissions;
  SocialParams social;
  std::vector<PathwayConfig> pathways;
  std::string baseline_pathway;

  const PathwayConfig& pathway(const std::string& name) const;
};

// Reads the JSON scenario file; series paths are relative to its directory.
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace tees
