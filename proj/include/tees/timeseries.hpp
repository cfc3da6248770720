#pragma once

#include <chrono>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tees {

using Timestamp = std::chrono::sys_seconds;
using Minutes = std::chrono::minutes;

enum class Unit { Kilowatt, Celsius, Dimensionless };

std::string_view to_string(Unit unit);
Unit parse_unit(std::string_view text);

// ISO-8601 instant: "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS]" with optional "Z"
// or "+HH:MM" offset. A missing offset means UTC.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

// Uniformly sampled series. Immutable once built.
class TimeSeries {
 public:
  TimeSeries() = default;
  TimeSeries(Timestamp start, Minutes dt, std::vector<double> values, Unit unit);

  Timestamp start() const { return start_; }
  Timestamp end() const { return time_at(size()); }
  Timestamp time_at(std::size_t k) const { return start_ + dt_ * static_cast<long>(k); }
  Minutes dt() const { return dt_; }
  double dt_hours() const { return static_cast<double>(dt_.count()) / 60.0; }
  Unit unit() const { return unit_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double operator[](std::size_t k) const { return values_[k]; }
  const std::vector<double>& values() const { return values_; }

  // Sum of value * dt in hours; kWh for a power series.
  double energy() const;

 private:
  Timestamp start_{};
  Minutes dt_{1};
  std::vector<double> values_;
  Unit unit_ = Unit::Dimensionless;
};

// Reads a `timestamp,value` CSV. The step is the smallest timestamp
// difference; gaps of up to three missing steps (or empty values) are filled
// by linear interpolation.
TimeSeries load_timeseries(const std::filesystem::path& path, Unit unit);
void write_timeseries(const std::filesystem::path& path, const TimeSeries& ts);

// Window means when coarsening, sample-and-hold when refining.
TimeSeries resample(const TimeSeries& ts, Minutes new_dt);

TimeSeries scale_renewable(const TimeSeries& base, double m);

// Sub-series covering [from, to). Both ends must fall on step boundaries.
TimeSeries slice(const TimeSeries& ts, Timestamp from, Timestamp to);

}  // namespace tees
