#include "tees/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>

#include "tees/error.hpp"
#include "tees/format.hpp"

namespace tees {

namespace {

constexpr int kMaxInterpolatedSteps = 3;

int read_int(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) throw Error(ErrorCode::ParseError, "truncated timestamp '" + std::string(text) + "'");
  int value = 0;
  const char* first = text.data() + pos;
  const auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc() || ptr != first + len) {
    throw Error(ErrorCode::ParseError, "bad timestamp '" + std::string(text) + "'");
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    throw Error(ErrorCode::ParseError, "bad timestamp '" + std::string(text) + "'");
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_value(std::string_view text, std::size_t line) {
  text = trim(text);
  if (text.empty() || text == "nan" || text == "NaN" || text == "NA") return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad value '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string_view to_string(Unit unit) {
  switch (unit) {
    case Unit::Kilowatt: return "kW";
    case Unit::Celsius: return "degC";
    case Unit::Dimensionless: return "1";
  }
  return "?";
}

Unit parse_unit(std::string_view text) {
  if (text == "kW") return Unit::Kilowatt;
  if (text == "degC" || text == "C") return Unit::Celsius;
  if (text == "1" || text == "dimensionless") return Unit::Dimensionless;
  throw Error(ErrorCode::InvalidConfig, "unknown unit '" + std::string(text) + "'");
}

Timestamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  text = trim(text);
  const int y = read_int(text, 0, 4);
  expect(text, 4, '-');
  const int mo = read_int(text, 5, 2);
  expect(text, 7, '-');
  const int d = read_int(text, 8, 2);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw Error(ErrorCode::ParseError, "invalid date '" + std::string(text) + "'");
  Timestamp t = sys_days{ymd};
  if (text.size() == 10) return t;

  if (text[10] != 'T' && text[10] != ' ') throw Error(ErrorCode::ParseError, "bad timestamp '" + std::string(text) + "'");
  const int hh = read_int(text, 11, 2);
  expect(text, 13, ':');
  const int mm = read_int(text, 14, 2);
  std::size_t pos = 16;
  int ss = 0;
  if (pos < text.size() && text[pos] == ':') {
    ss = read_int(text, pos + 1, 2);
    pos += 3;
  }
  if (hh > 23 || mm > 59 || ss > 60) throw Error(ErrorCode::ParseError, "invalid time '" + std::string(text) + "'");
  t += hours{hh} + minutes{mm} + seconds{ss};

  if (pos == text.size()) return t;
  if (text[pos] == 'Z' && pos + 1 == text.size()) return t;
  if ((text[pos] == '+' || text[pos] == '-') && pos + 6 == text.size()) {
    const int oh = read_int(text, pos + 1, 2);
    expect(text, pos + 3, ':');
    const int om = read_int(text, pos + 4, 2);
    const auto offset = hours{oh} + minutes{om};
    return text[pos] == '+' ? t - offset : t + offset;
  }
  throw Error(ErrorCode::ParseError, "bad timestamp '" + std::string(text) + "'");
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const hh_mm_ss hms{t - day_start};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

TimeSeries::TimeSeries(Timestamp start, Minutes dt, std::vector<double> values, Unit unit)
    : start_(start), dt_(dt), values_(std::move(values)), unit_(unit) {
  if (dt_.count() <= 0) throw Error(ErrorCode::NonUniformStep, "step must be positive");
  if (values_.empty()) throw Error(ErrorCode::EmptySeries, "series has no samples");
}

double TimeSeries::energy() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) * dt_hours();
}

TimeSeries load_timeseries(const std::filesystem::path& path, Unit unit) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());

  std::vector<Timestamp> times;
  std::vector<std::optional<double>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (line_no == 1 && view.substr(0, 9) == "timestamp") continue;
    const auto comma = view.find(',');
    if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos) {
      throw Error(ErrorCode::ParseError, path.string() + " line " + std::to_string(line_no) + ": expected 2 fields");
    }
    times.push_back(parse_timestamp(view.substr(0, comma)));
    raw.push_back(parse_value(view.substr(comma + 1), line_no));
  }
  if (times.empty()) throw Error(ErrorCode::EmptySeries, path.string() + " has no rows");
  if (times.size() == 1) {
    throw Error(ErrorCode::NonUniformStep, path.string() + ": one row does not define a step");
  }

  std::chrono::seconds step = times[1] - times[0];
  for (std::size_t k = 1; k < times.size(); ++k) {
    const auto diff = times[k] - times[k - 1];
    if (diff.count() <= 0) {
      throw Error(ErrorCode::NonUniformStep, path.string() + ": timestamps not strictly increasing at row " +
                                                 std::to_string(k + 1));
    }
    step = std::min(step, diff);
  }
  if (step.count() % 60 != 0) throw Error(ErrorCode::NonUniformStep, path.string() + ": step is not whole minutes");

  // Place samples on the uniform grid; missing slots stay empty.
  std::vector<std::optional<double>> grid;
  grid.push_back(raw[0]);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const auto diff = times[k] - times[k - 1];
    if (diff.count() % step.count() != 0) {
      throw Error(ErrorCode::NonUniformStep, path.string() + ": timestamp off the step grid at row " +
                                                 std::to_string(k + 1));
    }
    const auto skipped = diff / step - 1;
    if (skipped > kMaxInterpolatedSteps) {
      throw Error(ErrorCode::NonUniformStep, path.string() + ": gap of " + std::to_string(skipped) +
                                                 " steps before " + format_timestamp(times[k]));
    }
    for (long s = 0; s < skipped; ++s) grid.emplace_back();
    grid.push_back(raw[k]);
  }

  std::vector<double> values(grid.size());
  std::size_t k = 0;
  while (k < grid.size()) {
    if (grid[k]) {
      values[k] = *grid[k];
      ++k;
      continue;
    }
    std::size_t end = k;
    while (end < grid.size() && !grid[end]) ++end;
    if (end - k > kMaxInterpolatedSteps || k == 0 || end == grid.size()) {
      throw Error(ErrorCode::NonUniformStep, path.string() + ": unfillable gap at " +
                                                 format_timestamp(times[0] + step * static_cast<long>(k)));
    }
    const double left = *grid[k - 1];
    const double right = *grid[end];
    const double span = static_cast<double>(end - k + 1);
    for (std::size_t j = k; j < end; ++j) {
      values[j] = left + (right - left) * static_cast<double>(j - k + 1) / span;
    }
    k = end;
  }
  return TimeSeries(times[0], std::chrono::duration_cast<Minutes>(step), std::move(values), unit);
}

void write_timeseries(const std::filesystem::path& path, const TimeSeries& ts) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "timestamp,value\n";
  for (std::size_t k = 0; k < ts.size(); ++k) {
    out << format_timestamp(ts.time_at(k)) << ',' << format_number(ts[k]) << '\n';
  }
}

TimeSeries resample(const TimeSeries& ts, Minutes new_dt) {
  const long old_step = ts.dt().count();
  const long new_step = new_dt.count();
  if (new_step <= 0) throw Error(ErrorCode::IncompatibleStep, "step must be positive");
  if (new_step == old_step) return ts;
  std::vector<double> out;
  if (new_step > old_step) {
    if (new_step % old_step != 0) {
      throw Error(ErrorCode::IncompatibleStep, std::to_string(new_step) + " min is not a multiple of " +
                                                   std::to_string(old_step) + " min");
    }
    const std::size_t ratio = static_cast<std::size_t>(new_step / old_step);
    if (ts.size() % ratio != 0) {
      throw Error(ErrorCode::IncompatibleStep, "series length is not a whole number of output steps");
    }
    out.reserve(ts.size() / ratio);
    for (std::size_t k = 0; k < ts.size(); k += ratio) {
      double sum = 0.0;
      for (std::size_t j = 0; j < ratio; ++j) sum += ts[k + j];
      out.push_back(sum / static_cast<double>(ratio));
    }
  } else {
    if (old_step % new_step != 0) {
      throw Error(ErrorCode::IncompatibleStep, std::to_string(new_step) + " min does not divide " +
                                                   std::to_string(old_step) + " min");
    }
    const std::size_t ratio = static_cast<std::size_t>(old_step / new_step);
    out.reserve(ts.size() * ratio);
    for (double v : ts.values()) out.insert(out.end(), ratio, v);
  }
  return TimeSeries(ts.start(), new_dt, std::move(out), ts.unit());
}

TimeSeries scale_renewable(const TimeSeries& base, double m) {
  if (m < 0.0 || !std::isfinite(m)) throw Error(ErrorCode::NegativeScale, "scale factor must be >= 0");
  std::vector<double> out(base.values());
  for (double& v : out) v *= m;
  return TimeSeries(base.start(), base.dt(), std::move(out), base.unit());
}

TimeSeries slice(const TimeSeries& ts, Timestamp from, Timestamp to) {
  if (to <= from || from < ts.start() || to > ts.end()) {
    throw Error(ErrorCode::WindowMismatch, "window [" + format_timestamp(from) + ", " + format_timestamp(to) +
                                               ") is outside the series [" + format_timestamp(ts.start()) + ", " +
                                               format_timestamp(ts.end()) + ")");
  }
  const auto step = std::chrono::duration_cast<std::chrono::seconds>(ts.dt());
  if ((from - ts.start()) % step != std::chrono::seconds{0} || (to - from) % step != std::chrono::seconds{0}) {
    throw Error(ErrorCode::WindowMismatch, "window edges are not on the step grid");
  }
  const auto first = static_cast<std::size_t>((from - ts.start()) / step);
  const auto count = static_cast<std::size_t>((to - from) / step);
  std::vector<double> out(ts.values().begin() + static_cast<long>(first),
                          ts.values().begin() + static_cast<long>(first + count));
  return TimeSeries(from, ts.dt(), std::move(out), ts.unit());
}

}  // namespace tees
