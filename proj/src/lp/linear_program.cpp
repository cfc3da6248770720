#include "tees/lp/linear_program.hpp"

#include <algorithm>
#include <cmath>

#include "tees/error.hpp"

namespace tees::lp {

int LinearProgram::add_variable(double cost, double lower, double upper) {
  if (lower > upper) {
    throw Error(ErrorCode::InvalidConfig, "variable lower bound exceeds upper bound");
  }
  cost_.push_back(cost);
  col_lower_.push_back(lower);
  col_upper_.push_back(upper);
  return num_columns() - 1;
}

int LinearProgram::add_row(double lower, double upper) {
  if (lower > upper) {
    throw Error(ErrorCode::InvalidConfig, "row lower bound exceeds upper bound");
  }
  row_lower_.push_back(lower);
  row_upper_.push_back(upper);
  return num_rows() - 1;
}

void LinearProgram::add_coefficient(int row, int col, double value) {
  if (row < 0 || row >= num_rows() || col < 0 || col >= num_columns()) {
    throw Error(ErrorCode::OutOfRange, "coefficient index outside the model");
  }
  if (value != 0.0) entries_.push_back({row, col, value});
}

void LinearProgram::set_column_bounds(int col, double lower, double upper) {
  if (lower > upper) {
    throw Error(ErrorCode::InvalidConfig, "variable lower bound exceeds upper bound");
  }
  col_lower_[col] = lower;
  col_upper_[col] = upper;
}

double LinearProgram::objective(const std::vector<double>& x) const {
  double value = offset_;
  for (std::size_t j = 0; j < cost_.size(); ++j) value += cost_[j] * x[j];
  return value;
}

std::vector<double> LinearProgram::row_activity(const std::vector<double>& x) const {
  std::vector<double> activity(row_lower_.size(), 0.0);
  for (const auto& e : entries_) activity[e.row] += e.value * x[e.col];
  return activity;
}

double LinearProgram::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < cost_.size(); ++j) {
    worst = std::max({worst, col_lower_[j] - x[j], x[j] - col_upper_[j]});
  }
  const auto activity = row_activity(x);
  for (std::size_t i = 0; i < activity.size(); ++i) {
    worst = std::max({worst, row_lower_[i] - activity[i], activity[i] - row_upper_[i]});
  }
  return worst;
}

}  // namespace tees::lp
