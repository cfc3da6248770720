#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace tees::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Coefficient {
  int row;
  int col;
  double value;
};

// Sparse LP in bounded row form:
//   minimize    c'x + offset
//   subject to  row_lower <= A x <= row_upper,  col_lower <= x <= col_upper
// A row with row_lower == row_upper is an equality.
class LinearProgram {
 public:
  int add_variable(double cost, double lower, double upper);
  int add_row(double lower, double upper);
  void add_coefficient(int row, int col, double value);

  void set_cost(int col, double cost) { cost_[col] = cost; }
  void set_column_bounds(int col, double lower, double upper);
  void add_objective_offset(double value) { offset_ += value; }

  int num_columns() const { return static_cast<int>(cost_.size()); }
  int num_rows() const { return static_cast<int>(row_lower_.size()); }
  std::size_t num_nonzeros() const { return entries_.size(); }

  const std::vector<double>& cost() const { return cost_; }
  const std::vector<double>& column_lower() const { return col_lower_; }
  const std::vector<double>& column_upper() const { return col_upper_; }
  const std::vector<double>& row_lower() const { return row_lower_; }
  const std::vector<double>& row_upper() const { return row_upper_; }
  const std::vector<Coefficient>& coefficients() const { return entries_; }
  double objective_offset() const { return offset_; }

  double objective(const std::vector<double>& x) const;
  std::vector<double> row_activity(const std::vector<double>& x) const;

  // Largest bound or row violation of x; 0 when x is feasible.
  double max_violation(const std::vector<double>& x) const;

 private:
  std::vector<double> cost_;
  std::vector<double> col_lower_;
  std::vector<double> col_upper_;
  std::vector<double> row_lower_;
  std::vector<double> row_upper_;
  std::vector<Coefficient> entries_;
  double offset_ = 0.0;
};

}  // namespace tees::lp
