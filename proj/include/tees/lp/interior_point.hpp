#pragma once

#include <string_view>
#include <vector>

#include "tees/lp/linear_program.hpp"

namespace tees::lp {

enum class LpStatus { Optimal, Infeasible, IterationLimit, NumericalFailure };

std::string_view to_string(LpStatus status);

struct IpmOptions {
  // Relative primal, dual and complementarity tolerance in the scaled problem.
  double tolerance = 1e-9;
  int max_iterations = 200;
  // Use the OpenMP normal-matrix kernel; false selects the serial reference.
  bool parallel = true;
};

struct LpSolution {
  LpStatus status = LpStatus::NumericalFailure;
  std::vector<double> x;
  double objective = 0.0;
  // Dual objective of the final iterate; a lower bound on the optimum once
  // the dual residual is below tolerance.
  double dual_bound = 0.0;
  int iterations = 0;
  double primal_infeasibility = 0.0;
  double relative_gap = 0.0;
};

// Primal-dual interior-point method (Mehrotra predictor-corrector) on the
// normal equations, with Ruiz equilibration and removal of fixed columns.
LpSolution solve_lp(const LinearProgram& model, const IpmOptions& options = {});

}  // namespace tees::lp
