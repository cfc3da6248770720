#pragma once

#include <utility>
#include <vector>

#include "tees/lp/interior_point.hpp"
#include "tees/lp/linear_program.hpp"

namespace tees::lp {

// Pairs of non-negative columns of which at most one may be positive. The
// model should already contain the convex-hull row x_a + x_b <= cap so its
// LP relaxation is tight.
using ComplementarityPairs = std::vector<std::pair<int, int>>;

struct BranchOptions {
  double relative_gap = 0.005;
  // A pair counts as violated when both members exceed this value.
  double tolerance = 1e-6;
  int max_nodes = 200;
  double time_limit_seconds = 600.0;
  IpmOptions ipm;
};

enum class BranchStatus { Optimal, Infeasible, Timeout, NumericalFailure };

struct BranchResult {
  BranchStatus status = BranchStatus::NumericalFailure;
  std::vector<double> x;  // best complementary point, members below tolerance set to 0
  double objective = 0.0;
  double bound = 0.0;  // root relaxation bound
  double gap = 0.0;    // (objective - bound) / |objective|
  int nodes = 0;
  int lp_iterations = 0;
};

// Relaxation, then a rounding dive that zeroes the smaller member of every
// violated pair, then depth-first branching if the dive misses the gap.
BranchResult solve_with_complementarity(const LinearProgram& model, const ComplementarityPairs& pairs,
                                        const BranchOptions& options = {});

}  // namespace tees::lp
