#include "tees/lp/branch_and_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace tees::lp {

namespace {

struct Node {
  std::vector<int> zeroed;
  double bound;
};

class Brancher {
 public:
  Brancher(const LinearProgram& model, const ComplementarityPairs& pairs, const BranchOptions& options)
      : model_(model), pairs_(pairs), options_(options), start_(std::chrono::steady_clock::now()) {}

  BranchResult run();

 private:
  LpSolution solve(const std::vector<int>& zeroed) {
    LinearProgram node = model_;
    for (int col : zeroed) node.set_column_bounds(col, std::min(0.0, model_.column_lower()[col]), 0.0);
    LpSolution sol = solve_lp(node, options_.ipm);
    result_.lp_iterations += sol.iterations;
    ++result_.nodes;
    return sol;
  }

  std::vector<int> violated(const std::vector<double>& x) const {
    std::vector<int> out;
    for (int p = 0; p < static_cast<int>(pairs_.size()); ++p) {
      if (x[pairs_[p].first] > options_.tolerance && x[pairs_[p].second] > options_.tolerance) out.push_back(p);
    }
    return out;
  }

  void offer(std::vector<double> x) {
    for (const auto& [a, b] : pairs_) {
      if (x[a] <= options_.tolerance) x[a] = 0.0;
      if (x[b] <= options_.tolerance) x[b] = 0.0;
    }
    const double obj = model_.objective(x);
    if (!have_incumbent_ || obj < result_.objective) {
      have_incumbent_ = true;
      result_.objective = obj;
      result_.x = std::move(x);
    }
  }

  double gap_to(double bound) const {
    return (result_.objective - bound) / std::max(std::abs(result_.objective), 1e-9);
  }

  bool out_of_time() const {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    return elapsed.count() > options_.time_limit_seconds || result_.nodes >= options_.max_nodes;
  }

  const LinearProgram& model_;
  const ComplementarityPairs& pairs_;
  BranchOptions options_;
  std::chrono::steady_clock::time_point start_;
  BranchResult result_;
  bool have_incumbent_ = false;
};

BranchResult Brancher::run() {
  const LpSolution root = solve({});
  if (root.status == LpStatus::Infeasible) {
    result_.status = BranchStatus::Infeasible;
    return result_;
  }
  if (root.status != LpStatus::Optimal) {
    result_.status = BranchStatus::NumericalFailure;
    return result_;
  }
  const double root_bound = std::min(root.dual_bound, root.objective);
  result_.bound = root_bound;

  // Rounding dive.
  std::vector<int> zeroed;
  LpSolution current = root;
  for (int depth = 0; depth < 25; ++depth) {
    const auto bad = violated(current.x);
    if (bad.empty()) {
      offer(current.x);
      break;
    }
    for (int p : bad) {
      const auto [a, b] = pairs_[p];
      zeroed.push_back(current.x[a] < current.x[b] ? a : b);
    }
    if (out_of_time()) break;
    current = solve(zeroed);
    if (current.status != LpStatus::Optimal) break;
  }

  if (have_incumbent_ && gap_to(root_bound) <= options_.relative_gap) {
    result_.gap = std::max(0.0, gap_to(root_bound));
    result_.status = BranchStatus::Optimal;
    return result_;
  }

  // Depth-first search; closed_bound tracks the weakest bound of pruned nodes.
  double closed_bound = have_incumbent_ ? result_.objective : kInf;
  std::vector<Node> stack;
  const auto push_children = [&](const std::vector<int>& base, const LpSolution& sol, double bound) {
    const auto bad = violated(sol.x);
    int pick = bad.front();
    double worst = -1.0;
    for (int p : bad) {
      const double m = std::min(sol.x[pairs_[p].first], sol.x[pairs_[p].second]);
      if (m > worst) {
        worst = m;
        pick = p;
      }
    }
    const auto [a, b] = pairs_[pick];
    Node keep_a{base, bound};
    keep_a.zeroed.push_back(b);
    Node keep_b{base, bound};
    keep_b.zeroed.push_back(a);
    // Explore the side the relaxation already prefers first.
    if (sol.x[a] >= sol.x[b]) {
      stack.push_back(std::move(keep_b));
      stack.push_back(std::move(keep_a));
    } else {
      stack.push_back(std::move(keep_a));
      stack.push_back(std::move(keep_b));
    }
  };
  push_children({}, root, root_bound);

  bool exhausted = true;
  while (!stack.empty()) {
    if (out_of_time()) {
      exhausted = false;
      break;
    }
    Node node = std::move(stack.back());
    stack.pop_back();
    if (have_incumbent_ && gap_to(node.bound) <= options_.relative_gap) {
      closed_bound = std::min(closed_bound, node.bound);
      continue;
    }
    const LpSolution sol = solve(node.zeroed);
    if (sol.status == LpStatus::Infeasible) continue;
    if (sol.status != LpStatus::Optimal) {
      exhausted = false;
      continue;
    }
    const double bound = std::min(sol.dual_bound, sol.objective);
    if (have_incumbent_ && gap_to(bound) <= options_.relative_gap) {
      closed_bound = std::min(closed_bound, bound);
      continue;
    }
    if (violated(sol.x).empty()) {
      offer(sol.x);
      continue;
    }
    push_children(node.zeroed, sol, bound);
  }

  if (!have_incumbent_) {
    result_.status = exhausted ? BranchStatus::Infeasible : BranchStatus::Timeout;
    return result_;
  }
  if (exhausted) result_.bound = std::max(root_bound, std::min(closed_bound, result_.objective));
  result_.gap = std::max(0.0, gap_to(result_.bound));
  result_.status = result_.gap <= options_.relative_gap ? BranchStatus::Optimal : BranchStatus::Timeout;
  return result_;
}

}  // namespace

BranchResult solve_with_complementarity(const LinearProgram& model, const ComplementarityPairs& pairs,
                                        const BranchOptions& options) {
  return Brancher(model, pairs, options).run();
}

}  // namespace tees::lp
