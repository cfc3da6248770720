#include "tees/lp/interior_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>

#include "tees/lp/normal_equations.hpp"

namespace tees::lp {

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::IterationLimit: return "iteration_limit";
    case LpStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

using Vec = Eigen::VectorXd;

// Equality-form problem after presolve:  min c'x  s.t.  A x = b,  l <= x <= u.
struct StandardForm {
  SparseMatrix a;
  Vec b;
  Vec c;
  Vec lower;
  Vec upper;
  std::vector<int> column_of;  // model column -> standard column, -1 if fixed
  std::vector<double> fixed_value;
  bool trivially_infeasible = false;
};

StandardForm to_standard_form(const LinearProgram& model) {
  StandardForm sf;
  const int n = model.num_columns();
  const int m = model.num_rows();
  const auto& lo = model.column_lower();
  const auto& up = model.column_upper();

  sf.column_of.assign(n, -1);
  sf.fixed_value.assign(n, 0.0);
  int kept = 0;
  for (int j = 0; j < n; ++j) {
    if (up[j] - lo[j] <= 1e-12 * std::max(1.0, std::abs(lo[j]))) {
      sf.fixed_value[j] = lo[j];
    } else {
      sf.column_of[j] = kept++;
    }
  }

  std::vector<double> row_shift(m, 0.0);
  std::vector<int> row_count(m, 0);
  for (const auto& e : model.coefficients()) {
    if (sf.column_of[e.col] < 0) {
      row_shift[e.row] += e.value * sf.fixed_value[e.col];
    } else {
      ++row_count[e.row];
    }
  }

  // Keep non-empty rows; inequality rows get a bounded slack column.
  std::vector<int> row_of(m, -1);
  std::vector<double> b;
  std::vector<double> slack_lower;
  std::vector<double> slack_upper;
  std::vector<int> slack_row;
  for (int i = 0; i < m; ++i) {
    const double rl = model.row_lower()[i] - row_shift[i];
    const double ru = model.row_upper()[i] - row_shift[i];
    if (row_count[i] == 0) {
      const double tol = 1e-9 * (1.0 + std::abs(row_shift[i]));
      if (rl > tol || ru < -tol) sf.trivially_infeasible = true;
      continue;
    }
    if (std::isinf(rl) && std::isinf(ru)) continue;
    row_of[i] = static_cast<int>(b.size());
    if (rl == ru) {
      b.push_back(rl);
    } else {
      b.push_back(0.0);
      slack_row.push_back(row_of[i]);
      slack_lower.push_back(rl);
      slack_upper.push_back(ru);
    }
  }

  const int rows = static_cast<int>(b.size());
  const int cols = kept + static_cast<int>(slack_row.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(model.num_nonzeros() + slack_row.size());
  for (const auto& e : model.coefficients()) {
    const int col = sf.column_of[e.col];
    const int row = row_of[e.row];
    if (col >= 0 && row >= 0) triplets.emplace_back(row, col, e.value);
  }
  for (std::size_t s = 0; s < slack_row.size(); ++s) {
    triplets.emplace_back(slack_row[s], kept + static_cast<int>(s), -1.0);
  }
  sf.a.resize(rows, cols);
  sf.a.setFromTriplets(triplets.begin(), triplets.end());
  sf.a.makeCompressed();

  sf.b = Eigen::Map<Vec>(b.data(), rows);
  sf.c = Vec::Zero(cols);
  sf.lower.resize(cols);
  sf.upper.resize(cols);
  for (int j = 0; j < n; ++j) {
    const int col = sf.column_of[j];
    if (col < 0) continue;
    sf.c[col] = model.cost()[j];
    sf.lower[col] = lo[j];
    sf.upper[col] = up[j];
  }
  for (std::size_t s = 0; s < slack_row.size(); ++s) {
    sf.lower[kept + s] = slack_lower[s];
    sf.upper[kept + s] = slack_upper[s];
  }
  return sf;
}

// Ruiz infinity-norm equilibration: A <- R A S. Returns (R, S).
std::pair<Vec, Vec> equilibrate(SparseMatrix& a) {
  Vec row_scale = Vec::Ones(a.rows());
  Vec col_scale = Vec::Ones(a.cols());
  for (int pass = 0; pass < 10; ++pass) {
    Vec row_max = Vec::Zero(a.rows());
    Vec col_max = Vec::Zero(a.cols());
    for (int j = 0; j < a.outerSize(); ++j) {
      for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
        const double v = std::abs(it.value());
        row_max[it.row()] = std::max(row_max[it.row()], v);
        col_max[j] = std::max(col_max[j], v);
      }
    }
    double spread = 0.0;
    for (Eigen::Index i = 0; i < row_max.size(); ++i) {
      row_max[i] = row_max[i] > 0.0 ? 1.0 / std::sqrt(row_max[i]) : 1.0;
      spread = std::max(spread, std::abs(1.0 - row_max[i]));
    }
    for (Eigen::Index j = 0; j < col_max.size(); ++j) {
      col_max[j] = col_max[j] > 0.0 ? 1.0 / std::sqrt(col_max[j]) : 1.0;
      spread = std::max(spread, std::abs(1.0 - col_max[j]));
    }
    for (int j = 0; j < a.outerSize(); ++j) {
      for (SparseMatrix::InnerIterator it(a, j); it; ++it) it.valueRef() *= row_max[it.row()] * col_max[j];
    }
    row_scale.array() *= row_max.array();
    col_scale.array() *= col_max.array();
    if (spread < 1e-3) break;
  }
  return {row_scale, col_scale};
}

double step_to_boundary(const Vec& value, const Vec& direction, const std::vector<int>& index, double sign) {
  double alpha = 1.0;
  for (int j : index) {
    const double d = sign * direction[j];
    if (d < 0.0) alpha = std::min(alpha, -value[j] / d);
  }
  return alpha;
}

class InteriorPointSolver {
 public:
  InteriorPointSolver(const StandardForm& sf, const IpmOptions& options)
      : a_(sf.a), b_(sf.b), c_(sf.c), lower_(sf.lower), upper_(sf.upper), options_(options),
        plan_(a_) {
    const Eigen::Index n = a_.cols();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::isfinite(lower_[j])) has_lower_.push_back(static_cast<int>(j));
      if (std::isfinite(upper_[j])) has_upper_.push_back(static_cast<int>(j));
    }
    lower_mask_ = Vec::Zero(n);
    upper_mask_ = Vec::Zero(n);
    for (int j : has_lower_) lower_mask_[j] = 1.0;
    for (int j : has_upper_) upper_mask_[j] = 1.0;
  }

  LpSolution run(Vec& x_out, double& primal_obj, double& dual_obj);

 private:
  void initial_point();
  bool factorize(const Vec& theta);
  Vec solve_normal(const Vec& rhs);
  void direction(const Vec& theta, const Vec& rp, const Vec& rd, const Vec& rl, const Vec& ru,
                 Vec& dx, Vec& dy, Vec& dzl, Vec& dzu);

  SparseMatrix a_;
  Vec b_;
  Vec c_;
  Vec lower_;
  Vec upper_;
  IpmOptions options_;
  NormalEquationsPlan plan_;
  SparseMatrix normal_;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
  bool analyzed_ = false;
  double dual_regularization_ = 1e-10;
  std::vector<int> has_lower_;
  std::vector<int> has_upper_;
  Vec lower_mask_;
  Vec upper_mask_;

  Vec x_, y_, zl_, zu_, xl_, xu_;
};

void InteriorPointSolver::initial_point() {
  const Eigen::Index n = a_.cols();
  x_ = Vec::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const bool lo = std::isfinite(lower_[j]);
    const bool up = std::isfinite(upper_[j]);
    if (lo && up) {
      x_[j] = 0.5 * (lower_[j] + upper_[j]);
    } else if (lo) {
      x_[j] = lower_[j] + 1.0;
    } else if (up) {
      x_[j] = upper_[j] - 1.0;
    }
  }

  // Least-squares correction toward A x = b, then pull back into the box.
  Vec theta = Vec::Ones(n);
  if (factorize(theta)) {
    const Vec dy = solve_normal(b_ - a_ * x_);
    x_ += a_.transpose() * dy;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const bool lo = std::isfinite(lower_[j]);
    const bool up = std::isfinite(upper_[j]);
    if (lo && up) {
      const double margin = std::min(1.0, 0.25 * (upper_[j] - lower_[j]));
      x_[j] = std::clamp(x_[j], lower_[j] + margin, upper_[j] - margin);
    } else if (lo) {
      x_[j] = std::max(x_[j], lower_[j] + 1.0);
    } else if (up) {
      x_[j] = std::min(x_[j], upper_[j] - 1.0);
    }
  }

  y_ = Vec::Zero(a_.rows());
  zl_ = Vec::Zero(n);
  zu_ = Vec::Zero(n);
  const double cnorm = std::max(1.0, c_.lpNorm<Eigen::Infinity>());
  for (int j : has_lower_) zl_[j] = cnorm;
  for (int j : has_upper_) zu_[j] = cnorm;
  // Start dual feasible where only one bound exists.
  for (Eigen::Index j = 0; j < n; ++j) {
    const bool lo = std::isfinite(lower_[j]);
    const bool up = std::isfinite(upper_[j]);
    if (lo && !up) zl_[j] = std::max(cnorm, c_[j] + cnorm);
    if (up && !lo) zu_[j] = std::max(cnorm, -c_[j] + cnorm);
    if (lo && up) {
      zl_[j] = cnorm + std::max(0.0, c_[j]);
      zu_[j] = cnorm + std::max(0.0, -c_[j]);
    }
  }
}

bool InteriorPointSolver::factorize(const Vec& theta) {
  if (!analyzed_) {
    normal_ = plan_.make_matrix();
  }
  for (int attempt = 0; attempt < 6; ++attempt) {
    const std::span<const double> d(theta.data(), static_cast<std::size_t>(theta.size()));
    if (options_.parallel) {
      plan_.assemble(d, dual_regularization_, normal_);
    } else {
      plan_.assemble_serial(d, dual_regularization_, normal_);
    }
    if (!analyzed_) {
      ldlt_.analyzePattern(normal_);
      analyzed_ = true;
    }
    ldlt_.factorize(normal_);
    if (ldlt_.info() == Eigen::Success) {
      const auto diag = ldlt_.vectorD();
      if ((diag.array() > 0.0).all()) return true;
    }
    dual_regularization_ *= 100.0;
  }
  return false;
}

Vec InteriorPointSolver::solve_normal(const Vec& rhs) {
  Vec sol = ldlt_.solve(rhs);
  for (int refine = 0; refine < 2; ++refine) {
    const Vec residual = rhs - normal_.selfadjointView<Eigen::Lower>() * sol;
    sol += ldlt_.solve(residual);
  }
  return sol;
}

void InteriorPointSolver::direction(const Vec& theta, const Vec& rp, const Vec& rd, const Vec& rl,
                                    const Vec& ru, Vec& dx, Vec& dy, Vec& dzl, Vec& dzu) {
  const Eigen::Index n = a_.cols();
  Vec g = rd;
  for (int j : has_lower_) g[j] -= rl[j] / xl_[j];
  for (int j : has_upper_) g[j] += ru[j] / xu_[j];
  const Vec rhs = rp + a_ * theta.cwiseProduct(g);
  dy = solve_normal(rhs);
  dx = theta.cwiseProduct(a_.transpose() * dy - g);
  dzl = Vec::Zero(n);
  dzu = Vec::Zero(n);
  for (int j : has_lower_) dzl[j] = (rl[j] - zl_[j] * dx[j]) / xl_[j];
  for (int j : has_upper_) dzu[j] = (ru[j] + zu_[j] * dx[j]) / xu_[j];
}

LpSolution InteriorPointSolver::run(Vec& x_out, double& primal_obj, double& dual_obj) {
  LpSolution result;
  const Eigen::Index n = a_.cols();
  const int bounded = static_cast<int>(has_lower_.size() + has_upper_.size());
  const double bnorm = 1.0 + b_.lpNorm<Eigen::Infinity>();
  const double cnorm = 1.0 + c_.lpNorm<Eigen::Infinity>();
  constexpr double kPrimalRegularization = 1e-10;

  initial_point();

  double best_primal = std::numeric_limits<double>::infinity();
  int stalled = 0;
  // Near-degenerate problems can stall with feasible iterates and a gap
  // slightly above tolerance; such a point is accepted as optimal.
  constexpr double kStalledGap = 1e-7;
  double best_gap = std::numeric_limits<double>::infinity();
  int gap_stalled = 0;
  for (int iter = 0; iter < options_.max_iterations; ++iter) {
    result.iterations = iter;
    xl_ = Vec::Zero(n);
    xu_ = Vec::Zero(n);
    for (int j : has_lower_) xl_[j] = x_[j] - lower_[j];
    for (int j : has_upper_) xu_[j] = upper_[j] - x_[j];

    const Vec rp = b_ - a_ * x_;
    const Vec rd = c_ - a_.transpose() * y_ - zl_ + zu_;
    const double mu = bounded > 0 ? (xl_.dot(zl_) + xu_.dot(zu_)) / bounded : 0.0;

    primal_obj = c_.dot(x_);
    dual_obj = b_.dot(y_);
    for (int j : has_lower_) dual_obj += lower_[j] * zl_[j];
    for (int j : has_upper_) dual_obj -= upper_[j] * zu_[j];

    const double primal_res = rp.lpNorm<Eigen::Infinity>() / bnorm;
    const double dual_res = rd.lpNorm<Eigen::Infinity>() / cnorm;
    const double gap = std::abs(primal_obj - dual_obj) / (1.0 + std::abs(primal_obj));
    result.primal_infeasibility = primal_res;
    result.relative_gap = gap;
    const bool feasible = primal_res < options_.tolerance && dual_res < options_.tolerance;
    if (feasible && gap < options_.tolerance) {
      result.status = LpStatus::Optimal;
      x_out = x_;
      return result;
    }
    if (gap < 0.5 * best_gap) {
      best_gap = gap;
      gap_stalled = 0;
    } else if (++gap_stalled >= 5 && feasible && gap < kStalledGap) {
      result.status = LpStatus::Optimal;
      x_out = x_;
      return result;
    }

    // Primal infeasibility shows up as a growing dual ray with a stalled
    // primal residual.
    if (primal_res < 0.9 * best_primal) {
      best_primal = primal_res;
      stalled = 0;
    } else if (++stalled >= 10 && primal_res > 1e-6) {
      result.status = LpStatus::Infeasible;
      x_out = x_;
      return result;
    }
    if (!std::isfinite(primal_obj) || !std::isfinite(dual_obj)) {
      result.status = LpStatus::NumericalFailure;
      x_out = x_;
      return result;
    }
    if (y_.lpNorm<Eigen::Infinity>() > 1e8 * cnorm && primal_res > 1e-6) {
      result.status = LpStatus::Infeasible;
      x_out = x_;
      return result;
    }

    Vec theta_inv = Vec::Constant(n, kPrimalRegularization);
    for (int j : has_lower_) theta_inv[j] += zl_[j] / xl_[j];
    for (int j : has_upper_) theta_inv[j] += zu_[j] / xu_[j];
    const Vec theta = theta_inv.cwiseInverse();
    if (!factorize(theta)) {
      result.status = LpStatus::NumericalFailure;
      x_out = x_;
      return result;
    }

    // Predictor.
    Vec rl = Vec::Zero(n);
    Vec ru = Vec::Zero(n);
    for (int j : has_lower_) rl[j] = -xl_[j] * zl_[j];
    for (int j : has_upper_) ru[j] = -xu_[j] * zu_[j];
    Vec dx, dy, dzl, dzu;
    direction(theta, rp, rd, rl, ru, dx, dy, dzl, dzu);

    const double ap_aff = std::min(step_to_boundary(xl_, dx, has_lower_, 1.0),
                                   step_to_boundary(xu_, dx, has_upper_, -1.0));
    const double ad_aff = std::min(step_to_boundary(zl_, dzl, has_lower_, 1.0),
                                   step_to_boundary(zu_, dzu, has_upper_, 1.0));
    double mu_aff = 0.0;
    for (int j : has_lower_) mu_aff += (xl_[j] + ap_aff * dx[j]) * (zl_[j] + ad_aff * dzl[j]);
    for (int j : has_upper_) mu_aff += (xu_[j] - ap_aff * dx[j]) * (zu_[j] + ad_aff * dzu[j]);
    mu_aff = bounded > 0 ? mu_aff / bounded : 0.0;
    const double sigma = mu > 0.0 ? std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3) : 0.0;

    // Corrector.
    for (int j : has_lower_) rl[j] = sigma * mu - xl_[j] * zl_[j] - dx[j] * dzl[j];
    for (int j : has_upper_) ru[j] = sigma * mu - xu_[j] * zu_[j] + dx[j] * dzu[j];
    direction(theta, rp, rd, rl, ru, dx, dy, dzl, dzu);

    const double eta = std::max(0.9, 1.0 - 10.0 * mu / (1.0 + mu) );
    const double step_fraction = std::min(0.9995, eta);
    const double ap = std::min(1.0, step_fraction * std::min(step_to_boundary(xl_, dx, has_lower_, 1.0),
                                                             step_to_boundary(xu_, dx, has_upper_, -1.0)));
    const double ad = std::min(1.0, step_fraction * std::min(step_to_boundary(zl_, dzl, has_lower_, 1.0),
                                                             step_to_boundary(zu_, dzu, has_upper_, 1.0)));
    x_ += ap * dx;
    y_ += ad * dy;
    zl_ += ad * dzl;
    zu_ += ad * dzu;
    for (int j : has_lower_) zl_[j] = std::max(zl_[j], 1e-300);
    for (int j : has_upper_) zu_[j] = std::max(zu_[j], 1e-300);
  }
  x_out = x_;
  result.status = LpStatus::IterationLimit;
  return result;
}

LpSolution solve_impl(const LinearProgram& model, const IpmOptions& options);

// Elastic feasibility problem: every row gets a penalized violation pair, so
// the problem is always feasible and its optimum is the total violation.
bool certify_infeasible(const LinearProgram& model, const IpmOptions& options) {
  LinearProgram elastic;
  for (int j = 0; j < model.num_columns(); ++j) {
    elastic.add_variable(0.0, model.column_lower()[j], model.column_upper()[j]);
  }
  double scale = 1.0;
  for (int i = 0; i < model.num_rows(); ++i) {
    const double lo = model.row_lower()[i];
    const double up = model.row_upper()[i];
    elastic.add_row(lo, up);
    if (std::isfinite(lo)) scale = std::max(scale, std::abs(lo));
    if (std::isfinite(up)) scale = std::max(scale, std::abs(up));
  }
  for (const auto& e : model.coefficients()) elastic.add_coefficient(e.row, e.col, e.value);
  for (int i = 0; i < model.num_rows(); ++i) {
    const int over = elastic.add_variable(1.0, 0.0, kInf);
    const int under = elastic.add_variable(1.0, 0.0, kInf);
    elastic.add_coefficient(i, over, -1.0);
    elastic.add_coefficient(i, under, 1.0);
  }
  const LpSolution phase1 = solve_impl(elastic, options);
  if (phase1.status != LpStatus::Optimal) return false;
  return phase1.objective > 1e-7 * scale;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& model, const IpmOptions& options) {
  LpSolution solution = solve_impl(model, options);
  if (solution.status == LpStatus::IterationLimit || solution.status == LpStatus::NumericalFailure ||
      solution.status == LpStatus::Infeasible) {
    if (certify_infeasible(model, options)) {
      solution.status = LpStatus::Infeasible;
    } else if (solution.status == LpStatus::Infeasible) {
      solution.status = LpStatus::NumericalFailure;
    }
  }
  return solution;
}

namespace {

LpSolution solve_impl(const LinearProgram& model, const IpmOptions& options) {
  StandardForm sf = to_standard_form(model);
  LpSolution solution;
  const int n = model.num_columns();
  if (sf.trivially_infeasible) {
    solution.status = LpStatus::Infeasible;
    solution.x = sf.fixed_value;
    return solution;
  }

  std::vector<double> x(n, 0.0);
  for (int j = 0; j < n; ++j) {
    if (sf.column_of[j] < 0) x[j] = sf.fixed_value[j];
  }

  if (sf.a.cols() > 0) {
    auto [row_scale, col_scale] = equilibrate(sf.a);
    sf.b = sf.b.cwiseProduct(row_scale);
    sf.c = sf.c.cwiseProduct(col_scale);
    const double cost_scale = std::max(1.0, sf.c.lpNorm<Eigen::Infinity>());
    sf.c /= cost_scale;
    sf.lower = sf.lower.cwiseQuotient(col_scale);
    sf.upper = sf.upper.cwiseQuotient(col_scale);

    InteriorPointSolver solver(sf, options);
    Vec xs;
    double primal_obj = 0.0;
    double dual_obj = 0.0;
    solution = solver.run(xs, primal_obj, dual_obj);
    xs = xs.cwiseProduct(col_scale);
    for (int j = 0; j < n; ++j) {
      const int col = sf.column_of[j];
      if (col >= 0) x[j] = xs[col];
    }
    double fixed_cost = model.objective_offset();
    for (int j = 0; j < n; ++j) {
      if (sf.column_of[j] < 0) fixed_cost += model.cost()[j] * sf.fixed_value[j];
    }
    solution.dual_bound = dual_obj * cost_scale + fixed_cost;
  } else {
    solution.status = LpStatus::Optimal;
    solution.dual_bound = model.objective(x);
  }

  solution.x = std::move(x);
  solution.objective = model.objective(solution.x);
  return solution;
}

}  // namespace

}  // namespace tees::lp
