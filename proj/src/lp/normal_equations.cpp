#include "tees/lp/normal_equations.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>

namespace tees::lp {

namespace {

struct Contribution {
  int col;  // column of M
  int row;  // row of M, >= col
  int source;
  double coef;
};

}  // namespace

NormalEquationsPlan::NormalEquationsPlan(const SparseMatrix& a) : rows_(static_cast<int>(a.rows())) {
  std::vector<Contribution> contributions;
  std::vector<std::pair<int, double>> column;
  for (int j = 0; j < a.outerSize(); ++j) {
    column.clear();
    for (SparseMatrix::InnerIterator it(a, j); it; ++it) column.emplace_back(it.row(), it.value());
    std::sort(column.begin(), column.end());
    for (std::size_t p = 0; p < column.size(); ++p) {
      for (std::size_t q = 0; q <= p; ++q) {
        contributions.push_back({column[q].first, column[p].first, j, column[p].second * column[q].second});
      }
    }
  }
  for (int i = 0; i < rows_; ++i) contributions.push_back({i, i, -1, 0.0});
  std::sort(contributions.begin(), contributions.end(), [](const Contribution& l, const Contribution& r) {
    if (l.col != r.col) return l.col < r.col;
    if (l.row != r.row) return l.row < r.row;
    return l.source < r.source;
  });

  outer_.assign(rows_ + 1, 0);
  diagonal_slot_.assign(rows_, -1);
  int last_col = -1;
  int last_row = -1;
  for (const auto& c : contributions) {
    if (c.col != last_col || c.row != last_row) {
      inner_.push_back(c.row);
      slot_begin_.push_back(static_cast<int>(contrib_col_.size()));
      ++outer_[c.col + 1];
      if (c.row == c.col) diagonal_slot_[c.col] = static_cast<int>(inner_.size()) - 1;
      last_col = c.col;
      last_row = c.row;
    }
    if (c.source >= 0) {
      contrib_col_.push_back(c.source);
      contrib_coef_.push_back(c.coef);
    }
  }
  slot_begin_.push_back(static_cast<int>(contrib_col_.size()));
  for (int i = 0; i < rows_; ++i) outer_[i + 1] += outer_[i];
}

SparseMatrix NormalEquationsPlan::make_matrix() const {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(inner_.size());
  for (int col = 0; col < rows_; ++col) {
    for (int s = outer_[col]; s < outer_[col + 1]; ++s) triplets.emplace_back(inner_[s], col, 0.0);
  }
  SparseMatrix m(rows_, rows_);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

void NormalEquationsPlan::assemble(std::span<const double> d, double shift, SparseMatrix& m) const {
  double* values = m.valuePtr();
  const auto slots = static_cast<std::int64_t>(inner_.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < slots; ++s) {
    double sum = 0.0;
    for (int k = slot_begin_[s]; k < slot_begin_[s + 1]; ++k) sum += contrib_coef_[k] * d[contrib_col_[k]];
    values[s] = sum;
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < rows_; ++i) values[diagonal_slot_[i]] += shift;
}

void NormalEquationsPlan::assemble_serial(std::span<const double> d, double shift, SparseMatrix& m) const {
  double* values = m.valuePtr();
  for (std::size_t s = 0; s < inner_.size(); ++s) {
    double sum = 0.0;
    for (int k = slot_begin_[s]; k < slot_begin_[s + 1]; ++k) sum += contrib_coef_[k] * d[contrib_col_[k]];
    values[s] = sum;
  }
  for (int i = 0; i < rows_; ++i) values[diagonal_slot_[i]] += shift;
}

SparseMatrix normal_matrix_reference(const SparseMatrix& a, std::span<const double> d, double shift) {
  Eigen::VectorXd dv = Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
  SparseMatrix ad = a * dv.asDiagonal();
  SparseMatrix full = ad * a.transpose();
  SparseMatrix identity(a.rows(), a.rows());
  identity.setIdentity();
  full += shift * identity;
  SparseMatrix lower = full.triangularView<Eigen::Lower>();
  lower.makeCompressed();
  return lower;
}

}  // namespace tees::lp
