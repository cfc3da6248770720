#pragma once

#include <span>
#include <vector>

#include <Eigen/SparseCore>

namespace tees::lp {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// Scatter plan for the interior-point normal matrix M = A diag(d) A' + shift*I.
// Only the lower triangle of M is stored (column-major). The sparsity pattern
// is fixed by A, so the plan is built once and every iteration only refills
// values.
class NormalEquationsPlan {
 public:
  explicit NormalEquationsPlan(const SparseMatrix& a);

  // Matrix with the lower-triangular pattern of M and zero values.
  SparseMatrix make_matrix() const;

  // OpenMP kernel, parallel over the stored entries of M.
  void assemble(std::span<const double> d, double shift, SparseMatrix& m) const;

  // Same result computed one entry at a time on the calling thread.
  void assemble_serial(std::span<const double> d, double shift, SparseMatrix& m) const;

  int rows() const { return rows_; }
  std::size_t nonzeros() const { return inner_.size(); }

 private:
  int rows_ = 0;
  std::vector<int> outer_;
  std::vector<int> inner_;
  std::vector<int> slot_begin_;
  std::vector<int> contrib_col_;
  std::vector<double> contrib_coef_;
  std::vector<int> diagonal_slot_;
};

// Reference assembly through Eigen's sparse product; lower triangle only.
SparseMatrix normal_matrix_reference(const SparseMatrix& a, std::span<const double> d,
                                     double shift);

}  // namespace tees::lp
