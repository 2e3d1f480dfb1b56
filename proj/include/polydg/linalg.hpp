#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace polydg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed-row sparse matrix. Immutable once built; duplicates are summed
/// in a fixed order and exact zeros are dropped.
class SparseOperator {
 public:
  SparseOperator() = default;
  SparseOperator(int rows, int cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  static SparseOperator from_triplets(int rows, int cols, std::vector<Triplet> entries);
  static SparseOperator from_dense(const MatrixXd& dense, double drop_tol = 0.0);
  static SparseOperator identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const { return static_cast<int>(values_.size()); }
  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  /// y = A x (deterministic, row-parallel for large matrices).
  void apply(const VectorXd& x, VectorXd& y) const;
  VectorXd operator*(const VectorXd& x) const;
  /// y = A^T x
  VectorXd apply_transpose(const VectorXd& x) const;

  double coeff(int i, int j) const;
  SparseOperator transpose() const;
  SparseOperator scaled(double s) const;
  MatrixXd to_dense() const;
  Eigen::SparseMatrix<double> to_eigen() const;
  std::vector<Triplet> triplets() const;

  double max_abs() const;
  /// max |A - A^T| / max |A| (0 for the zero matrix).
  double symmetry_defect() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

/// a A + b B (same shape).
SparseOperator combine(double a, const SparseOperator& A, double b, const SparseOperator& B);

/// Accumulates scaled blocks into one operator.
class BlockBuilder {
 public:
  BlockBuilder(int rows, int cols) : rows_(rows), cols_(cols) {}
  void add(const SparseOperator& block, int row0, int col0, double scale = 1.0, bool transposed = false);
  SparseOperator build() &&;

 private:
  int rows_, cols_;
  std::vector<Triplet> entries_;
};

VectorXd spmv(const SparseOperator& A, const VectorXd& x);

struct SolveConfig {
  enum class Method { automatic, direct, cg };
  enum class Preconditioner { none, block_diagonal };
  Method method = Method::automatic;
  Preconditioner preconditioner = Preconditioner::block_diagonal;
  double rel_tol = 1e-10;
  int max_iters = 20000;
  int dense_threshold = 2000;  // automatic: dense direct below this size
};

struct SolveStats {
  std::string method;
  int iterations = 0;
  double rel_residual = 0.0;
};

using DofBlocks = std::vector<std::vector<int>>;

/// Solves A x = b for symmetric positive definite A. Throws std::runtime_error
/// naming `label` on breakdown or when the residual contract fails.
VectorXd solve_spd(const SparseOperator& A, const VectorXd& b, const SolveConfig& cfg = {},
                   const DofBlocks* blocks = nullptr, SolveStats* stats = nullptr,
                   const std::string& label = "matrix");

/// Dense LU of each diagonal block; requires A to have no entries outside the blocks.
class BlockDiagonalSolver {
 public:
  BlockDiagonalSolver() = default;
  /// With `strict` unset, entries outside the blocks are ignored (used as a
  /// block-Jacobi preconditioner).
  BlockDiagonalSolver(const SparseOperator& A, const DofBlocks& blocks, bool strict = true);
  VectorXd solve(const VectorXd& b) const;
  /// True when every nonzero of A lies inside one of the blocks.
  static bool is_block_diagonal(const SparseOperator& A, const DofBlocks& blocks);

 private:
  DofBlocks blocks_;
  std::vector<Eigen::PartialPivLU<MatrixXd>> factors_;
  int n_ = 0;
};

/// Reusable solver for a fixed matrix: sparse LDL^T when symmetric, sparse LU
/// otherwise, or preconditioned CG when requested.
class LinearSolver {
 public:
  LinearSolver(const SparseOperator& A, const SolveConfig& cfg = {}, const DofBlocks* blocks = nullptr,
               std::string label = "matrix");
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  VectorXd solve(const VectorXd& b) const;
  const std::string& method() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Smallest eigenvalue of a symmetric matrix via dense decomposition (oracles only).
double dense_min_eigenvalue(const SparseOperator& A);
bool dense_cholesky_succeeds(const SparseOperator& A);

void write_matrix_market(std::ostream& os, const SparseOperator& A);
void write_matrix_market_file(const std::string& path, const SparseOperator& A);
SparseOperator read_matrix_market(std::istream& is);
SparseOperator read_matrix_market_file(const std::string& path);

}  // namespace polydg
