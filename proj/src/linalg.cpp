#include "polydg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "polydg/parallel.hpp"

namespace polydg {

// ---------------------------------------------------------------------------
// SparseOperator

SparseOperator SparseOperator::from_triplets(int rows, int cols, std::vector<Triplet> entries) {
  for (const auto& t : entries)
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::out_of_range("SparseOperator: triplet index out of range");
  // Stable sort keeps the insertion order of duplicates, so sums are reproducible.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  SparseOperator A(rows, cols);
  std::size_t i = 0;
  while (i < entries.size()) {
    const int r = entries[i].row, c = entries[i].col;
    double sum = 0.0;
    for (; i < entries.size() && entries[i].row == r && entries[i].col == c; ++i) sum += entries[i].value;
    if (sum != 0.0) {
      A.col_idx_.push_back(c);
      A.values_.push_back(sum);
      ++A.row_ptr_[r + 1];
    }
  }
  for (int r = 0; r < rows; ++r) A.row_ptr_[r + 1] += A.row_ptr_[r];
  return A;
}

SparseOperator SparseOperator::from_dense(const MatrixXd& dense, double drop_tol) {
  std::vector<Triplet> t;
  for (int i = 0; i < dense.rows(); ++i)
    for (int j = 0; j < dense.cols(); ++j)
      if (std::abs(dense(i, j)) > drop_tol) t.push_back({i, j, dense(i, j)});
  return from_triplets(static_cast<int>(dense.rows()), static_cast<int>(dense.cols()), std::move(t));
}

SparseOperator SparseOperator::identity(int n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

void SparseOperator::apply(const VectorXd& x, VectorXd& y) const {
  if (x.size() != cols_) throw std::invalid_argument("spmv: dimension mismatch");
  y.resize(rows_);
  auto row_range = [&](int r0, int r1) {
    for (int r = r0; r < r1; ++r) {
      double s = 0.0;
      for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k] * x[col_idx_[k]];
      y[r] = s;
    }
  };
  constexpr int kChunk = 4096;
  if (nnz() < 200000) {
    row_range(0, rows_);
    return;
  }
  const int chunks = (rows_ + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](int c) { row_range(c * kChunk, std::min(rows_, (c + 1) * kChunk)); });
}

VectorXd SparseOperator::operator*(const VectorXd& x) const {
  VectorXd y;
  apply(x, y);
  return y;
}

VectorXd SparseOperator::apply_transpose(const VectorXd& x) const {
  if (x.size() != rows_) throw std::invalid_argument("transpose apply: dimension mismatch");
  VectorXd y = VectorXd::Zero(cols_);
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) y[col_idx_[k]] += values_[k] * x[r];
  return y;
}

double SparseOperator::coeff(int i, int j) const {
  const auto b = col_idx_.begin() + row_ptr_[i], e = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(b, e, j);
  return (it != e && *it == j) ? values_[it - col_idx_.begin()] : 0.0;
}

std::vector<Triplet> SparseOperator::triplets() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) t.push_back({r, col_idx_[k], values_[k]});
  return t;
}

SparseOperator SparseOperator::transpose() const {
  auto t = triplets();
  for (auto& e : t) std::swap(e.row, e.col);
  return from_triplets(cols_, rows_, std::move(t));
}

SparseOperator SparseOperator::scaled(double s) const {
  if (s == 0.0) return SparseOperator(rows_, cols_);
  SparseOperator A = *this;
  for (double& v : A.values_) v *= s;
  return A;
}

MatrixXd SparseOperator::to_dense() const {
  MatrixXd D = MatrixXd::Zero(rows_, cols_);
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) D(r, col_idx_[k]) = values_[k];
  return D;
}

Eigen::SparseMatrix<double> SparseOperator::to_eigen() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(values_.size());
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) t.emplace_back(r, col_idx_[k], values_[k]);
  Eigen::SparseMatrix<double> S(rows_, cols_);
  S.setFromTriplets(t.begin(), t.end());
  S.makeCompressed();
  return S;
}

double SparseOperator::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SparseOperator::symmetry_defect() const {
  if (rows_ != cols_) throw std::invalid_argument("symmetry_defect: non-square operator");
  const double m = max_abs();
  if (m == 0.0) return 0.0;
  double d = 0.0;
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) d = std::max(d, std::abs(values_[k] - coeff(col_idx_[k], r)));
  return d / m;
}

SparseOperator combine(double a, const SparseOperator& A, double b, const SparseOperator& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) throw std::invalid_argument("combine: shape mismatch");
  BlockBuilder bb(A.rows(), A.cols());
  bb.add(A, 0, 0, a);
  bb.add(B, 0, 0, b);
  return std::move(bb).build();
}

void BlockBuilder::add(const SparseOperator& block, int row0, int col0, double scale, bool transposed) {
  if (scale == 0.0) return;
  const int br = transposed ? block.cols() : block.rows();
  const int bc = transposed ? block.rows() : block.cols();
  if (row0 < 0 || col0 < 0 || row0 + br > rows_ || col0 + bc > cols_)
    throw std::out_of_range("BlockBuilder: block does not fit");
  const auto& rp = block.row_ptr();
  const auto& ci = block.col_idx();
  const auto& v = block.values();
  for (int r = 0; r < block.rows(); ++r)
    for (int k = rp[r]; k < rp[r + 1]; ++k) {
      if (transposed)
        entries_.push_back({row0 + ci[k], col0 + r, scale * v[k]});
      else
        entries_.push_back({row0 + r, col0 + ci[k], scale * v[k]});
    }
}

SparseOperator BlockBuilder::build() && { return SparseOperator::from_triplets(rows_, cols_, std::move(entries_)); }

VectorXd spmv(const SparseOperator& A, const VectorXd& x) { return A * x; }

// ---------------------------------------------------------------------------
// Block-diagonal solves

BlockDiagonalSolver::BlockDiagonalSolver(const SparseOperator& A, const DofBlocks& blocks, bool strict)
    : blocks_(blocks), n_(A.rows()) {
  if (A.rows() != A.cols()) throw std::invalid_argument("BlockDiagonalSolver: non-square operator");
  if (strict && !is_block_diagonal(A, blocks))
    throw std::invalid_argument("BlockDiagonalSolver: operator has entries outside the diagonal blocks");
  factors_.resize(blocks_.size());
  parallel_for(static_cast<int>(blocks_.size()), [&](int b) {
    const auto& idx = blocks_[b];
    const int m = static_cast<int>(idx.size());
    MatrixXd local(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) local(i, j) = A.coeff(idx[i], idx[j]);
    factors_[b].compute(local);
  });
}

bool BlockDiagonalSolver::is_block_diagonal(const SparseOperator& A, const DofBlocks& blocks) {
  std::vector<int> owner(A.rows(), -1);
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b)
    for (int i : blocks[b]) owner[i] = b;
  for (int r = 0; r < A.rows(); ++r)
    for (int k = A.row_ptr()[r]; k < A.row_ptr()[r + 1]; ++k) {
      const int c = A.col_idx()[k];
      if (owner[r] < 0 || owner[r] != owner[c]) return false;
    }
  return true;
}

VectorXd BlockDiagonalSolver::solve(const VectorXd& b) const {
  VectorXd x = VectorXd::Zero(n_);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto& idx = blocks_[k];
    VectorXd local(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) local[i] = b[idx[i]];
    local = factors_[k].solve(local);
    for (std::size_t i = 0; i < idx.size(); ++i) x[idx[i]] = local[i];
  }
  return x;
}

// ---------------------------------------------------------------------------
// Solvers

namespace {

VectorXd pcg(const SparseOperator& A, const VectorXd& b, const SolveConfig& cfg, const DofBlocks* blocks,
             SolveStats* stats, const std::string& label) {
  const int n = A.rows();
  std::function<VectorXd(const VectorXd&)> precond;
  BlockDiagonalSolver bj;
  VectorXd inv_diag;
  if (cfg.preconditioner == SolveConfig::Preconditioner::block_diagonal && blocks) {
    bj = BlockDiagonalSolver(A, *blocks, false);
    precond = [&bj](const VectorXd& r) { return bj.solve(r); };
  } else if (cfg.preconditioner == SolveConfig::Preconditioner::block_diagonal) {
    inv_diag.resize(n);
    for (int i = 0; i < n; ++i) {
      const double d = A.coeff(i, i);
      if (!(d > 0)) throw std::runtime_error("solve_spd: non-positive diagonal in " + label);
      inv_diag[i] = 1.0 / d;
    }
    precond = [&inv_diag](const VectorXd& r) { return VectorXd(inv_diag.cwiseProduct(r)); };
  } else {
    precond = [](const VectorXd& r) { return r; };
  }
  const double bnorm = b.norm();
  VectorXd x = VectorXd::Zero(n);
  if (bnorm == 0.0) {
    if (stats) *stats = {"cg", 0, 0.0};
    return x;
  }
  VectorXd r = b, z = precond(r), p = z, Ap;
  double rz = r.dot(z);
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    if (r.norm() <= cfg.rel_tol * bnorm) break;
    A.apply(p, Ap);
    const double pAp = p.dot(Ap);
    if (!(pAp > 0))
      throw std::runtime_error("solve_spd: CG breakdown (p^T A p <= 0) in " + label + " at iteration " +
                               std::to_string(it));
    const double alpha = rz / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    z = precond(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  const double rel = (b - A * x).norm() / bnorm;
  if (stats) *stats = {"cg", it, rel};
  if (!(rel <= std::max(cfg.rel_tol * 10.0, 1e-14)))
    throw std::runtime_error("solve_spd: CG did not converge for " + label + " (" + std::to_string(it) +
                             " iterations, relative residual " + std::to_string(rel) + ")");
  return x;
}

}  // namespace

VectorXd solve_spd(const SparseOperator& A, const VectorXd& b, const SolveConfig& cfg, const DofBlocks* blocks,
                   SolveStats* stats, const std::string& label) {
  if (A.rows() != A.cols() || A.rows() != b.size()) throw std::invalid_argument("solve_spd: dimension mismatch");
  if (!(cfg.rel_tol > 0 && cfg.rel_tol < 1)) throw std::invalid_argument("solve_spd: rel_tol must lie in (0,1)");
  const bool dense = cfg.method == SolveConfig::Method::direct ||
                     (cfg.method == SolveConfig::Method::automatic && A.rows() < cfg.dense_threshold);
  if (!dense) return pcg(A, b, cfg, blocks, stats, label);
  if (b.norm() == 0.0) {
    if (stats) *stats = {"dense-llt", 0, 0.0};
    return VectorXd::Zero(b.size());
  }
  Eigen::LLT<MatrixXd> llt(A.to_dense());
  if (llt.info() != Eigen::Success) throw std::runtime_error("solve_spd: " + label + " is not positive definite");
  VectorXd x = llt.solve(b);
  const double rel = (b - A * x).norm() / b.norm();
  if (stats) *stats = {"dense-llt", 0, rel};
  if (!(rel <= std::max(cfg.rel_tol, 1e-12)))
    throw std::runtime_error("solve_spd: residual contract violated for " + label);
  return x;
}

struct LinearSolver::Impl {
  std::string label;
  std::string method;
  SparseOperator A;
  SolveConfig cfg;
  DofBlocks blocks;
  bool has_blocks = false;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
};

LinearSolver::LinearSolver(const SparseOperator& A, const SolveConfig& cfg, const DofBlocks* blocks,
                           std::string label)
    : impl_(std::make_unique<Impl>()) {
  if (A.rows() != A.cols()) throw std::invalid_argument("LinearSolver: non-square operator");
  impl_->label = std::move(label);
  impl_->A = A;
  impl_->cfg = cfg;
  if (blocks) {
    impl_->blocks = *blocks;
    impl_->has_blocks = true;
  }
  if (cfg.method == SolveConfig::Method::cg) {
    impl_->method = "cg";
    return;
  }
  const auto S = A.to_eigen();
  if (A.symmetry_defect() <= 1e-12) {
    impl_->method = "sparse-ldlt";
    impl_->ldlt.compute(S);
    if (impl_->ldlt.info() != Eigen::Success)
      throw std::runtime_error("LinearSolver: LDL^T factorization failed for " + impl_->label);
  } else {
    impl_->method = "sparse-lu";
    impl_->lu.analyzePattern(S);
    impl_->lu.factorize(S);
    if (impl_->lu.info() != Eigen::Success)
      throw std::runtime_error("LinearSolver: LU factorization failed for " + impl_->label);
  }
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

VectorXd LinearSolver::solve(const VectorXd& b) const {
  if (impl_->method == "cg")
    return pcg(impl_->A, b, impl_->cfg, impl_->has_blocks ? &impl_->blocks : nullptr, nullptr, impl_->label);
  VectorXd x = impl_->method == "sparse-ldlt" ? VectorXd(impl_->ldlt.solve(b)) : VectorXd(impl_->lu.solve(b));
  if (!x.allFinite()) throw std::runtime_error("LinearSolver: non-finite solution for " + impl_->label);
  return x;
}

const std::string& LinearSolver::method() const { return impl_->method; }

double dense_min_eigenvalue(const SparseOperator& A) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(A.to_dense(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool dense_cholesky_succeeds(const SparseOperator& A) {
  Eigen::LLT<MatrixXd> llt(A.to_dense());
  return llt.info() == Eigen::Success;
}

// ---------------------------------------------------------------------------
// Matrix Market

void write_matrix_market(std::ostream& os, const SparseOperator& A) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << A.rows() << ' ' << A.cols() << ' ' << A.nnz() << '\n';
  os << std::setprecision(17);
  for (const auto& t : A.triplets()) os << t.row + 1 << ' ' << t.col + 1 << ' ' << t.value << '\n';
}

void write_matrix_market_file(const std::string& path, const SparseOperator& A) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  write_matrix_market(f, A);
}

SparseOperator read_matrix_market(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw std::runtime_error("read_matrix_market: missing banner");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (object != "matrix" || format != "coordinate" || (field != "real" && field != "integer"))
    throw std::runtime_error("read_matrix_market: only real coordinate matrices are supported");
  const bool symmetric = symmetry == "symmetric";
  while (std::getline(is, line) && (line.empty() || line[0] == '%')) {
  }
  int rows = 0, cols = 0, nnz = 0;
  std::istringstream head(line);
  if (!(head >> rows >> cols >> nnz)) throw std::runtime_error("read_matrix_market: bad size line");
  std::vector<Triplet> t;
  t.reserve(nnz);
  for (int k = 0; k < nnz; ++k) {
    int i, j;
    double v;
    if (!(is >> i >> j >> v)) throw std::runtime_error("read_matrix_market: truncated entries");
    t.push_back({i - 1, j - 1, v});
    if (symmetric && i != j) t.push_back({j - 1, i - 1, v});
  }
  return SparseOperator::from_triplets(rows, cols, std::move(t));
}

SparseOperator read_matrix_market_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return read_matrix_market(f);
}

}  // namespace polydg
