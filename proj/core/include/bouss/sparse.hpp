#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace bouss {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// Square matrix in compressed row storage. Column indices are sorted and
// unique within each row.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  // Duplicate (row, col) entries are summed.
  static SparseMatrix from_triplets(std::size_t n, std::span<const Triplet> entries);
  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return n_; }
  std::size_t nonzeros() const { return values_.size(); }

  const std::vector<std::size_t>& row_offsets() const { return offsets_; }
  const std::vector<int>& column_indices() const { return cols_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  // Entry (i, j), zero when not stored.
  double at(std::size_t i, std::size_t j) const;
  std::vector<double> diagonal() const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;

  SparseMatrix transpose() const;
  // max |a_ij - a_ji| relative to max |a_ij|.
  double asymmetry() const;

  // Replaces row i and column i by the unit vector (strong Dirichlet row).
  void set_identity_rows(std::span<const int> indices);

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<int> cols_;
  std::vector<double> values_;
};

struct SolverOptions {
  double tol = 1e-10;
  // 0 means 10 * n.
  int max_iterations = 0;
};

struct SolverReport {
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
};

struct SolveResult {
  std::vector<double> x;
  SolverReport report;
};

// Jacobi-preconditioned conjugate gradients for symmetric positive definite A.
// x0, when given, is the starting iterate.
SolveResult cg_solve(const SparseMatrix& A, std::span<const double> b, const SolverOptions& options = {},
                     std::span<const double> x0 = {});

// Jacobi-preconditioned BiCGStab for general A.
SolveResult bicgstab_solve(const SparseMatrix& A, std::span<const double> b, const SolverOptions& options = {},
                           std::span<const double> x0 = {});

// Sparse LU factorization, computed once and reused for many right-hand sides.
class DirectSolver {
 public:
  explicit DirectSolver(const SparseMatrix& A);
  ~DirectSolver();
  DirectSolver(DirectSolver&&) noexcept;
  DirectSolver& operator=(DirectSolver&&) noexcept;

  std::vector<double> solve(std::span<const double> b) const;
  std::size_t size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace bouss
