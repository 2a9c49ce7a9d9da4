#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "bouss/sparse.hpp"

namespace testing {

inline Eigen::MatrixXd dense(const bouss::SparseMatrix& A) {
  const auto n = static_cast<Eigen::Index>(A.rows());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  const auto& off = A.row_offsets();
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      M(static_cast<Eigen::Index>(i), A.column_indices()[k]) = A.values()[k];
    }
  }
  return M;
}

inline std::vector<double> dense_solve(const bouss::SparseMatrix& A, const std::vector<double>& b) {
  const Eigen::VectorXd x =
      dense(A).fullPivLu().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size())));
  return {x.data(), x.data() + x.size()};
}

inline double min_eigenvalue(const bouss::SparseMatrix& A) {
  const Eigen::MatrixXd M = dense(A);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
  return es.eigenvalues().minCoeff();
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(gen);
  return v;
}

}  // namespace testing
