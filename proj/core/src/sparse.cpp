#include "bouss/sparse.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bouss/error.hpp"

namespace bouss {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

SparseMatrix SparseMatrix::from_triplets(std::size_t n, std::span<const Triplet> entries) {
  if (n == 0) throw InvalidArgument("sparse matrix must have n >= 1");
  const auto ni = static_cast<long long>(n);
  std::vector<std::size_t> count(n + 1, 0);
  for (const auto& t : entries) {
    if (t.row < 0 || t.col < 0 || t.row >= ni || t.col >= ni) {
      throw InvalidArgument("triplet (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                            ") out of range for n=" + std::to_string(n));
    }
    ++count[t.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<int> cols(entries.size());
  std::vector<double> vals(entries.size());
  std::vector<std::size_t> pos(count.begin(), count.end() - 1);
  for (const auto& t : entries) {
    const std::size_t p = pos[t.row]++;
    cols[p] = t.col;
    vals[p] = t.value;
  }

  SparseMatrix m;
  m.n_ = n;
  m.offsets_.assign(n + 1, 0);
  m.cols_.reserve(entries.size());
  m.values_.reserve(entries.size());
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    order.resize(count[i + 1] - count[i]);
    std::iota(order.begin(), order.end(), count[i]);
    // Stable sort keeps the summation order of duplicates deterministic.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cols[a] < cols[b]; });
    for (std::size_t k = 0; k < order.size(); ++k) {
      const std::size_t p = order[k];
      if (k > 0 && cols[p] == m.cols_.back()) {
        m.values_.back() += vals[p];
      } else {
        m.cols_.push_back(cols[p]);
        m.values_.push_back(vals[p]);
      }
    }
    m.offsets_[i + 1] = m.cols_.size();
  }
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Triplet> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = {static_cast<int>(i), static_cast<int>(i), 1.0};
  return from_triplets(n, t);
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto b = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
  const auto e = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
  auto it = std::lower_bound(b, e, static_cast<int>(j));
  if (it == e || *it != static_cast<int>(j)) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) d[i] = at(i, i);
  return d;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) s += values_[p] * x[cols_[p]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) t.push_back({cols_[p], static_cast<int>(i), values_[p]});
  return from_triplets(n_, t);
}

double SparseMatrix::asymmetry() const {
  double amax = 0.0, dmax = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
      amax = std::max(amax, std::abs(values_[p]));
      dmax = std::max(dmax, std::abs(values_[p] - at(cols_[p], i)));
    }
  }
  return amax > 0.0 ? dmax / amax : 0.0;
}

void SparseMatrix::set_identity_rows(std::span<const int> indices) {
  std::vector<char> mark(n_, 0);
  for (int i : indices) mark[i] = 1;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
      const auto j = static_cast<std::size_t>(cols_[p]);
      if (mark[i] || mark[j]) values_[p] = (i == j) ? 1.0 : 0.0;
    }
  }
}

namespace {

std::vector<double> inverse_diagonal(const SparseMatrix& A) {
  auto d = A.diagonal();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] == 0.0) throw SolverError("zero diagonal entry in row " + std::to_string(i) + "; Jacobi preconditioner undefined");
    d[i] = 1.0 / d[i];
  }
  return d;
}

void check_sizes(const SparseMatrix& A, std::span<const double> b, std::span<const double> x0) {
  if (b.size() != A.rows()) throw InvalidArgument("right-hand side size does not match matrix");
  if (!x0.empty() && x0.size() != A.rows()) throw InvalidArgument("initial iterate size does not match matrix");
}

int max_iterations(const SparseMatrix& A, const SolverOptions& o) {
  return o.max_iterations > 0 ? o.max_iterations : static_cast<int>(10 * A.rows());
}

}  // namespace

SolveResult cg_solve(const SparseMatrix& A, std::span<const double> b, const SolverOptions& options,
                     std::span<const double> x0) {
  if (!(options.tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  check_sizes(A, b, x0);
  const std::size_t n = A.rows();
  const auto dinv = inverse_diagonal(A);
  SolveResult out;
  out.x.assign(n, 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), out.x.begin());

  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(out.x.begin(), out.x.end(), 0.0);
    out.report = {0, 0.0, true};
    return out;
  }
  std::vector<double> r(n), z(n), p(n), q(n);
  A.multiply(out.x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  double res = norm2(r) / bnorm;
  if (res <= options.tol) {
    out.report = {0, res, true};
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
  p = z;
  double rz = dot(r, z);
  const int maxit = max_iterations(A, options);
  int it = 0;
  while (it < maxit) {
    ++it;
    A.multiply(p, q);
    const double pq = dot(p, q);
    if (pq <= 0.0) throw SolverError("conjugate gradients: matrix is not positive definite");
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      out.x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    res = norm2(r) / bnorm;
    if (res <= options.tol) break;
    for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  out.report = {it, res, res <= options.tol};
  return out;
}

SolveResult bicgstab_solve(const SparseMatrix& A, std::span<const double> b, const SolverOptions& options,
                           std::span<const double> x0) {
  if (!(options.tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  check_sizes(A, b, x0);
  const std::size_t n = A.rows();
  const auto dinv = inverse_diagonal(A);
  SolveResult out;
  out.x.assign(n, 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), out.x.begin());

  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(out.x.begin(), out.x.end(), 0.0);
    out.report = {0, 0.0, true};
    return out;
  }
  std::vector<double> r(n), rhat(n), p(n, 0.0), v(n, 0.0), s(n), t(n), y(n), zz(n);
  A.multiply(out.x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  double res = norm2(r) / bnorm;
  if (res <= options.tol) {
    out.report = {0, res, true};
    return out;
  }
  rhat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  const int maxit = max_iterations(A, options);
  int it = 0;
  while (it < maxit) {
    ++it;
    const double rho_new = dot(rhat, r);
    if (rho_new == 0.0) throw SolverError("BiCGStab breakdown: rho = 0");
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    for (std::size_t i = 0; i < n; ++i) y[i] = dinv[i] * p[i];
    A.multiply(y, v);
    const double rv = dot(rhat, v);
    if (rv == 0.0) throw SolverError("BiCGStab breakdown: (rhat, v) = 0");
    alpha = rho / rv;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    const double snorm = norm2(s) / bnorm;
    if (snorm <= options.tol) {
      for (std::size_t i = 0; i < n; ++i) out.x[i] += alpha * y[i];
      res = snorm;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) zz[i] = dinv[i] * s[i];
    A.multiply(zz, t);
    const double tt = dot(t, t);
    if (tt == 0.0) throw SolverError("BiCGStab breakdown: (t, t) = 0");
    omega = dot(t, s) / tt;
    for (std::size_t i = 0; i < n; ++i) {
      out.x[i] += alpha * y[i] + omega * zz[i];
      r[i] = s[i] - omega * t[i];
    }
    res = norm2(r) / bnorm;
    if (res <= options.tol) break;
    if (omega == 0.0) throw SolverError("BiCGStab breakdown: omega = 0");
  }
  out.report = {it, res, res <= options.tol};
  return out;
}

struct DirectSolver::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  std::size_t n = 0;
};

DirectSolver::DirectSolver(const SparseMatrix& A) : impl_(std::make_unique<Impl>()) {
  const std::size_t n = A.rows();
  impl_->n = n;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(A.nonzeros());
  const auto& off = A.row_offsets();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = off[i]; p < off[i + 1]; ++p)
      t.emplace_back(static_cast<int>(i), A.column_indices()[p], A.values()[p]);
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  impl_->lu.compute(m);
  if (impl_->lu.info() != Eigen::Success) throw SolverError("sparse LU factorization failed: " + impl_->lu.lastErrorMessage());
}

DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

std::size_t DirectSolver::size() const { return impl_->n; }

std::vector<double> DirectSolver::solve(std::span<const double> b) const {
  if (b.size() != impl_->n) throw InvalidArgument("right-hand side size does not match factorization");
  Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd x = impl_->lu.solve(bv);
  if (impl_->lu.info() != Eigen::Success) throw SolverError("sparse LU solve failed");
  return std::vector<double>(x.data(), x.data() + x.size());
}

}  // namespace bouss
