#include "bouss/lagrange.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "bouss/error.hpp"

namespace bouss {

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace

LagrangeBasis::LagrangeBasis(int degree) : degree_(degree) {
  if (degree < 1 || degree > 3) throw InvalidArgument("Lagrange degree must be 1, 2 or 3");
  const std::array<std::array<double, 2>, 3> verts{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
  for (const auto& v : verts) nodes_.push_back(v);
  for (int k = 0; k < 3; ++k) {
    const auto& a = verts[k];
    const auto& b = verts[(k + 1) % 3];
    for (int j = 1; j < degree; ++j) {
      const double s = static_cast<double>(j) / degree;
      nodes_.push_back({a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])});
    }
  }
  if (degree == 3) nodes_.push_back({1.0 / 3.0, 1.0 / 3.0});

  for (int total = 0; total <= degree; ++total)
    for (int j = 0; j <= total; ++j) exponents_.push_back({total - j, j});

  const int n = size();
  Eigen::MatrixXd V(n, n);
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < n; ++m) V(i, m) = ipow(nodes_[i][0], exponents_[m][0]) * ipow(nodes_[i][1], exponents_[m][1]);
  // Basis function i has coefficients in column i of V^{-1}.
  const Eigen::MatrixXd C = V.inverse();
  coeffs_.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < n; ++m) coeffs_[static_cast<std::size_t>(i) * n + m] = C(m, i);
}

void LagrangeBasis::values(double xi, double eta, std::span<double> out) const {
  const int n = size();
  std::array<double, 10> mono{};
  for (int m = 0; m < n; ++m) mono[m] = ipow(xi, exponents_[m][0]) * ipow(eta, exponents_[m][1]);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int m = 0; m < n; ++m) s += coeffs_[static_cast<std::size_t>(i) * n + m] * mono[m];
    out[i] = s;
  }
}

void LagrangeBasis::gradients(double xi, double eta, std::span<double> out_xi, std::span<double> out_eta) const {
  const int n = size();
  std::array<double, 10> dx{}, dy{};
  for (int m = 0; m < n; ++m) {
    const int a = exponents_[m][0];
    const int b = exponents_[m][1];
    dx[m] = a > 0 ? a * ipow(xi, a - 1) * ipow(eta, b) : 0.0;
    dy[m] = b > 0 ? b * ipow(xi, a) * ipow(eta, b - 1) : 0.0;
  }
  for (int i = 0; i < n; ++i) {
    double sx = 0.0, sy = 0.0;
    for (int m = 0; m < n; ++m) {
      const double c = coeffs_[static_cast<std::size_t>(i) * n + m];
      sx += c * dx[m];
      sy += c * dy[m];
    }
    out_xi[i] = sx;
    out_eta[i] = sy;
  }
}

const LagrangeBasis& lagrange_basis(int degree) {
  static const LagrangeBasis p1(1), p2(2), p3(3);
  switch (degree) {
    case 1:
      return p1;
    case 2:
      return p2;
    case 3:
      return p3;
    default:
      throw InvalidArgument("Lagrange degree must be 1, 2 or 3");
  }
}

}  // namespace bouss
