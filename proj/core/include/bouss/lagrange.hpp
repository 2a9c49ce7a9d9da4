#pragma once

#include <array>
#include <span>
#include <vector>

namespace bouss {

// Nodal Lagrange basis of degree r on the reference triangle.
// Node order: vertices (0,0), (1,0), (0,1); then r-1 nodes on each edge
// (edge k runs from vertex k to vertex (k+1)%3); then interior nodes.
class LagrangeBasis {
 public:
  explicit LagrangeBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<std::array<double, 2>>& nodes() const { return nodes_; }

  void values(double xi, double eta, std::span<double> out) const;
  // Reference gradients: out_xi[i] = d phi_i / d xi, out_eta[i] = d phi_i / d eta.
  void gradients(double xi, double eta, std::span<double> out_xi, std::span<double> out_eta) const;

 private:
  int degree_;
  std::vector<std::array<double, 2>> nodes_;
  std::vector<std::array<int, 2>> exponents_;
  // coeffs_[i * n + m]: coefficient of monomial m in basis function i.
  std::vector<double> coeffs_;
};

const LagrangeBasis& lagrange_basis(int degree);

}  // namespace bouss
