#pragma once

#include <vector>

namespace bouss {

// Point on the reference triangle {(xi, eta): xi, eta >= 0, xi + eta <= 1}.
// Weights sum to the reference area 1/2.
struct QuadPoint {
  double xi = 0.0;
  double eta = 0.0;
  double weight = 0.0;
};

// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule1D gauss_legendre(int n);

// Collapsed tensor Gauss rule exact for polynomials of total degree <= degree.
const std::vector<QuadPoint>& triangle_rule(int degree);

// Gauss rule on [0, 1] exact for polynomials of degree <= degree.
const GaussRule1D& segment_rule(int degree);

}  // namespace bouss
