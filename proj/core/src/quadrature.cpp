#include "bouss/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "bouss/error.hpp"

namespace bouss {

GaussRule1D gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("Gauss-Legendre rule needs n >= 1");
  GaussRule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

namespace {
std::mutex cache_mutex;
}

const std::vector<QuadPoint>& triangle_rule(int degree) {
  if (degree < 0) throw InvalidArgument("quadrature degree must be >= 0");
  static std::map<int, std::vector<QuadPoint>> cache;
  std::lock_guard lock(cache_mutex);
  auto it = cache.find(degree);
  if (it != cache.end()) return it->second;
  // The collapse Jacobian (1 - t) adds one degree in t.
  const int n = (degree + 3) / 2;
  const auto g = gauss_legendre(n);
  std::vector<QuadPoint> pts;
  pts.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double s = g.nodes[i];
      const double t = g.nodes[j];
      pts.push_back({s * (1.0 - t), t, g.weights[i] * g.weights[j] * (1.0 - t)});
    }
  }
  return cache.emplace(degree, std::move(pts)).first->second;
}

const GaussRule1D& segment_rule(int degree) {
  if (degree < 0) throw InvalidArgument("quadrature degree must be >= 0");
  static std::map<int, GaussRule1D> cache;
  std::lock_guard lock(cache_mutex);
  auto it = cache.find(degree);
  if (it != cache.end()) return it->second;
  return cache.emplace(degree, gauss_legendre(degree / 2 + 1)).first->second;
}

}  // namespace bouss
