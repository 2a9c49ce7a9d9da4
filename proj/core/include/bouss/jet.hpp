#pragma once

#include <cmath>

namespace bouss {

// Value with first and second partial derivatives in (x, y). Used to write
// closed-form fields once and get gradients and Hessians by the chain rule.
struct Jet {
  double v = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  double dxx = 0.0;
  double dxy = 0.0;
  double dyy = 0.0;

  constexpr Jet() = default;
  constexpr Jet(double value) : v(value) {}  // NOLINT: constants promote implicitly
  constexpr Jet(double v_, double dx_, double dy_, double dxx_, double dxy_, double dyy_)
      : v(v_), dx(dx_), dy(dy_), dxx(dxx_), dxy(dxy_), dyy(dyy_) {}

  static constexpr Jet x(double value) { return {value, 1.0, 0.0, 0.0, 0.0, 0.0}; }
  static constexpr Jet y(double value) { return {value, 0.0, 1.0, 0.0, 0.0, 0.0}; }

  constexpr double laplacian() const { return dxx + dyy; }
};

constexpr Jet operator+(const Jet& a, const Jet& b) {
  return {a.v + b.v, a.dx + b.dx, a.dy + b.dy, a.dxx + b.dxx, a.dxy + b.dxy, a.dyy + b.dyy};
}
constexpr Jet operator-(const Jet& a, const Jet& b) {
  return {a.v - b.v, a.dx - b.dx, a.dy - b.dy, a.dxx - b.dxx, a.dxy - b.dxy, a.dyy - b.dyy};
}
constexpr Jet operator-(const Jet& a) { return {-a.v, -a.dx, -a.dy, -a.dxx, -a.dxy, -a.dyy}; }
constexpr Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v,
          a.dx * b.v + a.v * b.dx,
          a.dy * b.v + a.v * b.dy,
          a.dxx * b.v + 2.0 * a.dx * b.dx + a.v * b.dxx,
          a.dxy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.dxy,
          a.dyy * b.v + 2.0 * a.dy * b.dy + a.v * b.dyy};
}

// f(a) given f, f', f'' at a.v.
constexpr Jet chain(const Jet& a, double f0, double f1, double f2) {
  return {f0,
          f1 * a.dx,
          f1 * a.dy,
          f2 * a.dx * a.dx + f1 * a.dxx,
          f2 * a.dx * a.dy + f1 * a.dxy,
          f2 * a.dy * a.dy + f1 * a.dyy};
}

constexpr Jet operator/(const Jet& a, const Jet& b) {
  const double inv = 1.0 / b.v;
  return a * chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet sin(const Jet& a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet cos(const Jet& a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}
inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet log(const Jet& a) { return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }

}  // namespace bouss
