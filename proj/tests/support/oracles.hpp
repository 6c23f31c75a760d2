// Test-only oracles, independent of the library evaluation paths.
#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "knotosc/field.hpp"
#include "knotosc/nodal.hpp"
#include "knotosc/types.hpp"

namespace knotosc::testing {

// Fourth-order finite-difference Laplacian of a complex field.
inline cplx fd_laplacian(const ComplexField& field, const Vec3& x, double h) {
  cplx lap{0, 0};
  cplx center = field.eval(x).value;
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 e{axis == 0 ? 1.0 : 0.0, axis == 1 ? 1.0 : 0.0, axis == 2 ? 1.0 : 0.0};
    cplx f1 = field.eval(x + e * h).value;
    cplx f2 = field.eval(x + e * (2 * h)).value;
    cplx fm1 = field.eval(x - e * h).value;
    cplx fm2 = field.eval(x - e * (2 * h)).value;
    lap += (-f2 + 16.0 * f1 - 30.0 * center + 16.0 * fm1 - fm2) / (12.0 * h * h);
  }
  return lap;
}

// Central-difference gradient of a complex field (values only).
inline CVec3 fd_gradient(const ComplexField& field, const Vec3& x, double h) {
  auto d = [&](const Vec3& e) {
    return (field.eval(x + e * h).value - field.eval(x - e * h).value) / (2.0 * h);
  };
  return {d({1, 0, 0}), d({0, 1, 0}), d({0, 0, 1})};
}

// Long-double upward Laguerre recurrence; reference for the double path.
inline long double laguerre_ref(int k, long double alpha, long double x) {
  if (k == 0) return 1.0L;
  long double prev = 1.0L;
  long double cur = 1.0L + alpha - x;
  for (int n = 1; n < k; ++n) {
    long double next =
        ((2.0L * n + 1.0L + alpha - x) * cur - (n + alpha) * prev) / (n + 1.0L);
    prev = cur;
    cur = next;
  }
  return cur;
}

// Long-double radial factor exp(-r^2/2) r^l L_k^{l+1/2}(r^2); usable for
// k <= a few hundred where no rescaling is needed.
inline long double radial_ref(int k, int l, long double r) {
  long double x = r * r;
  long double lag = laguerre_ref(k, l + 0.5L, x);
  return std::exp(-x / 2.0L) * std::pow(r, (long double)l) * lag;
}

// Uniform random point in a ball.
inline Vec3 random_in_ball(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    Vec3 p{u(rng), u(rng), u(rng)};
    if (p.norm2() <= 1.0) return p * radius;
  }
}

// Closed parametric polyline.
template <typename Fn>
nodal::NodalCurve parametric_curve(Fn&& fn, int samples) {
  nodal::NodalCurve c;
  c.closed = true;
  c.minMargin = 1.0;
  for (int i = 0; i < samples; ++i) {
    double t = 2.0 * 3.14159265358979323846 * i / samples;
    c.vertices.push_back(fn(t));
    c.margins.push_back(1.0);
  }
  for (int i = 0; i + 1 < samples; ++i)
    c.arcLength += (c.vertices[i + 1] - c.vertices[i]).norm();
  c.arcLength += (c.vertices.front() - c.vertices.back()).norm();
  return c;
}

inline nodal::NodalCurve circle_xy(double radius, Vec3 center, int samples = 200) {
  return parametric_curve(
      [&](double t) {
        return center + Vec3{radius * std::cos(t), radius * std::sin(t), 0.0};
      },
      samples);
}

// Standard trefoil embedding.
inline nodal::NodalCurve trefoil_curve(int samples = 400) {
  return parametric_curve(
      [](double t) {
        return Vec3{std::sin(t) + 2 * std::sin(2 * t),
                    std::cos(t) - 2 * std::cos(2 * t), -std::sin(3 * t)};
      },
      samples);
}

// Figure-eight knot embedding.
inline nodal::NodalCurve figure_eight_curve(int samples = 500) {
  return parametric_curve(
      [](double t) {
        return Vec3{(2 + std::cos(2 * t)) * std::cos(3 * t),
                    (2 + std::cos(2 * t)) * std::sin(3 * t), std::sin(4 * t)};
      },
      samples);
}

// (p, q) torus knot/link component on the standard torus.
inline nodal::NodalCurve torus_curve(int p, int q, double phase = 0.0,
                                     int samples = 600) {
  return parametric_curve(
      [&](double t) {
        double pt = p * t, qt = q * t + phase;
        return Vec3{(2 + std::cos(qt)) * std::cos(pt),
                    (2 + std::cos(qt)) * std::sin(pt), std::sin(qt)};
      },
      samples);
}

}  // namespace knotosc::testing
