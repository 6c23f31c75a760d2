// Copyright 2026 The Knotosc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace knotosc {

using cplx = std::complex<double>;

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm2() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }
  Vec3 normalized() const {
    double n = norm();
    return n > 0 ? Vec3{x / n, y / n, z / n} : Vec3{0, 0, 0};
  }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Complex 3-vector, e.g. the gradient of a complex scalar field.
struct CVec3 {
  cplx x{0, 0}, y{0, 0}, z{0, 0};

  CVec3() = default;
  CVec3(cplx x_, cplx y_, cplx z_) : x(x_), y(y_), z(z_) {}
  explicit CVec3(const Vec3& v) : x(v.x), y(v.y), z(v.z) {}

  CVec3 operator+(const CVec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  CVec3 operator-(const CVec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  CVec3 operator-() const { return {-x, -y, -z}; }
  CVec3 operator*(cplx s) const { return {x * s, y * s, z * s}; }
  CVec3& operator+=(const CVec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

  Vec3 real() const { return {x.real(), y.real(), z.real()}; }
  Vec3 imag() const { return {x.imag(), y.imag(), z.imag()}; }
  double norm() const {
    return std::sqrt(std::norm(x) + std::norm(y) + std::norm(z));
  }
};

inline CVec3 operator*(cplx s, const CVec3& v) { return v * s; }

// Value and gradient of a complex scalar field at a point.
struct FieldValue {
  cplx value{0, 0};
  CVec3 gradient;
};

struct SphericalCoords {
  double r, theta, phi;
};

inline SphericalCoords to_spherical(const Vec3& p) {
  double r = p.norm();
  double theta = r > 0 ? std::atan2(std::hypot(p.x, p.y), p.z) : 0.0;
  double phi = std::atan2(p.y, p.x);
  return {r, theta, phi};
}

// Orthonormal spherical frame at direction (theta, phi).
struct SphericalFrame {
  Vec3 er, etheta, ephi;
};

inline SphericalFrame spherical_frame(double theta, double phi) {
  double ct = std::cos(theta), st = std::sin(theta);
  double cp = std::cos(phi), sp = std::sin(phi);
  return {{st * cp, st * sp, ct}, {ct * cp, ct * sp, -st}, {-sp, cp, 0}};
}

}  // namespace knotosc
