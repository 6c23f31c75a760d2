#include <doctest.h>

#include <cmath>

#include "knotosc/quadrature.hpp"
#include "knotosc/specfun.hpp"

using namespace knotosc;
using namespace knotosc::quadrature;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("gauss legendre integrates polynomials exactly") {
  for (int n : {1, 2, 5, 12, 32}) {
    Rule1D rule = gauss_legendre(n);
    // x^p for p up to 2n-1; odd powers vanish, even have 2/(p+1).
    for (int p = 0; p < 2 * n; ++p) {
      double sum = 0;
      for (int i = 0; i < n; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], p);
      double expected = (p % 2 == 1) ? 0.0 : 2.0 / (p + 1);
      CHECK(sum == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("gauss legendre on mapped interval") {
  Rule1D rule = gauss_legendre(24, 0.0, 2.0);
  double sum = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * std::sin(rule.nodes[i]);
  CHECK(sum == doctest::Approx(1.0 - std::cos(2.0)).epsilon(1e-13));
}

TEST_CASE("sphere rule integrates spherical harmonics exactly") {
  SphereRule rule(10);
  // Surface area.
  double area = 0;
  for (const auto& n : rule.nodes) area += n.weight;
  CHECK(area == doctest::Approx(4.0 * kPi).epsilon(1e-13));

  // Orthonormality of a few pairs up to degree 5.
  auto inner = [&](int l1, int m1, int l2, int m2) {
    cplx sum{0, 0};
    for (const auto& n : rule.nodes) {
      auto a = specfun::sph_harmonic(l1, m1, n.theta, n.phi);
      auto b = specfun::sph_harmonic(l2, m2, n.theta, n.phi);
      sum += n.weight * a.value * std::conj(b.value);
    }
    return sum;
  };
  CHECK(std::abs(inner(3, 2, 3, 2) - cplx{1, 0}) < 1e-12);
  CHECK(std::abs(inner(5, -4, 5, -4) - cplx{1, 0}) < 1e-12);
  CHECK(std::abs(inner(3, 2, 5, 2)) < 1e-12);
  CHECK(std::abs(inner(4, 1, 4, -1)) < 1e-12);
  CHECK(std::abs(inner(2, 0, 0, 0)) < 1e-12);
}
