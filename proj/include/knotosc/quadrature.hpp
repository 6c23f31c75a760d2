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

#include <vector>

#include "knotosc/types.hpp"

namespace knotosc::quadrature {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 2n-1.
Rule1D gauss_legendre(int n);

// The same rule mapped to [a, b].
Rule1D gauss_legendre(int n, double a, double b);

// Quadrature nodes on the unit sphere that integrate spherical polynomials
// (hence products Y_lm conj(Y_l'm')) exactly up to the given total degree:
// Gauss-Legendre in cos(theta) crossed with a uniform azimuthal grid.
struct SphereRule {
  struct Node {
    double theta, phi, weight;
  };
  std::vector<Node> nodes;

  explicit SphereRule(int degree);
};

}  // namespace knotosc::quadrature
