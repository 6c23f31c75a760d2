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

#include "knotosc/field.hpp"
#include "knotosc/helmholtz.hpp"
#include "knotosc/specfun.hpp"
#include "knotosc/types.hpp"

namespace knotosc::oscillator {

struct WeightedMode {
  specfun::ModeIndex index;
  cplx weight;  // c_lm / A_{kl}
};

// Finite combination of oscillator eigenmodes sharing one eigenvalue
// lambda = 4 khat + 3: psi = sum weight_lm psi_{k_l, l, m} with
// k_l = khat - l/2. Only even l can occur for fields lifted from an even
// Helmholtz expansion; generic same-eigenvalue combinations (used for
// stability perturbations) are supported as long as all modes agree on
// lambda.
class OscillatorEigenfunction final : public ComplexField {
 public:
  OscillatorEigenfunction(int khat, std::vector<WeightedMode> modes);

  int khat() const { return khat_; }
  int lambda() const { return 4 * khat_ + 3; }
  const std::vector<WeightedMode>& modes() const { return modes_; }

  FieldValue eval(const Vec3& x) const override;

 private:
  struct Group {
    int k, l;
    std::vector<std::pair<int, cplx>> terms;  // (m, weight)
  };
  int khat_;
  int maxL_ = 0;
  std::vector<WeightedMode> modes_;
  std::vector<Group> groups_;
};

// Lifts an even Fourier-Bessel field to the eigenfunction at
// lambda = 4 khat + 3 with weights c_lm / A_{k_l l}.
OscillatorEigenfunction lift(const helmholtz::FourierBesselField& field, int khat);

// All (k, l, m) with 4k + 2l + 3 = lambda; lambda must be odd and >= 3.
std::vector<specfun::ModeIndex> enumerate_eigenspace(int lambda);

// Closed-form eigenspace dimension (N+1)(N+2)/2 at lambda = 2N + 3.
long long eigenspace_dimension(int lambda);

// Max over the points of |-Lap psi + |x|^2 psi - lambda psi| relative to
// |lambda psi| + eps, with a fourth-order finite-difference Laplacian. The
// field overload serves as the detector for fields that are not lambda
// eigenfunctions (e.g. mixtures across eigenvalues).
double eigen_residual(const ComplexField& field, double lambda,
                      const std::vector<Vec3>& points);
double eigen_residual(const OscillatorEigenfunction& psi,
                      const std::vector<Vec3>& points);

struct LiftReport {
  double c1Error = 0;
  double valueError = 0;
  double gradError = 0;
  int gridRes = 0;
  double ballRadius = 0;
  double marginRatio = -1;  // filled by the pipeline against the seed margin
};

// Sup mismatch over a gridRes^3 lattice in the ball between the rescaled
// eigenfunction psi(x / sqrt(lambda)) (gradient carrying the 1/sqrt(lambda)
// chain factor) and the Helmholtz field phi(x).
LiftReport rescaled_compare(const OscillatorEigenfunction& psi,
                            const ComplexField& field, double ballRadius,
                            int gridRes, int threads = 0);

}  // namespace knotosc::oscillator
