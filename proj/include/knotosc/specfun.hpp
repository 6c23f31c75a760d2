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

namespace knotosc::specfun {

// Quantum numbers of one oscillator eigenmode. In d dimensions the eigenvalue
// is 4k + 2l + d, independent of the order m.
struct ModeIndex {
  int k = 0;
  int l = 0;
  int m = 0;
  int d = 3;

  int eigenvalue() const { return 4 * k + 2 * l + d; }
  void validate() const;
};

// Generalized Laguerre polynomial L_k^alpha(x) by the upward three-term
// recurrence in k. Plain double arithmetic; see radial_factor for the
// overflow-safe scaled form of the full radial eigenfunction factor.
double laguerre(int k, double alpha, double x);

// L_k^alpha(0) = Gamma(k+alpha+1) / (k! Gamma(alpha+1)), via log-gamma.
double laguerre_at_zero(int k, double alpha);

// A number v = signedMantissa * exp(logAmplitude), kept split so that radial
// factors stay representable for k up to 1e6.
struct RadialProfile {
  double logAmplitude = 0;
  double signedMantissa = 0;

  double reconstruct() const;
  static RadialProfile from(double mantissa, double logScale);
};

// Radial factor of the oscillator eigenfunction and its r-derivative:
//   f(r) = exp(-r^2/2) r^l L_k^{l+1/2}(r^2).
struct RadialEval {
  RadialProfile value;
  RadialProfile derivative;
};

RadialEval radial_factor(int k, int l, double r);

// Hyperspherical Bessel function j_l^d and derivative; the regular radial
// Helmholtz solution in R^d normalized so j_0^d(0) = 1. d = 3 is the
// classical spherical Bessel function.
struct BesselEval {
  double value = 0;
  double derivative = 0;
};

BesselEval sph_bessel(int l, double r, int d = 3);

// All of j_0..j_lmax (with derivatives) at once, via a single downward pass.
std::vector<BesselEval> sph_bessel_array(int lmax, double r);

// Complex spherical harmonic (orthonormal, Condon-Shortley phase) with its
// surface gradient in the orthonormal (theta, phi) frame:
//   grad_S2 Y = dTheta * e_theta + dPhiOverSin * e_phi.
struct AngularValue {
  cplx value{0, 0};
  cplx dTheta{0, 0};
  cplx dPhiOverSin{0, 0};
};

AngularValue sph_harmonic(int l, int m, double theta, double phi);

// Normalized associated Legendre values and theta-derivatives for all
// 0 <= m <= l <= lmax at a fixed angle; backs sph_harmonic and the batched
// eigenfunction evaluators. Entry (l, m) lives at index l*(l+1)/2 + m.
struct LegendreTable {
  int lmax = -1;
  double sinSafe = 1.0;      // |sin theta| clamped away from the poles
  std::vector<double> plm;
  std::vector<double> dplm;  // d/dtheta

  void compute(int lmax, double theta);
  int index(int l, int m) const { return l * (l + 1) / 2 + m; }
};

// Assembles Y_lm (any sign of m) from a LegendreTable at the same theta.
AngularValue ylm_from_table(const LegendreTable& table, int l, int m, double phi);

enum class AmplitudeMode { Exact, Asymptotic };

// Hilb amplitude A^d_kl. Exact mode evaluates
//   A^d_kl = (1/Gamma(d/2)) (sqrt(lambda)/2)^{-l} Gamma(k+l+d/2) / k!
// in the log domain; asymptotic mode is the leading Stirling term
// k^{l/2 + d/2 - 1} / Gamma(d/2), which for d = 3 is (2/sqrt(pi)) k^{(l+1)/2}.
double amplitude(int k, int l, int d, AmplitudeMode mode);
double log_amplitude(int k, int l, int d = 3);

// Full eigenmode psi_klm = radial(r) * Y_lm(theta, phi) with gradient
//   radial'(r) Y e_r + radial(r) grad_S2 Y / r.
// logWeightOffset is subtracted from the radial log amplitude before
// exponentiating, so weighted sums with 1/A_kl stay finite at large k.
FieldValue eval_psi_klm(const ModeIndex& idx, const Vec3& x,
                        double logWeightOffset = 0.0);

// Relative sup-norm Hilb remainder over a uniform radial grid:
//   sup_{0 < r <= R} |radial(k,l,r) - A_kl j_l(sqrt(lambda) r)| / A_kl.
double hilb_residual(int k, int l, double R, int samples);

}  // namespace knotosc::specfun
