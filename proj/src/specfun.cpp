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

#include "knotosc/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace knotosc::specfun {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kRescaleLimit = 1e250;
constexpr double kLogRescale = 575.6462732485114;  // log(1e250)
}  // namespace

void ModeIndex::validate() const {
  if (k < 0 || l < 0) throw std::domain_error("ModeIndex: k and l must be nonnegative");
  if (d < 3) throw std::domain_error("ModeIndex: dimension must be >= 3");
  if (d == 3 && (m < -l || m > l)) throw std::domain_error("ModeIndex: |m| must not exceed l");
}

double laguerre(int k, double alpha, double x) {
  if (k < 0) throw std::domain_error("laguerre: negative degree");
  if (alpha <= -1.0) throw std::domain_error("laguerre: alpha must exceed -1");
  if (x < 0) throw std::domain_error("laguerre: negative argument");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + alpha - x;
  for (int n = 1; n < k; ++n) {
    double next = ((2.0 * n + 1.0 + alpha - x) * cur - (n + alpha) * prev) / (n + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double laguerre_at_zero(int k, double alpha) {
  if (k < 0) throw std::domain_error("laguerre_at_zero: negative degree");
  if (alpha <= -1.0) throw std::domain_error("laguerre_at_zero: alpha must exceed -1");
  return std::exp(std::lgamma(k + alpha + 1.0) - std::lgamma(k + 1.0) -
                  std::lgamma(alpha + 1.0));
}

double RadialProfile::reconstruct() const {
  return signedMantissa == 0.0 ? 0.0 : signedMantissa * std::exp(logAmplitude);
}

RadialProfile RadialProfile::from(double mantissa, double logScale) {
  if (mantissa == 0.0 || !std::isfinite(mantissa)) return {0.0, 0.0};
  double a = std::abs(mantissa);
  return {logScale + std::log(a), mantissa > 0 ? 1.0 : -1.0};
}

RadialEval radial_factor(int k, int l, double r) {
  if (k < 0 || l < 0) throw std::domain_error("radial_factor: negative index");
  if (r < 0) throw std::domain_error("radial_factor: negative radius");
  const double alpha = l + 0.5;

  if (r == 0.0) {
    RadialEval out;
    if (l == 0) out.value = RadialProfile::from(laguerre_at_zero(k, 0.5), 0.0);
    if (l == 1) out.derivative = RadialProfile::from(laguerre_at_zero(k, 1.5), 0.0);
    return out;
  }

  const double x = r * r;
  // Upward recurrence for L_n^alpha(x); oscillatory in n for x < 4n, so the
  // direction is numerically benign. Joint rescaling keeps the pair
  // representable out to k ~ 1e6 and large l.
  double logScale = 0.0;
  double prev = 1.0;                  // L_{k-1}
  double cur = 1.0 + alpha - x;       // L_k after the loop
  if (k == 0) {
    cur = 1.0;
    prev = 0.0;
  }
  for (int n = 1; n < k; ++n) {
    double next = ((2.0 * n + 1.0 + alpha - x) * cur - (n + alpha) * prev) / (n + 1.0);
    prev = cur;
    cur = next;
    double mag = std::max(std::abs(prev), std::abs(cur));
    if (mag > kRescaleLimit) {
      prev /= kRescaleLimit;
      cur /= kRescaleLimit;
      logScale += kLogRescale;
    }
  }

  // dL/dx via the same-alpha contiguous relation; exact for k = 0.
  double lagDeriv = (k == 0) ? 0.0 : (k * cur - (k + alpha) * prev) / x;

  const double logCommon = logScale - 0.5 * x + l * std::log(r);
  RadialEval out;
  out.value = RadialProfile::from(cur, logCommon);
  double derivMantissa = (l / r - r) * cur + 2.0 * r * lagDeriv;
  out.derivative = RadialProfile::from(derivMantissa, logCommon);
  return out;
}

namespace {

// Classical spherical Bessel pair by series, for small arguments.
BesselEval sph_bessel3_series(int l, double r) {
  // j_l(r) = r^l / (2l+1)!! * sum_s (-r^2/2)^s / (s! (2l+3)(2l+5)...(2l+2s+1))
  double dfact = 1.0;
  for (int i = 3; i <= 2 * l + 1; i += 2) dfact *= i;
  double lead = std::pow(r, l) / dfact;
  double sum = 1.0, dsum = 0.0;  // sum and d(sum)/dr
  double term = 1.0;
  double x2 = r * r;
  for (int s = 1; s <= 6; ++s) {
    term *= -x2 / (2.0 * s * (2.0 * l + 2.0 * s + 1.0));
    sum += term;
    dsum += term * (2.0 * s / r);
  }
  double value = lead * sum;
  double deriv = (l == 0 ? 0.0 : l * std::pow(r, l - 1) / dfact * sum) + lead * dsum;
  return {value, deriv};
}

BesselEval sph_bessel3(int l, double r) {
  if (r == 0.0) return {l == 0 ? 1.0 : 0.0, l == 1 ? 1.0 / 3.0 : 0.0};
  if (l == 0) {
    double j0 = std::sin(r) / r;
    double j1 = std::sin(r) / (r * r) - std::cos(r) / r;
    return {j0, -j1};
  }
  if (r < 0.5 && l >= 1) return sph_bessel3_series(l, r);

  double jlm1, jl;
  if (r > l + 1.0) {
    // Upward recurrence, stable above the turning point.
    double jm = std::sin(r) / r;
    double jc = std::sin(r) / (r * r) - std::cos(r) / r;
    for (int n = 1; n < l; ++n) {
      double jn = (2.0 * n + 1.0) / r * jc - jm;
      jm = jc;
      jc = jn;
    }
    jlm1 = jm;
    jl = jc;
  } else {
    // Miller's downward recurrence with normalization against j_0 or j_1.
    int start = l + 28 + static_cast<int>(0.5 * std::sqrt(static_cast<double>(l)));
    double fp = 0.0;          // f_{n+1}
    double fc = 1e-280;       // f_n
    double fl = 0.0, flm1 = 0.0;
    for (int n = start; n >= 0; --n) {
      double fm = (2.0 * n + 3.0) / r * fc - fp;
      fp = fc;
      fc = fm;
      if (n == l) fl = fc;
      if (n == l - 1) flm1 = fc;
      if (std::abs(fc) > kRescaleLimit) {
        fc /= kRescaleLimit;
        fp /= kRescaleLimit;
        fl /= kRescaleLimit;
        flm1 /= kRescaleLimit;
      }
    }
    double j0 = std::sin(r) / r;
    double j1 = std::sin(r) / (r * r) - std::cos(r) / r;
    // fc == f_0 and fp == f_1 after the loop.
    double scale = std::abs(j0) >= std::abs(j1) ? j0 / fc : j1 / fp;
    jl = fl * scale;
    jlm1 = flm1 * scale;
  }
  double deriv = jlm1 - (l + 1.0) / r * jl;
  return {jl, deriv};
}

// j_l^d via cylinder Bessel functions: j_l^d(r) = N r^{1-d/2} J_nu(r) with
// nu = l + d/2 - 1 and N = Gamma(d/2) 2^{d/2-1}, which fixes j_0^d(0) = 1.
BesselEval sph_bessel_general(int l, double r, int d) {
  double halfd = 0.5 * d;
  if (r == 0.0) return {l == 0 ? 1.0 : 0.0, l == 1 ? 1.0 / d : 0.0};
  if (r < 1e-3) {
    // Leading series terms around the origin.
    double lead = std::exp(std::lgamma(halfd) - l * std::log(2.0) - std::lgamma(l + halfd)) *
                  std::pow(r, l);
    double c1 = 1.0 / (4.0 * (l + halfd));
    double value = lead * (1.0 - c1 * r * r);
    double deriv = (l == 0 ? 0.0 : l * lead / r * (1.0 - c1 * r * r)) - lead * 2.0 * c1 * r;
    return {value, deriv};
  }
  double nu = l + halfd - 1.0;
  double norm = std::tgamma(halfd) * std::pow(2.0, halfd - 1.0);
  double pref = norm * std::pow(r, 1.0 - halfd);
  double jl = pref * std::cyl_bessel_j(nu, r);
  double deriv;
  if (l == 0) {
    deriv = -pref * std::cyl_bessel_j(nu + 1.0, r) * 1.0;  // (j_0^d)' = -j_1^d
  } else {
    double jlm1 = pref * std::cyl_bessel_j(nu - 1.0, r);
    deriv = jlm1 - (l + d - 2.0) / r * jl;
  }
  return {jl, deriv};
}

}  // namespace

BesselEval sph_bessel(int l, double r, int d) {
  if (l < 0) throw std::domain_error("sph_bessel: negative order");
  if (r < 0) throw std::domain_error("sph_bessel: negative argument");
  if (d < 3) throw std::domain_error("sph_bessel: dimension must be >= 3");
  if (d == 3) return sph_bessel3(l, r);
  return sph_bessel_general(l, r, d);
}

std::vector<BesselEval> sph_bessel_array(int lmax, double r) {
  if (lmax < 0) throw std::domain_error("sph_bessel_array: negative order");
  if (r < 0) throw std::domain_error("sph_bessel_array: negative argument");
  std::vector<BesselEval> out(lmax + 1);
  if (r == 0.0) {
    out[0] = {1.0, 0.0};
    if (lmax >= 1) out[1] = {0.0, 1.0 / 3.0};
    return out;
  }
  std::vector<double> j(lmax + 2, 0.0);
  double j0 = std::sin(r) / r;
  double j1 = std::sin(r) / (r * r) - std::cos(r) / r;
  if (r > lmax + 1.0) {
    j[0] = j0;
    if (lmax + 1 >= 1) j[1] = j1;
    for (int n = 1; n <= lmax; ++n) j[n + 1] = (2.0 * n + 1.0) / r * j[n] - j[n - 1];
  } else {
    int start = lmax + 28 + static_cast<int>(0.5 * std::sqrt(static_cast<double>(lmax)));
    double fp = 0.0, fc = 1e-280;
    for (int n = start; n >= 0; --n) {
      double fm = (2.0 * n + 3.0) / r * fc - fp;
      fp = fc;
      fc = fm;
      if (n <= lmax + 1) j[n] = fc;
      if (std::abs(fc) > kRescaleLimit) {
        fc /= kRescaleLimit;
        fp /= kRescaleLimit;
        for (int i = n; i <= lmax + 1; ++i) j[i] /= kRescaleLimit;
      }
    }
    double scale = std::abs(j0) >= std::abs(j1) ? j0 / j[0]
                                                : (lmax >= 0 ? j1 / j[1] : 1.0);
    for (auto& v : j) v *= scale;
  }
  // Small-l underflow guard: downward recursion through tiny magnitudes can
  // denormalize; recompute underflowed low orders from the series.
  for (int l = 0; l <= lmax; ++l) {
    if (l >= 1 && r < 0.5) {
      out[l] = sph_bessel3_series(l, r);
    } else if (l == 0) {
      out[0] = {j0, -j1};
    } else {
      out[l] = {j[l], j[l - 1] - (l + 1.0) / r * j[l]};
    }
  }
  return out;
}

void LegendreTable::compute(int lmaxIn, double theta) {
  lmax = lmaxIn;
  int n = (lmax + 1) * (lmax + 2) / 2;
  plm.assign(n, 0.0);
  dplm.assign(n, 0.0);
  double x = std::cos(theta);
  double s = std::sin(theta);
  sinSafe = std::max(std::abs(s), 1e-14);

  // Diagonal seeds: normalized P_mm with the Condon-Shortley phase.
  plm[0] = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 1; m <= lmax; ++m) {
    plm[index(m, m)] =
        -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * plm[index(m - 1, m - 1)];
  }
  for (int m = 0; m < lmax; ++m) {
    plm[index(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * plm[index(m, m)];
  }
  for (int m = 0; m <= lmax; ++m) {
    for (int l = m + 2; l <= lmax; ++l) {
      double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
      double b = std::sqrt((static_cast<double>(l - 1) * (l - 1) - m * m) /
                           (4.0 * static_cast<double>(l - 1) * (l - 1) - 1.0));
      plm[index(l, m)] = a * (x * plm[index(l - 1, m)] - b * plm[index(l - 2, m)]);
    }
  }
  // d/dtheta via (l x Plm - e_lm P_{l-1,m}) / sin(theta).
  for (int m = 0; m <= lmax; ++m) {
    for (int l = m; l <= lmax; ++l) {
      double pl = plm[index(l, m)];
      double plm1 = (l > m) ? plm[index(l - 1, m)] : 0.0;
      double e = (l > 0) ? std::sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0) *
                                     (static_cast<double>(l) * l - m * m))
                         : 0.0;
      dplm[index(l, m)] = (l * x * pl - e * plm1) / sinSafe;
    }
  }
}

AngularValue ylm_from_table(const LegendreTable& table, int l, int m, double phi) {
  int ma = std::abs(m);
  double p = table.plm[table.index(l, ma)];
  double dp = table.dplm[table.index(l, ma)];
  double sign = 1.0;
  if (m < 0 && (ma % 2 == 1)) sign = -1.0;
  cplx e = std::polar(1.0, m * phi);
  AngularValue out;
  out.value = sign * p * e;
  out.dTheta = sign * dp * e;
  // i m Y / sin(theta); finite away from poles since P_l^|m| ~ sin^|m|.
  out.dPhiOverSin = cplx(0.0, m / table.sinSafe) * out.value;
  return out;
}

AngularValue sph_harmonic(int l, int m, double theta, double phi) {
  if (l < 0) throw std::domain_error("sph_harmonic: negative degree");
  if (std::abs(m) > l) throw std::domain_error("sph_harmonic: |m| exceeds l");
  LegendreTable table;
  table.compute(l, theta);
  return ylm_from_table(table, l, m, phi);
}

double log_amplitude(int k, int l, int d) {
  double lambda = 4.0 * k + 2.0 * l + d;
  return -std::lgamma(0.5 * d) - l * std::log(0.5 * std::sqrt(lambda)) +
         std::lgamma(k + l + 0.5 * d) - std::lgamma(k + 1.0);
}

double amplitude(int k, int l, int d, AmplitudeMode mode) {
  if (k < 0 || l < 0) throw std::domain_error("amplitude: negative index");
  if (d < 3) throw std::domain_error("amplitude: dimension must be >= 3");
  if (mode == AmplitudeMode::Exact) return std::exp(log_amplitude(k, l, d));
  if (k == 0) throw std::domain_error("amplitude: asymptotic mode needs k >= 1");
  return std::exp((0.5 * l + 0.5 * d - 1.0) * std::log(static_cast<double>(k)) -
                  std::lgamma(0.5 * d));
}

FieldValue eval_psi_klm(const ModeIndex& idx, const Vec3& x, double logWeightOffset) {
  idx.validate();
  if (idx.d != 3) throw std::domain_error("eval_psi_klm: only d = 3 is supported");

  auto sph = to_spherical(x);
  FieldValue out;
  if (sph.r < 1e-300) {
    // Series limits at the origin. The value survives only for l = 0 and the
    // gradient only for l = 1, where psi ~ L_k(0) * (r Y_1m) is linear.
    if (idx.l == 0) {
      out.value = laguerre_at_zero(idx.k, 0.5) * std::exp(-logWeightOffset) /
                  (2.0 * std::sqrt(kPi));
    } else if (idx.l == 1) {
      double c = laguerre_at_zero(idx.k, 1.5) * std::exp(-logWeightOffset);
      double n10 = std::sqrt(3.0 / (4.0 * kPi));
      double n11 = std::sqrt(3.0 / (8.0 * kPi));
      if (idx.m == 0) {
        out.gradient = CVec3{0.0, 0.0, c * n10};
      } else if (idx.m == 1) {
        out.gradient = CVec3{-c * n11, cplx(0.0, -c * n11), 0.0};
      } else {
        out.gradient = CVec3{c * n11, cplx(0.0, -c * n11), 0.0};
      }
    }
    return out;
  }

  RadialEval rad = radial_factor(idx.k, idx.l, sph.r);
  AngularValue ang = sph_harmonic(idx.l, idx.m, sph.theta, sph.phi);
  double radV = rad.value.signedMantissa == 0.0
                    ? 0.0
                    : rad.value.signedMantissa *
                          std::exp(rad.value.logAmplitude - logWeightOffset);
  double radD = rad.derivative.signedMantissa == 0.0
                    ? 0.0
                    : rad.derivative.signedMantissa *
                          std::exp(rad.derivative.logAmplitude - logWeightOffset);

  SphericalFrame frame = spherical_frame(sph.theta, sph.phi);
  out.value = radV * ang.value;
  CVec3 grad = radD * ang.value * CVec3(frame.er);
  grad += (radV / sph.r) *
          (ang.dTheta * CVec3(frame.etheta) + ang.dPhiOverSin * CVec3(frame.ephi));
  out.gradient = grad;
  return out;
}

double hilb_residual(int k, int l, double R, int samples) {
  if (k < 1) throw std::domain_error("hilb_residual: k must be >= 1");
  if (R <= 0) throw std::domain_error("hilb_residual: R must be positive");
  if (samples < 2) throw std::domain_error("hilb_residual: need at least 2 samples");
  double logA = log_amplitude(k, l, 3);
  double sqrtLambda = std::sqrt(4.0 * k + 2.0 * l + 3.0);
  double worst = 0.0;
  for (int i = 1; i <= samples; ++i) {
    double r = R * i / samples;
    RadialEval rad = radial_factor(k, l, r);
    double scaled = rad.value.signedMantissa == 0.0
                        ? 0.0
                        : rad.value.signedMantissa *
                              std::exp(rad.value.logAmplitude - logA);
    double j = sph_bessel(l, sqrtLambda * r).value;
    worst = std::max(worst, std::abs(scaled - j));
  }
  return worst;
}

}  // namespace knotosc::specfun
