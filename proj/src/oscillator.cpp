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

#include "knotosc/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "knotosc/parallel.hpp"

namespace knotosc::oscillator {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

OscillatorEigenfunction::OscillatorEigenfunction(int khat,
                                                 std::vector<WeightedMode> modes)
    : khat_(khat), modes_(std::move(modes)) {
  if (khat < 0) throw std::domain_error("OscillatorEigenfunction: negative khat");
  const int lam = lambda();
  std::map<std::pair<int, int>, Group> grouped;
  for (const auto& mode : modes_) {
    mode.index.validate();
    if (mode.index.eigenvalue() != lam)
      throw std::domain_error(
          "OscillatorEigenfunction: mode eigenvalue differs from 4 khat + 3");
    auto key = std::make_pair(mode.index.k, mode.index.l);
    auto& g = grouped[key];
    g.k = mode.index.k;
    g.l = mode.index.l;
    g.terms.emplace_back(mode.index.m, mode.weight);
    maxL_ = std::max(maxL_, mode.index.l);
  }
  for (auto& [key, g] : grouped) groups_.push_back(std::move(g));
}

FieldValue OscillatorEigenfunction::eval(const Vec3& x) const {
  auto sph = to_spherical(x);
  FieldValue out;
  if (sph.r < 1e-300) {
    for (const auto& g : groups_) {
      if (g.l == 0) {
        double radial = specfun::laguerre_at_zero(g.k, 0.5);
        for (const auto& [m, w] : g.terms)
          out.value += w * radial / (2.0 * std::sqrt(kPi));
      }
      if (g.l == 1) {
        double radial = specfun::laguerre_at_zero(g.k, 1.5);
        double n10 = std::sqrt(3.0 / (4.0 * kPi));
        double n11 = std::sqrt(3.0 / (8.0 * kPi));
        for (const auto& [m, w] : g.terms) {
          if (m == 0)
            out.gradient += w * radial * CVec3{0.0, 0.0, n10};
          else if (m == 1)
            out.gradient += w * radial * CVec3{-n11, cplx(0.0, -n11), 0.0};
          else
            out.gradient += w * radial * CVec3{n11, cplx(0.0, -n11), 0.0};
        }
      }
    }
    return out;
  }

  specfun::LegendreTable table;
  table.compute(maxL_, sph.theta);
  SphericalFrame frame = spherical_frame(sph.theta, sph.phi);
  CVec3 er(frame.er), et(frame.etheta), ep(frame.ephi);

  for (const auto& g : groups_) {
    specfun::RadialEval rad = specfun::radial_factor(g.k, g.l, sph.r);
    for (const auto& [m, w] : g.terms) {
      double aw = std::abs(w);
      if (aw == 0.0) continue;
      double logW = std::log(aw);
      cplx phase = w / aw;
      // term = w * radial * Y; combine magnitudes in the log domain.
      double radV = rad.value.signedMantissa == 0.0
                        ? 0.0
                        : rad.value.signedMantissa *
                              std::exp(rad.value.logAmplitude + logW);
      double radD = rad.derivative.signedMantissa == 0.0
                        ? 0.0
                        : rad.derivative.signedMantissa *
                              std::exp(rad.derivative.logAmplitude + logW);
      specfun::AngularValue ang = specfun::ylm_from_table(table, g.l, m, sph.phi);
      out.value += phase * radV * ang.value;
      out.gradient += phase * (radD * ang.value * er +
                               (radV / sph.r) *
                                   (ang.dTheta * et + ang.dPhiOverSin * ep));
    }
  }
  return out;
}

OscillatorEigenfunction lift(const helmholtz::FourierBesselField& field, int khat) {
  if (field.max_odd_coeff() != 0.0)
    throw std::domain_error("lift: field carries odd-l coefficients (parity)");
  if (2 * khat <= field.l0())
    throw std::domain_error("lift: khat must exceed l0 / 2");
  std::vector<WeightedMode> modes;
  for (int l = 0; l <= field.l0(); l += 2) {
    int kl = khat - l / 2;
    double logA = specfun::log_amplitude(kl, l, 3);
    for (int m = -l; m <= l; ++m) {
      cplx c = field.coeff(l, m);
      if (c == cplx{0, 0}) continue;
      cplx w = c * std::exp(-logA);
      modes.push_back({specfun::ModeIndex{kl, l, m, 3}, w});
    }
  }
  return OscillatorEigenfunction(khat, std::move(modes));
}

std::vector<specfun::ModeIndex> enumerate_eigenspace(int lambda) {
  if (lambda < 3 || lambda % 2 == 0)
    throw std::domain_error("enumerate_eigenspace: lambda must be odd and >= 3");
  int N = (lambda - 3) / 2;
  std::vector<specfun::ModeIndex> out;
  for (int k = 0; 2 * k <= N; ++k) {
    int l = N - 2 * k;
    for (int m = -l; m <= l; ++m) out.push_back({k, l, m, 3});
  }
  return out;
}

long long eigenspace_dimension(int lambda) {
  if (lambda < 3 || lambda % 2 == 0)
    throw std::domain_error("eigenspace_dimension: lambda must be odd and >= 3");
  long long N = (lambda - 3) / 2;
  return (N + 1) * (N + 2) / 2;
}

double eigen_residual(const ComplexField& field, double lambda,
                      const std::vector<Vec3>& points) {
  if (points.empty()) return 0.0;
  // Step balances the h^4 truncation of the 5-point Laplacian stencil against
  // roundoff in the second difference.
  const double h = 0.0085 * std::pow(lambda, -0.75);

  double meanAbs = 0;
  std::vector<cplx> center(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    center[i] = field.eval(points[i]).value;
    meanAbs += std::abs(center[i]);
  }
  meanAbs /= static_cast<double>(points.size());
  const double eps = 0.01 * lambda * std::max(meanAbs, 1e-300);

  double worst = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3& p = points[i];
    cplx lap{0, 0};
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 e{axis == 0 ? 1.0 : 0.0, axis == 1 ? 1.0 : 0.0, axis == 2 ? 1.0 : 0.0};
      cplx f1 = field.eval(p + e * h).value;
      cplx f2 = field.eval(p + e * (2 * h)).value;
      cplx fm1 = field.eval(p - e * h).value;
      cplx fm2 = field.eval(p - e * (2 * h)).value;
      lap += (-f2 + 16.0 * f1 - 30.0 * center[i] + 16.0 * fm1 - fm2) /
             (12.0 * h * h);
    }
    cplx residual = -lap + (p.norm2() - lambda) * center[i];
    worst = std::max(worst,
                     std::abs(residual) / (lambda * std::abs(center[i]) + eps));
  }
  return worst;
}

double eigen_residual(const OscillatorEigenfunction& psi,
                      const std::vector<Vec3>& points) {
  return eigen_residual(psi, psi.lambda(), points);
}

LiftReport rescaled_compare(const OscillatorEigenfunction& psi,
                            const ComplexField& field, double ballRadius,
                            int gridRes, int threads) {
  LiftReport report;
  report.gridRes = gridRes;
  report.ballRadius = ballRadius;
  const double sqrtLambda = std::sqrt(static_cast<double>(psi.lambda()));
  const int n = gridRes;
  std::vector<double> valueErr(static_cast<std::size_t>(n) * n * n, 0.0);
  std::vector<double> gradErr(valueErr.size(), 0.0);
  parallel_for(
      valueErr.size(),
      [&](std::size_t idx) {
        int i = static_cast<int>(idx / (static_cast<std::size_t>(n) * n));
        int j = static_cast<int>((idx / n) % n);
        int k = static_cast<int>(idx % n);
        Vec3 x{-ballRadius + 2.0 * ballRadius * (i + 0.5) / n,
               -ballRadius + 2.0 * ballRadius * (j + 0.5) / n,
               -ballRadius + 2.0 * ballRadius * (k + 0.5) / n};
        if (x.norm() > ballRadius) return;
        FieldValue a = psi.eval(x / sqrtLambda);
        a.gradient = a.gradient * cplx(1.0 / sqrtLambda, 0.0);
        FieldValue b = field.eval(x);
        valueErr[idx] = std::abs(a.value - b.value);
        gradErr[idx] = (a.gradient - b.gradient).norm();
      },
      threads);
  for (std::size_t i = 0; i < valueErr.size(); ++i) {
    report.valueError = std::max(report.valueError, valueErr[i]);
    report.gradError = std::max(report.gradError, gradErr[i]);
  }
  report.c1Error = std::max(report.valueError, report.gradError);
  return report;
}

}  // namespace knotosc::oscillator
