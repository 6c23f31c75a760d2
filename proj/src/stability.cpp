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

#include "knotosc/stability.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "knotosc/parallel.hpp"
#include "knotosc/topology.hpp"

namespace knotosc::nodal {

namespace {

// C1 sup norm of a field over a lattice in the region's bounding box.
double c1_grid_norm(const ComplexField& field, const Region& region, int res,
                    int threads) {
  Vec3 lo = region.boundsLo(), hi = region.boundsHi();
  Vec3 span = hi - lo;
  std::vector<double> norms(static_cast<std::size_t>(res) * res * res, 0.0);
  parallel_for(
      norms.size(),
      [&](std::size_t idx) {
        int i = static_cast<int>(idx / (static_cast<std::size_t>(res) * res));
        int j = static_cast<int>((idx / res) % res);
        int k = static_cast<int>(idx % res);
        Vec3 x{lo.x + span.x * (i + 0.5) / res, lo.y + span.y * (j + 0.5) / res,
               lo.z + span.z * (k + 0.5) / res};
        if (!region.contains(x)) return;
        FieldValue v = field.eval(x);
        norms[idx] = std::max(std::abs(v.value), v.gradient.norm());
      },
      threads);
  double worst = 0;
  for (double v : norms) worst = std::max(worst, v);
  return worst;
}

}  // namespace

StabilityReport perturb_and_retrace(const oscillator::OscillatorEigenfunction& psi,
                                    double epsilonRel, int trials,
                                    std::uint64_t rngSeed,
                                    const StabilityOptions& options) {
  if (epsilonRel < 0) throw std::domain_error("perturb_and_retrace: epsilonRel < 0");
  if (trials <= 0) throw std::domain_error("perturb_and_retrace: trials <= 0");

  const double sqrtLambda = std::sqrt(static_cast<double>(psi.lambda()));
  RescaledField rescaled(psi, sqrtLambda);

  StabilityReport report;
  report.trials = trials;
  report.epsilonRel = epsilonRel;

  auto baseline = extract_nodal_curves(rescaled, options.region, options.extraction);
  double minMargin = std::numeric_limits<double>::infinity();
  for (const auto& c : baseline.curves)
    if (c.closed && !c.degenerate) minMargin = std::min(minMargin, c.minMargin);
  if (!std::isfinite(minMargin) || minMargin <= 0)
    throw std::domain_error(
        "perturb_and_retrace: baseline extraction has no positive-margin curves");
  report.baselineMargin = minMargin;
  report.baselineSignature =
      topology::invariant_signature(baseline.curves, options.topologySeed);

  auto eigenspace = oscillator::enumerate_eigenspace(psi.lambda());

  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(rngSeed + 1000003ULL * trial);
    // Random same-eigenvalue perturbation: a sparse draw over the eigenspace
    // list, each sampled mode weighted 1/A_kl so all contribute at a
    // comparable scale.
    std::vector<specfun::ModeIndex> pool;
    for (const auto& idx : eigenspace)
      if (idx.l <= options.maxL) pool.push_back(idx);
    std::shuffle(pool.begin(), pool.end(), rng);
    std::size_t count = std::min<std::size_t>(options.maxModes, pool.size());
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<oscillator::WeightedMode> modes;
    for (std::size_t i = 0; i < count; ++i) {
      double logA = specfun::log_amplitude(pool[i].k, pool[i].l, 3);
      cplx coeff{gauss(rng), gauss(rng)};
      modes.push_back({pool[i], coeff * std::exp(-logA)});
    }
    oscillator::OscillatorEigenfunction g(psi.khat(), std::move(modes));
    RescaledField gResc(g, sqrtLambda);

    double norm = c1_grid_norm(gResc, options.region, options.normGridRes,
                               options.extraction.threads);
    double target = epsilonRel * minMargin;
    cplx amp = norm > 0 ? cplx(target / norm, 0.0) : cplx(0.0, 0.0);
    report.perturbationNorms.push_back(target);

    SumField perturbed(rescaled, gResc, amp);
    auto retraced =
        extract_nodal_curves(perturbed, options.region, options.extraction);
    std::string sig =
        topology::invariant_signature(retraced.curves, options.topologySeed);
    report.signatures.push_back(sig);
    if (sig == report.baselineSignature) ++report.preserved;
  }
  return report;
}

}  // namespace knotosc::nodal
