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

#include <cstdint>
#include <string>
#include <vector>

#include "knotosc/nodal.hpp"
#include "knotosc/oscillator.hpp"

namespace knotosc::nodal {

struct StabilityOptions {
  Region region = Region::ball(1.0);
  ExtractionOptions extraction;
  int normGridRes = 20;   // C1-norm measurement lattice for the perturbation
  int maxModes = 96;      // eigenspace modes sampled per perturbation
  int maxL = 48;          // angular cutoff of sampled modes
  std::uint64_t topologySeed = 11;
};

struct StabilityReport {
  int trials = 0;
  double epsilonRel = 0;
  int preserved = 0;
  std::string baselineSignature;
  std::vector<std::string> signatures;
  std::vector<double> perturbationNorms;  // measured C1 grid norms
  double baselineMargin = 0;
};

// Structural-stability stress test: draws random same-eigenvalue
// eigenfunction perturbations, scales each to a C1 grid norm of
// epsilonRel * (baseline min margin) in the rescaled frame, re-extracts the
// nodal curves of psi + g over the same region and compares canonical
// invariant signatures.
StabilityReport perturb_and_retrace(const oscillator::OscillatorEigenfunction& psi,
                                    double epsilonRel, int trials,
                                    std::uint64_t rngSeed,
                                    const StabilityOptions& options);

}  // namespace knotosc::nodal
