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
#include <optional>
#include <string>
#include <vector>

#include "knotosc/helmholtz.hpp"
#include "knotosc/nodal.hpp"
#include "knotosc/oscillator.hpp"
#include "knotosc/stability.hpp"
#include "knotosc/topology.hpp"

namespace knotosc::pipeline {

inline constexpr const char* kVersion = "0.1.0";

struct GridSpec {
  int compareRes = 48;
  int extractRes = 48;
  int normRes = 20;
};

struct ToleranceSpec {
  double regularization = 1e-8;
  double marginGate = 0.5;       // lift proceeds when c1Error < gate * seed margin
  double fitGradientWeight = 0.5;
  double valueTolFactor = 1e-8;
  double degeneracyTolFactor = 1e-6;
};

struct StabilitySpec {
  int trials = 20;
  double epsilonRel = 0.1;
};

struct SampleSpec {
  int alongPerComponent = 110;
  int around = 8;
  int guardCount = 500;
};

struct PipelineConfig {
  helmholtz::LinkPreset preset = helmholtz::LinkPreset::Hopf;
  int torusP = 0, torusQ = 0;
  std::optional<helmholtz::Placement> placement;  // preset default when absent
  double ballRadius = 0;                          // 0 = preset default
  int l0 = 0;                                     // 0 = auto
  int khat = 0;                                   // 0 = auto
  double background = -1;                         // < 0 = auto
  GridSpec grid;
  ToleranceSpec tolerances;
  StabilitySpec stability;
  SampleSpec samples;
  std::uint64_t rngSeed = 7;
  int threads = 0;
  std::string outDir;
  std::vector<std::string> formats{"json"};
  bool verbose = false;
};

PipelineConfig config_from_json(const std::string& text);
std::string config_to_json(const PipelineConfig& config);
std::string config_hash(const PipelineConfig& config);

struct PresetDefaults {
  helmholtz::Placement placement;
  double ballRadius;
  std::vector<int> l0Candidates;
};

PresetDefaults preset_defaults(helmholtz::LinkPreset preset, int p = 0, int q = 0);

struct SynthResult {
  helmholtz::SeedField seed;
  helmholtz::SampleSet samples;
  helmholtz::FitResult fit;
  double ballRadius = 0;        // working ball of the construction
  double extractionRadius = 0;  // snug symmetric ball around link + mirror
  double background = 0;
  std::vector<helmholtz::FitReport> sweepReports;  // when l0 was auto
};

SynthResult run_synth(const PipelineConfig& config);

struct HelmholtzCheck {
  topology::InvariantReport invariants;
  nodal::ExtractionStats stats;
  double fittedMargin = 0;
  int curveCount = 0;
};

HelmholtzCheck run_helmholtz_check(const SynthResult& synth,
                                   const PipelineConfig& config);

struct LiftResult {
  oscillator::OscillatorEigenfunction psi;
  oscillator::LiftReport report;
  std::vector<oscillator::LiftReport> attempts;  // when khat was auto
};

LiftResult run_lift(const SynthResult& synth, const PipelineConfig& config);

struct ExtractResult {
  std::vector<nodal::NodalCurve> curves;
  nodal::ExtractionStats stats;
};

// Extraction of the rescaled eigenfunction over the symmetric ball.
ExtractResult run_extract(const oscillator::OscillatorEigenfunction& psi,
                          double ballRadius, const PipelineConfig& config);

struct StageTiming {
  std::string name;
  double seconds = 0;
};

struct PipelineReport {
  PipelineConfig resolved;
  std::string configHash;
  double seedMargin = 0;
  SynthResult synth;
  HelmholtzCheck helmholtzCheck;
  std::optional<LiftResult> lift;
  ExtractResult extraction;
  topology::InvariantReport invariants;
  nodal::StabilityReport stability;
  std::vector<StageTiming> timings;
  bool pass = false;
  std::string failReason;
  std::string failedStage;
};

PipelineReport run_pipeline(const PipelineConfig& config);

std::string report_to_json(const PipelineReport& report);

// Writes curves/coefficients/eigenfunction/report artifacts into
// config.outDir in the configured formats; no-op when outDir is empty.
void write_artifacts(const PipelineReport& report, const PipelineConfig& config);

}  // namespace knotosc::pipeline
