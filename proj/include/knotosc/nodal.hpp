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
#include "knotosc/types.hpp"

namespace knotosc::nodal {

// One connected component of the nodal set {Re psi = Im psi = 0}, traced as
// an oriented polyline. Orientation follows the intrinsic tangent
// grad(Re) x grad(Im).
struct NodalCurve {
  std::vector<Vec3> vertices;
  std::vector<double> margins;  // per-vertex transversality margin
  bool closed = false;
  bool degenerate = false;  // trace aborted on tangent degeneracy
  double minMargin = 0;
  double arcLength = 0;

  Vec3 centroid() const;
  double boundingRadius() const;  // about the centroid
  NodalCurve mirrored() const;    // x -> -x, traversal order adjusted
  NodalCurve densified() const;   // midpoint refinement
};

struct Region {
  enum class Kind { Box, Ball };
  Kind kind = Kind::Ball;
  Vec3 lo, hi;
  double radius = 1.0;

  static Region box(const Vec3& lo, const Vec3& hi);
  static Region ball(double radius);
  bool contains(const Vec3& p) const;
  Vec3 boundsLo() const;
  Vec3 boundsHi() const;
  double diameter() const;
};

struct ExtractionOptions {
  int gridRes = 48;
  double step = 0;                    // 0 -> region diameter / (4 * gridRes)
  double valueTolFactor = 1e-8;       // * sup |field| over the region grid
  double degeneracyTolFactor = 1e-6;  // * median gradient norm
  int maxNewtonIters = 25;
  int maxTraceSteps = 20000;
  int minVertices = 4;
  int threads = 0;
};

struct ExtractionStats {
  double fieldSup = 0;
  double medianGradient = 0;
  double valueTol = 0;
  double degeneracyTol = 0;
  double step = 0;
  int candidateCells = 0;
  int seedsConverged = 0;
  int curvesTraced = 0;
  int duplicatesMerged = 0;
  int discardedShort = 0;
};

struct ExtractionResult {
  std::vector<NodalCurve> curves;
  ExtractionStats stats;
};

// Seeds on grid cells where both Re and Im change sign, refines them onto the
// zero set by least-norm Newton steps, then traces each curve with a
// predictor-corrector march along grad(Re) x grad(Im).
ExtractionResult extract_nodal_curves(const ComplexField& field, const Region& region,
                                      const ExtractionOptions& options = {});

struct TransversalityReport {
  std::vector<double> perVertexMargin;
  double min = 0;
};

// Smallest singular value of the stacked rows (grad Re, grad Im) at each
// curve vertex.
TransversalityReport transversality_margin(const ComplexField& field,
                                           const NodalCurve& curve);

// Margin at a single evaluated point.
double gradient_margin(const FieldValue& value);

}  // namespace knotosc::nodal
