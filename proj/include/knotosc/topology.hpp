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

#include "knotosc/helmholtz.hpp"
#include "knotosc/nodal.hpp"

namespace knotosc::topology {

using nodal::NodalCurve;
using helmholtz::LinkPreset;

// Planar diagram of a set of closed polylines under a generic projection.
struct CrossingDiagram {
  struct Crossing {
    int curveA = 0, segA = 0;
    int curveB = 0, segB = 0;
    double tA = 0, tB = 0;     // parameters within the two segments
    double px = 0, py = 0;     // projected position
    double depthA = 0, depthB = 0;
    bool aOver = false;
    int sign = 0;              // cross2(over-dir, under-dir) orientation sign
  };
  struct Pass {
    int crossing = 0;
    bool over = false;
    int sign = 0;
    double position = 0;       // segment index + parameter, orders the walk
  };

  Vec3 projectionDir;
  std::vector<Crossing> crossings;
  std::vector<std::vector<Pass>> passes;  // per curve, in traversal order

  int crossing_count() const { return static_cast<int>(crossings.size()); }
  long long inter_sign_sum(int curveA, int curveB) const;
  std::string gauss_code() const;
};

// Random generic projection of the curves; throws NumericalError when no
// direction passes the genericity checks within maxAttempts (curves too
// coarse).
CrossingDiagram project_to_diagram(const std::vector<const NodalCurve*>& curves,
                                   std::uint64_t rngSeed, int maxAttempts = 64);

// Exact Gauss double sum over segment pairs (signed solid angle of the
// spherical quadrilateral per pair); integer-valued for disjoint closed
// polylines up to roundoff.
double gauss_linking(const NodalCurve& c1, const NodalCurve& c2);

// Half the signed inter-component crossing count in a generic projection.
long long crossing_linking(const NodalCurve& c1, const NodalCurve& c2,
                           std::uint64_t rngSeed);

// Both routes; throws NumericalError when they disagree.
long long linking_number(const NodalCurve& c1, const NodalCurve& c2,
                         std::uint64_t rngSeed = 11);

// Knot determinant |det(K)| from a Goeritz matrix of a checkerboard-colored
// diagram of the single closed curve. The empty diagram gives 1.
long long knot_determinant(const NodalCurve& curve, std::uint64_t rngSeed = 11);

// det of the (p, q) torus knot from the Alexander polynomial at -1.
long long torus_knot_determinant(int p, int q);

enum class LinkClass {
  Unknot,
  Hopf,
  Trefoil,
  Solomon,
  BorromeanConsistent,
  TorusConsistent,
  Unrecognized,
};

std::string link_class_to_string(LinkClass c);

struct InvariantReport {
  int componentCount = 0;          // closed curves considered
  int openCurves = 0;              // excluded from invariants
  std::vector<std::vector<long long>> linkingMatrix;
  std::vector<long long> determinants;
  LinkClass classification = LinkClass::Unrecognized;
  bool matchesTarget = false;
  bool mirrorSplit = false;        // curves pair up as link + mirror image
  int perCopyComponents = 0;
  bool splitPairDetected = false;  // some pair separates by bounding spheres
  std::string signature;           // canonical, deterministic
};

// Computes counts, the pairwise linking matrix and per-component
// determinants, then matches them against the target preset. When the curve
// set decomposes into a mirror pair of copies (even eigenfunctions), each
// copy is classified and the verdict refers to one copy.
InvariantReport classify_link(const std::vector<NodalCurve>& curves,
                              LinkPreset target, int torusP = 0, int torusQ = 0,
                              std::uint64_t rngSeed = 11);

// Canonical signature of the invariants of a curve set, for stability
// comparisons: component count, sorted determinants and the linking matrix
// under the centroid-lexicographic component order.
std::string invariant_signature(const std::vector<NodalCurve>& curves,
                                std::uint64_t rngSeed = 11);

}  // namespace knotosc::topology
