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

#include "knotosc/field.hpp"
#include "knotosc/types.hpp"

namespace knotosc::helmholtz {

// Finite Fourier-Bessel expansion sum_{l<=l0, |m|<=l} c_lm j_l(r) Y_lm, an
// entire solution of the Helmholtz equation. Coefficients are stored densely
// at index l^2 + l + m. Constraint-built fields carry only even l.
class FourierBesselField final : public ComplexField {
 public:
  FourierBesselField() : FourierBesselField(0) {}
  explicit FourierBesselField(int l0);

  int l0() const { return l0_; }
  cplx coeff(int l, int m) const;
  void set_coeff(int l, int m, cplx c);
  double max_odd_coeff() const;
  bool is_even(double tol = 0.0) const { return max_odd_coeff() <= tol; }
  void zero_odd();
  const std::vector<cplx>& raw() const { return coeffs_; }

  FieldValue eval(const Vec3& x) const override;

 private:
  int l0_;
  std::vector<cplx> coeffs_;
};

// Finite sum of Green's-function point sources sum_j c_j G(x - z_j) with
// G(x) = cos|x| / (4 pi |x|). Mirror-symmetric fields are built through
// add_mirror_pair, which stores +-z with equal charges, so the Lemma-3 style
// symmetry constraints hold exactly by construction.
class PointSourceField final : public ComplexField {
 public:
  std::vector<Vec3> poles;
  std::vector<cplx> charges;

  void add_source(const Vec3& z, cplx c);
  void add_mirror_pair(const Vec3& z, cplx c);
  bool is_mirror_symmetric() const;

  FieldValue eval(const Vec3& x) const override;
};

// G(x - source) for the operator Delta + 1.
double greens_eval(const Vec3& x, const Vec3& source);
FieldValue greens_eval_full(const Vec3& x, const Vec3& source);

enum class LinkPreset { Unknot, Hopf, Trefoil, Solomon, Borromean, Torus };

LinkPreset preset_from_string(const std::string& name);
std::string preset_to_string(LinkPreset preset);

struct Placement {
  double scale = 1.0;
  Vec3 translate{0, 0, 0};
  // Local z-axis in world coordinates; by default the octant diagonal, which
  // centers the construction inside the positive octant.
  Vec3 axis{0.5773502691896258, 0.5773502691896258, 0.5773502691896258};
};

// Rotation taking the local frame (z-axis) onto the placement axis.
struct AxisRotation {
  Vec3 c0, c1, c2;  // columns

  static AxisRotation from_z_to(const Vec3& axis);
  Vec3 apply(const Vec3& v) const;
  Vec3 applyTranspose(const Vec3& v) const;
  CVec3 apply(const CVec3& v) const;
};

// Seed field whose zero set is the requested link, with exact value and
// gradient. The torus family realizes the Milnor equation w1^p = b^p w2^q in
// round-torus coordinates (w1 the poloidal complex coordinate, w2 the unit
// toroidal phase), so the link stays inside a thin spherical shell around
// the origin, which is what keeps the Fourier-Bessel fit well conditioned.
// The Borromean rings use a product of three ellipse factors. The window is
// a smooth bump around the reference link used when assembling fit targets.
class SeedField final : public ComplexField {
 public:
  LinkPreset preset = LinkPreset::Unknot;
  int torusP = 1, torusQ = 1;
  double poloidalRatio = 0.25;  // torus tube radius over central radius
  Placement placement;

  // Filled by milnor_seed: polyline per component, in world coordinates.
  std::vector<std::vector<Vec3>> referenceLink;
  double tubeRadius = 0.0;    // window plateau radius (world units)
  double windowOuter = 0.0;   // window support radius (world units)
  double margin = 0.0;        // min transversality margin along the link

  FieldValue eval(const Vec3& x) const override;   // raw polynomial
  FieldValue eval_windowed(const Vec3& x) const;   // polynomial * bump
  double window(const Vec3& x) const;
  double distance_to_link(const Vec3& x) const;

  // Raw polynomial in local (unit-scale) coordinates.
  FieldValue eval_local(const Vec3& xl) const;
};

// Builds the seed for a preset and placement, traces its reference link and
// measures the transversality margin along it. Throws ConfigError when the
// placed link leaves the open positive octant or the ball of the given
// radius (margins included).
SeedField milnor_seed(LinkPreset preset, const Placement& placement,
                      double ballRadius, int torusP = 0, int torusQ = 0,
                      double poloidalRatio = 0.25);

// Weighted value/gradient targets for coefficient fitting; symmetric sets
// carry x and -x with identical weights.
struct SampleSet {
  std::vector<Vec3> points;
  std::vector<cplx> values;
  std::vector<CVec3> gradients;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  void append(const Vec3& p, cplx v, const CVec3& g, double w);
};

struct TubeSampleOptions {
  int alongPerComponent = 160;
  int around = 8;
  double guardWeight = 0.15;    // weight of coarse ball-interior samples
  int guardCount = 600;         // per half-ball, mirrored
  double background = 0.0;      // amplitude of the j_0 Y_00 background term
  std::uint64_t rngSeed = 1;
};

// Symmetrized fit targets: T(x) = seed(x) win(x) + seed(-x) win(-x)
// [+ background j_0(r) Y_00], sampled on rings around the reference link and
// its mirror image, plus sparse interior guard points.
SampleSet make_tube_samples(const SeedField& seed, double ballRadius,
                            const TubeSampleOptions& options);

struct FitReport {
  int l0 = 0;
  double c0Residual = 0;     // sup |field - target| over full-weight samples
  double gradResidual = 0;   // sup gradient mismatch over full-weight samples
  double c1Residual = 0;     // max of the two
  double guardResidual = 0;  // sup value mismatch over reduced-weight samples
  double sigmaMax = 0, sigmaMin = 0;  // of the column-normalized system
  int effectiveRank = 0;
  bool conditionWarning = false;
};

struct FitResult {
  FourierBesselField field;
  FitReport report;
};

struct FitOptions {
  double regularization = 1e-8;  // Tikhonov tau = regularization * sigma_max
  double gradientWeight = 0.5;   // scale of gradient rows relative to values
};

// Regularized least squares of an even Fourier-Bessel expansion against the
// sample targets (values and gradients), solved by column-normalized SVD with
// Tikhonov filtering.
FitResult fit_coefficients(const SampleSet& samples, int l0,
                           const FitOptions& options = {});

// Spec-shaped wrapper; the seed argument documents where the samples came
// from and is validated for consistency with the symmetric sample layout.
FitResult fit_coefficients(const SeedField& seed, int l0, const SampleSet& samples,
                           const FitOptions& options = {});

// Same system, assembled once at max(l0Values); returns fits for each
// requested truncation using nested leading column blocks.
std::vector<FitResult> fit_coefficients_sweep(const std::vector<int>& l0Values,
                                              const SampleSet& samples,
                                              const FitOptions& options = {});

struct SweepResult {
  PointSourceField field;
  double supError = 0;
  int pairBudget = 0;
};

struct SweepOptions {
  int restarts = 3;
  double poleRadiusFactor = 1.3;
  std::uint64_t rngSeed = 1;
  // Pole pairs tried before random ones in every restart; lets a target that
  // already has the mirror-pair form be reproduced exactly.
  std::vector<Vec3> candidatePoles;
};

// Lemma-3 style sweep: approximates phi1 on the symmetric sample set S by
// mirror pairs of point sources placed outside the closed ball. Pole sets are
// nested across the budgets of one restart, so the reported sup errors are
// non-increasing in the budget.
std::vector<SweepResult> greens_sweep(const PointSourceField& phi1, double ballRadius,
                                      const std::vector<Vec3>& S,
                                      const std::vector<int>& budgets,
                                      const SweepOptions& options = {});

struct ProjectionResult {
  int l0 = 0;
  std::vector<cplx> coeffs;        // dense, index l^2 + l + m, all parities
  std::vector<double> radialNorms;  // per l: sqrt(int j_l^2 r^2 dr) over the ball
  double fieldNorm = 0;             // L2(ball) norm of the projected part
  // Largest odd-l L2(ball) content relative to the field norm. Raw odd
  // coefficients of deeply evanescent modes are noise amplified by
  // 1/||j_l||, so smallness is judged in norm-weighted form.
  double maxOdd = 0;

  cplx coeff(int l, int m) const { return coeffs[l * l + l + m]; }
  // Even part as a field; requires maxOdd <= tol when enforce is true.
  FourierBesselField even_field(bool enforce = true, double tol = 1e-8) const;
};

// L^2(ball) Fourier-Bessel projection of an arbitrary field: angular
// quadrature against conj(Y_lm) and radial Gauss-Legendre projection onto
// j_l. Exact (to quadrature precision) for fields solving Helmholtz in the
// ball.
ProjectionResult project_fourier_bessel(const ComplexField& field, int l0,
                                        double ballRadius, int radialNodes = 48,
                                        int angularDegreeMargin = 12);

// Pole-validating overload per the point-source contract.
ProjectionResult project_fourier_bessel(const PointSourceField& field, int l0,
                                        double ballRadius, int radialNodes = 48,
                                        int angularDegreeMargin = 12);

// Sup distance between two fields over sample points; order 1 adds the
// gradient sup mismatch.
double field_distance(const ComplexField& f, const ComplexField& g,
                      const std::vector<Vec3>& samples, int order);

}  // namespace knotosc::helmholtz
