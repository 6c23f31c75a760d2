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

#include "knotosc/helmholtz.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "knotosc/errors.hpp"
#include "knotosc/nodal.hpp"
#include "knotosc/quadrature.hpp"
#include "knotosc/specfun.hpp"

namespace knotosc::helmholtz {

namespace {
constexpr double kPi = 3.14159265358979323846;
const double kY00 = 1.0 / (2.0 * std::sqrt(kPi));
}  // namespace

// ---------------------------------------------------------------------------
// FourierBesselField

FourierBesselField::FourierBesselField(int l0) : l0_(l0) {
  if (l0 < 0) throw std::domain_error("FourierBesselField: negative truncation");
  coeffs_.assign(static_cast<std::size_t>(l0 + 1) * (l0 + 1), cplx{0, 0});
}

cplx FourierBesselField::coeff(int l, int m) const {
  if (l < 0 || l > l0_ || std::abs(m) > l)
    throw std::domain_error("FourierBesselField: index out of range");
  return coeffs_[static_cast<std::size_t>(l) * l + l + m];
}

void FourierBesselField::set_coeff(int l, int m, cplx c) {
  if (l < 0 || l > l0_ || std::abs(m) > l)
    throw std::domain_error("FourierBesselField: index out of range");
  coeffs_[static_cast<std::size_t>(l) * l + l + m] = c;
}

double FourierBesselField::max_odd_coeff() const {
  double worst = 0;
  for (int l = 1; l <= l0_; l += 2)
    for (int m = -l; m <= l; ++m)
      worst = std::max(worst, std::abs(coeffs_[static_cast<std::size_t>(l) * l + l + m]));
  return worst;
}

void FourierBesselField::zero_odd() {
  for (int l = 1; l <= l0_; l += 2)
    for (int m = -l; m <= l; ++m)
      coeffs_[static_cast<std::size_t>(l) * l + l + m] = cplx{0, 0};
}

FieldValue FourierBesselField::eval(const Vec3& x) const {
  auto sph = to_spherical(x);
  FieldValue out;
  if (sph.r < 1e-300) {
    out.value = coeff(0, 0) * kY00;
    if (l0_ >= 1) {
      double n10 = std::sqrt(3.0 / (4.0 * kPi)) / 3.0;
      double n11 = std::sqrt(3.0 / (8.0 * kPi)) / 3.0;
      out.gradient += coeff(1, 0) * CVec3{0.0, 0.0, n10};
      out.gradient += coeff(1, 1) * CVec3{-n11, cplx(0.0, -n11), 0.0};
      out.gradient += coeff(1, -1) * CVec3{n11, cplx(0.0, -n11), 0.0};
    }
    return out;
  }
  auto bes = specfun::sph_bessel_array(l0_, sph.r);
  specfun::LegendreTable table;
  table.compute(l0_, sph.theta);
  SphericalFrame frame = spherical_frame(sph.theta, sph.phi);
  CVec3 er(frame.er), et(frame.etheta), ep(frame.ephi);
  for (int l = 0; l <= l0_; ++l) {
    for (int m = -l; m <= l; ++m) {
      cplx c = coeffs_[static_cast<std::size_t>(l) * l + l + m];
      if (c == cplx{0, 0}) continue;
      specfun::AngularValue ang = specfun::ylm_from_table(table, l, m, sph.phi);
      out.value += c * bes[l].value * ang.value;
      out.gradient += c * (bes[l].derivative * ang.value * er +
                           (bes[l].value / sph.r) *
                               (ang.dTheta * et + ang.dPhiOverSin * ep));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Green's function and point sources

double greens_eval(const Vec3& x, const Vec3& source) {
  double rho = (x - source).norm();
  if (rho < 1e-12) throw SingularityError("greens_eval: evaluation at the pole");
  return std::cos(rho) / (4.0 * kPi * rho);
}

FieldValue greens_eval_full(const Vec3& x, const Vec3& source) {
  Vec3 y = x - source;
  double rho = y.norm();
  if (rho < 1e-12) throw SingularityError("greens_eval: evaluation at the pole");
  FieldValue out;
  out.value = std::cos(rho) / (4.0 * kPi * rho);
  double dG = -(std::sin(rho) * rho + std::cos(rho)) / (4.0 * kPi * rho * rho);
  out.gradient = CVec3(y * (dG / rho));
  return out;
}

void PointSourceField::add_source(const Vec3& z, cplx c) {
  poles.push_back(z);
  charges.push_back(c);
}

void PointSourceField::add_mirror_pair(const Vec3& z, cplx c) {
  poles.push_back(z);
  charges.push_back(c);
  poles.push_back(-z);
  charges.push_back(c);
}

bool PointSourceField::is_mirror_symmetric() const {
  std::vector<char> used(poles.size(), 0);
  for (std::size_t i = 0; i < poles.size(); ++i) {
    if (used[i]) continue;
    bool found = false;
    for (std::size_t j = 0; j < poles.size(); ++j) {
      if (used[j] || j == i) continue;
      if ((poles[j] + poles[i]).norm() == 0.0 && charges[j] == charges[i]) {
        used[i] = used[j] = 1;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

FieldValue PointSourceField::eval(const Vec3& x) const {
  FieldValue out;
  for (std::size_t j = 0; j < poles.size(); ++j) {
    FieldValue g = greens_eval_full(x, poles[j]);
    out.value += charges[j] * g.value;
    out.gradient += charges[j] * g.gradient;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Seed fields

LinkPreset preset_from_string(const std::string& name) {
  if (name == "unknot") return LinkPreset::Unknot;
  if (name == "hopf") return LinkPreset::Hopf;
  if (name == "trefoil") return LinkPreset::Trefoil;
  if (name == "solomon") return LinkPreset::Solomon;
  if (name == "borromean") return LinkPreset::Borromean;
  if (name == "torus") return LinkPreset::Torus;
  throw ConfigError("unknown link preset: " + name);
}

std::string preset_to_string(LinkPreset preset) {
  switch (preset) {
    case LinkPreset::Unknot: return "unknot";
    case LinkPreset::Hopf: return "hopf";
    case LinkPreset::Trefoil: return "trefoil";
    case LinkPreset::Solomon: return "solomon";
    case LinkPreset::Borromean: return "borromean";
    case LinkPreset::Torus: return "torus";
  }
  return "unknown";
}

AxisRotation AxisRotation::from_z_to(const Vec3& axisIn) {
  Vec3 w = axisIn.normalized();
  Vec3 helper = std::abs(w.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  Vec3 u = w.cross(helper).normalized();
  Vec3 v = w.cross(u);
  // Columns: images of the local x, y, z axes.
  return {u, v, w};
}

Vec3 AxisRotation::apply(const Vec3& p) const {
  return c0 * p.x + c1 * p.y + c2 * p.z;
}

Vec3 AxisRotation::applyTranspose(const Vec3& p) const {
  return {c0.dot(p), c1.dot(p), c2.dot(p)};
}

CVec3 AxisRotation::apply(const CVec3& g) const {
  Vec3 re = apply(g.real());
  Vec3 im = apply(g.imag());
  return {cplx(re.x, im.x), cplx(re.y, im.y), cplx(re.z, im.z)};
}

namespace {

cplx ipow(cplx z, int n) {
  cplx r{1, 0};
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

// Milnor equation on the round torus with central radius 1 and tube ratio b:
//   F = w1^p - b^p w2^q,
// w1 = (rho - 1) + iz the poloidal complex coordinate (rho = hypot(x, y)),
// w2 = (x + iy)/rho the toroidal phase. The zero set is the (p, q) torus
// link on the torus of poloidal radius b; |w1| > b away from the axis region
// keeps the axis singularity of w2 outside the zero set.
FieldValue eval_torus_milnor(const Vec3& p, int pExp, int qExp, double b) {
  double rho = std::hypot(p.x, p.y);
  double rhoSafe = std::max(rho, 1e-12);
  cplx w1{rho - 1.0, p.z};
  cplx w2{p.x / rhoSafe, p.y / rhoSafe};
  CVec3 dw1{cplx(p.x / rhoSafe, 0.0), cplx(p.y / rhoSafe, 0.0), cplx(0.0, 1.0)};
  // dw2 = (e_x + i e_y)/rho - w2 grad(rho)/rho.
  CVec3 dw2{(cplx(1.0, 0.0) - w2 * (p.x / rhoSafe)) / rhoSafe,
            (cplx(0.0, 1.0) - w2 * (p.y / rhoSafe)) / rhoSafe, cplx(0.0, 0.0)};
  double bp = std::pow(b, pExp);
  FieldValue out;
  out.value = ipow(w1, pExp) - bp * ipow(w2, qExp);
  out.gradient = static_cast<double>(pExp) * ipow(w1, pExp - 1) * dw1 -
                 (bp * static_cast<double>(qExp)) * ipow(w2, qExp - 1) * dw2;
  return out;
}

// Borromean rings as the closure of the three-strand braid (s1 s2^-1)^3:
// strands move on a lemniscate (cos u, r2 sin 2u) in the poloidal disk of the
// round torus, phased by 2 pi / 3. The product over strands gives a smooth
// field whose zero set is the braid closure, confined to the same thin
// spherical shell as the torus-family seeds.
FieldValue eval_borromean_braid(const Vec3& p, double b) {
  constexpr double r2 = 0.55;
  double rho = std::hypot(p.x, p.y);
  double rhoSafe = std::max(rho, 1e-12);
  double beta = std::atan2(p.y, p.x);
  cplx w1{rho - 1.0, p.z};
  CVec3 dw1{cplx(p.x / rhoSafe, 0.0), cplx(p.y / rhoSafe, 0.0), cplx(0.0, 1.0)};
  Vec3 dbeta{-p.y / (rhoSafe * rhoSafe), p.x / (rhoSafe * rhoSafe), 0.0};

  cplx factor[3];
  cplx sprime[3];
  for (int j = 0; j < 3; ++j) {
    double u = beta + 2.0 * kPi * j / 3.0;
    cplx strand = b * cplx(std::cos(u), r2 * std::sin(2.0 * u));
    factor[j] = w1 - strand;
    sprime[j] = b * cplx(-std::sin(u), 2.0 * r2 * std::cos(2.0 * u));
  }
  FieldValue out;
  out.value = factor[0] * factor[1] * factor[2];
  for (int j = 0; j < 3; ++j) {
    cplx rest = factor[(j + 1) % 3] * factor[(j + 2) % 3];
    out.gradient += rest * (dw1 - sprime[j] * CVec3(dbeta));
  }
  return out;
}

}  // namespace

FieldValue SeedField::eval_local(const Vec3& xl) const {
  switch (preset) {
    case LinkPreset::Unknot: return eval_torus_milnor(xl, 1, 1, poloidalRatio);
    case LinkPreset::Hopf: return eval_torus_milnor(xl, 2, 2, poloidalRatio);
    case LinkPreset::Trefoil: return eval_torus_milnor(xl, 2, 3, poloidalRatio);
    case LinkPreset::Solomon: return eval_torus_milnor(xl, 2, 4, poloidalRatio);
    case LinkPreset::Torus:
      return eval_torus_milnor(xl, torusP, torusQ, poloidalRatio);
    case LinkPreset::Borromean: return eval_borromean_braid(xl, poloidalRatio);
  }
  throw ConfigError("SeedField: unknown preset");
}

FieldValue SeedField::eval(const Vec3& x) const {
  AxisRotation rot = AxisRotation::from_z_to(placement.axis);
  Vec3 xl = rot.applyTranspose(x - placement.translate) / placement.scale;
  FieldValue v = eval_local(xl);
  v.gradient = rot.apply(v.gradient) * cplx(1.0 / placement.scale, 0.0);
  return v;
}

double SeedField::distance_to_link(const Vec3& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& component : referenceLink) {
    std::size_t n = component.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3& a = component[i];
      const Vec3& b = component[(i + 1) % n];
      Vec3 ab = b - a;
      double len2 = ab.norm2();
      double t = len2 > 0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
      best = std::min(best, (x - (a + ab * t)).norm());
    }
  }
  return best;
}

double SeedField::window(const Vec3& x) const {
  if (referenceLink.empty() || windowOuter <= tubeRadius) return 0.0;
  double d = distance_to_link(x);
  if (d <= tubeRadius) return 1.0;
  if (d >= windowOuter) return 0.0;
  double t = (d - tubeRadius) / (windowOuter - tubeRadius);
  double s = t * t * t * (t * (6.0 * t - 15.0) + 10.0);
  return 1.0 - s;
}

FieldValue SeedField::eval_windowed(const Vec3& x) const {
  double w = window(x);
  if (w == 0.0) return {};
  FieldValue v = eval(x);
  if (w == 1.0) return v;
  // Window gradient via the distance field; adequate inside the decay shell.
  double d = distance_to_link(x);
  double t = (d - tubeRadius) / (windowOuter - tubeRadius);
  double ds = 30.0 * t * t * (t - 1.0) * (t - 1.0) / (windowOuter - tubeRadius);
  // Direction of increasing distance: finite difference fallback keeps this
  // independent of the closest-segment bookkeeping.
  double eps = 1e-6 * std::max(1.0, d);
  Vec3 grad_d{(distance_to_link({x.x + eps, x.y, x.z}) -
               distance_to_link({x.x - eps, x.y, x.z})) /
                  (2 * eps),
              (distance_to_link({x.x, x.y + eps, x.z}) -
               distance_to_link({x.x, x.y - eps, x.z})) /
                  (2 * eps),
              (distance_to_link({x.x, x.y, x.z + eps}) -
               distance_to_link({x.x, x.y, x.z - eps})) /
                  (2 * eps)};
  FieldValue out;
  out.value = w * v.value;
  out.gradient = w * v.gradient + v.value * CVec3(grad_d * (-ds));
  return out;
}

SeedField milnor_seed(LinkPreset preset, const Placement& placement, double ballRadius,
                      int torusP, int torusQ, double poloidalRatio) {
  SeedField seed;
  seed.preset = preset;
  seed.placement = placement;
  seed.poloidalRatio = poloidalRatio;
  if (preset == LinkPreset::Torus) {
    if (torusP < 1 || torusQ < 1)
      throw ConfigError("milnor_seed: torus preset needs positive p, q");
    seed.torusP = torusP;
    seed.torusQ = torusQ;
  }
  if (placement.scale <= 0) throw ConfigError("milnor_seed: scale must be positive");
  if (poloidalRatio <= 0 || poloidalRatio >= 0.8)
    throw ConfigError("milnor_seed: poloidal ratio must lie in (0, 0.8)");

  // Trace the reference link on the raw seed over a generous local box.
  double localExtent = (1.0 + poloidalRatio) * 1.25;
  Vec3 ext{localExtent * placement.scale, localExtent * placement.scale,
           localExtent * placement.scale};
  nodal::Region box =
      nodal::Region::box(placement.translate - ext, placement.translate + ext);
  nodal::ExtractionOptions opts;
  opts.gridRes = 56;
  auto extraction = nodal::extract_nodal_curves(seed, box, opts);

  int expected = 1;
  switch (preset) {
    case LinkPreset::Unknot: expected = 1; break;
    case LinkPreset::Hopf: expected = 2; break;
    case LinkPreset::Trefoil: expected = 1; break;
    case LinkPreset::Solomon: expected = 2; break;
    case LinkPreset::Borromean: expected = 3; break;
    case LinkPreset::Torus: expected = std::gcd(seed.torusP, seed.torusQ); break;
  }
  std::vector<std::vector<Vec3>> components;
  double minMargin = std::numeric_limits<double>::infinity();
  for (const auto& c : extraction.curves) {
    if (!c.closed || c.degenerate) continue;
    components.push_back(c.vertices);
    minMargin = std::min(minMargin, c.minMargin);
  }
  if (static_cast<int>(components.size()) != expected)
    throw NumericalError("milnor_seed: traced " + std::to_string(components.size()) +
                         " closed components, expected " + std::to_string(expected));
  seed.referenceLink = std::move(components);
  seed.margin = minMargin;

  // Geometry checks: positive octant, inside the working ball, clearance
  // between strands and from the mirror image.
  double minCoord = std::numeric_limits<double>::infinity();
  double maxRadius = 0;
  double minInter = std::numeric_limits<double>::infinity();
  double mirrorDist = std::numeric_limits<double>::infinity();
  std::vector<Vec3> allVerts;
  for (const auto& comp : seed.referenceLink)
    allVerts.insert(allVerts.end(), comp.begin(), comp.end());
  for (std::size_t a = 0; a < seed.referenceLink.size(); ++a) {
    for (const auto& v : seed.referenceLink[a]) {
      minCoord = std::min({minCoord, v.x, v.y, v.z});
      maxRadius = std::max(maxRadius, v.norm());
    }
    for (std::size_t b = a + 1; b < seed.referenceLink.size(); ++b)
      for (const auto& va : seed.referenceLink[a])
        for (const auto& vb : seed.referenceLink[b])
          minInter = std::min(minInter, (va - vb).norm());
  }
  for (const auto& va : allVerts)
    for (const auto& vb : allVerts) mirrorDist = std::min(mirrorDist, (va + vb).norm());
  // Self-clearance between genuinely distant strand sections: cyclic index
  // gap of at least a sixth of the component.
  double minSelf = std::numeric_limits<double>::infinity();
  for (const auto& comp : seed.referenceLink) {
    std::size_t n = comp.size();
    std::size_t minGap = std::max<std::size_t>(8, n / 6);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + minGap; j < n; ++j) {
        std::size_t gap = std::min(j - i, n - (j - i));
        if (gap < minGap) continue;
        minSelf = std::min(minSelf, (comp[i] - comp[j]).norm());
      }
    }
  }
  if (minCoord <= 0)
    throw ConfigError("milnor_seed: placed link leaves the positive octant");
  if (maxRadius >= ballRadius)
    throw ConfigError("milnor_seed: placed link does not fit in the working ball");

  double clearance = std::min({minInter, minSelf});
  seed.tubeRadius = std::min(0.30 * clearance, 0.15 * placement.scale);
  seed.windowOuter = std::min(1.8 * seed.tubeRadius, 0.45 * mirrorDist);
  if (seed.windowOuter <= seed.tubeRadius) {
    seed.tubeRadius = 0.6 * seed.windowOuter;
  }
  if (maxRadius + seed.windowOuter >= ballRadius)
    throw ConfigError("milnor_seed: window support does not fit in the ball");
  return seed;
}

// ---------------------------------------------------------------------------
// Tube samples and fit targets

void SampleSet::append(const Vec3& p, cplx v, const CVec3& g, double w) {
  points.push_back(p);
  values.push_back(v);
  gradients.push_back(g);
  weights.push_back(w);
}

namespace {

FieldValue fit_target(const SeedField& seed, double background, const Vec3& x) {
  FieldValue out;
  double wp = seed.window(x);
  double wm = seed.window(-x);
  if (wp > 0) {
    FieldValue v = seed.eval_windowed(x);
    out.value += v.value;
    out.gradient += v.gradient;
  }
  if (wm > 0) {
    FieldValue v = seed.eval_windowed(-x);
    out.value += v.value;
    out.gradient += -1.0 * v.gradient;
  }
  if (background != 0.0) {
    auto sph = to_spherical(x);
    auto j0 = specfun::sph_bessel(0, sph.r);
    out.value += background * j0.value * kY00;
    if (sph.r > 1e-12) {
      out.gradient += CVec3(x * (background * j0.derivative * kY00 / sph.r));
    }
  }
  return out;
}

}  // namespace

SampleSet make_tube_samples(const SeedField& seed, double ballRadius,
                            const TubeSampleOptions& options) {
  if (seed.referenceLink.empty())
    throw ConfigError("make_tube_samples: seed has no reference link");
  SampleSet set;
  auto push_pair = [&](const Vec3& x, double w) {
    FieldValue t = fit_target(seed, options.background, x);
    set.append(x, t.value, t.gradient, w);
    FieldValue tm = fit_target(seed, options.background, -x);
    set.append(-x, tm.value, tm.gradient, w);
  };

  const double radii[2] = {0.55, 1.0};
  for (const auto& component : seed.referenceLink) {
    std::size_t n = component.size();
    if (n < 3) continue;
    // Arc-length resample to the requested count.
    std::vector<double> cum(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      cum[i + 1] = cum[i] + (component[(i + 1) % n] - component[i]).norm();
    double total = cum[n];
    for (int s = 0; s < options.alongPerComponent; ++s) {
      double target = total * s / options.alongPerComponent;
      std::size_t seg = std::upper_bound(cum.begin(), cum.end(), target) - cum.begin();
      seg = std::min(seg == 0 ? 0 : seg - 1, n - 1);
      double within = cum[seg + 1] > cum[seg]
                          ? (target - cum[seg]) / (cum[seg + 1] - cum[seg])
                          : 0.0;
      Vec3 p = component[seg] + (component[(seg + 1) % n] - component[seg]) * within;
      Vec3 tangent =
          (component[(seg + 1) % n] - component[seg]).normalized();
      Vec3 helper = std::abs(tangent.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
      Vec3 n1 = tangent.cross(helper).normalized();
      Vec3 n2 = tangent.cross(n1);
      push_pair(p, 1.0);
      for (double rho : radii) {
        for (int a = 0; a < options.around; ++a) {
          double ang = 2.0 * kPi * (a + 0.5 * (rho == radii[0])) / options.around;
          Vec3 q = p + (n1 * std::cos(ang) + n2 * std::sin(ang)) *
                           (rho * seed.tubeRadius);
          push_pair(q, 1.0);
        }
      }
    }
  }

  // Sparse interior guard points, only where both windows vanish.
  if (options.guardCount > 0 && options.guardWeight > 0) {
    std::mt19937_64 rng(options.rngSeed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    int placed = 0;
    int attempts = 0;
    while (placed < options.guardCount && attempts < 60 * options.guardCount) {
      ++attempts;
      Vec3 x{uni(rng), uni(rng), uni(rng)};
      if (x.norm2() > 1.0) continue;
      x = x * ballRadius;
      if (seed.distance_to_link(x) <= 1.15 * seed.windowOuter) continue;
      if (seed.distance_to_link(-x) <= 1.15 * seed.windowOuter) continue;
      push_pair(x, options.guardWeight);
      ++placed;
    }
  }
  return set;
}

// ---------------------------------------------------------------------------
// Coefficient fitting

namespace {

struct EvenBasis {
  int l0;
  std::vector<std::pair<int, int>> columns;  // (l, m), even l only

  explicit EvenBasis(int l0In) : l0(l0In) {
    for (int l = 0; l <= l0; l += 2)
      for (int m = -l; m <= l; ++m) columns.emplace_back(l, m);
  }
};

// Rows: one value row and three gradient rows per sample, scaled by sqrt(w);
// gradient rows additionally by the relative gradient weight.
void assemble_rows(const EvenBasis& basis, const SampleSet& samples,
                   double gradientWeight, Eigen::MatrixXcd& A, Eigen::VectorXcd& b) {
  const std::size_t ns = samples.size();
  const std::size_t nc = basis.columns.size();
  A.resize(static_cast<Eigen::Index>(4 * ns), static_cast<Eigen::Index>(nc));
  b.resize(static_cast<Eigen::Index>(4 * ns));
  for (std::size_t i = 0; i < ns; ++i) {
    const Vec3& x = samples.points[i];
    double sw = std::sqrt(samples.weights[i]);
    auto sph = to_spherical(x);
    auto bes = specfun::sph_bessel_array(basis.l0, std::max(sph.r, 1e-12));
    specfun::LegendreTable table;
    table.compute(basis.l0, sph.theta);
    SphericalFrame frame = spherical_frame(sph.theta, sph.phi);
    CVec3 er(frame.er), et(frame.etheta), ep(frame.ephi);
    double rSafe = std::max(sph.r, 1e-12);
    for (std::size_t c = 0; c < nc; ++c) {
      auto [l, m] = basis.columns[c];
      specfun::AngularValue ang = specfun::ylm_from_table(table, l, m, sph.phi);
      cplx val = bes[l].value * ang.value;
      CVec3 grad = bes[l].derivative * ang.value * er +
                   (bes[l].value / rSafe) * (ang.dTheta * et + ang.dPhiOverSin * ep);
      double gw = sw * gradientWeight;
      A(4 * i + 0, c) = sw * val;
      A(4 * i + 1, c) = gw * grad.x;
      A(4 * i + 2, c) = gw * grad.y;
      A(4 * i + 3, c) = gw * grad.z;
    }
    double gw = sw * gradientWeight;
    b(4 * i + 0) = sw * samples.values[i];
    b(4 * i + 1) = gw * samples.gradients[i].x;
    b(4 * i + 2) = gw * samples.gradients[i].y;
    b(4 * i + 3) = gw * samples.gradients[i].z;
  }
}

FitResult solve_block(const EvenBasis& basis, const SampleSet& samples,
                      const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b,
                      const FitOptions& options) {
  // Column normalization: high-l Bessel columns are evanescently small at the
  // link radii, so the raw system is scaled into uselessness. Solving in the
  // normalized variables lets the expansion carry the large coefficients the
  // construction genuinely needs.
  Eigen::Index nc = A.cols();
  Eigen::VectorXd colNorm(nc);
  for (Eigen::Index c = 0; c < nc; ++c)
    colNorm(c) = std::max(A.col(c).norm(), 1e-300);
  Eigen::MatrixXcd An = A * colNorm.cwiseInverse().asDiagonal();

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(An, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double sigmaMax = sv.size() > 0 ? sv(0) : 0.0;
  double tau = options.regularization * sigmaMax;
  Eigen::VectorXcd utb = svd.matrixU().adjoint() * b;
  Eigen::VectorXcd filtered(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    double s = sv(i);
    filtered(i) = utb(i) * (s / (s * s + tau * tau));
  }
  Eigen::VectorXcd coeffs =
      colNorm.cwiseInverse().asDiagonal() * (svd.matrixV() * filtered);

  FitResult result{FourierBesselField(basis.l0), {}};
  for (std::size_t c = 0; c < basis.columns.size(); ++c) {
    auto [l, m] = basis.columns[c];
    result.field.set_coeff(l, m, coeffs(static_cast<Eigen::Index>(c)));
  }
  FitReport& rep = result.report;
  rep.l0 = basis.l0;
  rep.sigmaMax = sigmaMax;
  rep.sigmaMin = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
  rep.effectiveRank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * sigmaMax) ++rep.effectiveRank;
  rep.conditionWarning = (A.rows() < A.cols()) ||
                         rep.effectiveRank < static_cast<int>(basis.columns.size());

  Eigen::VectorXcd resid = A * coeffs - b;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double w = samples.weights[i];
    if (w <= 0) continue;
    double sw = std::sqrt(w);
    double gw = sw * options.gradientWeight;
    double rv = std::abs(resid(4 * i + 0)) / sw;
    double rg = std::sqrt(std::norm(resid(4 * i + 1)) + std::norm(resid(4 * i + 2)) +
                          std::norm(resid(4 * i + 3))) /
                gw;
    if (w >= 0.99) {
      rep.c0Residual = std::max(rep.c0Residual, rv);
      rep.gradResidual = std::max(rep.gradResidual, rg);
    } else {
      rep.guardResidual = std::max(rep.guardResidual, rv);
    }
  }
  rep.c1Residual = std::max(rep.c0Residual, rep.gradResidual);
  return result;
}

}  // namespace

FitResult fit_coefficients(const SampleSet& samples, int l0,
                           const FitOptions& options) {
  if (l0 < 0 || l0 % 2 != 0)
    throw std::domain_error("fit_coefficients: l0 must be even and nonnegative");
  if (samples.size() == 0) throw std::domain_error("fit_coefficients: empty samples");
  EvenBasis basis(l0);
  Eigen::MatrixXcd A;
  Eigen::VectorXcd b;
  assemble_rows(basis, samples, options.gradientWeight, A, b);
  return solve_block(basis, samples, A, b, options);
}

FitResult fit_coefficients(const SeedField& seed, int l0, const SampleSet& samples,
                           const FitOptions& options) {
  if (seed.referenceLink.empty())
    throw std::domain_error("fit_coefficients: seed has no reference link");
  return fit_coefficients(samples, l0, options);
}

std::vector<FitResult> fit_coefficients_sweep(const std::vector<int>& l0Values,
                                              const SampleSet& samples,
                                              const FitOptions& options) {
  if (l0Values.empty()) return {};
  int l0Max = *std::max_element(l0Values.begin(), l0Values.end());
  EvenBasis full(l0Max);
  Eigen::MatrixXcd A;
  Eigen::VectorXcd b;
  assemble_rows(full, samples, options.gradientWeight, A, b);
  std::vector<FitResult> out;
  for (int l0 : l0Values) {
    if (l0 < 0 || l0 % 2 != 0)
      throw std::domain_error("fit_coefficients_sweep: l0 must be even");
    EvenBasis basis(l0);
    Eigen::MatrixXcd block = A.leftCols(static_cast<Eigen::Index>(basis.columns.size()));
    out.push_back(solve_block(basis, samples, block, b, options));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Green's sweep

std::vector<SweepResult> greens_sweep(const PointSourceField& phi1, double ballRadius,
                                      const std::vector<Vec3>& S,
                                      const std::vector<int>& budgets,
                                      const SweepOptions& options) {
  if (budgets.empty()) throw std::domain_error("greens_sweep: no budgets");
  for (int b : budgets)
    if (b < 1) throw std::domain_error("greens_sweep: budget must be >= 1");
  if (S.empty()) throw std::domain_error("greens_sweep: empty sample set");
  double maxS = 0;
  for (const auto& s : S) maxS = std::max(maxS, s.norm());
  for (const auto& z : phi1.poles) {
    if (z.norm() <= maxS)
      throw ConfigError("greens_sweep: phi1 poles must lie outside the sample set");
  }

  // Reference values on S.
  std::vector<cplx> target(S.size());
  for (std::size_t i = 0; i < S.size(); ++i) target[i] = phi1.eval(S[i]).value;

  int maxBudget = *std::max_element(budgets.begin(), budgets.end());
  std::vector<SweepResult> best;
  double bestFinal = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
    std::mt19937_64 rng(options.rngSeed + 7919 * restart);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<Vec3> polePairs;
    polePairs.reserve(maxBudget);
    for (const auto& z : options.candidatePoles) {
      if (static_cast<int>(polePairs.size()) >= maxBudget) break;
      if (z.norm() <= ballRadius)
        throw ConfigError("greens_sweep: candidate pole inside the closed ball");
      polePairs.push_back(z);
    }
    while (static_cast<int>(polePairs.size()) < maxBudget) {
      Vec3 dir{gauss(rng), gauss(rng), gauss(rng)};
      dir = dir.normalized();
      double radius = ballRadius * options.poleRadiusFactor * (1.0 + 0.35 * uni(rng));
      polePairs.push_back(dir * radius);
    }

    Eigen::MatrixXcd A(static_cast<Eigen::Index>(S.size()), maxBudget);
    for (std::size_t i = 0; i < S.size(); ++i)
      for (int j = 0; j < maxBudget; ++j)
        A(static_cast<Eigen::Index>(i), j) =
            greens_eval(S[i], polePairs[j]) + greens_eval(S[i], -polePairs[j]);
    Eigen::VectorXcd b(static_cast<Eigen::Index>(S.size()));
    for (std::size_t i = 0; i < S.size(); ++i)
      b(static_cast<Eigen::Index>(i)) = target[i];

    std::vector<SweepResult> run;
    for (int budget : budgets) {
      Eigen::MatrixXcd block = A.leftCols(budget);
      Eigen::BDCSVD<Eigen::MatrixXcd> svd(block,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
      svd.setThreshold(1e-13);
      Eigen::VectorXcd c = svd.solve(b);
      Eigen::VectorXcd resid = block * c - b;
      double sup = 0;
      for (Eigen::Index i = 0; i < resid.size(); ++i)
        sup = std::max(sup, std::abs(resid(i)));
      SweepResult sr;
      sr.pairBudget = budget;
      sr.supError = sup;
      for (int j = 0; j < budget; ++j) sr.field.add_mirror_pair(polePairs[j], c(j));
      run.push_back(std::move(sr));
    }
    double finalErr = run.back().supError;
    if (finalErr < bestFinal) {
      bestFinal = finalErr;
      best = std::move(run);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Fourier-Bessel projection

ProjectionResult project_fourier_bessel(const ComplexField& field, int l0,
                                        double ballRadius, int radialNodes,
                                        int angularDegreeMargin) {
  if (l0 < 0) throw std::domain_error("project_fourier_bessel: negative l0");
  if (ballRadius <= 0) throw std::domain_error("project_fourier_bessel: bad radius");
  quadrature::SphereRule sphere(2 * l0 + angularDegreeMargin);
  quadrature::Rule1D radial = quadrature::gauss_legendre(radialNodes, 0.0, ballRadius);

  std::size_t nlm = static_cast<std::size_t>(l0 + 1) * (l0 + 1);
  std::vector<cplx> numerator(nlm, cplx{0, 0});
  std::vector<double> denominator(l0 + 1, 0.0);

  for (int ir = 0; ir < radialNodes; ++ir) {
    double r = radial.nodes[ir];
    double wr = radial.weights[ir] * r * r;
    auto bes = specfun::sph_bessel_array(l0, r);
    std::vector<cplx> flm(nlm, cplx{0, 0});
    for (const auto& node : sphere.nodes) {
      SphericalFrame frame = spherical_frame(node.theta, node.phi);
      Vec3 p = frame.er * r;
      cplx v = field.eval(p).value;
      specfun::LegendreTable table;
      table.compute(l0, node.theta);
      for (int l = 0; l <= l0; ++l) {
        for (int m = -l; m <= l; ++m) {
          specfun::AngularValue ang =
              specfun::ylm_from_table(table, l, m, node.phi);
          flm[static_cast<std::size_t>(l) * l + l + m] +=
              node.weight * v * std::conj(ang.value);
        }
      }
    }
    for (int l = 0; l <= l0; ++l) {
      denominator[l] += wr * bes[l].value * bes[l].value;
      for (int m = -l; m <= l; ++m) {
        numerator[static_cast<std::size_t>(l) * l + l + m] +=
            wr * bes[l].value * flm[static_cast<std::size_t>(l) * l + l + m];
      }
    }
  }

  ProjectionResult result;
  result.l0 = l0;
  result.coeffs.assign(nlm, cplx{0, 0});
  result.radialNorms.resize(l0 + 1);
  for (int l = 0; l <= l0; ++l)
    result.radialNorms[l] = std::sqrt(std::max(denominator[l], 0.0));
  double norm2 = 0;
  for (int l = 0; l <= l0; ++l) {
    for (int m = -l; m <= l; ++m) {
      std::size_t idx = static_cast<std::size_t>(l) * l + l + m;
      result.coeffs[idx] = numerator[idx] / denominator[l];
      norm2 += std::norm(result.coeffs[idx]) * denominator[l];
    }
  }
  result.fieldNorm = std::sqrt(norm2);
  for (int l = 1; l <= l0; l += 2) {
    for (int m = -l; m <= l; ++m) {
      std::size_t idx = static_cast<std::size_t>(l) * l + l + m;
      double content = std::abs(result.coeffs[idx]) * result.radialNorms[l] /
                       std::max(result.fieldNorm, 1e-300);
      result.maxOdd = std::max(result.maxOdd, content);
    }
  }
  return result;
}

ProjectionResult project_fourier_bessel(const PointSourceField& field, int l0,
                                        double ballRadius, int radialNodes,
                                        int angularDegreeMargin) {
  for (const auto& z : field.poles)
    if (z.norm() <= ballRadius)
      throw std::domain_error("project_fourier_bessel: pole inside the ball");
  return project_fourier_bessel(static_cast<const ComplexField&>(field), l0,
                                ballRadius, radialNodes, angularDegreeMargin);
}

FourierBesselField ProjectionResult::even_field(bool enforce, double tol) const {
  if (enforce && maxOdd > tol)
    throw NumericalError("ProjectionResult: odd coefficients above tolerance");
  FourierBesselField field(l0);
  for (int l = 0; l <= l0; l += 2)
    for (int m = -l; m <= l; ++m) field.set_coeff(l, m, coeff(l, m));
  return field;
}

// ---------------------------------------------------------------------------

double field_distance(const ComplexField& f, const ComplexField& g,
                      const std::vector<Vec3>& samples, int order) {
  double worst = 0;
  for (const auto& x : samples) {
    FieldValue a = f.eval(x);
    FieldValue b = g.eval(x);
    worst = std::max(worst, std::abs(a.value - b.value));
    if (order >= 1) worst = std::max(worst, (a.gradient - b.gradient).norm());
  }
  return worst;
}

}  // namespace knotosc::helmholtz
