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

#include "knotosc/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "knotosc/parallel.hpp"

namespace knotosc::nodal {

Vec3 NodalCurve::centroid() const {
  Vec3 c{0, 0, 0};
  if (vertices.empty()) return c;
  for (const auto& v : vertices) c += v;
  return c / static_cast<double>(vertices.size());
}

double NodalCurve::boundingRadius() const {
  Vec3 c = centroid();
  double r = 0;
  for (const auto& v : vertices) r = std::max(r, (v - c).norm());
  return r;
}

NodalCurve NodalCurve::mirrored() const {
  NodalCurve out = *this;
  for (auto& v : out.vertices) v = -v;
  // The intrinsic tangent grad(Re) x grad(Im) of an even field is invariant
  // under x -> -x, so the mirrored point set is traversed in reverse.
  std::reverse(out.vertices.begin(), out.vertices.end());
  std::reverse(out.margins.begin(), out.margins.end());
  return out;
}

NodalCurve NodalCurve::densified() const {
  NodalCurve out = *this;
  out.vertices.clear();
  out.margins.clear();
  std::size_t n = vertices.size();
  if (n < 2) return *this;
  std::size_t last = closed ? n : n - 1;
  for (std::size_t i = 0; i < last; ++i) {
    const Vec3& a = vertices[i];
    const Vec3& b = vertices[(i + 1) % n];
    double ma = margins.empty() ? 0.0 : margins[i];
    double mb = margins.empty() ? 0.0 : margins[(i + 1) % n];
    out.vertices.push_back(a);
    out.vertices.push_back((a + b) * 0.5);
    if (!margins.empty()) {
      out.margins.push_back(ma);
      out.margins.push_back(0.5 * (ma + mb));
    }
  }
  if (!closed) {
    out.vertices.push_back(vertices.back());
    if (!margins.empty()) out.margins.push_back(margins.back());
  }
  return out;
}

Region Region::box(const Vec3& lo, const Vec3& hi) {
  Region r;
  r.kind = Kind::Box;
  r.lo = lo;
  r.hi = hi;
  return r;
}

Region Region::ball(double radius) {
  Region r;
  r.kind = Kind::Ball;
  r.radius = radius;
  return r;
}

bool Region::contains(const Vec3& p) const {
  if (kind == Kind::Ball) return p.norm2() <= radius * radius;
  return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z &&
         p.z <= hi.z;
}

Vec3 Region::boundsLo() const {
  return kind == Kind::Ball ? Vec3{-radius, -radius, -radius} : lo;
}

Vec3 Region::boundsHi() const {
  return kind == Kind::Ball ? Vec3{radius, radius, radius} : hi;
}

double Region::diameter() const {
  return (boundsHi() - boundsLo()).norm();
}

double gradient_margin(const FieldValue& value) {
  Vec3 a = value.gradient.real();
  Vec3 b = value.gradient.imag();
  double gaa = a.dot(a), gbb = b.dot(b), gab = a.dot(b);
  double tr = gaa + gbb;
  double disc = std::sqrt(std::max(0.0, (gaa - gbb) * (gaa - gbb) + 4.0 * gab * gab));
  double lo = 0.5 * (tr - disc);
  return std::sqrt(std::max(0.0, lo));
}

TransversalityReport transversality_margin(const ComplexField& field,
                                           const NodalCurve& curve) {
  TransversalityReport report;
  report.perVertexMargin.reserve(curve.vertices.size());
  report.min = std::numeric_limits<double>::infinity();
  for (const auto& v : curve.vertices) {
    double m = gradient_margin(field.eval(v));
    report.perVertexMargin.push_back(m);
    report.min = std::min(report.min, m);
  }
  if (curve.vertices.empty()) report.min = 0;
  return report;
}

namespace {

struct SpatialHash {
  double cell;
  std::unordered_map<long long, std::vector<Vec3>> buckets;

  explicit SpatialHash(double cellSize) : cell(cellSize) {}

  static long long key(long long i, long long j, long long k) {
    return ((i * 73856093LL) ^ (j * 19349663LL) ^ (k * 83492791LL));
  }

  void insert(const Vec3& p) {
    auto idx = [&](double v) { return static_cast<long long>(std::floor(v / cell)); };
    buckets[key(idx(p.x), idx(p.y), idx(p.z))].push_back(p);
  }

  bool near(const Vec3& p, double dist) const {
    auto idx = [&](double v) { return static_cast<long long>(std::floor(v / cell)); };
    long long i0 = idx(p.x), j0 = idx(p.y), k0 = idx(p.z);
    double d2 = dist * dist;
    for (long long i = i0 - 1; i <= i0 + 1; ++i)
      for (long long j = j0 - 1; j <= j0 + 1; ++j)
        for (long long k = k0 - 1; k <= k0 + 1; ++k) {
          auto it = buckets.find(key(i, j, k));
          if (it == buckets.end()) continue;
          for (const auto& q : it->second)
            if ((p - q).norm2() <= d2) return true;
        }
    return false;
  }
};

// One least-norm Newton step for the underdetermined system
// (Re psi, Im psi) = 0: step = -J^T (J J^T)^{-1} F.
bool newton_step(const FieldValue& fv, Vec3& step) {
  Vec3 a = fv.gradient.real();
  Vec3 b = fv.gradient.imag();
  double gaa = a.dot(a), gbb = b.dot(b), gab = a.dot(b);
  double det = gaa * gbb - gab * gab;
  double scale = std::max(gaa, gbb);
  if (!(det > 1e-14 * scale * scale) || scale <= 0) return false;
  double fr = fv.value.real(), fi = fv.value.imag();
  double u = (gbb * fr - gab * fi) / det;
  double v = (gaa * fi - gab * fr) / det;
  step = -(a * u + b * v);
  return true;
}

bool refine_to_zero(const ComplexField& field, Vec3& x, double valueTol,
                    double maxStep, double maxDrift, int maxIters, FieldValue* out) {
  Vec3 origin = x;
  FieldValue fv = field.eval(x);
  for (int it = 0; it < maxIters; ++it) {
    if (std::abs(fv.value) <= valueTol) {
      if (out) *out = fv;
      return true;
    }
    Vec3 step;
    if (!newton_step(fv, step)) return false;
    double len = step.norm();
    if (len > maxStep) step = step * (maxStep / len);
    x += step;
    if ((x - origin).norm() > maxDrift) return false;
    fv = field.eval(x);
  }
  if (std::abs(fv.value) <= valueTol) {
    if (out) *out = fv;
    return true;
  }
  return false;
}

Vec3 tangent_of(const FieldValue& fv) {
  return fv.gradient.real().cross(fv.gradient.imag());
}

}  // namespace

ExtractionResult extract_nodal_curves(const ComplexField& field, const Region& region,
                                      const ExtractionOptions& options) {
  ExtractionResult result;
  ExtractionStats& stats = result.stats;
  const int res = std::max(options.gridRes, 16);
  const Vec3 lo = region.boundsLo();
  const Vec3 hi = region.boundsHi();
  const Vec3 span = hi - lo;
  const int n = res + 1;

  // Corner pass: values for sign scanning, gradient norms for the tolerance
  // scales.
  std::vector<cplx> values(static_cast<std::size_t>(n) * n * n);
  std::vector<double> gradNorms(values.size());
  std::vector<char> inside(values.size());
  auto at = [&](int i, int j, int k) -> std::size_t {
    return (static_cast<std::size_t>(i) * n + j) * n + k;
  };
  auto point = [&](int i, int j, int k) {
    return Vec3{lo.x + span.x * i / res, lo.y + span.y * j / res,
                lo.z + span.z * k / res};
  };
  parallel_for(
      values.size(),
      [&](std::size_t idx) {
        int i = static_cast<int>(idx / (static_cast<std::size_t>(n) * n));
        int j = static_cast<int>((idx / n) % n);
        int k = static_cast<int>(idx % n);
        Vec3 p = point(i, j, k);
        FieldValue fv = field.eval(p);
        values[idx] = fv.value;
        gradNorms[idx] = fv.gradient.norm();
        inside[idx] = region.contains(p) ? 1 : 0;
      },
      options.threads);

  double sup = 0;
  std::vector<double> gradSample;
  gradSample.reserve(values.size() / 16);
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    if (!inside[idx]) continue;
    sup = std::max(sup, std::abs(values[idx]));
    if (idx % 7 == 0) gradSample.push_back(gradNorms[idx]);
  }
  if (gradSample.empty()) gradSample.push_back(0.0);
  std::nth_element(gradSample.begin(), gradSample.begin() + gradSample.size() / 2,
                   gradSample.end());
  stats.fieldSup = sup;
  stats.medianGradient = gradSample[gradSample.size() / 2];
  stats.valueTol = options.valueTolFactor * std::max(sup, 1e-300);
  stats.degeneracyTol = options.degeneracyTolFactor * stats.medianGradient;
  const double h = options.step > 0 ? options.step : region.diameter() / (4.0 * res);
  stats.step = h;
  const double cellDiag =
      Vec3{span.x / res, span.y / res, span.z / res}.norm();

  // Candidate cells: both Re and Im change sign among the 8 corners.
  std::vector<Vec3> seeds;
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      for (int k = 0; k < res; ++k) {
        double reMin = 1e300, reMax = -1e300, imMin = 1e300, imMax = -1e300;
        bool anyInside = false;
        for (int c = 0; c < 8; ++c) {
          std::size_t idx = at(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
          anyInside = anyInside || inside[idx];
          cplx v = values[idx];
          reMin = std::min(reMin, v.real());
          reMax = std::max(reMax, v.real());
          imMin = std::min(imMin, v.imag());
          imMax = std::max(imMax, v.imag());
        }
        if (!anyInside) continue;
        if (reMin <= 0 && reMax >= 0 && imMin <= 0 && imMax >= 0) {
          ++stats.candidateCells;
          Vec3 center = point(i, j, k) +
                        Vec3{span.x / res, span.y / res, span.z / res} * 0.5;
          seeds.push_back(center);
        }
      }
    }
  }

  // Refine seeds onto the zero set.
  std::vector<Vec3> refined(seeds.size());
  std::vector<char> ok(seeds.size(), 0);
  parallel_for(
      seeds.size(),
      [&](std::size_t s) {
        Vec3 x = seeds[s];
        FieldValue fv;
        if (refine_to_zero(field, x, 0.5 * stats.valueTol, cellDiag, 2.0 * cellDiag,
                           options.maxNewtonIters, &fv) &&
            region.contains(x) && gradient_margin(fv) > stats.degeneracyTol) {
          refined[s] = x;
          ok[s] = 1;
        }
      },
      options.threads);

  std::vector<Vec3> goodSeeds;
  for (std::size_t s = 0; s < seeds.size(); ++s)
    if (ok[s]) goodSeeds.push_back(refined[s]);
  stats.seedsConverged = static_cast<int>(goodSeeds.size());

  // Trace curves, consuming seeds as they are passed.
  std::vector<char> consumed(goodSeeds.size(), 0);
  std::unordered_map<long long, std::vector<int>> seedBuckets;
  {
    auto idx = [&](double v) { return static_cast<long long>(std::floor(v / h)); };
    for (std::size_t s = 0; s < goodSeeds.size(); ++s) {
      const Vec3& p = goodSeeds[s];
      seedBuckets[SpatialHash::key(idx(p.x), idx(p.y), idx(p.z))].push_back(
          static_cast<int>(s));
    }
  }
  auto consume_near = [&](const Vec3& p) {
    auto idx = [&](double v) { return static_cast<long long>(std::floor(v / h)); };
    long long i0 = idx(p.x), j0 = idx(p.y), k0 = idx(p.z);
    for (long long i = i0 - 1; i <= i0 + 1; ++i)
      for (long long j = j0 - 1; j <= j0 + 1; ++j)
        for (long long k = k0 - 1; k <= k0 + 1; ++k) {
          auto it = seedBuckets.find(SpatialHash::key(i, j, k));
          if (it == seedBuckets.end()) continue;
          for (int s : it->second)
            if (!consumed[s] && (goodSeeds[s] - p).norm2() <= h * h) consumed[s] = 1;
        }
  };

  auto advance = [&](Vec3 x, std::vector<Vec3>& pts, std::vector<double>& margins,
                     bool forward, const Vec3& closeTarget,
                     bool* closedOut) -> bool {
    // March from x; returns false when the trace hit a degeneracy.
    *closedOut = false;
    FieldValue fv = field.eval(x);
    Vec3 t = tangent_of(fv).normalized();
    if (!forward) t = -t;
    Vec3 cur = x;
    double traveled = 0;
    for (int step = 0; step < options.maxTraceSteps; ++step) {
      double hLoc = h;
      bool moved = false;
      for (int attempt = 0; attempt < 3; ++attempt) {
        Vec3 cand = cur + t * hLoc;
        FieldValue cfv;
        Vec3 refinedPt = cand;
        if (refine_to_zero(field, refinedPt, 0.5 * stats.valueTol, 0.6 * hLoc,
                           1.2 * hLoc, 12, &cfv)) {
          Vec3 tNew = tangent_of(cfv).normalized();
          if (!forward) tNew = -tNew;
          double margin = gradient_margin(cfv);
          if (margin <= stats.degeneracyTol || tNew.dot(t) < 0.2) {
            return false;  // degenerate or folding back
          }
          cur = refinedPt;
          t = tNew;
          pts.push_back(cur);
          margins.push_back(margin);
          consume_near(cur);
          traveled += hLoc;
          moved = true;
          break;
        }
        hLoc *= 0.5;
      }
      if (!moved) return false;
      if (!region.contains(cur)) return true;  // open end at the boundary
      // Closure endgame against the given target point.
      double dClose = (cur - closeTarget).norm();
      if (traveled > 3.0 * h) {
        if (dClose < 0.5 * h) {
          *closedOut = true;
          return true;
        }
        if (dClose < 1.45 * h &&
            t.dot((closeTarget - cur).normalized()) > 0.3) {
          // One shortened step to land on the target.
          Vec3 cand = cur + t * dClose;
          FieldValue cfv;
          if (refine_to_zero(field, cand, 0.5 * stats.valueTol, 0.6 * h, 1.2 * h,
                             12, &cfv) &&
              (cand - closeTarget).norm() < 0.5 * h) {
            if ((cand - cur).norm() >= 0.3 * h) {
              pts.push_back(cand);
              margins.push_back(gradient_margin(cfv));
              consume_near(cand);
            }
            *closedOut = true;
            return true;
          }
        }
      }
    }
    return true;  // step budget exhausted; treated as open
  };

  std::vector<NodalCurve> curves;
  for (std::size_t s = 0; s < goodSeeds.size(); ++s) {
    if (consumed[s]) continue;
    consumed[s] = 1;
    Vec3 start = goodSeeds[s];
    FieldValue fv0 = field.eval(start);
    double margin0 = gradient_margin(fv0);
    if (margin0 <= stats.degeneracyTol) continue;

    NodalCurve curve;
    curve.vertices.push_back(start);
    curve.margins.push_back(margin0);
    consume_near(start);

    std::vector<Vec3> fwd, bwd;
    std::vector<double> fwdM, bwdM;
    bool closed = false;
    bool degenerate = !advance(start, fwd, fwdM, true, start, &closed);
    if (!closed && !degenerate) {
      bool closedBack = false;
      degenerate = !advance(start, bwd, bwdM, false,
                            fwd.empty() ? start : fwd.back(), &closedBack);
      closed = closedBack && !fwd.empty();
      if (closedBack && !fwd.empty() && !bwd.empty() &&
          (bwd.back() - fwd.back()).norm() < 0.25 * h) {
        // Backward march landed on the forward end: drop the duplicate.
        bwd.pop_back();
        bwdM.pop_back();
      }
    }
    for (std::size_t i = bwd.size(); i-- > 0;) {
      curve.vertices.insert(curve.vertices.begin(), bwd[i]);
      curve.margins.insert(curve.margins.begin(), bwdM[i]);
    }
    curve.vertices.insert(curve.vertices.end(), fwd.begin(), fwd.end());
    curve.margins.insert(curve.margins.end(), fwdM.begin(), fwdM.end());
    curve.closed = closed;
    curve.degenerate = degenerate;

    if (static_cast<int>(curve.vertices.size()) < options.minVertices) {
      ++stats.discardedShort;
      continue;
    }
    curve.minMargin = *std::min_element(curve.margins.begin(), curve.margins.end());
    double len = 0;
    for (std::size_t i = 0; i + 1 < curve.vertices.size(); ++i)
      len += (curve.vertices[i + 1] - curve.vertices[i]).norm();
    if (curve.closed) len += (curve.vertices.front() - curve.vertices.back()).norm();
    curve.arcLength = len;
    curves.push_back(std::move(curve));
    ++stats.curvesTraced;
  }

  // Duplicate suppression: spatial hashing of vertex sets at resolution h.
  std::sort(curves.begin(), curves.end(), [](const NodalCurve& a, const NodalCurve& b) {
    return a.arcLength > b.arcLength;
  });
  std::vector<NodalCurve> unique;
  SpatialHash vertexHash(h);
  for (auto& c : curves) {
    int nearCount = 0;
    for (const auto& v : c.vertices)
      if (vertexHash.near(v, h)) ++nearCount;
    if (!c.vertices.empty() &&
        nearCount > static_cast<int>(0.6 * c.vertices.size())) {
      ++stats.duplicatesMerged;
      continue;
    }
    for (const auto& v : c.vertices) vertexHash.insert(v);
    unique.push_back(std::move(c));
  }
  result.curves = std::move(unique);
  return result;
}

}  // namespace knotosc::nodal
