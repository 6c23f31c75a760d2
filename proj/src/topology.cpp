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

#include "knotosc/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "knotosc/errors.hpp"

namespace knotosc::topology {

namespace {
constexpr double kPi = 3.14159265358979323846;

double cross2(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

// Signed solid angle of the geodesic triangle (a, b, c) seen from the origin.
double triangle_solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  double la = a.norm(), lb = b.norm(), lc = c.norm();
  double num = a.dot(b.cross(c));
  double den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
  return 2.0 * std::atan2(num, den);
}

}  // namespace

double gauss_linking(const NodalCurve& c1, const NodalCurve& c2) {
  const auto& P = c1.vertices;
  const auto& Q = c2.vertices;
  const std::size_t n = P.size(), m = Q.size();
  if (n < 3 || m < 3) throw std::domain_error("gauss_linking: degenerate curve");
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& p1 = P[i];
    const Vec3& p2 = P[(i + 1) % n];
    double rowSum = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const Vec3& q1 = Q[j];
      const Vec3& q2 = Q[(j + 1) % m];
      Vec3 n00 = p1 - q1;
      Vec3 n10 = p2 - q1;
      Vec3 n11 = p2 - q2;
      Vec3 n01 = p1 - q2;
      // Signed spherical area of the quadrilateral traced by the direction
      // map; corner order fixed so the sign matches the Gauss integral
      // det(dg1, dg2, g1 - g2)/|g1 - g2|^3.
      rowSum += triangle_solid_angle(n00, n01, n11) +
                triangle_solid_angle(n00, n11, n10);
    }
    total += rowSum;
  }
  return total / (4.0 * kPi);
}

// ---------------------------------------------------------------------------
// Generic projection

long long CrossingDiagram::inter_sign_sum(int curveA, int curveB) const {
  long long sum = 0;
  for (const auto& c : crossings) {
    if ((c.curveA == curveA && c.curveB == curveB) ||
        (c.curveA == curveB && c.curveB == curveA))
      sum += c.sign;
  }
  return sum;
}

std::string CrossingDiagram::gauss_code() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < passes.size(); ++k) {
    if (k) os << " | ";
    for (std::size_t i = 0; i < passes[k].size(); ++i) {
      const Pass& p = passes[k][i];
      if (i) os << ' ';
      os << (p.over ? 'O' : 'U') << (p.crossing + 1) << (p.sign > 0 ? '+' : '-');
    }
  }
  return os.str();
}

CrossingDiagram project_to_diagram(const std::vector<const NodalCurve*>& curves,
                                   std::uint64_t rngSeed, int maxAttempts) {
  for (const auto* c : curves) {
    if (!c->closed || c->vertices.size() < 3)
      throw std::domain_error("project_to_diagram: curves must be closed polylines");
  }
  std::mt19937_64 rng(rngSeed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (int attempt = 0; attempt < maxAttempts; ++attempt) {
    Vec3 dir{gauss(rng), gauss(rng), gauss(rng)};
    if (dir.norm() < 1e-8) continue;
    dir = dir.normalized();
    Vec3 helper = std::abs(dir.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    Vec3 e1 = dir.cross(helper).normalized();
    Vec3 e2 = dir.cross(e1);  // e1 x e2 = dir

    // Project.
    std::vector<std::vector<double>> px(curves.size()), py(curves.size()),
        depth(curves.size());
    double extent = 0;
    for (std::size_t k = 0; k < curves.size(); ++k) {
      const auto& V = curves[k]->vertices;
      px[k].resize(V.size());
      py[k].resize(V.size());
      depth[k].resize(V.size());
      for (std::size_t i = 0; i < V.size(); ++i) {
        px[k][i] = V[i].dot(e1);
        py[k][i] = V[i].dot(e2);
        depth[k][i] = V[i].dot(dir);
        extent = std::max({extent, std::abs(px[k][i]), std::abs(py[k][i])});
      }
    }
    const double paramSlack = 1e-6;
    const double depthTol = 1e-7 * std::max(extent, 1e-12);
    const double sepTol = 1e-6 * std::max(extent, 1e-12);
    const double angleTol = 5e-4;

    CrossingDiagram diagram;
    diagram.projectionDir = dir;
    diagram.passes.assign(curves.size(), {});
    bool generic = true;

    for (std::size_t ka = 0; ka < curves.size() && generic; ++ka) {
      std::size_t na = curves[ka]->vertices.size();
      for (std::size_t kb = ka; kb < curves.size() && generic; ++kb) {
        std::size_t nb = curves[kb]->vertices.size();
        for (std::size_t i = 0; i < na && generic; ++i) {
          std::size_t jStart = (ka == kb) ? i + 2 : 0;
          for (std::size_t j = jStart; j < nb && generic; ++j) {
            if (ka == kb && i == 0 && j == na - 1) continue;  // adjacent wrap
            double ax = px[ka][i], ay = py[ka][i];
            double bx = px[ka][(i + 1) % na], by = py[ka][(i + 1) % na];
            double cx = px[kb][j], cy = py[kb][j];
            double dx = px[kb][(j + 1) % nb], dy = py[kb][(j + 1) % nb];
            double ux = bx - ax, uy = by - ay;
            double vx = dx - cx, vy = dy - cy;
            double den = cross2(ux, uy, vx, vy);
            double lu = std::hypot(ux, uy), lv = std::hypot(vx, vy);
            if (lu < 1e-15 || lv < 1e-15) continue;
            double wx = cx - ax, wy = cy - ay;
            if (std::abs(den) <= angleTol * lu * lv) {
              // Near-parallel: only a problem if the segments come close.
              double t0 = std::clamp((wx * ux + wy * uy) / (lu * lu), 0.0, 1.0);
              double gapx = ax + t0 * ux - cx, gapy = ay + t0 * uy - cy;
              double s0 = std::clamp((gapx * vx + gapy * vy) / (lv * lv), 0.0, 1.0);
              double ddx = ax + t0 * ux - (cx + s0 * vx);
              double ddy = ay + t0 * uy - (cy + s0 * vy);
              if (std::hypot(ddx, ddy) < sepTol) generic = false;
              continue;
            }
            double t = cross2(wx, wy, vx, vy) / den;
            double s = cross2(wx, wy, ux, uy) / den;
            if (t < -paramSlack || t > 1 + paramSlack || s < -paramSlack ||
                s > 1 + paramSlack)
              continue;
            if (t < paramSlack || t > 1 - paramSlack || s < paramSlack ||
                s > 1 - paramSlack) {
              generic = false;  // crossing at a polyline vertex
              continue;
            }
            double da = depth[ka][i] + t * (depth[ka][(i + 1) % na] - depth[ka][i]);
            double db = depth[kb][j] + s * (depth[kb][(j + 1) % nb] - depth[kb][j]);
            if (std::abs(da - db) < depthTol) {
              generic = false;
              continue;
            }
            CrossingDiagram::Crossing cr;
            cr.curveA = static_cast<int>(ka);
            cr.segA = static_cast<int>(i);
            cr.tA = t;
            cr.curveB = static_cast<int>(kb);
            cr.segB = static_cast<int>(j);
            cr.tB = s;
            cr.px = ax + t * ux;
            cr.py = ay + t * uy;
            cr.depthA = da;
            cr.depthB = db;
            cr.aOver = da > db;
            double ox, oy, qx, qy;
            if (cr.aOver) {
              ox = ux; oy = uy; qx = vx; qy = vy;
            } else {
              ox = vx; oy = vy; qx = ux; qy = uy;
            }
            cr.sign = cross2(ox, oy, qx, qy) > 0 ? 1 : -1;
            diagram.crossings.push_back(cr);
          }
        }
      }
    }
    if (!generic) continue;

    // Crossing separation guards against tangencies and triple points.
    bool separated = true;
    for (std::size_t i = 0; i < diagram.crossings.size() && separated; ++i)
      for (std::size_t j = i + 1; j < diagram.crossings.size() && separated; ++j) {
        double d = std::hypot(diagram.crossings[i].px - diagram.crossings[j].px,
                              diagram.crossings[i].py - diagram.crossings[j].py);
        if (d < sepTol) separated = false;
      }
    if (!separated) continue;

    for (std::size_t c = 0; c < diagram.crossings.size(); ++c) {
      const auto& cr = diagram.crossings[c];
      diagram.passes[cr.curveA].push_back(
          {static_cast<int>(c), cr.aOver, cr.sign, cr.segA + cr.tA});
      diagram.passes[cr.curveB].push_back(
          {static_cast<int>(c), !cr.aOver, cr.sign, cr.segB + cr.tB});
    }
    for (auto& list : diagram.passes)
      std::sort(list.begin(), list.end(),
                [](const CrossingDiagram::Pass& a, const CrossingDiagram::Pass& b) {
                  return a.position < b.position;
                });
    return diagram;
  }
  throw NumericalError(
      "project_to_diagram: no generic direction found; densify the curves");
}

// ---------------------------------------------------------------------------
// Linking numbers

long long crossing_linking(const NodalCurve& c1, const NodalCurve& c2,
                           std::uint64_t rngSeed) {
  std::vector<const NodalCurve*> pair{&c1, &c2};
  CrossingDiagram diagram = project_to_diagram(pair, rngSeed);
  long long sum = diagram.inter_sign_sum(0, 1);
  if (sum % 2 != 0)
    throw NumericalError("crossing_linking: odd signed crossing sum");
  return sum / 2;
}

long long linking_number(const NodalCurve& c1, const NodalCurve& c2,
                         std::uint64_t rngSeed) {
  double g = gauss_linking(c1, c2);
  long long rounded = std::llround(g);
  if (std::abs(g - rounded) > 0.05)
    throw NumericalError("linking_number: Gauss sum is not near an integer");
  long long byCrossings = crossing_linking(c1, c2, rngSeed);
  if (byCrossings != rounded)
    throw NumericalError("linking_number: Gauss sum and crossing count disagree");
  return rounded;
}

// ---------------------------------------------------------------------------
// Faces, checkerboard coloring, Goeritz matrix

namespace {

struct PlanarMap {
  // One dart per arc end; darts at each vertex sorted counterclockwise.
  struct Dart {
    int vertex = 0;
    int arc = 0;
    double angle = 0;
    int alpha = 0;     // opposite dart of the same arc
    int faceId = -1;
  };
  std::vector<Dart> darts;
  std::vector<std::vector<int>> vertexDarts;  // sorted ccw per vertex
  int faceCount = 0;

  // quadrant i at vertex v = wedge from ray i counterclockwise to ray i+1;
  // it is the face on the left of the dart on ray i.
  int quadrantFace(int vertex, int rayIndex) const {
    return darts[vertexDarts[vertex][rayIndex]].faceId;
  }
};

// Builds the 4-valent universe map of a diagram (over/under ignored).
PlanarMap build_map(const CrossingDiagram& diagram,
                    const std::vector<const NodalCurve*>& curves,
                    const Vec3& e1, const Vec3& e2) {
  PlanarMap map;
  const int C = diagram.crossing_count();
  map.vertexDarts.assign(C, {});

  // 2D segment direction of the strand through a crossing.
  auto strand_dir = [&](int curve, int seg) {
    const auto& V = curves[curve]->vertices;
    Vec3 d = V[(seg + 1) % V.size()] - V[seg];
    double x = d.dot(e1), y = d.dot(e2);
    double n = std::hypot(x, y);
    return std::pair<double, double>{x / n, y / n};
  };

  for (std::size_t k = 0; k < diagram.passes.size(); ++k) {
    const auto& list = diagram.passes[k];
    const std::size_t M = list.size();
    for (std::size_t i = 0; i < M; ++i) {
      const auto& from = list[i];
      const auto& to = list[(i + 1) % M];
      // Arc from "exit of from.crossing" to "entry of to.crossing".
      const auto& crFrom = diagram.crossings[from.crossing];
      const auto& crTo = diagram.crossings[to.crossing];
      bool fromIsA = crFrom.curveA == static_cast<int>(k) &&
                     std::abs(crFrom.segA + crFrom.tA - from.position) < 1e-12;
      bool toIsA = crTo.curveA == static_cast<int>(k) &&
                   std::abs(crTo.segA + crTo.tA - to.position) < 1e-12;
      auto [ux0, uy0] =
          strand_dir(static_cast<int>(k), fromIsA ? crFrom.segA : crFrom.segB);
      auto [ux1, uy1] =
          strand_dir(static_cast<int>(k), toIsA ? crTo.segA : crTo.segB);
      int arc = static_cast<int>(map.darts.size() / 2);
      PlanarMap::Dart exitDart;
      exitDart.vertex = from.crossing;
      exitDart.arc = arc;
      exitDart.angle = std::atan2(uy0, ux0);
      PlanarMap::Dart entryDart;
      entryDart.vertex = to.crossing;
      entryDart.arc = arc;
      entryDart.angle = std::atan2(-uy1, -ux1);
      int id0 = static_cast<int>(map.darts.size());
      exitDart.alpha = id0 + 1;
      entryDart.alpha = id0;
      map.darts.push_back(exitDart);
      map.darts.push_back(entryDart);
      map.vertexDarts[from.crossing].push_back(id0);
      map.vertexDarts[to.crossing].push_back(id0 + 1);
    }
  }

  for (auto& list : map.vertexDarts) {
    std::sort(list.begin(), list.end(), [&](int a, int b) {
      return map.darts[a].angle < map.darts[b].angle;
    });
    if (list.size() != 4)
      throw NumericalError("build_map: crossing does not have four arc ends");
  }

  // rayIndex per dart for sigma^{-1} lookups.
  std::vector<int> rayIndex(map.darts.size());
  for (int v = 0; v < C; ++v)
    for (int i = 0; i < 4; ++i) rayIndex[map.vertexDarts[v][i]] = i;

  // Faces: orbits of next(d) = cw-next ray after alpha(d) (face on the left).
  int face = 0;
  for (std::size_t d0 = 0; d0 < map.darts.size(); ++d0) {
    if (map.darts[d0].faceId >= 0) continue;
    int d = static_cast<int>(d0);
    std::size_t guard = 0;
    while (map.darts[d].faceId < 0) {
      map.darts[d].faceId = face;
      int a = map.darts[d].alpha;
      int v = map.darts[a].vertex;
      int i = rayIndex[a];
      d = map.vertexDarts[v][(i + 3) % 4];
      if (++guard > map.darts.size())
        throw NumericalError("build_map: face walk failed to close");
    }
    ++face;
  }
  map.faceCount = face;
  // Euler check for a connected universe: F = C + 2.
  return map;
}

long long det_mod_prime(std::vector<std::vector<long long>> m, long long p) {
  int n = static_cast<int>(m.size());
  for (auto& row : m)
    for (auto& v : row) v = ((v % p) + p) % p;
  auto powmod = [&](long long b, long long e) {
    long long r = 1 % p;
    b %= p;
    while (e) {
      if (e & 1) r = (__int128)r * b % p;
      b = (__int128)b * b % p;
      e >>= 1;
    }
    return r;
  };
  long long det = 1;
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r)
      if (m[r][col] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) return 0;
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = p - det;
    }
    det = (__int128)det * m[col][col] % p;
    long long inv = powmod(m[col][col], p - 2);
    for (int r = col + 1; r < n; ++r) {
      if (m[r][col] == 0) continue;
      long long f = (__int128)m[r][col] * inv % p;
      for (int c = col; c < n; ++c)
        m[r][c] = (m[r][c] - (__int128)f * m[col][c]) % p;
    }
  }
  return ((det % p) + p) % p;
}

long long integer_det_abs(const std::vector<std::vector<long long>>& m) {
  if (m.empty()) return 1;
  const long long p1 = 2147483647LL;          // 2^31 - 1
  const long long p2 = 2305843009213693951LL; // 2^61 - 1
  long long d1 = det_mod_prime(m, p1);
  long long d2 = det_mod_prime(m, p2);
  auto symmetric = [](long long d, long long p) {
    return d > p / 2 ? d - p : d;
  };
  long long s1 = symmetric(d1, p1);
  long long s2 = symmetric(d2, p2);
  if (s1 != s2)
    throw NumericalError("integer_det_abs: determinant exceeds the residue range");
  return std::llabs(s1);
}

long long goeritz_determinant(const CrossingDiagram& diagram,
                              const std::vector<const NodalCurve*>& curves) {
  if (diagram.crossing_count() == 0) return 1;
  Vec3 dir = diagram.projectionDir;
  Vec3 helper = std::abs(dir.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  Vec3 e1 = dir.cross(helper).normalized();
  Vec3 e2 = dir.cross(e1);
  PlanarMap map = build_map(diagram, curves, e1, e2);
  if (map.faceCount != diagram.crossing_count() + 2)
    throw NumericalError("goeritz_determinant: face count violates Euler formula");

  // Checkerboard coloring by BFS over face adjacency across arcs.
  std::vector<int> color(map.faceCount, -1);
  std::vector<int> stack;
  color[map.darts[0].faceId] = 0;
  stack.push_back(map.darts[0].faceId);
  std::vector<std::vector<int>> adj(map.faceCount);
  for (std::size_t d = 0; d < map.darts.size(); d += 2) {
    int f1 = map.darts[d].faceId;
    int f2 = map.darts[d + 1].faceId;
    adj[f1].push_back(f2);
    adj[f2].push_back(f1);
  }
  while (!stack.empty()) {
    int f = stack.back();
    stack.pop_back();
    for (int g : adj[f]) {
      if (color[g] < 0) {
        color[g] = 1 - color[f];
        stack.push_back(g);
      } else if (color[g] == color[f]) {
        throw NumericalError("goeritz_determinant: diagram is not checkerboard-colorable");
      }
    }
  }

  int count0 = 0;
  for (int f = 0; f < map.faceCount; ++f)
    if (color[f] == 0) ++count0;
  int white = (2 * count0 <= map.faceCount) ? 0 : 1;

  std::vector<int> whiteIndex(map.faceCount, -1);
  int nWhite = 0;
  for (int f = 0; f < map.faceCount; ++f)
    if (color[f] == white) whiteIndex[f] = nWhite++;

  std::vector<std::vector<long long>> G(nWhite, std::vector<long long>(nWhite, 0));
  auto strand_dir2 = [&](int curve, int seg) {
    const auto& V = curves[curve]->vertices;
    Vec3 d = V[(seg + 1) % V.size()] - V[seg];
    return std::pair<double, double>{d.dot(e1), d.dot(e2)};
  };
  for (int c = 0; c < diagram.crossing_count(); ++c) {
    const auto& cr = diagram.crossings[c];
    auto [uox, uoy] = cr.aOver ? strand_dir2(cr.curveA, cr.segA)
                               : strand_dir2(cr.curveB, cr.segB);
    double overAngle = std::atan2(uoy, uox);
    // Locate the over ray among the four sorted rays.
    int overRay = -1;
    const auto& rays = map.vertexDarts[c];
    for (int i = 0; i < 4; ++i) {
      double a = map.darts[rays[i]].angle;
      double diff = std::remainder(a - overAngle, 2.0 * kPi);
      if (std::abs(diff) < 1e-9) {
        overRay = i;
        break;
      }
    }
    if (overRay < 0)
      throw NumericalError("goeritz_determinant: over strand ray not found");
    // Rotating the over-line ccw onto the under-line sweeps quadrants
    // {overRay, overRay+2}; eta is +1 when that pair is shaded.
    int fSwept = map.quadrantFace(c, overRay);
    int fSwept2 = map.quadrantFace(c, (overRay + 2) % 4);
    int fOther = map.quadrantFace(c, (overRay + 1) % 4);
    int fOther2 = map.quadrantFace(c, (overRay + 3) % 4);
    if (color[fSwept] != color[fSwept2] || color[fOther] != color[fOther2])
      throw NumericalError("goeritz_determinant: inconsistent quadrant coloring");
    int eta = (color[fSwept] != white) ? 1 : -1;
    int w1, w2;
    if (color[fSwept] == white) {
      w1 = whiteIndex[fSwept];
      w2 = whiteIndex[fSwept2];
    } else {
      w1 = whiteIndex[fOther];
      w2 = whiteIndex[fOther2];
    }
    if (w1 != w2) {
      G[w1][w2] -= eta;
      G[w2][w1] -= eta;
    }
  }
  for (int i = 0; i < nWhite; ++i) {
    long long rowSum = 0;
    for (int j = 0; j < nWhite; ++j)
      if (j != i) rowSum += G[i][j];
    G[i][i] = -rowSum;
  }
  // Reduced matrix: drop the last white face.
  std::vector<std::vector<long long>> reduced(nWhite - 1,
                                              std::vector<long long>(nWhite - 1));
  for (int i = 0; i + 1 < nWhite; ++i)
    for (int j = 0; j + 1 < nWhite; ++j) reduced[i][j] = G[i][j];
  return integer_det_abs(reduced);
}

}  // namespace

long long knot_determinant(const NodalCurve& curve, std::uint64_t rngSeed) {
  if (!curve.closed) throw std::domain_error("knot_determinant: curve must be closed");
  std::vector<const NodalCurve*> one{&curve};
  CrossingDiagram diagram = project_to_diagram(one, rngSeed);
  return goeritz_determinant(diagram, one);
}

long long torus_knot_determinant(int p, int q) {
  if (p < 1 || q < 1 || std::gcd(p, q) != 1)
    throw std::domain_error("torus_knot_determinant: need coprime positive p, q");
  // Alexander polynomial (t^{pq} - 1)(t - 1) / ((t^p - 1)(t^q - 1)) at t = -1,
  // by exact integer polynomial division.
  auto mul = [](const std::vector<long long>& a, const std::vector<long long>& b) {
    std::vector<long long> out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
  };
  auto cyc = [](int n) {  // t^n - 1
    std::vector<long long> c(n + 1, 0);
    c[0] = -1;
    c[n] = 1;
    return c;
  };
  auto divExact = [](std::vector<long long> num, const std::vector<long long>& den) {
    std::vector<long long> out(num.size() - den.size() + 1, 0);
    for (int i = static_cast<int>(out.size()) - 1; i >= 0; --i) {
      long long f = num[i + den.size() - 1] / den.back();
      out[i] = f;
      for (std::size_t j = 0; j < den.size(); ++j) num[i + j] -= f * den[j];
    }
    for (long long v : num)
      if (v != 0) throw NumericalError("torus_knot_determinant: inexact division");
    return out;
  };
  std::vector<long long> num = mul(cyc(p * q), cyc(1));
  std::vector<long long> alex = divExact(divExact(num, cyc(p)), cyc(q));
  long long value = 0, sign = 1;
  for (std::size_t i = 0; i < alex.size(); ++i) {
    value += sign * alex[i];
    sign = -sign;
  }
  return std::llabs(value);
}

// ---------------------------------------------------------------------------
// Classification

namespace {

double hausdorff(const std::vector<Vec3>& A, const std::vector<Vec3>& B) {
  auto directed = [](const std::vector<Vec3>& X, const std::vector<Vec3>& Y) {
    double worst = 0;
    for (const auto& x : X) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : Y) best = std::min(best, (x - y).norm2());
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(directed(A, B), directed(B, A));
}

double median_spacing(const NodalCurve& c) {
  std::vector<double> d;
  for (std::size_t i = 0; i + 1 < c.vertices.size(); ++i)
    d.push_back((c.vertices[i + 1] - c.vertices[i]).norm());
  if (d.empty()) return 0;
  std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
  return d[d.size() / 2];
}

struct CopyInvariants {
  std::vector<int> members;  // indices into the closed-curve list
  std::vector<std::vector<long long>> linking;
  std::vector<long long> determinants;
  bool splitPair = false;
};

CopyInvariants compute_invariants(const std::vector<const NodalCurve*>& curves,
                                  const std::vector<int>& members,
                                  std::uint64_t rngSeed) {
  CopyInvariants inv;
  inv.members = members;
  int n = static_cast<int>(members.size());
  inv.linking.assign(n, std::vector<long long>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      long long lk = linking_number(*curves[members[i]], *curves[members[j]],
                                    rngSeed + 97 * i + j);
      inv.linking[i][j] = inv.linking[j][i] = lk;
    }
  for (int i = 0; i < n; ++i)
    inv.determinants.push_back(knot_determinant(*curves[members[i]], rngSeed + 13 * i));
  // Bounding-sphere separation surrogate for split sublinks.
  for (int i = 0; i < n && !inv.splitPair; ++i)
    for (int j = i + 1; j < n && !inv.splitPair; ++j) {
      const auto& a = *curves[members[i]];
      const auto& b = *curves[members[j]];
      double d = (a.centroid() - b.centroid()).norm();
      if (d > a.boundingRadius() + b.boundingRadius()) inv.splitPair = true;
    }
  return inv;
}

bool all_dets_equal(const std::vector<long long>& dets, long long value) {
  for (long long d : dets)
    if (d != value) return false;
  return true;
}

bool matches_preset(const CopyInvariants& inv, LinkPreset target, int p, int q) {
  int n = static_cast<int>(inv.members.size());
  auto absLk = [&](int i, int j) { return std::llabs(inv.linking[i][j]); };
  switch (target) {
    case LinkPreset::Unknot:
      return n == 1 && inv.determinants[0] == 1;
    case LinkPreset::Hopf:
      return n == 2 && absLk(0, 1) == 1 && all_dets_equal(inv.determinants, 1);
    case LinkPreset::Trefoil:
      return n == 1 && inv.determinants[0] == 3;
    case LinkPreset::Solomon:
      return n == 2 && absLk(0, 1) == 2 && all_dets_equal(inv.determinants, 1);
    case LinkPreset::Borromean: {
      if (n != 3 || !all_dets_equal(inv.determinants, 1)) return false;
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          if (inv.linking[i][j] != 0) return false;
      return !inv.splitPair;
    }
    case LinkPreset::Torus: {
      int g = std::gcd(p, q);
      if (n != g) return false;
      long long detExpected = torus_knot_determinant(p / g, q / g);
      if (!all_dets_equal(inv.determinants, detExpected)) return false;
      if (g > 1) {
        long long expect = static_cast<long long>(p / g) * (q / g);
        long long sign = 0;
        for (int i = 0; i < g; ++i)
          for (int j = i + 1; j < g; ++j) {
            if (absLk(i, j) != expect) return false;
            long long s = inv.linking[i][j] > 0 ? 1 : -1;
            if (sign == 0) sign = s;
            if (s != sign) return false;
          }
      }
      return true;
    }
  }
  return false;
}

LinkClass preset_class(LinkPreset p) {
  switch (p) {
    case LinkPreset::Unknot: return LinkClass::Unknot;
    case LinkPreset::Hopf: return LinkClass::Hopf;
    case LinkPreset::Trefoil: return LinkClass::Trefoil;
    case LinkPreset::Solomon: return LinkClass::Solomon;
    case LinkPreset::Borromean: return LinkClass::BorromeanConsistent;
    case LinkPreset::Torus: return LinkClass::TorusConsistent;
  }
  return LinkClass::Unrecognized;
}

}  // namespace

std::string link_class_to_string(LinkClass c) {
  switch (c) {
    case LinkClass::Unknot: return "unknot";
    case LinkClass::Hopf: return "hopf";
    case LinkClass::Trefoil: return "trefoil";
    case LinkClass::Solomon: return "solomon";
    case LinkClass::BorromeanConsistent: return "borromean-consistent";
    case LinkClass::TorusConsistent: return "torus-consistent";
    case LinkClass::Unrecognized: return "unrecognized";
  }
  return "unrecognized";
}

InvariantReport classify_link(const std::vector<NodalCurve>& curves, LinkPreset target,
                              int torusP, int torusQ, std::uint64_t rngSeed) {
  InvariantReport report;
  std::vector<const NodalCurve*> closed;
  for (const auto& c : curves) {
    if (c.closed && !c.degenerate)
      closed.push_back(&c);
    else
      ++report.openCurves;
  }
  report.componentCount = static_cast<int>(closed.size());
  if (closed.empty()) {
    report.signature = "empty";
    return report;
  }

  // Mirror pairing: each curve matched with a distinct partner at -x.
  int n = static_cast<int>(closed.size());
  std::vector<int> partner(n, -1);
  for (int i = 0; i < n; ++i) {
    if (partner[i] >= 0) continue;
    NodalCurve mirrored = closed[i]->mirrored();
    double tol = 6.0 * std::max(median_spacing(*closed[i]), 1e-12);
    for (int j = 0; j < n; ++j) {
      if (j == i || partner[j] >= 0) continue;
      if (hausdorff(mirrored.vertices, closed[j]->vertices) < tol) {
        partner[i] = j;
        partner[j] = i;
        break;
      }
    }
  }
  bool allPaired = n % 2 == 0;
  for (int i = 0; i < n; ++i)
    if (partner[i] < 0) allPaired = false;
  report.mirrorSplit = allPaired && n >= 2;

  // Pick the copy to classify: the positive-octant group under pairing, or
  // everything when there is no mirror structure.
  std::vector<int> copy;
  if (report.mirrorSplit) {
    std::vector<char> taken(n, 0);
    for (int i = 0; i < n; ++i) {
      if (taken[i]) continue;
      int j = partner[i];
      taken[i] = taken[j] = 1;
      Vec3 ci = closed[i]->centroid();
      double si = ci.x + ci.y + ci.z;
      copy.push_back(si >= 0 ? i : j);
    }
  } else {
    copy.resize(n);
    std::iota(copy.begin(), copy.end(), 0);
  }
  report.perCopyComponents = static_cast<int>(copy.size());

  CopyInvariants inv = compute_invariants(closed, copy, rngSeed);
  report.splitPairDetected = inv.splitPair;
  report.linkingMatrix = inv.linking;
  report.determinants = inv.determinants;
  report.matchesTarget = matches_preset(inv, target, torusP, torusQ);
  if (report.matchesTarget) {
    report.classification = preset_class(target);
  } else {
    report.classification = LinkClass::Unrecognized;
    const LinkPreset guesses[] = {LinkPreset::Unknot, LinkPreset::Hopf,
                                  LinkPreset::Trefoil, LinkPreset::Solomon,
                                  LinkPreset::Borromean};
    for (LinkPreset guess : guesses) {
      if (matches_preset(inv, guess, 0, 0)) {
        report.classification = preset_class(guess);
        break;
      }
    }
  }
  report.signature = invariant_signature(curves, rngSeed);
  return report;
}

std::string invariant_signature(const std::vector<NodalCurve>& curves,
                                std::uint64_t rngSeed) {
  std::vector<const NodalCurve*> closed;
  int open = 0;
  for (const auto& c : curves) {
    if (c.closed && !c.degenerate)
      closed.push_back(&c);
    else
      ++open;
  }
  // Canonical order: centroid lexicographic.
  std::vector<int> order(closed.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    Vec3 ca = closed[a]->centroid(), cb = closed[b]->centroid();
    if (ca.x != cb.x) return ca.x < cb.x;
    if (ca.y != cb.y) return ca.y < cb.y;
    return ca.z < cb.z;
  });
  (void)open;  // open curves are excluded from invariant signatures
  std::ostringstream os;
  os << "n=" << closed.size() << ";det=[";
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i) os << ',';
    os << knot_determinant(*closed[order[i]], rngSeed + 13 * i);
  }
  os << "];lk=[";
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (i || j > 1) os << ',';
      os << linking_number(*closed[order[i]], *closed[order[j]],
                           rngSeed + 97 * i + j);
    }
  }
  os << ']';
  return os.str();
}

}  // namespace knotosc::topology
