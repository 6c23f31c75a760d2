#include <doctest.h>

#include <cmath>
#include <random>

#include "knotosc/errors.hpp"
#include "knotosc/topology.hpp"
#include "support/oracles.hpp"

using namespace knotosc;
using namespace knotosc::topology;
using knotosc::testing::circle_xy;
using knotosc::testing::figure_eight_curve;
using knotosc::testing::parametric_curve;
using knotosc::testing::torus_curve;
using knotosc::testing::trefoil_curve;

namespace {

// Standard Hopf pair: unit circle in the xy-plane and a unit circle in the
// xz-plane through its center.
std::pair<nodal::NodalCurve, nodal::NodalCurve> hopf_pair(double jitter = 0.0,
                                                          std::uint64_t seed = 0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-jitter, jitter);
  auto jig = [&](const Vec3& v) {
    return jitter > 0 ? v + Vec3{u(rng), u(rng), u(rng)} : v;
  };
  auto c1 = parametric_curve(
      [&](double t) { return jig({std::cos(t), std::sin(t), 0.0}); }, 160);
  auto c2 = parametric_curve(
      [&](double t) { return jig({1.0 + std::cos(t), 0.0, std::sin(t)}); }, 160);
  return {c1, c2};
}

}  // namespace

TEST_CASE("linking number of split circles is zero") {
  auto a = circle_xy(1.0, {0, 0, 0});
  auto b = circle_xy(1.0, {10, 0, 0});
  CHECK(linking_number(a, b) == 0);
  CHECK(std::abs(gauss_linking(a, b)) < 1e-9);
}

TEST_CASE("linking number of the standard Hopf pair") {
  auto [a, b] = hopf_pair();
  long long lk = linking_number(a, b);
  CHECK(std::abs(lk) == 1);

  // Reversing one orientation negates the linking number.
  nodal::NodalCurve rev = b;
  std::reverse(rev.vertices.begin(), rev.vertices.end());
  CHECK(linking_number(a, rev) == -lk);

  CHECK(linking_number(b, a) == lk);
}

TEST_CASE("gauss sum and crossing count agree on randomized pairs") {
  for (int trial = 0; trial < 100; ++trial) {
    bool split = trial % 2 == 0;
    double jitter = 0.02 + 0.0005 * trial;
    if (split) {
      auto a = circle_xy(1.0, {0, 0, 0}, 120);
      auto b = circle_xy(1.2, {4.0 + 0.01 * trial, 0.3, 0.8}, 120);
      std::mt19937_64 rng(500 + trial);
      std::uniform_real_distribution<double> u(-jitter, jitter);
      for (auto& v : a.vertices) v += {u(rng), u(rng), u(rng)};
      for (auto& v : b.vertices) v += {u(rng), u(rng), u(rng)};
      double g = gauss_linking(a, b);
      long long c = crossing_linking(a, b, 900 + trial);
      CHECK(std::llround(g) == c);
      CHECK(c == 0);
    } else {
      auto [a, b] = hopf_pair(jitter, 700 + trial);
      double g = gauss_linking(a, b);
      long long c = crossing_linking(a, b, 900 + trial);
      CHECK(std::abs(g - std::llround(g)) < 0.05);
      CHECK(std::llround(g) == c);
      CHECK(std::llabs(c) == 1);
    }
  }
}

TEST_CASE("planar circle projects without crossings") {
  auto c = circle_xy(1.0, {0, 0, 0});
  std::vector<const nodal::NodalCurve*> one{&c};
  auto diagram = project_to_diagram(one, 3);
  CHECK(diagram.crossing_count() == 0);
  CHECK(knot_determinant(c, 3) == 1);
}

TEST_CASE("hopf pair inter-crossing signs sum to twice the linking number") {
  auto [a, b] = hopf_pair();
  long long lk = linking_number(a, b);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::vector<const nodal::NodalCurve*> both{&a, &b};
    auto diagram = project_to_diagram(both, seed);
    CHECK(diagram.inter_sign_sum(0, 1) == 2 * lk);
  }
}

TEST_CASE("trefoil determinant is 3 across many projections") {
  auto k = trefoil_curve();
  bool sawMinimal = false;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    std::vector<const nodal::NodalCurve*> one{&k};
    auto diagram = project_to_diagram(one, seed);
    if (diagram.crossing_count() == 3) sawMinimal = true;
    CHECK(knot_determinant(k, seed) == 3);
  }
  CHECK(sawMinimal);
}

TEST_CASE("figure eight determinant is 5") {
  auto k = figure_eight_curve();
  for (std::uint64_t seed = 1; seed <= 10; ++seed)
    CHECK(knot_determinant(k, seed) == 5);
}

TEST_CASE("torus knot determinants, closed form and diagrams") {
  CHECK(torus_knot_determinant(1, 1) == 1);
  CHECK(torus_knot_determinant(2, 3) == 3);
  CHECK(torus_knot_determinant(2, 5) == 5);
  CHECK(torus_knot_determinant(2, 7) == 7);
  CHECK(torus_knot_determinant(3, 4) == 3);
  CHECK(torus_knot_determinant(3, 5) == 1);
  CHECK_THROWS_AS(torus_knot_determinant(2, 4), std::domain_error);

  auto t25 = torus_curve(2, 5);
  CHECK(knot_determinant(t25, 5) == 5);
}

TEST_CASE("gauss code export") {
  auto k = trefoil_curve();
  std::vector<const nodal::NodalCurve*> one{&k};
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto diagram = project_to_diagram(one, seed);
    if (diagram.crossing_count() == 3) {
      std::string code = diagram.gauss_code();
      CHECK(code.size() > 0);
      CHECK(diagram.passes[0].size() == 6);
      return;
    }
  }
  FAIL("no minimal trefoil diagram found");
}

TEST_CASE("linking matrix properties under orientation flips") {
  auto [a, b] = hopf_pair();
  std::vector<nodal::NodalCurve> curves{a, b};
  auto report = classify_link(curves, LinkPreset::Hopf);
  REQUIRE(report.linkingMatrix.size() == 2);
  CHECK(report.linkingMatrix[0][0] == 0);
  CHECK(report.linkingMatrix[1][1] == 0);
  CHECK(report.linkingMatrix[0][1] == report.linkingMatrix[1][0]);

  std::vector<nodal::NodalCurve> flipped = curves;
  for (auto& c : flipped) std::reverse(c.vertices.begin(), c.vertices.end());
  auto flippedReport = classify_link(flipped, LinkPreset::Hopf);
  CHECK(flippedReport.linkingMatrix[0][1] == report.linkingMatrix[0][1]);

  std::vector<nodal::NodalCurve> one = curves;
  std::reverse(one[1].vertices.begin(), one[1].vertices.end());
  auto oneReport = classify_link(one, LinkPreset::Hopf);
  CHECK(oneReport.linkingMatrix[0][1] == -report.linkingMatrix[0][1]);
}

TEST_CASE("classification of presets") {
  auto [h1, h2] = hopf_pair();
  auto hopfReport = classify_link({h1, h2}, LinkPreset::Hopf);
  CHECK(hopfReport.matchesTarget);
  CHECK(hopfReport.classification == LinkClass::Hopf);
  CHECK(hopfReport.componentCount == 2);

  auto tre = trefoil_curve();
  auto trefoilReport = classify_link({tre}, LinkPreset::Trefoil);
  CHECK(trefoilReport.matchesTarget);
  CHECK(trefoilReport.classification == LinkClass::Trefoil);

  auto unknotReport = classify_link({circle_xy(1.0, {0, 0, 0})}, LinkPreset::Unknot);
  CHECK(unknotReport.matchesTarget);

  // Solomon link as the (2, 4) torus link: two (1, 2) components offset by
  // half a poloidal turn.
  auto s1 = torus_curve(1, 2, 0.0);
  auto s2 = torus_curve(1, 2, 3.14159265358979323846);
  auto solomonReport = classify_link({s1, s2}, LinkPreset::Solomon);
  CHECK(solomonReport.matchesTarget);
  CHECK(std::llabs(solomonReport.linkingMatrix[0][1]) == 2);

  auto torusReport = classify_link({s1, s2}, LinkPreset::Torus, 2, 4);
  CHECK(torusReport.matchesTarget);
}

TEST_CASE("borromean classification and the split surrogate") {
  double a = 1.0, b = 0.5;
  auto e1 = parametric_curve(
      [&](double t) { return Vec3{a * std::cos(t), b * std::sin(t), 0.0}; }, 200);
  auto e2 = parametric_curve(
      [&](double t) { return Vec3{0.0, a * std::cos(t), b * std::sin(t)}; }, 200);
  auto e3 = parametric_curve(
      [&](double t) { return Vec3{b * std::sin(t), 0.0, a * std::cos(t)}; }, 200);
  auto report = classify_link({e1, e2, e3}, LinkPreset::Borromean);
  CHECK(report.matchesTarget);
  CHECK(report.classification == LinkClass::BorromeanConsistent);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) CHECK(report.linkingMatrix[i][j] == 0);
  CHECK(report.determinants == std::vector<long long>{1, 1, 1});

  auto c1 = circle_xy(0.8, {0, 0, 0});
  auto c2 = circle_xy(0.8, {5, 0, 0});
  auto c3 = circle_xy(0.8, {10, 0, 0});
  auto splitReport = classify_link({c1, c2, c3}, LinkPreset::Borromean);
  CHECK_FALSE(splitReport.matchesTarget);
  CHECK(splitReport.classification == LinkClass::Unrecognized);
  CHECK(splitReport.splitPairDetected);
}

TEST_CASE("mirror split detection") {
  auto [a, b] = hopf_pair();
  Vec3 shift{2.5, 2.5, 2.5};
  for (auto& v : a.vertices) v += shift;
  for (auto& v : b.vertices) v += shift;
  auto am = a.mirrored();
  auto bm = b.mirrored();
  auto report = classify_link({a, b, am, bm}, LinkPreset::Hopf);
  CHECK(report.mirrorSplit);
  CHECK(report.componentCount == 4);
  CHECK(report.perCopyComponents == 2);
  CHECK(report.matchesTarget);
  CHECK(report.classification == LinkClass::Hopf);
}

TEST_CASE("signature is stable under vertex-density doubling") {
  auto [a, b] = hopf_pair();
  std::string sig = invariant_signature({a, b});
  std::string dense = invariant_signature({a.densified(), b.densified()});
  CHECK(sig == dense);

  auto tre = trefoil_curve();
  CHECK(invariant_signature({tre}) == invariant_signature({tre.densified()}));
}

TEST_CASE("determinant requires closed curves") {
  nodal::NodalCurve open;
  open.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  open.closed = false;
  CHECK_THROWS_AS(knot_determinant(open), std::domain_error);
}
