#include <doctest.h>

#include <cmath>
#include <random>

#include "knotosc/errors.hpp"
#include "knotosc/helmholtz.hpp"
#include "knotosc/nodal.hpp"
#include "knotosc/quadrature.hpp"
#include "knotosc/specfun.hpp"
#include "support/oracles.hpp"

using namespace knotosc;
using namespace knotosc::helmholtz;

namespace {
constexpr double kPi = 3.14159265358979323846;

FourierBesselField random_even_field(int l0, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  FourierBesselField f(l0);
  for (int l = 0; l <= l0; l += 2)
    for (int m = -l; m <= l; ++m) f.set_coeff(l, m, {gauss(rng), gauss(rng)});
  return f;
}
}  // namespace

TEST_CASE("fourier bessel field basics") {
  FourierBesselField f(2);
  f.set_coeff(0, 0, {1.0, 0.0});
  auto v = f.eval({0, 0, kPi});  // j_0(pi) = 0
  CHECK(std::abs(v.value) < 1e-14);
  auto origin = f.eval({0, 0, 0});
  CHECK(origin.value.real() == doctest::Approx(1.0 / (2 * std::sqrt(kPi))));
}

TEST_CASE("fourier bessel field solves Helmholtz") {
  FourierBesselField f = random_even_field(8, 21);
  std::mt19937_64 rng(3);
  double sup = 0;
  std::vector<Vec3> pts;
  for (int i = 0; i < 200; ++i) {
    Vec3 x = testing::random_in_ball(rng, 2.0);
    pts.push_back(x);
    sup = std::max(sup, std::abs(f.eval(x).value));
  }
  for (const auto& x : pts) {
    cplx lap = testing::fd_laplacian(f, x, 1e-3);
    cplx residual = lap + f.eval(x).value;
    CHECK(std::abs(residual) < 1e-6 * sup);
  }
}

TEST_CASE("fourier bessel gradient matches finite differences") {
  FourierBesselField f = random_even_field(6, 33);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    Vec3 x = testing::random_in_ball(rng, 1.8);
    auto analytic = f.eval(x).gradient;
    auto fd = testing::fd_gradient(f, x, 1e-5);
    CHECK((analytic - fd).norm() < 1e-6 * (1.0 + analytic.norm()));
  }
}

TEST_CASE("evenness of constraint-built fields") {
  FourierBesselField f = random_even_field(10, 55);
  CHECK(f.is_even());
  std::mt19937_64 rng(7);
  for (int i = 0; i < 40; ++i) {
    Vec3 x = testing::random_in_ball(rng, 2.2);
    auto a = f.eval(x);
    auto b = f.eval(-x);
    CHECK(std::abs(a.value - b.value) <= 1e-12 * (std::abs(a.value) + 1e-12));
  }
}

TEST_CASE("greens function") {
  Vec3 src{0.3, -0.2, 0.9};
  Vec3 x = src + Vec3{kPi / 2, 0, 0};
  CHECK(greens_eval(x, src) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(greens_eval({1.0, 0.4, -0.2}, {0, 0, 0}) ==
        doctest::Approx(greens_eval({-1.0, -0.4, 0.2}, {0, 0, 0})));
  CHECK_THROWS_AS(greens_eval(src, src), SingularityError);

  // (Delta + 1) G = 0 away from the pole.
  LambdaField g([&](const Vec3& p) { return greens_eval_full(p, src); });
  Vec3 probe = src + Vec3{0.6, 0.53, 0.42};
  cplx residual = testing::fd_laplacian(g, probe, 1e-4) + g.eval(probe).value;
  CHECK(std::abs(residual) < 1e-6);
  auto fd = testing::fd_gradient(g, probe, 1e-6);
  CHECK((g.eval(probe).gradient - fd).norm() < 1e-6);
}

TEST_CASE("point source field and mirror symmetry") {
  PointSourceField f;
  f.add_mirror_pair({0, 0, 2.0}, {0.5, -0.25});
  f.add_mirror_pair({1.5, 0.2, -1.1}, {0.0, 1.0});
  CHECK(f.is_mirror_symmetric());
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    Vec3 x = testing::random_in_ball(rng, 0.8);
    auto a = f.eval(x);
    auto b = f.eval(-x);
    CHECK(std::abs(a.value - b.value) < 1e-13);
  }
  PointSourceField g;
  g.add_source({0, 0, 2.0}, {1.0, 0.0});
  CHECK_FALSE(g.is_mirror_symmetric());
}

TEST_CASE("milnor seed presets trace the expected links") {
  Placement unknotPl{0.45, {0.62, 0.62, 0.34}};
  SeedField unknot = milnor_seed(LinkPreset::Unknot, unknotPl, 1.7);
  CHECK(unknot.referenceLink.size() == 1);
  CHECK(unknot.margin > 0);
  CHECK(unknot.tubeRadius > 0);

  Placement hopfPl{0.40, {1.08, 0.55, 0.55}};
  SeedField hopf = milnor_seed(LinkPreset::Hopf, hopfPl, 2.5);
  CHECK(hopf.referenceLink.size() == 2);
  CHECK(hopf.margin > 0);

  Placement trefPl{0.40, {0.66, 0.90, 0.48}};
  SeedField trefoil = milnor_seed(LinkPreset::Trefoil, trefPl, 2.4);
  CHECK(trefoil.referenceLink.size() == 1);

  Placement bad{0.45, {0.3, 0.62, 0.34}};
  CHECK_THROWS_AS(milnor_seed(LinkPreset::Unknot, bad, 1.7), ConfigError);
  CHECK_THROWS_AS(milnor_seed(LinkPreset::Unknot, unknotPl, 0.9), ConfigError);
}

TEST_CASE("seed field transversality along the reference link") {
  Placement pl{0.40, {1.08, 0.55, 0.55}};
  SeedField seed = milnor_seed(LinkPreset::Hopf, pl, 2.5);
  for (const auto& comp : seed.referenceLink) {
    for (std::size_t i = 0; i < comp.size(); i += 7) {
      auto v = seed.eval(comp[i]);
      CHECK(nodal::gradient_margin(v) > 0.5 * seed.margin);
    }
  }
}

TEST_CASE("window is one on the tube and zero far away") {
  Placement pl{0.45, {0.62, 0.62, 0.34}};
  SeedField seed = milnor_seed(LinkPreset::Unknot, pl, 1.7);
  CHECK(seed.window(seed.referenceLink[0][0]) == doctest::Approx(1.0));
  CHECK(seed.window({-0.62, -0.62, -0.34}) == doctest::Approx(0.0));
}

TEST_CASE("fit recovers an exactly representable even field") {
  FourierBesselField target = random_even_field(4, 77);
  SampleSet samples;
  std::mt19937_64 rng(13);
  for (int i = 0; i < 400; ++i) {
    Vec3 x = testing::random_in_ball(rng, 1.6);
    auto v = target.eval(x);
    samples.append(x, v.value, v.gradient, 1.0);
    auto vm = target.eval(-x);
    samples.append(-x, vm.value, vm.gradient, 1.0);
  }
  FitResult fit = fit_coefficients(samples, 8, {1e-12, 1.0});
  for (int l = 0; l <= 8; ++l) {
    for (int m = -l; m <= l; ++m) {
      cplx expected = l <= 4 && l % 2 == 0 ? target.coeff(l, m) : cplx{0, 0};
      CHECK(std::abs(fit.field.coeff(l, m) - expected) < 1e-9);
    }
  }
  CHECK(fit.field.max_odd_coeff() == 0.0);
  CHECK(fit.report.c1Residual < 1e-8);
}

TEST_CASE("hopf fit residual non-increasing in l0") {
  Placement pl{0.40, {1.08, 0.55, 0.55}};
  SeedField seed = milnor_seed(LinkPreset::Hopf, pl, 2.5);
  TubeSampleOptions opts;
  opts.alongPerComponent = 60;
  opts.around = 6;
  opts.guardCount = 150;
  opts.background = 0.0;
  SampleSet samples = make_tube_samples(seed, 2.5, opts);
  auto fits = fit_coefficients_sweep({8, 12, 16}, samples);
  REQUIRE(fits.size() == 3);
  CHECK(fits[1].report.c1Residual <= fits[0].report.c1Residual * 1.0000001);
  CHECK(fits[2].report.c1Residual <= fits[1].report.c1Residual * 1.0000001);
  for (const auto& f : fits) CHECK(f.field.max_odd_coeff() == 0.0);
}

TEST_CASE("tube samples are symmetric with even targets") {
  Placement pl{0.45, {0.62, 0.62, 0.34}};
  SeedField seed = milnor_seed(LinkPreset::Unknot, pl, 1.7);
  TubeSampleOptions opts;
  opts.alongPerComponent = 24;
  opts.around = 4;
  opts.guardCount = 40;
  opts.background = 0.05;
  SampleSet samples = make_tube_samples(seed, 1.7, opts);
  REQUIRE(samples.size() % 2 == 0);
  for (std::size_t i = 0; i < samples.size(); i += 2) {
    CHECK((samples.points[i] + samples.points[i + 1]).norm() < 1e-14);
    CHECK(std::abs(samples.values[i] - samples.values[i + 1]) < 1e-12);
    CHECK((samples.gradients[i] + samples.gradients[i + 1]).norm() < 1e-12);
    CHECK(samples.weights[i] == samples.weights[i + 1]);
  }
}

TEST_CASE("greens sweep improves with budget and keeps symmetry") {
  PointSourceField phi1;
  phi1.add_mirror_pair({0, 0, 1.2}, {1.0, 0.4});
  phi1.add_mirror_pair({1.05, 0.3, -0.35}, {-0.3, 0.8});

  std::vector<Vec3> S;
  quadrature::SphereRule sphere(8);
  for (const auto& n : sphere.nodes) {
    SphericalFrame f = spherical_frame(n.theta, n.phi);
    S.push_back(f.er * 0.8);
  }

  SweepOptions opts;
  opts.rngSeed = 5;
  auto results = greens_sweep(phi1, 1.5, S, {8, 16, 32}, opts);
  REQUIRE(results.size() == 3);
  CHECK(results[0].supError >= results[1].supError - 1e-12);
  CHECK(results[1].supError >= results[2].supError - 1e-12);
  CHECK(results[2].supError < 1e-3);
  for (const auto& r : results) CHECK(r.field.is_mirror_symmetric());

  PointSourceField bad;
  bad.add_mirror_pair({0, 0, 0.3}, {1.0, 0.0});
  CHECK_THROWS_AS(greens_sweep(bad, 1.5, S, {4}, opts), ConfigError);
}

TEST_CASE("a single exterior mirror pair is reproduced exactly by budget one") {
  Vec3 pole{0.4, -0.3, 2.2};
  PointSourceField phi1;
  phi1.add_mirror_pair(pole, {0.7, -0.1});
  std::vector<Vec3> S;
  quadrature::SphereRule sphere(6);
  for (const auto& n : sphere.nodes) {
    SphericalFrame f = spherical_frame(n.theta, n.phi);
    S.push_back(f.er * 0.8);
  }
  SweepOptions opts;
  opts.restarts = 1;
  opts.candidatePoles = {pole};
  auto result = greens_sweep(phi1, 1.5, S, {1}, opts);
  REQUIRE(result.size() == 1);
  CHECK(result[0].supError < 1e-12);
  CHECK(result[0].field.is_mirror_symmetric());
  REQUIRE(result[0].field.charges.size() == 2);
  CHECK(std::abs(result[0].field.charges[0] - cplx{0.7, -0.1}) < 1e-12);
}

TEST_CASE("projection recovers j0 Y00") {
  FourierBesselField f(0);
  f.set_coeff(0, 0, {1.0, 0.0});
  auto proj = project_fourier_bessel(f, 6, 1.9);
  CHECK(std::abs(proj.coeff(0, 0) - cplx{1.0, 0.0}) < 1e-10);
  for (int l = 1; l <= 6; ++l)
    for (int m = -l; m <= l; ++m) CHECK(std::abs(proj.coeff(l, m)) < 1e-10);
}

TEST_CASE("projection matches the Rayleigh plane-wave expansion") {
  LambdaField wave([](const Vec3& p) {
    FieldValue v;
    v.value = std::exp(cplx(0.0, p.z));
    v.gradient = CVec3{cplx{0, 0}, cplx{0, 0}, cplx(0.0, 1.0) * v.value};
    return v;
  });
  int l0 = 6;
  auto proj = project_fourier_bessel(wave, l0, 2.0, 64, 16);
  for (int l = 0; l <= l0; ++l) {
    for (int m = -l; m <= l; ++m) {
      cplx expected{0, 0};
      if (m == 0) {
        cplx il = std::pow(cplx(0, 1), l);
        expected = il * std::sqrt(4.0 * kPi * (2.0 * l + 1.0));
      }
      CHECK(std::abs(proj.coeff(l, m) - expected) < 1e-8);
    }
  }
}

TEST_CASE("projection of an exterior source satisfies Helmholtz") {
  PointSourceField f;
  f.add_mirror_pair({0, 0, 2.1}, {1.0, 0.3});
  // Point sources carry angular content far beyond l0; the rule degree must
  // absorb it before the odd-l floor of an even input reaches 1e-10.
  auto proj = project_fourier_bessel(f, 12, 1.2, 48, 48);
  CHECK(proj.maxOdd < 1e-10);
  FourierBesselField even = proj.even_field();
  std::mt19937_64 rng(15);
  double sup = 0;
  std::vector<Vec3> pts;
  for (int i = 0; i < 50; ++i) {
    Vec3 x = testing::random_in_ball(rng, 1.0);
    pts.push_back(x);
    sup = std::max(sup, std::abs(even.eval(x).value));
  }
  for (const auto& x : pts) {
    cplx residual = testing::fd_laplacian(even, x, 1e-3) + even.eval(x).value;
    CHECK(std::abs(residual) < 1e-6 * sup);
  }
  for (const auto& x : pts)
    CHECK(std::abs(even.eval(x).value - f.eval(x).value) < 1e-6);

  PointSourceField bad;
  bad.add_source({0, 0, 1.0}, {1.0, 0.0});
  CHECK_THROWS_AS(project_fourier_bessel(bad, 4, 1.5), std::domain_error);
}

TEST_CASE("sweep then project reproduces phi1 within stage errors") {
  PointSourceField phi1;
  phi1.add_mirror_pair({0.1, 0.2, 1.15}, {0.8, -0.2});
  phi1.add_mirror_pair({-0.8, 0.55, 0.6}, {0.25, 0.55});
  std::vector<Vec3> S;
  quadrature::SphereRule sphere(10);
  for (const auto& n : sphere.nodes) {
    SphericalFrame f = spherical_frame(n.theta, n.phi);
    S.push_back(f.er * 0.75);
  }
  SweepOptions opts;
  opts.rngSeed = 23;
  auto swept = greens_sweep(phi1, 1.4, S, {24}, opts);
  const auto& phi2 = swept[0].field;
  auto proj = project_fourier_bessel(phi2, 14, 1.2, 48, 60);
  FourierBesselField phi = proj.even_field(true, 1e-9);
  double projErr = 0;
  for (const auto& s : S)
    projErr = std::max(projErr, std::abs(phi.eval(s).value - phi2.eval(s).value));
  double total = 0;
  for (const auto& s : S)
    total = std::max(total, std::abs(phi.eval(s).value - phi1.eval(s).value));
  CHECK(total <= swept[0].supError + projErr + 1e-9);
}

TEST_CASE("field distance") {
  FourierBesselField f = random_even_field(4, 91);
  std::vector<Vec3> pts;
  std::mt19937_64 rng(17);
  for (int i = 0; i < 25; ++i) pts.push_back(testing::random_in_ball(rng, 1.5));
  CHECK(field_distance(f, f, pts, 0) == 0.0);
  CHECK(field_distance(f, f, pts, 1) == 0.0);

  LambdaField shifted([&](const Vec3& p) {
    auto v = f.eval(p);
    v.value += cplx{1e-3, 0};
    return v;
  });
  CHECK(field_distance(f, shifted, pts, 0) == doctest::Approx(1e-3));
  CHECK(field_distance(f, shifted, pts, 1) >= field_distance(f, shifted, pts, 0));
}
