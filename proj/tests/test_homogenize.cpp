#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "ahc/homogenize.hpp"

using namespace ahc;

namespace {

constexpr double kPi = std::numbers::pi;
const double kSigma = 4.0 * std::sqrt(2.0) / 3.0;

Problem constant_problem(int dim, double c, double spacing) {
  Problem p;
  p.medium.kind = MediumKind::Constant;
  p.medium.params.dim = dim;
  p.medium.params.lambda = std::min(1.0, c * c);
  p.medium.params.Lambda_cap = std::max(1.0, c * c);
  p.medium.params.norms = {CellNorm::scalar(c)};
  p.spacing = spacing;
  return p;
}

Problem checker_problem(double spacing) {
  Problem p;
  p.medium.kind = MediumKind::RandomCheckerboard;
  p.medium.params.dim = 2;
  p.medium.params.lambda = 1.0;
  p.medium.params.Lambda_cap = 4.0;
  p.medium.params.norms = {CellNorm::scalar(1.0), CellNorm::scalar(2.0)};
  p.medium.params.weights = {0.5, 0.5};
  p.spacing = spacing;
  return p;
}

// phi(p) = |diag(a, b) p|, a convex one-homogeneous function, sampled at n angles.
SurfaceTensionTable elliptic_table(int n, double a, double b) {
  std::vector<double> angles, values;
  for (int i = 0; i < n; ++i) {
    const double t = kPi * i / n;
    angles.push_back(t);
    values.push_back(std::hypot(a * std::cos(t), b * std::sin(t)));
  }
  return make_table(angles, values);
}

}  // namespace

TEST_CASE("property check tally") {
  PropertyCheck c{"x"};
  c.add(-1.0, 0.0);
  c.add(0.5, 1.0);
  CHECK(c.total == 2);
  CHECK(c.strict == 1);
  CHECK(c.within_slack == 2);
  CHECK(c.passed());
  CHECK(c.worst_margin == 0.5);
  c.add(2.0, 1.0);
  CHECK_FALSE(c.passed());
  CHECK(c.strict_fraction() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("ensemble statistics") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const EnsembleStat s = summarize(8.0, v);
  CHECK(s.count == 4);
  CHECK(s.mean == 2.5);
  CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(s.stderr_mean == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  const std::vector<double> one{3.0};
  CHECK(summarize(1.0, one).std == 0.0);
}

TEST_CASE("extrapolation of exact series") {
  const std::vector<double> R{8.0, 16.0, 32.0};
  const std::vector<double> c{1.75, 1.75, 1.75};
  const Extrapolation a = subadditive_extrapolate(R, c);
  CHECK(a.limit == doctest::Approx(1.75).epsilon(1e-14));
  CHECK(a.stderr_limit == doctest::Approx(0.0).scale(1e-12));
  CHECK(std::abs(a.slope) < 1e-12);

  std::vector<double> v;
  for (double r : R) v.push_back(2.0 + 5.0 / r);
  const Extrapolation b = subadditive_extrapolate(R, v);
  CHECK(std::abs(b.limit - 2.0) < 1e-9);
  CHECK(std::abs(b.slope - 5.0) < 1e-9);
  const std::vector<double> var{1e-4, 1e-4, 1e-4};
  const Extrapolation w = subadditive_extrapolate(R, v, var);
  CHECK(w.weighted);
  CHECK(std::abs(w.limit - 2.0) < 1e-9);
}

TEST_CASE("extrapolation stderr is calibrated") {
  // 1000 noisy series with known limit and noise; the 3-sigma interval covers the limit >= 95%.
  const std::vector<double> R{8.0, 16.0, 32.0};
  const double sigma = 0.01;
  const std::vector<double> var(3, sigma * sigma);
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> noise(0.0, sigma);
  int covered = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> v;
    for (double r : R) v.push_back(2.0 + 5.0 / r + noise(rng));
    const Extrapolation x = subadditive_extrapolate(R, v, var);
    covered += std::abs(x.limit - 2.0) <= 3.0 * x.stderr_limit;
  }
  CHECK(covered >= 950);
}

TEST_CASE("extrapolation input errors") {
  const std::vector<double> two{8.0, 16.0};
  CHECK_THROWS_AS(subadditive_extrapolate(two, two), std::invalid_argument);
  const std::vector<double> same{8.0, 8.0, 8.0};
  const std::vector<double> v{1.0, 2.0, 3.0};
  CHECK(subadditive_extrapolate(same, v).ill_conditioned);
}

TEST_CASE("comparison within three combined standard errors") {
  Comparison c{"c", 1.0, 0.03, 1.1, 0.04, 0.0};
  CHECK(c.agrees());  // 0.1 <= 3 * 0.05
  c.b = 1.2;
  CHECK_FALSE(c.agrees());
  c.tolerance = 0.05;
  CHECK(c.agrees());
}

TEST_CASE("table interpolation is one-homogeneous and even") {
  const SurfaceTensionTable t = make_table({0.0, kPi / 2.0}, {1.0, 3.0});
  CHECK(t.at({1.0, 0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(t.at({0.0, 2.0, 0.0}) == doctest::Approx(6.0));
  CHECK(t.at({-1.0, 0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(t.at({0.0, -1.0, 0.0}) == doctest::Approx(3.0));
  // Linear in angle between entries, wrapping through pi.
  CHECK(t.at({std::cos(kPi / 4), std::sin(kPi / 4), 0.0}) == doctest::Approx(2.0));
  CHECK(t.at({std::cos(3 * kPi / 4), std::sin(3 * kPi / 4), 0.0}) == doctest::Approx(2.0));
  CHECK(t.at({0.0, 0.0, 0.0}) == 0.0);
  for (double s : {0.1, 1.0, 7.5}) CHECK(t.at({s * 0.3, s * 0.4, 0.0}) == doctest::Approx(s * t.at({0.3, 0.4, 0.0})));
  CHECK_THROWS_AS(make_table({0.0, kPi}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_table({0.0}, {-1.0}), std::invalid_argument);
}

TEST_CASE("convexity check") {
  CHECK(convexity_check(elliptic_table(16, 2.0, 1.0)).passed());
  CHECK(convexity_check(elliptic_table(16, 1.0, 1.0)).passed());
  // A deep dip at one direction breaks the triangle inequality.
  SurfaceTensionTable bad = elliptic_table(16, 1.0, 1.0);
  bad.values[4] = 0.5;
  const PropertyCheck c = convexity_check(bad);
  CHECK_FALSE(c.passed());
  // Wide enough error bars absorb it.
  bad.stderrs.assign(bad.values.size(), 0.2);
  CHECK(convexity_check(bad).passed());
}

TEST_CASE("perimeter of squares and flat interfaces") {
  const double sigma = 1.7;
  const SurfaceTensionTable iso = make_table({0.0, kPi / 3.0, 2.0 * kPi / 3.0}, {sigma, sigma, sigma});
  const Polyline unit{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, true};
  CHECK(perimeter(iso, unit) == doctest::Approx(4.0 * sigma).epsilon(1e-14));

  const SurfaceTensionTable t = elliptic_table(16, 2.0, 1.0);
  const double s = 1.5;
  Polyline diamond{{}, true};
  for (const Point2& p : square_region({0.3, -0.2}, s, kPi / 4.0)) diamond.points.push_back(p);
  const double diag = t.at({std::cos(kPi / 4), std::sin(kPi / 4), 0.0});
  CHECK(perimeter(t, diamond) == doctest::Approx(4.0 * s * diag).epsilon(1e-12));

  // A line perpendicular to e through a square of side rho, clipped to the square.
  for (double angle : {0.0, kPi / 8.0, kPi / 4.0, 0.3}) {
    const Vec3 e{std::cos(angle), std::sin(angle), 0.0};
    const Point2 x0{0.4, -0.1};
    const double rho = 0.8;
    const Point2 tangent{-e[1], e[0]};
    const Polyline line{{{x0[0] - 5 * tangent[0], x0[1] - 5 * tangent[1]}, {x0[0] + 5 * tangent[0], x0[1] + 5 * tangent[1]}},
                        false};
    const auto region = square_region(x0, rho, angle);
    CHECK(perimeter(t, line, region) == doctest::Approx(t.at(e) * rho).epsilon(1e-12));
  }
}

TEST_CASE("perimeter is positively homogeneous in the table") {
  const SurfaceTensionTable t = elliptic_table(12, 1.3, 0.9);
  const Polyline poly{{{0, 0}, {2, 0.3}, {2.5, 1.7}, {0.4, 2.2}}, true};
  const double base = perimeter(t, poly);
  for (double s : {0.5, 2.0, 3.75}) CHECK(perimeter(t.scaled(s), poly) == doctest::Approx(s * base).epsilon(1e-14));
}

TEST_CASE("perimeter rejects non-manifold input") {
  const SurfaceTensionTable t = elliptic_table(8, 1.0, 1.0);
  CHECK_THROWS_AS(perimeter(t, Polyline{{{0, 0}}, false}), std::invalid_argument);
  CHECK_THROWS_AS(perimeter(t, Polyline{{{0, 0}, {0, 0}, {1, 0}}, false}), std::invalid_argument);
  // Bow tie.
  CHECK_THROWS_AS(perimeter(t, Polyline{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}, true}), std::invalid_argument);
  // Folding back along itself.
  CHECK_THROWS_AS(perimeter(t, Polyline{{{0, 0}, {2, 0}, {1, 0}}, false}), std::invalid_argument);
  // Clockwise region.
  const std::vector<Point2> cw{{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  CHECK_THROWS_AS(perimeter(t, Polyline{{{0, 0.5}, {1, 0.5}}, false}, cw), std::invalid_argument);
}

TEST_CASE("scaling a constant medium scales the estimate") {
  const std::vector<double> R{4.0, 8.0, 16.0};
  const std::vector<std::uint64_t> seeds{1};
  const SweepResult a = r_sweep(constant_problem(2, 1.0, 0.25), {1.0, 0.0, 0.0}, HeightRule{}, R, seeds);
  const SweepResult b = r_sweep(constant_problem(2, 1.5, 0.25), {1.0, 0.0, 0.0}, HeightRule{}, R, seeds);
  REQUIRE(a.limit);
  REQUIRE(b.limit);
  CHECK(std::abs(b.limit->limit / (1.5 * a.limit->limit) - 1.0) < 5e-3);
  // Per sample the lateral boundary layer breaks linearity by O(1/R).
  double prev = 1.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double dev = std::abs(b.samples[i].normalized / (1.5 * a.samples[i].normalized) - 1.0);
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(prev < 1e-2);
  CHECK(a.passed());
  CHECK(b.passed());
}

TEST_CASE("h-sweep in a constant one-dimensional medium") {
  Problem p = constant_problem(1, 1.0, 0.01);
  p.solver.grad_tol = 1e-7;
  const SweepResult r = h_sweep(p, {1.0, 0.0, 0.0}, 1.0, {2.0, 4.0, 8.0}, {1});
  CHECK(r.passed());
  REQUIRE(r.samples.size() == 3);
  CHECK(r.samples[2].value <= r.samples[0].value + 1e-6);
  CHECK(std::abs(r.samples[2].value - kSigma) / kSigma < 1e-2);
  REQUIRE(r.horizon_bracket);
  const double width = (*r.horizon_bracket)[1] - (*r.horizon_bracket)[0];
  CHECK(width <= tail_e(p.q, p.W, 1.0, 8.0) + 1e-15);
  CHECK(width < 1e-5);
  const PropertyCheck* mono = r.residual("h_monotonicity");
  REQUIRE(mono);
  CHECK(mono->total == 3);
}

TEST_CASE("off-center cubes in a constant medium match the centered cube") {
  const Problem p = constant_problem(2, 1.0, 0.25);
  const SweepResult r = off_center_check(p, {1.0, 0.0, 0.0}, {0.3, 0.7, 0.0}, 1.0, {4.0, 8.0, 16.0}, {1});
  REQUIRE(r.auxiliary.size() == r.samples.size());
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    CHECK(std::abs(r.samples[i].value - r.auxiliary[i].sample.value) <= 1e-6 * r.auxiliary[i].sample.value);
  }
  for (const auto& c : r.comparisons) CHECK(c.agrees());
  CHECK(r.passed());
}

TEST_CASE("rotated frames") {
  const Problem p2 = constant_problem(2, 1.0, 0.25);
  const Vec3 e{0.6, 0.8, 0.0};
  const Frame flipped{Vec3{0.8, -0.6, 0.0}, Vec3{}};
  const FrameCheck a = rotated_frame_check(p2, e, flipped, 4.0, 4.0, 0);
  CHECK(a.difference <= 1e-10 * a.value_default);

  Problem p3 = constant_problem(3, 1.0, 0.25);
  const Vec3 e3{0.0, 0.0, 1.0};
  const double c = std::cos(kPi / 6), s = std::sin(kPi / 6);
  const Frame rot{Vec3{c, s, 0.0}, Vec3{-s, c, 0.0}};
  const FrameCheck b = rotated_frame_check(p3, e3, rot, 2.0, 2.0, 0);
  CHECK(b.relative < 1e-2);

  const FrameCheck r = rotated_frame_check(checker_problem(0.25), e, flipped, 4.0, 4.0, 5);
  CHECK(r.value_alt > 0.0);
  CHECK(r.difference == std::abs(r.value_default - r.value_alt));
}

TEST_CASE("split subadditivity in a random medium") {
  const PropertyCheck c = split_check(checker_problem(0.25), {1.0, 0.0, 0.0}, 8.0, 4.0, {1, 2, 3});
  CHECK(c.total == 3);
  CHECK(c.passed());
}

TEST_CASE("Wulff scan of a constant medium is isotropic") {
  const Problem p = constant_problem(2, 1.0, 0.25);
  const WulffResult w = wulff_scan(p, 4, 4.0, 4.0, {1});
  REQUIRE(w.table.values.size() == 4);
  for (double v : w.table.values) CHECK(std::abs(v / w.table.values[0] - 1.0) < 0.02);
  CHECK(w.convexity.passed());
  CHECK(w.band.passed());
  CHECK_THROWS_AS(wulff_scan(p, 3, 4.0, 4.0, {1}), std::invalid_argument);
  CHECK_THROWS_AS(wulff_scan(constant_problem(3, 1.0, 0.25), 4, 4.0, 4.0, {1}), std::invalid_argument);
}

TEST_CASE("recovery sequence in a constant medium") {
  const Problem p = constant_problem(2, 1.0, 0.1);
  const std::vector<double> eps{1.0 / 4.0, 1.0 / 8.0};
  const RecoveryResult r = recovery_energy(p, {1.0, 0.0, 0.0}, {}, 1.0, eps, kSigma);
  REQUIRE(r.series.size() == 2);
  for (const auto& pt : r.series) {
    CHECK(pt.value > 0.0);
    CHECK(pt.value <= pt.candidate);
  }
  CHECK(r.bound.passed());
  CHECK(r.relative_error < 0.05);
  CHECK_THROWS_AS(recovery_energy(p, {1.0, 0.0, 0.0}, {}, 1.0, {0.1, 0.2}, kSigma), std::invalid_argument);
}

TEST_CASE("sweep input validation") {
  const Problem p = constant_problem(2, 1.0, 0.25);
  CHECK_THROWS_AS(h_sweep(p, {1.0, 0.0, 0.0}, 4.0, {4.0, 2.0}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(r_sweep(p, {1.0, 0.0, 0.0}, HeightRule{}, {4.0, 8.0}, {}), std::invalid_argument);
  CHECK_THROWS_AS(off_center_check(p, {1.0, 0.0, 0.0}, {}, 0.0, {4.0}, {1}), std::invalid_argument);
}
