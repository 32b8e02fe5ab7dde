#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ahc/solve.hpp"

using namespace ahc;

namespace {

const double kSigma = 4.0 * std::sqrt(2.0) / 3.0;

FinslerMedium constant_medium(int dim, double c) {
  MediumParams p;
  p.dim = dim;
  p.lambda = std::min(1.0, c * c);
  p.Lambda_cap = std::max(4.0, c * c);
  p.norms = {CellNorm::scalar(c)};
  return make_medium(MediumKind::Constant, p, 0);
}

FinslerMedium checkerboard(int dim, std::uint64_t seed) {
  MediumParams p;
  p.dim = dim;
  p.lambda = 1.0;
  p.Lambda_cap = 4.0;
  p.norms = {CellNorm::scalar(1.0), CellNorm::scalar(2.0)};
  p.weights = {0.5, 0.5};
  return make_medium(MediumKind::RandomCheckerboard, p, seed);
}

SolverOptions tight() {
  SolverOptions o;
  o.grad_tol = 1e-7;
  return o;
}

const DoubleWell W = DoubleWell::quartic();
const TransitionProfile Q = TransitionProfile::tanh_profile();

}  // namespace

TEST_CASE("constant data is a fixed point") {
  const auto d = build_cylinder(2, {1.0, 0.0, 0.0}, {0, 0}, 4.0, 4.0, 0.25, {});
  Configuration u = planar_data(d, {}, Q);
  std::fill(u.values.begin(), u.values.end(), 1.0);
  const MinimizeResult r = minimize(checkerboard(2, 1), W, u, SolverOptions{});
  CHECK(r.energy == 0.0);
  CHECK(r.iters <= 1);
  CHECK(r.converged);
  CHECK(r.u.values == u.values);
}

TEST_CASE("one-dimensional optimal profile") {
  DomainSpec spec;
  spec.dim = 1;
  spec.h = 10.0;
  spec.spacing = 0.01;
  const auto s = finite_volume_sigma({1.0, 0.0, 0.0}, {}, spec, constant_medium(1, 1.0), W, Q, tight());
  CHECK(s.converged);
  CHECK(s.monotone);
  CHECK(std::abs(s.value - kSigma) / kSigma < 1e-2);
  // The optimal profile beats the tanh candidate (about 2.0).
  CHECK(s.value < s.candidate);
  CHECK(std::abs(s.candidate - 2.0) < 1e-3);
}

TEST_CASE("two-dimensional homogeneous value and upper bound") {
  const auto s = centered_sigma({1.0, 0.0, 0.0}, 8.0, 8.0, 0.1, constant_medium(2, 1.0), W, Q, SolverOptions{});
  CHECK(s.converged);
  CHECK(std::abs(s.normalized - kSigma) / kSigma < 0.02);
  const double C = c_lambda(Q, W, 4.0);
  CHECK(s.value <= C * 8.0 * 1.01);
  CHECK(s.value <= s.candidate);
  CHECK(s.kappa == 1.0);
}

TEST_CASE("pinned nodes are untouched and iterates stay in the box") {
  const auto d = build_cylinder(2, {0.6, 0.8, 0.0}, {0, 0}, 4.0, 3.0, 0.25, {});
  const Configuration u0 = planar_data(d, {0.1, 0.2, 0.0}, Q);
  Configuration start = u0;
  for (std::size_t i = 0; i < start.values.size(); ++i) {
    if (!start.pinned[i]) start.values[i] = (i % 3 == 0) ? 5.0 : -0.3;  // projected on entry
  }
  const MinimizeResult r = minimize(checkerboard(2, 4), W, start, SolverOptions{});
  CHECK(r.monotone);
  CHECK(r.energy <= r.initial_energy);
  for (std::size_t i = 0; i < u0.values.size(); ++i) {
    REQUIRE(r.u.values[i] >= -1.0);
    REQUIRE(r.u.values[i] <= 1.0);
    if (u0.pinned[i]) REQUIRE(r.u.values[i] == u0.values[i]);
  }
  CHECK(r.energy == doctest::Approx(energy(checkerboard(2, 4), W, r.u)).epsilon(1e-14));
}

TEST_CASE("hitting max_iters returns a flagged result") {
  SolverOptions o;
  o.max_iters = 2;
  o.grad_tol = 0.0;
  const auto d = build_cylinder(2, {1.0, 0.0, 0.0}, {0, 0}, 4.0, 4.0, 0.25, {});
  const MinimizeResult r = minimize(checkerboard(2, 2), W, planar_data(d, {}, Q), o);
  CHECK_FALSE(r.converged);
  CHECK(r.stop_reason == "max_iters");
  CHECK(r.iters == 2);
  CHECK(r.energy <= r.initial_energy);
}

TEST_CASE("solver options are validated") {
  SolverOptions o;
  o.max_iters = 0;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
  o = SolverOptions{};
  o.grad_tol = -1.0;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
  o = SolverOptions{};
  o.initial_step = 0.0;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
}

TEST_CASE("constant medium scaled by c scales the minimum by c") {
  // The tanh trace is not the optimal profile, and the mismatch on the lateral faces costs O(1)
  // against the O(R) interface; R = 16 keeps it under the tolerance.
  const auto a = centered_sigma({1.0, 0.0, 0.0}, 16.0, 8.0, 0.1, constant_medium(2, 1.0), W, Q, SolverOptions{});
  const auto b = centered_sigma({1.0, 0.0, 0.0}, 16.0, 8.0, 0.1, constant_medium(2, 1.5), W, Q, SolverOptions{});
  CHECK(std::abs(b.value / (1.5 * a.value) - 1.0) < 5e-3);
  CHECK(std::abs(a.normalized - sigma_1d(W, 1.0)) / sigma_1d(W, 1.0) < 0.02);
  CHECK(std::abs(b.normalized - sigma_1d(W, 1.5)) / sigma_1d(W, 1.5) < 0.02);
}

TEST_CASE("translation within the plane and isotropy in a constant medium") {
  const FinslerMedium m = constant_medium(2, 1.0);
  DomainSpec spec;
  spec.R = 4.0;
  spec.h = 4.0;
  spec.spacing = 0.25;
  const auto base = finite_volume_sigma({1.0, 0.0, 0.0}, {}, spec, m, W, Q, SolverOptions{});
  spec.anchor = {0.0, 2.5, 0.0};
  const auto moved = finite_volume_sigma({1.0, 0.0, 0.0}, {0.0, 2.5, 0.0}, spec, m, W, Q, SolverOptions{});
  CHECK(std::abs(moved.value - base.value) <= 1e-8 * base.value);

  const auto ex = centered_sigma({1.0, 0.0, 0.0}, 4.0, 4.0, 0.25, m, W, Q, SolverOptions{});
  const auto ey = centered_sigma({0.0, 1.0, 0.0}, 4.0, 4.0, 0.25, m, W, Q, SolverOptions{});
  CHECK(std::abs(ex.value - ey.value) <= 1e-6 * ex.value);
}

TEST_CASE("centered_sigma is finite_volume_sigma at x0 = 0") {
  const FinslerMedium m = checkerboard(2, 6);
  DomainSpec spec;
  spec.R = 4.0;
  spec.h = 3.0;
  spec.spacing = 0.25;
  const auto a = finite_volume_sigma({0.6, 0.8, 0.0}, {}, spec, m, W, Q, SolverOptions{});
  const auto b = centered_sigma({0.6, 0.8, 0.0}, 4.0, 3.0, 0.25, m, W, Q, SolverOptions{});
  CHECK(a.value == b.value);
  CHECK(a.iters == b.iters);
}

TEST_CASE("almost non-increasing in h") {
  const double Lambda = 4.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const FinslerMedium m = checkerboard(2, seed);
    const double R = 4.0;
    const auto low = centered_sigma({1.0, 0.0, 0.0}, R, 2.0, 0.25, m, W, Q, SolverOptions{});
    const auto high = centered_sigma({1.0, 0.0, 0.0}, R, 4.0, 0.25, m, W, Q, SolverOptions{});
    CHECK(high.value <= low.value + R * tail_e(Q, W, Lambda, 2.0) + 1e-3 * R);
  }
}

TEST_CASE("warm starts transfer values between aligned grids") {
  const FinslerMedium m = checkerboard(2, 9);
  Configuration small;
  centered_sigma({1.0, 0.0, 0.0}, 4.0, 2.0, 0.25, m, W, Q, SolverOptions{}, nullptr, &small);
  const auto dom = build_cylinder(2, {1.0, 0.0, 0.0}, {0, 0}, 4.0, 4.0, 0.25, {});
  Configuration big = planar_data(dom, {}, Q);
  const Configuration before = big;
  REQUIRE(extend_warm_start(small, big));
  // Interior nodes of the big grid inside the small one take its values.
  const auto idx_small = small.domain.flat_index({5, 8, 0});
  const auto idx_big = dom.flat_index({5, 16, 0});
  CHECK(big.values[idx_big] == small.values[idx_small]);
  for (std::size_t i = 0; i < big.values.size(); ++i) {
    if (big.pinned[i]) REQUIRE(big.values[i] == before.values[i]);
  }
  // A grid offset by half a step is not aligned.
  const auto shifted = build_cylinder(2, {1.0, 0.0, 0.0}, {0.125, 0}, 4.0, 4.0, 0.25, {});
  Configuration other = planar_data(shifted, {}, Q);
  const Configuration other_before = other;
  CHECK_FALSE(extend_warm_start(small, other));
  CHECK(other.values == other_before.values);
}

TEST_CASE("solver slack formula") {
  const auto d = build_cylinder(2, {1.0, 0.0, 0.0}, {0, 0}, 4.0, 4.0, 0.25, {});
  SolverOptions o;
  o.grad_tol = 1e-6;
  CHECK(solver_slack(d, o) == doctest::Approx(1e-6 * std::sqrt(17.0 * 33.0) * 0.25));
}
