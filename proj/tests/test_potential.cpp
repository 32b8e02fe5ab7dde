#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ahc/potential.hpp"

using namespace ahc;

namespace {

// Closed forms for q = tanh, W = (1 - u^2)^2: both integrand terms are multiples of sech^4,
// and int_h^inf sech^4 = 2/3 - tanh h + tanh^3 h / 3.
double sech4_tail(double h) {
  const double t = std::tanh(h);
  return 2.0 / 3.0 - t + t * t * t / 3.0;
}

double tail_closed_form(double Lambda, double h) { return 2.0 * (Lambda / 2.0 + 1.0) * sech4_tail(h); }

DoubleWell quartic_table(int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    const double u = -1.0 + 2.0 * i / (n - 1);
    v[i] = (1.0 - u * u) * (1.0 - u * u);
  }
  return DoubleWell::tabulated(v);
}

}  // namespace

TEST_CASE("quartic well values") {
  const DoubleWell W = DoubleWell::quartic();
  CHECK(eval_w(W, 1.0) == 0.0);
  CHECK(eval_w(W, -1.0) == 0.0);
  CHECK(eval_w(W, 0.0) == 1.0);
  CHECK(eval_w(W, 0.5) == 0.5625);
  CHECK_THROWS_AS(eval_w(W, 1.0 + 1e-9), std::out_of_range);
  CHECK_THROWS_AS(eval_w(W, -2.0), std::out_of_range);
  CHECK(W.sup_norm() == doctest::Approx(1.0));
}

TEST_CASE("quartic derivative matches finite differences") {
  const DoubleWell W = DoubleWell::quartic(3.0);
  for (double u = -0.9; u < 0.95; u += 0.1) {
    const double h = 1e-6;
    const double fd = (W.value(u + h) - W.value(u - h)) / (2 * h);
    CHECK(W.derivative(u) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("c_W") {
  CHECK(c_w(DoubleWell::quartic()) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(c_w(DoubleWell::quartic(4.0)) == doctest::Approx(2.0 * c_w(DoubleWell::quartic())).epsilon(1e-12));
  CHECK(std::abs(c_w(quartic_table(401)) - 4.0 / 3.0) < 1e-8);
}

TEST_CASE("tabulated well reproduces the quartic") {
  const DoubleWell T = quartic_table(401);
  const DoubleWell Q = DoubleWell::quartic();
  for (double u = -1.0; u <= 1.0; u += 0.0137) {
    CHECK(std::abs(T.value(u) - Q.value(u)) < 1e-8);
    CHECK(std::abs(T.derivative(u) - Q.derivative(u)) < 1e-5);
  }
  CHECK(std::abs(sigma_1d(T, 1.0) - sigma_1d(Q, 1.0)) < 1e-8);
}

TEST_CASE("tabulated well validation") {
  CHECK_THROWS_AS(DoubleWell::tabulated({0.0, 1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(DoubleWell::tabulated({0.0, 1.0, -0.5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(DoubleWell::tabulated({0.1, 1.0, 1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(DoubleWell::tabulated({0.0, 1.0, 0.0, 1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("sigma_1d oracle") {
  const DoubleWell W = DoubleWell::quartic();
  const double s1 = 4.0 * std::sqrt(2.0) / 3.0;
  CHECK(sigma_1d(W, 1.0) == doctest::Approx(s1).epsilon(1e-12));
  CHECK(std::abs(sigma_1d(W, 1.0) - 1.8856180832) < 1e-10);
  CHECK(sigma_1d(W, 2.0) == doctest::Approx(8.0 * std::sqrt(2.0) / 3.0).epsilon(1e-12));
  CHECK(sigma_1d(W, std::sqrt(2.0)) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  for (double phi : {0.3, 1.7, 9.0}) CHECK(sigma_1d(W, phi) == doctest::Approx(phi * s1).epsilon(1e-12));
  // Coarse bound sigma <= sqrt(2) phi sup sqrt(W) 2.
  CHECK(sigma_1d(W, 1.0) <= std::sqrt(2.0) * 1.0 * 2.0);
  CHECK_THROWS_AS(sigma_1d(W, 0.0), std::invalid_argument);
}

TEST_CASE("tail functional closed forms") {
  const DoubleWell W = DoubleWell::quartic();
  const TransitionProfile q = TransitionProfile::tanh_profile();
  CHECK(c_lambda(q, W, 2.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-11));
  CHECK(tail_e(q, W, 2.0, 0.0) == doctest::Approx(c_lambda(q, W, 2.0)).epsilon(1e-12));
  // Frozen from the closed form 4 (2/3 - tanh 3 + tanh^3 3 / 3), evaluated at 30 digits.
  CHECK(std::abs(tail_e(q, W, 2.0, 3.0) - 9.76605933571727e-5) < 1e-12);
  CHECK(std::abs(tail_e(q, W, 4.0, 2.0) - 0.00767099226961942) < 1e-12);
  // Lambda -> 0 keeps only int W(q) = 4/3.
  CHECK(c_lambda(q, W, 0.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-11));
  for (double Lambda : {0.5, 1.0, 4.0}) {
    for (double h : {0.0, 0.5, 1.0, 2.5, 5.0, 8.0}) {
      CAPTURE(Lambda);
      CAPTURE(h);
      CHECK(std::abs(tail_e(q, W, Lambda, h) - tail_closed_form(Lambda, h)) < 1e-10);
    }
  }
  CHECK(tail_e(q, W, 2.0, 8.0) < 1e-5);
  CHECK(tail_e(q, W, 2.0, 40.0) < 1e-14);
}

TEST_CASE("tail functional is decreasing") {
  const DoubleWell W = DoubleWell::quartic();
  const TransitionProfile q = TransitionProfile::tanh_profile();
  double prev = tail_e(q, W, 4.0, 0.0);
  for (double h = 0.25; h <= 8.0; h += 0.25) {
    const double v = tail_e(q, W, 4.0, h);
    CHECK(v < prev);
    CHECK(v >= 0.0);
    prev = v;
  }
  CHECK_THROWS_AS(tail_e(q, W, 4.0, -1.0), std::invalid_argument);
}

TEST_CASE("C_Lambda dominates the optimal profile at sqrt(Lambda)") {
  const DoubleWell W = DoubleWell::quartic();
  const TransitionProfile q = TransitionProfile::tanh_profile();
  // Equality at Lambda = 2, where tanh is the optimal profile for phi = sqrt(2).
  for (double Lambda : {1.0, 2.0, 4.0, 9.0}) {
    CHECK(c_lambda(q, W, Lambda) >= sigma_1d(W, std::sqrt(Lambda)) * (1.0 - 1e-12));
  }
}

TEST_CASE("tabulated profile") {
  const int n = 2001;
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = std::tanh(-10.0 + 20.0 * i / (n - 1));
  const TransitionProfile T = TransitionProfile::tabulated(-10.0, 10.0, v);
  const TransitionProfile Q = TransitionProfile::tanh_profile();
  for (double s = -9.5; s < 9.5; s += 0.37) {
    CHECK(std::abs(T.value(s) - Q.value(s)) < 1e-8);
    CHECK(std::abs(T.derivative(s) - Q.derivative(s)) < 1e-6);
  }
  CHECK(T.value(-50.0) == -1.0);
  CHECK(T.value(50.0) == 1.0);
  const DoubleWell W = DoubleWell::quartic();
  CHECK(std::abs(c_lambda(T, W, 2.0) - 8.0 / 3.0) < 1e-6);
  CHECK_THROWS_AS(TransitionProfile::tabulated(1.0, -1.0, v), std::invalid_argument);
  CHECK_THROWS_AS(TransitionProfile::tabulated(-1.0, 1.0, {0.0, 2.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("quadrature is resolved") {
  // A table twice as fine changes the integrals by less than 1e-8.
  const DoubleWell a = quartic_table(801);
  const DoubleWell b = quartic_table(1601);
  CHECK(std::abs(c_w(a) - c_w(b)) < 1e-8);
  CHECK(std::abs(sigma_1d(a, 1.0) - sigma_1d(b, 1.0)) < 1e-8);
}
