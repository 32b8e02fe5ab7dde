#include "ahc/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ahc {

namespace {

using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;

constexpr double kTailCutoff = 1e-14;

// Fourth-order one-sided differences for the spline end slopes; the spline's own
// two-point estimate limits it to O(h^2) near the ends.
Spline make_spline(const std::vector<double>& v, double start, double step) {
  const std::size_t n = v.size();
  if (n < 5) return Spline(v.begin(), v.end(), start, step);
  const double left = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * step);
  const double right =
      (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4] + 3.0 * v[n - 5]) / (12.0 * step);
  return Spline(v.begin(), v.end(), start, step, left, right);
}

template <class F>
double integrate(F f, double a, double b) {
  if (!(b > a)) return 0.0;
  // Pieces are at most unit length and the integrands smooth, so a shallow depth limit suffices;
  // it also stops rounding noise in far tails from forcing bisection down to the floor.
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 8, 1e-12);
}

}  // namespace

struct DoubleWell::Table {
  Spline spline;
  double sup = 0.0;
  double step = 0.0;
};

struct TransitionProfile::Table {
  Spline spline;
};

DoubleWell DoubleWell::quartic(double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("quartic scale must be positive");
  DoubleWell w;
  w.form_ = Form::Quartic;
  w.scale_ = scale;
  return w;
}

DoubleWell DoubleWell::tabulated(std::vector<double> values) {
  if (values.size() < 4) throw std::invalid_argument("tabulated W needs at least 4 values");
  for (double v : values) {
    if (!(v >= 0.0)) throw std::invalid_argument("tabulated W must be non-negative");
  }
  if (values.front() != 0.0 || values.back() != 0.0) {
    throw std::invalid_argument("tabulated W must vanish at u = -1 and u = 1");
  }
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw std::invalid_argument("tabulated W must be positive inside (-1, 1)");
  }
  DoubleWell w;
  w.form_ = Form::Tabulated;
  const double step = 2.0 / static_cast<double>(values.size() - 1);
  auto table = std::make_shared<Table>(Table{make_spline(values, -1.0, step), 0.0, step});
  table->sup = *std::max_element(values.begin(), values.end());
  w.table_ = std::move(table);
  return w;
}

double DoubleWell::tabulated_value(double u) const { return std::max(0.0, table_->spline(u)); }

double DoubleWell::tabulated_derivative(double u) const { return table_->spline.prime(u); }

double DoubleWell::sup_norm() const {
  if (form_ == Form::Quartic) return scale_;
  // Spline overshoot between nodes is bounded by a fine scan.
  double sup = table_->sup;
  for (int i = 0; i <= 4000; ++i) sup = std::max(sup, value(-1.0 + 2.0 * i / 4000.0));
  return sup;
}

TransitionProfile TransitionProfile::tanh_profile() { return TransitionProfile{}; }

TransitionProfile TransitionProfile::tabulated(double s_min, double s_max, std::vector<double> values) {
  if (values.size() < 4) throw std::invalid_argument("tabulated q needs at least 4 values");
  if (!(s_max > s_min)) throw std::invalid_argument("tabulated q needs s_max > s_min");
  for (double v : values) {
    if (!(v >= -1.0 && v <= 1.0)) throw std::invalid_argument("tabulated q must lie in [-1, 1]");
  }
  TransitionProfile q;
  q.form_ = Form::Tabulated;
  q.s_min_ = s_min;
  q.s_max_ = s_max;
  const double step = (s_max - s_min) / static_cast<double>(values.size() - 1);
  q.table_ = std::make_shared<Table>(Table{make_spline(values, s_min, step)});
  return q;
}

double TransitionProfile::value(double s) const {
  if (form_ == Form::Tanh) return std::tanh(s);
  if (s <= s_min_) return -1.0;
  if (s >= s_max_) return 1.0;
  return std::clamp(table_->spline(s), -1.0, 1.0);
}

double TransitionProfile::derivative(double s) const {
  if (form_ == Form::Tanh) {
    const double c = 1.0 / std::cosh(s);
    return c * c;
  }
  if (s <= s_min_ || s >= s_max_) return 0.0;
  return table_->spline.prime(s);
}

double eval_w(const DoubleWell& W, double u) {
  if (!(u >= -1.0 && u <= 1.0)) throw std::out_of_range("W is defined on [-1, 1] only");
  return W.value(u);
}

double DoubleWell::integrate_over_wells(const std::function<double(double)>& f) const {
  if (form_ == Form::Quartic) return integrate(f, -1.0, 1.0);
  // One rule per spline interval: the integrand is smooth inside each.
  const auto n = static_cast<int>(std::lround(2.0 / table_->step));
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = -1.0 + i * table_->step;
    const double b = i + 1 == n ? 1.0 : a + table_->step;
    sum += integrate(f, a, b);
  }
  return sum;
}

double c_w(const DoubleWell& W) {
  return W.integrate_over_wells([&](double u) { return std::sqrt(W.value(u)); });
}

double sigma_1d(const DoubleWell& W, double phi_value) {
  if (!(phi_value > 0.0)) throw std::invalid_argument("sigma_1d needs a positive metric value");
  return phi_value * W.integrate_over_wells([&](double u) { return std::sqrt(2.0 * W.value(u)); });
}

double tail_e(const TransitionProfile& q, const DoubleWell& W, double Lambda_cap, double h) {
  if (!(h >= 0.0)) throw std::invalid_argument("tail_e needs h >= 0");
  auto density = [&](double s) {
    const double dq = q.derivative(s);
    return 0.5 * Lambda_cap * dq * dq + W.value(std::clamp(q.value(s), -1.0, 1.0));
  };
  // Truncate each tail where the density has dropped below the cutoff.
  auto far_end = [&](double start, double dir) {
    double len = 1.0;
    while (len < 1e4 && density(start + dir * len) >= kTailCutoff) len *= 2.0;
    return start + dir * len;
  };
  double total = 0.0;
  // Integrate in unit pieces so the adaptive rule resolves the decay.
  auto piecewise = [&](double a, double b) {
    double sum = 0.0;
    for (double x = a; x < b; x += 1.0) sum += integrate(density, x, std::min(b, x + 1.0));
    return sum;
  };
  total += piecewise(h, far_end(h, 1.0));
  const double left = far_end(-h, -1.0);
  total += piecewise(left, -h);
  return total;
}

double c_lambda(const TransitionProfile& q, const DoubleWell& W, double Lambda_cap) {
  return tail_e(q, W, Lambda_cap, 0.0);
}

std::string to_string(DoubleWell::Form form) { return form == DoubleWell::Form::Quartic ? "Quartic" : "Tabulated"; }

std::string to_string(TransitionProfile::Form form) {
  return form == TransitionProfile::Form::Tanh ? "Tanh" : "Tabulated";
}

}  // namespace ahc
