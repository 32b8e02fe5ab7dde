#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace ahc {

/// Double-well potential W on [-1, 1], vanishing exactly at u = +-1.
class DoubleWell {
 public:
  enum class Form { Quartic, Tabulated };

  /// W(u) = scale * (1 - u^2)^2.
  static DoubleWell quartic(double scale = 1.0);
  /// Values of W on a uniform grid over [-1, 1] (at least 4 points), cubic B-spline interpolation.
  static DoubleWell tabulated(std::vector<double> values);

  Form form() const { return form_; }
  double scale() const { return scale_; }

  /// Unchecked evaluation; callers guarantee u in [-1, 1].
  double value(double u) const {
    if (form_ == Form::Quartic) {
      const double a = 1.0 - u * u;
      return scale_ * a * a;
    }
    return tabulated_value(u);
  }
  double derivative(double u) const {
    if (form_ == Form::Quartic) return -4.0 * scale_ * u * (1.0 - u * u);
    return tabulated_derivative(u);
  }
  /// sup of W over [-1, 1].
  double sup_norm() const;
  /// Adaptive quadrature of f over [-1, 1], split at the table nodes for tabulated forms.
  double integrate_over_wells(const std::function<double(double)>& f) const;

 private:
  double tabulated_value(double u) const;
  double tabulated_derivative(double u) const;

  Form form_ = Form::Quartic;
  double scale_ = 1.0;
  struct Table;
  std::shared_ptr<const Table> table_;
};

/// Boundary transition profile q: R -> [-1, 1] with q(+-inf) = +-1.
class TransitionProfile {
 public:
  enum class Form { Tanh, Tabulated };

  static TransitionProfile tanh_profile();
  /// q sampled uniformly on [s_min, s_max]; outside the table q is +-1.
  static TransitionProfile tabulated(double s_min, double s_max, std::vector<double> values);

  Form form() const { return form_; }
  double value(double s) const;
  double derivative(double s) const;

 private:
  Form form_ = Form::Tanh;
  double s_min_ = 0.0, s_max_ = 0.0;
  struct Table;
  std::shared_ptr<const Table> table_;
};

/// Checked evaluation of W; throws std::out_of_range outside [-1, 1].
double eval_w(const DoubleWell& W, double u);

/// c_W = int_{-1}^{1} sqrt(W).
double c_w(const DoubleWell& W);

/// Surface tension of a homogeneous medium phi = phi_value * |.|: phi_value * int sqrt(2 W).
double sigma_1d(const DoubleWell& W, double phi_value);

/// e(h) = int_{|s| > h} (Lambda q'^2 / 2 + W(q)) ds.
double tail_e(const TransitionProfile& q, const DoubleWell& W, double Lambda_cap, double h);

/// C_Lambda = e(0).
double c_lambda(const TransitionProfile& q, const DoubleWell& W, double Lambda_cap);

std::string to_string(DoubleWell::Form form);
std::string to_string(TransitionProfile::Form form);

}  // namespace ahc
