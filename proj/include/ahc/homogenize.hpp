#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ahc/medium.hpp"
#include "ahc/potential.hpp"
#include "ahc/solve.hpp"

namespace ahc {

/// Everything a sweep needs besides the geometry.
struct Problem {
  MediumSpec medium;
  DoubleWell W = DoubleWell::quartic();
  TransitionProfile q = TransitionProfile::tanh_profile();
  SolverOptions solver;
  double spacing = 0.1;
  int jobs = 1;

  int dim() const { return medium.params.dim; }
};

/// Tally of one inequality lhs <= rhs checked on many instances.
/// margin = lhs - rhs; strict when margin <= 0, within slack when margin <= slack.
struct PropertyCheck {
  std::string name;
  int total = 0;
  int strict = 0;
  int within_slack = 0;
  double worst_margin = -std::numeric_limits<double>::infinity();
  double worst_slack = 0.0;

  void add(double margin, double slack);
  bool passed() const { return within_slack == total; }
  double strict_fraction() const { return total == 0 ? 1.0 : static_cast<double>(strict) / total; }
};

/// Sample mean and (n - 1) standard deviation of normalized values at one sweep parameter.
struct EnsembleStat {
  double param = 0.0;
  int count = 0;
  double mean = 0.0;
  double std = 0.0;
  double stderr_mean = 0.0;
};

EnsembleStat summarize(double param, std::span<const double> values);

struct Extrapolation {
  double limit = 0.0;
  double stderr_limit = 0.0;
  double slope = 0.0;  // b in a + b / R
  int points = 0;
  bool weighted = false;
  bool ill_conditioned = false;
};

/// Fit value = a + b / R. With variances (all positive) the fit is weighted and the
/// covariance is (X^T V^-1 X)^-1; otherwise ordinary least squares scaled by RSS / (n - 2).
Extrapolation subadditive_extrapolate(std::span<const double> R, std::span<const double> values,
                                      std::span<const double> variances = {});

/// Two ensemble estimates compared within 3x their combined standard error.
struct Comparison {
  std::string name;
  double a = 0.0, a_err = 0.0;
  double b = 0.0, b_err = 0.0;
  double tolerance = 0.0;
  bool agrees() const;
};

enum class SweepAxis { H, R, DiagonalKappaR };
std::string to_string(SweepAxis axis);

struct AuxSample {
  std::string role;
  SurfaceTensionSample sample;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::R;
  std::vector<SurfaceTensionSample> samples;  // sorted by (parameter, seed)
  std::vector<AuxSample> auxiliary;
  std::vector<EnsembleStat> ensemble;
  std::optional<Extrapolation> limit;
  /// h-sweeps: the infinite-horizon value lies below terminal + R^(d-1) e(h_max).
  std::optional<std::array<double, 2>> horizon_bracket;
  std::vector<PropertyCheck> residuals;
  std::vector<Comparison> comparisons;
  std::vector<std::string> flags;

  const PropertyCheck* residual(const std::string& name) const;
  bool passed() const;
};

/// Height of the cylinders in an R-sweep: kappa * R, or a fixed h.
struct HeightRule {
  double kappa = 1.0;
  std::optional<double> fixed;
  double at(double R) const { return fixed ? *fixed : kappa * R; }
};

SweepResult h_sweep(const Problem& problem, const Vec3& e, double R, const std::vector<double>& h_list,
                    const std::vector<std::uint64_t>& seeds);

SweepResult r_sweep(const Problem& problem, const Vec3& e, const HeightRule& height,
                    const std::vector<double>& R_list, const std::vector<std::uint64_t>& seeds);

/// Subadditivity over the split of Q(0, R) into 2^(d-1) cubes of side R / 2, one instance per seed.
PropertyCheck split_check(const Problem& problem, const Vec3& e, double R, double h,
                          const std::vector<std::uint64_t>& seeds, std::vector<AuxSample>* samples = nullptr);

/// Phi(e, R x0, R Q^e(x0, rho)) normalized by (R rho)^(1-d), against the centered cube of the same size.
SweepResult off_center_check(const Problem& problem, const Vec3& e, const Vec3& x0, double rho,
                             const std::vector<double>& R_list, const std::vector<std::uint64_t>& seeds);

struct FrameCheck {
  double value_default = 0.0;
  double value_alt = 0.0;
  double difference = 0.0;
  double relative = 0.0;
};

FrameCheck rotated_frame_check(const Problem& problem, const Vec3& e, const Frame& alt_frame, double R, double h,
                               std::uint64_t seed);

/// Effective surface tension sampled on directions at angles in [0, pi) (d = 2), extended evenly.
struct SurfaceTensionTable {
  std::vector<double> angles;
  std::vector<Vec3> directions;
  std::vector<double> values;
  std::vector<double> stderrs;

  /// One-homogeneous extension, piecewise linear in angle between table entries.
  double at(const Vec3& p) const;
  SurfaceTensionTable scaled(double t) const;
};

SurfaceTensionTable make_table(std::vector<double> angles, std::vector<double> values,
                               std::vector<double> stderrs = {});

struct WulffResult {
  SurfaceTensionTable table;
  /// Constant phi = 1 value per direction on the same grid.
  std::vector<double> calibration;
  std::vector<SurfaceTensionSample> samples;
  PropertyCheck convexity;
  PropertyCheck band;
  double max_adjacent_change = 0.0;
};

WulffResult wulff_scan(const Problem& problem, int direction_count, double R, double h,
                       const std::vector<std::uint64_t>& seeds);

/// Sampled triples theta_i < theta_k < theta_j (span < pi): phi(e_k) <= a phi(e_i) + b phi(e_j)
/// with e_k = a e_i + b e_j, tolerance 3x the combined standard error plus `floor`.
PropertyCheck convexity_check(const SurfaceTensionTable& table, double floor = 0.0);

using Point2 = std::array<double, 2>;

struct Polyline {
  std::vector<Point2> points;
  bool closed = false;
};

/// Sum over segments of phi(normal) * length, segments clipped to the convex polygon `region`
/// (counter-clockwise; empty means the whole plane). Rejects degenerate or self-intersecting chains.
double perimeter(const SurfaceTensionTable& table, const Polyline& interface, std::span<const Point2> region = {});

std::vector<Point2> square_region(const Point2& center, double side, double angle = 0.0);

struct RecoveryPoint {
  double eps = 0.0;
  double value = 0.0;
  double candidate = 0.0;
  int iters = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

struct RecoveryResult {
  std::vector<RecoveryPoint> series;
  double reference = 0.0;  // flat-interface perimeter phi(e) rho^(d-1)
  double relative_error = 0.0;
  PropertyCheck decreasing;
  PropertyCheck bound;
  std::vector<std::string> flags;
};

/// F_eps minimized on Q^e(x0, rho) with trace T_{x0} q^eps_e for each eps (grid spacing eps * problem.spacing).
RecoveryResult recovery_energy(const Problem& problem, const Vec3& e, const Vec3& x0, double rho,
                               const std::vector<double>& eps_list, double reference);

}  // namespace ahc
