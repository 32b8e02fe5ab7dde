#pragma once

#include <vector>

#include "ahc/grid.hpp"

namespace ahc {

/// Axis-aligned box in frame coordinates (y_1, ..., y_{d-1}, t). Only the first d entries matter.
struct FrameBox {
  Vec3 lo{};
  Vec3 hi{};

  bool contains(const Vec3& f, int dim) const;
  /// Euclidean distance from a frame point to the box (0 inside).
  double distance(const Vec3& f, int dim) const;
};

/// What the gluing construction measured. The chain
///   glued <= f_u + f_v + best_cost,  best_cost <= mean_cost <= mean_bound
/// is exact on the grid; rhs = f_u + f_v + C * zeta + slack is the assembled estimate.
struct GlueReport {
  int shells = 0;  // number of nested sets N; N - 1 cut-offs
  double D = 0.0;
  double shell_width = 0.0;
  double cutoff_slope = 0.0;
  double slope_bound = 0.0;  // 2N / D
  std::vector<double> shell_energies;
  int best_shell = 0;  // 1-based, ties to the smallest index
  double best_cost = 0.0;
  double mean_cost = 0.0;

  double glued = 0.0;  // F(w; U u V)
  double f_u = 0.0;    // F(u; U')
  double f_v = 0.0;    // F(v; V)

  double zeta = 0.0;  // measure of the cells of V where |u - v| exceeds the threshold
  double zeta_threshold = 0.0;
  double C1 = 0.0;
  double C = 0.0;  // C1 * (4 + sup W)
  /// Shell-averaged bound terms: gradient part, and W / cut-off parts split on and off the zeta set.
  double mean_gradient_term = 0.0;
  double mean_remainder_on_set = 0.0;
  double mean_remainder_off_set = 0.0;
  double mean_bound = 0.0;
  double slack = 0.0;
  double rhs = 0.0;

  bool pigeonhole_holds() const { return best_cost <= mean_cost; }
  bool estimate_holds() const { return glued <= rhs; }
};

struct GlueResult {
  Configuration w;
  GlueReport report;
};

/// Glue u (inside) to v (outside) with the best of N - 1 piecewise-linear cut-offs psi_i,
/// psi_i = 1 near U, 0 at distance >= D from U. N <= 0 picks ceil(D / (4 spacing)) capped at 64.
GlueResult fundamental_glue(const FinslerMedium& medium, const DoubleWell& W, const Configuration& u,
                            const Configuration& v, const FrameBox& U, const FrameBox& Uprime, const FrameBox& V,
                            double D, int N = 0, double eps = 1.0, double zeta_threshold = 0.05);

}  // namespace ahc
