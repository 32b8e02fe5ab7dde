#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ahc/grid.hpp"
#include "ahc/medium.hpp"
#include "ahc/potential.hpp"

namespace ahc {

struct SolverOptions {
  int max_iters = 200000;
  /// Sup norm of the projected, volume-scaled gradient at which iteration stops.
  double grad_tol = 1e-6;
  /// Relative energy decrease over a window of kEnergyWindow accepted steps at which iteration stops.
  double energy_tol = 1e-14;
  double initial_step = 1e-2;
  double smoothing_delta = 0.0;
  bool warm_start = true;

  static constexpr int kEnergyWindow = 20;

  void validate() const;
};

struct MinimizeResult {
  Configuration u;
  double energy = 0.0;
  double initial_energy = 0.0;
  int iters = 0;
  int evaluations = 0;
  double grad_norm = 0.0;
  bool converged = false;
  /// Accepted energies never increased.
  bool monotone = true;
  std::string stop_reason;
};

/// Box-constrained minimization of F_eps(.; A) over the free nodes of u0.
///
/// Spectral projected gradient: Barzilai-Borwein steps, projection onto [-1, 1],
/// Armijo backtracking by halving. Pinned nodes are never written. Hitting
/// max_iters with the gradient above tolerance returns a usable, unconverged result.
MinimizeResult minimize(const FinslerMedium& medium, const DoubleWell& W, Configuration u0, const SolverOptions& opts,
                        double eps = 1.0);

/// Optimality slack used by property checks: grad_tol * sqrt(nodes) * spacing^(d/2).
double solver_slack(const CylinderDomain& domain, const SolverOptions& opts);

/// Cylinder anchor + Q(cross_center, R) (+)_e (-h, h) on a grid of the given spacing.
struct DomainSpec {
  int dim = 2;
  double R = 8.0;
  double h = 8.0;
  double spacing = 0.1;
  std::array<double, 2> cross_center{0.0, 0.0};
  Vec3 anchor{};
  std::optional<Frame> frame;
};

struct SurfaceTensionSample {
  int dim = 2;
  Vec3 e{};
  double R = 0.0;
  double h = 0.0;
  double kappa = 0.0;
  double rho = 1.0;
  std::uint64_t seed = 0;
  Vec3 x0{};
  std::array<double, 2> cross_center{0.0, 0.0};
  /// Minimized energy.
  double value = 0.0;
  /// value * R^(1-d).
  double normalized = 0.0;
  /// Energy of the planar candidate T_{x0} q_e.
  double candidate = 0.0;
  double slack = 0.0;
  int iters = 0;
  double grad_norm = 0.0;
  bool converged = false;
  bool monotone = true;
  double wall_ms = 0.0;
};

/// Phi(e, x0, A): minimal energy on A with trace T_{x0} q_e.
/// `warm` (if compatible with the new grid) seeds the interior; `minimizer` receives the solution.
SurfaceTensionSample finite_volume_sigma(const Vec3& e, const Vec3& x0, const DomainSpec& domain,
                                         const FinslerMedium& medium, const DoubleWell& W,
                                         const TransitionProfile& q, const SolverOptions& opts,
                                         const Configuration* warm = nullptr, Configuration* minimizer = nullptr);

/// phi(e, Q(0, R), h) = Phi(e, 0, Q(0, R) (+)_e (-h, h)).
SurfaceTensionSample centered_sigma(const Vec3& e, double R, double h, double spacing, const FinslerMedium& medium,
                                    const DoubleWell& W, const TransitionProfile& q, const SolverOptions& opts,
                                    const Configuration* warm = nullptr, Configuration* minimizer = nullptr);

/// Copy interior values of `previous` onto coincident interior nodes of `target`.
/// Returns false (target untouched) when the grids are not node-aligned.
bool extend_warm_start(const Configuration& previous, Configuration& target);

}  // namespace ahc
