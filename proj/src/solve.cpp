#include "ahc/solve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace ahc {

void SolverOptions::validate() const {
  if (max_iters < 1) throw std::invalid_argument("solver.max_iters must be >= 1");
  if (!(grad_tol >= 0.0)) throw std::invalid_argument("solver.grad_tol must be >= 0");
  if (!(energy_tol >= 0.0)) throw std::invalid_argument("solver.energy_tol must be >= 0");
  if (!(initial_step > 0.0)) throw std::invalid_argument("solver.initial_step must be > 0");
  if (!(smoothing_delta >= 0.0)) throw std::invalid_argument("solver.smoothing_delta must be >= 0");
}

double solver_slack(const CylinderDomain& domain, const SolverOptions& opts) {
  return opts.grad_tol * std::sqrt(static_cast<double>(domain.node_count())) *
         std::pow(domain.spacing, 0.5 * domain.dim);
}

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-10;
constexpr double kMaxStep = 1e10;

double projected_gradient_norm(std::span<const double> x, std::span<const double> g,
                               std::span<const std::uint8_t> pinned, double inv_vol) {
  double sup = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (pinned[i]) continue;
    const double stepped = std::clamp(x[i] - g[i] * inv_vol, -1.0, 1.0);
    sup = std::max(sup, std::abs(x[i] - stepped));
  }
  return sup;
}

}  // namespace

MinimizeResult minimize(const FinslerMedium& medium, const DoubleWell& W, Configuration u0, const SolverOptions& opts,
                        double eps) {
  opts.validate();
  const EnergyModel model(medium, W, u0.domain, eps, opts.smoothing_delta);
  const std::size_t n = u0.values.size();
  if (u0.pinned.size() != n) throw std::invalid_argument("configuration mask size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (!u0.pinned[i]) u0.values[i] = std::clamp(u0.values[i], -1.0, 1.0);
  }

  const double inv_vol = 1.0 / u0.domain.cell_volume();
  std::vector<double> x = std::move(u0.values);
  std::vector<double> g(n), trial(n), trial_g(n), dir(n);
  const auto& pinned = u0.pinned;

  MinimizeResult res;
  double E = model.energy_and_gradient(x, g);
  ++res.evaluations;
  for (std::size_t i = 0; i < n; ++i) {
    if (pinned[i]) g[i] = 0.0;
  }
  res.initial_energy = E;
  double alpha = opts.initial_step;
  std::vector<double> history{E};
  res.stop_reason = "max_iters";

  int it = 0;
  for (; it < opts.max_iters; ++it) {
    res.grad_norm = projected_gradient_norm(x, g, pinned, inv_vol);
    if (res.grad_norm <= opts.grad_tol) {
      res.converged = true;
      res.stop_reason = "grad_tol";
      break;
    }
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dir[i] = pinned[i] ? 0.0 : std::clamp(x[i] - alpha * g[i] * inv_vol, -1.0, 1.0) - x[i];
      slope += g[i] * dir[i];
    }
    double lam = 1.0;
    double En = E;
    bool accepted = false;
    while (lam > 1e-30) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = pinned[i] ? x[i] : x[i] + lam * dir[i];
      En = model.energy_and_gradient(trial, trial_g);
      ++res.evaluations;
      if (En <= E + kArmijo * lam * slope) {
        accepted = true;
        break;
      }
      lam *= 0.5;
    }
    if (!accepted) {
      res.stop_reason = "line_search_stalled";
      break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (pinned[i]) trial_g[i] = 0.0;
    }
    double ss = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = trial[i] - x[i];
      const double y = (trial_g[i] - g[i]) * inv_vol;
      ss += s * s;
      sy += s * y;
    }
    if (En > E) res.monotone = false;
    std::swap(x, trial);
    std::swap(g, trial_g);
    E = En;
    alpha = sy > 0.0 ? std::clamp(ss / sy, kMinStep, kMaxStep) : kMaxStep;

    history.push_back(E);
    const std::size_t w = SolverOptions::kEnergyWindow;
    if (history.size() > w) {
      const double old = history[history.size() - 1 - w];
      if (old - E <= opts.energy_tol * std::max(std::abs(E), 1e-300) * w) {
        ++it;
        res.grad_norm = projected_gradient_norm(x, g, pinned, inv_vol);
        res.converged = true;
        res.stop_reason = "energy_tol";
        break;
      }
    }
    if (ss == 0.0) {
      ++it;
      res.stop_reason = "stationary";
      res.grad_norm = projected_gradient_norm(x, g, pinned, inv_vol);
      res.converged = true;
      break;
    }
  }
  if (res.stop_reason == "max_iters") res.grad_norm = projected_gradient_norm(x, g, pinned, inv_vol);
  res.iters = it;
  res.energy = E;
  u0.values = std::move(x);
  res.u = std::move(u0);
  return res;
}

bool extend_warm_start(const Configuration& previous, Configuration& target) {
  const CylinderDomain& P = previous.domain;
  const CylinderDomain& T = target.domain;
  if (P.dim != T.dim) return false;
  const int d = T.dim;
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); };
  for (int k = 0; k < 3; ++k) {
    if (!close(P.e[k], T.e[k])) return false;
    for (int j = 0; j + 1 < d; ++j) {
      if (!close(P.frame[j][k], T.frame[j][k])) return false;
    }
  }
  std::array<int, 3> shift{0, 0, 0};
  const Vec3 delta = T.anchor - P.anchor;
  for (int k = 0; k < d; ++k) {
    if (!close(P.steps[k], T.steps[k])) return false;
    const double along = k + 1 < d ? dot(T.frame[k], delta) : dot(T.e, delta);
    const double offset = (T.origin[k] + along - P.origin[k]) / T.steps[k];
    const double rounded = std::round(offset);
    if (std::abs(offset - rounded) > 1e-6) return false;
    shift[k] = static_cast<int>(rounded);
  }
  const std::size_t n = T.node_count();
  for (std::size_t i = 0; i < n; ++i) {
    if (target.pinned[i]) continue;
    auto idx = T.node_index(i);
    bool inside = true;
    for (int k = 0; k < d; ++k) {
      idx[k] += shift[k];
      if (idx[k] < 0 || idx[k] >= P.counts[k]) inside = false;
    }
    if (inside) target.values[i] = previous.values[P.flat_index(idx)];
  }
  return true;
}

SurfaceTensionSample finite_volume_sigma(const Vec3& e, const Vec3& x0, const DomainSpec& spec,
                                         const FinslerMedium& medium, const DoubleWell& W,
                                         const TransitionProfile& q, const SolverOptions& opts,
                                         const Configuration* warm, Configuration* minimizer) {
  const auto start = std::chrono::steady_clock::now();
  const CylinderDomain domain =
      build_cylinder(spec.dim, e, spec.cross_center, spec.R, spec.h, spec.spacing, spec.anchor, spec.frame);
  Configuration u0 = planar_data(domain, x0, q);

  SurfaceTensionSample s;
  s.dim = spec.dim;
  s.e = e;
  s.R = spec.R;
  s.h = spec.h;
  s.kappa = spec.h / spec.R;
  s.seed = medium.seed();
  s.x0 = x0;
  s.cross_center = spec.cross_center;
  s.candidate = EnergyModel(medium, W, domain, 1.0, opts.smoothing_delta).energy(u0.values);
  s.slack = solver_slack(domain, opts);
  if (warm && opts.warm_start) extend_warm_start(*warm, u0);

  MinimizeResult r = minimize(medium, W, std::move(u0), opts);
  s.value = r.energy;
  s.normalized = r.energy * std::pow(spec.R, 1 - spec.dim);
  s.iters = r.iters;
  s.grad_norm = r.grad_norm;
  s.converged = r.converged;
  s.monotone = r.monotone;
  if (minimizer) *minimizer = std::move(r.u);
  s.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return s;
}

SurfaceTensionSample centered_sigma(const Vec3& e, double R, double h, double spacing, const FinslerMedium& medium,
                                    const DoubleWell& W, const TransitionProfile& q, const SolverOptions& opts,
                                    const Configuration* warm, Configuration* minimizer) {
  DomainSpec spec;
  spec.dim = medium.dim();
  spec.R = R;
  spec.h = h;
  spec.spacing = spacing;
  return finite_volume_sigma(e, Vec3{}, spec, medium, W, q, opts, warm, minimizer);
}

}  // namespace ahc
