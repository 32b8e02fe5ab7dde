#include "ahc/homogenize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ahc/parallel.hpp"

namespace ahc {

void PropertyCheck::add(double margin, double slack) {
  ++total;
  if (margin <= 0.0) ++strict;
  if (margin <= slack) ++within_slack;
  if (margin > worst_margin) {
    worst_margin = margin;
    worst_slack = slack;
  }
}

EnsembleStat summarize(double param, std::span<const double> values) {
  EnsembleStat s;
  s.param = param;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  s.mean = pairwise_sum(values) / s.count;
  if (s.count > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - s.mean) * (values[i] - s.mean);
    s.std = std::sqrt(pairwise_sum(sq) / (s.count - 1));
    s.stderr_mean = s.std / std::sqrt(static_cast<double>(s.count));
  }
  return s;
}

Extrapolation subadditive_extrapolate(std::span<const double> R, std::span<const double> values,
                                      std::span<const double> variances) {
  const std::size_t n = R.size();
  if (values.size() != n) throw std::invalid_argument("R and values differ in length");
  if (n < 3) throw std::invalid_argument("extrapolation needs at least three points");
  if (!variances.empty() && variances.size() != n) throw std::invalid_argument("variances differ in length");
  for (double r : R) {
    if (!(r > 0.0)) throw std::invalid_argument("R values must be positive");
  }
  Extrapolation out;
  out.points = static_cast<int>(n);
  out.weighted = !variances.empty() && std::all_of(variances.begin(), variances.end(), [](double v) { return v > 0.0; });

  // Normal equations for the basis (1, 1/R).
  double s00 = 0.0, s01 = 0.0, s11 = 0.0, t0 = 0.0, t1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = out.weighted ? 1.0 / variances[i] : 1.0;
    const double x = 1.0 / R[i];
    s00 += w;
    s01 += w * x;
    s11 += w * x * x;
    t0 += w * values[i];
    t1 += w * x * values[i];
  }
  const double det = s00 * s11 - s01 * s01;
  const double scale = s00 * s11;
  if (!(det > 1e-12 * scale)) {
    out.ill_conditioned = true;
    out.limit = t0 / s00;
    out.stderr_limit = std::numeric_limits<double>::infinity();
    return out;
  }
  out.limit = (s11 * t0 - s01 * t1) / det;
  out.slope = (s00 * t1 - s01 * t0) / det;
  double cov_aa = s11 / det;
  if (!out.weighted) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = values[i] - out.limit - out.slope / R[i];
      rss += r * r;
    }
    cov_aa *= rss / static_cast<double>(n - 2);
  }
  out.stderr_limit = std::sqrt(cov_aa);
  return out;
}

bool Comparison::agrees() const {
  return std::abs(a - b) <= 3.0 * std::hypot(a_err, b_err) + tolerance;
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::H:
      return "h";
    case SweepAxis::R:
      return "R";
    case SweepAxis::DiagonalKappaR:
      return "kappaR";
  }
  return "?";
}

const PropertyCheck* SweepResult::residual(const std::string& name) const {
  for (const auto& r : residuals) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

bool SweepResult::passed() const {
  return std::all_of(residuals.begin(), residuals.end(), [](const PropertyCheck& r) { return r.passed(); }) &&
         std::all_of(comparisons.begin(), comparisons.end(), [](const Comparison& c) { return c.agrees(); });
}

namespace {

SurfaceTensionSample solve(const Problem& p, const FinslerMedium& m, const Vec3& e, const Vec3& x0, DomainSpec spec,
                           const Configuration* warm = nullptr, Configuration* out = nullptr) {
  spec.dim = p.dim();
  spec.spacing = p.spacing;
  return finite_volume_sigma(e, x0, spec, m, p.W, p.q, p.solver, warm, out);
}

DomainSpec centered(double R, double h) {
  DomainSpec s;
  s.R = R;
  s.h = h;
  return s;
}

double cross_measure(int dim, double side) { return std::pow(side, dim - 1); }

// value <= C_Lambda L^{d-1}(cross section), with 1% allowance for the discretized candidate.
void add_bound(PropertyCheck& check, const SurfaceTensionSample& s, double c_lam, double side) {
  const double cap = c_lam * cross_measure(s.dim, side);
  check.add(s.value - cap, 0.01 * cap);
}

struct SplitOutcome {
  SurfaceTensionSample whole;
  std::vector<SurfaceTensionSample> halves;
};

std::vector<std::array<double, 2>> half_centers(int dim, double R) {
  const double q = R / 4.0;
  if (dim == 2) return {{-q, 0.0}, {q, 0.0}};
  if (dim == 3) return {{-q, -q}, {-q, q}, {q, -q}, {q, q}};
  return {};
}

// The whole cylinder starts from the halves' minimizers glued together, so a monotone
// solver can only improve on their sum.
SplitOutcome run_split(const Problem& p, const FinslerMedium& m, const Vec3& e, double R, double h) {
  SplitOutcome out;
  std::vector<Configuration> mins;
  for (const auto& c : half_centers(p.dim(), R)) {
    DomainSpec spec = centered(R / 2.0, h);
    spec.cross_center = c;
    Configuration u;
    out.halves.push_back(solve(p, m, e, Vec3{}, spec, nullptr, &u));
    mins.push_back(std::move(u));
  }
  const CylinderDomain dom = build_cylinder(p.dim(), e, {0.0, 0.0}, R, h, p.spacing, Vec3{});
  Configuration glued = planar_data(dom, Vec3{}, p.q);
  for (const auto& u : mins) extend_warm_start(u, glued);
  SolverOptions opts = p.solver;
  opts.warm_start = true;
  Problem q = p;
  q.solver = opts;
  out.whole = solve(q, m, e, Vec3{}, centered(R, h), &glued);
  return out;
}

void add_split(PropertyCheck& check, const SplitOutcome& s) {
  double sum = 0.0, slack = s.whole.slack;
  for (const auto& h : s.halves) {
    sum += h.value;
    slack += h.slack;
  }
  check.add(s.whole.value - sum, slack + 1e-12 * std::abs(sum));
}

bool split_possible(const Problem& p, double R, double h) {
  return p.dim() >= 2 && std::min(R / 2.0, 2.0 * h) >= 4.0 * p.spacing;
}

// value(h1) <= value(h2) + L^{d-1} e(h2) for h1 > h2. The grid competitor (h2 minimizer extended
// by planar data) costs candidate(h1) - candidate(h2) more; any excess of that over the continuum
// tail is discretization and goes into the slack.
void add_h_pair(PropertyCheck& check, const SurfaceTensionSample& big, const SurfaceTensionSample& small,
                const Problem& p, double Lambda) {
  const double L = cross_measure(big.dim, big.R);
  const double tail = L * tail_e(p.q, p.W, Lambda, small.h);
  const double disc = std::max(0.0, (big.candidate - small.candidate) - tail);
  check.add(big.value - small.value - tail, big.slack + small.slack + disc);
}

std::vector<double> normalized_at(const std::vector<SurfaceTensionSample>& samples, double param, bool by_h) {
  std::vector<double> out;
  for (const auto& s : samples) {
    if ((by_h ? s.h : s.R) == param) out.push_back(s.normalized);
  }
  return out;
}

void sort_samples(std::vector<SurfaceTensionSample>& v, bool by_h) {
  std::stable_sort(v.begin(), v.end(), [by_h](const SurfaceTensionSample& a, const SurfaceTensionSample& b) {
    const double pa = by_h ? a.h : a.R, pb = by_h ? b.h : b.R;
    if (pa != pb) return pa < pb;
    return a.seed < b.seed;
  });
}

void require_increasing(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw std::invalid_argument(std::string(what) + " is empty");
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) throw std::invalid_argument(std::string(what) + " must be strictly increasing");
  }
}

void require_seeds(const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("seed list is empty");
}

void flag_unconverged(SweepResult& r) {
  int bad = 0;
  for (const auto& s : r.samples) bad += s.converged ? 0 : 1;
  for (const auto& a : r.auxiliary) bad += a.sample.converged ? 0 : 1;
  if (bad > 0) r.flags.push_back(std::to_string(bad) + " solve(s) stopped at max_iters");
}

// Fit a + b/R over the last half of the R values (at least three), then flag points that
// sit further from the fit than 3 ensemble standard deviations (plus a 0.1% floor).
void extrapolate(SweepResult& r) {
  const std::size_t n = r.ensemble.size();
  if (n < 3) {
    r.flags.push_back("fewer than three R values; no extrapolation");
    return;
  }
  const std::size_t use = std::max<std::size_t>(3, (n + 1) / 2);
  std::vector<double> R, v, var;
  for (std::size_t i = n - use; i < n; ++i) {
    const auto& s = r.ensemble[i];
    R.push_back(s.param);
    v.push_back(s.mean);
    var.push_back(s.stderr_mean * s.stderr_mean);
  }
  const bool weigh = std::all_of(var.begin(), var.end(), [](double x) { return x > 0.0; });
  r.limit = subadditive_extrapolate(R, v, weigh ? std::span<const double>(var) : std::span<const double>{});
  const Extrapolation& L = *r.limit;
  if (L.ill_conditioned) r.flags.push_back("ill-conditioned extrapolation");
  for (std::size_t i = n - use; i < n; ++i) {
    const auto& s = r.ensemble[i];
    const double resid = std::abs(s.mean - L.limit - L.slope / s.param);
    if (resid > 3.0 * s.std + 1e-3 * std::abs(s.mean)) {
      std::ostringstream msg;
      msg << "fit residual " << resid << " at R=" << s.param << " exceeds 3x ensemble std";
      r.flags.push_back(msg.str());
    }
  }
  double lo = r.ensemble[n - 3].mean, hi = lo;
  for (std::size_t i = n - 3; i < n; ++i) {
    lo = std::min(lo, r.ensemble[i].mean);
    hi = std::max(hi, r.ensemble[i].mean);
  }
  const double widen = 3.0 * L.stderr_limit + std::abs(L.slope) / r.ensemble.back().param;
  if (L.limit < lo - widen || L.limit > hi + widen) r.flags.push_back("extrapolated limit outside its bracket");
}

}  // namespace

SweepResult h_sweep(const Problem& problem, const Vec3& e, double R, const std::vector<double>& h_list,
                    const std::vector<std::uint64_t>& seeds) {
  require_increasing(h_list, "h_list");
  require_seeds(seeds);
  struct SeedRun {
    std::vector<SurfaceTensionSample> chain;
    std::optional<SplitOutcome> split;
  };
  std::vector<SeedRun> runs(seeds.size());
  const bool do_split = split_possible(problem, R, h_list.front());
  parallel_for(seeds.size(), problem.jobs, [&](std::size_t i) {
    const FinslerMedium m = problem.medium.with_seed(seeds[i]).build();
    Configuration prev, cur;
    for (std::size_t k = 0; k < h_list.size(); ++k) {
      runs[i].chain.push_back(solve(problem, m, e, Vec3{}, centered(R, h_list[k]), k ? &prev : nullptr, &cur));
      std::swap(prev, cur);
    }
    if (do_split) runs[i].split = run_split(problem, m, e, R, h_list.front());
  });

  const double Lambda = problem.medium.params.Lambda_cap;
  const double c_lam = c_lambda(problem.q, problem.W, Lambda);
  SweepResult r;
  r.axis = SweepAxis::H;
  PropertyCheck bound{"basic_bound"}, mono{"h_monotonicity"}, split{"subadditivity"};
  for (const auto& run : runs) {
    for (std::size_t a = 0; a < run.chain.size(); ++a) {
      add_bound(bound, run.chain[a], c_lam, R);
      for (std::size_t b = 0; b < a; ++b) add_h_pair(mono, run.chain[a], run.chain[b], problem, Lambda);
      r.samples.push_back(run.chain[a]);
    }
    if (run.split) {
      add_split(split, *run.split);
      add_bound(bound, run.split->whole, c_lam, R);
      r.auxiliary.push_back({"split_whole", run.split->whole});
      for (const auto& h : run.split->halves) {
        add_bound(bound, h, c_lam, R / 2.0);
        r.auxiliary.push_back({"split_half", h});
      }
    }
  }
  sort_samples(r.samples, true);
  for (double h : h_list) r.ensemble.push_back(summarize(h, normalized_at(r.samples, h, true)));
  r.residuals = {bound, mono, split};

  const auto& last = r.ensemble.back();
  const double L = cross_measure(problem.dim(), R);
  Extrapolation term;
  term.limit = last.mean;
  term.stderr_limit = last.stderr_mean;
  term.points = 1;
  r.limit = term;
  r.horizon_bracket = std::array<double, 2>{last.mean * L, last.mean * L + L * tail_e(problem.q, problem.W, Lambda,
                                                                                       h_list.back())};
  flag_unconverged(r);
  return r;
}

SweepResult r_sweep(const Problem& problem, const Vec3& e, const HeightRule& height,
                    const std::vector<double>& R_list, const std::vector<std::uint64_t>& seeds) {
  require_increasing(R_list, "R_list");
  require_seeds(seeds);
  const double R0 = R_list.front();
  const double h0 = height.at(R0);
  const bool do_pair = std::min(R0, h0) >= 4.0 * problem.spacing;
  const bool do_split = split_possible(problem, R0, h0);

  struct SeedRun {
    std::vector<SurfaceTensionSample> chain;
    std::optional<SurfaceTensionSample> half_height;
    std::optional<SplitOutcome> split;
  };
  std::vector<SeedRun> runs(seeds.size());
  parallel_for(seeds.size(), problem.jobs, [&](std::size_t i) {
    const FinslerMedium m = problem.medium.with_seed(seeds[i]).build();
    Configuration prev, cur;
    bool have_prev = false;
    if (do_pair) {
      runs[i].half_height = solve(problem, m, e, Vec3{}, centered(R0, h0 / 2.0), nullptr, &prev);
      have_prev = true;
    }
    for (double R : R_list) {
      runs[i].chain.push_back(solve(problem, m, e, Vec3{}, centered(R, height.at(R)), have_prev ? &prev : nullptr, &cur));
      std::swap(prev, cur);
      have_prev = true;
    }
    if (do_split) runs[i].split = run_split(problem, m, e, R0, h0);
  });

  const double Lambda = problem.medium.params.Lambda_cap;
  const double c_lam = c_lambda(problem.q, problem.W, Lambda);
  SweepResult r;
  r.axis = height.fixed ? SweepAxis::R : SweepAxis::DiagonalKappaR;
  PropertyCheck bound{"basic_bound"}, mono{"h_monotonicity"}, split{"subadditivity"};
  for (const auto& run : runs) {
    for (const auto& s : run.chain) {
      add_bound(bound, s, c_lam, s.R);
      r.samples.push_back(s);
    }
    if (run.half_height) {
      add_bound(bound, *run.half_height, c_lam, R0);
      add_h_pair(mono, run.chain.front(), *run.half_height, problem, Lambda);
      r.auxiliary.push_back({"half_height", *run.half_height});
    }
    if (run.split) {
      add_split(split, *run.split);
      add_bound(bound, run.split->whole, c_lam, R0);
      r.auxiliary.push_back({"split_whole", run.split->whole});
      for (const auto& h : run.split->halves) {
        add_bound(bound, h, c_lam, R0 / 2.0);
        r.auxiliary.push_back({"split_half", h});
      }
    }
  }
  sort_samples(r.samples, false);
  for (double R : R_list) r.ensemble.push_back(summarize(R, normalized_at(r.samples, R, false)));
  r.residuals = {bound, mono, split};
  extrapolate(r);
  flag_unconverged(r);
  return r;
}

PropertyCheck split_check(const Problem& problem, const Vec3& e, double R, double h,
                          const std::vector<std::uint64_t>& seeds, std::vector<AuxSample>* samples) {
  require_seeds(seeds);
  if (!split_possible(problem, R, h)) throw std::invalid_argument("cross section cannot be split on this grid");
  std::vector<SplitOutcome> outs(seeds.size());
  parallel_for(seeds.size(), problem.jobs, [&](std::size_t i) {
    outs[i] = run_split(problem, problem.medium.with_seed(seeds[i]).build(), e, R, h);
  });
  PropertyCheck check{"subadditivity"};
  for (const auto& o : outs) {
    add_split(check, o);
    if (samples) {
      samples->push_back({"split_whole", o.whole});
      for (const auto& hs : o.halves) samples->push_back({"split_half", hs});
    }
  }
  return check;
}

SweepResult off_center_check(const Problem& problem, const Vec3& e, const Vec3& x0, double rho,
                             const std::vector<double>& R_list, const std::vector<std::uint64_t>& seeds) {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  require_increasing(R_list, "R_list");
  require_seeds(seeds);
  struct SeedRun {
    std::vector<SurfaceTensionSample> off, ref;
  };
  std::vector<SeedRun> runs(seeds.size());
  parallel_for(seeds.size(), problem.jobs, [&](std::size_t i) {
    const FinslerMedium m = problem.medium.with_seed(seeds[i]).build();
    Configuration prev_off, prev_ref, cur;
    for (std::size_t k = 0; k < R_list.size(); ++k) {
      const double R = R_list[k];
      const double side = R * rho;
      DomainSpec spec = centered(side, side / 2.0);
      spec.anchor = R * x0;
      runs[i].off.push_back(solve(problem, m, e, R * x0, spec, k ? &prev_off : nullptr, &cur));
      std::swap(prev_off, cur);
      runs[i].ref.push_back(solve(problem, m, e, Vec3{}, centered(side, side / 2.0), k ? &prev_ref : nullptr, &cur));
      std::swap(prev_ref, cur);
    }
  });

  const double Lambda = problem.medium.params.Lambda_cap;
  const double c_lam = c_lambda(problem.q, problem.W, Lambda);
  SweepResult r;
  r.axis = SweepAxis::DiagonalKappaR;
  PropertyCheck bound{"basic_bound"};
  std::vector<SurfaceTensionSample> refs;
  auto relabel = [&](SurfaceTensionSample s, double R) {
    add_bound(bound, s, c_lam, s.R);
    s.R = R;
    s.rho = rho;
    return s;
  };
  for (const auto& run : runs) {
    for (std::size_t k = 0; k < R_list.size(); ++k) {
      r.samples.push_back(relabel(run.off[k], R_list[k]));
      refs.push_back(relabel(run.ref[k], R_list[k]));
      r.auxiliary.push_back({"centered", refs.back()});
    }
  }
  sort_samples(r.samples, false);
  sort_samples(refs, false);
  for (std::size_t k = 0; k < R_list.size(); ++k) {
    const double R = R_list[k];
    r.ensemble.push_back(summarize(R, normalized_at(r.samples, R, false)));
    const EnsembleStat c = summarize(R, normalized_at(refs, R, false));
    Comparison cmp;
    // Solver slack of the two solves bounds their difference when the ensembles carry no spread.
    for (const auto& run : runs) {
      cmp.tolerance = std::max(cmp.tolerance, (run.off[k].slack + run.ref[k].slack) /
                                                  cross_measure(problem.dim(), R * rho));
    }
    cmp.name = "off_center_vs_centered_R" + std::to_string(static_cast<long long>(std::llround(R)));
    cmp.a = r.ensemble.back().mean;
    cmp.a_err = r.ensemble.back().stderr_mean;
    cmp.b = c.mean;
    cmp.b_err = c.stderr_mean;
    r.comparisons.push_back(cmp);
  }
  r.residuals = {bound};
  if (R_list.size() >= 3) extrapolate(r);
  flag_unconverged(r);
  return r;
}

FrameCheck rotated_frame_check(const Problem& problem, const Vec3& e, const Frame& alt_frame, double R, double h,
                               std::uint64_t seed) {
  const FinslerMedium m = problem.medium.with_seed(seed).build();
  DomainSpec alt = centered(R, h);
  alt.frame = alt_frame;
  FrameCheck out;
  out.value_default = solve(problem, m, e, Vec3{}, centered(R, h)).value;
  out.value_alt = solve(problem, m, e, Vec3{}, alt).value;
  out.difference = std::abs(out.value_default - out.value_alt);
  out.relative = out.difference / std::max(std::abs(out.value_default), 1e-300);
  return out;
}

// ---- direction tables ----

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_pi(double a) {
  a = std::fmod(a, kPi);
  if (a < 0.0) a += kPi;
  if (a >= kPi) a -= kPi;
  return a;
}

}  // namespace

SurfaceTensionTable make_table(std::vector<double> angles, std::vector<double> values, std::vector<double> stderrs) {
  const std::size_t n = angles.size();
  if (n == 0) throw std::invalid_argument("surface tension table is empty");
  if (values.size() != n) throw std::invalid_argument("table angles and values differ in length");
  if (stderrs.empty()) stderrs.assign(n, 0.0);
  if (stderrs.size() != n) throw std::invalid_argument("table angles and stderrs differ in length");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    angles[i] = wrap_pi(angles[i]);
    if (!(values[i] > 0.0)) throw std::invalid_argument("table values must be positive");
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return angles[a] < angles[b]; });
  SurfaceTensionTable t;
  for (std::size_t i : order) {
    if (!t.angles.empty() && angles[i] - t.angles.back() < 1e-12) throw std::invalid_argument("duplicate table angle");
    t.angles.push_back(angles[i]);
    t.directions.push_back({std::cos(angles[i]), std::sin(angles[i]), 0.0});
    t.values.push_back(values[i]);
    t.stderrs.push_back(stderrs[i]);
  }
  return t;
}

double SurfaceTensionTable::at(const Vec3& p) const {
  const double len = std::hypot(p[0], p[1]);
  if (len == 0.0) return 0.0;
  const std::size_t n = angles.size();
  if (n == 1) return len * values[0];
  const double a = wrap_pi(std::atan2(p[1], p[0]));
  auto upper = std::upper_bound(angles.begin(), angles.end(), a);
  std::size_t j = static_cast<std::size_t>(upper - angles.begin());
  double a0, a1, v0, v1;
  if (j == 0) {
    a0 = angles[n - 1] - kPi;
    v0 = values[n - 1];
    a1 = angles[0];
    v1 = values[0];
  } else if (j == n) {
    a0 = angles[n - 1];
    v0 = values[n - 1];
    a1 = angles[0] + kPi;
    v1 = values[0];
  } else {
    a0 = angles[j - 1];
    v0 = values[j - 1];
    a1 = angles[j];
    v1 = values[j];
  }
  const double w = (a - a0) / (a1 - a0);
  return len * ((1.0 - w) * v0 + w * v1);
}

SurfaceTensionTable SurfaceTensionTable::scaled(double t) const {
  SurfaceTensionTable out = *this;
  for (auto& v : out.values) v *= t;
  for (auto& s : out.stderrs) s *= std::abs(t);
  return out;
}

PropertyCheck convexity_check(const SurfaceTensionTable& table, double floor) {
  const std::size_t n = table.angles.size();
  std::vector<double> th, v, se;
  for (int period = 0; period < 2; ++period) {
    for (std::size_t i = 0; i < n; ++i) {
      th.push_back(table.angles[i] + period * kPi);
      v.push_back(table.values[i]);
      se.push_back(table.stderrs[i]);
    }
  }
  PropertyCheck check{"convexity"};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < th.size() && th[j] - th[i] < kPi - 1e-12; ++j) {
      const double s = std::sin(th[j] - th[i]);
      for (std::size_t k = i + 1; k < j; ++k) {
        const double a = std::sin(th[j] - th[k]) / s;
        const double b = std::sin(th[k] - th[i]) / s;
        const double margin = v[k] - (a * v[i] + b * v[j]);
        const double tol = 3.0 * std::sqrt(se[k] * se[k] + a * a * se[i] * se[i] + b * b * se[j] * se[j]) + floor;
        check.add(margin, tol);
      }
    }
  }
  return check;
}

WulffResult wulff_scan(const Problem& problem, int direction_count, double R, double h,
                       const std::vector<std::uint64_t>& seeds) {
  if (problem.dim() != 2) throw std::invalid_argument("wulff scans are implemented for d = 2");
  if (direction_count < 4) throw std::invalid_argument("direction_count must be at least 4");
  require_seeds(seeds);
  const std::size_t nd = static_cast<std::size_t>(direction_count);
  const std::size_t ns = seeds.size();

  Problem calib = problem;
  calib.medium.kind = MediumKind::Constant;
  calib.medium.params.norms = {CellNorm::scalar(1.0)};
  calib.medium.params.weights.clear();
  calib.medium.params.offset.reset();
  calib.medium.params.lambda = 1.0;
  calib.medium.params.Lambda_cap = 1.0;

  std::vector<Vec3> dirs(nd);
  std::vector<double> angles(nd);
  for (std::size_t i = 0; i < nd; ++i) {
    angles[i] = kPi * static_cast<double>(i) / static_cast<double>(nd);
    dirs[i] = {std::cos(angles[i]), std::sin(angles[i]), 0.0};
  }
  std::vector<SurfaceTensionSample> samples(nd * ns), cal(nd);
  parallel_for(nd * (ns + 1), problem.jobs, [&](std::size_t item) {
    const std::size_t d = item / (ns + 1), s = item % (ns + 1);
    if (s == ns) {
      cal[d] = solve(calib, calib.medium.build(), dirs[d], Vec3{}, centered(R, h));
    } else {
      samples[d * ns + s] = solve(problem, problem.medium.with_seed(seeds[s]).build(), dirs[d], Vec3{}, centered(R, h));
    }
  });

  WulffResult out;
  std::vector<double> values(nd), errs(nd);
  double floor = 0.0;
  for (std::size_t d = 0; d < nd; ++d) {
    std::vector<double> v;
    for (std::size_t s = 0; s < ns; ++s) {
      v.push_back(samples[d * ns + s].normalized);
      floor = std::max(floor, samples[d * ns + s].slack / R);
    }
    const EnsembleStat st = summarize(angles[d], v);
    values[d] = st.mean;
    errs[d] = st.stderr_mean;
    out.calibration.push_back(cal[d].normalized);
  }
  out.table = make_table(angles, values, errs);
  out.samples = std::move(samples);
  out.convexity = convexity_check(out.table, floor);
  out.band.name = "calibrated_band";
  const double sl = std::sqrt(problem.medium.params.lambda), sL = std::sqrt(problem.medium.params.Lambda_cap);
  for (std::size_t d = 0; d < nd; ++d) {
    const double tol = 3.0 * errs[d] + floor;
    out.band.add(sl * out.calibration[d] - values[d], tol);
    out.band.add(values[d] - sL * out.calibration[d], tol);
    const double next = values[(d + 1) % nd];
    out.max_adjacent_change =
        std::max(out.max_adjacent_change, std::abs(next - values[d]) / std::min(next, values[d]));
  }
  return out;
}

// ---- perimeter ----

namespace {

double cross2(const Point2& a, const Point2& b) { return a[0] * b[1] - a[1] * b[0]; }
Point2 sub2(const Point2& a, const Point2& b) { return {a[0] - b[0], a[1] - b[1]}; }

int orient(const Point2& a, const Point2& b, const Point2& c) {
  const double v = cross2(sub2(b, a), sub2(c, a));
  const double scale = std::max({std::abs(b[0] - a[0]), std::abs(b[1] - a[1]), std::abs(c[0] - a[0]),
                                 std::abs(c[1] - a[1]), 1e-300});
  if (std::abs(v) <= 1e-14 * scale * scale) return 0;
  return v > 0.0 ? 1 : -1;
}

bool on_segment(const Point2& a, const Point2& b, const Point2& p) {
  return std::min(a[0], b[0]) <= p[0] && p[0] <= std::max(a[0], b[0]) && std::min(a[1], b[1]) <= p[1] &&
         p[1] <= std::max(a[1], b[1]);
}

bool segments_touch(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0) {
    if (o1 != 0 || o2 != 0) return true;
  }
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

void validate_region(std::span<const Point2> region) {
  if (region.empty()) return;
  const std::size_t n = region.size();
  if (n < 3) throw std::invalid_argument("region needs at least three vertices");
  for (std::size_t i = 0; i < n; ++i) {
    if (orient(region[i], region[(i + 1) % n], region[(i + 2) % n]) < 0) {
      throw std::invalid_argument("region must be convex and counter-clockwise");
    }
  }
}

// Parameter interval of p0 + t (p1 - p0), t in [0, 1], inside the convex region.
std::array<double, 2> clip(const Point2& p0, const Point2& p1, std::span<const Point2> region) {
  double t0 = 0.0, t1 = 1.0;
  const Point2 d = sub2(p1, p0);
  const std::size_t n = region.size();
  for (std::size_t i = 0; i < n && t0 < t1; ++i) {
    const Point2 edge = sub2(region[(i + 1) % n], region[i]);
    const double f0 = cross2(edge, sub2(p0, region[i]));
    const double df = cross2(edge, d);
    if (df == 0.0) {
      if (f0 < 0.0) return {0.0, 0.0};
    } else if (df > 0.0) {
      t0 = std::max(t0, -f0 / df);
    } else {
      t1 = std::min(t1, -f0 / df);
    }
  }
  return {t0, std::max(t0, t1)};
}

}  // namespace

double perimeter(const SurfaceTensionTable& table, const Polyline& interface, std::span<const Point2> region) {
  const auto& P = interface.points;
  const std::size_t np = P.size();
  if (np < 2 || (interface.closed && np < 3)) throw std::invalid_argument("interface has too few points");
  validate_region(region);
  const std::size_t ns = interface.closed ? np : np - 1;
  auto seg = [&](std::size_t i) { return std::array<Point2, 2>{P[i], P[(i + 1) % np]}; };
  for (std::size_t i = 0; i < ns; ++i) {
    const auto s = seg(i);
    if (std::hypot(s[1][0] - s[0][0], s[1][1] - s[0][1]) <= 1e-14) {
      throw std::invalid_argument("interface has a zero-length segment");
    }
  }
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = i + 1; j < ns; ++j) {
      const bool adjacent = j == i + 1 || (interface.closed && i == 0 && j == ns - 1);
      const auto a = seg(i), b = seg(j);
      if (adjacent) {
        // Adjacent segments may only share their common vertex: reject folding back.
        const Point2& shared = (j == i + 1) ? a[1] : a[0];
        const Point2& far_a = (j == i + 1) ? a[0] : a[1];
        const Point2& far_b = (j == i + 1) ? b[1] : b[0];
        if (orient(far_a, shared, far_b) == 0 &&
            (far_b[0] - shared[0]) * (far_a[0] - shared[0]) + (far_b[1] - shared[1]) * (far_a[1] - shared[1]) > 0.0) {
          throw std::invalid_argument("interface folds back on itself");
        }
        continue;
      }
      if (segments_touch(a[0], a[1], b[0], b[1])) throw std::invalid_argument("interface is self-intersecting");
    }
  }
  std::vector<double> parts;
  for (std::size_t i = 0; i < ns; ++i) {
    const auto s = seg(i);
    const Point2 d = sub2(s[1], s[0]);
    const double len = std::hypot(d[0], d[1]);
    double frac = 1.0;
    if (!region.empty()) {
      const auto t = clip(s[0], s[1], region);
      frac = t[1] - t[0];
    }
    if (frac <= 0.0) continue;
    parts.push_back(table.at({d[1] / len, -d[0] / len, 0.0}) * len * frac);
  }
  return pairwise_sum(parts);
}

std::vector<Point2> square_region(const Point2& center, double side, double angle) {
  if (!(side > 0.0)) throw std::invalid_argument("square side must be positive");
  const double c = std::cos(angle) * side / 2.0, s = std::sin(angle) * side / 2.0;
  // Corners (+-1, +-1) rotated, listed counter-clockwise.
  const std::array<Point2, 4> unit{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};
  std::vector<Point2> out;
  for (const auto& u : unit) out.push_back({center[0] + c * u[0] - s * u[1], center[1] + s * u[0] + c * u[1]});
  return out;
}

// ---- recovery sequence ----

RecoveryResult recovery_energy(const Problem& problem, const Vec3& e, const Vec3& x0, double rho,
                               const std::vector<double>& eps_list, double reference) {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (eps_list.empty()) throw std::invalid_argument("eps_list is empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw std::invalid_argument("eps values must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw std::invalid_argument("eps_list must be strictly decreasing");
  }
  const FinslerMedium m = problem.medium.build();
  const int d = problem.dim();
  const double Lambda = problem.medium.params.Lambda_cap;
  const double cap = c_lambda(problem.q, problem.W, Lambda) * cross_measure(d, rho);

  RecoveryResult out;
  out.reference = reference;
  out.series.resize(eps_list.size());
  std::vector<double> slacks(eps_list.size());
  parallel_for(eps_list.size(), problem.jobs, [&](std::size_t i) {
    const double eps = eps_list[i];
    const CylinderDomain dom = build_cylinder(d, e, {0.0, 0.0}, rho, rho / 2.0, eps * problem.spacing, x0);
    Configuration u0 = planar_data(dom, x0, problem.q, eps);
    RecoveryPoint& pt = out.series[i];
    pt.eps = eps;
    pt.candidate = EnergyModel(m, problem.W, dom, eps, problem.solver.smoothing_delta).energy(u0.values);
    const MinimizeResult r = minimize(m, problem.W, std::move(u0), problem.solver, eps);
    pt.value = r.energy;
    pt.iters = r.iters;
    pt.grad_norm = r.grad_norm;
    pt.converged = r.converged;
    slacks[i] = solver_slack(dom, problem.solver);
  });

  out.decreasing.name = "recovery_decreasing";
  out.bound.name = "basic_bound";
  for (std::size_t i = 0; i < out.series.size(); ++i) {
    out.bound.add(out.series[i].value - cap, 0.01 * cap);
    if (!out.series[i].converged) out.flags.push_back("solve at eps=" + std::to_string(eps_list[i]) + " hit max_iters");
    if (i == 0) continue;
    const double h_prev = rho / (2.0 * eps_list[i - 1]);
    const double tail = cross_measure(d, rho) * tail_e(problem.q, problem.W, Lambda, h_prev);
    out.decreasing.add(out.series[i].value - out.series[i - 1].value - tail, slacks[i] + slacks[i - 1]);
  }
  if (reference > 0.0) out.relative_error = std::abs(out.series.back().value - reference) / reference;
  return out;
}

}  // namespace ahc
