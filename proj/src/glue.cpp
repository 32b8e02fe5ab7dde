#include "ahc/glue.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ahc {

bool FrameBox::contains(const Vec3& f, int dim) const {
  for (int k = 0; k < dim; ++k) {
    if (f[k] < lo[k] || f[k] > hi[k]) return false;
  }
  return true;
}

double FrameBox::distance(const Vec3& f, int dim) const {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double out = std::max({lo[k] - f[k], 0.0, f[k] - hi[k]});
    s += out * out;
  }
  return std::sqrt(s);
}

namespace {

bool same_grid(const CylinderDomain& a, const CylinderDomain& b) {
  if (a.dim != b.dim) return false;
  for (int k = 0; k < 3; ++k) {
    if (a.counts[k] != b.counts[k] || a.steps[k] != b.steps[k] || a.origin[k] != b.origin[k] ||
        a.anchor[k] != b.anchor[k] || a.e[k] != b.e[k]) {
      return false;
    }
  }
  return true;
}

// Corner node indices of every cell and the frame gradient of a nodal field on a cell.
class CellStencil {
 public:
  explicit CellStencil(const CylinderDomain& d) : dom_(d), corners_(1 << d.dim) {
    std::array<std::size_t, 3> stride{1, 1, 1};
    for (int k = d.dim - 2; k >= 0; --k) stride[k] = stride[k + 1] * static_cast<std::size_t>(d.counts[k + 1]);
    for (int c = 0; c < corners_; ++c) {
      std::size_t off = 0;
      for (int k = 0; k < d.dim; ++k) {
        if (c & (1 << (d.dim - 1 - k))) off += stride[k];
      }
      offsets_[c] = off;
    }
  }

  int corners() const { return corners_; }

  std::size_t base(std::size_t cell) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int k = dom_.dim - 1; k >= 0; --k) {
      const auto n = static_cast<std::size_t>(dom_.counts[k] - 1);
      idx[k] = static_cast<int>(cell % n);
      cell /= n;
    }
    return dom_.flat_index(idx);
  }

  std::size_t node(std::size_t base, int corner) const { return base + offsets_[corner]; }

  Vec3 gradient(std::size_t base, const std::vector<double>& f) const {
    Vec3 g{};
    const double norm = 1 << (dom_.dim - 1);
    for (int k = 0; k < dom_.dim; ++k) {
      const int bit = 1 << (dom_.dim - 1 - k);
      double s = 0.0;
      for (int c = 0; c < corners_; ++c) s += (c & bit) ? f[node(base, c)] : -f[node(base, c)];
      g[k] = s / (norm * dom_.steps[k]);
    }
    return g;
  }

 private:
  const CylinderDomain& dom_;
  int corners_;
  std::array<std::size_t, 8> offsets_{};
};

}  // namespace

GlueResult fundamental_glue(const FinslerMedium& medium, const DoubleWell& W, const Configuration& u,
                            const Configuration& v, const FrameBox& U, const FrameBox& Uprime, const FrameBox& V,
                            double D, int N, double eps, double zeta_threshold) {
  const CylinderDomain& dom = u.domain;
  const int d = dom.dim;
  if (!same_grid(dom, v.domain)) throw std::invalid_argument("u and v must live on the same grid");
  double max_step = 0.0, diag2 = 0.0;
  for (int k = 0; k < d; ++k) {
    max_step = std::max(max_step, dom.steps[k]);
    diag2 += dom.steps[k] * dom.steps[k];
  }
  if (!(D > 2.0 * max_step)) throw std::invalid_argument("D must exceed two grid spacings");
  const double tol = 1e-9 * std::max(1.0, D);
  for (int k = 0; k < d; ++k) {
    if (U.lo[k] > U.hi[k] || Uprime.lo[k] > Uprime.hi[k] || V.lo[k] > V.hi[k]) {
      throw std::invalid_argument("empty region box");
    }
    if (Uprime.lo[k] > U.lo[k] - D + tol || Uprime.hi[k] < U.hi[k] + D - tol) {
      throw std::invalid_argument("U' must contain the D-neighbourhood of U");
    }
    const double glo = dom.origin[k];
    const double ghi = dom.origin[k] + (dom.counts[k] - 1) * dom.steps[k];
    if (Uprime.lo[k] < glo - tol || Uprime.hi[k] > ghi + tol || V.lo[k] < glo - tol || V.hi[k] > ghi + tol) {
      throw std::invalid_argument("grid does not cover U' and V");
    }
  }
  if (N <= 0) N = std::clamp(static_cast<int>(std::ceil(D / (4.0 * dom.spacing))), 2, 64);
  if (N < 2) throw std::invalid_argument("at least two nested sets are needed");

  // Cut-off psi_i is 1 up to distance a_i from U and falls linearly to 0 over one shell width.
  // Starting at half a cell diagonal keeps every cell centered in U free of transitions.
  const double half_diag = 0.5 * std::sqrt(diag2);
  const double width = (D - half_diag) / (N - 1);
  if (!(width > half_diag)) throw std::invalid_argument("too many shells for the grid resolution");

  GlueReport rep;
  rep.shells = N;
  rep.D = D;
  rep.shell_width = width;
  rep.cutoff_slope = 1.0 / width;
  rep.slope_bound = 2.0 * N / D;
  rep.zeta_threshold = zeta_threshold;

  const EnergyModel model(medium, W, dom, eps);
  const CellStencil stencil(dom);
  const std::size_t nodes = dom.node_count();
  const std::size_t cells = dom.cell_count();
  const double vol = dom.cell_volume();
  const double Lambda = medium.Lambda_cap();

  std::vector<double> dist(nodes);
  for (std::size_t i = 0; i < nodes; ++i) dist[i] = U.distance(dom.node_frame(i), d);

  std::vector<std::uint8_t> in_U(cells), in_Up(cells), in_V(cells), in_set(cells);
  std::vector<std::size_t> bases(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const Vec3 f = dom.cell_frame(c);
    in_U[c] = U.contains(f, d);
    in_Up[c] = Uprime.contains(f, d);
    in_V[c] = V.contains(f, d);
    bases[c] = stencil.base(c);
    double diff = 0.0;
    for (int k = 0; k < stencil.corners(); ++k) {
      const std::size_t n = stencil.node(bases[c], k);
      diff = std::max(diff, std::abs(u.values[n] - v.values[n]));
    }
    in_set[c] = in_V[c] && diff > zeta_threshold;
    if (in_set[c]) rep.zeta += vol;
  }

  const auto cu = model.cell_energies(u.values);
  const auto cv = model.cell_energies(v.values);
  {
    std::vector<double> a, b;
    for (std::size_t c = 0; c < cells; ++c) {
      if (in_Up[c]) a.push_back(cu[c]);
      if (in_V[c]) b.push_back(cv[c]);
    }
    rep.f_u = pairwise_sum(a);
    rep.f_v = pairwise_sum(b);
  }

  double sum_grad = 0.0, sum_on = 0.0, sum_off = 0.0;
  std::vector<double> psi(nodes), w(nodes), best_w;
  for (int i = 1; i < N; ++i) {
    const double a_i = half_diag + (i - 1) * width;
    for (std::size_t n = 0; n < nodes; ++n) {
      psi[n] = std::clamp(1.0 - (dist[n] - a_i) / width, 0.0, 1.0);
      if (psi[n] == 1.0 || u.values[n] == v.values[n]) {
        w[n] = u.values[n];
      } else if (psi[n] == 0.0) {
        w[n] = v.values[n];
      } else {
        w[n] = psi[n] * u.values[n] + (1.0 - psi[n]) * v.values[n];
      }
    }
    const auto cw = model.cell_energies(w);
    std::vector<double> shell;
    for (std::size_t c = 0; c < cells; ++c) {
      if (!in_V[c]) continue;
      double lo = 1.0, hi = 0.0, psi_bar = 0.0, w_bar = 0.0;
      for (int k = 0; k < stencil.corners(); ++k) {
        const std::size_t n = stencil.node(bases[c], k);
        lo = std::min(lo, psi[n]);
        hi = std::max(hi, psi[n]);
        psi_bar += psi[n];
        w_bar += w[n];
      }
      if (lo == hi && (lo == 0.0 || lo == 1.0)) continue;
      psi_bar /= stencil.corners();
      w_bar /= stencil.corners();
      shell.push_back(cw[c]);
      const Vec3 gu = stencil.gradient(bases[c], u.values);
      const Vec3 gv = stencil.gradient(bases[c], v.values);
      const Vec3 gw = stencil.gradient(bases[c], w);
      const Vec3 rem = gw - (psi_bar * gu + (1.0 - psi_bar) * gv);
      const double e1 = eps * Lambda * (dot(gu, gu) + dot(gv, gv)) * vol;
      const double e2 = W.value(std::clamp(w_bar, -1.0, 1.0)) * vol / eps;
      const double e3 = eps * Lambda * dot(rem, rem) * vol;
      sum_grad += e1;
      (in_set[c] ? sum_on : sum_off) += e2 + e3;
    }
    const double cost = pairwise_sum(shell);
    rep.shell_energies.push_back(cost);
    if (i == 1 || cost < rep.best_cost) {
      rep.best_cost = cost;
      rep.best_shell = i;
      best_w = w;
    }
  }
  rep.mean_cost = pairwise_sum(rep.shell_energies) / (N - 1);
  rep.mean_gradient_term = sum_grad / (N - 1);
  rep.mean_remainder_on_set = sum_on / (N - 1);
  rep.mean_remainder_off_set = sum_off / (N - 1);
  rep.mean_bound = rep.mean_gradient_term + rep.mean_remainder_on_set + rep.mean_remainder_off_set;

  const auto cw = model.cell_energies(best_w);
  std::vector<double> glued;
  for (std::size_t c = 0; c < cells; ++c) {
    if (in_U[c] || in_V[c]) glued.push_back(cw[c]);
  }
  rep.glued = pairwise_sum(glued);

  rep.C1 = std::max(eps * Lambda * rep.slope_bound * rep.slope_bound / (N - 1), 1.0 / (eps * (N - 1)));
  rep.C = rep.C1 * (4.0 + W.sup_norm());
  rep.slack = rep.mean_gradient_term + rep.mean_remainder_off_set;
  rep.rhs = rep.f_u + rep.f_v + rep.C * rep.zeta + rep.slack;

  GlueResult out;
  out.w = u;
  out.w.values = std::move(best_w);
  out.report = std::move(rep);
  return out;
}

}  // namespace ahc
