#include "ahc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ahc {

Frame default_frame(int dim, const Vec3& e) {
  Frame f{};
  if (dim == 2) {
    f[0] = {-e[1], e[0], 0.0};
  } else if (dim == 3) {
    int axis = 0;
    for (int k = 1; k < 3; ++k) {
      if (std::abs(e[k]) < std::abs(e[axis])) axis = k;
    }
    Vec3 a{};
    a[axis] = 1.0;
    Vec3 v = a - dot(a, e) * e;
    v = (1.0 / norm(v)) * v;
    f[0] = v;
    f[1] = cross(e, v);
  }
  return f;
}

std::size_t CylinderDomain::node_count() const {
  return static_cast<std::size_t>(counts[0]) * counts[1] * counts[2];
}

std::size_t CylinderDomain::cell_count() const {
  std::size_t n = 1;
  for (int k = 0; k < dim; ++k) n *= static_cast<std::size_t>(counts[k] - 1);
  return n;
}

double CylinderDomain::cell_volume() const {
  double v = 1.0;
  for (int k = 0; k < dim; ++k) v *= steps[k];
  return v;
}

double CylinderDomain::cross_measure() const { return std::pow(cross_side, dim - 1); }

std::array<int, 3> CylinderDomain::node_index(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int k = dim - 1; k >= 0; --k) {
    idx[k] = static_cast<int>(flat % static_cast<std::size_t>(counts[k]));
    flat /= static_cast<std::size_t>(counts[k]);
  }
  return idx;
}

std::size_t CylinderDomain::flat_index(const std::array<int, 3>& idx) const {
  std::size_t flat = 0;
  for (int k = 0; k < dim; ++k) flat = flat * static_cast<std::size_t>(counts[k]) + static_cast<std::size_t>(idx[k]);
  return flat;
}

Vec3 CylinderDomain::node_frame(std::size_t flat) const {
  const auto idx = node_index(flat);
  Vec3 f{};
  for (int k = 0; k < dim; ++k) f[k] = origin[k] + idx[k] * steps[k];
  return f;
}

Vec3 CylinderDomain::cell_frame(std::size_t cell) const {
  Vec3 f{};
  for (int k = dim - 1; k >= 0; --k) {
    const std::size_t n = static_cast<std::size_t>(counts[k] - 1);
    const auto i = static_cast<double>(cell % n);
    cell /= n;
    f[k] = origin[k] + (i + 0.5) * steps[k];
  }
  return f;
}

Vec3 CylinderDomain::world_from_frame(const Vec3& f) const {
  Vec3 x = anchor;
  for (int k = 0; k + 1 < dim; ++k) x = x + f[k] * frame[k];
  return x + f[dim - 1] * e;
}

bool CylinderDomain::on_boundary(std::size_t flat) const {
  const auto idx = node_index(flat);
  for (int k = 0; k < dim; ++k) {
    if (idx[k] == 0 || idx[k] == counts[k] - 1) return true;
  }
  return false;
}

CylinderDomain build_cylinder(int dim, const Vec3& e, const std::array<double, 2>& cross_center, double R, double h,
                              double spacing, const Vec3& x0, const std::optional<Frame>& frame) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
  for (int k = dim; k < 3; ++k) {
    if (e[k] != 0.0) throw std::invalid_argument("direction has components beyond the dimension");
  }
  if (std::abs(norm(e) - 1.0) > 1e-12) throw std::invalid_argument("direction must be a unit vector");
  if (!(h > 0.0)) throw std::invalid_argument("half height must be positive");
  if (!(spacing > 0.0)) throw std::invalid_argument("spacing must be positive");
  if (dim > 1 && !(R > 0.0)) throw std::invalid_argument("cross side must be positive");
  const double limit = dim > 1 ? std::min(R, 2.0 * h) / 4.0 : h / 2.0;
  if (spacing > limit * (1.0 + 1e-12)) throw std::invalid_argument("spacing too coarse for the cylinder extents");

  CylinderDomain d;
  d.dim = dim;
  d.e = e;
  d.frame = frame ? *frame : default_frame(dim, e);
  for (int k = 0; k + 1 < dim; ++k) {
    const Vec3& c = d.frame[k];
    for (int j = dim; j < 3; ++j) {
      if (c[j] != 0.0) throw std::invalid_argument("frame has components beyond the dimension");
    }
    if (std::abs(norm(c) - 1.0) > 1e-12 || std::abs(dot(c, e)) > 1e-12) {
      throw std::invalid_argument("frame must be orthonormal and orthogonal to the direction");
    }
    for (int j = 0; j < k; ++j) {
      if (std::abs(dot(c, d.frame[j])) > 1e-12) throw std::invalid_argument("frame columns must be orthogonal");
    }
  }
  d.cross_center = cross_center;
  d.cross_side = dim > 1 ? R : 1.0;
  d.half_height = h;
  d.spacing = spacing;
  d.anchor = x0;
  for (int k = 0; k + 1 < dim; ++k) {
    d.counts[k] = static_cast<int>(std::lround(R / spacing)) + 1;
    d.steps[k] = R / (d.counts[k] - 1);
    d.origin[k] = cross_center[k] - 0.5 * R;
  }
  d.counts[dim - 1] = static_cast<int>(std::lround(2.0 * h / spacing)) + 1;
  d.steps[dim - 1] = 2.0 * h / (d.counts[dim - 1] - 1);
  d.origin[dim - 1] = -h;
  for (int k = 0; k < dim; ++k) {
    if (d.counts[k] < 3) throw std::invalid_argument("degenerate cylinder: fewer than 3 nodes per axis");
  }
  return d;
}

Configuration planar_data(const CylinderDomain& domain, const Vec3& x0, const TransitionProfile& q, double eps) {
  Configuration c;
  c.domain = domain;
  const std::size_t n = domain.node_count();
  c.values.resize(n);
  c.pinned.resize(n);
  // <x - x0, e> = t + <anchor - x0, e> since the frame spans e-perp.
  const double shift = dot(domain.anchor - x0, domain.e);
  const int taxis = domain.dim - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = domain.node_index(i);
    const double t = domain.origin[taxis] + idx[taxis] * domain.steps[taxis];
    c.values[i] = std::clamp(q.value((t + shift) / eps), -1.0, 1.0);
    c.pinned[i] = domain.on_boundary(i) ? 1 : 0;
  }
  return c;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

EnergyModel::EnergyModel(const FinslerMedium& medium, const DoubleWell& W, const CylinderDomain& domain, double eps,
                         double smoothing_delta)
    : domain_(domain), W_(W), eps_(eps) {
  if (medium.dim() != domain.dim) throw std::invalid_argument("medium and domain dimensions differ");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const int d = domain.dim;
  std::array<Vec3, 3> cols{};
  for (int k = 0; k + 1 < d; ++k) cols[k] = domain.frame[k];
  cols[d - 1] = domain.e;
  for (const CellNorm& n : medium.norms()) {
    std::array<double, 9> B{};
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        if (n.form == CellNorm::Form::Scalar) {
          B[3 * i + j] = i == j ? n.scale * n.scale : 0.0;
        } else {
          double s = 0.0;
          for (int k = 0; k < 3; ++k) s += cols[i][k] * n.diag[k] * cols[j][k];
          B[3 * i + j] = s;
        }
      }
    }
    metrics_.push_back(B);
    offsets_.push_back(n.form == CellNorm::Form::Scalar ? n.scale * n.scale * smoothing_delta * smoothing_delta
                                                        : 0.0);
  }
  const std::size_t cells = domain.cell_count();
  cell_metric_.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const Vec3 x = domain.world_from_frame(domain.cell_frame(c));
    cell_metric_[c] = static_cast<std::uint32_t>(medium.norm_index((1.0 / eps) * x));
  }
}

template <int D>
double EnergyModel::accumulate(std::span<const double> u, double* grad, double* per_cell) const {
  constexpr int kCorners = 1 << D;
  const auto& dom = domain_;
  std::array<std::size_t, 3> stride{1, 1, 1};
  for (int k = D - 2; k >= 0; --k) stride[k] = stride[k + 1] * static_cast<std::size_t>(dom.counts[k + 1]);
  std::array<std::size_t, kCorners> corner{};
  for (int c = 0; c < kCorners; ++c) {
    std::size_t off = 0;
    for (int k = 0; k < D; ++k) {
      if (c & (1 << (D - 1 - k))) off += stride[k];
    }
    corner[c] = off;
  }
  std::array<double, 3> gscale{};
  for (int k = 0; k < D; ++k) gscale[k] = 1.0 / ((1 << (D - 1)) * dom.steps[k]);
  const double vol = dom.cell_volume();
  const double half_eps = 0.5 * eps_;
  const double inv_eps = 1.0 / eps_;
  const double inv_corners = 1.0 / kCorners;

  const int nt = dom.counts[D - 1] - 1;
  std::size_t rows = 1;
  for (int k = 0; k + 1 < D; ++k) rows *= static_cast<std::size_t>(dom.counts[k] - 1);
  std::vector<double> row_sums(rows, 0.0);

  std::size_t cell = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    // Node index of the row's first cell corner.
    std::size_t base = 0;
    {
      std::size_t rem = r;
      for (int k = D - 2; k >= 0; --k) {
        const std::size_t n = static_cast<std::size_t>(dom.counts[k] - 1);
        base += (rem % n) * stride[k];
        rem /= n;
      }
    }
    double row = 0.0;
    for (int it = 0; it < nt; ++it, ++cell, ++base) {
      std::array<double, kCorners> uc;
      double ubar = 0.0;
      for (int c = 0; c < kCorners; ++c) {
        uc[c] = u[base + corner[c]];
        ubar += uc[c];
      }
      ubar *= inv_corners;
      std::array<double, 3> G{};
      for (int k = 0; k < D; ++k) {
        const int bit = 1 << (D - 1 - k);
        double s = 0.0;
        for (int c = 0; c < kCorners; ++c) s += (c & bit) ? uc[c] : -uc[c];
        G[k] = s * gscale[k];
      }
      const auto& B = metrics_[cell_metric_[cell]];
      std::array<double, 3> BG{};
      double quad = 0.0;
      for (int i = 0; i < D; ++i) {
        double s = 0.0;
        for (int j = 0; j < D; ++j) s += B[3 * i + j] * G[j];
        BG[i] = s;
        quad += s * G[i];
      }
      const double e_cell = vol * (half_eps * (quad + offsets_[cell_metric_[cell]]) + inv_eps * W_.value(ubar));
      row += e_cell;
      if (per_cell) per_cell[cell] = e_cell;
      if (grad) {
        const double wprime = vol * inv_eps * W_.derivative(ubar) * inv_corners;
        std::array<double, 3> coef{};
        for (int k = 0; k < D; ++k) coef[k] = vol * eps_ * BG[k] * gscale[k];
        for (int c = 0; c < kCorners; ++c) {
          double g = wprime;
          for (int k = 0; k < D; ++k) g += (c & (1 << (D - 1 - k))) ? coef[k] : -coef[k];
          grad[base + corner[c]] += g;
        }
      }
    }
    row_sums[r] = row;
  }
  return pairwise_sum(row_sums);
}

double EnergyModel::energy(std::span<const double> u) const {
  if (u.size() != domain_.node_count()) throw std::invalid_argument("configuration size does not match the domain");
  switch (domain_.dim) {
    case 1: return accumulate<1>(u, nullptr, nullptr);
    case 2: return accumulate<2>(u, nullptr, nullptr);
    default: return accumulate<3>(u, nullptr, nullptr);
  }
}

double EnergyModel::energy_and_gradient(std::span<const double> u, std::span<double> grad) const {
  if (u.size() != domain_.node_count() || grad.size() != u.size()) {
    throw std::invalid_argument("configuration size does not match the domain");
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  switch (domain_.dim) {
    case 1: return accumulate<1>(u, grad.data(), nullptr);
    case 2: return accumulate<2>(u, grad.data(), nullptr);
    default: return accumulate<3>(u, grad.data(), nullptr);
  }
}

std::vector<double> EnergyModel::cell_energies(std::span<const double> u) const {
  if (u.size() != domain_.node_count()) throw std::invalid_argument("configuration size does not match the domain");
  std::vector<double> out(domain_.cell_count(), 0.0);
  switch (domain_.dim) {
    case 1: accumulate<1>(u, nullptr, out.data()); break;
    case 2: accumulate<2>(u, nullptr, out.data()); break;
    default: accumulate<3>(u, nullptr, out.data()); break;
  }
  return out;
}

double energy(const FinslerMedium& medium, const DoubleWell& W, const Configuration& u, double eps) {
  return EnergyModel(medium, W, u.domain, eps).energy(u.values);
}

}  // namespace ahc
