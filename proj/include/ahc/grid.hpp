#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ahc/medium.hpp"
#include "ahc/potential.hpp"
#include "ahc/vec.hpp"

namespace ahc {

using Frame = std::array<Vec3, 2>;

/// Deterministic orthonormal basis of the hyperplane orthogonal to e.
Frame default_frame(int dim, const Vec3& e);

/// Discretized e-aligned cylinder x0 + Q(c, R) (+)_e (-h, h).
///
/// Frame coordinates are (y_1, ..., y_{d-1}, t): y in the cross cube, t along e.
/// Nodes are stored lexicographically with t varying fastest.
struct CylinderDomain {
  int dim = 1;
  Vec3 e{1.0, 0.0, 0.0};
  Frame frame{};
  std::array<double, 2> cross_center{0.0, 0.0};
  double cross_side = 1.0;
  double half_height = 1.0;
  double spacing = 0.1;
  Vec3 anchor{};

  std::array<int, 3> counts{1, 1, 1};
  std::array<double, 3> steps{1.0, 1.0, 1.0};
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  std::size_t node_count() const;
  std::size_t cell_count() const;
  double cell_volume() const;
  /// Lebesgue measure of the cross section (1 when d = 1).
  double cross_measure() const;

  std::array<int, 3> node_index(std::size_t flat) const;
  std::size_t flat_index(const std::array<int, 3>& idx) const;
  /// Frame coordinates of a node.
  Vec3 node_frame(std::size_t flat) const;
  /// Frame coordinates of the center of a cell, cells indexed like nodes with counts - 1.
  Vec3 cell_frame(std::size_t cell) const;
  Vec3 world_from_frame(const Vec3& f) const;
  bool on_boundary(std::size_t flat) const;
};

CylinderDomain build_cylinder(int dim, const Vec3& e, const std::array<double, 2>& cross_center, double R, double h,
                              double spacing, const Vec3& x0, const std::optional<Frame>& frame = std::nullopt);

/// Nodal values in [-1, 1] plus a Dirichlet mask (1 = pinned).
struct Configuration {
  CylinderDomain domain;
  std::vector<double> values;
  std::vector<std::uint8_t> pinned;
};

/// Trace T_{x0} q_e (rescaled by eps) sampled at every node; boundary nodes pinned.
Configuration planar_data(const CylinderDomain& domain, const Vec3& x0, const TransitionProfile& q, double eps = 1.0);

/// Discrete localized energy F_eps(u; A): d-linear cells, corner-difference gradients,
/// midpoint quadrature with the medium sampled once per cell center.
class EnergyModel {
 public:
  EnergyModel(const FinslerMedium& medium, const DoubleWell& W, const CylinderDomain& domain, double eps = 1.0,
              double smoothing_delta = 0.0);

  const CylinderDomain& domain() const { return domain_; }
  double eps() const { return eps_; }

  double energy(std::span<const double> u) const;
  /// Energy and its gradient with respect to every nodal value (pinned or not).
  double energy_and_gradient(std::span<const double> u, std::span<double> grad) const;
  /// Energy contribution of each cell.
  std::vector<double> cell_energies(std::span<const double> u) const;

  /// Norm-table index of the medium at a cell center.
  std::uint32_t cell_metric(std::size_t cell) const { return cell_metric_[cell]; }

 private:
  template <int D>
  double accumulate(std::span<const double> u, double* grad, double* per_cell) const;

  CylinderDomain domain_;
  DoubleWell W_;
  double eps_;
  // Frame metrics B = M^T A M per norm-table entry, M = [frame | e]; row-major 3x3.
  std::vector<std::array<double, 9>> metrics_;
  std::vector<double> offsets_;
  std::vector<std::uint32_t> cell_metric_;
};

double energy(const FinslerMedium& medium, const DoubleWell& W, const Configuration& u, double eps = 1.0);

/// Deterministic pairwise sum.
double pairwise_sum(std::span<const double> values);

}  // namespace ahc
