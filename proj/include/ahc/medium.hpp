#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ahc/vec.hpp"

namespace ahc {

enum class MediumKind { Constant, Periodic, RandomCheckerboard, PoissonVoronoi };

std::string to_string(MediumKind kind);
MediumKind medium_kind_from_string(const std::string& name);

/// A convex, one-homogeneous norm attached to one cell of a medium.
///
/// Two families are supported: a scalar multiple of the Euclidean norm and an
/// axis-aligned elliptic norm sqrt(sum_k diag_k p_k^2). Both have smooth squares.
struct CellNorm {
  enum class Form { Scalar, Elliptic };

  Form form = Form::Scalar;
  double scale = 1.0;
  Vec3 diag{1.0, 1.0, 1.0};

  static CellNorm scalar(double c) { return CellNorm{Form::Scalar, c, {1.0, 1.0, 1.0}}; }
  static CellNorm elliptic(const Vec3& d) { return CellNorm{Form::Elliptic, 1.0, d}; }

  double squared(const Vec3& p) const;
  double operator()(const Vec3& p) const;
};

struct MediumParams {
  int dim = 2;
  double lambda = 1.0;
  double Lambda_cap = 1.0;
  double cell_size = 1.0;
  // Norm table. Constant uses entry 0; Periodic indexes it lexicographically by
  // cell index modulo `period`; the random kinds draw entries with `weights`.
  std::vector<CellNorm> norms{CellNorm::scalar(1.0)};
  std::vector<double> weights;
  std::array<int, 3> period{1, 1, 1};
  // PoissonVoronoi: mean number of seed points per box of side cell_size.
  double intensity = 1.0;
  // Lattice kinds draw their offset from the seed unless one is given here.
  std::optional<Vec3> offset;
};

/// One realization of a stationary Finsler metric field phi(x, p).
///
/// Evaluation is pure and may be shared across threads. The shift action is
/// stored as an accumulated translation, so shift(m, 0) and shift(shift(m, y), -y)
/// evaluate bit-identically to m.
class FinslerMedium {
 public:
  FinslerMedium() = default;

  MediumKind kind() const { return kind_; }
  int dim() const { return params_.dim; }
  double lambda() const { return params_.lambda; }
  double Lambda_cap() const { return params_.Lambda_cap; }
  double cell_size() const { return params_.cell_size; }
  std::uint64_t seed() const { return seed_; }
  const Vec3& offset() const { return offset_; }
  const Vec3& translation() const { return translation_; }
  const MediumParams& params() const { return params_; }
  const std::vector<CellNorm>& norms() const { return params_.norms; }

  /// Index into norms() of the norm in force at x.
  std::size_t norm_index(const Vec3& x) const;

  double eval(const Vec3& x, const Vec3& p) const { return params_.norms[norm_index(x)](p); }

  FinslerMedium shifted(const Vec3& y) const;

 private:
  friend FinslerMedium make_medium(MediumKind, const MediumParams&, std::uint64_t);

  std::size_t draw_index(std::uint64_t h) const;
  std::size_t voronoi_index(const Vec3& local) const;

  MediumKind kind_ = MediumKind::Constant;
  MediumParams params_;
  std::uint64_t seed_ = 0;
  Vec3 offset_{};
  Vec3 translation_{};
  std::vector<double> cumulative_;
};

FinslerMedium make_medium(MediumKind kind, const MediumParams& params, std::uint64_t seed);

inline double eval_metric(const FinslerMedium& m, const Vec3& x, const Vec3& p) { return m.eval(x, p); }

inline FinslerMedium shift(const FinslerMedium& m, const Vec3& y) { return m.shifted(y); }

/// Everything needed to rebuild a medium: what a sweep hands to each sample.
struct MediumSpec {
  MediumKind kind = MediumKind::Constant;
  MediumParams params;
  std::uint64_t seed = 0;

  FinslerMedium build() const { return make_medium(kind, params, seed); }
  MediumSpec with_seed(std::uint64_t s) const {
    MediumSpec copy = *this;
    copy.seed = s;
    return copy;
  }
};

namespace detail {
// Counter-based hashing (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_counter(std::uint64_t seed, std::int64_t i0, std::int64_t i1, std::int64_t i2,
                           std::uint64_t stream);
double to_unit(std::uint64_t h);
}  // namespace detail

}  // namespace ahc
