#include "ahc/medium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ahc {

namespace detail {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_counter(std::uint64_t seed, std::int64_t i0, std::int64_t i1, std::int64_t i2,
                           std::uint64_t stream) {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = mix64(h ^ static_cast<std::uint64_t>(i0));
  h = mix64(h ^ static_cast<std::uint64_t>(i1));
  h = mix64(h ^ static_cast<std::uint64_t>(i2));
  return mix64(h ^ stream);
}

double to_unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

}  // namespace detail

namespace {

constexpr std::uint64_t kStreamOffset = 1;
constexpr std::uint64_t kStreamCell = 2;
constexpr std::uint64_t kStreamCount = 3;
constexpr std::uint64_t kStreamPoint = 16;

// Cell index of a coordinate. A point on a face goes to the lower cell.
std::int64_t cell_of(double coord, double size) {
  return static_cast<std::int64_t>(std::ceil(coord / size)) - 1;
}

bool within(double v, double lo, double hi) {
  const double tol = 1e-12 * std::max(1.0, std::abs(hi));
  return v >= lo - tol && v <= hi + tol;
}

void validate(MediumKind kind, const MediumParams& p) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (p.dim < 1 || p.dim > 3) fail("dim must be 1, 2 or 3");
  if (!(p.lambda > 0.0)) fail("lambda must be positive");
  if (!(p.Lambda_cap > 0.0)) fail("Lambda_cap must be positive");
  if (p.lambda > p.Lambda_cap) {
    std::ostringstream os;
    os << "lambda (" << p.lambda << ") exceeds Lambda_cap (" << p.Lambda_cap << ")";
    fail(os.str());
  }
  if (!(p.cell_size > 0.0)) fail("cell_size must be positive");
  if (p.norms.empty()) fail("norm table is empty");
  const double lo = std::sqrt(p.lambda);
  const double hi = std::sqrt(p.Lambda_cap);
  for (std::size_t i = 0; i < p.norms.size(); ++i) {
    const CellNorm& n = p.norms[i];
    if (n.form == CellNorm::Form::Scalar) {
      if (!within(n.scale, lo, hi)) {
        std::ostringstream os;
        os << "norm value " << n.scale << " (entry " << i << ") outside [sqrt(lambda), sqrt(Lambda_cap)] = [" << lo
           << ", " << hi << "]";
        fail(os.str());
      }
    } else {
      for (int k = 0; k < p.dim; ++k) {
        if (!within(n.diag[k], p.lambda, p.Lambda_cap)) {
          std::ostringstream os;
          os << "elliptic eigenvalue " << n.diag[k] << " (entry " << i << ") outside [lambda, Lambda_cap]";
          fail(os.str());
        }
      }
    }
  }
  if (kind == MediumKind::Periodic) {
    std::size_t cells = 1;
    for (int k = 0; k < p.dim; ++k) {
      if (p.period[k] < 1) fail("period entries must be >= 1");
      cells *= static_cast<std::size_t>(p.period[k]);
    }
    if (cells != p.norms.size()) fail("periodic norm table size must equal the product of the period");
  }
  if (!p.weights.empty()) {
    if (p.weights.size() != p.norms.size()) fail("weights must match the norm table size");
    double total = 0.0;
    for (double w : p.weights) {
      if (!(w >= 0.0)) fail("weights must be non-negative");
      total += w;
    }
    if (!(total > 0.0)) fail("weights must not all be zero");
  }
  if (kind == MediumKind::PoissonVoronoi && !(p.intensity > 0.0)) fail("intensity must be positive");
}

}  // namespace

std::string to_string(MediumKind kind) {
  switch (kind) {
    case MediumKind::Constant: return "Constant";
    case MediumKind::Periodic: return "Periodic";
    case MediumKind::RandomCheckerboard: return "RandomCheckerboard";
    case MediumKind::PoissonVoronoi: return "PoissonVoronoi";
  }
  return "?";
}

MediumKind medium_kind_from_string(const std::string& name) {
  if (name == "Constant") return MediumKind::Constant;
  if (name == "Periodic") return MediumKind::Periodic;
  if (name == "RandomCheckerboard") return MediumKind::RandomCheckerboard;
  if (name == "PoissonVoronoi") return MediumKind::PoissonVoronoi;
  throw std::invalid_argument("unknown medium kind '" + name + "'");
}

double CellNorm::squared(const Vec3& p) const {
  if (form == Form::Scalar) return scale * scale * dot(p, p);
  return diag[0] * p[0] * p[0] + diag[1] * p[1] * p[1] + diag[2] * p[2] * p[2];
}

double CellNorm::operator()(const Vec3& p) const {
  if (form == Form::Scalar) return scale * norm(p);
  return std::sqrt(squared(p));
}

FinslerMedium make_medium(MediumKind kind, const MediumParams& params, std::uint64_t seed) {
  validate(kind, params);
  FinslerMedium m;
  m.kind_ = kind;
  m.params_ = params;
  m.seed_ = seed;
  for (int k = params.dim; k < 3; ++k) m.params_.period[k] = 1;

  if (params.offset) {
    m.offset_ = *params.offset;
  } else if (kind != MediumKind::Constant) {
    for (int k = 0; k < params.dim; ++k) {
      m.offset_[k] = params.cell_size * detail::to_unit(detail::hash_counter(seed, k, 0, 0, kStreamOffset));
    }
  }
  for (int k = params.dim; k < 3; ++k) m.offset_[k] = 0.0;

  std::vector<double> w = params.weights;
  if (w.empty()) w.assign(params.norms.size(), 1.0);
  double total = 0.0;
  for (double v : w) total += v;
  double running = 0.0;
  m.cumulative_.clear();
  for (double v : w) {
    running += v / total;
    m.cumulative_.push_back(running);
  }
  m.cumulative_.back() = 1.0;
  return m;
}

std::size_t FinslerMedium::draw_index(std::uint64_t h) const {
  const double u = detail::to_unit(h);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
}

std::size_t FinslerMedium::voronoi_index(const Vec3& local) const {
  const int d = params_.dim;
  const double cs = params_.cell_size;
  std::array<std::int64_t, 3> center{0, 0, 0};
  for (int k = 0; k < d; ++k) center[k] = cell_of(local[k], cs);

  double best = std::numeric_limits<double>::infinity();
  std::array<std::int64_t, 4> best_key{};
  std::size_t best_index = 0;
  bool found = false;

  auto visit_box = [&](const std::array<std::int64_t, 3>& b) {
    const double u = detail::to_unit(detail::hash_counter(seed_, b[0], b[1], b[2], kStreamCount));
    // Poisson count by inversion.
    const double mean = params_.intensity;
    double p = std::exp(-mean);
    double cdf = p;
    int count = 0;
    while (u > cdf && count < 1000) {
      ++count;
      p *= mean / count;
      cdf += p;
    }
    for (int j = 0; j < count; ++j) {
      Vec3 pt{};
      for (int k = 0; k < d; ++k) {
        const auto h = detail::hash_counter(seed_, b[0], b[1], b[2], kStreamPoint + 4 * j + k);
        pt[k] = (static_cast<double>(b[k]) + detail::to_unit(h)) * cs;
      }
      const Vec3 diff = local - pt;
      const double dist = dot(diff, diff);
      const std::array<std::int64_t, 4> key{b[0], b[1], b[2], j};
      if (!found || dist < best || (dist == best && key < best_key)) {
        found = true;
        best = dist;
        best_key = key;
        best_index = draw_index(detail::hash_counter(seed_, b[0], b[1], b[2], kStreamPoint + 4 * j + 3));
      }
    }
  };

  // Scan Chebyshev rings of boxes; ring 1 is the 3^d neighbourhood.
  for (int ring = 0; ring <= 64; ++ring) {
    const int lo0 = d > 0 ? -ring : 0, hi0 = d > 0 ? ring : 0;
    const int lo1 = d > 1 ? -ring : 0, hi1 = d > 1 ? ring : 0;
    const int lo2 = d > 2 ? -ring : 0, hi2 = d > 2 ? ring : 0;
    for (int a = lo0; a <= hi0; ++a) {
      for (int b = lo1; b <= hi1; ++b) {
        for (int c = lo2; c <= hi2; ++c) {
          if (std::max({std::abs(a), std::abs(b), std::abs(c)}) != ring) continue;
          visit_box({center[0] + a, center[1] + b, center[2] + c});
        }
      }
    }
    // Boxes in ring + 1 are at least ring * cs away.
    if (ring >= 1 && found && std::sqrt(best) < ring * cs) break;
  }
  return best_index;
}

std::size_t FinslerMedium::norm_index(const Vec3& x) const {
  const int d = params_.dim;
  Vec3 local{};
  for (int k = 0; k < d; ++k) local[k] = (x[k] + translation_[k]) - offset_[k];

  switch (kind_) {
    case MediumKind::Constant:
      return 0;
    case MediumKind::Periodic: {
      std::size_t idx = 0;
      for (int k = 0; k < d; ++k) {
        const std::int64_t c = cell_of(local[k], params_.cell_size);
        const std::int64_t per = params_.period[k];
        idx = idx * static_cast<std::size_t>(per) + static_cast<std::size_t>(((c % per) + per) % per);
      }
      return idx;
    }
    case MediumKind::RandomCheckerboard: {
      std::array<std::int64_t, 3> c{0, 0, 0};
      for (int k = 0; k < d; ++k) c[k] = cell_of(local[k], params_.cell_size);
      return draw_index(detail::hash_counter(seed_, c[0], c[1], c[2], kStreamCell));
    }
    case MediumKind::PoissonVoronoi:
      return voronoi_index(local);
  }
  return 0;
}

FinslerMedium FinslerMedium::shifted(const Vec3& y) const {
  FinslerMedium out = *this;
  for (int k = 0; k < params_.dim; ++k) out.translation_[k] = translation_[k] + y[k];
  return out;
}

}  // namespace ahc
