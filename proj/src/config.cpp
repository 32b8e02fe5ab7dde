#include "ahc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace ahc {

using nlohmann::json;

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::SweepR:
      return "sweep-r";
    case ExperimentKind::SweepH:
      return "sweep-h";
    case ExperimentKind::Wulff:
      return "wulff";
    case ExperimentKind::OffCenter:
      return "off-center";
    case ExperimentKind::Recovery:
      return "recovery";
    case ExperimentKind::GlueDemo:
      return "glue-demo";
    case ExperimentKind::Oracle1d:
      return "oracle-1d";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (auto k : {ExperimentKind::SweepR, ExperimentKind::SweepH, ExperimentKind::Wulff, ExperimentKind::OffCenter,
                 ExperimentKind::Recovery, ExperimentKind::GlueDemo, ExperimentKind::Oracle1d}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown experiment type '" + name + "'");
}

namespace {

// A JSON object together with its dotted path, so every error can name the offending key.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const std::string& k) const { return j_.contains(k); }

  Section section(const std::string& k) const {
    static const json empty = json::object();
    return has(k) ? Section(j_.at(k), key(k)) : Section(empty, key(k));
  }

  const json& raw(const std::string& k) const {
    if (!has(k)) throw ConfigError(key(k), "missing required key");
    return j_.at(k);
  }

  double number(const std::string& k) const {
    const json& v = raw(k);
    if (!v.is_number()) throw ConfigError(key(k), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(key(k), "expected a finite number");
    return x;
  }
  double number(const std::string& k, double def) const { return has(k) ? number(k) : def; }

  double positive(const std::string& k, double def) const {
    const double x = number(k, def);
    if (!(x > 0.0)) throw ConfigError(key(k), "must be positive");
    return x;
  }

  std::int64_t integer(const std::string& k, std::int64_t def) const {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_number_integer()) throw ConfigError(key(k), "expected an integer");
    return v.get<std::int64_t>();
  }

  bool boolean(const std::string& k, bool def) const {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_boolean()) throw ConfigError(key(k), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& k, const std::string& def) const {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_string()) throw ConfigError(key(k), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& k) const {
    const json& v = raw(k);
    if (!v.is_array()) throw ConfigError(key(k), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(key(k) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  Vec3 vec(const std::string& k, int dim) const {
    const auto v = numbers(k);
    if (static_cast<int>(v.size()) != dim) {
      throw ConfigError(key(k), "expected " + std::to_string(dim) + " components (medium.dim)");
    }
    Vec3 out{};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
  }

  void allow(std::initializer_list<const char*> keys) const {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, _] : j_.items()) {
      if (!ok.count(k)) throw ConfigError(key(k), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
};

CellNorm parse_norm(const json& j, const std::string& path, int dim) {
  if (j.is_number()) return CellNorm::scalar(j.get<double>());
  Section s(j, path);
  s.allow({"scalar", "elliptic"});
  if (s.has("scalar") == s.has("elliptic")) throw ConfigError(path, "give exactly one of scalar, elliptic");
  if (s.has("scalar")) return CellNorm::scalar(s.number("scalar"));
  const auto d = s.numbers("elliptic");
  if (static_cast<int>(d.size()) != dim) throw ConfigError(s.key("elliptic"), "expected medium.dim entries");
  Vec3 diag{1.0, 1.0, 1.0};
  std::copy(d.begin(), d.end(), diag.begin());
  return CellNorm::elliptic(diag);
}

MediumSpec parse_medium(const Section& s) {
  s.allow({"kind", "dim", "lambda", "Lambda_cap", "cell_size", "norms", "weights", "period", "intensity", "offset",
           "seed"});
  MediumSpec m;
  try {
    m.kind = medium_kind_from_string(s.string("kind", "Constant"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.key("kind"), e.what());
  }
  MediumParams& p = m.params;
  p.dim = static_cast<int>(s.integer("dim", 2));
  if (p.dim < 1 || p.dim > 3) throw ConfigError(s.key("dim"), "must be 1, 2 or 3");
  p.lambda = s.positive("lambda", 1.0);
  p.Lambda_cap = s.positive("Lambda_cap", 1.0);
  if (p.lambda > p.Lambda_cap) {
    throw ConfigError(s.key("lambda"), "value exceeds " + s.key("Lambda_cap") + " (lambda must be <= Lambda_cap)");
  }
  p.cell_size = s.positive("cell_size", 1.0);
  if (s.has("norms")) {
    const json& n = s.raw("norms");
    if (!n.is_array() || n.empty()) throw ConfigError(s.key("norms"), "expected a non-empty array");
    p.norms.clear();
    for (std::size_t i = 0; i < n.size(); ++i) {
      p.norms.push_back(parse_norm(n[i], s.key("norms") + "[" + std::to_string(i) + "]", p.dim));
    }
  }
  if (s.has("weights")) p.weights = s.numbers("weights");
  if (s.has("period")) {
    const auto per = s.numbers("period");
    if (static_cast<int>(per.size()) != p.dim) throw ConfigError(s.key("period"), "expected medium.dim entries");
    for (int k = 0; k < p.dim; ++k) {
      if (per[k] < 1 || per[k] != std::floor(per[k])) throw ConfigError(s.key("period"), "entries must be integers >= 1");
      p.period[k] = static_cast<int>(per[k]);
    }
  }
  p.intensity = s.positive("intensity", 1.0);
  if (s.has("offset")) p.offset = s.vec("offset", p.dim);
  m.seed = static_cast<std::uint64_t>(s.integer("seed", 0));
  try {
    (void)m.build();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.key("norms"), e.what());
  }
  return m;
}

DoubleWell parse_potential(const Section& s) {
  s.allow({"form", "scale", "values"});
  const std::string form = s.string("form", "quartic");
  try {
    if (form == "quartic") return DoubleWell::quartic(s.positive("scale", 1.0));
    if (form == "tabulated") return DoubleWell::tabulated(s.numbers("values"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.key("values"), e.what());
  }
  throw ConfigError(s.key("form"), "expected quartic or tabulated");
}

TransitionProfile parse_profile(const Section& s) {
  s.allow({"form", "s_min", "s_max", "values"});
  const std::string form = s.string("form", "tanh");
  if (form == "tanh") return TransitionProfile::tanh_profile();
  if (form == "tabulated") {
    try {
      return TransitionProfile::tabulated(s.number("s_min"), s.number("s_max"), s.numbers("values"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(s.key("values"), e.what());
    }
  }
  throw ConfigError(s.key("form"), "expected tanh or tabulated");
}

SolverOptions parse_solver(const Section& s) {
  s.allow({"max_iters", "grad_tol", "energy_tol", "initial_step", "smoothing_delta", "warm_start"});
  SolverOptions o;
  o.max_iters = static_cast<int>(s.integer("max_iters", o.max_iters));
  o.grad_tol = s.number("grad_tol", o.grad_tol);
  o.energy_tol = s.number("energy_tol", o.energy_tol);
  o.initial_step = s.number("initial_step", o.initial_step);
  o.smoothing_delta = s.number("smoothing_delta", o.smoothing_delta);
  o.warm_start = s.boolean("warm_start", o.warm_start);
  try {
    o.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    throw ConfigError(msg.substr(0, msg.find(' ')), msg);
  }
  return o;
}

std::vector<double> increasing(const Section& s, const std::string& k) {
  auto v = s.numbers(k);
  if (v.empty()) throw ConfigError(s.key(k), "must not be empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) throw ConfigError(s.key(k), "entries must be positive");
    if (i > 0 && !(v[i] > v[i - 1])) throw ConfigError(s.key(k), "must be strictly increasing");
  }
  return v;
}

std::vector<std::uint64_t> parse_seeds(const Section& s) {
  if (!s.has("seeds")) return {1};
  const json& v = s.raw("seeds");
  std::vector<std::uint64_t> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_unsigned() && !(v[i].is_number_integer() && v[i].get<std::int64_t>() >= 0)) {
        throw ConfigError(s.key("seeds") + "[" + std::to_string(i) + "]", "expected a non-negative integer");
      }
      out.push_back(v[i].get<std::uint64_t>());
    }
  } else {
    const Section r(v, s.key("seeds"));
    r.allow({"count", "first"});
    const auto count = r.integer("count", 1);
    const auto first = r.integer("first", 1);
    if (count < 1) throw ConfigError(r.key("count"), "must be >= 1");
    if (first < 0) throw ConfigError(r.key("first"), "must be >= 0");
    for (std::int64_t i = 0; i < count; ++i) out.push_back(static_cast<std::uint64_t>(first + i));
  }
  if (out.empty()) throw ConfigError(s.key("seeds"), "must not be empty");
  return out;
}

ExperimentConfig parse_experiment(const Section& s, int dim) {
  s.allow({"type", "e", "seeds", "spacing", "R", "h", "R_list", "h_list", "kappa", "x0", "rho", "eps_list",
           "reference_phi", "directions", "shells", "zeta_threshold", "tolerance"});
  ExperimentConfig x;
  try {
    x.kind = experiment_kind_from_string(s.string("type", ""));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.key("type"), e.what());
  }
  if (s.has("e")) {
    x.e = s.vec("e", dim);
    const double n = norm(x.e);
    if (!(n > 0.0)) throw ConfigError(s.key("e"), "direction must be non-zero");
    x.e = (1.0 / n) * x.e;
  }
  x.seeds = parse_seeds(s);
  x.R = s.positive("R", x.R);
  if (s.has("h")) x.h = s.positive("h", 1.0);
  if (s.has("R_list")) x.R_list = increasing(s, "R_list");
  if (s.has("h_list")) x.h_list = increasing(s, "h_list");
  if (s.has("kappa")) {
    const json& k = s.raw("kappa");
    x.kappas = k.is_array() ? s.numbers("kappa") : std::vector<double>{s.number("kappa")};
    if (x.kappas.empty()) throw ConfigError(s.key("kappa"), "must not be empty");
    for (double v : x.kappas) {
      if (!(v > 0.0)) throw ConfigError(s.key("kappa"), "entries must be positive");
    }
  }
  if (s.has("x0")) x.x0 = s.vec("x0", dim);
  x.rho = s.positive("rho", x.rho);
  if (s.has("eps_list")) {
    x.eps_list = s.numbers("eps_list");
    for (std::size_t i = 0; i < x.eps_list.size(); ++i) {
      if (!(x.eps_list[i] > 0.0)) throw ConfigError(s.key("eps_list"), "entries must be positive");
      if (i > 0 && !(x.eps_list[i] < x.eps_list[i - 1])) {
        throw ConfigError(s.key("eps_list"), "must be strictly decreasing");
      }
    }
  }
  if (s.has("reference_phi")) x.reference_phi = s.positive("reference_phi", 1.0);
  x.directions = static_cast<int>(s.integer("directions", x.directions));
  x.shells = static_cast<int>(s.integer("shells", x.shells));
  x.zeta_threshold = s.positive("zeta_threshold", x.zeta_threshold);
  x.tolerance = s.positive("tolerance", x.tolerance);

  auto need = [&](bool ok, const std::string& k, const std::string& what) {
    if (!ok) throw ConfigError(s.key(k), what);
  };
  switch (x.kind) {
    case ExperimentKind::Oracle1d:
      need(dim == 1, "type", "oracle-1d needs medium.dim = 1");
      need(x.h.has_value(), "h", "missing required key");
      break;
    case ExperimentKind::SweepR:
      need(!x.R_list.empty(), "R_list", "missing required key");
      break;
    case ExperimentKind::SweepH:
      need(!x.h_list.empty(), "h_list", "missing required key");
      break;
    case ExperimentKind::OffCenter:
      need(!x.R_list.empty(), "R_list", "missing required key");
      break;
    case ExperimentKind::Wulff:
      need(dim == 2, "type", "wulff needs medium.dim = 2");
      need(x.directions >= 4, "directions", "must be >= 4");
      need(x.h.has_value(), "h", "missing required key");
      break;
    case ExperimentKind::Recovery:
      need(!x.eps_list.empty(), "eps_list", "missing required key");
      break;
    case ExperimentKind::GlueDemo:
      need(dim >= 2, "type", "glue-demo needs medium.dim >= 2");
      need(x.h.has_value(), "h", "missing required key");
      need(x.shells == 0 || x.shells >= 2, "shells", "must be 0 (automatic) or >= 2");
      break;
  }
  return x;
}

}  // namespace

RunConfig parse_config(const json& root) {
  const Section top(root, "");
  top.allow({"medium", "potential", "profile", "experiment", "solver", "output"});
  if (!top.has("experiment")) throw ConfigError("experiment", "missing required section");
  RunConfig c;
  c.problem.medium = parse_medium(top.section("medium"));
  c.problem.W = parse_potential(top.section("potential"));
  c.problem.q = parse_profile(top.section("profile"));
  c.problem.solver = parse_solver(top.section("solver"));
  const Section ex = top.section("experiment");
  c.experiment = parse_experiment(ex, c.problem.medium.params.dim);
  c.problem.spacing = ex.positive("spacing", 0.1);
  const Section out = top.section("output");
  out.allow({"timing", "dump_grids"});
  c.output.timing = out.boolean("timing", false);
  c.output.dump_grids = out.boolean("dump_grids", false);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  json root;
  try {
    root = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(root);
}

void override_seed(RunConfig& config, std::uint64_t seed) {
  config.experiment.seeds = {seed};
  config.problem.medium.seed = seed;
}

}  // namespace ahc
