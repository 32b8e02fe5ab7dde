#include "ahc/runner.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "ahc/glue.hpp"
#include "ahc/parallel.hpp"

namespace ahc {

using nlohmann::ordered_json;

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ordered_json vec_json(const Vec3& v, int dim) {
  ordered_json a = ordered_json::array();
  for (int k = 0; k < dim; ++k) a.push_back(v[k]);
  return a;
}

ordered_json check_json(const PropertyCheck& c) {
  return {{"name", c.name},
          {"total", c.total},
          {"strict", c.strict},
          {"within_slack", c.within_slack},
          {"worst_margin", c.worst_margin},
          {"worst_slack", c.worst_slack},
          {"passed", c.passed()}};
}

ordered_json comparison_json(const Comparison& c) {
  return {{"name", c.name}, {"a", c.a},         {"a_stderr", c.a_err},    {"b", c.b},
          {"b_stderr", c.b_err}, {"tolerance", c.tolerance}, {"agrees", c.agrees()}};
}

ordered_json limit_json(const Extrapolation& x) {
  return {{"limit", x.limit},       {"stderr", x.stderr_limit},         {"slope", x.slope},
          {"points", x.points},     {"weighted", x.weighted},           {"ill_conditioned", x.ill_conditioned}};
}

ordered_json sweep_json(const SweepResult& r) {
  ordered_json j;
  j["axis"] = to_string(r.axis);
  j["passed"] = r.passed();
  ordered_json ens = ordered_json::array();
  for (const auto& s : r.ensemble) {
    ens.push_back({{"param", s.param}, {"count", s.count}, {"mean", s.mean}, {"std", s.std},
                   {"stderr", s.stderr_mean}});
  }
  j["ensemble"] = ens;
  j["limit"] = r.limit ? limit_json(*r.limit) : ordered_json(nullptr);
  if (r.horizon_bracket) j["horizon_bracket"] = {(*r.horizon_bracket)[0], (*r.horizon_bracket)[1]};
  j["checks"] = ordered_json::array();
  for (const auto& c : r.residuals) j["checks"].push_back(check_json(c));
  j["comparisons"] = ordered_json::array();
  for (const auto& c : r.comparisons) j["comparisons"].push_back(comparison_json(c));
  j["flags"] = r.flags;
  return j;
}

void add_rows(std::vector<CsvRow>& rows, const std::string& name, const SweepResult& r) {
  for (const auto& s : r.samples) rows.push_back({name, s});
  for (const auto& a : r.auxiliary) rows.push_back({name + ":" + a.role, a.sample});
}

Problem problem_for(const RunConfig& c, int jobs) {
  Problem p = c.problem;
  p.jobs = jobs;
  return p;
}

// phi(e) of a constant medium with a scalar norm, if that is what the config describes.
std::optional<double> constant_phi(const RunConfig& c, const Vec3& e) {
  const MediumSpec& m = c.problem.medium;
  if (m.kind != MediumKind::Constant) return std::nullopt;
  return m.params.norms.at(0)(e) * sigma_1d(c.problem.W, 1.0);
}

RunOutput run_oracle_1d(const RunConfig& c) {
  const auto phi = constant_phi(c, c.experiment.e);
  if (!phi) throw ConfigError("medium.kind", "oracle-1d needs a Constant medium");
  const FinslerMedium m = c.problem.medium.build();
  DomainSpec spec;
  spec.dim = 1;
  spec.R = 1.0;
  spec.h = *c.experiment.h;
  spec.spacing = c.problem.spacing;
  Configuration u;
  const auto s = finite_volume_sigma(c.experiment.e, Vec3{}, spec, m, c.problem.W, c.problem.q, c.problem.solver,
                                     nullptr, &u);
  const double rel = std::abs(s.value - *phi) / *phi;
  const double cap = c_lambda(c.problem.q, c.problem.W, c.problem.medium.params.Lambda_cap);
  PropertyCheck bound{"basic_bound"};
  bound.add(s.value - cap, 0.01 * cap);

  RunOutput out;
  out.rows.push_back({"oracle-1d", s});
  out.passed = rel <= c.experiment.tolerance && bound.passed() && s.value <= s.candidate;
  out.summary["value"] = s.value;
  out.summary["oracle"] = *phi;
  out.summary["relative_error"] = rel;
  out.summary["tolerance"] = c.experiment.tolerance;
  out.summary["candidate"] = s.candidate;
  out.summary["iters"] = s.iters;
  out.summary["converged"] = s.converged;
  out.summary["checks"] = ordered_json::array({check_json(bound)});
  out.grids.push_back({"oracle_1d_minimizer", std::move(u)});
  return out;
}

RunOutput run_sweep_r(const RunConfig& c, int jobs) {
  const Problem p = problem_for(c, jobs);
  const ExperimentConfig& x = c.experiment;
  RunOutput out;
  out.passed = true;
  ordered_json sweeps = ordered_json::array();
  std::vector<SweepResult> results;
  if (x.h) {
    HeightRule rule;
    rule.fixed = *x.h;
    results.push_back(r_sweep(p, x.e, rule, x.R_list, x.seeds));
  } else {
    for (double k : x.kappas) results.push_back(r_sweep(p, x.e, HeightRule{k, std::nullopt}, x.R_list, x.seeds));
  }
  for (std::size_t i = 0; i < results.size(); ++i) {
    ordered_json j = sweep_json(results[i]);
    if (!x.h) j["kappa"] = x.kappas[i];
    sweeps.push_back(j);
    add_rows(out.rows, "sweep-r", results[i]);
    out.passed = out.passed && results[i].passed();
  }
  ordered_json cmps = ordered_json::array();
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (!results[0].limit || !results[i].limit) continue;
    Comparison cmp;
    cmp.name = "kappa_independence_" + num(x.kappas[0]) + "_vs_" + num(x.kappas[i]);
    cmp.a = results[0].limit->limit;
    cmp.a_err = results[0].limit->stderr_limit;
    cmp.b = results[i].limit->limit;
    cmp.b_err = results[i].limit->stderr_limit;
    cmps.push_back(comparison_json(cmp));
    out.passed = out.passed && cmp.agrees();
  }
  out.summary["sweeps"] = sweeps;
  out.summary["comparisons"] = cmps;
  return out;
}

RunOutput run_single_sweep(const std::string& name, SweepResult r) {
  RunOutput out;
  add_rows(out.rows, name, r);
  out.passed = r.passed();
  out.summary["sweeps"] = ordered_json::array({sweep_json(r)});
  return out;
}

RunOutput run_wulff(const RunConfig& c, int jobs) {
  const ExperimentConfig& x = c.experiment;
  const WulffResult w = wulff_scan(problem_for(c, jobs), x.directions, x.R, *x.h, x.seeds);
  RunOutput out;
  for (const auto& s : w.samples) out.rows.push_back({"wulff", s});
  ordered_json table = ordered_json::array();
  for (std::size_t i = 0; i < w.table.angles.size(); ++i) {
    table.push_back({{"angle", w.table.angles[i]},
                     {"phi", w.table.values[i]},
                     {"stderr", w.table.stderrs[i]},
                     {"calibration", w.calibration[i]}});
  }
  out.summary["table"] = table;
  out.summary["checks"] = ordered_json::array({check_json(w.convexity), check_json(w.band)});
  out.summary["max_adjacent_change"] = w.max_adjacent_change;
  out.passed = w.convexity.passed() && w.band.passed();
  return out;
}

RunOutput run_recovery(const RunConfig& c, int jobs) {
  const ExperimentConfig& x = c.experiment;
  const int d = c.problem.medium.params.dim;
  std::optional<double> phi = x.reference_phi ? x.reference_phi : constant_phi(c, x.e);
  if (!phi) throw ConfigError("experiment.reference_phi", "required for non-constant media");
  double reference = *phi * std::pow(x.rho, d - 1);
  if (d == 2) {
    // Flat interface through x0 inside Q^e(x0, rho), measured by the perimeter functional.
    const double angle = std::atan2(x.e[1], x.e[0]);
    const SurfaceTensionTable table = make_table({angle}, {*phi});
    const Point2 c0{x.x0[0], x.x0[1]};
    const Point2 t{-x.e[1], x.e[0]};
    Polyline line;
    line.points = {{c0[0] - x.rho * t[0], c0[1] - x.rho * t[1]}, {c0[0] + x.rho * t[0], c0[1] + x.rho * t[1]}};
    reference = perimeter(table, line, square_region(c0, x.rho, angle));
  }
  const RecoveryResult r = recovery_energy(problem_for(c, jobs), x.e, x.x0, x.rho, x.eps_list, reference);
  RunOutput out;
  ordered_json series = ordered_json::array();
  for (const auto& pt : r.series) {
    SurfaceTensionSample s;
    s.dim = d;
    s.e = x.e;
    s.R = x.rho / pt.eps;
    s.h = s.R / 2.0;
    s.kappa = 0.5;
    s.rho = x.rho;
    s.seed = c.problem.medium.seed;
    s.value = pt.value;
    s.normalized = pt.value * std::pow(x.rho, 1 - d);
    s.iters = pt.iters;
    s.grad_norm = pt.grad_norm;
    out.rows.push_back({"recovery", s});
    series.push_back({{"eps", pt.eps}, {"value", pt.value}, {"candidate", pt.candidate}, {"iters", pt.iters},
                      {"converged", pt.converged}});
  }
  out.summary["series"] = series;
  out.summary["reference"] = r.reference;
  out.summary["terminal"] = r.series.back().value;
  out.summary["relative_error"] = r.relative_error;
  out.summary["tolerance"] = x.tolerance;
  out.summary["checks"] = ordered_json::array({check_json(r.decreasing), check_json(r.bound)});
  out.summary["flags"] = r.flags;
  out.passed = r.relative_error <= x.tolerance && r.decreasing.passed() && r.bound.passed();
  return out;
}

// One randomized gluing instance per seed: u and v minimize with traces offset along e,
// U is a random box around the interface, V the whole cylinder.
RunOutput run_glue_demo(const RunConfig& c, int jobs) {
  const ExperimentConfig& x = c.experiment;
  const Problem& p = c.problem;
  const int d = p.medium.params.dim;
  const double R = x.R, h = *x.h;
  struct Instance {
    SurfaceTensionSample su, sv;
    GlueResult glue;
    double shift = 0.0;
    FrameBox U, Up;
    bool w_matches = true;
  };
  std::vector<Instance> inst(x.seeds.size());
  parallel_for(x.seeds.size(), jobs, [&](std::size_t i) {
    const std::uint64_t seed = x.seeds[i];
    auto draw = [&](int k) { return detail::to_unit(detail::hash_counter(seed, static_cast<std::int64_t>(i), k, 0, 101)); };
    const FinslerMedium m = p.medium.with_seed(seed).build();
    Instance& in = inst[i];
    in.shift = 0.4 * draw(0) - 0.2;
    DomainSpec spec;
    spec.dim = d;
    spec.R = R;
    spec.h = h;
    spec.spacing = p.spacing;
    Configuration u, v;
    in.su = finite_volume_sigma(x.e, Vec3{}, spec, m, p.W, p.q, p.solver, nullptr, &u);
    in.sv = finite_volume_sigma(x.e, in.shift * x.e, spec, m, p.W, p.q, p.solver, nullptr, &v);
    const double span = std::min(R, 2.0 * h);
    const double D = span * (0.15 + 0.1 * draw(1));
    FrameBox V, U;
    for (int k = 0; k + 1 < d; ++k) {
      const double a = R * (0.15 + 0.1 * draw(2 + k));
      U.lo[k] = -a;
      U.hi[k] = a;
      V.lo[k] = -R / 2.0;
      V.hi[k] = R / 2.0;
    }
    const double b = h * (0.15 + 0.15 * draw(5));
    U.lo[d - 1] = -b;
    U.hi[d - 1] = b;
    V.lo[d - 1] = -h;
    V.hi[d - 1] = h;
    FrameBox Up = U;
    for (int k = 0; k < d; ++k) {
      Up.lo[k] -= D;
      Up.hi[k] += D;
    }
    in.U = U;
    in.Up = Up;
    in.glue = fundamental_glue(m, p.W, u, v, U, Up, V, D, x.shells, 1.0, x.zeta_threshold);
    const CylinderDomain& dom = u.domain;
    for (std::size_t n = 0; n < dom.node_count(); ++n) {
      const Vec3 f = dom.node_frame(n);
      const double w = in.glue.w.values[n];
      if (U.contains(f, d) && w != u.values[n]) in.w_matches = false;
      if (Up.distance(f, d) > 0.0 && w != v.values[n]) in.w_matches = false;
      if (w < -1.0 || w > 1.0) in.w_matches = false;
    }
  });

  RunOutput out;
  out.passed = true;
  ordered_json reports = ordered_json::array();
  PropertyCheck estimate{"fundamental_estimate"}, pigeon{"pigeonhole"};
  int exact = 0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const Instance& in = inst[i];
    const GlueReport& g = in.glue.report;
    out.rows.push_back({"glue-demo:u", in.su});
    out.rows.push_back({"glue-demo:v", in.sv});
    estimate.add(g.glued - g.rhs, 0.0);
    pigeon.add(g.best_cost - g.mean_cost, 0.0);
    exact += in.w_matches ? 1 : 0;
    reports.push_back({{"seed", x.seeds[i]},
                       {"shift", in.shift},
                       {"D", g.D},
                       {"shells", g.shells},
                       {"best_shell", g.best_shell},
                       {"best_cost", g.best_cost},
                       {"mean_cost", g.mean_cost},
                       {"glued", g.glued},
                       {"f_u", g.f_u},
                       {"f_v", g.f_v},
                       {"zeta", g.zeta},
                       {"C", g.C},
                       {"slack", g.slack},
                       {"rhs", g.rhs},
                       {"mean_bound", g.mean_bound},
                       {"w_matches_u_and_v", in.w_matches}});
  }
  ordered_json exact_check = {{"name", "w_equals_u_inside_and_v_outside"},
                              {"total", static_cast<int>(inst.size())},
                              {"passed", exact == static_cast<int>(inst.size())}};
  out.summary["instances"] = reports;
  out.summary["checks"] = ordered_json::array({check_json(estimate), check_json(pigeon), exact_check});
  out.passed = estimate.passed() && pigeon.passed() && exact == static_cast<int>(inst.size());
  if (!inst.empty()) out.grids.push_back({"glue_w_seed" + std::to_string(x.seeds[0]), inst[0].glue.w});
  return out;
}

}  // namespace

RunOutput run_experiment(const RunConfig& c, int jobs) {
  const ExperimentConfig& x = c.experiment;
  RunOutput out;
  switch (x.kind) {
    case ExperimentKind::Oracle1d:
      out = run_oracle_1d(c);
      break;
    case ExperimentKind::SweepR:
      out = run_sweep_r(c, jobs);
      break;
    case ExperimentKind::SweepH:
      out = run_single_sweep("sweep-h", h_sweep(problem_for(c, jobs), x.e, x.R, x.h_list, x.seeds));
      break;
    case ExperimentKind::OffCenter:
      out = run_single_sweep("off-center",
                             off_center_check(problem_for(c, jobs), x.e, x.x0, x.rho, x.R_list, x.seeds));
      break;
    case ExperimentKind::Wulff:
      out = run_wulff(c, jobs);
      break;
    case ExperimentKind::Recovery:
      out = run_recovery(c, jobs);
      break;
    case ExperimentKind::GlueDemo:
      out = run_glue_demo(c, jobs);
      break;
  }
  ordered_json head;
  head["experiment"] = to_string(x.kind);
  head["passed"] = out.passed;
  head["dim"] = c.problem.medium.params.dim;
  head["medium"] = to_string(c.problem.medium.kind);
  head["e"] = vec_json(x.e, c.problem.medium.params.dim);
  head["seeds"] = x.seeds;
  head["spacing"] = c.problem.spacing;
  head.update(out.summary);
  out.summary = std::move(head);
  if (!c.output.dump_grids) out.grids.clear();
  return out;
}

std::string format_csv(const std::vector<CsvRow>& rows, bool timing) {
  std::ostringstream os;
  os << "experiment,d,e_components,R,h,kappa,rho,seed,value,normalized,iters,grad_norm,wall_ms\n";
  for (const auto& r : rows) {
    const auto& s = r.sample;
    std::string e;
    for (int k = 0; k < s.dim; ++k) e += (k ? ";" : "") + num(s.e[k]);
    os << r.experiment << ',' << s.dim << ',' << e << ',' << num(s.R) << ',' << num(s.h) << ',' << num(s.kappa)
       << ',' << num(s.rho) << ',' << s.seed << ',' << num(s.value) << ',' << num(s.normalized) << ',' << s.iters
       << ',' << num(s.grad_norm) << ',' << (timing ? num(s.wall_ms) : std::string("0")) << '\n';
  }
  return os.str();
}

std::string dump_json(const ordered_json& j, int indent) {
  std::string out;
  auto rec = [&](auto&& self, const ordered_json& v, int depth) -> void {
    const std::string pad(static_cast<std::size_t>((depth + 1) * indent), ' ');
    const std::string close(static_cast<std::size_t>(depth * indent), ' ');
    if (v.is_object()) {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + ordered_json(it.key()).dump() + ": ";
        self(self, it.value(), depth + 1);
      }
      out += "\n" + close + "}";
    } else if (v.is_array()) {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        self(self, v[i], depth + 1);
      }
      out += "\n" + close + "]";
    } else if (v.is_number_float()) {
      const double x = v.get<double>();
      out += std::isfinite(x) ? num(x) : "null";
    } else {
      out += v.dump();
    }
  };
  rec(rec, j, 0);
  out += "\n";
  return out;
}

namespace {

std::string grid_bytes(const Configuration& c) {
  std::string bytes(c.values.size() * sizeof(double), '\0');
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(c.values[i]);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    std::memcpy(bytes.data() + i * sizeof(double), &bits, sizeof bits);
  }
  return bytes;
}

ordered_json grid_sidecar(const Configuration& c) {
  const CylinderDomain& d = c.domain;
  ordered_json j;
  ordered_json counts = ordered_json::array(), steps = ordered_json::array(), origin = ordered_json::array();
  for (int k = 0; k < d.dim; ++k) {
    counts.push_back(d.counts[k]);
    steps.push_back(d.steps[k]);
    origin.push_back(d.origin[k]);
  }
  j["dtype"] = "float64 little-endian";
  j["order"] = "lexicographic in frame coordinates (y_1, ..., y_{d-1}, t), t fastest";
  j["dim"] = d.dim;
  j["counts"] = counts;
  j["spacing"] = steps;
  j["frame_origin"] = origin;
  j["e"] = vec_json(d.e, d.dim);
  ordered_json frame = ordered_json::array();
  for (int k = 0; k + 1 < d.dim; ++k) frame.push_back(vec_json(d.frame[k], d.dim));
  j["frame"] = frame;
  j["anchor"] = vec_json(d.anchor, d.dim);
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  f.close();
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

void write_outputs(const std::filesystem::path& dir, const RunOutput& out, const OutputConfig& opts) {
  namespace fs = std::filesystem;
  std::vector<std::pair<fs::path, std::string>> files;
  files.emplace_back(dir / "samples.csv", format_csv(out.rows, opts.timing));
  for (const auto& g : out.grids) {
    files.emplace_back(dir / "grids" / (g.name + ".bin"), grid_bytes(g.config));
    files.emplace_back(dir / "grids" / (g.name + ".json"), dump_json(grid_sidecar(g.config)));
  }
  // summary.json goes last: its presence marks a complete run.
  files.emplace_back(dir / "summary.json", dump_json(out.summary));

  fs::create_directories(dir);
  if (!out.grids.empty()) fs::create_directories(dir / "grids");
  std::vector<fs::path> temps;
  try {
    for (const auto& [path, content] : files) {
      fs::path tmp = path;
      tmp += ".tmp";
      temps.push_back(tmp);
      write_file(tmp, content);
    }
    for (std::size_t i = 0; i < files.size(); ++i) fs::rename(temps[i], files[i].first);
  } catch (...) {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
    throw;
  }
}

int report(const std::filesystem::path& dir, std::ostream& out, std::ostream& err) {
  const auto path = dir / "summary.json";
  std::ifstream in(path);
  if (!in) {
    err << "no results in " << dir.string() << " (summary.json missing)\n";
    return 1;
  }
  ordered_json s;
  try {
    s = ordered_json::parse(in);
  } catch (const std::exception& e) {
    err << "unreadable summary.json: " << e.what() << '\n';
    return 1;
  }
  const bool passed = s.value("passed", false);
  const std::string verdict = passed ? "PASS" : "FAIL";
  const std::string kind = s.value("experiment", "?");
  auto val = [](const ordered_json& v) { return v.is_number() ? num(v.get<double>()) : std::string("n/a"); };
  auto print_checks = [&](const ordered_json& checks) {
    for (const auto& c : checks) {
      out << "  check " << c.value("name", "?") << ": " << (c.value("passed", false) ? "PASS" : "FAIL");
      if (c.contains("strict")) {
        out << " (" << c["within_slack"].get<int>() << "/" << c["total"].get<int>() << " within slack, "
            << c["strict"].get<int>() << " strict)";
      }
      out << '\n';
    }
  };

  if (kind == "oracle-1d") {
    out << verdict << " oracle-1d value=" << val(s["value"]) << " oracle=" << val(s["oracle"])
        << " relative_error=" << val(s["relative_error"]) << '\n';
    return passed ? 0 : 2;
  }
  out << verdict << ' ' << kind << '\n';
  if (kind == "wulff") {
    out << "  angle phi stderr calibration\n";
    for (const auto& row : s["table"]) {
      out << "  " << val(row["angle"]) << ' ' << val(row["phi"]) << ' ' << val(row["stderr"]) << ' '
          << val(row["calibration"]) << '\n';
    }
    const auto& conv = s["checks"][0];
    out << "  convexity: " << (conv.value("passed", false) ? "convex" : "NOT convex") << " on "
        << conv["total"].get<int>() << " sampled triples\n";
    print_checks(s["checks"]);
  } else if (kind == "recovery") {
    for (const auto& pt : s["series"]) out << "  eps=" << val(pt["eps"]) << " F=" << val(pt["value"]) << '\n';
    out << "  reference=" << val(s["reference"]) << " relative_error=" << val(s["relative_error"]) << '\n';
    print_checks(s["checks"]);
  } else if (kind == "glue-demo") {
    out << "  instances=" << s["instances"].size() << '\n';
    print_checks(s["checks"]);
  } else {
    for (const auto& sw : s["sweeps"]) {
      out << "  sweep over " << sw.value("axis", "?");
      if (sw.contains("kappa")) out << " (kappa=" << val(sw["kappa"]) << ")";
      out << '\n';
      for (const auto& e : sw["ensemble"]) {
        out << "    " << val(e["param"]) << ": mean=" << val(e["mean"]) << " std=" << val(e["std"])
            << " n=" << e["count"].get<int>() << '\n';
      }
      if (sw["limit"].is_object()) {
        out << "    limit=" << val(sw["limit"]["limit"]) << " stderr=" << val(sw["limit"]["stderr"]) << '\n';
      }
      print_checks(sw["checks"]);
      for (const auto& c : sw["comparisons"]) {
        out << "  compare " << c.value("name", "?") << ": " << (c.value("agrees", false) ? "PASS" : "FAIL") << '\n';
      }
      for (const auto& f : sw["flags"]) out << "    flag: " << f.get<std::string>() << '\n';
    }
    if (s.contains("comparisons")) {
      for (const auto& c : s["comparisons"]) {
        out << "  compare " << c.value("name", "?") << ": " << (c.value("agrees", false) ? "PASS" : "FAIL") << '\n';
      }
    }
  }
  return passed ? 0 : 2;
}

}  // namespace ahc
