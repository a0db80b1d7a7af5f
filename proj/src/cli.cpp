#include "almgren/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

namespace almgren {

namespace fs = std::filesystem;

namespace {

Json points_json(const std::vector<Point> &pts) {
  Json j = Json::array();
  for (const auto &p : pts)
    j.push_back(point_to_json(p));
  return j;
}

std::vector<Point> points_from(const Json &j) {
  std::vector<Point> out;
  for (const auto &p : j)
    out.push_back(point_from_json(p));
  return out;
}

std::string resolve_path(const std::string &base, const std::string &path) {
  if (path.empty() || fs::path(path).is_absolute())
    return path;
  return (fs::path(base) / path).string();
}

} // namespace

Json config_to_json(const ExperimentConfig &c) {
  Json queries = Json::array();
  for (const auto &q : c.beta.queries)
    queries.push_back({{"p", point_to_json(q.p)}, {"r", q.r}});
  const CoverParams &p = c.cover;
  Json j = {{"field", c.field}};
  if (c.domain)
    j["domain"] = *c.domain;
  j["region"] = ball_to_json(c.region);
  j["center"] = point_to_json(c.center);
  j["radii"] = c.radii;
  j["strata"] = {{"step", c.strata.step},
                 {"k", c.strata.k},
                 {"epsilon", c.strata.epsilon},
                 {"r", c.strata.r},
                 {"max_scale", c.strata.max_scale}};
  j["beta"] = {{"measure", c.beta.measure}, {"points", points_json(c.beta.points)}, {"k", c.beta.k}, {"queries", queries}};
  j["reif"] = {{"mode", c.reif.mode},   {"family", c.reif.family}, {"sample", c.reif.sample},
               {"k", c.reif.k},         {"delta", c.reif.delta},   {"eps_k", c.reif.eps_k},
               {"max_depth", c.reif.max_depth}};
  j["cover"] = {{"rho", p.rho},
                {"eta", p.eta},
                {"eta_prime", p.eta_prime},
                {"gamma", p.gamma},
                {"epsilon", p.epsilon},
                {"R", p.R},
                {"k", p.k},
                {"E", p.E},
                {"lattice_step", p.lattice_step},
                {"resolution_factor", p.resolution_factor}};
  j["blowup"] = {{"points", points_json(c.blowup.points)},
                 {"ratio", c.blowup.ratio},
                 {"depth", c.blowup.depth},
                 {"step", c.blowup.step},
                 {"tol", c.blowup.tol},
                 {"epsilon", c.blowup.epsilon}};
  j["out"] = c.out;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j;
}

ExperimentConfig config_from_json(const Json &j, const std::string &base_dir) {
  if (!j.is_object())
    throw ValidationError("config must be a JSON object");
  ExperimentConfig c;
  c.base_dir = base_dir;
  try {
    if (j.contains("field"))
      c.field = j.at("field");
    if (j.contains("domain") && !j.at("domain").is_null())
      c.domain = j.at("domain");
    if (j.contains("region"))
      c.region = ball_from_json(j.at("region"));
    if (j.contains("center"))
      c.center = point_from_json(j.at("center"));
    if (j.contains("radii"))
      c.radii = j.at("radii").get<std::vector<double>>();
    if (j.contains("strata")) {
      const Json &s = j.at("strata");
      c.strata.step = s.value("step", c.strata.step);
      c.strata.k = s.value("k", c.strata.k);
      c.strata.epsilon = s.value("epsilon", c.strata.epsilon);
      c.strata.r = s.value("r", c.strata.r);
      c.strata.max_scale = s.value("max_scale", c.strata.max_scale);
    }
    if (j.contains("beta")) {
      const Json &b = j.at("beta");
      c.beta.measure = b.value("measure", std::string());
      c.beta.points = points_from(b.value("points", Json::array()));
      c.beta.k = b.value("k", 1);
      for (const auto &q : b.value("queries", Json::array()))
        c.beta.queries.push_back({point_from_json(q.at("p")), q.value("r", 1.0)});
    }
    if (j.contains("reif")) {
      const Json &r = j.at("reif");
      c.reif.mode = r.value("mode", c.reif.mode);
      c.reif.family = r.value("family", Json());
      c.reif.sample = r.value("sample", std::string());
      c.reif.k = r.value("k", c.reif.k);
      c.reif.delta = r.value("delta", c.reif.delta);
      c.reif.eps_k = r.value("eps_k", c.reif.eps_k);
      c.reif.max_depth = r.value("max_depth", c.reif.max_depth);
    }
    if (j.contains("cover")) {
      const Json &p = j.at("cover");
      CoverParams &q = c.cover;
      q.rho = p.value("rho", q.rho);
      q.eta = p.value("eta", q.eta);
      q.eta_prime = p.value("eta_prime", q.eta_prime);
      q.gamma = p.value("gamma", q.gamma);
      q.epsilon = p.value("epsilon", q.epsilon);
      q.R = p.value("R", q.R);
      q.k = p.value("k", q.k);
      q.E = p.value("E", q.E);
      q.lattice_step = p.value("lattice_step", q.lattice_step);
      q.resolution_factor = p.value("resolution_factor", q.resolution_factor);
    }
    if (j.contains("blowup")) {
      const Json &b = j.at("blowup");
      c.blowup.points = points_from(b.value("points", Json::array()));
      c.blowup.ratio = b.value("ratio", c.blowup.ratio);
      c.blowup.depth = b.value("depth", c.blowup.depth);
      c.blowup.step = b.value("step", c.blowup.step);
      c.blowup.tol = b.value("tol", c.blowup.tol);
      c.blowup.epsilon = b.value("epsilon", c.blowup.epsilon);
    }
    c.out = j.value("out", c.out);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
  } catch (const Json::exception &e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  for (const std::string *path : {&c.beta.measure, &c.reif.sample})
    if (!path->empty() && !fs::exists(resolve_path(base_dir, *path)))
      throw IoError("config references a missing file: " + *path);
  if (c.field.contains("grid") && !fs::exists(resolve_path(base_dir, c.field.at("grid").get<std::string>())))
    throw IoError("config references a missing grid: " + c.field.at("grid").get<std::string>());
  return c;
}

ExperimentConfig load_config(const std::string &path) {
  return config_from_json(read_json(path), fs::path(path).parent_path().string().empty()
                                               ? std::string(".")
                                               : fs::path(path).parent_path().string());
}

namespace {

GridField solve_from(const SolveBlock &s, SolveReport *report) {
  const AnalyticField boundary = analytic_from_json(s.boundary);
  const Domain d = s.domain.is_null() ? boundary.domain() : domain_from_json(s.domain);
  SolveOptions opt;
  opt.tolerance = s.tolerance;
  opt.max_iterations = s.max_iterations;
  return solve_dirichlet(d, [&boundary](const Point &x) { return boundary.value(x); }, s.resolution, opt, report);
}

SolveBlock solve_block(const Json &j) {
  SolveBlock s;
  s.domain = j.value("domain", Json());
  s.boundary = j.at("boundary");
  s.resolution = j.value("resolution", s.resolution);
  s.tolerance = j.value("tolerance", s.tolerance);
  s.max_iterations = j.value("max_iterations", s.max_iterations);
  return s;
}

} // namespace

ResolvedField resolve_field(const ExperimentConfig &config) {
  const Json &f = config.field;
  std::optional<Field> field;
  try {
    if (f.contains("grid"))
      field = Field(read_grid(resolve_path(config.base_dir, f.at("grid").get<std::string>())));
    else if (f.contains("solve"))
      field = Field(solve_from(solve_block(f.at("solve")), nullptr));
    else
      field = Field(analytic_from_json(f));
  } catch (const Json::exception &e) {
    throw ValidationError(std::string("field spec: ") + e.what());
  }
  const Domain d = config.domain ? domain_from_json(*config.domain) : field->domain();
  return {*field, d};
}

const std::vector<std::string> &command_names() {
  static const std::vector<std::string> names{"solve", "freq", "strata", "beta", "reif", "cover", "blowup", "verify"};
  return names;
}

namespace {

std::string path_in(const std::string &dir, const std::string &name) { return (fs::path(dir) / name).string(); }

template <typename F>
std::string to_text(F &&f) {
  std::ostringstream os;
  f(os);
  return os.str();
}

void cmd_solve(const ExperimentConfig &c, const std::string &out, std::ostream &log) {
  if (!c.field.contains("solve"))
    throw ValidationError("solve: the field spec needs a \"solve\" block");
  SolveReport rep;
  const GridField g = solve_from(solve_block(c.field.at("solve")), &rep);
  write_grid(path_in(out, "grid"), g);
  write_json(path_in(out, "solve.json"),
             {{"residual", rep.residual}, {"iterations", rep.iterations}, {"unknowns", rep.unknowns}});
  log << "solve: " << rep.unknowns << " unknowns, residual " << rep.residual << ", " << rep.iterations
      << " iterations\n";
}

void cmd_freq(const ExperimentConfig &c, const std::string &out, std::ostream &log) {
  const ResolvedField rf = resolve_field(c);
  const FrequencyProfile prof = frequency_profile(rf.field, rf.domain, c.center, c.radii);
  write_text(path_in(out, "profile.csv"), to_text([&](std::ostream &os) { write_profile_csv(os, prof); }));
  write_text(path_in(out, "profile.svg"), profile_svg(prof));
  log << "freq: " << prof.records.size() << " radii, " << prof.degenerate.size() << " degenerate\n";
}

void cmd_strata(const ExperimentConfig &c, const std::string &out, std::ostream &log) {
  const ResolvedField rf = resolve_field(c);
  const StrataBlock &s = c.strata;
  const StrataScan scan =
      strata_scan(rf.field, rf.domain, c.region, s.step, s.k, s.epsilon, s.r, s.max_scale);
  write_text(path_in(out, "scan.csv"), to_text([&](std::ostream &os) { write_scan_csv(os, scan, s.epsilon); }));
  write_text(path_in(out, "scan.svg"), scan_svg(scan, rf.domain, c.region, s.epsilon));
  log << "strata: " << scan.members.size() << " of " << scan.lattice.size() << " lattice points are members\n";
}

void cmd_beta(const ExperimentConfig &c, const std::string &out, std::ostream &log) {
  DiscreteMeasure mu;
  if (!c.beta.measure.empty()) {
    std::ifstream is(resolve_path(c.base_dir, c.beta.measure));
    if (!is)
      throw IoError("cannot open " + c.beta.measure);
    mu = read_measure_csv(is);
  } else {
    for (const auto &p : c.beta.points)
      mu.add(p, 1.0);
  }
  const auto rows = beta_batch(mu, c.beta.queries, c.beta.k);
  write_text(path_in(out, "beta.csv"), to_text([&](std::ostream &os) { write_beta_csv(os, rows); }));
  log << "beta: " << rows.size() << " queries over " << mu.size() << " atoms\n";
}

void cmd_reif(const ExperimentConfig &c, const std::string &out, std::ostream &log) {
  const ReifBlock &r = c.reif;
  ReifVerdict v;
  if (r.mode == "discrete") {
    v = discrete_reifenberg_check(family_from_json(r.family.is_null() ? Json::object() : r.family), r.delta, r.eps_k,
                                  r.max_depth);
  } else if (r.mode == "rectifiable") {
    std::ifstream is(resolve_path(c.base_dir, r.sample));
    if (!is)
      throw IoError("cannot open " + r.sample);
    v = rectifiable_check(read_measure_csv(is), r.k, r.delta, r.max_depth);
  } else {
    throw ValidationError("reif: mode must be discrete or rectifiable");
  }
  write_json(path_in(out, "verdict.json"), verdict_to_json(v));
  log << "reif: " << (v.satisfied ? "satisfied" : "rejected") << ", packing " << v.packing << '\n';
}

void cmd_cover(const ExperimentConfig &c, const std::string &out, std::ostream &log) {
  const ResolvedField rf = resolve_field(c);
  const CoverResult res = build_cover(rf.field, rf.domain, c.region, c.cover);
  Json j = cover_to_json(res);
  j["note"] = "eta is a calibrated default; the admissible range eta <= eta_0 has no effective value";
  write_json(path_in(out, "cover.json"), j);
  write_text(path_in(out, "cover.svg"), cover_svg(res, rf.domain, c.region));
  log << "cover: " << res.cover.size() << " balls, covered " << (res.covered ? "yes" : "no") << ", radius laws "
      << (res.radius_laws ? "hold" : "fail") << '\n';
}

void cmd_blowup(const ExperimentConfig &c, const std::string &out, std::ostream &log) {
  const ResolvedField rf = resolve_field(c);
  const BlowupBlock &b = c.blowup;
  std::vector<CriticalPoint> pts;
  if (b.points.empty()) {
    pts = critical_points(rf.field, rf.domain, c.region, b.step, b.tol);
  } else {
    for (const auto &q : b.points) {
      CriticalPoint cp;
      cp.location = q;
      cp.kind = contains(rf.domain, q) == Membership::interior ? CriticalKind::interior
                : is_flat_boundary_point(rf.domain, q)         ? CriticalKind::boundary_flat
                                                               : CriticalKind::boundary_singular;
      pts.push_back(cp);
    }
  }
  Json traces = Json::array();
  for (auto &cp : pts) {
    const BlowupTrace t = blowup_trace(rf.field, rf.domain, cp.location, b.ratio, b.depth);
    cp.N0 = t.N0;
    Json jt = trace_to_json(t);
    jt["kind"] = kind_name(cp.kind);
    if (cp.kind == CriticalKind::boundary_flat)
      jt["regularity"] = regularity_to_json(epsilon_regularity_report(rf.field, rf.domain, cp.location, b.epsilon,
                                                                       b.ratio, b.depth));
    traces.push_back(jt);
  }
  write_text(path_in(out, "critical.csv"), to_text([&](std::ostream &os) { write_critical_csv(os, pts); }));
  write_json(path_in(out, "traces.json"), traces);
  log << "blowup: " << pts.size() << " points traced\n";
}

void cmd_verify(const ExperimentConfig &c, const std::string &out, std::ostream &log) {
  const auto checks = verify_suite(c.seed);
  Json j = Json::array();
  std::ostringstream csv;
  csv << "check,measured,bound,passed\n";
  int failed = 0;
  char buf[256];
  for (const auto &ch : checks) {
    j.push_back({{"name", ch.name}, {"measured", ch.measured}, {"bound", ch.bound}, {"passed", ch.passed}});
    std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g,%d\n", ch.name.c_str(), ch.measured, ch.bound, ch.passed ? 1 : 0);
    csv << buf;
    failed += !ch.passed;
    log << (ch.passed ? "PASS " : "FAIL ") << ch.name << " measured " << ch.measured << " bound " << ch.bound << '\n';
  }
  write_json(path_in(out, "verify.json"), {{"seed", c.seed}, {"failed", failed}, {"checks", j}});
  write_text(path_in(out, "verify.csv"), csv.str());
  if (failed > 0)
    throw ValidationError(std::to_string(failed) + " verify checks failed");
}

} // namespace

int run_command(const std::string &command, const ExperimentConfig &config, const std::string &out_dir,
                std::ostream &log) {
  try {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
      throw IoError("cannot create " + out_dir + ": " + ec.message());
    if (command == "solve")
      cmd_solve(config, out_dir, log);
    else if (command == "freq")
      cmd_freq(config, out_dir, log);
    else if (command == "strata")
      cmd_strata(config, out_dir, log);
    else if (command == "beta")
      cmd_beta(config, out_dir, log);
    else if (command == "reif")
      cmd_reif(config, out_dir, log);
    else if (command == "cover")
      cmd_cover(config, out_dir, log);
    else if (command == "blowup")
      cmd_blowup(config, out_dir, log);
    else if (command == "verify")
      cmd_verify(config, out_dir, log);
    else
      throw ValidationError("unknown command '" + command + "'");
    return 0;
  } catch (const IoError &e) {
    log << "io error: " << e.what() << '\n';
    return 3;
  } catch (const SolverError &e) {
    log << "numerical failure: " << e.what() << " (residual " << e.residual() << ", " << e.iterations()
        << " iterations)\n";
    return 2;
  } catch (const DegenerateError &e) {
    log << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const Error &e) {
    log << "validation failure: " << e.what() << '\n';
    return 1;
  } catch (const Json::exception &e) {
    log << "validation failure: " << e.what() << '\n';
    return 1;
  }
}

namespace {

struct Suite {
  std::vector<VerifyCheck> checks;

  void at_most(const std::string &name, double measured, double bound) {
    checks.push_back({name, measured, bound, measured <= bound});
  }
  void at_least(const std::string &name, double measured, double bound) {
    checks.push_back({name, measured, bound, measured >= bound});
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

std::vector<VerifyCheck> verify_suite(std::uint64_t seed) {
  Suite s;
  const Point origin = make_point({0.0, 0.0});
  const std::vector<double> radii{0.5, 0.4, 0.3, 0.2, 0.1, 0.05};

  // Homogeneous oracles at the origin: N exact, lambda = N.
  struct Oracle {
    std::string name;
    double degree;
  };
  const std::vector<Oracle> oracles{{"half_plane_linear", 1.0}, {"poly_Re_z2", 2.0},  {"poly_Im_z2", 2.0},
                                    {"poly_Re_z3", 3.0},        {"poly_Im_z3", 3.0},  {"wedge_pi", 1.0},
                                    {"wedge_3pi/4", 4.0 / 3.0}, {"wedge_2pi/3", 1.5}, {"wedge_pi/2", 2.0}};
  for (const auto &o : oracles) {
    const AnalyticField af = preset_field(o.name);
    const Field f(af);
    const FrequencyProfile prof = frequency_profile(f, af.domain(), origin, radii);
    double n_err = 0.0, l_err = 0.0;
    for (const auto &r : prof.records) {
      n_err = std::max(n_err, rel(r.N, o.degree));
      l_err = std::max(l_err, std::abs(r.lambda - r.N) / r.N);
    }
    s.at_most(o.name + ".frequency_exact", n_err, 0.02);
    s.at_most(o.name + ".lambda_equals_N", l_err, 0.01);
    const BlowupTrace t = blowup_trace(f, af.domain(), origin);
    s.at_most(o.name + ".blowup_exponent_gap", t.exponent_gap, 0.05);
  }

  // Monotonicity at boundary points where the field is not homogeneous.
  struct Mono {
    std::string name;
    Point Q;
  };
  for (const auto &m : std::vector<Mono>{{"poly_Im_z2", make_point({0.3, 0.0})},
                                         {"poly_Im_z3", make_point({0.25, 0.0})},
                                         {"poly_Im_z3", make_point({-0.4, 0.0})},
                                         {"wedge_2pi/3", Point(0.3 * make_point({1.0, 0.0}))}}) {
    const AnalyticField af = preset_field(m.name);
    std::vector<double> ladder;
    for (int j = 0; j < 20; ++j)
      ladder.push_back(0.5 * std::pow(0.8, j));
    FrequencyProfile prof = frequency_profile(Field(af), af.domain(), m.Q, ladder);
    std::sort(prof.records.begin(), prof.records.end(),
              [](const FrequencyRecord &a, const FrequencyRecord &b) { return a.r < b.r; });
    double violation = 0.0;
    for (std::size_t i = 1; i < prof.records.size(); ++i)
      violation = std::max(violation, prof.records[i - 1].N - prof.records[i].N);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s.monotone_at(%.2f,%.2f)", m.name.c_str(), m.Q[0], m.Q[1]);
    s.at_most(buf, violation, 1e-3);
  }

  // Doubling: closed-form equality cases.
  struct Doubling {
    std::string name;
    double s, S, ratio;
  };
  for (const auto &d : std::vector<Doubling>{{"half_plane_linear", 0.2, 0.4, 8.0},
                                             {"poly_Im_z2", 0.1, 0.2, 32.0},
                                             {"wedge_2pi/3", 0.1, 0.2, 16.0}}) {
    const AnalyticField af = preset_field(d.name);
    const DoublingReport rep = doubling_check(Field(af), af.domain(), origin, d.s, d.S);
    s.at_most(d.name + ".doubling_ratio_error", rel(rep.lhs, d.ratio), 1e-3);
    s.at_most(d.name + ".doubling_slack", rep.lhs / rep.bound - 1.0, 1e-3);
  }

  // Beta: eigen form against the brute-force oracle.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.1, 2.0);
  std::uniform_int_distribution<int> count(2, 50);
  double beta_err = 0.0;
  for (int t = 0; t < 20; ++t) {
    DiscreteMeasure mu;
    const int m = count(rng);
    for (int i = 0; i < m; ++i)
      mu.add(make_point({u(rng), u(rng)}), w(rng));
    beta_err = std::max(beta_err, std::abs(beta_eigen(mu, origin, 1.0, 1).beta - beta_bruteforce(mu, origin, 1.0, 1).beta));
  }
  s.at_most("beta.eigen_vs_bruteforce", beta_err, 1e-6);
  DiscreteMeasure line;
  for (int i = 0; i < 7; ++i)
    line.add(make_point({-0.6 + 0.2 * i, 0.3 * (-0.6 + 0.2 * i) + 0.1}), 1.0 + i);
  s.at_most("beta.collinear", beta_eigen(line, origin, 1.0, 1).beta, 1e-10);

  // Reifenberg families.
  const ReifVerdict seg = discrete_reifenberg_check(collinear_family(5, make_point({1.0, 0.0})), 0.01, 0.1, 6);
  s.at_least("reif.segment_satisfied", seg.satisfied ? 1.0 : 0.0, 1.0);
  s.at_most("reif.segment_packing", seg.packing, 2.0);
  const ReifVerdict grid = discrete_reifenberg_check(square_grid_family(1.0 / 32, 0.5), 0.01, 0.1, 4);
  s.at_least("reif.grid_rejected", grid.satisfied ? 0.0 : 1.0, 1.0);
  const ReifVerdict empty = discrete_reifenberg_check(BallFamily{}, 0.01, 0.1, 6);
  s.at_least("reif.empty_satisfied", empty.satisfied ? 1.0 : 0.0, 1.0);

  // Epsilon regularity and flat-point frequencies.
  for (const char *name : {"poly_Im_z2", "poly_Im_z3"}) {
    const AnalyticField af = preset_field(name);
    const RegularityReport rep = epsilon_regularity_report(Field(af), af.domain(), origin);
    s.at_least(std::string(name) + ".regularity_N0", rep.N0, 1.95);
    s.at_least(std::string(name) + ".regularity_margin", rep.margin, 0.01);
  }
  {
    const AnalyticField af = preset_field("half_plane_linear");
    const RegularityReport rep = epsilon_regularity_report(Field(af), af.domain(), origin);
    s.at_most("half_plane_linear.flat_N0_error", std::abs(rep.N0 - 1.0), 0.02);
    s.at_most("half_plane_linear.flat_margin", rep.margin, 0.01);
  }

  // Minkowski content of a point.
  const auto mk = minkowski_content({origin}, 0.0, {0.1, 0.05});
  s.at_most("minkowski.point", rel(mk.back().content, pi / 4), 0.01);
  return s.checks;
}

} // namespace almgren
