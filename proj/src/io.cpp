#include "almgren/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace almgren {

Json point_to_json(const Point &p) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i)
    j.push_back(p[i] + 0.0); // drops the sign of -0
  return j;
}

Point point_from_json(const Json &j) {
  if (!j.is_array() || j.size() < 2 || j.size() > 3)
    throw ValidationError("point must be an array of 2 or 3 numbers");
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    p[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return p;
}

Json domain_to_json(const Domain &domain) {
  Json halves = Json::array();
  for (const auto &h : domain.halves())
    halves.push_back({{"normal", point_to_json(h.normal)}, {"offset", h.offset}});
  return {{"dim", domain.dim()}, {"halves", halves}};
}

Domain domain_from_json(const Json &j) {
  const int dim = j.at("dim").get<int>();
  std::vector<HalfSpace<double>> halves;
  for (const auto &h : j.value("halves", Json::array())) {
    Point n = point_from_json(h.at("normal"));
    if (n.size() != dim)
      throw ValidationError("half-space normal has the wrong dimension");
    halves.push_back({n, h.value("offset", 0.0)});
  }
  return Domain(dim, std::move(halves));
}

Json ball_to_json(const Balld &ball) { return {{"center", point_to_json(ball.center)}, {"radius", ball.radius}}; }

Balld ball_from_json(const Json &j) { return Balld(point_from_json(j.at("center")), j.at("radius").get<double>()); }

Json analytic_to_json(const AnalyticField &field) {
  switch (field.kind()) {
  case AnalyticKind::harmonic_polynomial:
    return {{"kind", "harmonic_polynomial"},
            {"dim", field.dim()},
            {"degree", field.degree()},
            {"coefficients", field.coefficients()},
            {"domain", domain_to_json(field.domain())}};
  case AnalyticKind::wedge_eigenfunction:
    return {{"kind", "wedge_eigenfunction"}, {"alpha", field.alpha()}, {"mode", field.mode()}, {"dim", field.dim()}};
  case AnalyticKind::one_sided_linear:
    return {{"kind", "one_sided_linear"}, {"direction", point_to_json(field.direction())}};
  }
  throw ValidationError("unknown analytic kind");
}

AnalyticField analytic_from_json(const Json &j) {
  if (j.contains("preset"))
    return preset_field(j.at("preset").get<std::string>());
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "harmonic_polynomial") {
    const int dim = j.value("dim", 2);
    const Domain d = j.contains("domain") ? domain_from_json(j.at("domain")) : Domain::whole_space(dim);
    return AnalyticField::harmonic_polynomial(dim, j.at("degree").get<int>(),
                                              j.at("coefficients").get<std::vector<double>>(), d);
  }
  if (kind == "wedge_eigenfunction")
    return AnalyticField::wedge_eigenfunction(j.at("alpha").get<double>(), j.value("mode", 1), j.value("dim", 2));
  if (kind == "one_sided_linear")
    return AnalyticField::one_sided_linear(point_from_json(j.at("direction")));
  throw ValidationError("unknown analytic field kind '" + kind + "'");
}

namespace {

double parse_angle(const std::string &s) {
  const auto pos = s.find("pi");
  if (pos == std::string::npos) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size())
      throw std::invalid_argument(s);
    return v;
  }
  double num = 1.0, den = 1.0;
  if (pos > 0)
    num = std::stod(s.substr(0, pos));
  const std::string rest = s.substr(pos + 2);
  if (!rest.empty()) {
    if (rest[0] != '/')
      throw std::invalid_argument(s);
    den = std::stod(rest.substr(1));
  }
  return num * pi / den;
}

} // namespace

AnalyticField preset_field(const std::string &name) {
  const Domain upper = Domain::upper_half_plane();
  const Domain plane = Domain::whole_space(2);
  if (name == "half_plane_linear")
    return AnalyticField::one_sided_linear(make_point({0.0, 1.0}));
  if (name == "poly_Re_z2")
    return AnalyticField::harmonic_polynomial(2, 2, {1.0, 0.0}, plane);
  if (name == "poly_Im_z2")
    return AnalyticField::harmonic_polynomial(2, 2, {0.0, 1.0}, upper);
  if (name == "poly_Re_z3")
    return AnalyticField::harmonic_polynomial(2, 3, {1.0, 0.0}, plane);
  if (name == "poly_Im_z3")
    return AnalyticField::harmonic_polynomial(2, 3, {0.0, 1.0}, upper);
  if (name.rfind("wedge_", 0) == 0) {
    double alpha = 0.0;
    try {
      alpha = parse_angle(name.substr(6));
    } catch (const std::exception &) {
      throw ValidationError("bad wedge angle in preset '" + name + "'");
    }
    return AnalyticField::wedge_eigenfunction(alpha, 1);
  }
  throw ValidationError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"half_plane_linear", "poly_Re_z2", "poly_Im_z2", "poly_Re_z3", "poly_Im_z3",
          "wedge_pi",          "wedge_3pi/4", "wedge_2pi/3", "wedge_pi/2"};
}

void write_grid(const std::string &stem, const GridField &grid) {
  const std::filesystem::path bin = stem + ".bin";
  Json shape = Json::array();
  for (int s : grid.shape())
    shape.push_back(s);
  const Json header = {{"origin", point_to_json(grid.origin())},
                       {"h", grid.spacing()},
                       {"shape", shape},
                       {"domain", domain_to_json(grid.domain())},
                       {"radius", grid.radius()},
                       {"data", bin.filename().string()}};
  std::ofstream os(bin, std::ios::binary);
  if (!os)
    throw IoError("cannot open " + bin.string());
  os.write(reinterpret_cast<const char *>(grid.values().data()),
           static_cast<std::streamsize>(grid.values().size() * sizeof(double)));
  if (!os)
    throw IoError("write failed: " + bin.string());
  write_json(stem + ".json", header);
}

GridField read_grid(const std::string &header_path) {
  const Json h = read_json(header_path);
  const std::vector<int> shape = h.at("shape").get<std::vector<int>>();
  std::size_t count = 1;
  for (int s : shape)
    count *= static_cast<std::size_t>(s);
  const std::filesystem::path bin =
      std::filesystem::path(header_path).parent_path() / h.at("data").get<std::string>();
  std::ifstream is(bin, std::ios::binary);
  if (!is)
    throw IoError("cannot open " + bin.string());
  std::vector<double> values(count);
  is.read(reinterpret_cast<char *>(values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (is.gcount() != static_cast<std::streamsize>(count * sizeof(double)))
    throw IoError("short grid data in " + bin.string());
  return GridField(point_from_json(h.at("origin")), h.at("h").get<double>(), shape, std::move(values),
                   domain_from_json(h.at("domain")), h.at("radius").get<double>());
}

Json profile_to_json(const FrequencyProfile &profile) {
  Json recs = Json::array();
  for (const auto &r : profile.records)
    recs.push_back({{"r", r.r}, {"H", r.H}, {"D", r.D}, {"N", r.N}, {"lambda", r.lambda}});
  return {{"center", point_to_json(profile.center)}, {"records", recs}, {"degenerate", profile.degenerate}};
}

namespace {

Json witness_json(const ReifWitness &w) {
  return {{"x", point_to_json(w.x)}, {"level", w.level}, {"radius", w.radius},
          {"mass", w.mass},          {"lhs", w.lhs},     {"rhs", w.rhs}};
}

Json plane_json(const AffinePlane<double> &p) {
  Json dirs = Json::array();
  for (const auto &d : p.directions)
    dirs.push_back(point_to_json(d));
  return {{"base", point_to_json(p.base)}, {"directions", dirs}};
}

} // namespace

Json verdict_to_json(const ReifVerdict &v) {
  Json levels = Json::array();
  for (const auto &w : v.per_level)
    levels.push_back(w ? witness_json(*w) : Json());
  return {{"satisfied", v.satisfied},
          {"packing", v.packing},
          {"triggers", v.triggers},
          {"ahlfors_ratio", v.ahlfors_ratio},
          {"weight", v.weight},
          {"worst", v.worst ? witness_json(*v.worst) : Json()},
          {"per_level", levels}};
}

BallFamily family_from_json(const Json &j) {
  BallFamily f;
  f.k = j.value("k", 1);
  f.dim = j.value("dim", 2);
  for (const auto &b : j.value("balls", Json::array()))
    f.balls.push_back(ball_from_json(b));
  f.validate();
  return f;
}

Json cover_to_json(const CoverResult &res) {
  const CoverParams &p = res.params;
  Json params = {{"rho", p.rho},     {"eta", p.eta}, {"eta_prime", p.eta_prime}, {"gamma", p.gamma},
                 {"epsilon", p.epsilon}, {"R", p.R}, {"k", p.k},                 {"E", p.E},
                 {"lattice_step", p.lattice_step}, {"resolution_factor", p.resolution_factor}};
  Json nodes = Json::array();
  for (const auto &n : res.nodes) {
    Json jn = {{"id", n.id},
               {"parent", n.parent},
               {"tree", n.tree},
               {"center", point_to_json(n.center)},
               {"radius", n.radius},
               {"tag", tag_name(n.tag)}};
    if (n.witness_value)
      jn["witness_value"] = *n.witness_value;
    if (n.witness)
      jn["witness"] = point_to_json(*n.witness);
    if (n.plane)
      jn["plane"] = plane_json(*n.plane);
    if (n.drop_sup)
      jn["drop_sup"] = *n.drop_sup;
    nodes.push_back(jn);
  }
  Json trees = Json::array();
  for (const auto &t : res.trees)
    trees.push_back({{"root", t.root},
                     {"good", t.good},
                     {"leaves", t.leaves},
                     {"stops", t.stops},
                     {"leaf_packing", t.leaf_packing},
                     {"stop_packing", t.stop_packing},
                     {"size_control", t.size_control},
                     {"covering_control", t.covering_control}});
  Json cover = Json::array();
  for (const auto &b : res.cover)
    cover.push_back({{"center", point_to_json(b.center)},
                     {"radius", b.radius},
                     {"stop_radius", b.stop_radius},
                     {"node", b.node}});
  Json levels = Json::object();
  for (const auto &[l, c] : res.leaves_per_level)
    levels[std::to_string(l)] = c;
  Json strata = Json::array();
  for (const auto &q : res.strata)
    strata.push_back(point_to_json(q));
  return {{"params", params},
          {"E", res.E},
          {"eta_R", res.eta_R},
          {"finest_scale", res.finest_scale},
          {"cardinality", res.cover.size()},
          {"packing", res.packing},
          {"count_R_k", res.count_R_k},
          {"stop_packing", res.stop_packing},
          {"alternations", res.alternations},
          {"covered", res.covered},
          {"uncovered", res.uncovered},
          {"radius_laws", res.radius_laws},
          {"leaves_per_level", levels},
          {"cover", cover},
          {"trees", trees},
          {"nodes", nodes},
          {"strata", strata}};
}

Json trace_to_json(const BlowupTrace &t) {
  Json scales = Json::array();
  for (const auto &s : t.scales)
    scales.push_back({{"r", s.r}, {"H", s.H}, {"D", s.D}, {"N", s.N}});
  return {{"Q", point_to_json(t.Q)},
          {"N0", t.N0},
          {"exponent", t.exponent},
          {"exponent_gap", t.exponent_gap},
          {"monotone", t.monotone},
          {"monotonicity_violation", t.monotonicity_violation},
          {"scales", scales}};
}

Json regularity_to_json(const RegularityReport &r) {
  return {{"Q", point_to_json(r.Q)},   {"N0", r.N0},         {"normal_derivative", r.normal_derivative},
          {"member", r.member},        {"margin", r.margin}, {"passed", r.passed}};
}

Json critical_to_json(const std::vector<CriticalPoint> &points) {
  Json out = Json::array();
  for (const auto &c : points) {
    Json j = {{"location", point_to_json(c.location)},
              {"kind", kind_name(c.kind)},
              {"gradient_norm", c.gradient_norm},
              {"normal_derivative", c.normal_derivative}};
    if (std::isfinite(c.N0))
      j["N0"] = c.N0;
    out.push_back(j);
  }
  return out;
}

void write_text(const std::string &path, const std::string &text) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw IoError("cannot open " + path);
  os << text;
  if (!os)
    throw IoError("write failed: " + path);
}

void write_json(const std::string &path, const Json &j) { write_text(path, j.dump(2) + "\n"); }

Json read_json(const std::string &path) {
  std::ifstream is(path);
  if (!is)
    throw IoError("cannot open " + path);
  try {
    return Json::parse(is);
  } catch (const Json::parse_error &e) {
    throw ValidationError(path + ": " + e.what());
  }
}

namespace {

struct Canvas {
  double x0, y0, x1, y1;
  double size = 480.0;
  std::ostringstream os;

  Canvas(double ax, double ay, double bx, double by) : x0(ax), y0(ay), x1(bx), y1(by) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
       << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }
  double X(double x) const { return (x - x0) / (x1 - x0) * size; }
  double Y(double y) const { return size - (y - y0) / (y1 - y0) * size; }
  double L(double r) const { return r / (x1 - x0) * size; }

  void circle(double x, double y, double r, const char *stroke, const char *fill, double width = 1.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" stroke=\"%s\" fill=\"%s\" stroke-width=\"%.2f\"/>\n", X(x),
                  Y(y), std::max(L(r), 0.5), stroke, fill, width);
    os << buf;
  }
  void polyline(const std::vector<std::pair<double, double>> &pts, const char *stroke, const char *fill = "none") {
    os << "<polyline fill=\"" << fill << "\" stroke=\"" << stroke << "\" points=\"";
    char buf[64];
    for (const auto &[x, y] : pts) {
      std::snprintf(buf, sizeof buf, "%.3f,%.3f ", X(x), Y(y));
      os << buf;
    }
    os << "\"/>\n";
  }
  void text(double x, double y, const std::string &s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">", x, y);
    os << buf << s << "</text>\n";
  }
  std::string finish() {
    os << "</svg>\n";
    return os.str();
  }
};

// Region box clipped by the domain's half-planes (2D only).
std::vector<std::pair<double, double>> domain_polygon(const Domain &domain, const Canvas &c) {
  std::vector<std::pair<double, double>> poly{{c.x0, c.y0}, {c.x1, c.y0}, {c.x1, c.y1}, {c.x0, c.y1}};
  for (const auto &h : domain.halves()) {
    std::vector<std::pair<double, double>> next;
    auto sd = [&](const std::pair<double, double> &p) { return h.normal[0] * p.first + h.normal[1] * p.second - h.offset; };
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const auto &a = poly[i], &b = poly[(i + 1) % poly.size()];
      const double da = sd(a), db = sd(b);
      if (da <= 0)
        next.push_back(a);
      if ((da < 0) != (db < 0) && da != db) {
        const double t = da / (da - db);
        next.emplace_back(a.first + t * (b.first - a.first), a.second + t * (b.second - a.second));
      }
    }
    poly = std::move(next);
    if (poly.empty())
      break;
  }
  if (!poly.empty())
    poly.push_back(poly.front());
  return poly;
}

Canvas region_canvas(const Balld &region) {
  const double r = region.radius * 1.05;
  return Canvas(region.center[0] - r, region.center[1] - r, region.center[0] + r, region.center[1] + r);
}

} // namespace

std::string profile_svg(const FrequencyProfile &profile) {
  double rmax = 0.0, nmin = 0.0, nmax = 1.0;
  bool first = true;
  for (const auto &r : profile.records) {
    rmax = std::max(rmax, r.r);
    nmin = first ? r.N : std::min(nmin, r.N);
    nmax = first ? r.N : std::max(nmax, r.N);
    first = false;
  }
  const double pad = std::max(0.1, 0.1 * (nmax - nmin));
  Canvas c(0.0, nmin - pad, rmax > 0 ? rmax * 1.05 : 1.0, nmax + pad);
  std::vector<std::pair<double, double>> pts;
  for (const auto &r : profile.records)
    pts.emplace_back(r.r, r.N);
  c.polyline(pts, "black");
  for (const auto &[x, y] : pts)
    c.circle(x, y, 0.0, "black", "black");
  char buf[96];
  std::snprintf(buf, sizeof buf, "N(r), range [%.4f, %.4f]", nmin, nmax);
  c.text(10, 20, buf);
  return c.finish();
}

std::string scan_svg(const StrataScan &scan, const Domain &domain, const Balld &region, double epsilon) {
  Canvas c = region_canvas(region);
  if (domain.dim() == 2)
    c.polyline(domain_polygon(domain, c), "gray", "#f0f0f0");
  c.circle(region.center[0], region.center[1], region.radius, "gray", "none");
  for (const auto &p : scan.lattice)
    c.circle(p.x[0], p.x[1], 0.0, p.margin >= epsilon ? "red" : "#bbbbbb", p.margin >= epsilon ? "red" : "none", 0.5);
  return c.finish();
}

std::string cover_svg(const CoverResult &result, const Domain &domain, const Balld &region) {
  Canvas c = region_canvas(region);
  if (domain.dim() == 2)
    c.polyline(domain_polygon(domain, c), "gray", "#f0f0f0");
  for (const auto &n : result.nodes) {
    const char *color = n.tag == BallTag::good ? "green" : n.tag == BallTag::bad ? "orange" : "blue";
    c.circle(n.center[0], n.center[1], n.radius, color, "none", 0.5);
  }
  for (const auto &b : result.cover)
    c.circle(b.center[0], b.center[1], b.radius, "black", "none", 1.5);
  for (const auto &q : result.strata)
    c.circle(q[0], q[1], 0.0, "red", "red");
  return c.finish();
}

} // namespace almgren
