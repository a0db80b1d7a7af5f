#ifndef ALMGREN_CLI_HPP
#define ALMGREN_CLI_HPP

#include "almgren/io.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace almgren {

struct StrataBlock {
  double step = 1.0 / 64;
  int k = 0;
  double epsilon = 0.01;
  double r = 1.0 / 64;
  double max_scale = 0.0;
};

struct BetaBlock {
  std::string measure;           // CSV path (x,y[,z],w)
  std::vector<Point> points;     // inline unit-weight atoms when no path is given
  int k = 1;
  std::vector<BetaQuery> queries;
};

struct ReifBlock {
  std::string mode = "discrete"; // discrete | rectifiable
  Json family;                   // BallFamily JSON for discrete mode
  std::string sample;            // CSV path for rectifiable mode
  int k = 1;
  double delta = 0.01;
  double eps_k = 0.1;
  int max_depth = 8;
};

struct BlowupBlock {
  std::vector<Point> points; // empty: every critical point in the region
  double ratio = 0.5;
  int depth = 10;
  double step = 1.0 / 16;
  double tol = 1e-10;
  double epsilon = 0.01;
};

struct SolveBlock {
  Json domain;   // defaults to the boundary field's domain
  Json boundary; // analytic field or preset supplying the sphere trace
  int resolution = 64;
  double tolerance = 1e-10;
  int max_iterations = 20000;
};

struct ExperimentConfig {
  /// {"preset": name} | analytic field JSON | {"grid": header path} | {"solve": SolveBlock}
  Json field = Json{{"preset", "poly_Im_z2"}};
  std::optional<Json> domain; // overrides the field's own domain
  Balld region{make_point({0.0, 0.0}), 0.25};
  Point center = make_point({0.0, 0.0});
  std::vector<double> radii{0.5, 0.4, 0.3, 0.2, 0.1, 0.05};
  StrataBlock strata;
  BetaBlock beta;
  ReifBlock reif;
  CoverParams cover;
  BlowupBlock blowup;
  std::string out = "out";
  std::uint64_t seed = 1;
  unsigned threads = 0;
  /// Directory relative paths are resolved against; not serialized.
  std::string base_dir = ".";
};

Json config_to_json(const ExperimentConfig &config);
ExperimentConfig config_from_json(const Json &j, const std::string &base_dir = ".");
ExperimentConfig load_config(const std::string &path);

struct ResolvedField {
  Field field;
  Domain domain;
};

ResolvedField resolve_field(const ExperimentConfig &config);

const std::vector<std::string> &command_names();

/// Runs one command, writing artifacts under out_dir. Returns the exit status:
/// 0 success, 1 validation failure, 2 numerical failure, 3 I/O failure.
int run_command(const std::string &command, const ExperimentConfig &config, const std::string &out_dir,
                std::ostream &log);

struct VerifyCheck {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool passed = false;
};

/// Invariant suite over the oracle library. `seed` drives the random beta measures.
std::vector<VerifyCheck> verify_suite(std::uint64_t seed);

} // namespace almgren

#endif
