#ifndef ALMGREN_IO_HPP
#define ALMGREN_IO_HPP

#include "almgren/covering.hpp"
#include "almgren/critical.hpp"
#include "almgren/reifenberg.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace almgren {

using Json = nlohmann::ordered_json;

class IoError : public Error {
public:
  using Error::Error;
};

Json point_to_json(const Point &p);
Point point_from_json(const Json &j);

/// {"dim":2,"halves":[{"normal":[a,b],"offset":c},...]}
Json domain_to_json(const Domain &domain);
Domain domain_from_json(const Json &j);

Json ball_to_json(const Balld &ball);
Balld ball_from_json(const Json &j);

Json analytic_to_json(const AnalyticField &field);
AnalyticField analytic_from_json(const Json &j);

/// Names: half_plane_linear, poly_Re_z2, poly_Im_z2, poly_Re_z3, poly_Im_z3,
/// wedge_<alpha> with alpha in radians or written as pi, 3pi/4, 2pi/3, pi/2 ...
AnalyticField preset_field(const std::string &name);
std::vector<std::string> preset_names();

/// Writes `<stem>.json` (origin, h, shape, domain, radius, data) and
/// `<stem>.bin` (little-endian doubles, first axis fastest).
void write_grid(const std::string &stem, const GridField &grid);
GridField read_grid(const std::string &header_path);

Json profile_to_json(const FrequencyProfile &profile);
Json verdict_to_json(const ReifVerdict &verdict);
Json cover_to_json(const CoverResult &result);
Json trace_to_json(const BlowupTrace &trace);
Json regularity_to_json(const RegularityReport &report);
Json critical_to_json(const std::vector<CriticalPoint> &points);

BallFamily family_from_json(const Json &j);

/// Two-space indented dump with a trailing newline.
void write_json(const std::string &path, const Json &j);
Json read_json(const std::string &path);
void write_text(const std::string &path, const std::string &text);

// SVG plots. Coordinates are mapped from the given world box.
std::string profile_svg(const FrequencyProfile &profile);
std::string scan_svg(const StrataScan &scan, const Domain &domain, const Balld &region, double epsilon);
std::string cover_svg(const CoverResult &result, const Domain &domain, const Balld &region);

} // namespace almgren

#endif
