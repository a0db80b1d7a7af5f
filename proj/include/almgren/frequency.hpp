#ifndef ALMGREN_FREQUENCY_HPP
#define ALMGREN_FREQUENCY_HPP

#include "almgren/fields.hpp"

#include <iosfwd>
#include <vector>

namespace almgren {

/// Quadrature controls. sphere_nodes = 0 selects default_sphere_nodes(dim).
struct Quadrature {
  int sphere_nodes = 0;
  int radial_panels = 4;

  int nodes(int dim) const;
};

struct FrequencyRecord {
  double r;
  double H;
  double D;
  double N;
  double lambda;
};

/// H, D, N and lambda about one center. Radii where H vanishes are moved to
/// `degenerate` instead of being recorded.
struct FrequencyProfile {
  Point center;
  std::vector<FrequencyRecord> records;
  std::vector<double> degenerate;
};

/// Shell integrals on dB_r(p) intersected with the domain closure.
struct ShellIntegrals {
  double H = 0.0;          // int (u - u(p))^2
  double cross = 0.0;      // int (u - u(p)) grad u . (y - p)
  double scale = 0.0;      // int u^2 + u(p)^2, for the degeneracy test
  bool degenerate() const;
  double lambda() const { return cross / H; }
};

ShellIntegrals shell_integrals(const Field &field, const Domain &domain, const Point &p, double r,
                               const Quadrature &quad = {});

/// D(p, r) for each radius, accumulated over one radial sweep.
std::vector<double> dirichlet_energy(const Field &field, const Point &p, const std::vector<double> &radii,
                                     const Quadrature &quad = {});

FrequencyProfile frequency_profile(const Field &field, const Domain &domain, const Point &p,
                                   const std::vector<double> &radii, const Quadrature &quad = {});

/// N(p, r); throws DegenerateError when H(p, r) vanishes.
double frequency(const Field &field, const Domain &domain, const Point &p, double r, const Quadrature &quad = {});

/// lambda(p, r); throws DegenerateError when H(p, r) vanishes.
double frequency_coefficient(const Field &field, const Domain &domain, const Point &p, double r,
                             const Quadrature &quad = {});

/// max of N(p, r 2^-j) for j < ladder, skipping degenerate radii.
double max_frequency(const Field &field, const Domain &domain, const Point &p, double r, int ladder,
                     const Quadrature &quad = {});

struct HomogeneityDefect {
  double value = 0.0;
  int skipped_shells = 0;
};

/// int over the annulus A_{r_in, r_out}(p) of
/// |grad u . (y - p) - lambda(p, |y - p|)(u - u(p))|^2 / |y - p|^{n + 2}.
HomogeneityDefect homogeneity_defect(const Field &field, const Domain &domain, const Point &p, double r_in,
                                     double r_out, const Quadrature &quad = {});

/// int over dOmega intersected with B_r(q) of grad u . eta, with eta the unit
/// normal pointing into the domain.
double boundary_flux(const Field &field, const Domain &domain, const Point &q, double r, const Quadrature &quad = {});

struct DoublingReport {
  Point Q;
  double s;
  double S;
  double lhs;   // H(Q, S) / H(Q, s)
  double bound; // (S / s)^{(n - 1) + 2 N(Q, S)}
  double slack;
  bool satisfied;
};

DoublingReport doubling_check(const Field &field, const Domain &domain, const Point &Q, double s, double S,
                              double slack = 1e-3, const Quadrature &quad = {});

/// Columns p_x,p_y[,p_z],r,H,D,N,lambda.
void write_profile_csv(std::ostream &os, const FrequencyProfile &profile);

} // namespace almgren

#endif
