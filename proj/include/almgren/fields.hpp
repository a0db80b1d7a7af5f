#ifndef ALMGREN_FIELDS_HPP
#define ALMGREN_FIELDS_HPP

#include "almgren/core.hpp"
#include "almgren/geometry.hpp"
#include "almgren/polynomial.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <variant>
#include <vector>

namespace almgren {

enum class AnalyticKind { harmonic_polynomial, wedge_eigenfunction, one_sided_linear };

/// Closed-form harmonic fields, extended by zero outside their domain.
class AnalyticField {
public:
  /// Sum of coefficients[i] * harmonic_basis(dim, degree)[i], restricted to `domain`.
  static AnalyticField harmonic_polynomial(int dim, int degree, std::vector<double> coefficients, Domain domain);

  /// r^{m pi / alpha} sin(m pi theta / alpha) on the wedge {0 < theta < alpha}.
  /// In 3D the planar profile is extended invariantly along the z axis.
  static AnalyticField wedge_eigenfunction(double alpha, int mode, int dim = 2);

  /// max(direction . x, 0) on {direction . x > 0}.
  static AnalyticField one_sided_linear(const Vector &direction);

  AnalyticKind kind() const { return kind_; }
  int dim() const { return domain_.dim(); }
  const Domain &domain() const { return domain_; }

  int degree() const { return degree_; }
  const std::vector<double> &coefficients() const { return coefficients_; }
  double alpha() const { return alpha_; }
  int mode() const { return mode_; }
  const Vector &direction() const { return direction_; }

  /// Homogeneity degree about the origin (exact for every kind).
  double homogeneity() const;

  /// Closed form, ignoring the domain restriction.
  double value(const Point &x) const;
  Vector grad(const Point &x) const;

private:
  AnalyticKind kind_ = AnalyticKind::harmonic_polynomial;
  Domain domain_;
  int degree_ = 0;
  std::vector<double> coefficients_;
  Polynomial poly_;
  double alpha_ = pi;
  int mode_ = 1;
  Vector direction_;
};

enum class NodeClass : std::uint8_t { interior = 0, boundary_adjacent = 1, exterior = 2 };

/// Nodal field on a uniform grid covering [-radius, radius]^n, harmonic in
/// domain intersected with the open ball of that radius.
class GridField {
public:
  GridField(Point origin, double spacing, std::vector<int> shape, std::vector<double> values, Domain domain,
            double radius);

  int dim() const { return static_cast<int>(shape_.size()); }
  const Point &origin() const { return data_->origin; }
  double spacing() const { return data_->h; }
  const std::vector<int> &shape() const { return shape_; }
  const std::vector<double> &values() const { return data_->values; }
  const std::vector<NodeClass> &mask() const { return data_->mask; }
  const Domain &domain() const { return data_->domain; }
  double radius() const { return data_->radius; }
  std::size_t node_count() const { return data_->values.size(); }

  std::size_t index(const std::array<int, 3> &ijk) const;
  Point node(const std::array<int, 3> &ijk) const;
  bool in_bounds(const Point &x) const;

  /// Multilinear interpolation of nodal values (ghost-extended across the
  /// boundary so the interpolant vanishes near the cut). No domain check.
  double value(const Point &x) const;
  /// Multilinear interpolation of finite-difference nodal gradients.
  Vector grad(const Point &x) const;

private:
  struct Data {
    Point origin;
    double h;
    std::vector<double> values;
    std::vector<NodeClass> mask;
    std::vector<double> extended;
    std::vector<double> nodal_grad; // dim entries per node
    Domain domain;
    double radius;
  };

  void build();
  template <typename F>
  auto interpolate(const Point &x, F &&at) const;

  std::vector<int> shape_;
  std::shared_ptr<Data> data_;
};

struct GradientSample {
  Vector value;
  bool exterior = false;
};

/// A harmonic field: an analytic or grid base, optionally viewed through an
/// affine change of variables w(x) = a u(p + b x) + c. Immutable; copies
/// share grid storage.
class Field {
public:
  Field(AnalyticField f);
  Field(GridField f);

  int dim() const { return domain_.dim(); }
  /// Domain of this (possibly transformed) field.
  const Domain &domain() const { return domain_; }

  bool is_grid() const { return std::holds_alternative<GridField>(base_); }
  bool is_transformed() const;
  const AnalyticField *analytic() const { return std::get_if<AnalyticField>(&base_); }
  const GridField *grid() const { return std::get_if<GridField>(&base_); }

  /// w(x) = amplitude * u(shift + dilation * x) + offset.
  Field transformed(double amplitude, double dilation, const Point &shift, double offset) const;

  /// Grid spacing in this field's coordinates; 0 for analytic bases.
  double resolution() const;

  double amplitude() const { return amplitude_; }
  double dilation() const { return dilation_; }
  const Point &shift() const { return shift_; }
  double offset() const { return offset_; }

private:
  std::variant<AnalyticField, GridField> base_;
  Domain domain_;
  double amplitude_ = 1.0;
  double dilation_ = 1.0;
  Point shift_;
  double offset_ = 0.0;
};

/// Value of the field, zero-extended outside its domain. Grid fields throw
/// DomainError outside the grid.
double eval(const Field &field, const Point &x);

/// Gradient of the field; the zero vector with exterior = true outside the
/// domain closure.
GradientSample gradient(const Field &field, const Point &x);

struct SolveOptions {
  double tolerance = 1e-10;
  int max_iterations = 20000;
  double radius = 2.0;
};

struct SolveReport {
  double residual = 0.0;
  int iterations = 0;
  std::size_t unknowns = 0;
};

/// Symmetric cut-cell finite-difference Dirichlet solve on domain intersected
/// with B_radius(0): u = 0 on the domain boundary, u = boundary_data on the
/// sphere. `resolution` is nodes per unit length.
GridField solve_dirichlet(const Domain &domain, const std::function<double(const Point &)> &boundary_data,
                          int resolution, const SolveOptions &options = {}, SolveReport *report = nullptr);

} // namespace almgren

#endif
