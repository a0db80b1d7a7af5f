#include "almgren/fields.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <cmath>
#include <optional>

namespace almgren {

// ---------------------------------------------------------------- analytic

AnalyticField AnalyticField::harmonic_polynomial(int dim, int degree, std::vector<double> coefficients,
                                                 Domain domain) {
  const auto basis = harmonic_basis(dim, degree);
  if (coefficients.size() != basis.size())
    throw DomainError("harmonic_polynomial: expected " + std::to_string(basis.size()) + " coefficients");
  if (domain.dim() != dim)
    throw DomainError("harmonic_polynomial: domain dimension mismatch");
  AnalyticField f;
  f.kind_ = AnalyticKind::harmonic_polynomial;
  f.degree_ = degree;
  f.coefficients_ = std::move(coefficients);
  f.poly_ = Polynomial(dim);
  for (std::size_t i = 0; i < basis.size(); ++i)
    f.poly_ += basis[i] * f.coefficients_[i];
  f.domain_ = std::move(domain);
  return f;
}

AnalyticField AnalyticField::wedge_eigenfunction(double alpha, int mode, int dim) {
  if (mode < 1)
    throw DomainError("wedge_eigenfunction: mode must be >= 1");
  AnalyticField f;
  f.kind_ = AnalyticKind::wedge_eigenfunction;
  f.alpha_ = alpha;
  f.mode_ = mode;
  Domain planar = Domain::wedge(alpha);
  if (dim == 2) {
    f.domain_ = planar;
  } else if (dim == 3) {
    std::vector<HalfSpaced> halves;
    for (const auto &h : planar.halves())
      halves.push_back({make_point({h.normal[0], h.normal[1], 0.0}), h.offset});
    f.domain_ = Domain(3, std::move(halves));
  } else {
    throw DomainError("wedge_eigenfunction: dimension must be 2 or 3");
  }
  return f;
}

AnalyticField AnalyticField::one_sided_linear(const Vector &direction) {
  const double len = direction.norm();
  if (!(len > 0.0))
    throw DomainError("one_sided_linear: direction must be nonzero");
  AnalyticField f;
  f.kind_ = AnalyticKind::one_sided_linear;
  f.direction_ = direction / len;
  f.domain_ = Domain::half_space(f.direction_);
  return f;
}

double AnalyticField::homogeneity() const {
  switch (kind_) {
  case AnalyticKind::harmonic_polynomial: return degree_;
  case AnalyticKind::wedge_eigenfunction: return mode_ * pi / alpha_;
  case AnalyticKind::one_sided_linear: return 1.0;
  }
  return 0.0;
}

double AnalyticField::value(const Point &x) const {
  switch (kind_) {
  case AnalyticKind::harmonic_polynomial:
    return poly_.eval(x);
  case AnalyticKind::wedge_eigenfunction: {
    const double a = homogeneity();
    const double r = std::hypot(x[0], x[1]);
    if (r == 0.0)
      return 0.0;
    const double theta = std::atan2(x[1], x[0]);
    return std::pow(r, a) * std::sin(a * theta);
  }
  case AnalyticKind::one_sided_linear:
    return std::max(0.0, direction_.dot(x));
  }
  return 0.0;
}

Vector AnalyticField::grad(const Point &x) const {
  switch (kind_) {
  case AnalyticKind::harmonic_polynomial:
    return poly_.gradient(x);
  case AnalyticKind::wedge_eigenfunction: {
    // grad r^a sin(a t) = a r^{a-1} (sin((a-1) t), cos((a-1) t))
    const double a = homogeneity();
    const double r = std::hypot(x[0], x[1]);
    Vector g = Vector::Zero(x.size());
    if (r == 0.0) {
      if (a == 1.0)
        g[1] = 1.0;
      return g;
    }
    const double theta = std::atan2(x[1], x[0]);
    const double s = a * std::pow(r, a - 1.0);
    g[0] = s * std::sin((a - 1.0) * theta);
    g[1] = s * std::cos((a - 1.0) * theta);
    return g;
  }
  case AnalyticKind::one_sided_linear:
    return direction_;
  }
  return Vector::Zero(x.size());
}

// -------------------------------------------------------------------- grid

namespace {

enum class Role : std::uint8_t { unknown, dirichlet, outside };

Role node_role(const Domain &domain, double radius, const Point &x) {
  const Membership m = contains(domain, x);
  if (m == Membership::exterior)
    return Role::outside;
  const double r = x.norm();
  if (r > radius + boundary_tol)
    return Role::outside;
  if (m == Membership::boundary || r >= radius - boundary_tol)
    return Role::dirichlet;
  return Role::unknown;
}

struct Lattice {
  std::vector<int> shape;
  int dim;
  std::array<std::size_t, 3> stride{1, 1, 1};

  explicit Lattice(std::vector<int> s) : shape(std::move(s)), dim(static_cast<int>(shape.size())) {
    for (int a = 1; a < dim; ++a)
      stride[a] = stride[a - 1] * static_cast<std::size_t>(shape[a - 1]);
  }
  std::size_t size() const { return stride[dim - 1] * static_cast<std::size_t>(shape[dim - 1]); }
  std::array<int, 3> unravel(std::size_t idx) const {
    std::array<int, 3> ijk{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
      ijk[a] = static_cast<int>(idx / stride[a]);
      idx %= stride[a];
    }
    return ijk;
  }
  // Neighbor along axis a at offset s, if inside the lattice.
  std::optional<std::size_t> step(std::size_t idx, const std::array<int, 3> &ijk, int a, int s) const {
    const int c = ijk[a] + s;
    if (c < 0 || c >= shape[a])
      return std::nullopt;
    return s > 0 ? idx + stride[a] * static_cast<std::size_t>(s) : idx - stride[a] * static_cast<std::size_t>(-s);
  }
};

Point node_point(const Point &origin, double h, const std::array<int, 3> &ijk, int dim) {
  Point x(dim);
  for (int a = 0; a < dim; ++a)
    x[a] = origin[a] + h * ijk[a];
  return x;
}

} // namespace

GridField::GridField(Point origin, double spacing, std::vector<int> shape, std::vector<double> values, Domain domain,
                     double radius)
    : shape_(std::move(shape)), data_(std::make_shared<Data>()) {
  if (shape_.size() != 2 && shape_.size() != 3)
    throw DomainError("GridField: grid must be 2D or 3D");
  if (static_cast<int>(origin.size()) != static_cast<int>(shape_.size()) || domain.dim() != dim())
    throw DomainError("GridField: dimension mismatch");
  if (!(spacing > 0.0))
    throw InvalidScale("GridField: spacing must be positive");
  for (int s : shape_)
    if (s < 2)
      throw DomainError("GridField: every axis needs at least two nodes");
  data_->origin = std::move(origin);
  data_->h = spacing;
  data_->values = std::move(values);
  data_->domain = std::move(domain);
  data_->radius = radius;
  if (data_->values.size() != Lattice(shape_).size())
    throw DomainError("GridField: value count does not match shape");
  build();
}

std::size_t GridField::index(const std::array<int, 3> &ijk) const {
  Lattice lat(shape_);
  std::size_t idx = 0;
  for (int a = 0; a < dim(); ++a)
    idx += lat.stride[a] * static_cast<std::size_t>(ijk[a]);
  return idx;
}

Point GridField::node(const std::array<int, 3> &ijk) const { return node_point(data_->origin, data_->h, ijk, dim()); }

bool GridField::in_bounds(const Point &x) const {
  for (int a = 0; a < dim(); ++a) {
    const double lo = data_->origin[a];
    const double hi = lo + data_->h * (shape_[a] - 1);
    if (!(x[a] >= lo - 1e-12 && x[a] <= hi + 1e-12))
      return false;
  }
  return true;
}

void GridField::build() {
  Data &d = *data_;
  const Lattice lat(shape_);
  const int n = dim();
  const std::size_t count = lat.size();
  const Ball<double> ball(Point::Zero(n), d.radius);

  std::vector<Role> roles(count);
  for (std::size_t i = 0; i < count; ++i)
    roles[i] = node_role(d.domain, d.radius, node_point(d.origin, d.h, lat.unravel(i), n));

  d.mask.assign(count, NodeClass::exterior);
  for (std::size_t i = 0; i < count; ++i) {
    if (roles[i] == Role::outside) {
      d.values[i] = 0.0;
      continue;
    }
    if (roles[i] == Role::dirichlet) {
      d.mask[i] = NodeClass::boundary_adjacent;
      continue;
    }
    const auto ijk = lat.unravel(i);
    bool cut = false;
    for (int a = 0; a < n && !cut; ++a)
      for (int s : {-1, 1}) {
        auto j = lat.step(i, ijk, a, s);
        if (!j || roles[*j] != Role::unknown)
          cut = true;
      }
    d.mask[i] = cut ? NodeClass::boundary_adjacent : NodeClass::interior;
  }

  // Ghost values at outside nodes next to the solved region, so that the
  // multilinear interpolant vanishes at the cut instead of at the node.
  d.extended = d.values;
  std::vector<char> available(count, 0);
  for (std::size_t i = 0; i < count; ++i)
    available[i] = roles[i] != Role::outside;
  for (std::size_t e = 0; e < count; ++e) {
    if (roles[e] != Role::outside)
      continue;
    const auto ijk = lat.unravel(e);
    double sum = 0.0;
    int contributions = 0;
    for (int a = 0; a < n; ++a)
      for (int s : {-1, 1}) {
        auto n1 = lat.step(e, ijk, a, s);
        if (!n1 || roles[*n1] == Role::outside)
          continue;
        auto n2 = lat.step(e, ijk, a, 2 * s);
        const bool has2 = n2 && roles[*n2] != Role::outside;
        const double v1 = d.values[*n1];
        const double v2 = has2 ? d.values[*n2] : 0.0;
        Vector dir = Vector::Zero(n);
        dir[a] = -s;
        const Point x1 = node_point(d.origin, d.h, lat.unravel(*n1), n);
        auto [dist, hit] = exit_distance<double>(d.domain, ball, x1, dir, d.h);
        const double t = std::clamp(hit == -2 ? 1.0 : dist / d.h, 0.0, 1.0);
        double ghost;
        if (hit == -1)
          ghost = has2 ? 2.0 * v1 - v2 : v1;
        else if (has2 && t >= 0.25)
          ghost = v2 * (1.0 - t) / (1.0 + t) - 2.0 * v1 * (1.0 - t) / t;
        else if (has2)
          ghost = -v2 * (1.0 - t) / (1.0 + t);
        else if (t >= 0.1)
          ghost = v1 * (1.0 - 1.0 / t);
        else
          ghost = 0.0;
        sum += ghost;
        ++contributions;
      }
    if (contributions > 0) {
      d.extended[e] = sum / contributions;
      available[e] = 1;
    }
  }
  // Outside corners of cut cells reached only diagonally: extrapolate
  // linearly from the first layer of ghosts.
  const std::vector<char> first_layer = available;
  for (std::size_t e = 0; e < count; ++e) {
    if (first_layer[e])
      continue;
    const auto ijk = lat.unravel(e);
    double sum = 0.0;
    int contributions = 0;
    for (int a = 0; a < n; ++a)
      for (int s : {-1, 1}) {
        auto n1 = lat.step(e, ijk, a, s);
        auto n2 = lat.step(e, ijk, a, 2 * s);
        if (!n1 || !n2 || !first_layer[*n1] || !first_layer[*n2])
          continue;
        sum += 2.0 * d.extended[*n1] - d.extended[*n2];
        ++contributions;
      }
    if (contributions > 0) {
      d.extended[e] = sum / contributions;
      available[e] = 1;
    }
  }

  d.nodal_grad.assign(count * n, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    if (!available[i])
      continue;
    const auto ijk = lat.unravel(i);
    for (int a = 0; a < n; ++a) {
      auto lo = lat.step(i, ijk, a, -1);
      auto hi = lat.step(i, ijk, a, 1);
      const bool has_lo = lo && available[*lo];
      const bool has_hi = hi && available[*hi];
      double g = 0.0;
      if (has_lo && has_hi)
        g = (d.extended[*hi] - d.extended[*lo]) / (2.0 * d.h);
      else if (has_hi)
        g = (d.extended[*hi] - d.extended[i]) / d.h;
      else if (has_lo)
        g = (d.extended[i] - d.extended[*lo]) / d.h;
      d.nodal_grad[i * n + a] = g;
    }
  }
}

template <typename F>
auto GridField::interpolate(const Point &x, F &&at) const {
  const Data &d = *data_;
  const int n = dim();
  std::array<std::size_t, 3> stride{1, 1, 1};
  for (int a = 1; a < n; ++a)
    stride[a] = stride[a - 1] * static_cast<std::size_t>(shape_[a - 1]);
  std::array<int, 3> base{0, 0, 0};
  std::array<double, 3> frac{0, 0, 0};
  for (int a = 0; a < n; ++a) {
    const double s = (x[a] - d.origin[a]) / d.h;
    int c = static_cast<int>(std::floor(s));
    c = std::clamp(c, 0, shape_[a] - 2);
    base[a] = c;
    frac[a] = std::clamp(s - c, 0.0, 1.0);
  }
  std::size_t base_idx = 0;
  for (int a = 0; a < n; ++a)
    base_idx += stride[a] * static_cast<std::size_t>(base[a]);
  using R = decltype(at(std::size_t{0}));
  R acc = at(base_idx) * 0.0;
  for (int corner = 0; corner < (1 << n); ++corner) {
    double w = 1.0;
    std::size_t idx = base_idx;
    for (int a = 0; a < n; ++a) {
      const bool up = (corner >> a) & 1;
      w *= up ? frac[a] : 1.0 - frac[a];
      if (up)
        idx += stride[a];
    }
    if (w != 0.0)
      acc += at(idx) * w;
  }
  return acc;
}

double GridField::value(const Point &x) const {
  const auto &ext = data_->extended;
  return interpolate(x, [&](std::size_t i) { return ext[i]; });
}

Vector GridField::grad(const Point &x) const {
  const int n = dim();
  const auto &g = data_->nodal_grad;
  return interpolate(x, [&](std::size_t i) -> Vector { return Eigen::Map<const Vector>(&g[i * n], n); });
}

// ------------------------------------------------------------------- field

Field::Field(AnalyticField f) : base_(std::move(f)) {
  domain_ = std::get<AnalyticField>(base_).domain();
  shift_ = Point::Zero(domain_.dim());
}

Field::Field(GridField f) : base_(std::move(f)) {
  domain_ = std::get<GridField>(base_).domain();
  shift_ = Point::Zero(domain_.dim());
}

bool Field::is_transformed() const {
  return amplitude_ != 1.0 || dilation_ != 1.0 || offset_ != 0.0 || !shift_.isZero(0.0);
}

double Field::resolution() const {
  const GridField *g = grid();
  return g ? g->spacing() / dilation_ : 0.0;
}

Field Field::transformed(double amplitude, double dilation, const Point &shift, double offset) const {
  if (!(dilation > 0.0))
    throw InvalidScale("Field::transformed: dilation must be positive");
  // a (A u(s + b (p + d x)) + C) + c
  Field out = *this;
  out.amplitude_ = amplitude * amplitude_;
  out.dilation_ = dilation * dilation_;
  out.shift_ = shift_ + dilation_ * shift;
  out.offset_ = amplitude * offset_ + offset;
  out.domain_ = rescale_domain(domain_, shift, dilation);
  return out;
}

namespace {

double base_value(const Field &field, const Point &y) {
  if (const auto *a = field.analytic())
    return a->value(y);
  const auto &g = *field.grid();
  if (!g.in_bounds(y))
    throw DomainError("eval: point outside the grid");
  return g.value(y);
}

Vector base_grad(const Field &field, const Point &y) {
  if (const auto *a = field.analytic())
    return a->grad(y);
  const auto &g = *field.grid();
  if (!g.in_bounds(y))
    throw DomainError("gradient: point outside the grid");
  return g.grad(y);
}

} // namespace

double eval(const Field &field, const Point &x) {
  if (contains(field.domain(), x) == Membership::exterior)
    return field.offset();
  const Point y = field.is_transformed() ? Point(field.shift() + field.dilation() * x) : x;
  const double u = base_value(field, y);
  return field.amplitude() * u + field.offset();
}

GradientSample gradient(const Field &field, const Point &x) {
  if (contains(field.domain(), x) == Membership::exterior)
    return {Vector::Zero(field.dim()), true};
  const Point y = field.is_transformed() ? Point(field.shift() + field.dilation() * x) : x;
  const Vector g = base_grad(field, y);
  return {field.amplitude() * field.dilation() * g, false};
}

// ------------------------------------------------------------------- solve

GridField solve_dirichlet(const Domain &domain, const std::function<double(const Point &)> &boundary_data,
                          int resolution, const SolveOptions &options, SolveReport *report) {
  if (resolution < 2)
    throw InvalidScale("solve_dirichlet: resolution must be >= 2");
  const int n = domain.dim();
  const double R = options.radius;
  const double h = 1.0 / resolution;
  const int cells = static_cast<int>(std::lround(2.0 * R * resolution));
  std::vector<int> shape(n, cells + 1);
  const Point origin = Point::Constant(n, -R);
  const Lattice lat(shape);
  const std::size_t count = lat.size();
  const Ball<double> ball(Point::Zero(n), R);

  std::vector<Role> roles(count);
  std::vector<long> unknown_index(count, -1);
  std::size_t unknowns = 0;
  for (std::size_t i = 0; i < count; ++i) {
    roles[i] = node_role(domain, R, node_point(origin, h, lat.unravel(i), n));
    if (roles[i] == Role::unknown)
      unknown_index[i] = static_cast<long>(unknowns++);
  }
  if (unknowns == 0)
    throw DomainError("solve_dirichlet: domain does not meet the solve ball");

  std::vector<double> values(count, 0.0);
  for (std::size_t i = 0; i < count; ++i)
    if (roles[i] == Role::dirichlet) {
      const Point x = node_point(origin, h, lat.unravel(i), n);
      values[i] = contains(domain, x) == Membership::boundary ? 0.0 : boundary_data(x);
    }

  // Symmetric cut-cell stencil: full arms couple with weight 1, an arm cut at
  // fraction theta contributes 1/theta to the diagonal and g/theta to the rhs.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(unknowns * (2 * n + 1));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(unknowns));
  for (std::size_t i = 0; i < count; ++i) {
    if (roles[i] != Role::unknown)
      continue;
    const long row = unknown_index[i];
    const auto ijk = lat.unravel(i);
    const Point xi = node_point(origin, h, ijk, n);
    double diag = 0.0;
    for (int a = 0; a < n; ++a)
      for (int s : {-1, 1}) {
        auto j = lat.step(i, ijk, a, s);
        if (j && roles[*j] == Role::unknown) {
          diag += 1.0;
          triplets.emplace_back(row, unknown_index[*j], -1.0);
          continue;
        }
        if (j && roles[*j] == Role::dirichlet) {
          diag += 1.0;
          rhs[row] += values[*j];
          continue;
        }
        Vector dir = Vector::Zero(n);
        dir[a] = s;
        auto [dist, hit] = exit_distance<double>(domain, ball, xi, dir, h);
        double theta = hit == -2 ? 1.0 : std::max(dist / h, 1e-6);
        double g = 0.0;
        if (hit == -1)
          g = boundary_data(Point(xi + dist * dir));
        else if (hit == -2 && j) {
          const Point xj = node_point(origin, h, lat.unravel(*j), n);
          g = xj.norm() > R ? boundary_data(xj) : 0.0;
        }
        diag += 1.0 / theta;
        rhs[row] += g / theta;
      }
    triplets.emplace_back(row, row, diag);
  }

  Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(unknowns), static_cast<Eigen::Index>(unknowns));
  A.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::IncompleteCholesky<double>>
      cg;
  cg.setTolerance(options.tolerance);
  cg.setMaxIterations(options.max_iterations);
  cg.compute(A);
  if (cg.info() != Eigen::Success)
    throw SolverError("solve_dirichlet: preconditioner setup failed", 0.0, 0);
  Eigen::VectorXd sol = cg.solve(rhs);
  const double bnorm = rhs.norm();
  const double residual = bnorm > 0.0 ? (A * sol - rhs).norm() / bnorm : (A * sol).norm();
  if (cg.info() != Eigen::Success || !(residual <= options.tolerance * 10.0))
    throw SolverError("solve_dirichlet: conjugate gradient did not converge (relative residual " +
                          std::to_string(residual) + ")",
                      residual, static_cast<int>(cg.iterations()));

  for (std::size_t i = 0; i < count; ++i)
    if (roles[i] == Role::unknown)
      values[i] = sol[unknown_index[i]];

  if (report) {
    report->residual = residual;
    report->iterations = static_cast<int>(cg.iterations());
    report->unknowns = unknowns;
  }
  return GridField(origin, h, shape, std::move(values), domain, R);
}

} // namespace almgren
