#ifndef ALMGREN_POLYNOMIAL_HPP
#define ALMGREN_POLYNOMIAL_HPP

#include "almgren/core.hpp"

#include <array>
#include <map>
#include <vector>

namespace almgren {

/// Polynomial in 2 or 3 variables stored as a sparse monomial map.
class Polynomial {
public:
  using Exponent = std::array<int, 3>;

  Polynomial() = default;
  explicit Polynomial(int dim) : dim_(dim) {}

  static Polynomial constant(int dim, double c);
  static Polynomial variable(int dim, int axis);

  int dim() const { return dim_; }
  const std::map<Exponent, double> &terms() const { return terms_; }

  void add_term(const Exponent &e, double c);

  double eval(const Point &x) const;
  Vector gradient(const Point &x) const;
  Polynomial derivative(int axis) const;
  Polynomial laplacian() const;
  int degree() const;
  bool is_zero(double tol = 0.0) const;

  Polynomial &operator+=(const Polynomial &o);
  Polynomial operator+(const Polynomial &o) const;
  Polynomial operator*(const Polynomial &o) const;
  Polynomial operator*(double s) const;

private:
  int dim_ = 2;
  std::map<Exponent, double> terms_;
};

/// Real basis of homogeneous harmonic polynomials of degree d: {Re z^d, Im z^d}
/// in 2D (just {1} for d = 0), and the 2d+1 real solid harmonics in 3D ordered
/// m = 0, then (cos m, sin m) for m = 1..d.
std::vector<Polynomial> harmonic_basis(int dim, int degree);

} // namespace almgren

#endif
