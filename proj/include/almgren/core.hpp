#ifndef ALMGREN_CORE_HPP
#define ALMGREN_CORE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace almgren {

/// Points and vectors live in R^2 or R^3; the dimension is a runtime value
/// but storage is inline (no heap allocation).
template <typename Scalar>
using PointT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

template <typename Scalar>
using MatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

using Point = PointT<double>;
using Vector = PointT<double>;
using Matrix = MatrixT<double>;

inline constexpr double pi = std::numbers::pi;

/// Absolute tolerance for boundary membership, in normalized coordinates.
inline constexpr double boundary_tol = 1e-10;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidScale : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class SolverError : public Error {
public:
  SolverError(const std::string &what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

private:
  double residual_;
  int iterations_;
};

class DegenerateError : public Error {
public:
  using Error::Error;
};

class ValidationError : public Error {
public:
  using Error::Error;
};

inline Point make_point(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs)
    p[i++] = x;
  return p;
}

inline Point zero_point(int dim) { return Point::Zero(dim); }

/// Caps the worker count used by parallel_for. 0 means hardware concurrency.
void set_thread_limit(unsigned threads);
unsigned thread_limit();

/// Runs body(i) for i in [0, n). Bodies must only write to slot i of
/// preallocated outputs, so results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule &gauss_legendre(int order);

/// Composite Gauss-Legendre integration of f over [a, b] with `panels` panels.
template <typename F>
double integrate_interval(F &&f, double a, double b, int panels, int order = 8) {
  if (!(b > a) || panels <= 0)
    return 0.0;
  const GaussRule &rule = gauss_legendre(order);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
      total += rule.weights[q] * f(mid + 0.5 * h * rule.nodes[q]);
  }
  return 0.5 * h * total;
}

} // namespace almgren

#endif
