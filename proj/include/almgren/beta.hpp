#ifndef ALMGREN_BETA_HPP
#define ALMGREN_BETA_HPP

#include "almgren/geometry.hpp"

#include <Eigen/Eigenvalues>

#include <iosfwd>
#include <string>
#include <limits>
#include <vector>

namespace almgren {

/// Weighted point masses sum_i w_i delta_{x_i}.
template <typename Scalar>
struct DiscreteMeasureT {
  std::vector<PointT<Scalar>> points;
  std::vector<Scalar> weights;

  int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
  std::size_t size() const { return points.size(); }

  void add(const PointT<Scalar> &x, Scalar w) {
    points.push_back(x);
    weights.push_back(w);
  }

  void validate() const {
    if (points.size() != weights.size())
      throw ValidationError("measure points and weights differ in length");
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!(weights[i] >= Scalar(0)) || !std::isfinite(static_cast<double>(weights[i])))
        throw ValidationError("measure weights must be finite and nonnegative");
      if (points[i].size() != points.front().size())
        throw ValidationError("measure points have mixed dimensions");
    }
  }

  Scalar mass() const {
    Scalar m(0);
    for (Scalar w : weights)
      m += w;
    return m;
  }

  /// Mass of the closed ball.
  Scalar mass_in(const PointT<Scalar> &p, Scalar r) const {
    Scalar m(0);
    for (std::size_t i = 0; i < points.size(); ++i)
      if ((points[i] - p).norm() <= r)
        m += weights[i];
    return m;
  }
};

using DiscreteMeasure = DiscreteMeasureT<double>;

template <typename Scalar>
struct AffinePlane {
  PointT<Scalar> base;
  std::vector<PointT<Scalar>> directions;
};

template <typename Scalar>
struct BetaResultT {
  Scalar beta{0};
  Scalar mass{0};
  AffinePlane<Scalar> plane;
  /// Eigenvalues of the averaged covariance, descending.
  std::vector<Scalar> eigenvalues;
};

using BetaResult = BetaResultT<double>;

/// beta^2 = (mass / r^k) (lambda_{k+1} + ... + lambda_n) / r^2.
template <typename Scalar>
Scalar beta_from_eigenvalues(Scalar mass, Scalar r, int k, const std::vector<Scalar> &eigenvalues) {
  Scalar tail(0);
  for (std::size_t j = static_cast<std::size_t>(k); j < eigenvalues.size(); ++j)
    tail += eigenvalues[j];
  const Scalar b2 = mass / std::pow(r, Scalar(k)) * tail / (r * r);
  return std::sqrt(std::max(b2, Scalar(0)));
}

template <typename Scalar>
BetaResultT<Scalar> beta_eigen(const DiscreteMeasureT<Scalar> &mu, const PointT<Scalar> &p, Scalar r, int k) {
  const int n = static_cast<int>(p.size());
  if (k < 1 || k > n - 1)
    throw DomainError("beta: k must lie in [1, n-1]");
  if (!(r > Scalar(0)))
    throw InvalidScale("beta: radius must be positive");
  mu.validate();
  if (!mu.points.empty() && mu.dim() != n)
    throw DomainError("beta: measure and center dimensions differ");

  BetaResultT<Scalar> out;
  PointT<Scalar> X = PointT<Scalar>::Zero(n);
  Scalar m(0);
  for (std::size_t i = 0; i < mu.size(); ++i)
    if ((mu.points[i] - p).norm() <= r && mu.weights[i] > Scalar(0)) {
      X += mu.weights[i] * mu.points[i];
      m += mu.weights[i];
    }
  out.mass = m;
  out.eigenvalues.assign(n, Scalar(0));
  if (!(m > Scalar(0)))
    return out;
  X /= m;

  MatrixT<Scalar> S = MatrixT<Scalar>::Zero(n, n);
  for (std::size_t i = 0; i < mu.size(); ++i)
    if ((mu.points[i] - p).norm() <= r && mu.weights[i] > Scalar(0)) {
      const PointT<Scalar> d = mu.points[i] - X;
      S += mu.weights[i] * d * d.transpose();
    }
  S /= m;

  Eigen::SelfAdjointEigenSolver<MatrixT<Scalar>> eig(S);
  // Eigenvalues below the numerical rank cutoff are rounding noise.
  const Scalar cutoff = Scalar(8 * n) * std::numeric_limits<Scalar>::epsilon() * eig.eigenvalues()[n - 1];
  for (int j = 0; j < n; ++j) {
    const Scalar ev = eig.eigenvalues()[n - 1 - j];
    out.eigenvalues[j] = ev > cutoff ? ev : Scalar(0);
    if (j < k)
      out.plane.directions.push_back(eig.eigenvectors().col(n - 1 - j));
  }
  out.plane.base = X;
  out.beta = beta_from_eigenvalues(m, r, k, out.eigenvalues);
  return out;
}

/// Direct minimization of the Def. 2.12 functional over lines (2D, k = 1 only).
BetaResult beta_bruteforce(const DiscreteMeasure &mu, const Point &p, double r, int k);

struct BetaQuery {
  Point p;
  double r = 1.0;
};

struct BetaRow {
  Point p;
  double r = 1.0;
  int k = 1;
  double beta = 0.0;
};

std::vector<BetaRow> beta_batch(const DiscreteMeasure &mu, const std::vector<BetaQuery> &queries, int k);

/// Rows x,y[,z],w; a non-numeric first line is treated as a header.
DiscreteMeasure read_measure_csv(std::istream &is);
void write_measure_csv(std::ostream &os, const DiscreteMeasure &mu);
void write_beta_csv(std::ostream &os, const std::vector<BetaRow> &rows);

} // namespace almgren

#endif
