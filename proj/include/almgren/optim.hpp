#ifndef ALMGREN_OPTIM_HPP
#define ALMGREN_OPTIM_HPP

#include "almgren/core.hpp"

#include <algorithm>
#include <functional>
#include <vector>

namespace almgren {

/// Minimizes a unimodal f on [a, b].
inline double golden_section(const std::function<double(double)> &f, double a, double b, double tol = 1e-13,
                             int max_iter = 200) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && b - a > tol; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Standard Nelder-Mead with an axis-aligned initial simplex of edge `step`.
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd &)> &f, Eigen::VectorXd x0,
                                    double step, double tol = 1e-14, int max_iter = 2000) {
  const Eigen::Index n = x0.size();
  std::vector<Eigen::VectorXd> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  for (Eigen::Index i = 0; i < n; ++i)
    simplex[i + 1][i] += step;
  for (Eigen::Index i = 0; i <= n; ++i)
    values[i] = f(simplex[i]);

  std::vector<Eigen::Index> order(n + 1);
  NelderMeadResult out;
  int it = 0;
  for (; it < max_iter; ++it) {
    for (Eigen::Index i = 0; i <= n; ++i)
      order[i] = i;
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return values[a] < values[b]; });
    const Eigen::Index best = order.front(), worst = order.back(), second = order[n - 1];
    double size = 0.0;
    for (Eigen::Index i = 0; i <= n; ++i)
      size = std::max(size, (simplex[i] - simplex[best]).cwiseAbs().maxCoeff());
    if (std::abs(values[worst] - values[best]) <= tol * (std::abs(values[best]) + tol) && size <= 1e-12) {
      out.converged = true;
      break;
    }
    if (size <= 1e-15) {
      out.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i <= n; ++i)
      if (i != worst)
        centroid += simplex[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd xr = centroid + (centroid - simplex[worst]);
    const double fr = f(xr);
    if (fr < values[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = f(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        values[worst] = fe;
      } else {
        simplex[worst] = xr;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = xr;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const Eigen::VectorXd xc =
        outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid)) : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = f(xc);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = xc;
      values[worst] = fc;
      continue;
    }
    for (Eigen::Index i = 0; i <= n; ++i) {
      if (i == best)
        continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = f(simplex[i]);
    }
  }
  const auto best = std::min_element(values.begin(), values.end()) - values.begin();
  out.x = simplex[best];
  out.value = values[best];
  out.iterations = it;
  return out;
}

} // namespace almgren

#endif
