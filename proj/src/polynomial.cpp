#include "almgren/polynomial.hpp"

#include <cmath>

namespace almgren {

namespace {

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i)
    r *= x;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i)
    r *= i;
  return r;
}

double binomial(int n, int k) {
  if (k < 0 || k > n)
    return 0.0;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

// Re and Im of (x + i y)^m as polynomials in dim variables.
std::pair<Polynomial, Polynomial> complex_power(int dim, int m) {
  Polynomial re(dim), im(dim);
  for (int j = 0; j <= m; ++j) {
    // C(m,j) x^{m-j} (i y)^j
    const double c = binomial(m, j);
    Polynomial::Exponent e{m - j, j, 0};
    switch (j % 4) {
    case 0: re.add_term(e, c); break;
    case 1: im.add_term(e, c); break;
    case 2: re.add_term(e, -c); break;
    case 3: im.add_term(e, -c); break;
    }
  }
  return {re, im};
}

} // namespace

Polynomial Polynomial::constant(int dim, double c) {
  Polynomial p(dim);
  p.add_term({0, 0, 0}, c);
  return p;
}

Polynomial Polynomial::variable(int dim, int axis) {
  Polynomial p(dim);
  Exponent e{0, 0, 0};
  e[axis] = 1;
  p.add_term(e, 1.0);
  return p;
}

void Polynomial::add_term(const Exponent &e, double c) {
  if (c == 0.0)
    return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0)
      terms_.erase(it);
  }
}

double Polynomial::eval(const Point &x) const {
  double total = 0.0;
  for (const auto &[e, c] : terms_) {
    double v = c;
    for (int i = 0; i < dim_; ++i)
      v *= ipow(x[i], e[i]);
    total += v;
  }
  return total;
}

Vector Polynomial::gradient(const Point &x) const {
  Vector g = Vector::Zero(dim_);
  for (const auto &[e, c] : terms_)
    for (int a = 0; a < dim_; ++a) {
      if (e[a] == 0)
        continue;
      double v = c * e[a];
      for (int i = 0; i < dim_; ++i)
        v *= ipow(x[i], i == a ? e[i] - 1 : e[i]);
      g[a] += v;
    }
  return g;
}

Polynomial Polynomial::derivative(int axis) const {
  Polynomial d(dim_);
  for (const auto &[e, c] : terms_) {
    if (e[axis] == 0)
      continue;
    Exponent f = e;
    f[axis] -= 1;
    d.add_term(f, c * e[axis]);
  }
  return d;
}

Polynomial Polynomial::laplacian() const {
  Polynomial out(dim_);
  for (int a = 0; a < dim_; ++a)
    out += derivative(a).derivative(a);
  return out;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto &[e, c] : terms_)
    d = std::max(d, e[0] + e[1] + e[2]);
  return d;
}

bool Polynomial::is_zero(double tol) const {
  for (const auto &[e, c] : terms_)
    if (std::abs(c) > tol)
      return false;
  return true;
}

Polynomial &Polynomial::operator+=(const Polynomial &o) {
  for (const auto &[e, c] : o.terms_)
    add_term(e, c);
  return *this;
}

Polynomial Polynomial::operator+(const Polynomial &o) const {
  Polynomial r = *this;
  r += o;
  return r;
}

Polynomial Polynomial::operator*(const Polynomial &o) const {
  Polynomial r(dim_);
  for (const auto &[e1, c1] : terms_)
    for (const auto &[e2, c2] : o.terms_)
      r.add_term({e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]}, c1 * c2);
  return r;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial r(dim_);
  for (const auto &[e, c] : terms_)
    r.add_term(e, c * s);
  return r;
}

std::vector<Polynomial> harmonic_basis(int dim, int degree) {
  if (degree < 0)
    throw DomainError("harmonic_basis: negative degree");
  if (dim == 2) {
    if (degree == 0)
      return {Polynomial::constant(2, 1.0)};
    auto [re, im] = complex_power(2, degree);
    return {re, im};
  }
  if (dim != 3)
    throw DomainError("harmonic_basis: dimension must be 2 or 3");
  // r^l P_l^m(cos theta) {cos, sin}(m phi) = {Re, Im}(x + i y)^m * Pi_l^m(z, r^2),
  // Pi_l^m = sum_k (-1)^k 2^{-l} C(l,k) C(2l-2k,l) (l-2k)!/(l-2k-m)! r^{2k} z^{l-2k-m}.
  const int l = degree;
  Polynomial r2(3);
  r2.add_term({2, 0, 0}, 1.0);
  r2.add_term({0, 2, 0}, 1.0);
  r2.add_term({0, 0, 2}, 1.0);
  std::vector<Polynomial> basis;
  for (int m = 0; m <= l; ++m) {
    Polynomial pi_lm(3);
    for (int k = 0; 2 * k <= l - m; ++k) {
      const double c = ((k % 2) ? -1.0 : 1.0) * std::ldexp(1.0, -l) * binomial(l, k) * binomial(2 * l - 2 * k, l) *
                       factorial(l - 2 * k) / factorial(l - 2 * k - m);
      Polynomial term = Polynomial::constant(3, c);
      for (int i = 0; i < k; ++i)
        term = term * r2;
      Polynomial zpow(3);
      zpow.add_term({0, 0, l - 2 * k - m}, 1.0);
      pi_lm += term * zpow;
    }
    auto [a, b] = complex_power(3, m);
    if (m == 0) {
      basis.push_back(pi_lm);
    } else {
      basis.push_back(a * pi_lm);
      basis.push_back(b * pi_lm);
    }
  }
  return basis;
}

} // namespace almgren
