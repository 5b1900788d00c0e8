#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace minsurf {

using Complex = std::complex<double>;

// Complex polynomial, coefficients lowest degree first.  The zero polynomial
// has an empty coefficient vector; otherwise the leading coefficient is
// nonzero after trim().
struct Poly {
  Eigen::VectorXcd c;

  Poly() = default;
  explicit Poly(Eigen::VectorXcd coeffs) : c(std::move(coeffs)) {}
  Poly(std::initializer_list<Complex> coeffs)
      : c(Eigen::Map<const Eigen::VectorXcd>(coeffs.begin(),
                                             static_cast<Eigen::Index>(coeffs.size()))) {}

  static Poly zero() { return Poly{}; }
  static Poly constant(Complex a);
  // Monomial a*z^k.
  static Poly monomial(Complex a, int k);
};

bool is_zero(const Poly& p);
int degree(const Poly& p);  // -1 for the zero polynomial
// Drops trailing coefficients that are negligible against the largest one.
Poly trim(const Poly& p);
double coeff_sup(const Poly& p);

Poly add(const Poly& a, const Poly& b);
Poly sub(const Poly& a, const Poly& b);
Poly mul(const Poly& a, const Poly& b);
Poly scale(const Poly& a, Complex s);
Poly derivative(const Poly& p);

Complex eval(const Poly& p, Complex z);
// Value and first k derivatives at z (Horner chain), result[j] = p^(j)(z).
std::vector<Complex> eval_derivatives(const Poly& p, Complex z, int k);

// Coefficients of p(z + a), i.e. Taylor expansion around a.
Poly taylor_shift(const Poly& p, Complex a);
// Synthetic division by (z - r); the remainder is discarded.
Poly deflate(const Poly& p, Complex r);
// Reversed coefficients: q(w) = w^deg(p) * p(1/w).
Poly reverse(const Poly& p);

Poly from_roots(const std::vector<std::pair<Complex, int>>& roots, Complex lead);

// Root clustering tolerance: 1e-9 * (1 + sup-norm of coefficients).
double root_cluster_tol(const Poly& p);

// All complex roots with multiplicities.  Companion-matrix eigenvalues,
// Newton polishing, then agglomerative clustering so that multiple roots come
// out with integral multiplicity (the individual eigenvalues of an m-fold
// root scatter like eps^(1/m), far beyond the base tolerance).
// Throws Error{ZeroPolynomial} on the zero polynomial.
std::vector<std::pair<Complex, int>> roots(const Poly& p);

// Multiplicity of r as a root of p detected from shifted coefficients.
int order_at(const Poly& p, Complex r);

}  // namespace minsurf
