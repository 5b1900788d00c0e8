#pragma once

#include <optional>
#include <vector>

#include "minsurf/errors.hpp"
#include "minsurf/poly.hpp"

namespace minsurf {

// Point on the extended complex plane.
struct ExtendedPoint {
  Complex z{0.0, 0.0};
  bool infinite = false;

  ExtendedPoint() = default;
  ExtendedPoint(Complex v) : z(v) {}  // NOLINT: implicit by design
  static ExtendedPoint infinity() {
    ExtendedPoint p;
    p.infinite = true;
    return p;
  }
};

bool same_point(const ExtendedPoint& a, const ExtendedPoint& b, double tol);
// Canonical order: finite points by (re, im), infinity last.
bool point_less(const ExtendedPoint& a, const ExtendedPoint& b);

struct DivisorEntry {
  ExtendedPoint point;
  int order = 0;  // nonzero
};

// Finite multiset of extended-plane points with integer orders, support
// pairwise distinct and canonically sorted.
struct Divisor {
  std::vector<DivisorEntry> entries;

  int degree() const;
  int order_at(const ExtendedPoint& p, double tol) const;
};

Divisor make_divisor(std::vector<DivisorEntry> entries, double merge_tol);
Divisor divisor_mul(const Divisor& a, const Divisor& b, double merge_tol);
Divisor divisor_inverse(const Divisor& a);
// a >= b as divisors: a*b^-1 integral.
bool divisor_geq(const Divisor& a, const Divisor& b, double tol);

// Quotient of complex polynomials on the extended plane, stored reduced
// (common roots cancelled by root matching) with monic denominator.
struct RationalMap {
  Poly num;
  Poly den;

  RationalMap() : num(Poly::zero()), den(Poly::constant(1.0)) {}
  RationalMap(Poly n, Poly d);  // reduces and normalizes

  static RationalMap constant(Complex a) { return {Poly::constant(a), Poly::constant(1.0)}; }
  static RationalMap identity() { return {Poly::monomial(1.0, 1), Poly::constant(1.0)}; }
};

bool is_zero(const RationalMap& f);

RationalMap add(const RationalMap& a, const RationalMap& b);
RationalMap sub(const RationalMap& a, const RationalMap& b);
RationalMap mul(const RationalMap& a, const RationalMap& b);
RationalMap div(const RationalMap& a, const RationalMap& b);
RationalMap scale(const RationalMap& a, Complex s);
RationalMap pow(const RationalMap& a, int k);  // k may be negative

inline RationalMap operator+(const RationalMap& a, const RationalMap& b) { return add(a, b); }
inline RationalMap operator-(const RationalMap& a, const RationalMap& b) { return sub(a, b); }
inline RationalMap operator*(const RationalMap& a, const RationalMap& b) { return mul(a, b); }
inline RationalMap operator/(const RationalMap& a, const RationalMap& b) { return div(a, b); }

Complex eval(const RationalMap& f, Complex z);
// Value at infinity by degree comparison (infinite marker when deg num > deg den).
ExtendedPoint eval_at_infinity(const RationalMap& f);
// g(w) = f(1/w) as a rational map in w.
RationalMap compose_reciprocal(const RationalMap& f);
// Derivative df/dz by the quotient rule, reduced.
RationalMap derivative(const RationalMap& f);

// Order of vanishing at p: positive at zeros, negative at poles, 0 elsewhere.
int order_at(const RationalMap& f, const ExtendedPoint& p);
// max(deg num, deg den): degree as a branched cover of the sphere.
int map_degree(const RationalMap& f);

// Zeros minus poles over the full sphere; total degree 0.
Divisor divisor_of(const RationalMap& f);

// Meromorphic 1-form f(z) dz on the finite chart.
struct OneForm {
  RationalMap f;

  OneForm() = default;
  explicit OneForm(RationalMap coeff) : f(std::move(coeff)) {}
};

OneForm form_add(const OneForm& a, const OneForm& b);
OneForm form_scale(const OneForm& a, Complex s);
OneForm form_mul(const OneForm& a, const RationalMap& g);

// Canonical divisor of the form; total degree -2 (order at infinity picks up
// the chart correction f(1/w) * (-1/w^2)).
Divisor divisor_of_form(const OneForm& w);
int form_order_at(const OneForm& w, const ExtendedPoint& p);

// Laurent coefficient of (z-p)^{-1}; residues over the sphere sum to zero.
Complex residue(const OneForm& w, const ExtendedPoint& p);
// Exterior differential of f: d f = f'(z) dz.
OneForm differentiate(const RationalMap& f);

// Rational antiderivative; requires all residues to vanish.
RationalMap antiderivative(const OneForm& w);

// Full partial-fraction data of f: polynomial part plus, per finite pole p of
// order m, the coefficients c_k of (z-p)^{-k}, k = 1..m.
struct PartialFractions {
  Poly polynomial;
  struct PolePart {
    Complex pole;
    std::vector<Complex> coeff;  // coeff[k-1] multiplies (z-pole)^-k
  };
  std::vector<PolePart> poles;
};
PartialFractions partial_fractions(const RationalMap& f);

// Square root of a rational map whose divisor has all-even orders; sign fixed
// by a deterministic reference point (first point of a fixed scan sequence
// away from zeros and poles, g there rotated to positive real part).
// Throws Error{NotASquare} when an odd order occurs.
RationalMap sqrt_exact(const RationalMap& f);

}  // namespace minsurf
