#include "minsurf/rational.hpp"

#include <algorithm>
#include <cmath>

namespace minsurf {

namespace {
constexpr double kEps = 2.220446049250313e-16;

// Forward synthetic division is stable for small roots, unstable for the
// largest ones; deflate those through the reversed polynomial instead.
Poly deflate_stable(const Poly& p, Complex r) {
  if (std::abs(r) <= 1.0) return deflate(p, r);
  Poly hr = scale(deflate(reverse(p), 1.0 / r), Complex(-1.0) / r);
  return reverse(hr);
}

// Sum of |c_j| |z|^j: the scale against which p(z) ~ 0 is meaningful.
double term_sum(const Poly& p, double r) {
  double acc = 0.0, pw = 1.0;
  for (Eigen::Index j = 0; j < p.c.size(); ++j) {
    acc += std::abs(p.c[j]) * pw;
    pw *= r;
  }
  return acc;
}

// A cancellation is only real if each claimed root is a backward-stable root
// of the other polynomial; position distance alone over-cancels when an
// exact factor sits near a perturbation-scale zero.
bool cancellation_valid(const Poly& num, Complex zn, const Poly& den, Complex zd) {
  double vn = std::abs(eval(num, zd));
  double vd = std::abs(eval(den, zn));
  return vn <= 1e-9 * (term_sum(num, std::abs(zd)) + 1e-300) &&
         vd <= 1e-9 * (term_sum(den, std::abs(zn)) + 1e-300);
}

std::pair<Poly, Poly> poly_divmod(const Poly& a, const Poly& b) {
  if (is_zero(b)) throw Error(Err::ZeroPolynomial, "division by the zero polynomial");
  if (degree(a) < degree(b)) return {Poly{}, a};
  Eigen::VectorXcd rem = a.c;
  const int da = degree(a), db = degree(b);
  Eigen::VectorXcd q = Eigen::VectorXcd::Zero(da - db + 1);
  for (int i = da; i >= db; --i) {
    Complex f = rem[i] / b.c[db];
    q[i - db] = f;
    for (int j = 0; j <= db; ++j) rem[i - db + j] -= f * b.c[j];
  }
  return {trim(Poly(std::move(q))), trim(Poly(rem.head(db).eval()))};
}

}  // namespace

bool same_point(const ExtendedPoint& a, const ExtendedPoint& b, double tol) {
  if (a.infinite || b.infinite) return a.infinite && b.infinite;
  return std::abs(a.z - b.z) <= tol * (1.0 + 0.5 * (std::abs(a.z) + std::abs(b.z)));
}

bool point_less(const ExtendedPoint& a, const ExtendedPoint& b) {
  if (a.infinite) return false;
  if (b.infinite) return true;
  if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
  return a.z.imag() < b.z.imag();
}

int Divisor::degree() const {
  int d = 0;
  for (const auto& e : entries) d += e.order;
  return d;
}

int Divisor::order_at(const ExtendedPoint& p, double tol) const {
  for (const auto& e : entries)
    if (same_point(e.point, p, tol)) return e.order;
  return 0;
}

Divisor make_divisor(std::vector<DivisorEntry> in, double merge_tol) {
  std::vector<DivisorEntry> out;
  for (const auto& e : in) {
    if (e.order == 0) continue;
    bool found = false;
    for (auto& o : out)
      if (same_point(o.point, e.point, merge_tol)) {
        o.order += e.order;
        found = true;
        break;
      }
    if (!found) out.push_back(e);
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const DivisorEntry& e) { return e.order == 0; }),
            out.end());
  std::sort(out.begin(), out.end(),
            [](const DivisorEntry& a, const DivisorEntry& b) { return point_less(a.point, b.point); });
  Divisor d;
  d.entries = std::move(out);
  return d;
}

Divisor divisor_mul(const Divisor& a, const Divisor& b, double merge_tol) {
  std::vector<DivisorEntry> all = a.entries;
  all.insert(all.end(), b.entries.begin(), b.entries.end());
  return make_divisor(std::move(all), merge_tol);
}

Divisor divisor_inverse(const Divisor& a) {
  Divisor d = a;
  for (auto& e : d.entries) e.order = -e.order;
  return d;
}

bool divisor_geq(const Divisor& a, const Divisor& b, double tol) {
  for (const auto& e : b.entries)
    if (a.order_at(e.point, tol) < e.order) return false;
  return true;
}

RationalMap::RationalMap(Poly n, Poly d) : num(trim(std::move(n))), den(trim(std::move(d))) {
  if (is_zero(den)) throw Error(Err::ZeroPolynomial, "rational map with zero denominator");
  if (is_zero(num)) {
    den = Poly::constant(1.0);
    return;
  }
  // Cancel common roots by matching the two root sets; each factor is removed
  // from its own polynomial by synthetic division so the remaining
  // coefficients keep their accuracy.
  if (degree(num) >= 1 && degree(den) >= 1) {
    auto rn = roots(num);
    auto rd = roots(den);
    // Tight enough that a zero 1e-7 away from a pole survives (the quadratic
    // deformation family produces exactly such pairs at small amplitudes).
    const double tol = 4.0 * std::max(root_cluster_tol(num), root_cluster_tol(den));
    for (auto& [zn, mn] : rn) {
      for (auto& [zd, md] : rd) {
        if (md == 0 || mn == 0) continue;
        double mag = 1.0 + 0.5 * (std::abs(zn) + std::abs(zd));
        double fuzz = std::pow(64.0 * (degree(num) + degree(den)) * kEps,
                               1.0 / std::max(mn, md));
        if (std::abs(zn - zd) <= std::max(tol, fuzz) * mag &&
            cancellation_valid(num, zn, den, zd)) {
          int k = std::min(mn, md);
          for (int i = 0; i < k; ++i) {
            num = deflate_stable(num, zn);
            den = deflate_stable(den, zd);
          }
          mn -= k;
          md -= k;
        }
      }
    }
    num = trim(num);
    den = trim(den);
  }
  // Monic denominator for a canonical representation.
  Complex lead = den.c[den.c.size() - 1];
  num = scale(num, 1.0 / lead);
  den = scale(den, 1.0 / lead);
}

bool is_zero(const RationalMap& f) { return is_zero(f.num); }

RationalMap add(const RationalMap& a, const RationalMap& b) {
  return {add(mul(a.num, b.den), mul(b.num, a.den)), mul(a.den, b.den)};
}

RationalMap sub(const RationalMap& a, const RationalMap& b) {
  return {sub(mul(a.num, b.den), mul(b.num, a.den)), mul(a.den, b.den)};
}

RationalMap mul(const RationalMap& a, const RationalMap& b) {
  return {mul(a.num, b.num), mul(a.den, b.den)};
}

RationalMap div(const RationalMap& a, const RationalMap& b) {
  if (is_zero(b)) throw Error(Err::ZeroPolynomial, "division by the zero map");
  return {mul(a.num, b.den), mul(a.den, b.num)};
}

RationalMap scale(const RationalMap& a, Complex s) { return {scale(a.num, s), a.den}; }

RationalMap pow(const RationalMap& a, int k) {
  if (k == 0) return RationalMap::constant(1.0);
  RationalMap base = k > 0 ? a : div(RationalMap::constant(1.0), a);
  RationalMap out = base;
  for (int i = 1; i < std::abs(k); ++i) out = mul(out, base);
  return out;
}

Complex eval(const RationalMap& f, Complex z) { return eval(f.num, z) / eval(f.den, z); }

ExtendedPoint eval_at_infinity(const RationalMap& f) {
  const int dn = degree(f.num), dd = degree(f.den);
  if (dn > dd) return ExtendedPoint::infinity();
  if (dn < dd) return ExtendedPoint(Complex(0.0));
  return ExtendedPoint(f.num.c[dn] / f.den.c[dd]);
}

RationalMap compose_reciprocal(const RationalMap& f) {
  const int dn = degree(f.num), dd = degree(f.den);
  Poly rn = reverse(f.num), rd = reverse(f.den);
  if (dd >= dn) return {mul(rn, Poly::monomial(1.0, dd - dn)), rd};
  return {rn, mul(rd, Poly::monomial(1.0, dn - dd))};
}

RationalMap derivative(const RationalMap& f) {
  Poly n = sub(mul(derivative(f.num), f.den), mul(f.num, derivative(f.den)));
  return {std::move(n), mul(f.den, f.den)};
}

int order_at(const RationalMap& f, const ExtendedPoint& p) {
  if (is_zero(f.num)) throw Error(Err::ZeroPolynomial, "order of the zero map");
  if (p.infinite) return degree(f.den) - degree(f.num);
  return order_at(f.num, p.z) - order_at(f.den, p.z);
}

int map_degree(const RationalMap& f) { return std::max(degree(f.num), degree(f.den)); }

Divisor divisor_of(const RationalMap& f) {
  if (is_zero(f)) throw Error(Err::ZeroPolynomial, "divisor of the zero map");
  std::vector<DivisorEntry> entries;
  if (degree(f.num) >= 1)
    for (const auto& [z, m] : roots(f.num)) entries.push_back({ExtendedPoint(z), m});
  if (degree(f.den) >= 1)
    for (const auto& [z, m] : roots(f.den)) entries.push_back({ExtendedPoint(z), -m});
  int oi = degree(f.den) - degree(f.num);
  if (oi != 0) entries.push_back({ExtendedPoint::infinity(), oi});
  return make_divisor(std::move(entries), 8e-9);
}

OneForm form_add(const OneForm& a, const OneForm& b) { return OneForm(add(a.f, b.f)); }
OneForm form_scale(const OneForm& a, Complex s) { return OneForm(scale(a.f, s)); }
OneForm form_mul(const OneForm& a, const RationalMap& g) { return OneForm(mul(a.f, g)); }

Divisor divisor_of_form(const OneForm& w) {
  if (is_zero(w.f)) throw Error(Err::ZeroPolynomial, "divisor of the zero form");
  Divisor d = divisor_of(w.f);
  std::vector<DivisorEntry> entries;
  for (const auto& e : d.entries)
    if (!e.point.infinite) entries.push_back(e);
  int oi = degree(w.f.den) - degree(w.f.num) - 2;
  if (oi != 0) entries.push_back({ExtendedPoint::infinity(), oi});
  return make_divisor(std::move(entries), 8e-9);
}

int form_order_at(const OneForm& w, const ExtendedPoint& p) {
  if (p.infinite) return degree(w.f.den) - degree(w.f.num) - 2;
  return order_at(w.f, p);
}

namespace {

// Laurent principal-part coefficients of f at a finite point p:
// returns s such that f = w^{-m} (s[0] + s[1] w + ... ) with w = z - p,
// m = pole order (m <= 0 yields an empty vector).
std::vector<Complex> principal_series(const RationalMap& f, Complex p, int* pole_order) {
  Poly ns = taylor_shift(f.num, p);
  Poly ds = taylor_shift(f.den, p);
  const double ncut = 1e-9 * (1.0 + coeff_sup(ns));
  const double dcut = 1e-9 * (1.0 + coeff_sup(ds));
  int on = 0;
  while (on < static_cast<int>(ns.c.size()) && std::abs(ns.c[on]) <= ncut) ++on;
  int od = 0;
  while (od < static_cast<int>(ds.c.size()) && std::abs(ds.c[od]) <= dcut) ++od;
  int m = od - on;
  if (pole_order) *pole_order = m;
  std::vector<Complex> s;
  if (m <= 0) return s;
  // Power-series division a/b with a = shifted num / w^on, b = shifted den / w^od.
  auto a = [&](int k) -> Complex {
    int i = k + on;
    return i < static_cast<int>(ns.c.size()) ? ns.c[i] : Complex(0.0);
  };
  auto b = [&](int k) -> Complex {
    int i = k + od;
    return i < static_cast<int>(ds.c.size()) ? ds.c[i] : Complex(0.0);
  };
  s.resize(m);
  for (int k = 0; k < m; ++k) {
    Complex acc = a(k);
    for (int j = 0; j < k; ++j) acc -= s[j] * b(k - j);
    s[k] = acc / b(0);
  }
  return s;
}

}  // namespace

Complex residue(const OneForm& w, const ExtendedPoint& p) {
  if (is_zero(w.f)) return Complex(0.0);
  if (p.infinite) {
    RationalMap g = compose_reciprocal(w.f);
    RationalMap chart(scale(g.num, Complex(-1.0)), mul(g.den, Poly::monomial(1.0, 2)));
    return residue(OneForm(std::move(chart)), ExtendedPoint(Complex(0.0)));
  }
  int m = 0;
  std::vector<Complex> s = principal_series(w.f, p.z, &m);
  if (m <= 0) return Complex(0.0);
  return s[m - 1];
}

OneForm differentiate(const RationalMap& f) { return OneForm(derivative(f)); }

PartialFractions partial_fractions(const RationalMap& f) {
  PartialFractions out;
  auto [q, r] = poly_divmod(f.num, f.den);
  out.polynomial = q;
  if (degree(f.den) < 1) return out;
  RationalMap proper(r, f.den);
  if (is_zero(proper)) return out;
  for (const auto& [p, mult] : roots(f.den)) {
    int m = 0;
    std::vector<Complex> s = principal_series(proper, p, &m);
    if (m <= 0) continue;
    PartialFractions::PolePart part;
    part.pole = p;
    part.coeff.resize(m);
    for (int k = 1; k <= m; ++k) part.coeff[k - 1] = s[m - k];
    out.poles.push_back(std::move(part));
  }
  return out;
}

RationalMap antiderivative(const OneForm& w) {
  PartialFractions pf = partial_fractions(w.f);
  double scale_ref = 1.0 + std::max(coeff_sup(w.f.num), coeff_sup(w.f.den));
  RationalMap out = RationalMap::constant(0.0);
  // Integrated polynomial part.
  if (!is_zero(pf.polynomial)) {
    Eigen::VectorXcd ic = Eigen::VectorXcd::Zero(pf.polynomial.c.size() + 1);
    for (Eigen::Index i = 0; i < pf.polynomial.c.size(); ++i)
      ic[i + 1] = pf.polynomial.c[i] / static_cast<double>(i + 1);
    out = add(out, RationalMap(Poly(std::move(ic)), Poly::constant(1.0)));
  }
  for (const auto& part : pf.poles) {
    if (std::abs(part.coeff[0]) > 1e-9 * scale_ref)
      throw Error(Err::NotWellDefined, "antiderivative requires vanishing residues");
    for (int k = 2; k <= static_cast<int>(part.coeff.size()); ++k) {
      Complex c = part.coeff[k - 1] / static_cast<double>(1 - k);
      Poly denp = from_roots({{part.pole, k - 1}}, Complex(1.0));
      out = add(out, RationalMap(Poly::constant(c), std::move(denp)));
    }
  }
  return out;
}

RationalMap sqrt_exact(const RationalMap& f) {
  if (is_zero(f)) throw Error(Err::ZeroPolynomial, "sqrt of the zero map");
  Divisor d = divisor_of(f);
  for (const auto& e : d.entries)
    if (e.order % 2 != 0)
      throw Error(Err::NotASquare, "odd divisor order: the map is not a square");
  std::vector<std::pair<Complex, int>> nr, dr;
  for (const auto& e : d.entries) {
    if (e.point.infinite) continue;
    if (e.order > 0)
      nr.push_back({e.point.z, e.order / 2});
    else
      dr.push_back({e.point.z, -e.order / 2});
  }
  RationalMap g0(from_roots(nr, Complex(1.0)), from_roots(dr, Complex(1.0)));
  // Deterministic reference point away from all zeros and poles.
  static const Complex candidates[] = {
      {1.0, 0.0},  {2.0, 0.0}, {0.0, 1.0},  {1.0, 1.0},  {3.0, 0.0},  {0.0, 2.0},
      {-1.0, 0.0}, {-2.0, 0.0}, {0.5, 0.5}, {-1.0, 1.0}, {5.0, 0.0},  {0.0, -3.0},
      {7.0, 2.0},  {-4.0, 3.0}, {11.0, 0.0}, {0.0, 13.0}, {17.0, 5.0}, {23.0, -7.0}};
  Complex ref = candidates[0];
  for (Complex cand : candidates) {
    double dist = 1e300;
    for (const auto& e : d.entries)
      if (!e.point.infinite) dist = std::min(dist, std::abs(cand - e.point.z));
    if (dist > 0.2) {
      ref = cand;
      break;
    }
  }
  Complex c2 = eval(f, ref) / (eval(g0, ref) * eval(g0, ref));
  Complex c = std::sqrt(c2);
  Complex gval = c * eval(g0, ref);
  if (gval.real() < 0.0 || (gval.real() == 0.0 && gval.imag() < 0.0)) c = -c;
  return scale(g0, c);
}

}  // namespace minsurf
