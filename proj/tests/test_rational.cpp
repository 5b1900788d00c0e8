#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "minsurf/rational.hpp"
#include "test_util.hpp"

using namespace minsurf;
using minsurf::testing::random_complex;
using minsurf::testing::random_rational;

namespace {

const Complex I(0.0, 1.0);

bool has_root(const std::vector<std::pair<Complex, int>>& rs, Complex z, int mult, double tol = 1e-8) {
  for (const auto& [r, m] : rs)
    if (std::abs(r - z) < tol && m == mult) return true;
  return false;
}

int divisor_order(const Divisor& d, const ExtendedPoint& p) { return d.order_at(p, 1e-7); }

}  // namespace

TEST_CASE("polynomial arithmetic basics") {
  Poly p({1.0, 2.0, 3.0});  // 1 + 2z + 3z^2
  CHECK(degree(p) == 2);
  CHECK(eval(p, Complex(2.0)) == Complex(17.0));
  Poly dp = derivative(p);
  CHECK(degree(dp) == 1);
  CHECK(eval(dp, Complex(2.0)) == Complex(14.0));

  Poly sh = taylor_shift(p, Complex(1.0));
  // p(w+1) = 6 + 8w + 3w^2
  CHECK(std::abs(sh.c[0] - Complex(6.0)) < 1e-14);
  CHECK(std::abs(sh.c[1] - Complex(8.0)) < 1e-14);
  CHECK(std::abs(sh.c[2] - Complex(3.0)) < 1e-14);

  Poly q = deflate(Poly({-1.0, 0.0, 1.0}), Complex(1.0));  // (z^2-1)/(z-1) = z+1
  CHECK(std::abs(q.c[0] - Complex(1.0)) < 1e-14);
  CHECK(std::abs(q.c[1] - Complex(1.0)) < 1e-14);
}

TEST_CASE("roots: z^2 + 1 factors into i, -i") {
  auto rs = roots(Poly({1.0, 0.0, 1.0}));
  REQUIRE(rs.size() == 2);
  CHECK(has_root(rs, I, 1, 1e-12));
  CHECK(has_root(rs, -I, 1, 1e-12));
}

TEST_CASE("roots: (z-1)^3 clusters to a triple root") {
  Poly p({-1.0, 3.0, -3.0, 1.0});
  auto rs = roots(p);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].second == 3);
  CHECK(std::abs(rs[0].first - Complex(1.0)) < 1e-7);
}

TEST_CASE("roots: z^3 - 2z + 2 verified by back-substitution") {
  Poly p({2.0, -2.0, 0.0, 1.0});
  auto rs = roots(p);
  REQUIRE(rs.size() == 3);
  for (const auto& [r, m] : rs) {
    CHECK(m == 1);
    CHECK(std::abs(eval(p, r)) < 1e-10);
  }
}

TEST_CASE("roots: zero polynomial is a domain error") {
  CHECK_THROWS_AS((void)roots(Poly::zero()), Error);
}

TEST_CASE("divisor_of examples") {
  SUBCASE("f = z") {
    Divisor d = divisor_of(RationalMap::identity());
    CHECK(divisor_order(d, ExtendedPoint(Complex(0.0))) == 1);
    CHECK(divisor_order(d, ExtendedPoint::infinity()) == -1);
    CHECK(d.degree() == 0);
  }
  SUBCASE("f = (z^2-1)/(z-2)") {
    RationalMap f(Poly({-1.0, 0.0, 1.0}), Poly({-2.0, 1.0}));
    Divisor d = divisor_of(f);
    CHECK(divisor_order(d, ExtendedPoint(Complex(1.0))) == 1);
    CHECK(divisor_order(d, ExtendedPoint(Complex(-1.0))) == 1);
    CHECK(divisor_order(d, ExtendedPoint(Complex(2.0))) == -1);
    CHECK(divisor_order(d, ExtendedPoint::infinity()) == -1);
    CHECK(d.degree() == 0);
  }
  SUBCASE("constant 5 has empty divisor") {
    Divisor d = divisor_of(RationalMap::constant(5.0));
    CHECK(d.entries.empty());
  }
  SUBCASE("zero map is a domain error") {
    CHECK_THROWS_AS((void)divisor_of(RationalMap::constant(0.0)), Error);
  }
}

TEST_CASE("divisor_of_form examples") {
  SUBCASE("dz") {
    Divisor d = divisor_of_form(OneForm(RationalMap::constant(1.0)));
    CHECK(divisor_order(d, ExtendedPoint::infinity()) == -2);
    CHECK(d.degree() == -2);
  }
  SUBCASE("dz/z") {
    OneForm w(RationalMap(Poly::constant(1.0), Poly::monomial(1.0, 1)));
    Divisor d = divisor_of_form(w);
    CHECK(divisor_order(d, ExtendedPoint(Complex(0.0))) == -1);
    CHECK(divisor_order(d, ExtendedPoint::infinity()) == -1);
    CHECK(d.degree() == -2);
  }
  SUBCASE("z dz") {
    Divisor d = divisor_of_form(OneForm(RationalMap::identity()));
    CHECK(divisor_order(d, ExtendedPoint(Complex(0.0))) == 1);
    CHECK(divisor_order(d, ExtendedPoint::infinity()) == -3);
    CHECK(d.degree() == -2);
  }
}

TEST_CASE("residue examples") {
  SUBCASE("dz/z at 0") {
    OneForm w(RationalMap(Poly::constant(1.0), Poly::monomial(1.0, 1)));
    CHECK(std::abs(residue(w, ExtendedPoint(Complex(0.0))) - Complex(1.0)) < 1e-14);
  }
  SUBCASE("dz/z^2 at 0") {
    OneForm w(RationalMap(Poly::constant(1.0), Poly::monomial(1.0, 2)));
    CHECK(std::abs(residue(w, ExtendedPoint(Complex(0.0)))) < 1e-14);
  }
  SUBCASE("(z+3)dz/(z^2(z-1)) at 0: partial-fraction oracle gives -4") {
    RationalMap f(Poly({3.0, 1.0}), mul(Poly::monomial(1.0, 2), Poly({-1.0, 1.0})));
    CHECK(std::abs(residue(OneForm(f), ExtendedPoint(Complex(0.0))) - Complex(-4.0)) < 1e-12);
    CHECK(std::abs(residue(OneForm(f), ExtendedPoint(Complex(1.0))) - Complex(4.0)) < 1e-12);
  }
}

TEST_CASE("differentiate examples") {
  SUBCASE("d(z^2) = 2z dz") {
    OneForm w = differentiate(RationalMap(Poly::monomial(1.0, 2), Poly::constant(1.0)));
    for (Complex z : {Complex(0.3, 0.2), Complex(-1.0, 2.0)})
      CHECK(std::abs(eval(w.f, z) - 2.0 * z) < 1e-13);
  }
  SUBCASE("d(1/z) = -dz/z^2") {
    OneForm w = differentiate(RationalMap(Poly::constant(1.0), Poly::monomial(1.0, 1)));
    Complex z(0.7, -0.4);
    CHECK(std::abs(eval(w.f, z) + 1.0 / (z * z)) < 1e-13);
  }
  SUBCASE("d((z-1)/(z+1)) = 2 dz/(z+1)^2 by the quotient-rule oracle") {
    RationalMap f(Poly({-1.0, 1.0}), Poly({1.0, 1.0}));
    OneForm w = differentiate(f);
    for (Complex z : {Complex(0.5, 0.1), Complex(2.0, -1.0), Complex(-0.3, 0.8)}) {
      Complex expected = 2.0 / ((z + 1.0) * (z + 1.0));
      CHECK(std::abs(eval(w.f, z) - expected) < 1e-12);
    }
  }
}

TEST_CASE("sqrt_exact examples") {
  SUBCASE("z^2 -> z with value 1 at z=1") {
    RationalMap g = sqrt_exact(RationalMap(Poly::monomial(1.0, 2), Poly::constant(1.0)));
    CHECK(std::abs(eval(g, Complex(1.0)) - Complex(1.0)) < 1e-12);
    CHECK(std::abs(eval(g, Complex(2.0, 1.0)) - Complex(2.0, 1.0)) < 1e-12);
  }
  SUBCASE("(z^2-1)^2/z^4 -> (z^2-1)/z^2 up to sign, verified by squaring") {
    Poly n = mul(Poly({-1.0, 0.0, 1.0}), Poly({-1.0, 0.0, 1.0}));
    RationalMap f(n, Poly::monomial(1.0, 4));
    RationalMap g = sqrt_exact(f);
    for (Complex z : {Complex(0.5, 0.5), Complex(2.0, -1.0), Complex(-1.5, 0.2)}) {
      Complex gv = eval(g, z);
      CHECK(std::abs(gv * gv - eval(f, z)) < 1e-10 * (1.0 + std::abs(eval(f, z))));
    }
  }
  SUBCASE("z is not a square") {
    CHECK_THROWS_AS((void)sqrt_exact(RationalMap::identity()), Error);
  }
}

TEST_CASE("property: divisor degrees are 0 for maps and -2 for forms") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 40; ++trial) {
    RationalMap f = random_rational(rng, 5);
    if (is_zero(f)) continue;
    CHECK(divisor_of(f).degree() == 0);
    CHECK(divisor_of_form(OneForm(f)).degree() == -2);
  }
}

TEST_CASE("property: residues over the sphere sum to zero") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 30; ++trial) {
    RationalMap f = random_rational(rng, 8);
    if (is_zero(f)) continue;
    OneForm w(f);
    Complex total = residue(w, ExtendedPoint::infinity());
    Divisor d = divisor_of_form(w);
    for (const auto& e : d.entries) {
      if (e.point.infinite || e.order >= 0) continue;
      total += residue(w, e.point);
    }
    CHECK(std::abs(total) < 1e-12 * (1.0 + std::abs(total)) + 1e-9);
  }
}

TEST_CASE("property: sqrt_exact squares back to the input") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 10; ++trial) {
    RationalMap h = random_rational(rng, 3);
    if (is_zero(h)) continue;
    RationalMap f = mul(h, h);
    RationalMap g = sqrt_exact(f);
    for (int i = 0; i < 50; ++i) {
      Complex z = random_complex(rng, 2.0);
      Complex fv = eval(f, z);
      Complex gv = eval(g, z);
      if (!std::isfinite(std::abs(fv)) || std::abs(fv) > 1e12) continue;
      CHECK(std::abs(gv * gv - fv) < 1e-10 * (1.0 + std::abs(fv)));
    }
  }
}

TEST_CASE("property: antiderivative of the differential recovers the map") {
  std::mt19937_64 rng(999);
  int done = 0;
  for (int trial = 0; trial < 60 && done < 10; ++trial) {
    RationalMap f = random_rational(rng, 4);
    if (is_zero(f)) continue;
    OneForm w = differentiate(f);
    RationalMap F;
    try {
      F = antiderivative(w);
    } catch (const Error&) {
      continue;  // residue leaked through a near-cancellation; skip
    }
    ++done;
    Complex offset = eval(f, Complex(0.37, 0.21)) - eval(F, Complex(0.37, 0.21));
    int checked = 0;
    for (int i = 0; i < 40 && checked < 20; ++i) {
      Complex z = random_complex(rng, 2.0);
      Complex fv = eval(f, z);
      if (!std::isfinite(std::abs(fv)) || std::abs(fv) > 1e8) continue;
      ++checked;
      CHECK(std::abs(eval(F, z) + offset - fv) < 1e-10 * (1.0 + std::abs(fv)));
    }
  }
  CHECK(done >= 10);
}

TEST_CASE("partial fractions oracle: (z+3)/(z^2(z-1)) = -4/z - 3/z^2 + 4/(z-1)") {
  RationalMap f(Poly({3.0, 1.0}), mul(Poly::monomial(1.0, 2), Poly({-1.0, 1.0})));
  PartialFractions pf = partial_fractions(f);
  CHECK(is_zero(pf.polynomial));
  REQUIRE(pf.poles.size() == 2);
  for (const auto& part : pf.poles) {
    if (std::abs(part.pole) < 1e-9) {
      REQUIRE(part.coeff.size() == 2);
      CHECK(std::abs(part.coeff[0] - Complex(-4.0)) < 1e-12);
      CHECK(std::abs(part.coeff[1] - Complex(-3.0)) < 1e-12);
    } else {
      CHECK(std::abs(part.pole - Complex(1.0)) < 1e-12);
      REQUIRE(part.coeff.size() == 1);
      CHECK(std::abs(part.coeff[0] - Complex(4.0)) < 1e-12);
    }
  }
}

TEST_CASE("reduction cancels common factors") {
  // (z^2-1)/(z-1) reduces to z+1.
  RationalMap f(Poly({-1.0, 0.0, 1.0}), Poly({-1.0, 1.0}));
  CHECK(degree(f.num) == 1);
  CHECK(degree(f.den) == 0);
  CHECK(std::abs(eval(f, Complex(1.0)) - Complex(2.0)) < 1e-12);
}

TEST_CASE("order_at sees zeros, poles and infinity") {
  RationalMap f(Poly({0.0, 0.0, 1.0}), Poly({1.0, 1.0}));  // z^2/(z+1)
  CHECK(order_at(f, ExtendedPoint(Complex(0.0))) == 2);
  CHECK(order_at(f, ExtendedPoint(Complex(-1.0))) == -1);
  CHECK(order_at(f, ExtendedPoint::infinity()) == -1);
  CHECK(order_at(f, ExtendedPoint(Complex(3.0))) == 0);
}
