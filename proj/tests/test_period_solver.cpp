#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "minsurf/builtins.hpp"
#include "minsurf/period_solver.hpp"
#include "test_util.hpp"

using namespace minsurf;
using minsurf::testing::random_complex;

namespace {
constexpr double kPi = std::numbers::pi;
const Complex I(0.0, 1.0);

struct CatenoidSetup {
  BuiltinScene b;
  CycleBasis cycles;
  EndData ends;
  std::vector<Eigen::Vector3d> q;
};

CatenoidSetup catenoid_setup() {
  CatenoidSetup s;
  s.b = builtin_scene("catenoid");
  s.cycles = build_cycle_basis(s.b.scene.sets, s.b.scene.sphere);
  s.ends = compute_end_data(spinor_to_weierstrass(s.b.data), s.b.scene.sphere);
  s.q.assign(s.cycles.cycles.size(), Eigen::Vector3d(0.0, 0.0, 2.0 * kPi));
  return s;
}

// Catenoid with the spinor forms multiplied by (1 + eps z)^2; the flux and
// the real periods both move, so closure has real work to do.
SpinorPair perturbed_catenoid(Complex eps) {
  RationalMap unit(Poly({1.0, eps}), Poly::constant(1.0));
  OneForm eta1(mul(mul(unit, unit),
                   RationalMap(Poly::constant(1.0), Poly::monomial(1.0, 2))));
  RationalMap g = div(RationalMap::identity(), unit);
  return make_spinor_pair(std::move(eta1), std::move(g));
}

}  // namespace

TEST_CASE("deformation basis honors the end constraint divisor") {
  // One interior end of order 2 inside a disc, two punctures.
  SceneModel sc;
  sc.sphere.interior_ends = {ExtendedPoint(Complex(0.0))};
  sc.sphere.exterior_punctures = {ExtendedPoint(Complex(3.0)), ExtendedPoint::infinity()};
  sc.sets.regions.push_back({Complex(0.0), 1.0, {0}});
  OneForm eta1(RationalMap(Poly::constant(1.0), Poly::monomial(1.0, 3)));
  SpinorPair sp = make_spinor_pair(eta1, RationalMap(Poly({0.0, 0.5}), Poly::constant(1.0)));
  EndData ends = compute_end_data(spinor_to_weierstrass(sp), sc.sphere);
  REQUIRE(ends.pole_orders == std::vector<int>{2});
  CycleBasis cycles = build_cycle_basis(sc.sets, sc.sphere);
  DeformationSpace ds = build_deformation_basis(sc.sets, sc.sphere, cycles, sp, ends, 3);
  REQUIRE(ds.basis.size() == 3);
  for (const auto& f : ds.basis) {
    CHECK(order_at(f, ExtendedPoint(Complex(0.0))) >= 2);
    // Poles confined to the punctures.
    Divisor d = divisor_of(f);
    for (const auto& e : d.entries) {
      if (e.order >= 0) continue;
      bool at_puncture = e.point.infinite || std::abs(e.point.z - Complex(3.0)) < 1e-7;
      CHECK(at_puncture);
    }
  }
}

TEST_CASE("deformation basis: b = 1 raises EmptyBasis") {
  SceneModel sc;
  sc.sphere.exterior_punctures = {ExtendedPoint::infinity()};
  sc.sets.regions.push_back({Complex(0.0), 1.0, {}});
  SpinorPair sp = enneper_data();
  EndData ends;
  CycleBasis cycles = build_cycle_basis(sc.sets, sc.sphere);
  CHECK_THROWS_AS(
      (void)build_deformation_basis(sc.sets, sc.sphere, cycles, sp, ends, cycles.varsigma0), Error);
}

TEST_CASE("deformation basis: no interior ends means pure pole elements") {
  CatenoidSetup s = catenoid_setup();
  DeformationSpace ds =
      build_deformation_basis(s.b.scene.sets, s.b.scene.sphere, s.cycles, s.b.data, s.ends, 3);
  REQUIRE(ds.basis.size() == 3);
  CHECK(ds.end_constraint.entries.empty());
}

TEST_CASE("deform: f = 0 is the identity") {
  SpinorPair sp = catenoid_data();
  SpinorPair def = deform(sp, RationalMap::constant(0.0));
  for (Complex z : {Complex(1.0), Complex(0.3, 0.7)}) {
    CHECK(std::abs(eval(def.eta1.f, z) - eval(sp.eta1.f, z)) < 1e-14);
    CHECK(std::abs(eval(def.eta2.f, z) - eval(sp.eta2.f, z)) < 1e-14);
    CHECK(std::abs(eval(def.g, z) - eval(sp.g, z)) < 1e-14);
  }
}

TEST_CASE("deform: constant f scales the phi3 period by (1+c)(1+2c)") {
  SpinorPair sp = catenoid_data();
  Complex c(0.05, 0.02);
  SpinorPair def = deform(sp, RationalMap::constant(c));
  WeierstrassTriple w = spinor_to_weierstrass(def);
  Cycle circle = Cycle::circle(Complex(0.0), 1.0);
  Complex p = period(w.phi[2], circle);
  Complex expect = (1.0 + c) * (1.0 + 2.0 * c) * (2.0 * kPi * I);
  CHECK(std::abs(p - expect) < 1e-12 * std::abs(expect));
}

TEST_CASE("deform keeps the square identity phi3^2 = eta1 eta2") {
  std::mt19937_64 rng(505);
  SpinorPair sp = catenoid_data();
  RationalMap f(Poly({0.02, Complex(0.0, 0.01)}), Poly({1.0, 0.0, 0.3}));
  SpinorPair def = deform(sp, f);
  WeierstrassTriple w = deform_triple(sp, f);
  int checked = 0;
  for (int i = 0; i < 200 && checked < 50; ++i) {
    Complex z = random_complex(rng, 2.0);
    if (std::abs(z) < 0.05) continue;
    Complex lhs = eval(w.phi[2].f, z);
    Complex rhs = eval(def.eta1.f, z) * eval(def.eta2.f, z);
    if (!std::isfinite(std::abs(rhs)) || std::abs(rhs) > 1e10) continue;
    ++checked;
    CHECK(std::abs(lhs * lhs - rhs) < 1e-12 * (1.0 + std::abs(rhs)));
    // And the ratio eta2/eta1 equals (g (1+2f)/(1+f))^2 exactly.
    Complex gv = eval(def.g, z);
    Complex ratio = eval(def.eta2.f, z) / eval(def.eta1.f, z);
    CHECK(std::abs(gv * gv - ratio) < 1e-12 * (1.0 + std::abs(ratio)));
  }
  CHECK(checked == 50);
}

TEST_CASE("period system: closed reference with native flux gives c = 0") {
  CatenoidSetup s = catenoid_setup();
  DeformationSpace ds =
      build_deformation_basis(s.b.scene.sets, s.b.scene.sphere, s.cycles, s.b.data, s.ends, 3);
  WeierstrassTriple ref = spinor_to_weierstrass(s.b.data);
  PeriodSystem ps = assemble_period_system(s.b.data, ds, s.cycles, ref, s.q);
  CHECK(ps.c.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("period system: tensors match the direct deformed periods") {
  std::mt19937_64 rng(99);
  CatenoidSetup s = catenoid_setup();
  DeformationSpace ds =
      build_deformation_basis(s.b.scene.sets, s.b.scene.sphere, s.cycles, s.b.data, s.ends, 3);
  WeierstrassTriple ref = spinor_to_weierstrass(s.b.data);
  PeriodSystem ps = assemble_period_system(s.b.data, ds, s.cycles, ref, s.q);
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXcd x(3);
    for (int j = 0; j < 3; ++j) x[j] = 0.2 * random_complex(rng);
    Eigen::VectorXcd tensor = eval_period_map(ps, x);
    Eigen::VectorXcd direct = direct_periods(ps, x);
    CHECK((tensor - direct).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + direct.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("period system: linear term matches finite differences") {
  CatenoidSetup s = catenoid_setup();
  DeformationSpace ds =
      build_deformation_basis(s.b.scene.sets, s.b.scene.sphere, s.cycles, s.b.data, s.ends, 3);
  WeierstrassTriple ref = spinor_to_weierstrass(s.b.data);
  PeriodSystem ps = assemble_period_system(s.b.data, ds, s.cycles, ref, s.q);
  const double eps = 1e-7;
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(3);
    e[k] = eps;
    Eigen::VectorXcd fd = (direct_periods(ps, e) - direct_periods(ps, Eigen::VectorXcd::Zero(3))) / eps;
    for (int r = 0; r < 3; ++r)
      CHECK(std::abs(fd[r] - ps.A(r, k)) < 1e-6 * (1.0 + std::abs(ps.A(r, k))));
  }
}

TEST_CASE("period map is exactly quadratic: third differences vanish") {
  std::mt19937_64 rng(3);
  CatenoidSetup s = catenoid_setup();
  DeformationSpace ds =
      build_deformation_basis(s.b.scene.sets, s.b.scene.sphere, s.cycles, s.b.data, s.ends, 3);
  WeierstrassTriple ref = spinor_to_weierstrass(s.b.data);
  PeriodSystem ps = assemble_period_system(s.b.data, ds, s.cycles, ref, s.q);
  for (int t = 0; t < 5; ++t) {
    Eigen::VectorXcd dir(3);
    for (int j = 0; j < 3; ++j) dir[j] = random_complex(rng);
    const double h = 0.05;
    Eigen::VectorXcd d3 = eval_period_map(ps, 3 * h * dir) - 3 * eval_period_map(ps, 2 * h * dir) +
                          3 * eval_period_map(ps, h * dir) - eval_period_map(ps, 0 * dir);
    double scale = eval_period_map(ps, 3 * h * dir).cwiseAbs().maxCoeff();
    CHECK(d3.cwiseAbs().maxCoeff() < 1e-9 * (1.0 + scale));
  }
}

TEST_CASE("surjectivity: catenoid system has full rank, duplicates do not") {
  CatenoidSetup s = catenoid_setup();
  DeformationSpace ds =
      build_deformation_basis(s.b.scene.sets, s.b.scene.sphere, s.cycles, s.b.data, s.ends, 3);
  WeierstrassTriple ref = spinor_to_weierstrass(s.b.data);
  PeriodSystem ps = assemble_period_system(s.b.data, ds, s.cycles, ref, s.q);
  SurjectivityCheck sc = check_surjectivity(ps);
  CHECK(sc.surjective);
  CHECK(sc.sigma_min > 1e-8 * sc.sigma_max);

  DeformationSpace dup = ds;
  dup.basis[1] = dup.basis[0];
  PeriodSystem ps2 = assemble_period_system(s.b.data, dup, s.cycles, ref, s.q);
  CHECK(!check_surjectivity(ps2).surjective);

  PeriodSystem trivial;
  trivial.dim = 0;
  CHECK(check_surjectivity(trivial).surjective);
}

TEST_CASE("closure: already-closed data stays at x = 0") {
  CatenoidSetup s = catenoid_setup();
  DeformationSpace ds =
      build_deformation_basis(s.b.scene.sets, s.b.scene.sphere, s.cycles, s.b.data, s.ends, 3);
  WeierstrassTriple ref = spinor_to_weierstrass(s.b.data);
  PeriodSystem ps = assemble_period_system(s.b.data, ds, s.cycles, ref, s.q);
  ClosureResult cr = close_periods(ps);
  CHECK(cr.solution.norm() < 1e-10);
  CHECK(cr.iterations == 0);
}

TEST_CASE("closure: the perturbed catenoid closes and verifies by quadrature") {
  CatenoidSetup s = catenoid_setup();
  SpinorPair sp = perturbed_catenoid(Complex(0.0, 0.01));
  WeierstrassTriple ref = spinor_to_weierstrass(sp);
  // The perturbation moved the flux; ask for the catenoid's own values.
  DeformationSpace ds = build_deformation_basis(s.b.scene.sets, s.b.scene.sphere, s.cycles, sp, s.ends, 3);
  PeriodSystem ps = assemble_period_system(sp, ds, s.cycles, ref, s.q);
  REQUIRE(check_surjectivity(ps).surjective);
  CHECK(ps.c.cwiseAbs().maxCoeff() > 1e-4);  // genuinely off before closure
  ClosureResult cr = close_periods(ps);
  CHECK(cr.iterations <= 20);
  CHECK(cr.residual < 1e-10);
  CHECK(cr.quad_real_residual < 1e-9);
  CHECK(cr.quad_flux_error < 1e-8);
  BranchScan scan = branch_point_scan(cr.deformed, s.b.scene.sphere);
  CHECK(!scan.degenerate);
  CHECK(scan.common_zeros.empty());
}

TEST_CASE("closure: flux retarget to 1.1x the native flux") {
  CatenoidSetup s = catenoid_setup();
  SpinorPair sp = perturbed_catenoid(Complex(0.0, 0.01));
  WeierstrassTriple ref = spinor_to_weierstrass(sp);
  DeformationSpace ds = build_deformation_basis(s.b.scene.sets, s.b.scene.sphere, s.cycles, sp, s.ends, 3);
  std::vector<Eigen::Vector3d> q{Eigen::Vector3d(0.0, 0.0, 2.2 * kPi)};
  PeriodSystem ps = assemble_period_system(sp, ds, s.cycles, ref, q);
  ClosureResult cr = close_periods(ps);
  CHECK(cr.residual < 1e-10);
  CHECK(cr.quad_real_residual < 1e-9);
  CHECK(cr.quad_flux_error < 1e-8);
  // Independent residue check of the achieved flux.
  WeierstrassTriple w = spinor_to_weierstrass(cr.deformed);
  Complex p3 = period(w.phi[2], s.cycles.cycles[0]);
  CHECK(std::abs(p3.imag() - 2.2 * kPi) < 1e-8);
  CHECK(std::abs(p3.real()) < 1e-9);
}

TEST_CASE("Newton converges quadratically once the residual is small") {
  CatenoidSetup s = catenoid_setup();
  SpinorPair sp = perturbed_catenoid(Complex(0.02, 0.03));
  WeierstrassTriple ref = spinor_to_weierstrass(sp);
  DeformationSpace ds = build_deformation_basis(s.b.scene.sets, s.b.scene.sphere, s.cycles, sp, s.ends, 3);
  PeriodSystem ps = assemble_period_system(sp, ds, s.cycles, ref, s.q);
  ClosureResult cr = close_periods(ps);
  const auto& hist = cr.residual_history;
  REQUIRE(hist.size() >= 2);
  for (size_t k = 0; k + 1 < hist.size(); ++k) {
    if (hist[k] < 1e-3 && hist[k] > 0) {
      double ratio = hist[k + 1] / (hist[k] * hist[k]);
      CHECK(ratio < 1e3);  // bounded quadratic-convergence constant
    }
  }
}

TEST_CASE("branch scan: f = 0 is clean, f = -1 is degenerate") {
  CatenoidSetup s = catenoid_setup();
  BranchScan clean = branch_point_scan(s.b.data, s.b.scene.sphere);
  CHECK(!clean.degenerate);
  CHECK(clean.common_zeros.empty());
  SpinorPair dead = deform(s.b.data, RationalMap::constant(-1.0));
  BranchScan scan = branch_point_scan(dead, s.b.scene.sphere);
  CHECK(scan.degenerate);
}

TEST_CASE("solve_period_problem runs the full retry loop") {
  CatenoidSetup s = catenoid_setup();
  SpinorPair sp = perturbed_catenoid(Complex(0.0, 0.01));
  PeriodSolution sol =
      solve_period_problem(s.b.scene.sets, s.b.scene.sphere, s.cycles, sp, s.ends, s.q);
  CHECK(sol.retries_used < 16);
  CHECK(sol.closure.residual < 1e-10);
  CHECK(sol.closure.quad_flux_error < 1e-8);
}
