#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "minsurf/scene.hpp"
#include "minsurf/scene_io.hpp"

using namespace minsurf;

namespace {

constexpr double kPi = std::numbers::pi;

SceneModel one_disc_scene() {
  SceneModel sc;
  sc.sets.regions.push_back({Complex(0.0), 1.0, {}});
  sc.sphere.exterior_punctures.push_back(ExtendedPoint(Complex(3.0)));
  return sc;
}

// Disc joined by a segment to a circle around a finite puncture, second
// puncture at infinity: two complementary faces, one puncture each.
SceneModel two_face_scene() {
  SceneModel sc;
  Complex q1(3.0, 0.5);
  sc.sets.regions.push_back({Complex(0.0), 1.0, {}});
  sc.sets.arcs.push_back(make_segment_arc(Complex(1.0, 0.1667), q1 - Complex(0.8, 0.0)));
  sc.sets.arcs.push_back(make_circle_arc(q1, 0.8));
  sc.sphere.exterior_punctures.push_back(ExtendedPoint(q1));
  sc.sphere.exterior_punctures.push_back(ExtendedPoint::infinity());
  return sc;
}

}  // namespace

TEST_CASE("validate: one disc with one outside puncture is valid") {
  SceneModel sc = one_disc_scene();
  auto rep = validate_admissible(sc.sets, sc.sphere);
  CHECK(rep.ok());
}

TEST_CASE("validate: two discs and no exterior puncture is invalid") {
  SceneModel sc;
  sc.sets.regions.push_back({Complex(-2.0), 1.0, {}});
  sc.sets.regions.push_back({Complex(2.0), 1.0, {}});
  auto rep = validate_admissible(sc.sets, sc.sphere);
  CHECK(!rep.ok());
  CHECK(!rep.admissible());
}

TEST_CASE("validate: disc containing an exterior puncture is invalid") {
  SceneModel sc = one_disc_scene();
  sc.sphere.exterior_punctures[0] = ExtendedPoint(Complex(0.2, 0.1));
  auto rep = validate_admissible(sc.sets, sc.sphere);
  CHECK(!rep.ok());
}

TEST_CASE("validate: two-face scene passes including the hypothesis checks") {
  SceneModel sc = two_face_scene();
  auto rep = validate_admissible(sc.sets, sc.sphere);
  std::string first = rep.violations.empty() ? std::string() : rep.violations[0];
  INFO(first);
  CHECK(rep.ok());
}

TEST_CASE("validate: face with two punctures violates the hypothesis only") {
  SceneModel sc = one_disc_scene();
  sc.sphere.exterior_punctures.push_back(ExtendedPoint(Complex(-3.0)));
  auto rep = validate_admissible(sc.sets, sc.sphere);
  CHECK(!rep.ok());
  CHECK(rep.admissible());  // Definition-level admissibility still holds
}

TEST_CASE("cycle basis: b = 1 gives the empty basis") {
  SceneModel sc = one_disc_scene();
  CycleBasis basis = build_cycle_basis(sc.sets, sc.sphere);
  CHECK(basis.cycles.empty());
  CHECK(basis.varsigma0 == 0);
}

TEST_CASE("cycle basis: b = 2 gives one circle and varsigma0 = 3") {
  SceneModel sc = two_face_scene();
  CycleBasis basis = build_cycle_basis(sc.sets, sc.sphere);
  REQUIRE(basis.cycles.size() == 1);
  CHECK(basis.varsigma0 == 3);
  CHECK(winding_number(basis.cycles[0], sc.sphere.exterior_punctures[0].z) == 1);
}

TEST_CASE("cycle basis: b = 3 punctures at 3, 3i, -3 give two circles") {
  SceneModel sc;
  sc.sets.regions.push_back({Complex(0.0), 1.0, {}});
  sc.sphere.exterior_punctures = {ExtendedPoint(Complex(3.0)), ExtendedPoint(Complex(0.0, 3.0)),
                                  ExtendedPoint(Complex(-3.0))};
  CycleBasis basis = build_cycle_basis(sc.sets, sc.sphere);
  REQUIRE(basis.cycles.size() == 2);
  CHECK(basis.varsigma0 == 6);
  CHECK(winding_number(basis.cycles[0], Complex(3.0)) == 1);
  CHECK(winding_number(basis.cycles[0], Complex(0.0, 3.0)) == 0);
  CHECK(winding_number(basis.cycles[1], Complex(0.0, 3.0)) == 1);
}

TEST_CASE("winding numbers: analytic and discrete routes agree on circles") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Cycle c = Cycle::circle(Complex(0.3, -0.2), 1.1);
  for (int i = 0; i < 50; ++i) {
    Complex z(u(rng), u(rng));
    if (std::abs(cycle_distance(c, z)) < 0.05) continue;
    CHECK(winding_number(c, z) == winding_number_discrete(c, z));
  }
}

TEST_CASE("generalized differential: planar circle oracle and isotropy") {
  MarkedCurveData m;
  const int n = 128;
  MarkedArc arc;
  arc.X.resize(3, n);
  arc.sigma.resize(3, n);
  for (int i = 0; i < n; ++i) {
    double t = double(i) / (n - 1);
    arc.X.col(i) = Eigen::Vector3d(std::cos(2 * kPi * t), std::sin(2 * kPi * t), 0.0);
    arc.sigma.col(i) = Eigen::Vector3d(0.0, 0.0, 1.0);
  }
  m.arcs.push_back(arc);
  auto vals = generalized_differential(m);
  REQUIRE(vals.size() == 1);
  // Hand oracle at t=0: X' = 2pi(0,1,0), sigma x X' = 2pi(-1,0,0),
  // value = 2pi(-i, 1, 0).
  Complex v0 = vals[0](0, 0), v1 = vals[0](1, 0);
  CHECK(std::abs(v0 - Complex(0.0, -2 * kPi)) < 1e-6);
  CHECK(std::abs(v1 - Complex(2 * kPi, 0.0)) < 1e-6);
  for (int i = 0; i < n; ++i) {
    Complex iso = vals[0](0, i) * vals[0](0, i) + vals[0](1, i) * vals[0](1, i) +
                  vals[0](2, i) * vals[0](2, i);
    CHECK(std::abs(iso) < 1e-10 * (2 * kPi) * (2 * kPi));
  }
}

TEST_CASE("generalized differential: straight segment is isotropic") {
  MarkedCurveData m;
  const int n = 64;
  MarkedArc arc;
  arc.X.resize(3, n);
  arc.sigma.resize(3, n);
  for (int i = 0; i < n; ++i) {
    double t = double(i) / (n - 1);
    arc.X.col(i) = Eigen::Vector3d(t, 0.0, 0.0);
    arc.sigma.col(i) = Eigen::Vector3d(0.0, 0.0, 1.0);
  }
  m.arcs.push_back(arc);
  auto vals = generalized_differential(m);
  CHECK(std::abs(vals[0](0, 7) - Complex(1.0, 0.0)) < 1e-9);
  CHECK(std::abs(vals[0](1, 7) - Complex(0.0, 1.0)) < 1e-9);
  for (int i = 0; i < n; ++i) {
    Complex iso = vals[0](0, i) * vals[0](0, i) + vals[0](1, i) * vals[0](1, i) +
                  vals[0](2, i) * vals[0](2, i);
    CHECK(std::abs(iso) < 1e-10);
  }
}

TEST_CASE("generalized differential: degenerate sample raises NotRegular") {
  MarkedCurveData m;
  MarkedArc arc;
  arc.X = Eigen::Matrix3Xd::Zero(3, 64);  // constant curve
  arc.sigma = Eigen::Matrix3Xd::Zero(3, 64);
  arc.sigma.row(2).setOnes();
  m.arcs.push_back(arc);
  CHECK_THROWS_AS((void)generalized_differential(m), Error);
}

TEST_CASE("sup norms: identity, translation, normal rotation") {
  MarkedSamples a;
  a.X.push_back(Eigen::Matrix3Xd::Random(3, 40));
  a.N.push_back(Eigen::Matrix3Xd::Zero(3, 40));
  a.N[0].row(2).setOnes();

  MarkedSamples b = a;
  auto [c0, c1] = sup_norms(a, b);
  CHECK(c0 == 0.0);
  CHECK(c1 == 0.0);

  const double h = 0.37;
  b.X[0].row(2).array() += h;
  auto [t0, t1] = sup_norms(a, b);
  CHECK(std::abs(t0 - h) < 1e-14);
  CHECK(std::abs(t1 - h) < 1e-14);

  b = a;
  const double th = 0.4;
  for (int i = 0; i < 40; ++i)
    b.N[0].col(i) = Eigen::Vector3d(0.0, std::sin(th), std::cos(th));
  auto [r0, r1] = sup_norms(a, b);
  CHECK(r0 == 0.0);
  CHECK(std::abs(r1 - 2 * std::sin(th / 2)) < 1e-12);

  b.X.push_back(Eigen::Matrix3Xd::Zero(3, 5));
  CHECK_THROWS_AS((void)sup_norms(a, b), Error);
}

TEST_CASE("property: removing an arc keeps admissibility") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int tested = 0;
  for (int trial = 0; trial < 12 && tested < 8; ++trial) {
    SceneModel sc;
    double r0 = 0.6 + 0.5 * u(rng);
    sc.sets.regions.push_back({Complex(0.0), r0, {}});
    double ang = 2 * kPi * u(rng);
    Complex dir(std::cos(ang), std::sin(ang));
    Complex q1 = (3.0 + u(rng)) * dir;
    sc.sets.arcs.push_back(make_segment_arc(r0 * dir, q1 - 0.7 * dir));
    sc.sets.arcs.push_back(make_circle_arc(q1, 0.7));
    sc.sphere.exterior_punctures.push_back(ExtendedPoint(q1));
    sc.sphere.exterior_punctures.push_back(ExtendedPoint::infinity());
    auto rep = validate_admissible(sc.sets, sc.sphere);
    if (!rep.admissible()) continue;
    ++tested;
    AdmissibleSet smaller = sc.sets;
    smaller.arcs.erase(smaller.arcs.begin() + static_cast<long>(rng() % smaller.arcs.size()));
    auto rep2 = validate_admissible(smaller, sc.sphere);
    CHECK(rep2.admissible());
  }
  CHECK(tested >= 8);
}

TEST_CASE("scene JSON round-trips bit-exact keys") {
  SceneModel sc = two_face_scene();
  sc.sphere.interior_ends.push_back(ExtendedPoint(Complex(0.1, -0.2)));
  sc.sets.regions[0].contained_ends.push_back(0);
  std::string text = scene_to_json(sc);
  CHECK(text.find("\"interior_ends\"") != std::string::npos);
  CHECK(text.find("\"exterior_punctures\"") != std::string::npos);
  CHECK(text.find("\"discs\"") != std::string::npos);
  CHECK(text.find("\"arcs\"") != std::string::npos);
  CHECK(text.find("\"inf\"") != std::string::npos);
  SceneModel back = scene_from_json(text);
  CHECK(back.sphere.exterior_punctures.size() == 2);
  CHECK(back.sphere.exterior_punctures[1].infinite);
  CHECK(back.sets.regions.size() == 1);
  CHECK(back.sets.arcs.size() == 2);
  CHECK(std::abs(arc_point(back.sets.arcs[0], 0.5) - arc_point(sc.sets.arcs[0], 0.5)) < 1e-15);
  // Round-trip of the dump is identical text.
  CHECK(scene_to_json(back) == text);
}

TEST_CASE("circle arc closes to polynomial-truncation accuracy") {
  AnalyticArc a = make_circle_arc(Complex(1.0, 2.0), 0.8);
  CHECK(std::abs(arc_point(a, 0.0) - arc_point(a, 1.0)) < 1e-10);
  CHECK(std::abs(std::abs(arc_point(a, 0.37) - Complex(1.0, 2.0)) - 0.8) < 1e-10);
  CHECK(std::abs(arc_derivative(a, 0.5)) > 1.0);
}
