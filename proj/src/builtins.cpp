#include "minsurf/builtins.hpp"

#include <cmath>
#include <numbers>

namespace minsurf {

namespace {
constexpr double kPi = std::numbers::pi;
}  // namespace

SpinorPair catenoid_data() {
  OneForm eta1(RationalMap(Poly::constant(1.0), Poly::monomial(1.0, 2)));
  return make_spinor_pair(std::move(eta1), RationalMap::identity());
}

SpinorPair enneper_data() {
  OneForm eta1(RationalMap::constant(1.0));
  return make_spinor_pair(std::move(eta1), RationalMap::identity());
}

SpinorPair planar_data() {
  OneForm eta1(RationalMap::constant(1.0));
  return make_spinor_pair(std::move(eta1), RationalMap::constant(1.0));
}

Eigen::Vector3d unit_normal(Complex g) {
  double n2 = std::norm(g);
  if (!std::isfinite(n2) || n2 > 1e24) return {0.0, 0.0, 1.0};
  return Eigen::Vector3d(2.0 * g.real(), 2.0 * g.imag(), n2 - 1.0) / (1.0 + n2);
}

MarkedCurveData sample_marked_data(const SceneModel& scene, const WeierstrassTriple& w,
                                   Complex base_point) {
  RationalMap g = gauss_map_of(w);
  MarkedCurveData out;
  for (const auto& arc : scene.sets.arcs) {
    const int n = std::max(arc.n_samples, 64);
    MarkedArc m;
    m.X.resize(3, n);
    m.sigma.resize(3, n);
    Complex prev = base_point;
    Eigen::Vector3d acc = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i) {
      Complex z = arc_point(arc, double(i) / (n - 1));
      acc += immerse(w, prev, z);
      prev = z;
      m.X.col(i) = acc;
      m.sigma.col(i) = unit_normal(eval(g, z));
    }
    out.arcs.push_back(std::move(m));
  }
  return out;
}

SceneSampler make_scene_sampler(const SceneModel& scene, int per_disc, int per_arc) {
  SceneSampler s;
  for (const auto& d : scene.sets.regions) {
    s.part_offsets.push_back(static_cast<int>(s.points.size()));
    for (Complex z : disc_boundary_points(d, per_disc)) s.points.push_back(z);
    // Two interior rings keep the sup over the region honest without a full
    // area grid; holomorphic errors peak on the boundary anyway.
    for (double frac : {0.5, 0.8}) {
      DiscRegion inner{d.center, frac * d.radius, {}};
      for (Complex z : disc_boundary_points(inner, per_disc / 2)) {
        bool near_end = false;
        for (int idx : d.contained_ends) {
          const auto& e = scene.sphere.interior_ends[idx];
          if (!e.infinite && std::abs(z - e.z) < 0.25 * d.radius) near_end = true;
        }
        if (!near_end) s.points.push_back(z);
      }
    }
  }
  for (const auto& a : scene.sets.arcs) {
    s.part_offsets.push_back(static_cast<int>(s.points.size()));
    for (Complex z : arc_points(a, per_arc)) s.points.push_back(z);
  }
  return s;
}

MarkedSamples evaluate_on_samples(const SceneSampler& sampler, const WeierstrassTriple& w,
                                  Complex base_point, Eigen::Vector3d base_value) {
  RationalMap g = gauss_map_of(w);
  MarkedSamples out;
  Eigen::Matrix3Xd X(3, sampler.points.size());
  Eigen::Matrix3Xd N(3, sampler.points.size());
  Complex prev = base_point;
  Eigen::Vector3d acc = base_value;
  for (size_t i = 0; i < sampler.points.size(); ++i) {
    Complex z = sampler.points[i];
    acc += immerse(w, prev, z);
    prev = z;
    X.col(static_cast<Eigen::Index>(i)) = acc;
    N.col(static_cast<Eigen::Index>(i)) = unit_normal(eval(g, z));
  }
  out.X.push_back(std::move(X));
  out.N.push_back(std::move(N));
  return out;
}

BuiltinScene builtin_scene(const std::string& name) {
  BuiltinScene b;
  b.name = name;
  if (name == "catenoid") {
    // Annular stage around the neck: puncture 0 carries the vertical flux,
    // infinity is the other end.  S = circle |z| = 0.9 joined by a spoke to a
    // disc, so both complementary faces are once-punctured discs.
    const Complex dir = std::exp(Complex(0.0, kPi / 4.0));
    b.scene.sphere.exterior_punctures = {ExtendedPoint(Complex(0.0)), ExtendedPoint::infinity()};
    b.scene.sets.regions.push_back({2.5 * dir, 0.4, {}});
    b.scene.sets.arcs.push_back(make_circle_arc(Complex(0.0), 0.9));
    b.scene.sets.arcs.push_back(make_segment_arc(0.9 * dir, 2.1 * dir));
    b.data = catenoid_data();
    b.base_point = Complex(0.9, 0.0);
  } else if (name == "enneper") {
    // Enneper restriction with both punctures finite, so approximation by
    // maps with poles at the punctures is a genuine Runge problem.
    const Complex dir = std::exp(Complex(0.0, kPi / 6.0));
    const Complex q1 = 3.0 * dir;
    b.scene.sphere.exterior_punctures = {ExtendedPoint(q1), ExtendedPoint(Complex(-3.0, 0.0))};
    b.scene.sets.regions.push_back({Complex(0.0), 0.9, {}});
    b.scene.sets.arcs.push_back(make_segment_arc(0.9 * dir, 2.2 * dir));
    b.scene.sets.arcs.push_back(make_circle_arc(q1, 0.8));
    b.data = enneper_data();
    b.base_point = Complex(0.0);
  } else if (name == "planar-disc") {
    b.scene.sphere.exterior_punctures = {ExtendedPoint::infinity()};
    b.scene.sets.regions.push_back({Complex(0.0), 1.0, {}});
    b.data = planar_data();
    b.base_point = Complex(0.0);
  } else {
    throw Error(Err::BadConfig, "unknown builtin scene: " + name);
  }
  if (name != "planar-disc") {
    WeierstrassTriple w = spinor_to_weierstrass(b.data);
    b.scene.marked = sample_marked_data(b.scene, w, b.base_point);
  }
  return b;
}

}  // namespace minsurf
