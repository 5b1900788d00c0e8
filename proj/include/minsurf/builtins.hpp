#pragma once

#include <string>

#include "minsurf/scene.hpp"
#include "minsurf/weierstrass.hpp"

namespace minsurf {

// A ready-to-run scene: geometry, initial spinor data, and the anchor point
// used to pin the immersion's additive constant.
struct BuiltinScene {
  std::string name;
  SceneModel scene;
  SpinorPair data;
  Complex base_point;
};

SpinorPair catenoid_data();
SpinorPair enneper_data();
SpinorPair planar_data();

// catenoid | enneper | planar-disc.  The catenoid sits on the twice-punctured
// sphere {0, inf}; the Enneper restriction lives inside a scene whose two
// punctures are both finite so its data is genuinely outside the pole budget.
BuiltinScene builtin_scene(const std::string& name);

// Unit normal (stereographic) from the Gauss map value.
Eigen::Vector3d unit_normal(Complex g_value);

// Samples the immersion and normal along every arc of the scene, anchoring
// X(base_point) = 0; the result is stored as the scene's marked data.
MarkedCurveData sample_marked_data(const SceneModel& scene, const WeierstrassTriple& w,
                                   Complex base_point);

// Evaluation of (X, N) on a standard sample set of S (disc boundaries, inner
// disc rings, arc samples) for the C0/C1 norms.
struct SceneSampler {
  std::vector<Complex> points;      // all sample locations on S
  std::vector<int> part_offsets;    // one part per disc/arc, as offsets
};
SceneSampler make_scene_sampler(const SceneModel& scene, int per_disc = 96, int per_arc = 96);

MarkedSamples evaluate_on_samples(const SceneSampler& sampler, const WeierstrassTriple& w,
                                  Complex base_point, Eigen::Vector3d base_value);

}  // namespace minsurf
