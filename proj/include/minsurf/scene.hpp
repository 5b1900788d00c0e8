#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "minsurf/rational.hpp"

namespace minsurf {

// Punctured sphere: interior ends sit inside the regions of S, exterior
// punctures one per complementary face.
struct PuncturedSphere {
  std::vector<ExtendedPoint> interior_ends;
  std::vector<ExtendedPoint> exterior_punctures;
};

struct DiscRegion {
  Complex center;
  double radius = 0.0;
  std::vector<int> contained_ends;  // indices into interior_ends
};

// Polynomial curve t -> beta(t), t in [0,1], regular (beta' nonzero).
struct AnalyticArc {
  Poly control;
  int n_samples = 64;
};

Complex arc_point(const AnalyticArc& a, double t);
Complex arc_derivative(const AnalyticArc& a, double t);
std::vector<Complex> arc_points(const AnalyticArc& a, int count);

// Straight segment from a to b.
AnalyticArc make_segment_arc(Complex a, Complex b, int samples = 96);
// Closed circle as a truncated exponential series; the junction gap is below
// 1e-11 * radius, which is all a polynomial curve can do for a closed
// analytic loop.
AnalyticArc make_circle_arc(Complex center, double radius, int samples = 192);

struct AdmissibleSet {
  std::vector<DiscRegion> regions;
  std::vector<AnalyticArc> arcs;
};

// Violations are prefixed "admissibility:" (Definition-2.3 level: geometry
// and bounded complementary components) or "hypothesis:" (the stronger
// once-punctured-disc/connected-S requirements of the main construction).
struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  bool admissible() const {
    for (const auto& v : violations)
      if (v.rfind("admissibility:", 0) == 0) return false;
    return true;
  }
};

// Closed cycle: an exact circle or a sampled loop.
struct Cycle {
  bool is_circle = true;
  Complex center;
  double radius = 0.0;
  std::vector<Complex> loop;  // used when !is_circle; closed implicitly

  static Cycle circle(Complex c, double r) {
    Cycle cy;
    cy.center = c;
    cy.radius = r;
    return cy;
  }
  static Cycle sampled(std::vector<Complex> pts) {
    Cycle cy;
    cy.is_circle = false;
    cy.loop = std::move(pts);
    return cy;
  }
};

int winding_number(const Cycle& c, Complex z);
// Discrete angle-sum winding number; for circles both routes must agree.
int winding_number_discrete(const Cycle& c, Complex z, int samples = 512);
double cycle_distance(const Cycle& c, Complex z);

struct CycleBasis {
  std::vector<Cycle> cycles;
  int varsigma0 = 0;  // 3 * (b - 1) at genus zero
};

// Sampled map and unit normal field along one arc (columns are samples).
struct MarkedArc {
  Eigen::Matrix3Xd X;
  Eigen::Matrix3Xd sigma;
};

struct MarkedCurveData {
  std::vector<MarkedArc> arcs;
};

// Sampled (map, normal) pairs on a common grid; the unit of comparison for
// the C0/C1 norms.
struct MarkedSamples {
  std::vector<Eigen::Matrix3Xd> X;
  std::vector<Eigen::Matrix3Xd> N;
};

struct SceneModel {
  PuncturedSphere sphere;
  AdmissibleSet sets;
  std::optional<MarkedCurveData> marked;
};

double scene_diameter(const AdmissibleSet& s, const PuncturedSphere& p);

// Definition-2.3 admissibility plus the complementary-face hypothesis: every
// face of the sphere-complement of S holds exactly one exterior puncture and
// S is connected.  Report-valued; empty report means valid.
ValidationReport validate_admissible(const AdmissibleSet& s, const PuncturedSphere& p);

// One circle around each exterior puncture except the last, radius half the
// distance to the nearest other feature.  Throws GeometryTooTight when the
// margin collapses; infinity, when present, must be the last puncture.
CycleBasis build_cycle_basis(const AdmissibleSet& s, const PuncturedSphere& p);

// d/dt derivative of sampled arc data (6th-order interior stencils).
Eigen::Matrix3Xd sampled_derivative(const Eigen::Matrix3Xd& X);

// The complex covector (X o beta)' + i sigma ^ (X o beta)' per sample; its
// three components are isotropic exactly when sigma is normal to the curve.
std::vector<Eigen::Matrix3Xcd> generalized_differential(const MarkedCurveData& m);

// (sup |X_a - X_b|, that plus sup |N_a - N_b|): the C0 and C1 scene norms.
std::pair<double, double> sup_norms(const MarkedSamples& a, const MarkedSamples& b);

// Uniformly spaced points on the boundary circle of a disc.
std::vector<Complex> disc_boundary_points(const DiscRegion& d, int count);

}  // namespace minsurf
