#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "minsurf/rational.hpp"
#include "minsurf/scene.hpp"

namespace minsurf {

// Spinorial data (eta1, eta2, g) with eta2 = g^2 eta1.
struct SpinorPair {
  OneForm eta1;
  OneForm eta2;
  RationalMap g;
};

// Builds the pair from eta1 and g so the square relation holds exactly.
SpinorPair make_spinor_pair(OneForm eta1, RationalMap g);
// Validates eta2 = g^2 eta1 at sample points (throws InconsistentSpinor).
SpinorPair make_spinor_pair(OneForm eta1, OneForm eta2, RationalMap g);

struct WeierstrassTriple {
  std::array<OneForm, 3> phi;
};

// (1/2 (eta1 - eta2), i/2 (eta1 + eta2), g eta1); the third coordinate uses
// g eta1 so no square-root branch is ever taken.
WeierstrassTriple spinor_to_weierstrass(const SpinorPair& sp);

// eta1 = phi1 - i phi2 and eta2 = -phi1 - i phi2 recover the spinor forms.
OneForm eta1_of(const WeierstrassTriple& w);
OneForm eta2_of(const WeierstrassTriple& w);
RationalMap gauss_map_of(const WeierstrassTriple& w);

// Pole orders of phi_3 at the interior ends; all must exceed 1.
struct EndData {
  std::vector<int> pole_orders;
};
EndData compute_end_data(const WeierstrassTriple& w, const PuncturedSphere& p);

// Conformal factor lambda with ds = lambda |dz|; evaluated through
// lambda = (|eta1/dz| + |eta2/dz|) / 2, which is finite wherever the data is.
struct MetricField {
  RationalMap u;  // eta1 / dz
  RationalMap v;  // eta2 / dz
  double density(Complex z) const;
};
MetricField make_metric(const WeierstrassTriple& w);
// Throws PoleAtSample at poles and BranchPoint where lambda vanishes.
double metric_density(const WeierstrassTriple& w, Complex z);

// Gauss curvature -(4 |dg| |g| / (|phi3| (1+|g|^2)^2))^2, evaluated through
// the reduced rational g' g / (phi3/dz) so 0/0 points cancel exactly; near
// poles of g the equivalent route through 1/g and h/g^4 takes over.
struct CurvatureField {
  RationalMap h;   // g' g / (phi3/dz)
  RationalMap h2;  // h / g^4
  RationalMap g;
  RationalMap gi;  // 1 / g
  double at(Complex z) const;
};
CurvatureField make_curvature(const WeierstrassTriple& w);
double gauss_curvature(const WeierstrassTriple& w, Complex z);

// Total curvature int K dA.  The integrand collapses to the spherical area
// density -4|g'|^2/(1+|g|^2)^2, integrated over both charts minus 1e-3 discs
// around the ends; Osserman quantization pins the answer to -4 pi deg(g).
struct TotalCurvatureResult {
  double value = 0.0;
  bool converged = false;
  std::vector<double> partials;
};
TotalCurvatureResult total_curvature(const WeierstrassTriple& w, const PuncturedSphere& p);

// Period by exact residue calculus: 2 pi i times the sum of residues at the
// enclosed poles (with winding multiplicity).  Throws PoleOnCycle when the
// cycle runs through a pole.
Complex period(const OneForm& w, const Cycle& c);
// Independent trapezoid quadrature, nodes doubled from 256 until stable.
Complex period_quad(const OneForm& w, const Cycle& c, int min_samples = 256);

struct FluxResult {
  std::vector<Eigen::Vector3d> flux;        // Im of the three periods per cycle
  std::vector<Eigen::Vector3d> real_parts;  // Re parts (all ~0 iff well defined)
  bool well_defined = true;
};
FluxResult flux(const WeierstrassTriple& w, const CycleBasis& basis, double tol = 1e-9);

// Integral of the form along the straight segment [a, b] (adaptive
// Gauss-Legendre); the segment must stay away from poles.
Complex integrate_segment(const OneForm& w, Complex a, Complex b);
// Polygonal path from a to b that detours around the poles of the forms.
std::vector<Complex> pole_avoiding_path(const std::vector<ExtendedPoint>& poles, Complex a,
                                        Complex b);

// Re int_{z0}^{z} (phi_1, phi_2, phi_3) along a pole-avoiding polygonal path.
Eigen::Vector3d immerse(const WeierstrassTriple& w, Complex z0, Complex z);

// Z2 spinor parity of the form around the cycle: parity of the total divisor
// order enclosed; 0 iff sqrt(f) continues single-valuedly around the cycle.
int spinor_parity(const OneForm& w, const Cycle& c);
// The same by numeric branch continuation, as an independent route.
int spinor_parity_continuation(const OneForm& w, const Cycle& c, int samples = 2048);

// Rational one-form whose parity around the circle |z - E_k| = small equals
// parities[k] for the first b-1 exterior punctures, with divisor supported
// only at the punctures (and, when end_orders is nonempty, poles of order
// 2*end_orders[i] at the interior ends).  Always solvable at genus zero.
OneForm spinor_realize(const std::vector<int>& parities, const PuncturedSphere& p,
                       const std::vector<int>& end_orders = {});

}  // namespace minsurf
