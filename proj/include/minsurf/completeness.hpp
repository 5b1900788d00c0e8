#pragma once

#include <functional>

#include "minsurf/period_solver.hpp"
#include "minsurf/runge.hpp"
#include "minsurf/weierstrass.hpp"

namespace minsurf {

struct Annulus {
  Complex center;
  double r_in = 0.0;
  double r_out = 0.0;
};

// Concentric rings of mutually overlapping discs with one navigable gap per
// ring, gap directions alternating, so a crossing path either enters a disc
// or winds half a turn per level.
struct Labyrinth {
  std::vector<DiscRegion> discs;
  std::vector<int> ring_of;
  Annulus collar;
  int levels = 0;
  double disc_radius = 0.0;
  double clearance = 0.0;
  double influence_radius = 0.0;
};

Labyrinth build_labyrinth(const AdmissibleSet& s, const Annulus& collar, int levels);

// phi1 = e^{-h} eta1/2 - e^{h} eta2/2 (and friends); phi3 is untouched.
struct TwistedData {
  SpinorPair base;
  RationalMap h;

  Complex phi(int j, Complex z) const;       // phi_j / dz at z
  double density(Complex z) const;           // conformal factor of the metric
  Eigen::Vector3d normal(Complex z) const;   // unit normal via the Gauss map
};

TwistedData apply_twist(const SpinorPair& sp, const RationalMap& h);

struct DistanceCertificate {
  double bound = 0.0;    // Richardson-extrapolated graph distance
  double coarse = 0.0;   // raw value on the base grid
  double fine = 0.0;     // raw value on the 2x grid
  int grid_r = 0;
  int grid_t = 0;
  std::vector<Complex> witness;  // minimizing discrete path on the fine grid
};

// Shortest path across the annulus (inner ring to outer ring) on an
// 8-connected polar grid with edge weights density * length, refined once.
DistanceCertificate intrinsic_distance(const std::function<double(Complex)>& density,
                                       const Annulus& collar, int grid_r = 96, int grid_t = 256);
// Rational-data overload; throws PoleInCollar when data poles sit inside.
DistanceCertificate intrinsic_distance(const WeierstrassTriple& w, const Annulus& collar,
                                       int grid_r = 96, int grid_t = 256);
DistanceCertificate intrinsic_distance(const TwistedData& t, const Annulus& collar,
                                       int grid_r = 96, int grid_t = 256);

struct BoostOptions {
  double collar_inner_factor = 1.35;
  double collar_outer_factor = 2.7;
  int levels = 3;
  int max_levels = 6;
  double m_start = 8.0;
  double m_max = 2e5;
  int grid_r = 96;
  int grid_t = 256;
};

struct BoostResult {
  TwistedData data;
  DistanceCertificate certificate;
  ClosureResult reclosure;
  Labyrinth labyrinth;
  double twist_m = 0.0;
  double sup_h_on_S = 0.0;
  double drift_c1 = 0.0;     // change on S against the untwisted input
  double drift_constant = 0.0;  // measured K with drift <= K sup_S|h|
  int levels = 0;
};

// Escalates (levels, twist magnitude) until the certificate reaches C while
// the C1 change on S stays below epsilon; the periods of the twisted family
// are re-closed by the quadrature period system (residues are unavailable
// once e^{h} enters).  Throws BoostFailed with the best certificate reached.
BoostResult completeness_boost(const SpinorPair& closed, const SceneModel& scene,
                               const CycleBasis& cycles, const EndData& ends,
                               const std::vector<Eigen::Vector3d>& q, double C, double epsilon,
                               BoostOptions opt = {});

}  // namespace minsurf
