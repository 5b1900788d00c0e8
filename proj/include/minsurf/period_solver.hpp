#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "minsurf/weierstrass.hpp"

namespace minsurf {

// The deformation space: rational maps with zeros of order >= m_i at the
// interior ends and poles confined to the exterior punctures.
struct DeformationSpace {
  Divisor end_constraint;
  std::vector<RationalMap> basis;
};

// Three elements per basis cycle.  Each carries Laurent orders
// mu-1, mu-2, mu-3 at its cycle's puncture (mu = worst pole order of the
// period integrands there, so the residues actually see all three slots) and
// a dump pole at the last puncture with globally distinct orders.  Elements
// are normalized to unit sup-norm on S, which is the norm the trust ball of
// the closure solve lives in.
DeformationSpace build_deformation_basis(const AdmissibleSet& sets, const PuncturedSphere& p,
                                         const CycleBasis& cycles, const SpinorPair& sp,
                                         const EndData& end_data, int size, unsigned salt = 0);

// eta1 <- (1+f)^2 eta1, eta2 <- (1+2f)^2 eta2, g <- g (1+2f)/(1+f); then
// phi3(f) = (1+f)(1+2f) phi3 comes out of spinor_to_weierstrass for free.
SpinorPair deform(const SpinorPair& sp, const RationalMap& f);

// The deformed Weierstrass triple assembled as single quotients over the
// shared denominator, so no numerically matched cancellation ever runs and
// phi3(f)^2 = eta1(f) eta2(f) holds to machine precision.
WeierstrassTriple deform_triple(const SpinorPair& sp, const RationalMap& f);

RationalMap combination(const DeformationSpace& ds, const Eigen::VectorXcd& x);

// Quadratic period map Q(x) = c + A x + B(x,x); row (3*cycle + j) holds the
// period of the deformed phi_j over the cycle minus i q_cycle[j].
struct PeriodSystem {
  int dim = 0;
  Eigen::VectorXcd c;
  Eigen::MatrixXcd A;
  std::vector<Eigen::MatrixXcd> B;
  std::vector<Eigen::Vector3d> q;
  DeformationSpace space;
  SpinorPair base;
  CycleBasis cycles;
  double trust_radius = 0.5;
};

// Exact residue assembly for rational data.
PeriodSystem assemble_period_system(const SpinorPair& sp, const DeformationSpace& ds,
                                    const CycleBasis& cycles, const WeierstrassTriple& reference,
                                    const std::vector<Eigen::Vector3d>& q);

// Quadrature assembly with the exponential twist weights e^{-h}, e^{h}
// multiplying the eta1/eta2 parts (phi3 is untouched by the twist).
PeriodSystem assemble_period_system_quad(const SpinorPair& sp, const DeformationSpace& ds,
                                         const CycleBasis& cycles, const RationalMap& twist,
                                         const std::vector<Eigen::Vector3d>& q,
                                         int min_samples = 1024);

Eigen::VectorXcd eval_period_map(const PeriodSystem& ps, const Eigen::VectorXcd& x);
// Direct route: deform the data by x and integrate, bypassing the tensors.
Eigen::VectorXcd direct_periods(const PeriodSystem& ps, const Eigen::VectorXcd& x,
                                bool quadrature = false);

struct SurjectivityCheck {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool surjective = false;
};
// Smallest singular value of the linearization A = dP|_0; surjective when
// sigma_min > 1e-8 sigma_max (vacuously true in dimension zero).
SurjectivityCheck check_surjectivity(const PeriodSystem& ps);

struct ClosureResult {
  Eigen::VectorXcd solution;
  double residual = 0.0;
  int iterations = 0;
  double jacobian_sigma_min = 0.0;
  std::vector<double> residual_history;
  SpinorPair deformed;
  WeierstrassTriple deformed_triple;
  RationalMap f;
  // Post-hoc verification by oversampled quadrature, not by the tensors.
  double quad_real_residual = 0.0;
  double quad_flux_error = 0.0;
};

// Damped Newton from x = 0 inside the trust ball; residual target 1e-10.
// Throws NoClosure when Newton stalls or leaves the ball.
ClosureResult close_periods(const PeriodSystem& ps);

struct BranchScan {
  std::vector<ExtendedPoint> common_zeros;
  bool degenerate = false;
};
// Common zeros of the deformed pair away from the punctures; an empty list
// certifies an immersion.
BranchScan branch_point_scan(const SpinorPair& deformed, const PuncturedSphere& p);

struct PeriodSolution {
  DeformationSpace space;
  PeriodSystem system;
  ClosureResult closure;
  int retries_used = 0;
};

// Build-check-close-scan loop with basis re-selection, capped at 16 retries.
PeriodSolution solve_period_problem(const AdmissibleSet& sets, const PuncturedSphere& p,
                                    const CycleBasis& cycles, const SpinorPair& sp,
                                    const EndData& end_data,
                                    const std::vector<Eigen::Vector3d>& q, int max_retries = 16);

}  // namespace minsurf
