#pragma once

#include <optional>
#include <vector>

#include "minsurf/rational.hpp"
#include "minsurf/scene.hpp"

namespace minsurf {

// Poles the approximants may use.  The Runge condition (an allowed pole in
// every bounded complementary face) holds automatically when the allowed
// poles include all exterior punctures of a validated scene.
struct PoleBudget {
  struct Entry {
    ExtendedPoint pole;
    int max_order = 1 << 20;
  };
  std::vector<Entry> poles;

  bool allows(const ExtendedPoint& p, double tol = 1e-9) const;
  int max_order_at(const ExtendedPoint& p, double tol = 1e-9) const;
};

PoleBudget budget_from_punctures(const PuncturedSphere& p);

// Integral divisor D with support inside the regions: the approximant must
// match the target's jet to order D at each support point.
struct DivisorConstraint {
  Divisor divisor;
};

// Values on explicit sample sets, optionally backed by a rational generator
// (required whenever jet constraints are imposed).
struct TargetFunction {
  struct Component {
    std::vector<Complex> points;
    std::vector<Complex> values;
  };
  std::vector<Component> components;
  std::optional<RationalMap> rational;
};

TargetFunction target_from_rational(const RationalMap& f,
                                    const std::vector<std::vector<Complex>>& sample_sets);
// Sample sets for S itself: disc boundaries and arcs, >= 8*degree points per
// region (oversampling factor >= 4 over the basis size).
std::vector<std::vector<Complex>> scene_sample_sets(const AdmissibleSet& s, int degree,
                                                    int minimum = 96);

struct ErrorReport {
  double sup_error = 0.0;            // sup |f - t| over the samples
  double constraint_residual = 0.0;  // worst jet mismatch after solving
  int basis_size = 0;
  int samples = 0;
  double condition_estimate = 1.0;
  bool stagnated = false;
};

struct ApproxResult {
  RationalMap f;
  ErrorReport report;
};

// Least-squares fit in the pole basis {1} u {(z-p)^-k} u {z^k at infinity},
// columns scaled to unit sup-norm on the samples, divisor constraints
// imposed exactly through a null-space projection.
ApproxResult approximate(const TargetFunction& t, const PoleBudget& pb,
                         const DivisorConstraint& dc, int fit_degree);

// As approximate, and afterwards forces pole order >= min_orders[i] at
// designated poles by adding a tiny constraint-respecting high-order term.
struct MinOrder {
  ExtendedPoint pole;
  int order = 0;
};
ApproxResult approximate_with_escalating_poles(const TargetFunction& t, const PoleBudget& pb,
                                               const DivisorConstraint& dc, int fit_degree,
                                               const std::vector<MinOrder>& min_orders);

// Twist function for the completeness phase: |h| < 1/m on S, |h - m| < 1/m on
// the labyrinth discs, (h)_0 >= end_divisor.  Escalates the fit degree until
// the two sup bounds hold; throws BudgetExhausted with the achieved bounds.
ApproxResult twist_function(const AdmissibleSet& s, const PuncturedSphere& p,
                            const std::vector<DiscRegion>& labyrinth_discs, double m,
                            const DivisorConstraint& end_divisor);

}  // namespace minsurf
