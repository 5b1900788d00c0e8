#include "minsurf/runge.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace minsurf {

namespace {

// Taylor coefficients a_0..a_k of f at a finite regular point p.
std::vector<Complex> taylor_jet(const RationalMap& f, Complex p, int k) {
  Poly ns = taylor_shift(f.num, p);
  Poly ds = taylor_shift(f.den, p);
  if (std::abs(eval(f.den, p)) <= 1e-12 * (1.0 + coeff_sup(ds)))
    throw Error(Err::PoleAtSample, "jet requested at a pole");
  std::vector<Complex> out(k + 1);
  auto a = [&](int i) { return i < static_cast<int>(ns.c.size()) ? ns.c[i] : Complex(0.0); };
  auto b = [&](int i) { return i < static_cast<int>(ds.c.size()) ? ds.c[i] : Complex(0.0); };
  for (int i = 0; i <= k; ++i) {
    Complex acc = a(i);
    for (int j = 0; j < i; ++j) acc -= out[j] * b(i - j);
    out[i] = acc / b(0);
  }
  return out;
}

struct BasisElement {
  // scale^order (z - pole)^(-order) for finite poles,
  // ((z - center)/scale)^order at infinity, 1 for order 0.  The affine
  // rescaling keeps every column of order unity on the samples, which is
  // what makes high degrees solvable at all.
  ExtendedPoint pole;
  int order = 0;
  Complex center{0.0, 0.0};
  double scale = 1.0;

  Complex value(Complex z) const {
    if (order == 0) return Complex(1.0);
    if (pole.infinite) return std::pow((z - center) / scale, order);
    return std::pow(scale / (z - pole.z), order);
  }
  // Taylor coefficient of order k at the point p.
  Complex jet(Complex p, int k) const {
    if (order == 0) return k == 0 ? Complex(1.0) : Complex(0.0);
    if (pole.infinite) {
      if (k > order) return Complex(0.0);
      double c = 1.0;
      for (int i = 0; i < k; ++i) c *= static_cast<double>(order - i) / (i + 1);
      return c * std::pow((p - center) / scale, order - k) * std::pow(scale, -k);
    }
    double c = 1.0;
    for (int i = 0; i < k; ++i) c *= static_cast<double>(-order - i) / (i + 1);
    return c * std::pow(scale / (p - pole.z), order) * std::pow(p - pole.z, -k);
  }
};

std::vector<BasisElement> build_basis(const PoleBudget& pb, int degree,
                                      const std::vector<Complex>& samples) {
  Complex centroid(0.0, 0.0);
  for (Complex z : samples) centroid += z;
  if (!samples.empty()) centroid /= static_cast<double>(samples.size());
  double radius = 1.0;
  for (Complex z : samples) radius = std::max(radius, std::abs(z - centroid));

  std::vector<BasisElement> basis;
  basis.push_back({ExtendedPoint(Complex(0.0)), 0, centroid, 1.0});  // the constant
  for (const auto& e : pb.poles) {
    int cap = std::min(e.max_order, degree);
    double scale = 1.0;
    if (e.pole.infinite) {
      scale = radius;
    } else {
      double dist = 1e300;
      for (Complex z : samples) dist = std::min(dist, std::abs(z - e.pole.z));
      scale = std::max(dist, 1e-6);
    }
    for (int k = 1; k <= cap; ++k) basis.push_back({e.pole, k, centroid, scale});
  }
  return basis;
}

// Assembles the approximant into a single rational map over the common
// denominator prod (z - p)^cap.
RationalMap assemble(const std::vector<BasisElement>& basis, const Eigen::VectorXcd& coeff) {
  std::vector<std::pair<Complex, int>> pole_caps;
  for (const auto& b : basis) {
    if (b.order == 0 || b.pole.infinite) continue;
    bool found = false;
    for (auto& [p, c] : pole_caps)
      if (std::abs(p - b.pole.z) < 1e-14) {
        c = std::max(c, b.order);
        found = true;
      }
    if (!found) pole_caps.push_back({b.pole.z, b.order});
  }
  Poly den = Poly::constant(1.0);
  for (const auto& [p, c] : pole_caps) den = mul(den, from_roots({{p, c}}, Complex(1.0)));
  Poly num = Poly::zero();
  for (size_t j = 0; j < basis.size(); ++j) {
    if (coeff[static_cast<Eigen::Index>(j)] == Complex(0.0)) continue;
    Poly term = Poly::constant(1.0);
    const auto& b = basis[j];
    Complex amplitude = coeff[static_cast<Eigen::Index>(j)];
    if (b.order == 0) {
      term = den;
    } else if (b.pole.infinite) {
      term = mul(den, from_roots({{b.center, b.order}}, Complex(1.0)));
      amplitude *= std::pow(b.scale, -b.order);
    } else {
      for (const auto& [p, c] : pole_caps) {
        int e = (std::abs(p - b.pole.z) < 1e-14) ? c - b.order : c;
        if (e > 0) term = mul(term, from_roots({{p, e}}, Complex(1.0)));
      }
      amplitude *= std::pow(b.scale, b.order);
    }
    num = add(num, scale(term, amplitude));
  }
  if (is_zero(num)) return RationalMap::constant(0.0);
  return {num, den};
}

struct FlatTarget {
  std::vector<Complex> points;
  std::vector<Complex> values;
};

FlatTarget flatten(const TargetFunction& t) {
  FlatTarget ft;
  for (const auto& comp : t.components) {
    if (comp.points.size() != comp.values.size())
      throw Error(Err::GridMismatch, "target component points/values mismatch");
    ft.points.insert(ft.points.end(), comp.points.begin(), comp.points.end());
    ft.values.insert(ft.values.end(), comp.values.begin(), comp.values.end());
  }
  return ft;
}

}  // namespace

bool PoleBudget::allows(const ExtendedPoint& p, double tol) const {
  for (const auto& e : poles)
    if (same_point(e.pole, p, tol)) return true;
  return false;
}

int PoleBudget::max_order_at(const ExtendedPoint& p, double tol) const {
  for (const auto& e : poles)
    if (same_point(e.pole, p, tol)) return e.max_order;
  return 0;
}

PoleBudget budget_from_punctures(const PuncturedSphere& p) {
  PoleBudget pb;
  for (const auto& e : p.exterior_punctures) pb.poles.push_back({e});
  return pb;
}

TargetFunction target_from_rational(const RationalMap& f,
                                    const std::vector<std::vector<Complex>>& sample_sets) {
  TargetFunction t;
  t.rational = f;
  for (const auto& set : sample_sets) {
    TargetFunction::Component comp;
    comp.points = set;
    comp.values.reserve(set.size());
    for (Complex z : set) comp.values.push_back(eval(f, z));
    t.components.push_back(std::move(comp));
  }
  return t;
}

std::vector<std::vector<Complex>> scene_sample_sets(const AdmissibleSet& s, int degree,
                                                    int minimum) {
  const int per = std::max(minimum, 8 * degree);
  std::vector<std::vector<Complex>> sets;
  for (const auto& d : s.regions) sets.push_back(disc_boundary_points(d, per));
  for (const auto& a : s.arcs) sets.push_back(arc_points(a, per));
  return sets;
}

ApproxResult approximate(const TargetFunction& t, const PoleBudget& pb,
                         const DivisorConstraint& dc, int fit_degree) {
  FlatTarget ft = flatten(t);
  std::vector<BasisElement> basis = build_basis(pb, fit_degree, ft.points);
  const int n = static_cast<int>(basis.size());
  const int m = static_cast<int>(ft.points.size());

  int n_cond = 0;
  for (const auto& e : dc.divisor.entries) {
    if (e.order <= 0 || e.point.infinite)
      throw Error(Err::BadBudget, "divisor constraints must be integral and finite");
    n_cond += e.order;
  }
  if (n_cond >= n)
    throw Error(Err::RankDeficient, "constraints (" + std::to_string(n_cond) +
                                        ") exceed basis dimension (" + std::to_string(n) + ")");
  if (m < 2 * n) throw Error(Err::BadBudget, "undersampled fit: need >= 2x samples per column");
  if (n_cond > 0 && !t.rational)
    throw Error(Err::BadBudget, "jet constraints need a rational target");

  Eigen::MatrixXcd A(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = basis[j].value(ft.points[i]);
  Eigen::VectorXcd b(m);
  for (int i = 0; i < m; ++i) b[i] = ft.values[i];

  // Column scaling by sup-norm on the samples.
  Eigen::VectorXd colscale(n);
  for (int j = 0; j < n; ++j) {
    double s = A.col(j).cwiseAbs().maxCoeff();
    colscale[j] = (s > 0) ? s : 1.0;
    A.col(j) /= colscale[j];
  }

  Eigen::VectorXcd coeff;
  double cond_est = 1.0;
  if (n_cond == 0) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-13);
    coeff = svd.solve(b);
    double smin = svd.singularValues()[svd.singularValues().size() - 1];
    if (smin > 0) cond_est = svd.singularValues()[0] / smin;
  } else {
    Eigen::MatrixXcd C(n_cond, n);
    Eigen::VectorXcd d(n_cond);
    int row = 0;
    for (const auto& e : dc.divisor.entries) {
      std::vector<Complex> tj = taylor_jet(*t.rational, e.point.z, e.order - 1);
      for (int k = 0; k < e.order; ++k) {
        for (int j = 0; j < n; ++j) C(row, j) = basis[j].jet(e.point.z, k) / colscale[j];
        d[row] = tj[k];
        ++row;
      }
    }
    // Row scaling keeps mixed jet orders balanced.
    for (int i = 0; i < n_cond; ++i) {
      double s = std::max(C.row(i).cwiseAbs().maxCoeff(), 1e-300);
      C.row(i) /= s;
      d[i] /= s;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(C, Eigen::ComputeThinU | Eigen::ComputeFullV);
    svd.setThreshold(1e-13);
    Eigen::VectorXcd x0 = svd.solve(d);
    if ((C * x0 - d).norm() > 1e-8 * (1.0 + d.norm()))
      throw Error(Err::RankDeficient, "infeasible divisor constraints");
    int rank = static_cast<int>(svd.rank());
    Eigen::MatrixXcd N = svd.matrixV().rightCols(n - rank);
    Eigen::MatrixXcd AN = A * N;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd2(AN, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd2.setThreshold(1e-13);
    Eigen::VectorXcd y = svd2.solve(b - A * x0);
    coeff = x0 + N * y;
    double smin = svd2.singularValues()[svd2.singularValues().size() - 1];
    if (smin > 0) cond_est = svd2.singularValues()[0] / smin;
  }

  ApproxResult out;
  out.report.basis_size = n;
  out.report.samples = m;
  out.report.condition_estimate = cond_est;
  out.report.sup_error = (A * coeff - b).cwiseAbs().maxCoeff();

  Eigen::VectorXcd unscaled = coeff.cwiseQuotient(colscale.cast<Complex>());
  out.f = assemble(basis, unscaled);

  // Post-hoc constraint residual on the assembled map.
  double cres = 0.0;
  for (const auto& e : dc.divisor.entries) {
    std::vector<Complex> fj = taylor_jet(out.f, e.point.z, e.order - 1);
    std::vector<Complex> tj = taylor_jet(*t.rational, e.point.z, e.order - 1);
    for (int k = 0; k < e.order; ++k)
      cres = std::max(cres, std::abs(fj[k] - tj[k]) / (1.0 + std::abs(tj[k])));
  }
  out.report.constraint_residual = cres;
  return out;
}

ApproxResult approximate_with_escalating_poles(const TargetFunction& t, const PoleBudget& pb,
                                               const DivisorConstraint& dc, int fit_degree,
                                               const std::vector<MinOrder>& min_orders) {
  for (const auto& mo : min_orders) {
    if (!pb.allows(mo.pole))
      throw Error(Err::BadBudget, "minimum order demanded at a disallowed pole");
    if (mo.order > pb.max_order_at(mo.pole))
      throw Error(Err::BadBudget, "minimum order exceeds the budget cap");
  }
  ApproxResult res = approximate(t, pb, dc, fit_degree);

  Poly pdc = Poly::constant(1.0);
  for (const auto& e : dc.divisor.entries)
    pdc = mul(pdc, from_roots({{e.point.z, e.order}}, Complex(1.0)));
  FlatTarget ft = flatten(t);

  for (const auto& mo : min_orders) {
    if (mo.order <= 0) continue;
    int have = is_zero(res.f) ? 0 : -order_at(res.f, mo.pole);
    if (have >= mo.order) continue;
    // Constraint-respecting correction with the demanded pole order.
    RationalMap corr;
    if (mo.pole.infinite) {
      int k = std::max(mo.order, degree(pdc) + 1) - degree(pdc);
      corr = RationalMap(mul(pdc, Poly::monomial(1.0, k)), Poly::constant(1.0));
    } else {
      int k = std::max(mo.order, degree(pdc));
      corr = RationalMap(pdc, from_roots({{mo.pole.z, k}}, Complex(1.0)));
    }
    double sup_c = 0.0;
    for (Complex z : ft.points) sup_c = std::max(sup_c, std::abs(eval(corr, z)));
    double eps = std::clamp(0.01 * res.report.sup_error, 1e-13, 1e-6) / std::max(sup_c, 1e-300);
    for (int tries = 0; tries < 4; ++tries) {
      RationalMap cand = add(res.f, scale(corr, Complex(eps)));
      if (-order_at(cand, mo.pole) >= mo.order) {
        res.f = cand;
        res.report.sup_error += eps * sup_c;
        break;
      }
      eps *= 1.618;
    }
  }
  return res;
}

ApproxResult twist_function(const AdmissibleSet& s, const PuncturedSphere& p,
                            const std::vector<DiscRegion>& labyrinth_discs, double m,
                            const DivisorConstraint& end_divisor) {
  if (m <= 0) throw Error(Err::BadConfig, "twist magnitude must be positive");
  // Labyrinth discs must stay clear of S.
  for (const auto& ld : labyrinth_discs) {
    for (const auto& d : s.regions)
      if (std::abs(ld.center - d.center) <= ld.radius + d.radius)
        throw Error(Err::BadConfig, "labyrinth disc overlaps a region of S");
    for (const auto& a : s.arcs)
      for (Complex z : arc_points(a, std::max(a.n_samples, 128)))
        if (std::abs(z - ld.center) <= ld.radius)
          throw Error(Err::BadConfig, "labyrinth disc overlaps an arc of S");
  }
  PoleBudget pb = budget_from_punctures(p);
  const double bound = 1.0 / m;

  double best_s = 1e300, best_l = 1e300;
  ApproxResult best;
  for (int deg = 12; deg <= 96; deg = deg + std::max(8, deg / 2)) {
    TargetFunction t;
    t.rational = RationalMap::constant(0.0);  // jets at the end divisor are zero
    for (auto& set : scene_sample_sets(s, deg)) {
      TargetFunction::Component comp;
      comp.values.assign(set.size(), Complex(0.0));
      comp.points = std::move(set);
      t.components.push_back(std::move(comp));
    }
    int per = std::max(24, 8 * deg / std::max<int>(1, static_cast<int>(labyrinth_discs.size())));
    for (const auto& ld : labyrinth_discs) {
      TargetFunction::Component comp;
      comp.points = disc_boundary_points(ld, per);
      comp.points.push_back(ld.center);
      comp.values.assign(comp.points.size(), Complex(m));
      t.components.push_back(std::move(comp));
    }
    ApproxResult res;
    try {
      res = approximate(t, pb, end_divisor, deg);
    } catch (const Error& e) {
      if (e.kind == Err::RankDeficient) continue;  // tiny degree cannot host the constraints
      throw;
    }

    // Dense verification of the two sup bounds.
    double sup_s = 0.0;
    for (const auto& set : scene_sample_sets(s, 2 * deg))
      for (Complex z : set) sup_s = std::max(sup_s, std::abs(eval(res.f, z)));
    double sup_l = 0.0;
    for (const auto& ld : labyrinth_discs)
      for (Complex z : disc_boundary_points(ld, 2 * per))
        sup_l = std::max(sup_l, std::abs(eval(res.f, z) - m));
    if (sup_s + sup_l < best_s + best_l) {
      best = res;
      best_s = sup_s;
      best_l = sup_l;
    }
    if (sup_s < bound && sup_l < bound) {
      best.report.sup_error = std::max(sup_s, sup_l);
      return best;
    }
  }
  throw Error(Err::BudgetExhausted,
              "twist bounds unreachable: sup_S=" + std::to_string(best_s) +
                  " sup_L=" + std::to_string(best_l) + " target=" + std::to_string(bound));
}

}  // namespace minsurf
