#include "minsurf/period_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace minsurf {

namespace {
constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

RationalMap linear_factor(Complex root) {
  return RationalMap(Poly({-root, Complex(1.0)}), Poly::constant(1.0));
}

// psi_1 = eta1 - 2 eta2, psi_2 = i(eta1 + 2 eta2), psi_3 = 3 phi3 (linear
// weights); chi_j are the quadratic counterparts.
std::array<OneForm, 3> linear_forms(const SpinorPair& sp) {
  OneForm phi3(mul(sp.g, sp.eta1.f));
  return {OneForm(sub(sp.eta1.f, scale(sp.eta2.f, Complex(2.0)))),
          OneForm(scale(add(sp.eta1.f, scale(sp.eta2.f, Complex(2.0))), kI)),
          OneForm(scale(phi3.f, Complex(3.0)))};
}

std::array<OneForm, 3> quadratic_forms(const SpinorPair& sp) {
  OneForm phi3(mul(sp.g, sp.eta1.f));
  return {OneForm(scale(sub(sp.eta1.f, scale(sp.eta2.f, Complex(4.0))), Complex(0.5))),
          OneForm(scale(add(sp.eta1.f, scale(sp.eta2.f, Complex(4.0))), Complex(0.0, 0.5))),
          OneForm(scale(phi3.f, Complex(2.0)))};
}

int form_pole_order_at(const OneForm& w, const ExtendedPoint& p) {
  if (is_zero(w.f)) return 0;
  return std::max(0, -form_order_at(w, p));
}

}  // namespace

DeformationSpace build_deformation_basis(const AdmissibleSet& sets, const PuncturedSphere& p,
                                         const CycleBasis& cycles, const SpinorPair& sp,
                                         const EndData& end_data, int size, unsigned salt) {
  const int b = static_cast<int>(p.exterior_punctures.size());
  if (b <= 1 || size <= 0) throw Error(Err::EmptyBasis, "trivial scene: nothing to close");
  if (size != 3 * (b - 1)) throw Error(Err::BadConfig, "deformation size must be 3(b-1)");

  DeformationSpace ds;
  std::vector<DivisorEntry> entries;
  Poly constraint = Poly::constant(1.0);
  for (size_t i = 0; i < p.interior_ends.size(); ++i) {
    int m = end_data.pole_orders[i];
    entries.push_back({p.interior_ends[i], m});
    constraint = mul(constraint, from_roots({{p.interior_ends[i].z, m}}, Complex(1.0)));
  }
  ds.end_constraint = make_divisor(std::move(entries), 1e-9);
  RationalMap P(constraint, Poly::constant(1.0));

  std::array<OneForm, 3> psi = linear_forms(sp);
  const auto& last = p.exterior_punctures[b - 1];

  // A generic faraway point for distinctness zeros; zeros are unrestricted in
  // the deformation space, only poles are pinned to the punctures.
  double extent = 1.0;
  for (const auto& e : p.exterior_punctures)
    if (!e.infinite) extent = std::max(extent, std::abs(e.z));
  for (const auto& e : p.interior_ends) extent = std::max(extent, std::abs(e.z));
  Complex far = 7.0 * extent * std::exp(kI * (0.37 + 0.11 * static_cast<double>(salt % 8)));

  const int degP = std::max(0, degree(constraint));
  int max_mu = 0;
  for (int c = 0; c + 1 < b; ++c)
    for (int j = 0; j < 3; ++j)
      max_mu = std::max(max_mu, form_pole_order_at(psi[j], p.exterior_punctures[c]));
  const int dump_base = degP + max_mu + 3 + static_cast<int>(salt % 5);

  for (int c = 0; c + 1 < b; ++c) {
    const auto& q = p.exterior_punctures[c];
    int mu = 0;
    for (int j = 0; j < 3; ++j) mu = std::max(mu, form_pole_order_at(psi[j], q));
    for (int s = 0; s < 3; ++s) {
      int o = mu - 1 - s - static_cast<int>(salt % 3);
      RationalMap f = P;
      if (o >= 0)
        f = mul(f, pow(linear_factor(q.z), o));
      else
        f = div(f, pow(linear_factor(q.z), -o));
      int dump = dump_base + 3 * c + s;
      if (last.infinite) {
        int extra = dump - (degP + o);
        if (extra > 0) f = mul(f, pow(linear_factor(far), extra));
      } else {
        f = div(f, pow(linear_factor(last.z), dump));
      }
      ds.basis.push_back(std::move(f));
    }
  }
  // Unit sup-norm on S (plus the cycle circles, where the periods live).
  std::vector<Complex> norm_pts;
  for (const auto& d : sets.regions)
    for (Complex z : disc_boundary_points(d, 48)) norm_pts.push_back(z);
  for (const auto& a : sets.arcs)
    for (Complex z : arc_points(a, 48)) norm_pts.push_back(z);
  for (const auto& cyc : cycles.cycles)
    for (int k = 0; k < 48; ++k) {
      double th = 2.0 * kPi * k / 48;
      norm_pts.push_back(cyc.center + cyc.radius * Complex(std::cos(th), std::sin(th)));
    }
  for (auto& f : ds.basis) {
    double sup = 0.0;
    for (Complex z : norm_pts) sup = std::max(sup, std::abs(eval(f, z)));
    if (sup > 0.0 && std::isfinite(sup)) f = scale(f, Complex(1.0 / sup));
  }
  return ds;
}

SpinorPair deform(const SpinorPair& sp, const RationalMap& f) {
  // With f = p/q, (1+f) = (q+p)/q and (1+2f) = (q+2p)/q; keeping the shared
  // q out of the quotient g (1+2f)/(1+f) avoids a numerically matched
  // cancellation that would contaminate phi3 = g eta1.
  Poly a_num = trim(add(f.den, f.num));
  Poly b_num = trim(add(f.den, scale(f.num, Complex(2.0))));
  Poly q2 = mul(f.den, f.den);
  SpinorPair out;
  out.eta1 = OneForm(mul(RationalMap(mul(a_num, a_num), q2), sp.eta1.f));
  out.eta2 = OneForm(mul(RationalMap(mul(b_num, b_num), q2), sp.eta2.f));
  // f = -1 (or -1/2) kills a whole spinor form; keep the output well formed
  // so branch_point_scan can flag the degeneracy.
  out.g = is_zero(a_num) ? RationalMap::constant(0.0)
                         : mul(sp.g, RationalMap(b_num, a_num));
  return out;
}

WeierstrassTriple deform_triple(const SpinorPair& sp, const RationalMap& f) {
  Poly aN = trim(add(f.den, f.num));
  Poly bN = trim(add(f.den, scale(f.num, Complex(2.0))));
  Poly q2 = mul(f.den, f.den);
  const Poly& n1 = sp.eta1.f.num;
  const Poly& d1 = sp.eta1.f.den;
  const Poly& n2 = sp.eta2.f.num;
  const Poly& d2 = sp.eta2.f.den;
  Poly t1 = mul(mul(aN, aN), mul(n1, d2));
  Poly t2 = mul(mul(bN, bN), mul(n2, d1));
  Poly den12 = mul(q2, mul(d1, d2));
  WeierstrassTriple w;
  w.phi[0] = OneForm(RationalMap(scale(sub(t1, t2), Complex(0.5)), den12));
  w.phi[1] = OneForm(RationalMap(scale(add(t1, t2), Complex(0.0, 0.5)), den12));
  w.phi[2] = OneForm(RationalMap(mul(mul(aN, bN), mul(sp.g.num, n1)),
                                 mul(q2, mul(sp.g.den, d1))));
  return w;
}

RationalMap combination(const DeformationSpace& ds, const Eigen::VectorXcd& x) {
  RationalMap f = RationalMap::constant(0.0);
  for (size_t j = 0; j < ds.basis.size(); ++j) {
    Complex c = x[static_cast<Eigen::Index>(j)];
    if (c == Complex(0.0)) continue;
    f = add(f, scale(ds.basis[j], c));
  }
  return f;
}

PeriodSystem assemble_period_system(const SpinorPair& sp, const DeformationSpace& ds,
                                    const CycleBasis& cycles, const WeierstrassTriple& reference,
                                    const std::vector<Eigen::Vector3d>& q) {
  if (q.size() != cycles.cycles.size())
    throw Error(Err::BadConfig, "one flux target per basis cycle required");
  PeriodSystem ps;
  ps.dim = static_cast<int>(ds.basis.size());
  ps.space = ds;
  ps.base = sp;
  ps.cycles = cycles;
  ps.q = q;
  const int rows = 3 * static_cast<int>(cycles.cycles.size());
  if (rows != ps.dim) throw Error(Err::BadConfig, "period system must be square");
  ps.c.resize(rows);
  ps.A.resize(rows, ps.dim);
  ps.B.assign(rows, Eigen::MatrixXcd::Zero(ps.dim, ps.dim));

  std::array<OneForm, 3> psi = linear_forms(sp);
  std::array<OneForm, 3> chi = quadratic_forms(sp);

  for (size_t ci = 0; ci < cycles.cycles.size(); ++ci) {
    const Cycle& cyc = cycles.cycles[ci];
    for (int j = 0; j < 3; ++j) {
      int row = 3 * static_cast<int>(ci) + j;
      ps.c[row] = period(reference.phi[j], cyc) - kI * q[ci][j];
      for (int l = 0; l < ps.dim; ++l)
        ps.A(row, l) = period(OneForm(mul(ds.basis[l], psi[j].f)), cyc);
      // f^2 = sum over ordered pairs x_l x_k f_l f_k, so x^T B x needs the
      // full product period in every entry of the symmetric tensor.
      for (int l = 0; l < ps.dim; ++l)
        for (int k = l; k < ps.dim; ++k) {
          Complex v = period(OneForm(mul(mul(ds.basis[l], ds.basis[k]), chi[j].f)), cyc);
          ps.B[row](l, k) = v;
          ps.B[row](k, l) = v;
        }
    }
  }
  return ps;
}

PeriodSystem assemble_period_system_quad(const SpinorPair& sp, const DeformationSpace& ds,
                                         const CycleBasis& cycles, const RationalMap& twist,
                                         const std::vector<Eigen::Vector3d>& q, int min_samples) {
  if (q.size() != cycles.cycles.size())
    throw Error(Err::BadConfig, "one flux target per basis cycle required");
  PeriodSystem ps;
  ps.dim = static_cast<int>(ds.basis.size());
  ps.space = ds;
  ps.base = sp;
  ps.cycles = cycles;
  ps.q = q;
  const int rows = 3 * static_cast<int>(cycles.cycles.size());
  if (rows != ps.dim) throw Error(Err::BadConfig, "period system must be square");
  ps.c = Eigen::VectorXcd::Zero(rows);
  ps.A = Eigen::MatrixXcd::Zero(rows, ps.dim);
  ps.B.assign(rows, Eigen::MatrixXcd::Zero(ps.dim, ps.dim));
  OneForm phi3(mul(sp.g, sp.eta1.f));

  for (size_t ci = 0; ci < cycles.cycles.size(); ++ci) {
    const Cycle& cyc = cycles.cycles[ci];
    if (!cyc.is_circle) throw Error(Err::BadConfig, "quadrature assembly expects circle cycles");

    // One pass per resolution accumulates every tensor entry.
    auto accumulate = [&](int n, Eigen::VectorXcd* cv, Eigen::MatrixXcd* Av,
                          std::vector<Eigen::MatrixXcd>* Bv) {
      cv->setZero(3);
      Av->setZero(3, ps.dim);
      Bv->assign(3, Eigen::MatrixXcd::Zero(ps.dim, ps.dim));
      Eigen::VectorXcd fv(ps.dim);
      for (int s = 0; s < n; ++s) {
        double th = 2.0 * kPi * s / n;
        Complex e(std::cos(th), std::sin(th));
        Complex z = cyc.center + cyc.radius * e;
        Complex dz = kI * cyc.radius * e * (2.0 * kPi / n);
        Complex h = eval(twist, z);
        Complex wm = std::exp(-h), wp = std::exp(h);
        Complex e1 = wm * eval(sp.eta1.f, z);
        Complex e2 = wp * eval(sp.eta2.f, z);
        Complex p3 = eval(phi3.f, z);
        for (int l = 0; l < ps.dim; ++l) fv[l] = eval(ds.basis[l], z);
        Complex base[3] = {0.5 * (e1 - e2), 0.5 * kI * (e1 + e2), p3};
        Complex lin[3] = {e1 - 2.0 * e2, kI * (e1 + 2.0 * e2), 3.0 * p3};
        Complex quad[3] = {0.5 * (e1 - 4.0 * e2), 0.5 * kI * (e1 + 4.0 * e2), 2.0 * p3};
        for (int j = 0; j < 3; ++j) {
          (*cv)[j] += base[j] * dz;
          for (int l = 0; l < ps.dim; ++l) (*Av)(j, l) += lin[j] * fv[l] * dz;
          for (int l = 0; l < ps.dim; ++l)
            for (int k = 0; k < ps.dim; ++k) (*Bv)[j](l, k) += quad[j] * fv[l] * fv[k] * dz;
        }
      }
    };

    Eigen::VectorXcd c1, c2;
    Eigen::MatrixXcd A1, A2;
    std::vector<Eigen::MatrixXcd> B1, B2;
    int n = min_samples;
    accumulate(n, &c1, &A1, &B1);
    for (; n <= 16 * min_samples; n *= 2) {
      accumulate(2 * n, &c2, &A2, &B2);
      double delta = (c2 - c1).cwiseAbs().maxCoeff() + (A2 - A1).cwiseAbs().maxCoeff();
      c1 = c2;
      A1 = A2;
      B1 = B2;
      if (delta <= 1e-10) break;
    }
    for (int j = 0; j < 3; ++j) {
      int row = 3 * static_cast<int>(ci) + j;
      ps.c[row] = c1[j] - kI * q[ci][j];
      ps.A.row(row) = A1.row(j);
      ps.B[row] = B1[j];
    }
  }
  return ps;
}

Eigen::VectorXcd eval_period_map(const PeriodSystem& ps, const Eigen::VectorXcd& x) {
  Eigen::VectorXcd out = ps.c + ps.A * x;
  for (int r = 0; r < static_cast<int>(ps.B.size()); ++r)
    out[r] += (x.transpose() * (ps.B[r] * x))(0, 0);
  return out;
}

Eigen::VectorXcd direct_periods(const PeriodSystem& ps, const Eigen::VectorXcd& x,
                                bool quadrature) {
  WeierstrassTriple w = deform_triple(ps.base, combination(ps.space, x));
  Eigen::VectorXcd out(3 * static_cast<int>(ps.cycles.cycles.size()));
  for (size_t ci = 0; ci < ps.cycles.cycles.size(); ++ci)
    for (int j = 0; j < 3; ++j) {
      Complex p = quadrature ? period_quad(w.phi[j], ps.cycles.cycles[ci], 512)
                             : period(w.phi[j], ps.cycles.cycles[ci]);
      out[3 * static_cast<Eigen::Index>(ci) + j] = p - kI * ps.q[ci][j];
    }
  return out;
}

SurjectivityCheck check_surjectivity(const PeriodSystem& ps) {
  SurjectivityCheck out;
  if (ps.dim == 0) {
    out.sigma_min = out.sigma_max = std::numeric_limits<double>::infinity();
    out.surjective = true;
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(ps.A);
  out.sigma_max = svd.singularValues()[0];
  out.sigma_min = svd.singularValues()[svd.singularValues().size() - 1];
  out.surjective = out.sigma_min > 1e-8 * out.sigma_max;
  return out;
}

ClosureResult close_periods(const PeriodSystem& ps) {
  const int n = ps.dim;
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
  Eigen::VectorXcd F = eval_period_map(ps, x);
  double res = F.norm();
  int it = 0;
  const double target = 1e-10;
  std::string trace = "residuals:";
  std::vector<double> history{res};
  while (res >= target && it < 50) {
    Eigen::MatrixXcd J = ps.A;
    for (int r = 0; r < n; ++r) J.row(r) += 2.0 * (ps.B[r] * x).transpose();
    Eigen::VectorXcd step = J.partialPivLu().solve(-F);
    double lambda = 1.0;
    bool accepted = false;
    for (int half = 0; half < 9; ++half) {
      Eigen::VectorXcd cand = x + lambda * step;
      if (cand.norm() <= ps.trust_radius) {
        Eigen::VectorXcd Fc = eval_period_map(ps, cand);
        if (Fc.norm() < (1.0 - 0.25 * lambda) * res) {
          x = cand;
          F = Fc;
          res = F.norm();
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    ++it;
    history.push_back(res);
    trace += " " + std::to_string(res);
    if (!accepted)
      throw Error(Err::NoClosure, "Newton stalled inside the trust ball; " + trace);
  }
  if (res >= target)
    throw Error(Err::NoClosure, "Newton did not reach the residual target; " + trace);

  ClosureResult out;
  out.solution = x;
  out.residual = res;
  out.iterations = it;
  out.residual_history = std::move(history);
  Eigen::MatrixXcd J = ps.A;
  for (int r = 0; r < n; ++r) J.row(r) += 2.0 * (ps.B[r] * x).transpose();
  if (n > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(J);
    out.jacobian_sigma_min = svd.singularValues()[svd.singularValues().size() - 1];
  }
  out.f = combination(ps.space, x);
  out.deformed = deform(ps.base, out.f);
  out.deformed_triple = deform_triple(ps.base, out.f);

  // Independent oversampled quadrature, deliberately not the tensor route.
  const WeierstrassTriple& w = out.deformed_triple;
  for (size_t ci = 0; ci < ps.cycles.cycles.size(); ++ci)
    for (int j = 0; j < 3; ++j) {
      Complex p = period_quad(w.phi[j], ps.cycles.cycles[ci], 512);
      out.quad_real_residual = std::max(out.quad_real_residual, std::abs(p.real()));
      out.quad_flux_error = std::max(out.quad_flux_error, std::abs(p.imag() - ps.q[ci][j]));
    }
  return out;
}

BranchScan branch_point_scan(const SpinorPair& deformed, const PuncturedSphere& p) {
  BranchScan out;
  if (is_zero(deformed.eta1.f) || is_zero(deformed.eta2.f)) {
    out.degenerate = true;
    return out;
  }
  Divisor d1 = divisor_of_form(deformed.eta1);
  Divisor d2 = divisor_of_form(deformed.eta2);
  auto is_puncture = [&](const ExtendedPoint& z) {
    for (const auto& e : p.exterior_punctures)
      if (same_point(e, z, 1e-7)) return true;
    for (const auto& e : p.interior_ends)
      if (same_point(e, z, 1e-7)) return true;
    return false;
  };
  for (const auto& e1 : d1.entries) {
    if (e1.order <= 0) continue;
    for (const auto& e2 : d2.entries) {
      if (e2.order <= 0) continue;
      if (!same_point(e1.point, e2.point, 1e-7)) continue;
      if (!is_puncture(e1.point)) out.common_zeros.push_back(e1.point);
    }
  }
  return out;
}

PeriodSolution solve_period_problem(const AdmissibleSet& sets, const PuncturedSphere& p,
                                    const CycleBasis& cycles, const SpinorPair& sp,
                                    const EndData& end_data,
                                    const std::vector<Eigen::Vector3d>& q, int max_retries) {
  WeierstrassTriple reference = spinor_to_weierstrass(sp);
  std::string last_issue = "no attempt";
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    DeformationSpace ds;
    try {
      ds = build_deformation_basis(sets, p, cycles, sp, end_data, cycles.varsigma0,
                                   static_cast<unsigned>(attempt));
    } catch (const Error& e) {
      if (e.kind == Err::EmptyBasis) throw;
      last_issue = e.what();
      continue;
    }
    PeriodSystem ps = assemble_period_system(sp, ds, cycles, reference, q);
    SurjectivityCheck sc = check_surjectivity(ps);
    if (!sc.surjective) {
      last_issue = "rank-deficient linearization (sigma_min " + std::to_string(sc.sigma_min) + ")";
      continue;
    }
    ClosureResult cr;
    try {
      cr = close_periods(ps);
    } catch (const Error& e) {
      last_issue = e.what();
      continue;
    }
    BranchScan scan = branch_point_scan(cr.deformed, p);
    if (scan.degenerate || !scan.common_zeros.empty()) {
      last_issue = "branch points after closure";
      continue;
    }
    PeriodSolution sol;
    sol.space = std::move(ds);
    sol.system = std::move(ps);
    sol.closure = std::move(cr);
    sol.retries_used = attempt;
    return sol;
  }
  throw Error(Err::NoClosure, "period problem unsolved after retries: " + last_issue);
}

}  // namespace minsurf
