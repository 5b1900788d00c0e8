#include "minsurf/completeness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

namespace minsurf {

namespace {
constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

// exp with the real part clamped; the labyrinth values of e^{h} only need to
// dominate, not to be exactly representable.
Complex exp_clamped(Complex h) {
  return std::exp(Complex(std::clamp(h.real(), -690.0, 690.0), h.imag()));
}

}  // namespace

Labyrinth build_labyrinth(const AdmissibleSet& s, const Annulus& collar, int levels) {
  Labyrinth lab;
  lab.collar = collar;
  lab.levels = levels;
  if (levels == 0) return lab;
  double width = collar.r_out - collar.r_in;
  if (levels < 0 || width <= 0) throw Error(Err::TooThin, "degenerate collar");
  double spacing = width / (levels + 1);
  lab.disc_radius = 0.35 * spacing;
  lab.clearance = spacing - 2.0 * lab.disc_radius;
  lab.influence_radius = 4.2 * lab.disc_radius;
  if (lab.disc_radius < 1e-6 * collar.r_out)
    throw Error(Err::TooThin, "collar too thin for the requested levels");

  for (int k = 0; k < levels; ++k) {
    double rho = collar.r_in + (k + 1) * spacing;
    double step = 1.6 * lab.disc_radius / rho;  // adjacent discs overlap
    int count = static_cast<int>(std::ceil(2.0 * kPi / step));
    step = 2.0 * kPi / count;
    double gap_dir = (k % 2 == 0) ? 0.0 : kPi;
    double gap_half = 2.0 * lab.disc_radius / rho;
    for (int i = 0; i < count; ++i) {
      double th = i * step;
      double d = std::abs(std::remainder(th - gap_dir, 2.0 * kPi));
      if (d < gap_half) continue;  // the navigable gap of this ring
      lab.discs.push_back(
          {collar.center + rho * Complex(std::cos(th), std::sin(th)), lab.disc_radius, {}});
      lab.ring_of.push_back(k);
    }
  }

  // Discs must stay clear of S.
  for (const auto& ld : lab.discs) {
    for (const auto& d : s.regions)
      if (std::abs(ld.center - d.center) <= ld.radius + d.radius + lab.clearance)
        throw Error(Err::TooThin, "labyrinth disc reaches a region of S");
    for (const auto& a : s.arcs)
      for (Complex z : arc_points(a, std::max(a.n_samples, 128)))
        if (std::abs(z - ld.center) <= ld.radius + lab.clearance)
          throw Error(Err::TooThin, "labyrinth disc reaches an arc of S");
  }

  // Combinatorial check: every radial test ray meets the influence zone of
  // some disc on every ring.
  for (int ray = 0; ray < 360; ++ray) {
    double th = 2.0 * kPi * ray / 360.0;
    for (int k = 0; k < levels; ++k) {
      double rho = collar.r_in + (k + 1) * spacing;
      Complex z = collar.center + rho * Complex(std::cos(th), std::sin(th));
      double best = 1e300;
      for (size_t i = 0; i < lab.discs.size(); ++i)
        if (lab.ring_of[i] == k) best = std::min(best, std::abs(z - lab.discs[i].center));
      if (best > lab.influence_radius)
        throw Error(Err::TooThin, "radial crossing escapes the labyrinth influence zones");
    }
  }
  return lab;
}

Complex TwistedData::phi(int j, Complex z) const {
  Complex u = eval(base.eta1.f, z);
  Complex v = eval(base.eta2.f, z);
  if (j == 2) return eval(base.g, z) * u;
  Complex hv = eval(h, z);
  Complex a = exp_clamped(-hv) * u;
  Complex b = exp_clamped(hv) * v;
  if (j == 0) return 0.5 * (a - b);
  return 0.5 * kI * (a + b);
}

double TwistedData::density(Complex z) const {
  Complex u = eval(base.eta1.f, z);
  Complex v = eval(base.eta2.f, z);
  double re = eval(h, z).real();
  double lam = 0.5 * (std::exp(std::clamp(-re, -690.0, 690.0)) * std::abs(u) +
                      std::exp(std::clamp(re, -690.0, 690.0)) * std::abs(v));
  if (!std::isfinite(lam)) lam = 1e290;
  return lam;
}

Eigen::Vector3d TwistedData::normal(Complex z) const {
  // Stereographic image of the twisted Gauss map e^{h} eta2 / phi3.
  Complex u = eval(base.eta1.f, z);
  Complex v = eval(base.eta2.f, z);
  Complex g = exp_clamped(eval(h, z)) * v / (eval(base.g, z) * u);
  double n2 = std::norm(g);
  if (!std::isfinite(n2) || n2 > 1e24) return {0.0, 0.0, 1.0};
  return Eigen::Vector3d(2.0 * g.real(), 2.0 * g.imag(), n2 - 1.0) / (1.0 + n2);
}

TwistedData apply_twist(const SpinorPair& sp, const RationalMap& h) {
  TwistedData t;
  t.base = sp;
  t.h = h;
  return t;
}

DistanceCertificate intrinsic_distance(const std::function<double(Complex)>& density,
                                       const Annulus& collar, int grid_r, int grid_t) {
  if (!(collar.r_out > collar.r_in && collar.r_in > 0))
    throw Error(Err::TooThin, "annulus radii must satisfy 0 < r_in < r_out");

  auto solve = [&](int nr, int nt, std::vector<Complex>* witness) {
    const double logr0 = std::log(collar.r_in), logr1 = std::log(collar.r_out);
    auto node_pos = [&](int ir, int it) {
      double r = std::exp(logr0 + (logr1 - logr0) * ir / (nr - 1));
      double th = 2.0 * kPi * it / nt;
      return collar.center + r * Complex(std::cos(th), std::sin(th));
    };
    std::vector<double> lam(static_cast<size_t>(nr) * nt);
    for (int ir = 0; ir < nr; ++ir)
      for (int it = 0; it < nt; ++it)
        lam[static_cast<size_t>(ir) * nt + it] = density(node_pos(ir, it));

    std::vector<double> dist(static_cast<size_t>(nr) * nt, 1e300);
    std::vector<int> prev(static_cast<size_t>(nr) * nt, -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (int it = 0; it < nt; ++it) {
      dist[it] = 0.0;
      pq.push({0.0, it});
    }
    const int dir[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    while (!pq.empty()) {
      auto [d, idx] = pq.top();
      pq.pop();
      if (d > dist[static_cast<size_t>(idx)]) continue;
      int ir = idx / nt, it = idx % nt;
      for (const auto& dd : dir) {
        int jr = ir + dd[0];
        int jt = (it + dd[1] + nt) % nt;
        if (jr < 0 || jr >= nr) continue;
        int jdx = jr * nt + jt;
        Complex a = node_pos(ir, it), b = node_pos(jr, jt);
        double w = 0.5 * (lam[static_cast<size_t>(idx)] + lam[static_cast<size_t>(jdx)]) *
                   std::abs(b - a);
        if (d + w < dist[static_cast<size_t>(jdx)]) {
          dist[static_cast<size_t>(jdx)] = d + w;
          prev[static_cast<size_t>(jdx)] = idx;
          pq.push({d + w, jdx});
        }
      }
    }
    double best = 1e300;
    int best_idx = -1;
    for (int it = 0; it < nt; ++it) {
      int idx = (nr - 1) * nt + it;
      if (dist[static_cast<size_t>(idx)] < best) {
        best = dist[static_cast<size_t>(idx)];
        best_idx = idx;
      }
    }
    if (witness) {
      witness->clear();
      for (int at = best_idx; at >= 0; at = prev[static_cast<size_t>(at)])
        witness->push_back(node_pos(at / nt, at % nt));
      std::reverse(witness->begin(), witness->end());
    }
    return best;
  };

  DistanceCertificate cert;
  cert.grid_r = grid_r;
  cert.grid_t = grid_t;
  cert.coarse = solve(grid_r, grid_t, nullptr);
  cert.fine = solve(2 * grid_r, 2 * grid_t, &cert.witness);
  cert.bound = cert.fine + (cert.fine - cert.coarse);
  return cert;
}

DistanceCertificate intrinsic_distance(const WeierstrassTriple& w, const Annulus& collar,
                                       int grid_r, int grid_t) {
  MetricField m = make_metric(w);
  for (const RationalMap* f : {&m.u, &m.v}) {
    if (degree(f->den) < 1) continue;
    for (const auto& [z, mult] : roots(f->den)) {
      double r = std::abs(z - collar.center);
      if (r > collar.r_in * 0.999 && r < collar.r_out * 1.001)
        throw Error(Err::PoleInCollar, "metric pole inside the collar");
    }
  }
  return intrinsic_distance([&m](Complex z) { return m.density(z); }, collar, grid_r, grid_t);
}

DistanceCertificate intrinsic_distance(const TwistedData& t, const Annulus& collar, int grid_r,
                                       int grid_t) {
  for (const Poly* den : {&t.base.eta1.f.den, &t.base.eta2.f.den, &t.h.den}) {
    if (degree(*den) < 1) continue;
    for (const auto& [z, mult] : roots(*den)) {
      double r = std::abs(z - collar.center);
      if (r > collar.r_in * 0.999 && r < collar.r_out * 1.001)
        throw Error(Err::PoleInCollar, "twisted metric pole inside the collar");
    }
  }
  return intrinsic_distance([&t](Complex z) { return t.density(z); }, collar, grid_r, grid_t);
}

namespace {

// Integral of a pointwise-evaluable form along a straight segment.
Complex integrate_fn_segment(const std::function<Complex(Complex)>& f, Complex a, Complex b,
                             int depth = 0) {
  static const double gx[16] = {
      0.00529953250417503, 0.0277124884633837, 0.0671843988060841, 0.122297795822498,
      0.191061877798678,   0.270991611171386,  0.359198224610370,  0.452493745081181,
      0.547506254918819,   0.640801775389630,  0.729008388828614,  0.808938122201322,
      0.877702204177502,   0.932815601193916,  0.972287511536616,  0.994700467495825};
  static const double gw[16] = {
      0.0135762297058770, 0.0311267619693239, 0.0475792558412464, 0.0623144856277669,
      0.0747979944082884, 0.0845782596975013, 0.0913017075224618, 0.0947253052275343,
      0.0947253052275343, 0.0913017075224618, 0.0845782596975013, 0.0747979944082884,
      0.0623144856277669, 0.0475792558412464, 0.0311267619693239, 0.0135762297058770};
  auto gl = [&](Complex u, Complex v) {
    Complex acc = 0.0;
    for (int i = 0; i < 16; ++i) acc += f(u + (v - u) * gx[i]) * gw[i];
    return acc * (v - u);
  };
  Complex whole = gl(a, b);
  Complex m = a + 0.5 * (b - a);
  Complex split = gl(a, m) + gl(m, b);
  if (depth >= 10 || std::abs(split - whole) <= 1e-12 * (1.0 + std::abs(split))) return split;
  return integrate_fn_segment(f, a, m, depth + 1) + integrate_fn_segment(f, m, b, depth + 1);
}

Eigen::Vector3d immerse_twisted(const TwistedData& t, Complex a, Complex b) {
  Eigen::Vector3d out;
  for (int j = 0; j < 3; ++j)
    out[j] = integrate_fn_segment([&t, j](Complex z) { return t.phi(j, z); }, a, b).real();
  return out;
}

}  // namespace

BoostResult completeness_boost(const SpinorPair& closed, const SceneModel& scene,
                               const CycleBasis& cycles, const EndData& ends,
                               const std::vector<Eigen::Vector3d>& q, double C, double epsilon,
                               BoostOptions opt) {
  BoostResult out;
  if (C <= 0.0) {
    out.data = apply_twist(closed, RationalMap::constant(0.0));
    return out;
  }

  // Collar around the outer hull of S.  The complete-end faces of V need no
  // certification: the tubular neighborhood keeps them as punctured discs
  // without boundary.
  double hull = 0.0;
  for (const auto& d : scene.sets.regions)
    hull = std::max(hull, std::abs(d.center) + d.radius);
  for (const auto& a : scene.sets.arcs)
    for (Complex z : arc_points(a, 64)) hull = std::max(hull, std::abs(z));
  Annulus collar{Complex(0.0), opt.collar_inner_factor * hull, opt.collar_outer_factor * hull};
  for (const auto& e : scene.sphere.exterior_punctures)
    if (!e.infinite && std::abs(e.z) > collar.r_in * 0.8)
      throw Error(Err::BadConfig, "finite puncture obstructs the boost collar");

  // The twist may not put poles at punctures enclosed by basis cycles;
  // holomorphy there keeps e^{h} tame on the cycles by the maximum principle.
  PuncturedSphere budget_sphere = scene.sphere;
  {
    std::vector<ExtendedPoint> kept;
    for (const auto& e : budget_sphere.exterior_punctures) {
      bool enclosed = false;
      for (const auto& cyc : cycles.cycles)
        if (!e.infinite && winding_number(cyc, e.z) != 0) enclosed = true;
      if (!enclosed) kept.push_back(e);
    }
    if (kept.empty()) throw Error(Err::BadConfig, "no pole budget left for the twist");
    budget_sphere.exterior_punctures = kept;
  }

  DivisorConstraint end_divisor;
  {
    std::vector<DivisorEntry> entries;
    for (size_t i = 0; i < scene.sphere.interior_ends.size(); ++i)
      entries.push_back({scene.sphere.interior_ends[i], ends.pole_orders[i]});
    end_divisor.divisor = make_divisor(std::move(entries), 1e-9);
  }

  // Drift scales linearly with sup_S |h|; measure the constant at a probe
  // magnitude, then jump to the m that the drift budget implies.
  auto sample_sets = scene_sample_sets(scene.sets, 12);
  std::vector<Complex> s_pts;
  for (const auto& set : sample_sets) s_pts.insert(s_pts.end(), set.begin(), set.end());

  auto measure = [&](const TwistedData& td, double* sup_h) {
    // C1 distance on S between the twisted data and the untwisted input,
    // both anchored at the first sample.
    TwistedData plain = apply_twist(closed, RationalMap::constant(0.0));
    double c0 = 0.0, cn = 0.0, sh = 0.0;
    Eigen::Vector3d xa = Eigen::Vector3d::Zero(), xb = Eigen::Vector3d::Zero();
    for (size_t i = 0; i < s_pts.size(); ++i) {
      if (i > 0) {
        xa += immerse_twisted(td, s_pts[i - 1], s_pts[i]);
        xb += immerse_twisted(plain, s_pts[i - 1], s_pts[i]);
      }
      c0 = std::max(c0, (xa - xb).norm());
      cn = std::max(cn, (td.normal(s_pts[i]) - plain.normal(s_pts[i])).norm());
      sh = std::max(sh, std::abs(eval(td.h, s_pts[i])));
    }
    if (sup_h) *sup_h = sh;
    return c0 + cn;
  };

  int levels = opt.levels;
  double m = opt.m_start;
  std::string best_note = "no attempt";
  double best_cert = 0.0;
  bool calibrated = false;

  while (true) {
    Labyrinth lab = build_labyrinth(scene.sets, collar, levels);
    ApproxResult hfit;
    try {
      hfit = twist_function(scene.sets, budget_sphere.exterior_punctures.empty()
                                            ? scene.sphere
                                            : budget_sphere,
                            lab.discs, m, end_divisor);
    } catch (const Error& e) {
      throw Error(Err::BoostFailed, std::string("twist fit failed: ") + e.what());
    }

    // Quadrature re-closure of the twisted family.
    ClosureResult cr;
    bool closed_ok = false;
    for (unsigned salt = 0; salt < 8 && !closed_ok; ++salt) {
      try {
        DeformationSpace ds = build_deformation_basis(scene.sets, scene.sphere, cycles, closed,
                                                      ends, cycles.varsigma0, salt);
        PeriodSystem ps = assemble_period_system_quad(closed, ds, cycles, hfit.f, q);
        if (!check_surjectivity(ps).surjective) continue;
        cr = close_periods(ps);
        closed_ok = true;
      } catch (const Error&) {
        continue;
      }
    }
    if (!closed_ok) throw Error(Err::BoostFailed, "twisted period system would not re-close");

    TwistedData td = apply_twist(cr.deformed, hfit.f);
    double sup_h = 0.0;
    double drift = measure(td, &sup_h);
    DistanceCertificate cert = intrinsic_distance(td, collar, opt.grid_r, opt.grid_t);
    // The 8-connected metric overestimates lengths by at most sec(pi/8).
    double conservative = cert.bound / 1.0824;

    if (conservative > best_cert) {
      best_cert = conservative;
      out.data = td;
      out.certificate = cert;
      out.reclosure = cr;
      out.labyrinth = lab;
      out.twist_m = m;
      out.sup_h_on_S = sup_h;
      out.drift_c1 = drift;
      out.drift_constant = sup_h > 0 ? drift / sup_h : 0.0;
      out.levels = levels;
    }

    if (conservative >= C && drift <= epsilon) {
      out.data = td;
      out.certificate = cert;
      out.reclosure = cr;
      out.labyrinth = lab;
      out.twist_m = m;
      out.sup_h_on_S = sup_h;
      out.drift_c1 = drift;
      out.drift_constant = sup_h > 0 ? drift / sup_h : 0.0;
      out.levels = levels;
      return out;
    }

    if (!calibrated && drift > epsilon && sup_h > 0) {
      // One jump to the magnitude the measured drift constant implies.
      double K = drift / sup_h;
      double target = 2.5 * K / (epsilon * m);  // since sup_h ~ 1/m
      m = std::min(opt.m_max, std::max(2.0 * m, m * target));
      calibrated = true;
      continue;
    }
    if (drift > epsilon) {
      m *= 2.0;
    } else {
      ++levels;  // certificate short: add winding levels
    }
    if (m > opt.m_max || levels > opt.max_levels)
      throw Error(Err::BoostFailed, "boost budget exhausted: best certificate " +
                                        std::to_string(best_cert) + ", drift " +
                                        std::to_string(out.drift_c1));
  }
}

}  // namespace minsurf
