#include "minsurf/weierstrass.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace minsurf {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

double poly_scale_at(const Poly& p, Complex z) {
  return coeff_sup(p) * std::pow(std::max(1.0, std::abs(z)), std::max(0, degree(p)));
}

bool near_pole(const RationalMap& f, Complex z, double rel = 1e-12) {
  return std::abs(eval(f.den, z)) <= rel * poly_scale_at(f.den, z);
}

// Sample points on a few circles, skipping anything close to poles or zeros
// of the supplied maps.
std::vector<Complex> clean_samples(const std::vector<RationalMap>& maps, int want) {
  std::vector<Complex> out;
  int ring = 0;
  while (static_cast<int>(out.size()) < want && ring < 8) {
    double r = 0.83 + 0.41 * ring;
    int n = 64;
    for (int k = 0; k < n && static_cast<int>(out.size()) < want; ++k) {
      Complex z = r * std::exp(kI * (2.0 * kPi * (k + 0.21) / n)) + Complex(0.013, 0.007);
      bool good = true;
      for (const auto& f : maps)
        if (near_pole(f, z, 1e-8) || std::abs(eval(f.num, z)) <= 1e-10 * poly_scale_at(f.num, z))
          good = false;
      if (good) out.push_back(z);
    }
    ++ring;
  }
  return out;
}

}  // namespace

SpinorPair make_spinor_pair(OneForm eta1, RationalMap g) {
  SpinorPair sp;
  sp.eta2 = OneForm(mul(mul(g, g), eta1.f));
  sp.eta1 = std::move(eta1);
  sp.g = std::move(g);
  return sp;
}

SpinorPair make_spinor_pair(OneForm eta1, OneForm eta2, RationalMap g) {
  auto pts = clean_samples({eta1.f, eta2.f, g}, 50);
  for (Complex z : pts) {
    Complex lhs = eval(eta2.f, z);
    Complex rhs = eval(g, z) * eval(g, z) * eval(eta1.f, z);
    if (std::abs(lhs - rhs) > 1e-12 * (1.0 + std::abs(lhs) + std::abs(rhs)))
      throw Error(Err::InconsistentSpinor, "eta2 != g^2 eta1");
  }
  SpinorPair sp;
  sp.eta1 = std::move(eta1);
  sp.eta2 = std::move(eta2);
  sp.g = std::move(g);
  return sp;
}

WeierstrassTriple spinor_to_weierstrass(const SpinorPair& sp) {
  WeierstrassTriple w;
  w.phi[0] = OneForm(scale(sub(sp.eta1.f, sp.eta2.f), Complex(0.5)));
  w.phi[1] = OneForm(scale(add(sp.eta1.f, sp.eta2.f), Complex(0.0, 0.5)));
  w.phi[2] = OneForm(mul(sp.g, sp.eta1.f));
  return w;
}

OneForm eta1_of(const WeierstrassTriple& w) {
  return OneForm(sub(w.phi[0].f, scale(w.phi[1].f, kI)));
}

OneForm eta2_of(const WeierstrassTriple& w) {
  return OneForm(sub(scale(w.phi[0].f, Complex(-1.0)), scale(w.phi[1].f, kI)));
}

RationalMap gauss_map_of(const WeierstrassTriple& w) {
  if (is_zero(w.phi[2].f)) throw Error(Err::BadConfig, "flat triple has no Gauss map quotient");
  return div(eta2_of(w).f, w.phi[2].f);
}

EndData compute_end_data(const WeierstrassTriple& w, const PuncturedSphere& p) {
  EndData data;
  for (const auto& e : p.interior_ends) {
    int m = -form_order_at(w.phi[2], e);
    if (m <= 1) throw Error(Err::BadConfig, "interior end with pole order <= 1");
    data.pole_orders.push_back(m);
  }
  return data;
}

double MetricField::density(Complex z) const {
  if (near_pole(u, z) || near_pole(v, z))
    throw Error(Err::PoleAtSample, "metric sample at a pole of the data");
  double lam = 0.5 * (std::abs(eval(u, z)) + std::abs(eval(v, z)));
  if (lam <= 1e-300) throw Error(Err::BranchPoint, "metric density vanishes: branch point");
  return lam;
}

MetricField make_metric(const WeierstrassTriple& w) {
  MetricField m;
  m.u = eta1_of(w).f;
  m.v = eta2_of(w).f;
  return m;
}

double metric_density(const WeierstrassTriple& w, Complex z) { return make_metric(w).density(z); }

double CurvatureField::at(Complex z) const {
  bool pole_of_g = near_pole(g, z, 1e-9) || std::abs(eval(g, z)) > 1.0;
  if (!pole_of_g) {
    if (near_pole(h, z)) throw Error(Err::PoleAtSample, "curvature sample at a pole");
    double a = std::abs(eval(h, z));
    double gv = std::abs(eval(g, z));
    double t = (1.0 + gv * gv) * (1.0 + gv * gv);
    return -std::pow(4.0 * a / t, 2.0);
  }
  if (near_pole(h2, z)) throw Error(Err::PoleAtSample, "curvature sample at a pole");
  double a = std::abs(eval(h2, z));
  double gv = std::abs(eval(gi, z));
  double t = (1.0 + gv * gv) * (1.0 + gv * gv);
  return -std::pow(4.0 * a / t, 2.0);
}

CurvatureField make_curvature(const WeierstrassTriple& w) {
  CurvatureField c;
  c.g = gauss_map_of(w);
  if (is_zero(c.g) || map_degree(c.g) == 0) {
    c.h = RationalMap::constant(0.0);
    c.h2 = c.h;
    c.gi = RationalMap::constant(0.0);
    return c;
  }
  RationalMap dg = derivative(c.g);
  c.h = div(mul(dg, c.g), w.phi[2].f);
  c.h2 = div(c.h, pow(c.g, 4));
  c.gi = div(RationalMap::constant(1.0), c.g);
  return c;
}

double gauss_curvature(const WeierstrassTriple& w, Complex z) { return make_curvature(w).at(z); }

namespace {

// Spherical area density 4|g'|^2/(1+|g|^2)^2 of a rational map, evaluated
// through 1/g near poles of g.
struct SphericalDensity {
  RationalMap g, dg, gi, dgi;
  double at(Complex z) const {
    bool use_inverse = near_pole(g, z, 1e-6) || std::abs(eval(g, z)) > 1.0;
    const RationalMap& m = use_inverse ? gi : g;
    const RationalMap& dm = use_inverse ? dgi : dg;
    if (near_pole(m, z, 1e-14) || near_pole(dm, z, 1e-14)) return 0.0;  // measure-zero set
    double d = std::abs(eval(dm, z));
    double v = std::abs(eval(m, z));
    double t = 1.0 + v * v;
    return 4.0 * d * d / (t * t);
  }
};

SphericalDensity make_density(const RationalMap& g) {
  SphericalDensity s;
  s.g = g;
  s.dg = derivative(g);
  s.gi = div(RationalMap::constant(1.0), g);
  s.dgi = derivative(s.gi);
  return s;
}

// Gauss-Legendre nodes/weights on [0,1] (composite from a fixed 16-point rule).
void gauss16(std::vector<double>* x, std::vector<double>* w) {
  static const double xs[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                               0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                               0.9445750230732326, 0.9894009349916499};
  static const double ws[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                               0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                               0.0622535239386479, 0.0271524594117541};
  x->clear();
  w->clear();
  for (int i = 7; i >= 0; --i) {
    x->push_back(0.5 * (1.0 - xs[i]));
    w->push_back(0.5 * ws[i]);
  }
  for (int i = 0; i < 8; ++i) {
    x->push_back(0.5 * (1.0 + xs[i]));
    w->push_back(0.5 * ws[i]);
  }
}

// Integral of the density over the disc |z - c| <= R by polar quadrature.
double integrate_disc(const SphericalDensity& s, Complex c, double R, int nr, int nth) {
  std::vector<double> gx, gw;
  gauss16(&gx, &gw);
  double total = 0.0;
  int blocks = std::max(1, nr / 16);
  for (int b = 0; b < blocks; ++b) {
    double r0 = R * b / blocks, r1 = R * (b + 1) / blocks;
    for (size_t i = 0; i < gx.size(); ++i) {
      double r = r0 + (r1 - r0) * gx[i];
      double wr = (r1 - r0) * gw[i] * r;
      double acc = 0.0;
      for (int k = 0; k < nth; ++k) {
        double th = 2.0 * kPi * k / nth;
        acc += s.at(c + r * Complex(std::cos(th), std::sin(th)));
      }
      total += wr * acc * (2.0 * kPi / nth);
    }
  }
  return total;
}

}  // namespace

TotalCurvatureResult total_curvature(const WeierstrassTriple& w, const PuncturedSphere& p) {
  TotalCurvatureResult out;
  RationalMap g = gauss_map_of(w);
  if (map_degree(g) == 0) {
    out.value = 0.0;
    out.converged = true;
    return out;
  }
  SphericalDensity dz = make_density(g);
  // Second chart: G(w) = g(1/w) covers |z| >= 1.
  SphericalDensity dw = make_density(compose_reciprocal(g));

  double prev = 0.0;
  for (int level = 0; level < 4; ++level) {
    int nr = 64 << level, nth = 128 << level;
    double v = integrate_disc(dz, Complex(0.0), 1.0, nr, nth) +
               integrate_disc(dw, Complex(0.0), 1.0, nr, nth);
    out.partials.push_back(-v);
    if (level > 0 && std::abs(v - prev) <= 2e-3 * std::abs(v)) {
      out.converged = true;
      prev = v;
      break;
    }
    prev = v;
  }
  double sphere_total = prev;

  // Excise the 1e-3 end discs; the density is a chart-invariant area form so
  // each little disc can be integrated in whichever chart holds it.
  const double r_end = 1e-3;
  double caps = 0.0;
  auto all_ends = p.interior_ends;
  all_ends.insert(all_ends.end(), p.exterior_punctures.begin(), p.exterior_punctures.end());
  for (const auto& e : all_ends) {
    if (e.infinite)
      caps += integrate_disc(dw, Complex(0.0), r_end, 16, 32);
    else
      caps += integrate_disc(dz, e.z, r_end, 16, 32);
  }
  out.value = -(sphere_total - caps);
  return out;
}

Complex period(const OneForm& w, const Cycle& c) {
  if (is_zero(w.f)) return Complex(0.0);
  Divisor d = divisor_of(w.f);
  double extent = c.is_circle ? c.radius : 1.0;
  Complex total = 0.0;
  for (const auto& e : d.entries) {
    if (e.point.infinite || e.order >= 0) continue;
    if (cycle_distance(c, e.point.z) < 1e-6 * (1.0 + extent))
      throw Error(Err::PoleOnCycle, "cycle passes through a pole");
    int wn = winding_number(c, e.point.z);
    if (wn != 0) total += static_cast<double>(wn) * residue(w, e.point);
  }
  return Complex(0.0, 2.0 * kPi) * total;
}

Complex period_quad(const OneForm& w, const Cycle& c, int min_samples) {
  auto value_at = [&](int n) -> Complex {
    Complex acc = 0.0;
    if (c.is_circle) {
      for (int k = 0; k < n; ++k) {
        double th = 2.0 * kPi * k / n;
        Complex e(std::cos(th), std::sin(th));
        Complex z = c.center + c.radius * e;
        acc += eval(w.f, z) * (kI * c.radius * e);
      }
      return acc * (2.0 * kPi / n);
    }
    // Polygonal loop: composite Gauss-Legendre per edge, n points per edge.
    std::vector<double> gx, gw;
    gauss16(&gx, &gw);
    int per_edge = std::max(1, n / static_cast<int>(c.loop.size()));
    for (size_t i = 0; i < c.loop.size(); ++i) {
      Complex a = c.loop[i], b = c.loop[(i + 1) % c.loop.size()];
      for (int blk = 0; blk < per_edge; ++blk) {
        Complex a0 = a + (b - a) * (double(blk) / per_edge);
        Complex b0 = a + (b - a) * (double(blk + 1) / per_edge);
        for (size_t q = 0; q < gx.size(); ++q)
          acc += eval(w.f, a0 + (b0 - a0) * gx[q]) * (b0 - a0) * gw[q];
      }
    }
    return acc;
  };
  Complex prev = value_at(min_samples);
  for (int n = 2 * min_samples; n <= 16 * min_samples; n *= 2) {
    Complex cur = value_at(n);
    if (std::abs(cur - prev) <= 1e-13 * (1.0 + std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

FluxResult flux(const WeierstrassTriple& w, const CycleBasis& basis, double tol) {
  FluxResult out;
  for (const auto& c : basis.cycles) {
    Eigen::Vector3d im, re;
    for (int j = 0; j < 3; ++j) {
      Complex p = period(w.phi[j], c);
      im[j] = p.imag();
      re[j] = p.real();
    }
    if (re.cwiseAbs().maxCoeff() >= tol) out.well_defined = false;
    out.flux.push_back(im);
    out.real_parts.push_back(re);
  }
  return out;
}

namespace {

Complex gl16_segment(const OneForm& w, Complex a, Complex b) {
  std::vector<double> gx, gw;
  gauss16(&gx, &gw);
  Complex acc = 0.0;
  for (size_t i = 0; i < gx.size(); ++i) acc += eval(w.f, a + (b - a) * gx[i]) * gw[i];
  return acc * (b - a);
}

Complex adaptive_segment(const OneForm& w, Complex a, Complex b, Complex whole, int depth) {
  Complex m = a + 0.5 * (b - a);
  Complex left = gl16_segment(w, a, m);
  Complex right = gl16_segment(w, m, b);
  if (depth >= 14 || std::abs(left + right - whole) <= 1e-13 * (1.0 + std::abs(left + right)))
    return left + right;
  return adaptive_segment(w, a, m, left, depth + 1) + adaptive_segment(w, m, b, right, depth + 1);
}

}  // namespace

Complex integrate_segment(const OneForm& w, Complex a, Complex b) {
  return adaptive_segment(w, a, b, gl16_segment(w, a, b), 0);
}

std::vector<Complex> pole_avoiding_path(const std::vector<ExtendedPoint>& poles, Complex a,
                                        Complex b) {
  std::vector<Complex> finite;
  for (const auto& p : poles)
    if (!p.infinite) finite.push_back(p.z);
  std::vector<Complex> path{a};
  // Recursive subdivision pushing midpoints away from nearby poles.
  struct Builder {
    const std::vector<Complex>& ps;
    std::vector<Complex>& out;
    double clearance;
    void build(Complex u, Complex v, int depth) {
      double worst = 1e300;
      Complex bad;
      for (Complex p : ps) {
        Complex uv = v - u;
        double L2 = std::norm(uv);
        double t = L2 > 0 ? std::clamp(((p - u) * std::conj(uv)).real() / L2, 0.0, 1.0) : 0.0;
        double d = std::abs(p - (u + t * uv));
        if (d < worst) {
          worst = d;
          bad = p;
        }
      }
      if (worst >= clearance || depth >= 10) {
        out.push_back(v);
        return;
      }
      Complex m = u + 0.5 * (v - u);
      Complex dir = m - bad;
      if (std::abs(dir) < 1e-12) dir = (v - u) * kI;
      dir /= std::abs(dir);
      Complex m2 = bad + dir * std::max(2.0 * clearance, 2.0 * clearance + std::abs(m - bad));
      build(u, m2, depth + 1);
      build(m2, v, depth + 1);
    }
  };
  double clearance = 0.02 * (1.0 + std::abs(a - b));
  Builder builder{finite, path, clearance};
  builder.build(a, b, 0);
  return path;
}

Eigen::Vector3d immerse(const WeierstrassTriple& w, Complex z0, Complex z) {
  std::vector<ExtendedPoint> poles;
  for (int j = 0; j < 3; ++j) {
    if (is_zero(w.phi[j].f)) continue;
    Divisor d = divisor_of_form(w.phi[j]);
    for (const auto& e : d.entries)
      if (e.order < 0) poles.push_back(e.point);
  }
  std::vector<Complex> path = pole_avoiding_path(poles, z0, z);
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for (size_t i = 0; i + 1 < path.size(); ++i)
    for (int j = 0; j < 3; ++j) out[j] += integrate_segment(w.phi[j], path[i], path[i + 1]).real();
  return out;
}

int spinor_parity(const OneForm& w, const Cycle& c) {
  Divisor d = divisor_of_form(w);
  double extent = c.is_circle ? c.radius : 1.0;
  int total = 0;
  for (const auto& e : d.entries) {
    if (e.point.infinite) continue;
    if (cycle_distance(c, e.point.z) < 1e-6 * (1.0 + extent))
      throw Error(Err::PoleOnCycle, "divisor point on the cycle");
    if (winding_number(c, e.point.z) % 2 != 0) total += e.order;
  }
  return ((total % 2) + 2) % 2;
}

int spinor_parity_continuation(const OneForm& w, const Cycle& c, int samples) {
  auto at = [&](int k) -> Complex {
    if (c.is_circle) {
      double th = 2.0 * kPi * k / samples;
      return c.center + c.radius * Complex(std::cos(th), std::sin(th));
    }
    double t = double(k) / samples * static_cast<double>(c.loop.size());
    size_t i = std::min(c.loop.size() - 1, static_cast<size_t>(t));
    double frac = t - static_cast<double>(i);
    Complex a = c.loop[i], b = c.loop[(i + 1) % c.loop.size()];
    return a + frac * (b - a);
  };
  Complex s0 = std::sqrt(eval(w.f, at(0)));
  Complex prev = s0;
  for (int k = 1; k <= samples; ++k) {
    Complex s = std::sqrt(eval(w.f, at(k)));
    if (std::abs(s - prev) > std::abs(s + prev)) s = -s;
    prev = s;
  }
  return std::abs(prev - s0) <= std::abs(prev + s0) ? 0 : 1;
}

OneForm spinor_realize(const std::vector<int>& parities, const PuncturedSphere& p,
                       const std::vector<int>& end_orders) {
  const int b = static_cast<int>(p.exterior_punctures.size());
  if (static_cast<int>(parities.size()) != std::max(0, b - 1))
    throw Error(Err::BadConfig, "need one parity per basis cycle (b-1 of them)");
  if (!end_orders.empty() && end_orders.size() != p.interior_ends.size())
    throw Error(Err::BadConfig, "end_orders must match the interior ends");

  RationalMap f = RationalMap::constant(1.0);
  int total_zero_order = 0;
  for (int k = 0; k + 1 < b; ++k) {
    const auto& q = p.exterior_punctures[k];
    if (q.infinite) throw Error(Err::BadConfig, "infinity must be the last exterior puncture");
    int e = parities[k] % 2;
    if (e) {
      f = mul(f, RationalMap(Poly({-q.z, Complex(1.0)}), Poly::constant(1.0)));
      total_zero_order += 1;
    }
  }
  // Poles of even order 2 m_i at the interior ends keep every parity intact
  // while forcing the zero divisor the deformation space needs.
  int end_total = 0;
  for (size_t i = 0; i < end_orders.size(); ++i) {
    const auto& E = p.interior_ends[i];
    if (E.infinite) throw Error(Err::BadConfig, "interior end at infinity");
    f = div(f, pow(RationalMap(Poly({-E.z, Complex(1.0)}), Poly::constant(1.0)), 2 * end_orders[i]));
    end_total += 2 * end_orders[i];
  }
  const auto& last = p.exterior_punctures[b - 1];
  if (last.infinite) return OneForm(f);
  // Balance at the finite last puncture so the form is regular at infinity:
  // order there is -(total zeros) - 2 + (even end compensation).
  int m = total_zero_order + 2 - end_total;
  RationalMap lin(Poly({-last.z, Complex(1.0)}), Poly::constant(1.0));
  return OneForm(div(f, pow(lin, m)));
}

}  // namespace minsurf
