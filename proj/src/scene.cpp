#include "minsurf/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

namespace minsurf {

namespace {
constexpr double kPi = std::numbers::pi;
}

Complex arc_point(const AnalyticArc& a, double t) { return eval(a.control, Complex(t)); }

Complex arc_derivative(const AnalyticArc& a, double t) {
  return eval(derivative(a.control), Complex(t));
}

std::vector<Complex> arc_points(const AnalyticArc& a, int count) {
  std::vector<Complex> out(count);
  for (int i = 0; i < count; ++i) out[i] = arc_point(a, double(i) / (count - 1));
  return out;
}

AnalyticArc make_segment_arc(Complex a, Complex b, int samples) {
  AnalyticArc arc;
  arc.control = Poly({a, b - a});
  arc.n_samples = samples;
  return arc;
}

AnalyticArc make_circle_arc(Complex center, double radius, int samples) {
  const int deg = 34;
  Eigen::VectorXcd c(deg + 1);
  Complex term(1.0, 0.0);
  const Complex step(0.0, 2.0 * kPi);
  for (int k = 0; k <= deg; ++k) {
    c[k] = radius * term;
    term *= step / static_cast<double>(k + 1);
  }
  c[0] += center;
  AnalyticArc arc;
  arc.control = Poly(std::move(c));
  arc.n_samples = samples;
  return arc;
}

std::vector<Complex> disc_boundary_points(const DiscRegion& d, int count) {
  std::vector<Complex> out(count);
  for (int i = 0; i < count; ++i) {
    double th = 2.0 * kPi * i / count;
    out[i] = d.center + d.radius * Complex(std::cos(th), std::sin(th));
  }
  return out;
}

int winding_number(const Cycle& c, Complex z) {
  if (c.is_circle) return std::abs(z - c.center) < c.radius ? 1 : 0;
  return winding_number_discrete(c, z, static_cast<int>(c.loop.size()));
}

int winding_number_discrete(const Cycle& c, Complex z, int samples) {
  double total = 0.0;
  auto at = [&](int i) -> Complex {
    if (c.is_circle) {
      double th = 2.0 * kPi * i / samples;
      return c.center + c.radius * Complex(std::cos(th), std::sin(th));
    }
    return c.loop[static_cast<size_t>(i) % c.loop.size()];
  };
  int n = c.is_circle ? samples : static_cast<int>(c.loop.size());
  for (int i = 0; i < n; ++i) {
    Complex a = at(i) - z;
    Complex b = at(i + 1) - z;
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

double cycle_distance(const Cycle& c, Complex z) {
  if (c.is_circle) return std::abs(std::abs(z - c.center) - c.radius);
  double best = 1e300;
  for (size_t i = 0; i < c.loop.size(); ++i) {
    Complex a = c.loop[i];
    Complex b = c.loop[(i + 1) % c.loop.size()];
    Complex ab = b - a;
    double L2 = std::norm(ab);
    double t = L2 > 0 ? std::clamp(((z - a) * std::conj(ab)).real() / L2, 0.0, 1.0) : 0.0;
    best = std::min(best, std::abs(z - (a + t * ab)));
  }
  return best;
}

double scene_diameter(const AdmissibleSet& s, const PuncturedSphere& p) {
  std::vector<Complex> pts;
  for (const auto& d : s.regions) {
    pts.push_back(d.center + d.radius);
    pts.push_back(d.center - d.radius);
    pts.push_back(d.center + Complex(0, d.radius));
    pts.push_back(d.center - Complex(0, d.radius));
  }
  for (const auto& a : s.arcs)
    for (Complex z : arc_points(a, 32)) pts.push_back(z);
  for (const auto& e : p.exterior_punctures)
    if (!e.infinite) pts.push_back(e.z);
  for (const auto& e : p.interior_ends)
    if (!e.infinite) pts.push_back(e.z);
  double dia = 1.0;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) dia = std::max(dia, std::abs(pts[i] - pts[j]));
  return dia;
}

namespace {

struct Grid {
  int n = 0;
  double x0 = 0, y0 = 0, h = 0;
  std::vector<uint8_t> blocked;

  Complex cell_center(int i, int j) const { return {x0 + (i + 0.5) * h, y0 + (j + 0.5) * h}; }
  int cell_of(Complex z, int* ci, int* cj) const {
    int i = static_cast<int>(std::floor((z.real() - x0) / h));
    int j = static_cast<int>(std::floor((z.imag() - y0) / h));
    *ci = i;
    *cj = j;
    return (i >= 0 && i < n && j >= 0 && j < n) ? 1 : 0;
  }
};

double seg_distance(Complex z, Complex a, Complex b) {
  Complex ab = b - a;
  double L2 = std::norm(ab);
  double t = L2 > 0 ? std::clamp(((z - a) * std::conj(ab)).real() / L2, 0.0, 1.0) : 0.0;
  return std::abs(z - (a + t * ab));
}

Grid rasterize(const AdmissibleSet& s, const PuncturedSphere& p, int resolution) {
  // Bounding box over every feature, padded so the border ring is genuinely
  // outside the scene.
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  auto grow = [&](Complex z, double r = 0.0) {
    xmin = std::min(xmin, z.real() - r);
    xmax = std::max(xmax, z.real() + r);
    ymin = std::min(ymin, z.imag() - r);
    ymax = std::max(ymax, z.imag() + r);
  };
  for (const auto& d : s.regions) grow(d.center, d.radius);
  for (const auto& a : s.arcs)
    for (Complex z : arc_points(a, std::max(a.n_samples, 64))) grow(z);
  for (const auto& e : p.exterior_punctures)
    if (!e.infinite) grow(e.z);
  for (const auto& e : p.interior_ends)
    if (!e.infinite) grow(e.z);
  if (xmin > xmax) {
    xmin = ymin = -1.0;
    xmax = ymax = 1.0;
  }
  double w = std::max({xmax - xmin, ymax - ymin, 1.0});
  double pad = 0.35 * w;
  Grid g;
  g.n = resolution;
  g.x0 = 0.5 * (xmin + xmax) - 0.5 * w - pad;
  g.y0 = 0.5 * (ymin + ymax) - 0.5 * w - pad;
  g.h = (w + 2 * pad) / resolution;
  g.blocked.assign(static_cast<size_t>(resolution) * resolution, 0);

  std::vector<std::vector<Complex>> polylines;
  for (const auto& a : s.arcs) polylines.push_back(arc_points(a, std::max(a.n_samples, 128)));

  const double thick = 0.75 * g.h * 1.4142;
  for (int j = 0; j < g.n; ++j) {
    for (int i = 0; i < g.n; ++i) {
      Complex z = g.cell_center(i, j);
      bool blocked = false;
      for (const auto& d : s.regions)
        if (std::abs(z - d.center) <= d.radius) {
          blocked = true;
          break;
        }
      if (!blocked) {
        for (const auto& poly : polylines) {
          for (size_t k = 0; k + 1 < poly.size(); ++k) {
            // Cheap reject before the exact segment distance.
            if (std::min(std::abs(z - poly[k]), std::abs(z - poly[k + 1])) >
                thick + std::abs(poly[k + 1] - poly[k]))
              continue;
            if (seg_distance(z, poly[k], poly[k + 1]) <= thick) {
              blocked = true;
              break;
            }
          }
          if (blocked) break;
        }
      }
      if (blocked) g.blocked[static_cast<size_t>(j) * g.n + i] = 1;
    }
  }
  return g;
}

// Connected components of free cells (4-connected); -1 on blocked cells.
std::vector<int> free_components(const Grid& g, int* n_components) {
  std::vector<int> comp(g.blocked.size(), -1);
  int next = 0;
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i) {
      size_t idx = static_cast<size_t>(j) * g.n + i;
      if (g.blocked[idx] || comp[idx] >= 0) continue;
      std::queue<std::pair<int, int>> q;
      q.push({i, j});
      comp[idx] = next;
      while (!q.empty()) {
        auto [ci, cj] = q.front();
        q.pop();
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          int ni = ci + di[k], nj = cj + dj[k];
          if (ni < 0 || ni >= g.n || nj < 0 || nj >= g.n) continue;
          size_t nidx = static_cast<size_t>(nj) * g.n + ni;
          if (g.blocked[nidx] || comp[nidx] >= 0) continue;
          comp[nidx] = next;
          q.push({ni, nj});
        }
      }
      ++next;
    }
  *n_components = next;
  return comp;
}

int blocked_component_count(const Grid& g) {
  std::vector<int> comp(g.blocked.size(), -1);
  int next = 0;
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i) {
      size_t idx = static_cast<size_t>(j) * g.n + i;
      if (!g.blocked[idx] || comp[idx] >= 0) continue;
      std::queue<std::pair<int, int>> q;
      q.push({i, j});
      comp[idx] = next;
      while (!q.empty()) {
        auto [ci, cj] = q.front();
        q.pop();
        for (int dj = -1; dj <= 1; ++dj)
          for (int di = -1; di <= 1; ++di) {
            int ni = ci + di, nj = cj + dj;
            if (ni < 0 || ni >= g.n || nj < 0 || nj >= g.n) continue;
            size_t nidx = static_cast<size_t>(nj) * g.n + ni;
            if (!g.blocked[nidx] || comp[nidx] >= 0) continue;
            comp[nidx] = next;
            q.push({ni, nj});
          }
      }
      ++next;
    }
  return next;
}

}  // namespace

ValidationReport validate_admissible(const AdmissibleSet& s, const PuncturedSphere& p) {
  ValidationReport rep;
  auto bad = [&](const std::string& msg) { rep.violations.push_back("admissibility: " + msg); };

  const size_t b = p.exterior_punctures.size();
  if (b < 1) bad("at least one exterior puncture is required (b >= 1)");
  if (s.regions.empty() && s.arcs.empty()) bad("empty admissible set");

  // Pairwise distinct punctures.
  std::vector<ExtendedPoint> all = p.interior_ends;
  all.insert(all.end(), p.exterior_punctures.begin(), p.exterior_punctures.end());
  for (size_t i = 0; i < all.size(); ++i)
    for (size_t j = i + 1; j < all.size(); ++j)
      if (same_point(all[i], all[j], 1e-9)) bad("punctures are not pairwise distinct");

  for (const auto& d : s.regions)
    if (!(d.radius > 0)) bad("disc with nonpositive radius");

  for (size_t i = 0; i < s.regions.size(); ++i)
    for (size_t j = i + 1; j < s.regions.size(); ++j) {
      double gap = std::abs(s.regions[i].center - s.regions[j].center) -
                   (s.regions[i].radius + s.regions[j].radius);
      if (gap <= 0) bad("discs are not pairwise disjoint with positive separation");
    }

  // Interior ends strictly inside their discs; each listed index valid.
  std::vector<int> covered(p.interior_ends.size(), 0);
  for (size_t di = 0; di < s.regions.size(); ++di) {
    for (int idx : s.regions[di].contained_ends) {
      if (idx < 0 || idx >= static_cast<int>(p.interior_ends.size())) {
        bad("disc lists an unknown interior end");
        continue;
      }
      const auto& e = p.interior_ends[idx];
      if (e.infinite || std::abs(e.z - s.regions[di].center) >= s.regions[di].radius)
        bad("interior end not strictly inside its disc");
      else
        covered[idx]++;
    }
  }
  for (size_t i = 0; i < covered.size(); ++i)
    if (covered[i] != 1) bad("interior end not contained in exactly one disc");

  // Arc regularity and placement.
  for (const auto& a : s.arcs) {
    if (a.n_samples < 64) bad("arc with fewer than 64 samples");
    Poly dctrl = derivative(a.control);
    double minspeed = 1e300, scale = 0.0;
    for (int i = 0; i <= 256; ++i) {
      double t = i / 256.0;
      double sp = std::abs(eval(dctrl, Complex(t)));
      minspeed = std::min(minspeed, sp);
      scale = std::max(scale, sp);
    }
    if (minspeed <= 1e-9 * (1.0 + scale)) bad("arc is not regular (vanishing derivative)");
  }

  // Exterior punctures live strictly outside S.
  const double dia = scene_diameter(s, p);
  for (const auto& e : p.exterior_punctures) {
    if (e.infinite) continue;
    for (const auto& d : s.regions)
      if (std::abs(e.z - d.center) <= d.radius) bad("exterior puncture inside a region");
    for (const auto& a : s.arcs) {
      auto pts = arc_points(a, std::max(a.n_samples, 128));
      double dist = 1e300;
      for (size_t k = 0; k + 1 < pts.size(); ++k)
        dist = std::min(dist, seg_distance(e.z, pts[k], pts[k + 1]));
      if (dist < 1e-6 * dia) bad("exterior puncture on an arc");
    }
  }
  // Interior ends must not sit on arcs either (they belong to region interiors).
  for (const auto& e : p.interior_ends)
    if (e.infinite) bad("interior end at infinity is not inside a disc");

  if (!rep.ok()) return rep;

  // Complementary faces on the sphere: flood fill of the free cells.  The
  // border-touching components merge through the far plane into the face
  // containing infinity.
  Grid g = rasterize(s, p, 220);
  int ncomp = 0;
  std::vector<int> comp = free_components(g, &ncomp);
  std::vector<int> face_id(ncomp);
  for (int i = 0; i < ncomp; ++i) face_id[i] = i;
  int outer = -1;
  for (int i = 0; i < g.n; ++i) {
    for (int idx : {comp[static_cast<size_t>(0) * g.n + i], comp[static_cast<size_t>(g.n - 1) * g.n + i],
                    comp[static_cast<size_t>(i) * g.n + 0], comp[static_cast<size_t>(i) * g.n + (g.n - 1)]}) {
      if (idx < 0) continue;
      if (outer < 0) outer = idx;
      face_id[idx] = outer;
    }
  }
  std::vector<int> punctures_in_face(ncomp, 0);
  bool infinity_is_puncture = false;
  for (const auto& e : p.exterior_punctures) {
    if (e.infinite) {
      infinity_is_puncture = true;
      continue;
    }
    int ci, cj;
    if (!g.cell_of(e.z, &ci, &cj)) {
      bad("exterior puncture escaped the analysis window");
      continue;
    }
    int c = comp[static_cast<size_t>(cj) * g.n + ci];
    if (c < 0) {
      bad("exterior puncture rasterized inside S");
      continue;
    }
    punctures_in_face[face_id[c]]++;
  }
  if (outer >= 0 && infinity_is_puncture) punctures_in_face[outer]++;

  std::vector<int> seen(ncomp, 0);
  for (int c = 0; c < ncomp; ++c) {
    int f = face_id[c];
    if (seen[f]) continue;
    seen[f] = 1;
    if (punctures_in_face[f] == 0)
      bad("bounded complementary component without a puncture");
    else if (punctures_in_face[f] > 1)
      rep.violations.push_back("hypothesis: complementary face with more than one puncture");
  }

  if (blocked_component_count(g) > 1) rep.violations.push_back("hypothesis: S is not connected");

  return rep;
}

CycleBasis build_cycle_basis(const AdmissibleSet& s, const PuncturedSphere& p) {
  const int b = static_cast<int>(p.exterior_punctures.size());
  CycleBasis basis;
  if (b <= 1) {
    basis.varsigma0 = 0;
    return basis;
  }
  for (int k = 0; k + 1 < b; ++k)
    if (p.exterior_punctures[k].infinite)
      throw Error(Err::BadConfig, "infinity must be the last exterior puncture");

  const double delta = 1e-3 * scene_diameter(s, p);
  std::vector<std::vector<Complex>> polylines;
  for (const auto& a : s.arcs) polylines.push_back(arc_points(a, std::max(a.n_samples, 128)));

  for (int k = 0; k + 1 < b; ++k) {
    Complex q = p.exterior_punctures[k].z;
    double dist = 1e300;
    for (int j = 0; j < b; ++j)
      if (j != k && !p.exterior_punctures[j].infinite)
        dist = std::min(dist, std::abs(q - p.exterior_punctures[j].z));
    for (const auto& e : p.interior_ends)
      if (!e.infinite) dist = std::min(dist, std::abs(q - e.z));
    for (const auto& d : s.regions)
      dist = std::min(dist, std::abs(std::abs(q - d.center) - d.radius));
    for (const auto& poly : polylines)
      for (size_t i = 0; i + 1 < poly.size(); ++i)
        dist = std::min(dist, seg_distance(q, poly[i], poly[i + 1]));
    double r = 0.5 * dist;
    if (!(r > delta))
      throw Error(Err::GeometryTooTight, "no room for a basis cycle around a puncture");
    basis.cycles.push_back(Cycle::circle(q, r));
  }
  basis.varsigma0 = 3 * (b - 1);

  // Incidence over the exterior punctures must have full rank b-1.
  Eigen::MatrixXd inc(b - 1, b);
  for (int i = 0; i + 1 < b; ++i)
    for (int j = 0; j < b; ++j)
      inc(i, j) = p.exterior_punctures[j].infinite
                      ? 0.0
                      : winding_number(basis.cycles[i], p.exterior_punctures[j].z);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(inc);
  if (lu.rank() < b - 1)
    throw Error(Err::GeometryTooTight, "cycle incidence matrix is rank deficient");
  return basis;
}

Eigen::Matrix3Xd sampled_derivative(const Eigen::Matrix3Xd& X) {
  const int n = static_cast<int>(X.cols());
  Eigen::Matrix3Xd D(3, n);
  if (n < 8) throw Error(Err::NotRegular, "too few samples to differentiate");
  const double h = 1.0 / (n - 1);
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3d v;
    if (i >= 3 && i + 3 < n) {
      v = (-X.col(i - 3) + 9 * X.col(i - 2) - 45 * X.col(i - 1) + 45 * X.col(i + 1) -
           9 * X.col(i + 2) + X.col(i + 3)) /
          (60 * h);
    } else {
      // One-sided 7-point sixth-order stencil at the ends.
      int s = (i + 3 >= n) ? -1 : 1;
      int b = i;
      v = (-49.0 / 20 * X.col(b) + 6.0 * X.col(b + s) - 15.0 / 2 * X.col(b + 2 * s) +
           20.0 / 3 * X.col(b + 3 * s) - 15.0 / 4 * X.col(b + 4 * s) +
           6.0 / 5 * X.col(b + 5 * s) - 1.0 / 6 * X.col(b + 6 * s)) /
          (h * s);
    }
    D.col(i) = v;
  }
  return D;
}

std::vector<Eigen::Matrix3Xcd> generalized_differential(const MarkedCurveData& m) {
  std::vector<Eigen::Matrix3Xcd> out;
  for (const auto& arc : m.arcs) {
    if (arc.X.cols() != arc.sigma.cols())
      throw Error(Err::GridMismatch, "marked data with mismatched sample counts");
    Eigen::Matrix3Xd T = sampled_derivative(arc.X);
    double scale = T.colwise().norm().maxCoeff();
    Eigen::Matrix3Xcd val(3, arc.X.cols());
    for (int i = 0; i < T.cols(); ++i) {
      Eigen::Vector3d t = T.col(i);
      if (t.norm() <= 1e-12 * (1.0 + scale))
        throw Error(Err::NotRegular, "vanishing derivative sample along an arc");
      Eigen::Vector3d cr = arc.sigma.col(i).cross(t);
      for (int k = 0; k < 3; ++k) val(k, i) = Complex(t[k], cr[k]);
    }
    out.push_back(std::move(val));
  }
  return out;
}

std::pair<double, double> sup_norms(const MarkedSamples& a, const MarkedSamples& b) {
  if (a.X.size() != b.X.size() || a.N.size() != b.N.size())
    throw Error(Err::GridMismatch, "sample sets differ in shape");
  double c0 = 0.0, cn = 0.0;
  for (size_t i = 0; i < a.X.size(); ++i) {
    if (a.X[i].cols() != b.X[i].cols()) throw Error(Err::GridMismatch, "sample sets differ in shape");
    c0 = std::max(c0, (a.X[i] - b.X[i]).colwise().norm().maxCoeff());
  }
  for (size_t i = 0; i < a.N.size(); ++i) {
    if (a.N[i].cols() != b.N[i].cols()) throw Error(Err::GridMismatch, "sample sets differ in shape");
    cn = std::max(cn, (a.N[i] - b.N[i]).colwise().norm().maxCoeff());
  }
  return {c0, c0 + cn};
}

}  // namespace minsurf
