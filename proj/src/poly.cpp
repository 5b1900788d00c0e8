#include "minsurf/poly.hpp"

#include <algorithm>
#include <cmath>

#include "minsurf/errors.hpp"

namespace minsurf {

namespace {
constexpr double kEps = 2.220446049250313e-16;
}

Poly Poly::constant(Complex a) {
  if (a == Complex(0.0)) return Poly{};
  Eigen::VectorXcd c(1);
  c[0] = a;
  return Poly(std::move(c));
}

Poly Poly::monomial(Complex a, int k) {
  if (a == Complex(0.0)) return Poly{};
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(k + 1);
  c[k] = a;
  return Poly(std::move(c));
}

bool is_zero(const Poly& p) { return p.c.size() == 0; }

int degree(const Poly& p) { return static_cast<int>(p.c.size()) - 1; }

double coeff_sup(const Poly& p) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < p.c.size(); ++i) m = std::max(m, std::abs(p.c[i]));
  return m;
}

Poly trim(const Poly& p) {
  // Only exact zeros come off.  A sup-relative threshold would delete the
  // genuinely tiny top coefficients that high-degree fits over wide domains
  // produce (a degree-n monomial representation over radius R needs
  // coefficients spanning R^-n), silently decapitating the polynomial.
  Eigen::Index n = p.c.size();
  while (n > 0 && std::abs(p.c[n - 1]) <= 1e-305) --n;
  if (n == p.c.size()) return p;
  if (n == 0) return Poly{};
  return Poly(p.c.head(n).eval());
}

Poly add(const Poly& a, const Poly& b) {
  if (is_zero(a)) return b;
  if (is_zero(b)) return a;
  Eigen::Index n = std::max(a.c.size(), b.c.size());
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n);
  c.head(a.c.size()) = a.c;
  c.head(b.c.size()) += b.c;
  return trim(Poly(std::move(c)));
}

Poly sub(const Poly& a, const Poly& b) { return add(a, scale(b, Complex(-1.0))); }

Poly mul(const Poly& a, const Poly& b) {
  if (is_zero(a) || is_zero(b)) return Poly{};
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(a.c.size() + b.c.size() - 1);
  for (Eigen::Index i = 0; i < a.c.size(); ++i)
    for (Eigen::Index j = 0; j < b.c.size(); ++j) c[i + j] += a.c[i] * b.c[j];
  return Poly(std::move(c));
}

Poly scale(const Poly& a, Complex s) {
  if (s == Complex(0.0) || is_zero(a)) return Poly{};
  return Poly((a.c * s).eval());
}

Poly derivative(const Poly& p) {
  if (p.c.size() <= 1) return Poly{};
  Eigen::VectorXcd c(p.c.size() - 1);
  for (Eigen::Index i = 1; i < p.c.size(); ++i) c[i - 1] = p.c[i] * static_cast<double>(i);
  return Poly(std::move(c));
}

Complex eval(const Poly& p, Complex z) {
  Complex v = 0.0;
  for (Eigen::Index i = p.c.size(); i-- > 0;) v = v * z + p.c[i];
  return v;
}

std::vector<Complex> eval_derivatives(const Poly& p, Complex z, int k) {
  std::vector<Complex> out(k + 1, Complex(0.0));
  if (is_zero(p)) return out;
  Poly sh = taylor_shift(p, z);
  double fact = 1.0;
  for (int j = 0; j <= k; ++j) {
    out[j] = (j < static_cast<int>(sh.c.size())) ? sh.c[j] * fact : Complex(0.0);
    fact *= static_cast<double>(j + 1);
  }
  return out;
}

Poly taylor_shift(const Poly& p, Complex a) {
  if (is_zero(p)) return p;
  const Eigen::Index n = p.c.size();
  Eigen::VectorXcd out = p.c;
  // Repeated Horner: out becomes coefficients of p(w + a) in w.
  for (Eigen::Index j = 0; j < n - 1; ++j)
    for (Eigen::Index i = n - 2; i >= j; --i) out[i] += a * out[i + 1];
  return Poly(std::move(out));
}

Poly deflate(const Poly& p, Complex r) {
  if (p.c.size() <= 1) return Poly{};
  const Eigen::Index n = p.c.size();
  Eigen::VectorXcd q(n - 1);
  Complex carry = p.c[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    q[i] = carry;
    carry = p.c[i] + carry * r;
  }
  return Poly(std::move(q));
}

Poly reverse(const Poly& p) {
  if (is_zero(p)) return p;
  return Poly(p.c.reverse().eval());
}

Poly from_roots(const std::vector<std::pair<Complex, int>>& roots, Complex lead) {
  Poly p = Poly::constant(lead);
  for (const auto& [r, m] : roots) {
    Poly lin({-r, Complex(1.0)});
    for (int i = 0; i < m; ++i) p = mul(p, lin);
  }
  return p;
}

// The clustering tolerance applies to the coefficient vector normalized to
// unit sup (anything else is not scale invariant in root space); distances
// are additionally scaled by the local root magnitude at the use sites.
double root_cluster_tol(const Poly& p) {
  (void)p;
  return 1e-9 * 2.0;
}

int order_at(const Poly& p, Complex r) {
  if (is_zero(p)) return 0;
  Poly sh = taylor_shift(p, r);
  const double cut = coeff_sup(sh) * 1e-9;
  int k = 0;
  while (k < static_cast<int>(sh.c.size()) && std::abs(sh.c[k]) <= cut) ++k;
  return k;
}

namespace {

// Newton iteration accepting only steps that reduce |p|; near multiple roots
// the correction is cancellation noise and must not be trusted blindly.
Complex polish_root(const Poly& p, const Poly& dp, Complex z, int iters) {
  double fz = std::abs(eval(p, z));
  for (int i = 0; i < iters; ++i) {
    Complex df = eval(dp, z);
    if (std::abs(df) < 1e-300) break;
    Complex step = eval(p, z) / df;
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
    Complex cand = z - step;
    double fc = std::abs(eval(p, cand));
    if (fc >= fz) break;
    z = cand;
    fz = fc;
  }
  return z;
}

std::vector<Complex> companion_eigenvalues(const Poly& monic) {
  const int n = degree(monic);
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -monic.c[i];
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, /*computeEigenvectors=*/false);
  std::vector<Complex> out(n);
  for (int i = 0; i < n; ++i) out[i] = es.eigenvalues()[i];
  return out;
}

}  // namespace

std::vector<std::pair<Complex, int>> roots(const Poly& p0) {
  if (is_zero(p0)) throw Error(Err::ZeroPolynomial, "roots of the zero polynomial");
  Poly p = trim(p0);
  std::vector<std::pair<Complex, int>> out;
  if (degree(p) < 1) return out;

  // Exact-ish zeros at the origin come off first.
  const double tau = root_cluster_tol(p);
  int zero_mult = 0;
  while (degree(p) >= 1 && std::abs(p.c[0]) <= 1e-12 * coeff_sup(p)) {
    p = Poly(p.c.tail(p.c.size() - 1).eval());
    ++zero_mult;
  }
  if (zero_mult > 0) out.push_back({Complex(0.0), zero_mult});
  const int n = degree(p);
  if (n < 1) return out;

  // Variable scaling balances the companion matrix.
  Complex lead = p.c[n];
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    double v = std::pow(std::abs(p.c[k] / lead), 1.0 / (n - k));
    s = std::max(s, v);
  }
  if (s == 0.0) s = 1.0;
  Eigen::VectorXcd mc(n + 1);
  double sk = 1.0;
  for (int k = 0; k <= n; ++k) {
    mc[k] = p.c[k] * sk / (lead * std::pow(s, n));
    sk *= s;
  }
  Poly monic(std::move(mc));

  std::vector<Complex> raw = companion_eigenvalues(monic);
  for (auto& z : raw) z *= s;

  // Agglomerative clustering of the raw eigenvalues.  Eigenvalues of an
  // m-fold root scatter like eps^(1/m) but their centroid cancels the leading
  // term, so merges are gated by a multiplicity-widened distance and accepted
  // when the centroid is a backward-stable m-fold root.
  struct Cluster {
    Complex center;
    int size;
  };
  std::vector<Cluster> cl;
  cl.reserve(raw.size());
  for (Complex z : raw) cl.push_back({z, 1});
  const double psup = coeff_sup(p);
  auto gate = [&](int m, double mag) {
    double base = tau * (1.0 + mag);
    double fuzz = std::pow(64.0 * (n + 1) * kEps, 1.0 / std::min(n, m + 2)) * (1.0 + mag);
    return std::max(base, fuzz);
  };
  auto validates = [&](Complex c, int m) {
    // c is an m-fold root of a relatively 1e-10-perturbed polynomial iff the
    // Taylor coefficients of p at c below order m are small against the
    // term-sum scale of the corresponding derivative (the sup-norm scale
    // overshoots badly for unbalanced coefficients and lets false merges in).
    std::vector<Complex> dv = eval_derivatives(p, c, m - 1);
    const double cab = std::abs(c);
    for (int k = 0; k < m; ++k) {
      double sc = 0.0;
      for (int j = k; j <= n; ++j) {
        double ff = 1.0;
        for (int i = 0; i < k; ++i) ff *= static_cast<double>(j - i);
        sc += std::abs(p.c[j]) * ff * std::pow(cab, j - k);
      }
      if (std::abs(dv[k]) > 1e-10 * (sc + psup * 1e-30)) return false;
    }
    return true;
  };
  bool merged = true;
  while (merged && cl.size() > 1) {
    merged = false;
    double best = 1e300;
    size_t bi = 0, bj = 0;
    for (size_t i = 0; i < cl.size(); ++i)
      for (size_t j = i + 1; j < cl.size(); ++j) {
        double d = std::abs(cl[i].center - cl[j].center);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    double mag = 0.5 * (std::abs(cl[bi].center) + std::abs(cl[bj].center));
    int m = cl[bi].size + cl[bj].size;
    double w1 = cl[bi].size, w2 = cl[bj].size;
    Complex centroid = (cl[bi].center * w1 + cl[bj].center * w2) / (w1 + w2);
    if (best <= gate(m, mag) && (best <= tau * (1.0 + mag) || validates(centroid, m))) {
      cl[bi].center = centroid;
      cl[bi].size = m;
      cl.erase(cl.begin() + static_cast<std::ptrdiff_t>(bj));
      merged = true;
    }
  }

  // Polish each cluster on p^(m-1), where the root is simple.
  std::vector<Poly> derivs{p};
  for (auto& c : cl) {
    while (static_cast<int>(derivs.size()) < c.size) derivs.push_back(derivative(derivs.back()));
    const Poly& pm = derivs[c.size - 1];
    c.center = polish_root(pm, derivative(pm), c.center, 5);
    out.push_back({c.center, c.size});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.first.real() != b.first.real()) return a.first.real() < b.first.real();
    return a.first.imag() < b.first.imag();
  });
  return out;
}

}  // namespace minsurf
