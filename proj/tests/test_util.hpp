#pragma once

#include <complex>
#include <random>

#include "minsurf/poly.hpp"
#include "minsurf/rational.hpp"

namespace minsurf::testing {

inline Complex random_complex(std::mt19937_64& rng, double radius = 1.0) {
  std::uniform_real_distribution<double> u(-radius, radius);
  return {u(rng), u(rng)};
}

inline Poly random_poly(std::mt19937_64& rng, int max_degree, double radius = 1.0) {
  std::uniform_int_distribution<int> dd(0, max_degree);
  int d = dd(rng);
  Eigen::VectorXcd c(d + 1);
  for (int i = 0; i <= d; ++i) c[i] = random_complex(rng, radius);
  if (std::abs(c[d]) < 0.1) c[d] += Complex(0.5, 0.5);
  return Poly(std::move(c));
}

inline RationalMap random_rational(std::mt19937_64& rng, int max_degree, double radius = 1.0) {
  Poly n = random_poly(rng, max_degree, radius);
  Poly d = random_poly(rng, max_degree, radius);
  return RationalMap(n, d);
}

}  // namespace minsurf::testing
