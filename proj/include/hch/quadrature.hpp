#pragma once

#include <vector>

namespace hch {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the standard normal density: sum w_i f(x_i) ~ E f(N(0,1)).
/// Weights sum to 1; exact for polynomials of degree < 2q.
QuadratureRule gauss_hermite_normal(int q);

/// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree < 2q.
QuadratureRule gauss_legendre(int q);

/// Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int q, double a, double b);

}  // namespace hch
