#pragma once

#include <vector>

namespace ruelle {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Golub-Welsch rules. Hermite integrates f(x) e^{-x^2} over R; Legendre
// integrates over [-1, 1].
QuadratureRule gauss_hermite(int n);
QuadratureRule gauss_legendre(int n);

}  // namespace ruelle
