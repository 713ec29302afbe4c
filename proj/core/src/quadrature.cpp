#include "ruelle/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace ruelle {

namespace {
// Nodes from the Jacobi matrix; weights as Christoffel numbers
// 1 / sum_j p_j(x)^2 from the orthonormal recurrence, which keeps relative
// accuracy for the tiny outer weights.
QuadratureRule golub_welsch(const Eigen::VectorXd& b, double p0) {
  const int n = static_cast<int>(b.size()) + 1;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = b(i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
  QuadratureRule q;
  for (int i = 0; i < n; ++i) {
    const double x = es.eigenvalues()(i);
    double pm = 0.0, pc = p0, s = p0 * p0;
    for (int j = 0; j + 1 < n; ++j) {
      const double pn = (x * pc - (j > 0 ? b(j - 1) * pm : 0.0)) / b(j);
      pm = pc;
      pc = pn;
      s += pc * pc;
    }
    q.nodes.push_back(x);
    q.weights.push_back(1.0 / s);
  }
  return q;
}
}  // namespace

QuadratureRule gauss_hermite(int n) {
  Eigen::VectorXd b(n - 1);
  for (int i = 1; i < n; ++i) b(i - 1) = std::sqrt(i / 2.0);
  return golub_welsch(b, std::pow(3.14159265358979323846, -0.25));
}

QuadratureRule gauss_legendre(int n) {
  Eigen::VectorXd b(n - 1);
  for (int i = 1; i < n; ++i) b(i - 1) = i / std::sqrt(4.0 * i * i - 1.0);
  return golub_welsch(b, 1.0 / std::sqrt(2.0));
}

}  // namespace ruelle
