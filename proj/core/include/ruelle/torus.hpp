#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ruelle/common.hpp"

namespace ruelle {

// Uniform grid on (R/2piZ)^d with N points per axis. Points and modes are
// flattened row-major, axis 0 slowest. Axis order is (x_1..x_n, z).
struct TorusGrid {
  int d = 2;
  int N = 32;

  TorusGrid() = default;
  TorusGrid(int d, int N);
  long size() const;
  double spacing() const { return 2.0 * kPi / N; }
  // Grid point coordinates.
  Eigen::VectorXd point(long idx) const;
  // Integer mode in [-N/2, N/2 - 1]^d for a flattened mode index.
  Eigen::VectorXi mode(long idx) const;
  long mode_index(const Eigen::VectorXi& k) const;  // -1 when outside the box
};

// Fourier coefficients uhat_k with u(y) = (2pi)^{-d/2} sum_k uhat_k e^{iky}.
Eigen::VectorXcd to_modes(const TorusGrid& g, const Eigen::VectorXcd& samples);
Eigen::VectorXcd from_modes(const TorusGrid& g, const Eigen::VectorXcd& modes);

// L2 inner product <a, b> = int conj(a) b by the grid rule.
cplx grid_inner(const TorusGrid& g, const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);
double grid_norm(const TorusGrid& g, const Eigen::VectorXcd& a);

// Nearest periodic representative of s in [-pi, pi).
double wrap_centered(double s);

}  // namespace ruelle
