#ifndef SPHEREFORGE_FIELDS_HPP
#define SPHEREFORGE_FIELDS_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sphereforge/loop.hpp"

namespace sphereforge {

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

struct DomainGrid {
  double x_min = -0.5, x_max = 0.5, y_min = -0.5, y_max = 0.5;
  int nx = 61, ny = 61;
  cplx base_point{0, 0};

  double hx() const { return (x_max - x_min) / (nx - 1); }
  double hy() const { return (y_max - y_min) / (ny - 1); }
  double x(int i) const { return x_min + i * hx(); }
  double y(int j) const { return y_min + j * hy(); }
  cplx node(int i, int j) const { return {x(i), y(j)}; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }

  void validate() const
  {
    if (nx < 3 || ny < 3) throw std::invalid_argument("grid needs at least 3x3 nodes");
    if (!(x_max > x_min) || !(y_max > y_min)) throw std::invalid_argument("empty grid rectangle");
    base_indices();
  }

  /// (i0, j0) of the base point; throws when it is not a grid node.
  std::pair<int, int> base_indices() const
  {
    double fi = (base_point.real() - x_min) / hx();
    double fj = (base_point.imag() - y_min) / hy();
    int i0 = static_cast<int>(std::lround(fi));
    int j0 = static_cast<int>(std::lround(fj));
    if (std::abs(fi - i0) > 1e-9 || std::abs(fj - j0) > 1e-9 || i0 < 0 || j0 < 0 || i0 >= nx || j0 >= ny)
      throw std::invalid_argument("base point is not a grid node");
    return {i0, j0};
  }
};

/// Per-node output of the pipeline. Derivatives of N and f are analytic
/// (from the lambda^{-1} part of the Maurer-Cartan form), not differenced.
struct SurfaceFields {
  DomainGrid grid;
  std::vector<char> valid;
  std::vector<Vec3> N, Nx, Ny, f, fx, fy;
  std::vector<double> rho, mu;
  std::vector<cplx> b0, c0;
  std::vector<Mat2> frame;
  std::vector<double> recomposition_error, unitarity_error, b0_offdiag;

  void resize(std::size_t n)
  {
    valid.assign(n, 0);
    N.assign(n, Vec3::Zero());
    Nx = Ny = f = fx = fy = N;
    rho.assign(n, 0.0);
    mu.assign(n, 0.0);
    b0.assign(n, cplx(0));
    c0.assign(n, cplx(0));
    frame.assign(n, Mat2::Identity());
    recomposition_error.assign(n, 0.0);
    unitarity_error.assign(n, 0.0);
    b0_offdiag.assign(n, 0.0);
  }
  bool ok(int i, int j) const
  {
    return i >= 0 && j >= 0 && i < grid.nx && j < grid.ny && valid[grid.index(i, j)];
  }
};

}  // namespace sphereforge

#endif  // SPHEREFORGE_FIELDS_HPP
