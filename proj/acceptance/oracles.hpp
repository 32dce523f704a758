#pragma once

#include <functional>
#include <vector>

// Independent reference computations. Nothing here calls the library's
// evaluation routines; each oracle works from first principles.
namespace orlicz::oracle {

/// Symmetric positive -kappa u'' = u^{-gamma} on (0,1), u(0) = u(1) = 0, by
/// shooting from the midpoint: u(1/2) = M, u'(1/2) = 0, adaptive
/// Dormand-Prince steps to the first zero, bisection on M.
struct ShootingSolution {
  double peak;     ///< M = u(1/2)
  double kappa;
  double gamma;
  /// u at the given points of [0, 1].
  std::vector<double> sample(const std::vector<double>& x) const;
};

ShootingSolution shoot_singular_bvp(double kappa, double gamma);

/// Dense symmetric matrix, row-major.
struct Matrix {
  int n = 0;
  std::vector<double> a;
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
  std::vector<double> apply(const std::vector<double>& x) const;
};

/// A with I1(u) = u^T A u / 2 for Phi(t) = t^2/2 on the 1-D grid with n
/// interior nodes and `halo` exterior nodes per side, assembled entry by
/// entry from closed-form pair, cell and tail integrals.
Matrix assemble_quadratic_1d(int n, int halo, double s);

/// Solves A u = h u^{-gamma}, u > 0, by damped Newton with a dense Cholesky
/// factorization.
std::vector<double> newton_fixed_point(const Matrix& A, double h, double gamma);

/// max_{t in grid} (s t - phi(t)) on a uniform grid of [0, t_max] refined
/// around the best node.
double brute_force_conjugate(const std::function<double(double)>& phi, double s, double t_max);

/// Composite Simpson with 2m panels.
double simpson(const std::function<double(double)>& f, double a, double b, int m);

}  // namespace orlicz::oracle
