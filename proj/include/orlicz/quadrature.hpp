#pragma once

#include <functional>
#include <vector>

namespace orlicz::quad {

/// Nodes and weights of a fixed rule on an interval.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [a, b].
Rule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Composite Gauss-Legendre rule: `panels` equal panels of `n` points each.
Rule composite_gauss_legendre(int n, int panels, double a, double b);

struct Result {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
/// Stops once the summed error estimate is below max(abs_tol, rel_tol*|I|)
/// or `max_intervals` subintervals are in use.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, double abs_tol = 1e-300,
                 int max_intervals = 4000);

/// Same as integrate() over the union of [p_k, p_{k+1}] for the given sorted
/// breakpoints; each piece starts as its own interval.
Result integrate(const std::function<double(double)>& f,
                 const std::vector<double>& breakpoints, double rel_tol = 1e-10,
                 double abs_tol = 1e-300, int max_intervals = 4000);

}  // namespace orlicz::quad
