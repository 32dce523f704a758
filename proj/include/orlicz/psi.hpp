#pragma once

#include <span>
#include <vector>

#include "orlicz/nfunction.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

/// |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2); the zero-sphere has two points.
double sphere_area(int dim);

struct SphereMoment {
  int dim;
  double exponent;
  double value;      ///< int_{S^{N-1}} |z_N|^p dS
  double log_value;  ///< int_{S^{N-1}} |z_N|^p |log |z_N|| dS
};

SphereMoment sphere_moment(int dim, double p);

/// Moments of |z_N| split at the level |z_N| = a. "below" is {|z_N| <= a},
/// "above" is {|z_N| > a}; log moments carry |log |z_N||.
struct PartialMoments {
  double area_above = 0.0;
  double moment_below = 0.0;
  double moment_above = 0.0;
  double log_below = 0.0;
  double log_above = 0.0;
};

PartialMoments partial_moments(int dim, double p, double a);

/// A rule for functions of |z_N| on S^{N-1}: sum_j weights[j] f(levels[j]).
struct SphereRule {
  std::vector<double> levels;
  std::vector<double> weights;
};

/// Gauss-Legendre in the polar angle with `nodes` points on [0, pi/2]; the
/// weights sum to |S^{N-1}|. For N = 1 the exact two-point rule.
SphereRule sphere_rule(int dim, int nodes = 64);

/// Psi(t) = int_0^t int_{S^{N-1}} Phi(rho |z_N|) dS drho / rho.
class PsiFunction {
 public:
  PsiFunction(NFunction base, int dim, double radial_tol = 1e-8);

  const NFunction& base() const { return base_; }
  int dim() const { return dim_; }
  double radial_tol() const { return radial_tol_; }
  const SphereRule& rule() const { return rule_; }

  /// Fast evaluation used by the local energy: closed forms for sums of
  /// powers, otherwise sum_j w_j G(t c_j) with the log primitive G of Phi.
  double value(double t) const;
  double operator()(double t) const { return value(t); }
  /// Psi'(t) = int_S Phi(t |z_N|) dS / t, on the same route as value().
  double derivative(double t) const;

 private:
  NFunction base_;
  int dim_;
  double radial_tol_;
  SphereRule rule_;
  std::vector<double> term_scale_;  // k_{N,e} / e^2 per power term
  bool kinked_ = false;             // Phi' jumps at 1 (maxpower, powerlog)
  quad::Rule unit_;                 // Gauss-Legendre on [0, 1] for split rules

  // int_S f(t |z_N|) dS; the polar angle is split where t |z_N| = 1 when the
  // base is kinked there.
  template <class F>
  double sphere_sum(double t, F&& f) const;
};

/// Nested adaptive quadrature of the defining double integral, radial
/// variable rho = t e^{-tau}.
double psi_eval(const PsiFunction& psi, double t);

/// Closed forms for power, powerlog, maxpower and sumpower bases.
/// Throws UnsupportedKind otherwise.
double psi_closed_form(const NFunction& base, int dim, double t);
bool has_psi_closed_form(const NFunction& base);

/// |(1-s) int_0^1 int_S Phi(t |z_N| r^{1-s}) dS dr/r - psi_eval(t)| for each s,
/// the radial integral taken in sigma = -log r.
std::vector<double> scaled_modular_limit_check(const NFunction& base, int dim, double t,
                                               std::span<const double> s_list);

/// The (1-s)-scaled radial integral itself.
double scaled_modular(const NFunction& base, int dim, double t, double s);

struct EquivalenceBand {
  double k1;
  double k2;
};

/// min and max of Psi/Phi over n log-spaced t in [t_lo, t_hi].
EquivalenceBand equivalence_band(const PsiFunction& psi, double t_lo = 1e-2,
                                 double t_hi = 1e2, int n = 81);

/// |S^{N-1}| G(t): the upper envelope of Psi.
double psi_upper_bound(const NFunction& base, int dim, double t);

}  // namespace orlicz
