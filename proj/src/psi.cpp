#include "orlicz/psi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "orlicz/errors.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

void check_dim(int dim) {
  if (dim < 1) throw ConfigError("sphere dimension must be >= 1");
}

// int_{S^{N-1}} f(|z_N|) dS for N >= 2, as an integral over the polar angle
// theta in [0, pi/2] (|z_N| = cos theta) doubled for the lower hemisphere.
double polar_integral(int dim, const std::function<double(double)>& f, double th_lo,
                      double th_hi, double rel_tol,
                      const std::vector<double>& extra_breaks = {}) {
  if (th_hi <= th_lo) return 0.0;
  const double ring = sphere_area(dim - 1);
  const int power = dim - 2;
  auto integrand = [&](double th) {
    const double w = power == 0 ? 1.0 : std::pow(std::sin(th), power);
    return f(std::cos(th)) * w;
  };
  std::vector<double> breaks{th_lo};
  for (double b : extra_breaks)
    if (b > th_lo && b < th_hi) breaks.push_back(b);
  breaks.push_back(th_hi);
  std::sort(breaks.begin(), breaks.end());
  return 2.0 * ring * quad::integrate(integrand, breaks, rel_tol, 1e-300, 8000).value;
}

// F(x) = int_S Phi(x |z_N|) dS.
double sphere_phi(const NFunction& base, int dim, double x, double rel_tol) {
  if (x == 0.0) return 0.0;
  if (dim == 1) return 2.0 * base.value(x);
  std::vector<double> breaks;
  if (x > 1.0) breaks.push_back(std::acos(1.0 / x));  // kinks of the built-in kinds
  return polar_integral(dim, [&](double c) { return base.value(x * c); }, 0.0, kHalfPi,
                        rel_tol, breaks);
}

// int_0^inf F(t e^{-rate * v}) dv by adaptive quadrature in v.
double radial_integral(const NFunction& base, int dim, double t, double rate,
                       double rel_tol) {
  if (t == 0.0) return 0.0;
  const double inner_tol = std::max(1e-14, 1e-3 * rel_tol);
  auto F = [&](double v) { return sphere_phi(base, dim, t * std::exp(-rate * v), inner_tol); };
  const double f0 = F(0.0);
  if (f0 == 0.0) return 0.0;
  // Truncate where the integrand has dropped below 1e-17 of its peak.
  double T = 1.0 / rate;
  while (F(T) > 1e-17 * f0 && T * rate < 2000.0) T *= 2.0;
  std::vector<double> breaks{0.0};
  const double kink = std::log(t) / rate;
  if (kink > 0.0 && kink < T) breaks.push_back(kink);
  breaks.push_back(T);
  return quad::integrate(F, breaks, rel_tol, 1e-300, 8000).value;
}

}  // namespace

double sphere_area(int dim) {
  check_dim(dim);
  if (dim == 1) return 2.0;
  const double half = 0.5 * dim;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

SphereMoment sphere_moment(int dim, double p) {
  check_dim(dim);
  if (!(p > 0.0)) throw ConfigError("sphere_moment: need p > 0");
  if (dim == 1) return {dim, p, 2.0, 0.0};
  const double value =
      polar_integral(dim, [p](double c) { return std::pow(c, p); }, 0.0, kHalfPi, 1e-12);
  const double log_value = polar_integral(
      dim, [p](double c) { return c > 0.0 ? -std::pow(c, p) * std::log(c) : 0.0; }, 0.0,
      kHalfPi, 1e-12);
  return {dim, p, value, log_value};
}

PartialMoments partial_moments(int dim, double p, double a) {
  check_dim(dim);
  PartialMoments m;
  if (dim == 1) {
    if (a < 1.0) {
      m.area_above = 2.0;
      m.moment_above = 2.0;
    } else {
      m.moment_below = 2.0;
    }
    return m;
  }
  const double split = a >= 1.0 ? 0.0 : (a <= 0.0 ? kHalfPi : std::acos(a));
  auto mom = [p](double c) { return std::pow(c, p); };
  auto lmom = [p](double c) { return c > 0.0 ? -std::pow(c, p) * std::log(c) : 0.0; };
  m.area_above = polar_integral(dim, [](double) { return 1.0; }, 0.0, split, 1e-13);
  m.moment_above = polar_integral(dim, mom, 0.0, split, 1e-13);
  m.moment_below = polar_integral(dim, mom, split, kHalfPi, 1e-13);
  m.log_above = polar_integral(dim, lmom, 0.0, split, 1e-13);
  m.log_below = polar_integral(dim, lmom, split, kHalfPi, 1e-13);
  return m;
}

SphereRule sphere_rule(int dim, int nodes) {
  check_dim(dim);
  SphereRule rule;
  if (dim == 1) {
    rule.levels = {1.0};
    rule.weights = {2.0};
    return rule;
  }
  const quad::Rule gl = quad::gauss_legendre(nodes, 0.0, kHalfPi);
  const double ring = 2.0 * sphere_area(dim - 1);
  for (std::size_t j = 0; j < gl.size(); ++j) {
    rule.levels.push_back(std::cos(gl.nodes[j]));
    rule.weights.push_back(ring * std::pow(std::sin(gl.nodes[j]), dim - 2) * gl.weights[j]);
  }
  return rule;
}

PsiFunction::PsiFunction(NFunction base, int dim, double radial_tol)
    : base_(std::move(base)), dim_(dim), radial_tol_(radial_tol), rule_(sphere_rule(dim)) {
  if (!(radial_tol > 0.0)) throw ConfigError("PsiFunction: radial_tol must be positive");
  for (const PowerTerm& term : base_.power_terms())
    term_scale_.push_back(term.coef * sphere_moment(dim, term.exponent).value / term.exponent);
  kinked_ = dim >= 2 && (base_.kind() == Kind::MaxPower || base_.kind() == Kind::PowerLog);
  if (kinked_) unit_ = quad::gauss_legendre(32, 0.0, 1.0);
}

template <class F>
double PsiFunction::sphere_sum(double t, F&& f) const {
  double sum = 0.0;
  if (!kinked_ || t <= 1.0) {
    for (std::size_t j = 0; j < rule_.levels.size(); ++j) sum += rule_.weights[j] * f(t * rule_.levels[j]);
    return sum;
  }
  const double ring = 2.0 * sphere_area(dim_ - 1);
  const double split = std::acos(1.0 / t);
  for (const auto& [lo, hi] : {std::pair{0.0, split}, std::pair{split, kHalfPi}}) {
    const double len = hi - lo;
    for (std::size_t j = 0; j < unit_.size(); ++j) {
      const double th = lo + len * unit_.nodes[j];
      sum += len * unit_.weights[j] * ring * std::pow(std::sin(th), dim_ - 2) * f(t * std::cos(th));
    }
  }
  return sum;
}

double PsiFunction::value(double t) const {
  t = std::abs(t);
  if (t == 0.0) return 0.0;
  const auto terms = base_.power_terms();
  double sum = 0.0;
  if (!terms.empty()) {
    for (std::size_t k = 0; k < terms.size(); ++k)
      sum += term_scale_[k] * std::pow(t, terms[k].exponent);
  } else {
    sum = sphere_sum(t, [&](double x) { return base_.log_primitive(x); });
  }
  if (!std::isfinite(sum)) throw NonFinite("Psi: overflow");
  return sum;
}

double PsiFunction::derivative(double t) const {
  t = std::abs(t);
  if (t == 0.0) return 0.0;
  const auto terms = base_.power_terms();
  double sum = 0.0;
  if (!terms.empty()) {
    for (std::size_t k = 0; k < terms.size(); ++k)
      sum += term_scale_[k] * terms[k].exponent * std::pow(t, terms[k].exponent - 1.0);
  } else {
    sum = sphere_sum(t, [&](double x) { return base_.value(x); }) / t;
  }
  if (!std::isfinite(sum)) throw NonFinite("Psi': overflow");
  return sum;
}

double psi_eval(const PsiFunction& psi, double t) {
  return radial_integral(psi.base(), psi.dim(), std::abs(t), 1.0, 1e-2 * psi.radial_tol());
}

bool has_psi_closed_form(const NFunction& base) {
  switch (base.kind()) {
    case Kind::Power:
    case Kind::PowerLog:
    case Kind::MaxPower:
    case Kind::SumPower:
      return true;
    default:
      return false;
  }
}

double psi_closed_form(const NFunction& base, int dim, double t) {
  t = std::abs(t);
  switch (base.kind()) {
    case Kind::Power:
    case Kind::SumPower: {
      double sum = 0.0;
      for (const PowerTerm& term : base.power_terms())
        sum += term.coef * sphere_moment(dim, term.exponent).value / term.exponent *
               std::pow(t, term.exponent);
      return sum;
    }
    case Kind::MaxPower: {
      const double lo = std::min(base.p(), base.q()), hi = std::max(base.p(), base.q());
      if (t <= 1.0) return sphere_moment(dim, lo).value / lo * std::pow(t, lo);
      const PartialMoments ml = partial_moments(dim, lo, 1.0 / t);
      const PartialMoments mh = partial_moments(dim, hi, 1.0 / t);
      return std::pow(t, lo) / lo * ml.moment_below + std::pow(t, hi) / hi * mh.moment_above +
             (1.0 / lo - 1.0 / hi) * mh.area_above;
    }
    case Kind::PowerLog: {
      const double p = base.p(), c = base.shift();
      if (t == 0.0) return 0.0;
      const SphereMoment k = sphere_moment(dim, p);
      const double tp = std::pow(t, p);
      const double shifted = c * k.value * tp / p;
      if (t <= 1.0)
        return tp / p * (k.value * std::abs(std::log(t)) + k.log_value + k.value / p) + shifted;
      // For t > 1 the level set |z_N| = 1/t splits the sphere.
      const PartialMoments m = partial_moments(dim, p, 1.0 / t);
      const double L = std::log(t);
      return tp / p * (m.moment_below * (-L + 1.0 / p) + m.log_below) +
             2.0 / (p * p) * m.area_above + tp / p * (m.moment_above * (L - 1.0 / p) - m.log_above) +
             shifted;
    }
    default:
      throw UnsupportedKind("psi_closed_form: no closed form for " + to_string(base.kind()));
  }
}

double scaled_modular(const NFunction& base, int dim, double t, double s) {
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("scaled_modular: need s in (0,1)");
  // r = e^{-sigma}: dr/r = dsigma and r^{1-s} = e^{-(1-s) sigma}.
  return (1.0 - s) * radial_integral(base, dim, std::abs(t), 1.0 - s, 1e-10);
}

std::vector<double> scaled_modular_limit_check(const NFunction& base, int dim, double t,
                                               std::span<const double> s_list) {
  for (std::size_t k = 0; k < s_list.size(); ++k) {
    if (!(s_list[k] > 0.0 && s_list[k] < 1.0))
      throw ConfigError("scaled_modular_limit_check: s must lie in (0,1)");
    if (k > 0 && !(s_list[k] > s_list[k - 1]))
      throw ConfigError("scaled_modular_limit_check: s_list must increase");
  }
  std::vector<double> errors;
  if (t == 0.0) return std::vector<double>(s_list.size(), 0.0);
  const double reference = psi_eval(PsiFunction(base, dim), t);
  for (double s : s_list) errors.push_back(std::abs(scaled_modular(base, dim, t, s) - reference));
  return errors;
}

EquivalenceBand equivalence_band(const PsiFunction& psi, double t_lo, double t_hi, int n) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo) || n < 2)
    throw ConfigError("equivalence_band: need 0 < t_lo < t_hi and n >= 2");
  EquivalenceBand band{std::numeric_limits<double>::infinity(), 0.0};
  const double step = std::log(t_hi / t_lo) / (n - 1);
  for (int k = 0; k < n; ++k) {
    const double t = t_lo * std::exp(step * k);
    const double r = psi.value(t) / psi.base().value(t);
    band.k1 = std::min(band.k1, r);
    band.k2 = std::max(band.k2, r);
  }
  return band;
}

double psi_upper_bound(const NFunction& base, int dim, double t) {
  return sphere_area(dim) * base.log_primitive(t);
}

}  // namespace orlicz
