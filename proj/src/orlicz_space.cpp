#include "orlicz/orlicz_space.hpp"

#include <cmath>
#include <limits>

#include "orlicz/errors.hpp"

namespace orlicz {

SampledFunction SampledFunction::uniform(std::vector<double> values, double measure) {
  SampledFunction f;
  const double w = values.empty() ? 0.0 : measure / static_cast<double>(values.size());
  f.weights.assign(values.size(), w);
  f.values = std::move(values);
  return f;
}

double SampledFunction::measure() const {
  double m = 0.0;
  for (double w : weights) m += w;
  return m;
}

namespace {

void check_shape(const SampledFunction& u) {
  if (u.values.size() != u.weights.size())
    throw ConfigError("SampledFunction: values and weights differ in length");
}

// Modular of u / lambda, with overflow mapped to +inf.
double scaled_modular(const std::function<double(double)>& young,
                      const SampledFunction& u, double lambda) {
  double sum = 0.0;
  try {
    for (std::size_t k = 0; k < u.size(); ++k)
      if (u.values[k] != 0.0) sum += u.weights[k] * young(u.values[k] / lambda);
  } catch (const NonFinite&) {
    return std::numeric_limits<double>::infinity();
  }
  return std::isfinite(sum) ? sum : std::numeric_limits<double>::infinity();
}

}  // namespace

double modular_rho(const NFunction& nf, const SampledFunction& u) {
  check_shape(u);
  double sum = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!std::isfinite(u.values[k])) throw NonFinite("modular_rho: non-finite sample");
    sum += u.weights[k] * nf.value(u.values[k]);
  }
  if (!std::isfinite(sum)) throw NonFinite("modular_rho: overflow");
  return sum;
}

double luxemburg_norm(const std::function<double(double)>& young,
                      const SampledFunction& u) {
  check_shape(u);
  double amax = 0.0;
  for (double v : u.values) {
    if (!std::isfinite(v)) throw NonFinite("luxemburg_norm: non-finite sample");
    amax = std::max(amax, std::abs(v));
  }
  if (amax == 0.0) return 0.0;

  // rho(u/lambda) is nonincreasing in lambda; find lo with rho > 1 >= rho(hi).
  double lo = amax, hi = amax;
  while (scaled_modular(young, u, hi) > 1.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw BracketFailure("luxemburg_norm: no upper bracket");
  }
  if (lo == hi) {
    while (scaled_modular(young, u, lo) <= 1.0) {
      hi = lo;
      lo *= 0.5;
      if (lo == 0.0) throw BracketFailure("luxemburg_norm: no lower bracket");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (scaled_modular(young, u, mid) > 1.0) lo = mid;
    else hi = mid;
  }
  return hi;
}

double luxemburg_norm(const NFunction& nf, const SampledFunction& u) {
  return luxemburg_norm([&nf](double t) { return nf.value(t); }, u);
}

double holder_check(const NFunction& nf, const SampledFunction& u,
                    const SampledFunction& v) {
  check_shape(u);
  check_shape(v);
  if (u.size() != v.size()) throw ConfigError("holder_check: carriers differ");
  double pairing = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) pairing += u.weights[k] * u.values[k] * v.values[k];
  const double nu = luxemburg_norm(nf, u);
  if (nu == 0.0) return -std::abs(pairing);
  const double nv = luxemburg_norm([&nf](double s) { return conjugate_eval(nf, s); }, v);
  return 2.0 * nu * nv - std::abs(pairing);
}

}  // namespace orlicz
