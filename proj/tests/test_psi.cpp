#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/psi.hpp"
#include "orlicz/quadrature.hpp"

using namespace orlicz;
using doctest::Approx;
constexpr double pi = std::numbers::pi;

namespace {

// int_{S^{N-1}} f(|z_N|) dS by Simpson in the polar angle, N = 2 or 3.
double sphere_simpson(int dim, const std::function<double(double)>& f) {
  if (dim == 2) return gen::simpson([&](double th) { return f(std::abs(std::sin(th))); }, 0.0, 2 * pi, 20000);
  return 2 * pi * gen::simpson([&](double th) { return f(std::abs(std::cos(th))) * std::sin(th); }, 0.0, pi, 20000);
}

}  // namespace

TEST_SUITE("psi") {

TEST_CASE("sphere moments") {
  CHECK(sphere_moment(2, 2.0).value == Approx(pi).epsilon(1e-12));
  CHECK(sphere_moment(1, 3.7).value == Approx(2.0).epsilon(1e-14));
  CHECK(sphere_moment(3, 2.0).value == Approx(4 * pi / 3).epsilon(1e-12));
  CHECK(sphere_moment(2, 3.0).value == Approx(8.0 / 3.0).epsilon(1e-12));
  for (int dim : {2, 3})
    for (double p : {1.5, 2.0, 2.5, 3.0}) {
      CAPTURE(dim);
      CAPTURE(p);
      CHECK(sphere_moment(dim, p).value ==
            Approx(sphere_simpson(dim, [&](double z) { return std::pow(z, p); })).epsilon(1e-9));
      CHECK(sphere_moment(dim, p).log_value ==
            Approx(sphere_simpson(dim, [&](double z) { return z > 0 ? std::pow(z, p) * std::abs(std::log(z)) : 0.0; }))
                .epsilon(1e-7));
    }
  for (int dim = 1; dim <= 4; ++dim) {
    const SphereRule r = sphere_rule(dim);
    double area = 0.0;
    for (double w : r.weights) area += w;
    CHECK(area == Approx(sphere_area(dim)).epsilon(1e-12));
  }
}

TEST_CASE("psi_eval examples") {
  for (const NFunction& nf : gen::builtin_kinds()) CHECK(psi_eval(PsiFunction(nf, 2), 0.0) == 0.0);
  // Power(2) is t^2/2 here, so Psi = k_{N,2} t^2 / 4.
  CHECK(psi_eval(PsiFunction(NFunction::power(2.0), 2), 3.0) == Approx(pi * 9.0 / 4.0).epsilon(1e-8));
  CHECK(psi_eval(PsiFunction(NFunction::sum_power(2.0, 3.0), 2), 1.0) ==
        Approx(pi / 2 + 8.0 / 9.0).epsilon(1e-8));
}

TEST_CASE("closed form examples") {
  CHECK(psi_closed_form(NFunction::power(2.0), 2, 1.0) == Approx(pi / 4).epsilon(1e-12));
  CHECK(psi_closed_form(NFunction::max_power(3.0, 2.0), 2, 0.5) == Approx(pi * 0.25 / 2).epsilon(1e-12));
  const NFunction pl = NFunction::power_log(2.0);
  const double klog = sphere_simpson(2, [](double z) { return z > 0 ? z * z * std::abs(std::log(z)) : 0.0; });
  CHECK(psi_closed_form(pl, 2, 1.0) ==
        Approx(0.5 * (klog + pi / 2) + pl.shift() * pi / 2).epsilon(1e-8));
  CHECK_THROWS_AS(psi_closed_form(NFunction::exp_square(), 2, 1.0), UnsupportedKind);
  CHECK_FALSE(has_psi_closed_form(NFunction::exp_square()));
}

TEST_CASE("quadrature agrees with the closed forms") {
  const std::vector<NFunction> kinds{NFunction::power(2.0), NFunction::power(3.0),
                                     NFunction::power_log(2.0), NFunction::max_power(3.0, 2.0),
                                     NFunction::sum_power(2.0, 3.0)};
  for (const NFunction& nf : kinds)
    for (int dim = 1; dim <= 3; ++dim) {
      const PsiFunction psi(nf, dim);
      for (double t : {0.25, 1.0, 4.0, 0.7, 2.5}) {
        CAPTURE(nf.describe());
        CAPTURE(dim);
        CAPTURE(t);
        const double c = psi_closed_form(nf, dim, t);
        CHECK(std::abs(psi_eval(psi, t) - c) <= 1e-6 * (1.0 + std::abs(c)));
        CHECK(std::abs(psi.value(t) - c) <= 1e-6 * (1.0 + std::abs(c)));
      }
    }
}

TEST_CASE("fast route agrees with the defining quadrature") {
  for (const NFunction& nf : gen::builtin_kinds())
    for (int dim = 1; dim <= 3; ++dim) {
      const PsiFunction psi(nf, dim);
      for (double t : {0.1, 0.8, 2.0}) {
        CAPTURE(nf.describe());
        CHECK(psi.value(t) == Approx(psi_eval(psi, t)).epsilon(1e-8));
      }
    }
}

TEST_CASE("structure: monotone, strictly convex, bounded above") {
  for (const NFunction& nf : gen::builtin_kinds())
    for (int dim = 1; dim <= 3; ++dim) {
      CAPTURE(nf.describe());
      CAPTURE(dim);
      const PsiFunction psi(nf, dim);
      const double hi = nf.kind() == Kind::ExpSquare ? 3.0 : 10.0;
      const int n = 60;
      const double h = hi / n;
      std::vector<double> v(n + 1);
      for (int k = 0; k <= n; ++k) v[k] = psi_eval(psi, k * h);
      for (int k = 1; k <= n; ++k) {
        CHECK(v[k] > v[k - 1]);
        // Upper envelope |S| int_0^t Phi(r)/r dr, the latter by independent quadrature.
        const double G = quad::integrate([&](double r) { return r > 0 ? nf.value(r) / r : 0.0; }, 0.0, k * h).value;
        CHECK(v[k] <= sphere_area(dim) * G * (1.0 + 1e-8) + 1e-8);
        CHECK(psi_upper_bound(nf, dim, k * h) == Approx(sphere_area(dim) * G).epsilon(1e-8));
      }
      for (int k = 1; k < n; ++k) CHECK(v[k + 1] - 2 * v[k] + v[k - 1] > 0.0);
      // Off the kink at t = 1; the step balances truncation against quadrature noise.
      for (double t : {0.3, 0.8, 2.0}) {
        const double e = 1e-3 * t;
        auto f = [&](double x) { return psi_eval(psi, x); };
        const double d = (8.0 * (f(t + e) - f(t - e)) - (f(t + 2 * e) - f(t - 2 * e))) / (12.0 * e);
        CHECK(d > 0.0);
        CHECK(d <= sphere_area(dim) * nf.value(t) / t * (1.0 + 1e-6) + 1e-6);
        CHECK(psi.derivative(t) == Approx(d).epsilon(1e-5));
      }
    }
}

TEST_CASE("equivalence band") {
  gen::Rng rng(21);
  for (int k = 0; k < 12; ++k) {
    const NFunction nf = gen::delta2_kind(rng);
    for (int dim = 1; dim <= 3; ++dim) {
      const EquivalenceBand b = equivalence_band(PsiFunction(nf, dim));
      CHECK(b.k1 > 0.0);
      CHECK(b.k1 <= b.k2);
      CHECK(std::isfinite(b.k2));
    }
  }
}

TEST_CASE("scaled radial integral") {
  const std::vector<double> s{0.5, 0.9, 0.99};
  for (double e : scaled_modular_limit_check(NFunction::power(2.0), 2, 1.0, s)) CHECK(e <= 1e-4);
  CHECK(scaled_modular(NFunction::power(2.0), 2, 1.0, 0.99) == Approx(pi / 4).epsilon(1e-8));
  for (double e : scaled_modular_limit_check(NFunction::sum_power(2.0, 3.0), 3, 0.0, s)) CHECK(e == 0.0);
  for (double e : scaled_modular_limit_check(NFunction::exp_square(), 1, 0.5, s)) CHECK(e <= 1e-8);
}

}
