#include <doctest.h>

#include <cmath>
#include <limits>

#include "generators.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/nfunction.hpp"
#include "orlicz/orlicz_space.hpp"

using namespace orlicz;
using doctest::Approx;

TEST_SUITE("nfunction") {

TEST_CASE("density and value examples") {
  CHECK(NFunction::power(2.0).phi(3.0) == Approx(1.0).epsilon(1e-14));
  CHECK(NFunction::exp_square().derivative(1.0) == Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(NFunction::power(3.0).value(2.0) == Approx(8.0 / 3.0).epsilon(1e-14));
  CHECK(NFunction::exp_square().value(0.0) == 0.0);
  CHECK(NFunction::power(3.0).value(-2.0) == NFunction::power(3.0).value(2.0));
}

TEST_CASE("tabulated density reproduces sqrt(t)") {
  std::vector<std::pair<double, double>> samples;
  for (double t : gen::log_space(1e-3, 1e3, 241)) samples.emplace_back(t, std::sqrt(t));
  const NFunction nf = NFunction::tabulated(samples);
  CHECK(nf.phi(4.0) == Approx(2.0).epsilon(1e-6));
  // Phi = int tau^{3/2} = t^{5/2} * 2/5 for a pure power density.
  CHECK(nf.value(2.0) == Approx(0.4 * std::pow(2.0, 2.5)).epsilon(1e-9));
}

TEST_CASE("MaxPower value against quadrature of its density") {
  const NFunction nf = NFunction::max_power(2.0, 4.0);
  const double t = 1.5;
  // Phi' = t phi(t); integrate the derivative across the kink at 1.
  auto left = [&](double x) { return nf.derivative(std::min(x, std::nextafter(1.0, 0.0))); };
  auto right = [&](double x) { return nf.derivative(x); };
  const double q = gen::simpson(left, 0.0, 1.0, 2000) + gen::simpson(right, 1.0, t, 2000);
  CHECK(q == Approx(nf.value(t)).epsilon(1e-8));
  CHECK(nf.value(t) == Approx(std::pow(t, 4)).epsilon(1e-14));
}

TEST_CASE("conjugate examples") {
  CHECK(conjugate_eval(NFunction::power(2.0), 5.0) == Approx(12.5).epsilon(1e-10));
  for (const NFunction& nf : gen::builtin_kinds()) CHECK(conjugate_eval(nf, 0.0) == 0.0);
  // Brute-force sup over a fine grid as the oracle.
  const NFunction cube = NFunction::power(3.0);
  double best = 0.0;
  for (int k = 0; k <= 200000; ++k) {
    const double t = 3.0 * k / 200000.0;
    best = std::max(best, t - t * t * t / 3.0);
  }
  CHECK(conjugate_eval(cube, 1.0) == Approx(best).epsilon(1e-9));
  CHECK(conjugate_eval(cube, 1.0) == Approx(2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("biconjugation examples") {
  const double samples[] = {0.5, 1.0, 2.0};
  CHECK(biconjugate_check(NFunction::power(2.0), samples) <= 1e-8);
  const auto logs = gen::log_space(1e-2, 1e2, 25);
  CHECK(biconjugate_check(NFunction::sum_power(2.0, 3.0), logs) <= 1e-6);
  const double zero[] = {0.0};
  for (const NFunction& nf : gen::builtin_kinds()) CHECK(biconjugate_check(nf, zero) == 0.0);
}

TEST_CASE("biconjugation for every kind") {
  for (const NFunction& nf : gen::builtin_kinds()) {
    CAPTURE(nf.describe());
    const double hi = nf.kind() == Kind::ExpSquare ? 20.0 : 1e2;
    CHECK(biconjugate_check(nf, gen::log_space(1e-2, hi, 25)) <= 1e-6);
  }
}

TEST_CASE("Young gap property") {
  gen::Rng rng(11);
  for (const NFunction& nf : gen::builtin_kinds()) {
    CAPTURE(nf.describe());
    for (int k = 0; k < 400; ++k) {
      const double s = rng.uniform(0.0, 10.0), t = rng.uniform(0.0, 10.0);
      const double tol = 1e-9 * (1.0 + nf.value(t) + conjugate_eval(nf, s));
      CHECK(young_gap(nf, s, t).gap >= -tol);
      const double on = nf.derivative(t);
      const double tol_eq = 1e-7 * (1.0 + nf.value(t) + conjugate_eval(nf, on));
      CHECK(std::abs(young_gap(nf, on, t).gap) <= tol_eq);
    }
  }
}

TEST_CASE("structural invariants on samples") {
  for (const NFunction& nf : gen::builtin_kinds()) {
    CAPTURE(nf.describe());
    const auto t = gen::log_space(1e-4, 20.0, 300);
    double prev_a = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      CHECK(nf.phi(t[k]) > 0.0);
      const double a = nf.derivative(t[k]);
      CHECK(a > prev_a);
      prev_a = a;
      if (k > 0 && k + 1 < t.size()) {
        // Convexity: secant slopes increase.
        const double left = (nf.value(t[k]) - nf.value(t[k - 1])) / (t[k] - t[k - 1]);
        const double right = (nf.value(t[k + 1]) - nf.value(t[k])) / (t[k + 1] - t[k]);
        CHECK(left <= right * (1.0 + 1e-12));
      }
    }
    CHECK(nf.derivative(1e-8) < 1e-6);
    CHECK(nf.derivative(20.0) > 1.0);
  }
}

TEST_CASE("difference inequalities for Phi on random samples") {
  gen::Rng rng(12);
  for (const NFunction& nf : gen::builtin_kinds()) {
    CAPTURE(nf.describe());
    const double hi = nf.kind() == Kind::ExpSquare ? 4.0 : 10.0;
    for (int k = 0; k < 500; ++k) {
      double a = rng.uniform(0.0, hi), b = rng.uniform(0.0, hi);
      const double th = rng.uniform(0.0, 1.0);
      if (a < b) std::swap(a, b);
      const double da = nf.derivative(a), db = nf.derivative(b);
      const double scale = 1.0 + std::abs(da) + std::abs(db);
      CHECK(nf.value(a) - nf.value(b) <= (da + db) * (a - b) + 1e-10 * scale * (1.0 + std::abs(a - b)));
      CHECK(nf.derivative((1.0 - th) * a + th * b) <= da + db + 1e-10 * scale);
    }
  }
}

TEST_CASE("Sobolev indices") {
  const SobolevIndices p4 = sobolev_indices(NFunction::power(4.0));
  CHECK(p4.ell == Approx(4.0).epsilon(1e-12));
  CHECK(p4.m == Approx(4.0).epsilon(1e-12));
  const SobolevIndices e = sobolev_indices(NFunction::exp_square());
  CHECK(std::abs(e.ell - 2.0) <= 1e-3);
  CHECK(e.m_infinite);
  CHECK(std::isinf(e.m));
  // The exponents are the limits at 0 and infinity; sample far enough out.
  const SobolevIndices sp = sobolev_indices(NFunction::sum_power(2.0, 3.0), 1e-6, 1e6, 512);
  CHECK(std::abs(sp.ell - 2.0) <= 1e-3);
  CHECK(std::abs(sp.m - 3.0) <= 1e-3);
  gen::Rng rng(13);
  for (int k = 0; k < 50; ++k) {
    const NFunction nf = gen::delta2_kind(rng);
    const SobolevIndices idx = sobolev_indices(nf);
    CHECK(idx.ell <= idx.m);
  }
}

TEST_CASE("Delta2 classification") {
  const Delta2Class p2 = delta2_classify(sobolev_indices(NFunction::power(2.0)));
  CHECK(p2.phi_delta2);
  CHECK(p2.conj_delta2);
  const Delta2Class ex = delta2_classify(sobolev_indices(NFunction::exp_square()));
  CHECK_FALSE(ex.phi_delta2);
  CHECK(ex.conj_delta2);
  // An index of 1 up to sampling noise leaves the conjugate outside Delta2.
  CHECK_FALSE(delta2_classify(SobolevIndices{1.0005, 2.0, false}).conj_delta2);
  const SobolevIndices near_one = sobolev_indices(NFunction::power(1.0005));
  CHECK_FALSE(delta2_classify(near_one).conj_delta2);
}

TEST_CASE("modular examples") {
  const NFunction p2 = NFunction::power(2.0);
  CHECK(modular_rho(p2, SampledFunction::uniform(std::vector<double>(8, 0.0), 1.0)) == 0.0);
  CHECK(modular_rho(p2, SampledFunction::uniform(std::vector<double>(10, 1.0), 2.0)) ==
        Approx(1.0).epsilon(1e-14));
  const int n = 10000;
  std::vector<double> x(n);
  for (int k = 0; k < n; ++k) x[k] = (k + 0.5) / n;
  CHECK(modular_rho(NFunction::power(3.0), SampledFunction::uniform(x, 1.0)) ==
        Approx(1.0 / 12.0).epsilon(1e-6));
}

TEST_CASE("Luxemburg norm examples") {
  const NFunction p2 = NFunction::power(2.0);
  CHECK(luxemburg_norm(p2, SampledFunction::uniform(std::vector<double>(4, 0.0), 1.0)) == 0.0);
  CHECK(luxemburg_norm(p2, SampledFunction::uniform(std::vector<double>(4, 3.0), 1.0)) ==
        Approx(3.0 / std::sqrt(2.0)).epsilon(1e-10));
  // (e^{1/l^2} - 1)/2 = 1 solved independently: l = 1/sqrt(log 3).
  CHECK(luxemburg_norm(NFunction::exp_square(),
                       SampledFunction::uniform(std::vector<double>(4, 1.0), 1.0)) ==
        Approx(1.0 / std::sqrt(std::log(3.0))).epsilon(1e-10));
}

TEST_CASE("Luxemburg homogeneity and modular bounds") {
  gen::Rng rng(14);
  for (int k = 0; k < 40; ++k) {
    const double p = rng.uniform(1.2, 5.0);
    const NFunction nf = NFunction::power(p);
    const auto u = SampledFunction::uniform(rng.vector(64, -2.0, 2.0), 1.0);
    const double norm = luxemburg_norm(nf, u);
    for (double c : {-2.0, 0.5, 3.0}) {
      SampledFunction cu = u;
      for (double& x : cu.values) x *= c;
      CHECK(luxemburg_norm(nf, cu) == Approx(std::abs(c) * norm).epsilon(1e-10));
    }
    CHECK(modular_rho(nf, u) == Approx(std::pow(norm, p)).epsilon(1e-8));
  }
}

TEST_CASE("Holder inequality") {
  const NFunction p2 = NFunction::power(2.0);
  CHECK(holder_check(p2, SampledFunction::uniform(std::vector<double>(16, 0.0), 1.0),
                     SampledFunction::uniform(std::vector<double>(16, 1.0), 1.0)) == 0.0);
  CHECK(holder_check(p2, SampledFunction::uniform(std::vector<double>(16, 1.0), 1.0),
                     SampledFunction::uniform(std::vector<double>(16, 1.0), 1.0)) ==
        Approx(0.0).epsilon(1e-10).scale(1.0));
  gen::Rng rng(15);
  const NFunction p3 = NFunction::power(3.0);
  for (int k = 0; k < 100; ++k) {
    const auto u = SampledFunction::uniform(rng.vector(512, 0.0, 1.0), 1.0);
    const auto v = SampledFunction::uniform(rng.vector(512, 0.0, 1.0), 1.0);
    CHECK(holder_check(p3, u, v) >= -1e-8);
  }
}

TEST_CASE("ExpSquare overflow is reported") {
  CHECK_THROWS_AS(NFunction::exp_square().value(30.0), NonFinite);
}

TEST_CASE("JSON round trip and errors") {
  for (const NFunction& nf : gen::builtin_kinds()) {
    const NFunction back = NFunction::from_json(nf.to_json());
    CHECK(back.kind() == nf.kind());
    CHECK(back.value(1.7) == nf.value(1.7));
  }
  CHECK_THROWS_AS(NFunction::from_json(nlohmann::json{{"kind", "nope"}}), ConfigError);
  CHECK_THROWS_AS(NFunction::from_json(nlohmann::json{{"kind", "power"}}), ConfigError);
  CHECK_THROWS_AS(NFunction::power(1.0), ConfigError);
}

}
