#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/frac_modular.hpp"
#include "orlicz/local_modular.hpp"
#include "orlicz/psi.hpp"

using namespace orlicz;
using doctest::Approx;

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

std::vector<double> bump_1d(int n) {
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = std::sin(std::numbers::pi * (i + 1.0) / (n + 1));
  return u;
}

std::vector<double> reflect(const GridDomain& g, const std::vector<double>& u) {
  std::vector<double> r(u.size());
  if (g.dim == 1) {
    for (int i = 0; i < g.n; ++i) r[i] = u[g.n - 1 - i];
  } else {
    for (int b = 0; b < g.n; ++b)
      for (int a = 0; a < g.n; ++a) r[b * g.n + a] = u[b * g.n + (g.n - 1 - a)];
  }
  return r;
}

struct Draw {
  NFunction nf;
  double s;
  double amplitude;
};

Draw random_case(gen::Rng& rng) {
  const double s = rng.uniform(0.1, 0.95);
  if (rng.integer(0, 4) == 0) return {NFunction::exp_square(), s, 0.15};
  return {gen::delta2_kind(rng), s, 1.0};
}

}  // namespace

TEST_SUITE("frac_modular") {

TEST_CASE("pair enumeration and kernel weights") {
  const FracContext tiny(GridDomain::make(1, 2, 2), NFunction::power(2.0), 0.5);
  // 6 nodes, ordered pairs minus the 4*3 halo-only ones.
  CHECK(tiny.pair_count() == 6.0 * 5.0 - 4.0 * 3.0);
  const FracContext ctx(GridDomain::make(1, 3, 3), NFunction::power(2.0), 0.3);
  const double h = 0.25;
  CHECK(ctx.kernel_weight(0.5) == Approx(h * h / 0.5).epsilon(1e-15));
  CHECK_THROWS_AS(FracContext(GridDomain::make(2, 64, 64), NFunction::power(2.0), 0.5), CapacityExceeded);
  CHECK_THROWS_AS(FracContext(GridDomain::make(1, 8, 8), NFunction::power(2.0), 1.0), ConfigError);
}

TEST_CASE("single node against hand-summed pair terms") {
  const double s = 0.5;
  const GridDomain grid = GridDomain::make(1, 1, 2);
  const FracContext ctx(grid, NFunction::power(2.0), s);
  const double h = 0.5;
  // Interior node at 1/2; halo nodes at distance h and 2h on each side.
  double pairs = 0.0;
  for (double d : {h, 2 * h, h, 2 * h}) pairs += 2.0 * (h * h / d) * 0.5 * std::pow(1.0 / std::pow(d, s), 2);
  pairs *= (1.0 - s);
  const double rest = 2.0 * ctx.self_term(1.0 / h) + ctx.tail_term(0, 1.0);
  const std::vector<double> u{1.0};
  CHECK(modular_I1(ctx, u) == Approx(pairs + rest).epsilon(1e-13));
  const oracle::Matrix A = oracle::assemble_quadratic_1d(1, 2, s);
  CHECK(modular_I1(ctx, u) == Approx(0.5 * A(0, 0)).epsilon(1e-12));
}

TEST_CASE("quadratic case reduces to the assembled matrix") {
  gen::Rng rng(31);
  for (double s : {0.2, 0.5, 0.85}) {
    const int n = 24;
    const oracle::Matrix A = oracle::assemble_quadratic_1d(n, n, s);
    const FracContext ctx(GridDomain::make(1, n, n), NFunction::power(2.0), s);
    for (int k = 0; k < 5; ++k) {
      const auto u = rng.vector(n, -1.0, 1.0), v = rng.vector(n, -1.0, 1.0);
      const auto Au = A.apply(u), Av = A.apply(v);
      CHECK(modular_I1(ctx, u) == Approx(0.5 * dot(u, Au)).epsilon(1e-9));
      CHECK(std::abs(weak_pairing(ctx, u, v) - 0.5 * dot(v, Au)) <= 1e-9 * std::sqrt(dot(u, Au) * dot(v, Av)));
      const auto g = energy_gradient(ctx, u);
      for (int i = 0; i < n; ++i) CHECK(g[i] == Approx(Au[i]).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("zero function and trivial identities") {
  for (const NFunction& nf : gen::builtin_kinds()) {
    const FracContext ctx(GridDomain::make(1, 15, 15), nf, 0.4);
    const std::vector<double> zero(15, 0.0);
    CHECK(modular_I1(ctx, zero) == 0.0);
    CHECK(gagliardo_seminorm(ctx, zero) == 0.0);
    for (double g : energy_gradient(ctx, zero)) CHECK(g == 0.0);
    const auto u = bump_1d(15);
    CHECK(weak_pairing(ctx, u, zero) == 0.0);
  }
}

TEST_CASE("gradient against central differences") {
  gen::Rng rng(32);
  for (int dim : {1, 2}) {
    const int n = dim == 1 ? 31 : 7;
    const GridDomain grid = GridDomain::make(dim, n, n);
    for (int k = 0; k < 6; ++k) {
      const Draw c = random_case(rng);
      CAPTURE(c.nf.describe());
      const FracContext ctx(grid, c.nf, c.s);
      const auto u = rng.vector(grid.size(), -c.amplitude, c.amplitude);
      const auto g = energy_gradient(ctx, u);
      for (std::size_t i = 0; i < u.size(); i += 3) {
        auto up = u, um = u;
        up[i] += 1e-6;
        um[i] -= 1e-6;
        CHECK(std::abs(g[i] - (ctx.value(up) - ctx.value(um)) / 2e-6) <= 1e-5);
      }
    }
  }
}

TEST_CASE("pairing identities") {
  gen::Rng rng(33);
  for (int k = 0; k < 20; ++k) {
    const Draw c = random_case(rng);
    const int n = 20;
    const FracContext ctx(GridDomain::make(1, n, n), c.nf, c.s);
    const auto u = rng.vector(n, -c.amplitude, c.amplitude);
    const auto v = rng.vector(n, -1.0, 1.0), w = rng.vector(n, -1.0, 1.0);
    const auto g = energy_gradient(ctx, u);
    const double pv = weak_pairing(ctx, u, v), pw = weak_pairing(ctx, u, w);
    const double scale = 1.0 + std::abs(pv) + std::abs(pw);
    CHECK(std::abs(dot(g, v) - 2.0 * pv) <= 1e-12 * scale);
    std::vector<double> mix(n);
    for (int i = 0; i < n; ++i) mix[i] = 2.5 * v[i] - 0.75 * w[i];
    CHECK(std::abs(weak_pairing(ctx, u, mix) - (2.5 * pv - 0.75 * pw)) <= 1e-10 * scale);
    CHECK(dot(g, u) >= 0.0);
  }
}

TEST_CASE("reflection symmetry") {
  gen::Rng rng(34);
  for (int dim : {1, 2}) {
    const int n = dim == 1 ? 25 : 6;
    const GridDomain grid = GridDomain::make(dim, n, n);
    for (int k = 0; k < 4; ++k) {
      const Draw c = random_case(rng);
      const FracContext ctx(grid, c.nf, c.s);
      const auto u = rng.vector(grid.size(), -c.amplitude, c.amplitude);
      const auto v = rng.vector(grid.size(), -1.0, 1.0);
      CHECK(ctx.value(reflect(grid, u)) == Approx(ctx.value(u)).epsilon(1e-12));
      CHECK(ctx.pairing(reflect(grid, u), reflect(grid, v)) ==
            Approx(ctx.pairing(u, v)).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("positive part, convexity, monotonicity, scaling") {
  gen::Rng rng(35);
  for (int k = 0; k < 200; ++k) {
    const Draw c = random_case(rng);
    CAPTURE(c.nf.describe());
    const int n = 16;
    const FracContext ctx(GridDomain::make(1, n, n), c.nf, c.s);
    const auto u = rng.vector(n, -c.amplitude, c.amplitude), v = rng.vector(n, -c.amplitude, c.amplitude);
    auto up = u;
    for (double& x : up) x = std::max(x, 0.0);
    const double iu = ctx.value(u), iv = ctx.value(v);
    CHECK(ctx.value(up) <= iu + 1e-10 * (1.0 + iu));
    for (double th : {0.25, 0.5, 0.75}) {
      std::vector<double> m(n);
      for (int i = 0; i < n; ++i) m[i] = th * u[i] + (1 - th) * v[i];
      CHECK(ctx.value(m) <= th * iu + (1 - th) * iv + 1e-10 * (1.0 + iu + iv));
    }
    const auto gu = energy_gradient(ctx, u), gv = energy_gradient(ctx, v);
    double mono = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i) {
      mono += (gu[i] - gv[i]) * (u[i] - v[i]);
      scale += std::abs((gu[i] - gv[i]) * (u[i] - v[i]));
    }
    CHECK(mono >= -1e-10 * (1.0 + scale));
    auto u2 = u;
    for (double& x : u2) x *= 2.0;
    if (c.nf.kind() != Kind::ExpSquare || c.amplitude * 2 < 0.5) CHECK(ctx.value(u2) > iu);
  }
}

TEST_CASE("Gagliardo seminorm") {
  gen::Rng rng(36);
  for (int k = 0; k < 10; ++k) {
    const Draw c = random_case(rng);
    const FracContext ctx(GridDomain::make(1, 20, 20), c.nf, c.s);
    const auto u = rng.vector(20, -c.amplitude, c.amplitude);
    const double lam = gagliardo_seminorm(ctx, u);
    auto scaled = u;
    for (double& x : scaled) x /= lam;
    CHECK(ctx.value(scaled) == Approx(1.0).epsilon(1e-9));
    auto u3 = u;
    for (double& x : u3) x *= 3.0;
    CHECK(gagliardo_seminorm(ctx, u3) == Approx(3.0 * lam).epsilon(1e-9));
  }
}

TEST_CASE("local modular") {
  const int n = 63;
  const GridDomain grid = GridDomain::make(1, n, n);
  // Power(2) base in one dimension gives Psi(t) = t^2/2.
  const LocalContext local(grid, PsiFunction(NFunction::power(2.0), 1));
  CHECK(local_modular(local, std::vector<double>(n, 0.0)) == 0.0);
  std::vector<double> tent(n);
  for (int i = 0; i < n; ++i) {
    const double x = (i + 1.0) / (n + 1);
    tent[i] = std::min(x, 1.0 - x);
  }
  CHECK(local_modular(local, tent) == Approx(0.5).epsilon(1e-12));

  const int m = 127;
  const GridDomain fine = GridDomain::make(1, m, m);
  const auto u = bump_1d(m);
  const double loc = local_modular(LocalContext(fine, PsiFunction(NFunction::power(2.0), 1)), u);
  const double frac = modular_I1(FracContext(fine, NFunction::power(2.0), 0.999), u);
  CHECK(std::abs(frac - loc) <= 0.05 * loc);
}

TEST_CASE("local energy gradient") {
  gen::Rng rng(37);
  for (int dim : {1, 2}) {
    const int n = dim == 1 ? 20 : 6;
    const GridDomain grid = GridDomain::make(dim, n, n);
    for (const NFunction& nf : {NFunction::power(3.0), NFunction::exp_square(), NFunction::power_log(2.0)}) {
      const LocalContext ctx(grid, PsiFunction(nf, dim));
      // Small amplitude keeps ExpSquare values O(1), so differences are not swamped by roundoff.
      const double amp = nf.kind() == Kind::ExpSquare ? 0.03 : 0.1;
      const auto u = rng.vector(grid.size(), -amp, amp), v = rng.vector(grid.size(), -1.0, 1.0);
      const auto g = energy_gradient(ctx, u);
      CHECK(dot(g, v) == Approx(2.0 * ctx.pairing(u, v)).epsilon(1e-12).scale(1.0));
      for (std::size_t i = 0; i < u.size(); i += 2) {
        auto up = u, um = u;
        up[i] += 1e-6;
        um[i] -= 1e-6;
        CHECK(std::abs(g[i] - (ctx.value(up) - ctx.value(um)) / 2e-6) <= 1e-5);
      }
    }
  }
}

TEST_CASE("2-D fractional tends to the local modular") {
  const int n = 15;
  const GridDomain grid = GridDomain::make(2, n, n);
  std::vector<double> u(grid.size());
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a)
      u[b * n + a] = std::sin(std::numbers::pi * (a + 1.0) / (n + 1)) * std::sin(std::numbers::pi * (b + 1.0) / (n + 1));
  const double loc = local_modular(LocalContext(grid, PsiFunction(NFunction::power(2.0), 2)), u);
  const double near = FracContext(grid, NFunction::power(2.0), 0.999).value(u);
  CHECK(std::abs(near - loc) <= 0.05 * loc);
}

TEST_CASE("Poincare check") {
  const int n = 31;
  const FracContext ctx(GridDomain::make(1, n, n), NFunction::power(2.0), 0.5);
  const PoincareResult zero = poincare_check(ctx, std::vector<double>(n, 0.0));
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
  gen::Rng rng(38);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> u(n);
    const double c = rng.uniform(0.2, 0.8), w = rng.uniform(0.05, 0.3), a = rng.uniform(0.1, 3.0);
    for (int i = 0; i < n; ++i) {
      const double x = (i + 1.0) / (n + 1);
      u[i] = a * std::max(0.0, 1.0 - std::pow((x - c) / w, 2));
    }
    const PoincareResult r = poincare_check(ctx, u);
    CHECK(r.slack >= 0.0);
    CHECK(r.C_used >= 1.0);
  }
  std::vector<double> tent(n);
  for (int i = 0; i < n; ++i) tent[i] = std::min(i + 1.0, n - i + 0.0) / (n + 1);
  for (const NFunction& nf : gen::builtin_kinds())
    CHECK(std::isfinite(poincare_check(FracContext(GridDomain::make(1, n, n), nf, 0.5), tent).slack));
}

TEST_CASE("ExpSquare overflow surfaces as NonFinite") {
  const FracContext ctx(GridDomain::make(1, 15, 15), NFunction::exp_square(), 0.5);
  CHECK_THROWS_AS(ctx.value(std::vector<double>(15, 50.0)), NonFinite);
}

TEST_CASE("grid serialization") {
  const GridDomain g = GridDomain::from_json(nlohmann::json{{"dim", 2}, {"n", 3}});
  CHECK(g.halo == 3);
  CHECK(GridDomain::from_json(g.to_json()).n == 3);
  GridFunction f = GridFunction::constant(GridDomain::make(1, 3, 3), 2.0);
  CHECK(f.to_csv() == "x,value\n0.25,2\n0.5,2\n0.75,2\n");
}

}
