#include "orlicz/local_modular.hpp"

#include <cmath>

#include "orlicz/errors.hpp"

namespace orlicz {

LocalContext::LocalContext(GridDomain grid, PsiFunction psi)
    : grid_(grid), psi_(std::move(psi)) {
  if (psi_.dim() != grid_.dim) throw ConfigError("LocalContext: Psi dimension must match the grid");
}

double LocalContext::evaluate(std::span<const double> u, std::span<double> grad,
                              std::span<const double> dir, double* slope) const {
  if (u.size() != grid_.size()) throw ConfigError("LocalContext: grid function size mismatch");
  const bool want_grad = !grad.empty();
  const bool want_dir = !dir.empty();
  const bool need_derivative = want_grad || want_dir;
  if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
  const int n = grid_.n;
  const double h = grid_.h();
  double value = 0.0, dslope = 0.0;
  auto push = [&](std::size_t i, double dv) {
    if (want_grad) grad[i] += dv;
    if (want_dir) dslope += dv * dir[i];
  };

  if (grid_.dim == 1) {
    for (int e = 0; e <= n; ++e) {
      const double left = e >= 1 ? u[e - 1] : 0.0;
      const double right = e + 1 <= n ? u[e] : 0.0;
      const double g = (right - left) / h;
      if (g == 0.0) continue;
      value += h * psi_.value(g);
      if (!need_derivative) continue;
      const double dv = psi_.derivative(std::abs(g)) * (g > 0 ? 1.0 : -1.0);
      if (e + 1 <= n) push(static_cast<std::size_t>(e), dv);
      if (e >= 1) push(static_cast<std::size_t>(e - 1), -dv);
    }
  } else {
    auto inside = [n](int a, int b) { return a >= 1 && a <= n && b >= 1 && b <= n; };
    auto index = [n](int a, int b) { return static_cast<std::size_t>((b - 1) * n + (a - 1)); };
    auto U = [&](int a, int b) { return inside(a, b) ? u[index(a, b)] : 0.0; };
    const double w = 0.25 * h * h;
    for (int b = 0; b <= n + 1; ++b) {
      for (int a = 0; a <= n + 1; ++a) {
        const double u0 = U(a, b);
        for (int dx : {-1, 1}) {
          for (int dy : {-1, 1}) {
            const double gx = (U(a + dx, b) - u0) * dx / h;
            const double gy = (U(a, b + dy) - u0) * dy / h;
            const double m = std::hypot(gx, gy);
            if (m == 0.0) continue;
            value += w * psi_.value(m);
            if (!need_derivative) continue;
            const double f = w * psi_.derivative(m) / m;
            if (inside(a + dx, b)) push(index(a + dx, b), f * gx * dx / h);
            if (inside(a, b + dy)) push(index(a, b + dy), f * gy * dy / h);
            if (inside(a, b)) push(index(a, b), -f * (gx * dx + gy * dy) / h);
          }
        }
      }
    }
  }
  if (!std::isfinite(value)) throw NonFinite("local modular overflow");
  if (slope) *slope = dslope;
  return value;
}

double LocalContext::value(std::span<const double> u) const { return evaluate(u, {}, {}, nullptr); }

double LocalContext::value_and_gradient(std::span<const double> u, std::span<double> g) const {
  if (g.size() != grid_.size()) throw ConfigError("LocalContext: gradient size mismatch");
  return evaluate(u, g, {}, nullptr);
}

double LocalContext::pairing(std::span<const double> u, std::span<const double> v) const {
  if (v.size() != grid_.size()) throw ConfigError("LocalContext: grid function size mismatch");
  double slope = 0.0;
  evaluate(u, {}, v, &slope);
  return 0.5 * slope;
}

double local_modular(const LocalContext& ctx, std::span<const double> u) { return ctx.value(u); }

}  // namespace orlicz
