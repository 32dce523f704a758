#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace orlicz::oracle {

namespace {

struct State {
  double u, v;  // u and du/dy, y the distance from the midpoint
};

// Dormand-Prince 5(4) with step control on |u| errors; integrates
// u'' = -u^{-gamma}/kappa from y0 to y1 or until u crosses 0.
// Returns the final y; the state is updated in place.
class DormandPrince {
 public:
  DormandPrince(double kappa, double gamma, double tol) : kappa_(kappa), gamma_(gamma), tol_(tol) {}

  double run(State& st, double y0, double y1, bool stop_at_zero) const {
    double y = y0;
    double dy = std::min(1e-3, y1 - y0);
    while (y < y1) {
      dy = std::min(dy, y1 - y);
      State next{};
      double err = 0.0;
      if (!step(st, dy, next, err)) {
        // Some stage left u > 0: the zero lies within this step.
        if (stop_at_zero && dy < 1e-14) {
          // u' is finite at the zero, so one Newton step locates it.
          return y + st.u / std::max(-st.v, 1e-300);
        }
        dy *= 0.5;
        if (dy < 1e-300) throw std::runtime_error("shooting: step underflow");
        continue;
      }
      if (err > tol_) {
        dy *= std::max(0.1, 0.9 * std::pow(tol_ / err, 0.2));
        continue;
      }
      st = next;
      y += dy;
      dy *= std::min(4.0, 0.9 * std::pow(tol_ / std::max(err, 1e-300), 0.2));
    }
    return y;
  }

 private:
  State f(const State& s) const { return {s.v, -std::pow(s.u, -gamma_) / kappa_}; }

  bool step(const State& s, double h, State& out, double& err) const {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    (void)c2; (void)c3; (void)c4; (void)c5;
    auto add = [](const State& x, double h, std::initializer_list<std::pair<double, State>> ks) {
      State r = x;
      for (const auto& [c, k] : ks) {
        r.u += h * c * k.u;
        r.v += h * c * k.v;
      }
      return r;
    };
    auto ok = [](const State& x) { return x.u > 0.0; };
    const State k1 = f(s);
    State t = add(s, h, {{a21, k1}});
    if (!ok(t)) return false;
    const State k2 = f(t);
    t = add(s, h, {{a31, k1}, {a32, k2}});
    if (!ok(t)) return false;
    const State k3 = f(t);
    t = add(s, h, {{a41, k1}, {a42, k2}, {a43, k3}});
    if (!ok(t)) return false;
    const State k4 = f(t);
    t = add(s, h, {{a51, k1}, {a52, k2}, {a53, k3}, {a54, k4}});
    if (!ok(t)) return false;
    const State k5 = f(t);
    t = add(s, h, {{a61, k1}, {a62, k2}, {a63, k3}, {a64, k4}, {a65, k5}});
    if (!ok(t)) return false;
    const State k6 = f(t);
    out = add(s, h, {{b1, k1}, {b3, k3}, {b4, k4}, {b5, k5}, {b6, k6}});
    if (!ok(out)) return false;
    const State k7 = f(out);
    const double eu = h * (e1 * k1.u + e3 * k3.u + e4 * k4.u + e5 * k5.u + e6 * k6.u + e7 * k7.u);
    err = std::abs(eu);
    return true;
  }

  double kappa_, gamma_, tol_;
};

constexpr double kShootTol = 1e-13;

// Distance from the midpoint to the first zero for peak M.
double half_width(double M, double kappa, double gamma) {
  DormandPrince dp(kappa, gamma, kShootTol * std::max(M, 1e-3));
  State st{M, 0.0};
  return dp.run(st, 0.0, 1e6, true);
}

}  // namespace

ShootingSolution shoot_singular_bvp(double kappa, double gamma) {
  // The half width grows with M; bracket 1/2 and bisect.
  double lo = 1e-3, hi = 1.0;
  while (half_width(hi, kappa, gamma) < 0.5) hi *= 2.0;
  while (half_width(lo, kappa, gamma) > 0.5) lo *= 0.5;
  for (int it = 0; it < 100 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (half_width(mid, kappa, gamma) < 0.5) lo = mid;
    else hi = mid;
  }
  return {0.5 * (lo + hi), kappa, gamma};
}

std::vector<double> ShootingSolution::sample(const std::vector<double>& x) const {
  // Integrate outward from the midpoint once, stopping at each requested
  // distance in increasing order.
  std::vector<std::size_t> order(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(x[a] - 0.5) < std::abs(x[b] - 0.5); });
  DormandPrince dp(kappa, gamma, kShootTol * peak);
  State st{peak, 0.0};
  double y = 0.0;
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t k : order) {
    const double target = std::abs(x[k] - 0.5);
    if (target >= 0.5) {
      out[k] = 0.0;
      continue;
    }
    if (target > y) y = dp.run(st, y, target, false);
    out[k] = st.u;
  }
  return out;
}

std::vector<double> Matrix::apply(const std::vector<double>& x) const {
  std::vector<double> y(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) y[i] += (*this)(i, j) * x[j];
  return y;
}

Matrix assemble_quadratic_1d(int n, int halo, double s) {
  const double h = 1.0 / (n + 1);
  Matrix A;
  A.n = n;
  A.a.assign(static_cast<std::size_t>(n) * n, 0.0);
  const double sc = 1.0 - s;
  // A pair term q (u_i - u_j)^2 contributes 2q to the 2x2 block [[1,-1],[-1,1]].
  auto couple = [&](int i, int j, double q) {
    A(i, i) += 2.0 * q;
    A(j, j) += 2.0 * q;
    A(i, j) -= 2.0 * q;
    A(j, i) -= 2.0 * q;
  };
  // Node pairs at distance d = m h: (1-s) * 2 * (h^2/d) * (delta^2 / d^{2s}) / 2.
  auto pair_coef = [&](int m) {
    const double d = m * h;
    return sc * (h * h / d) * std::pow(d, -2.0 * s);
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) couple(i, j, pair_coef(j - i));
  for (int i = 0; i < n; ++i) {
    const int k = i + 1;  // grid index of the node
    for (int l = 1 - halo; l <= 0; ++l) A(i, i) += 2.0 * pair_coef(k - l);
    for (int l = n + 1; l <= n + halo; ++l) A(i, i) += 2.0 * pair_coef(l - k);
  }
  // Edge cells: (1-s) int_0^h 2 (h-r) (g r^{1-s})^2 / 2 dr / r = K g^2.
  const double K = std::pow(h, 3.0 - 2.0 * s) * (0.5 - sc / (3.0 - 2.0 * s));
  for (int e = 0; e <= n; ++e) {
    const double q = K / (h * h);
    const int left = e - 1, right = e;  // matrix indices of nodes e and e+1
    if (left >= 0 && right < n) {
      couple(left, right, q);
    } else if (left >= 0) {
      A(left, left) += 2.0 * q;
    } else if (right < n) {
      A(right, right) += 2.0 * q;
    }
  }
  // Exterior beyond the halo box, one side at distance a:
  // (1-s) 2h int_a^inf (u^2 r^{-2s} / 2) dr / r = (1-s) h u^2 a^{-2s} / (2s).
  for (int i = 0; i < n; ++i) {
    const int k = i + 1;
    const double aL = (k + halo - 0.5) * h, aR = (n + halo + 0.5 - k) * h;
    A(i, i) += 2.0 * sc * h / (2.0 * s) * (std::pow(aL, -2.0 * s) + std::pow(aR, -2.0 * s));
  }
  return A;
}

namespace {

// In-place Cholesky; returns false when not positive definite.
bool cholesky(Matrix& L) {
  const int n = L.n;
  for (int j = 0; j < n; ++j) {
    double d = L(j, j);
    for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (!(d > 0.0)) return false;
    d = std::sqrt(d);
    L(j, j) = d;
    for (int i = j + 1; i < n; ++i) {
      double v = L(i, j);
      for (int k = 0; k < j; ++k) v -= L(i, k) * L(j, k);
      L(i, j) = v / d;
    }
    for (int k = j + 1; k < n; ++k) L(j, k) = 0.0;
  }
  return true;
}

std::vector<double> cholesky_solve(const Matrix& L, std::vector<double> b) {
  const int n = L.n;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < i; ++k) b[i] -= L(i, k) * b[k];
    b[i] /= L(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    for (int k = i + 1; k < n; ++k) b[i] -= L(k, i) * b[k];
    b[i] /= L(i, i);
  }
  return b;
}

}  // namespace

std::vector<double> newton_fixed_point(const Matrix& A, double h, double gamma) {
  const int n = A.n;
  // Start from the solution with the force frozen at 1.
  Matrix L = A;
  if (!cholesky(L)) throw std::runtime_error("newton: matrix not positive definite");
  std::vector<double> u = cholesky_solve(L, std::vector<double>(n, h));
  auto residual = [&](const std::vector<double>& x) {
    std::vector<double> r = A.apply(x);
    for (int i = 0; i < n; ++i) r[i] -= h * std::pow(x[i], -gamma);
    return r;
  };
  auto norm = [](const std::vector<double>& r) {
    double m = 0.0;
    for (double x : r) m = std::max(m, std::abs(x));
    return m;
  };
  std::vector<double> r = residual(u);
  for (int it = 0; it < 200 && norm(r) > 1e-15 * h; ++it) {
    Matrix J = A;
    for (int i = 0; i < n; ++i) J(i, i) += gamma * h * std::pow(u[i], -gamma - 1.0);
    if (!cholesky(J)) throw std::runtime_error("newton: Jacobian not positive definite");
    std::vector<double> step = cholesky_solve(J, r);
    double t = 1.0;
    for (;;) {
      std::vector<double> trial(n);
      bool positive = true;
      for (int i = 0; i < n; ++i) {
        trial[i] = u[i] - t * step[i];
        positive = positive && trial[i] > 0.0;
      }
      if (positive) {
        std::vector<double> rt = residual(trial);
        if (norm(rt) < norm(r) || t < 1e-8) {
          u = trial;
          r = rt;
          break;
        }
      }
      t *= 0.5;
      if (t < 1e-12) throw std::runtime_error("newton: line search failed");
    }
  }
  return u;
}

double brute_force_conjugate(const std::function<double(double)>& phi, double s, double t_max) {
  const int m = 20000;
  double best = 0.0, arg = 0.0;
  for (int k = 0; k <= m; ++k) {
    const double t = t_max * k / m;
    const double v = s * t - phi(t);
    if (v > best) {
      best = v;
      arg = t;
    }
  }
  // Refine on the neighbouring cells.
  const double w = t_max / m;
  const double lo = std::max(0.0, arg - w), hi = std::min(t_max, arg + w);
  for (int k = 0; k <= m; ++k) {
    const double t = lo + (hi - lo) * k / m;
    best = std::max(best, s * t - phi(t));
  }
  return best;
}

double simpson(const std::function<double(double)>& f, double a, double b, int m) {
  const int n = 2 * m;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int k = 1; k < n; ++k) sum += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return sum * h / 3.0;
}

}  // namespace orlicz::oracle
