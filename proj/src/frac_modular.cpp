#include "orlicz/frac_modular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "orlicz/errors.hpp"
#include "orlicz/orlicz_space.hpp"
#include "orlicz/psi.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

namespace {

constexpr int kTailRays = 128;

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double ipow(double x, double e) {
  if (e == 2.0) return x * x;
  if (e == 3.0) return x * x * x;
  if (e == 1.0) return x;
  return std::pow(x, e);
}

// Angle average of the overlap area of a square cell of side h with its
// translate by a vector of length r.
double mean_square_overlap(double h, double r) {
  if (r >= std::numbers::sqrt2 * h) return 0.0;
  const double lo = r <= h ? 0.0 : std::acos(h / r);
  const double hi = r <= h ? 0.5 * std::numbers::pi : std::asin(h / r);
  const quad::Rule gl = quad::gauss_legendre(32, lo, hi);
  double sum = 0.0;
  for (std::size_t k = 0; k < gl.size(); ++k)
    sum += gl.weights[k] * (h - r * std::cos(gl.nodes[k])) * (h - r * std::sin(gl.nodes[k]));
  return sum * 2.0 / std::numbers::pi;
}

}  // namespace

FracContext::FracContext(GridDomain grid, NFunction nf, double s)
    : grid_(grid), nf_(std::move(nf)), s_(s) {
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("FracContext: s must lie in (0,1)");
  if (pair_count() > kMaxPairs)
    throw CapacityExceeded("FracContext: " + std::to_string(pair_count()) +
                           " ordered pairs exceed the dense limit");
  const int n = grid_.n, halo = grid_.halo, dim = grid_.dim;
  const double h = grid_.h();

  if (dim == 1) {
    for (int a = 1; a <= n; ++a) nodes_.push_back({a, 0});
  } else {
    for (int b = 1; b <= n; ++b)
      for (int a = 1; a <= n; ++a) nodes_.push_back({a, b});
  }

  const int reach = n + halo;
  const int max_key = dim == 1 ? reach : 2 * reach * reach;
  pair_w2_.assign(max_key + 1, 0.0);
  dsinv_.assign(max_key + 1, 0.0);
  for (int k = 1; k <= max_key; ++k) {
    const double d = dim == 1 ? h * k : h * std::sqrt(static_cast<double>(k));
    pair_w2_[k] = 2.0 * kernel_weight(d);
    dsinv_[k] = std::pow(d, -s_);
  }

  // Near-diagonal rule: F(g) = sum_m weight_m Phi(g level_m), from
  //   F(g) = int_0^inf abar(L e^{-tau/(1-s)}) F_S(g L^{1-s} e^{-tau}) dtau,
  // with F_S(x) = int_{S^{dim-1}} Phi(x |z_N|) dS.
  {
    const double sc = 1.0 - s_;
    const double L = dim == 1 ? h : std::numbers::sqrt2 * h;
    auto abar = [&](double r) {
      return dim == 1 ? std::max(h - r, 0.0) : mean_square_overlap(h, r);
    };
    std::vector<double> breaks{0.0, 0.125, 0.25, 0.5, 1, 1.5, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48};
    for (double x : {0.25, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) breaks.push_back(sc * x);
    if (dim == 2) breaks.push_back(sc * std::log(std::numbers::sqrt2));
    std::sort(breaks.begin(), breaks.end());
    std::vector<double> cuts{breaks.front()};
    for (double b : breaks)
      if (b > cuts.back() * (1.0 + 1e-9) + 1e-15 && b <= 48.0) cuts.push_back(b);
    const SphereRule sphere = sphere_rule(dim, 8);
    const double lead = std::pow(L, sc);
    const int per_panel = dim == 1 ? 12 : 8;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
      const quad::Rule gl = quad::gauss_legendre(per_panel, cuts[p], cuts[p + 1]);
      for (std::size_t m = 0; m < gl.size(); ++m) {
        const double tau = gl.nodes[m];
        const double a = abar(L * std::exp(-tau / sc));
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < sphere.levels.size(); ++j) {
          self_levels_.push_back(lead * std::exp(-tau) * sphere.levels[j]);
          self_weights_.push_back(a * gl.weights[m] * sphere.weights[j]);
        }
      }
    }
  }

  // Exterior tail beyond the halo box, per interior node and direction:
  //   (1-s) 2 h^dim / s * dtheta * G(|u| R^{-s}).
  {
    const double pre = (1.0 - s_) * 2.0 * grid_.cell_measure() / s_;
    const double lo = (0.5 - halo) * h, hi = (n + halo + 0.5) * h;
    if (dim == 1) {
      tail_weight_ = {pre, pre};
    } else {
      tail_weight_.assign(kTailRays, pre * 2.0 * std::numbers::pi / kTailRays);
    }
    tail_rs_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const double x = nodes_[i].a * h, y = nodes_[i].b * h;
      if (dim == 1) {
        tail_rs_[i] = {std::pow(x - lo, -s_), std::pow(hi - x, -s_)};
        continue;
      }
      tail_rs_[i].resize(kTailRays);
      for (int k = 0; k < kTailRays; ++k) {
        const double th = (k + 0.5) * 2.0 * std::numbers::pi / kTailRays;
        const double c = std::cos(th), sn = std::sin(th);
        const double tx = c > 0 ? (hi - x) / c : (lo - x) / c;
        const double ty = sn > 0 ? (hi - y) / sn : (lo - y) / sn;
        tail_rs_[i][k] = std::pow(std::min(tx, ty), -s_);
      }
    }
  }

  // Sums of powers: every kernel sum factors through |u|^e and is hoisted.
  const auto terms = nf_.power_terms();
  terms_.assign(terms.begin(), terms.end());
  for (const PowerTerm& t : terms_) {
    std::vector<double> tp(max_key + 1, 0.0);
    for (int k = 1; k <= max_key; ++k) tp[k] = pair_w2_[k] * std::pow(dsinv_[k], t.exponent);
    std::vector<double> th(nodes_.size(), 0.0), tt(nodes_.size(), 0.0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      double acc = 0.0;
      for_each_halo(i, [&](int k) { acc += tp[k]; });
      th[i] = acc;
      double tail = 0.0;
      for (std::size_t d = 0; d < tail_weight_.size(); ++d)
        tail += tail_weight_[d] * std::pow(tail_rs_[i][d], t.exponent) / t.exponent;
      tt[i] = tail;
    }
    double self = 0.0;
    for (std::size_t m = 0; m < self_levels_.size(); ++m)
      self += self_weights_[m] * std::pow(self_levels_[m], t.exponent);
    term_pair_.push_back(std::move(tp));
    term_halo_.push_back(std::move(th));
    term_tail_.push_back(std::move(tt));
    term_self_.push_back(self);
  }
}

double FracContext::pair_count() const {
  const double side_in = grid_.n, side_all = grid_.n + 2.0 * grid_.halo;
  const double inner = grid_.dim == 1 ? side_in : side_in * side_in;
  const double all = grid_.dim == 1 ? side_all : side_all * side_all;
  return inner * (inner - 1.0) + 2.0 * inner * (all - inner);
}

double FracContext::kernel_weight(double dist) const {
  const double h = grid_.h();
  return grid_.dim == 1 ? h * h / dist : (h * h) * (h * h) / (dist * dist);
}

template <class F>
void FracContext::for_each_halo(std::size_t i, F&& f) const {
  const int n = grid_.n, halo = grid_.halo;
  const Node& p = nodes_[i];
  if (grid_.dim == 1) {
    for (int a = 1 - halo; a <= 0; ++a) f(key(p.a - a, 0));
    for (int a = n + 1; a <= n + halo; ++a) f(key(a - p.a, 0));
    return;
  }
  for (int b = 1 - halo; b <= n + halo; ++b) {
    const int db = b - p.b;
    if (b < 1 || b > n) {
      for (int a = 1 - halo; a <= n + halo; ++a) f(key(a - p.a, db));
    } else {
      for (int a = 1 - halo; a <= 0; ++a) f(key(a - p.a, db));
      for (int a = n + 1; a <= n + halo; ++a) f(key(a - p.a, db));
    }
  }
}

double FracContext::self_term(double g) const {
  g = std::abs(g);
  if (g == 0.0) return 0.0;
  if (!terms_.empty()) {
    double sum = 0.0;
    for (std::size_t t = 0; t < terms_.size(); ++t)
      sum += terms_[t].coef * ipow(g, terms_[t].exponent) * term_self_[t];
    return sum;
  }
  double sum = 0.0;
  for (std::size_t m = 0; m < self_levels_.size(); ++m)
    sum += self_weights_[m] * nf_.value(g * self_levels_[m]);
  return sum;
}

double FracContext::grad_value(double g) const {
  if (g == 0.0) return 0.0;
  if (!terms_.empty()) {
    double sum = 0.0;
    for (std::size_t t = 0; t < terms_.size(); ++t)
      sum += terms_[t].coef * terms_[t].exponent * ipow(g, terms_[t].exponent - 1.0) *
             term_self_[t];
    return sum;
  }
  double sum = 0.0;
  for (std::size_t m = 0; m < self_levels_.size(); ++m)
    sum += self_weights_[m] * self_levels_[m] * nf_.derivative(g * self_levels_[m]);
  return sum;
}

double FracContext::tail_term(std::size_t node, double x) const {
  x = std::abs(x);
  if (x == 0.0) return 0.0;
  if (!terms_.empty()) {
    double sum = 0.0;
    for (std::size_t t = 0; t < terms_.size(); ++t)
      sum += terms_[t].coef * ipow(x, terms_[t].exponent) * term_tail_[t][node];
    return sum;
  }
  double sum = 0.0;
  for (std::size_t d = 0; d < tail_weight_.size(); ++d)
    sum += tail_weight_[d] * nf_.log_primitive(x * tail_rs_[node][d]);
  return sum;
}

double FracContext::evaluate(std::span<const double> u, std::span<double> grad,
                             std::span<const double> dir, double* slope) const {
  const std::size_t N = nodes_.size();
  if (u.size() != N) throw ConfigError("FracContext: grid function size mismatch");
  const bool want_grad = !grad.empty();
  const bool want_dir = !dir.empty();
  if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
  double value = 0.0, dslope = 0.0;
  const double sc = 1.0 - s_;

  // d(term)/du_i = dv, d(term)/du_j = -dv for a pair term in delta = u_i - u_j.
  auto pair_push = [&](std::size_t i, std::size_t j, double dv) {
    if (want_grad) {
      grad[i] += dv;
      grad[j] -= dv;
    }
    if (want_dir) dslope += dv * (dir[i] - dir[j]);
  };
  auto node_push = [&](std::size_t i, double dv) {
    if (want_grad) grad[i] += dv;
    if (want_dir) dslope += dv * dir[i];
  };
  const bool need_derivative = want_grad || want_dir;

  // Interior pairs and interior-halo pairs.
  if (!terms_.empty()) {
    for (std::size_t t = 0; t < terms_.size(); ++t) {
      const double c = terms_[t].coef, e = terms_[t].exponent;
      const std::vector<double>& tp = term_pair_[t];
      double acc = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double ui = u[i];
        for (std::size_t j = i + 1; j < N; ++j) {
          const double delta = ui - u[j];
          if (delta == 0.0) continue;
          const int k = key(nodes_[j].a - nodes_[i].a, nodes_[j].b - nodes_[i].b);
          const double ad = std::abs(delta);
          acc += ipow(ad, e) * tp[k];
          if (need_derivative) pair_push(i, j, sc * c * e * ipow(ad, e - 1.0) * sgn(delta) * tp[k]);
        }
        if (ui != 0.0) {
          const double au = std::abs(ui);
          acc += ipow(au, e) * term_halo_[t][i];
          if (need_derivative)
            node_push(i, sc * c * e * ipow(au, e - 1.0) * sgn(ui) * term_halo_[t][i]);
        }
      }
      value += sc * c * acc;
    }
  } else {
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double ui = u[i];
      for (std::size_t j = i + 1; j < N; ++j) {
        const double delta = ui - u[j];
        if (delta == 0.0) continue;
        const int k = key(nodes_[j].a - nodes_[i].a, nodes_[j].b - nodes_[i].b);
        const double x = std::abs(delta) * dsinv_[k];
        acc += pair_w2_[k] * nf_.value(x);
        if (need_derivative)
          pair_push(i, j, sc * pair_w2_[k] * nf_.derivative(x) * dsinv_[k] * sgn(delta));
      }
      if (ui != 0.0) {
        const double au = std::abs(ui);
        double hv = 0.0, hd = 0.0;
        for_each_halo(i, [&](int k) {
          const double x = au * dsinv_[k];
          hv += pair_w2_[k] * nf_.value(x);
          if (need_derivative) hd += pair_w2_[k] * nf_.derivative(x) * dsinv_[k];
        });
        acc += hv;
        if (need_derivative) node_push(i, sc * hd * sgn(ui));
      }
    }
    value += sc * acc;
  }

  // Near-diagonal cells.
  const double h = grid_.h();
  const int n = grid_.n;
  if (grid_.dim == 1) {
    for (int e = 0; e <= n; ++e) {
      const double left = e >= 1 ? u[e - 1] : 0.0;
      const double right = e + 1 <= n ? u[e] : 0.0;
      const double g = (right - left) / h;
      if (g == 0.0) continue;
      value += self_term(g);
      if (!need_derivative) continue;
      const double dv = grad_value(std::abs(g)) * sgn(g) / h;
      if (e + 1 <= n) node_push(static_cast<std::size_t>(e), dv);
      if (e >= 1) node_push(static_cast<std::size_t>(e - 1), -dv);
    }
  } else {
    auto inside = [n](int a, int b) { return a >= 1 && a <= n && b >= 1 && b <= n; };
    auto index = [n](int a, int b) { return static_cast<std::size_t>((b - 1) * n + (a - 1)); };
    auto U = [&](int a, int b) { return inside(a, b) ? u[index(a, b)] : 0.0; };
    for (int b = 0; b <= n + 1; ++b) {
      for (int a = 0; a <= n + 1; ++a) {
        const double u0 = U(a, b);
        for (int dx : {-1, 1}) {
          for (int dy : {-1, 1}) {
            const double gx = (U(a + dx, b) - u0) * dx / h;
            const double gy = (U(a, b + dy) - u0) * dy / h;
            const double m = std::hypot(gx, gy);
            if (m == 0.0) continue;
            value += 0.25 * self_term(m);
            if (!need_derivative) continue;
            const double f = 0.25 * grad_value(m) / m;
            // gx = (U(a+dx,b) - U(a,b)) dx / h, gy likewise.
            if (inside(a + dx, b)) node_push(index(a + dx, b), f * gx * dx / h);
            if (inside(a, b + dy)) node_push(index(a, b + dy), f * gy * dy / h);
            if (inside(a, b)) node_push(index(a, b), -f * (gx * dx + gy * dy) / h);
          }
        }
      }
    }
  }

  // Exterior tail.
  for (std::size_t i = 0; i < N; ++i) {
    const double ui = u[i];
    if (ui == 0.0) continue;
    value += tail_term(i, ui);
    if (!need_derivative) continue;
    const double au = std::abs(ui);
    double d = 0.0;
    if (!terms_.empty()) {
      for (std::size_t t = 0; t < terms_.size(); ++t)
        d += terms_[t].coef * terms_[t].exponent * ipow(au, terms_[t].exponent - 1.0) *
             term_tail_[t][i];
    } else {
      // d/dx G(x r) = Phi(x r) / x.
      for (std::size_t k = 0; k < tail_weight_.size(); ++k)
        d += tail_weight_[k] * nf_.value(au * tail_rs_[i][k]) / au;
    }
    node_push(i, d * sgn(ui));
  }

  if (!std::isfinite(value)) throw NonFinite("Gagliardo modular overflow");
  if (slope) *slope = dslope;
  return value;
}

double FracContext::value(std::span<const double> u) const { return evaluate(u, {}, {}, nullptr); }

double FracContext::value_and_gradient(std::span<const double> u, std::span<double> g) const {
  if (g.size() != nodes_.size()) throw ConfigError("FracContext: gradient size mismatch");
  return evaluate(u, g, {}, nullptr);
}

double FracContext::pairing(std::span<const double> u, std::span<const double> v) const {
  if (v.size() != nodes_.size()) throw ConfigError("FracContext: grid function size mismatch");
  double slope = 0.0;
  evaluate(u, {}, v, &slope);
  return 0.5 * slope;
}

double modular_I1(const FracContext& ctx, std::span<const double> u) { return ctx.value(u); }

double weak_pairing(const DiscreteEnergy& ctx, std::span<const double> u,
                    std::span<const double> v) {
  return ctx.pairing(u, v);
}

std::vector<double> energy_gradient(const DiscreteEnergy& ctx, std::span<const double> u) {
  std::vector<double> g(u.size());
  ctx.value_and_gradient(u, g);
  return g;
}

double gagliardo_seminorm(const DiscreteEnergy& ctx, std::span<const double> u) {
  double amax = 0.0;
  for (double x : u) amax = std::max(amax, std::abs(x));
  if (amax == 0.0) return 0.0;
  std::vector<double> scaled(u.size());
  auto modular_at = [&](double lambda) {
    for (std::size_t k = 0; k < u.size(); ++k) scaled[k] = u[k] / lambda;
    try {
      return ctx.value(scaled);
    } catch (const NonFinite&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  double lo = amax, hi = amax;
  while (modular_at(hi) > 1.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw BracketFailure("gagliardo_seminorm: no upper bracket");
  }
  if (lo == hi) {
    while (modular_at(lo) <= 1.0) {
      hi = lo;
      lo *= 0.5;
      if (lo == 0.0) throw BracketFailure("gagliardo_seminorm: no lower bracket");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (modular_at(mid) > 1.0) lo = mid;
    else hi = mid;
  }
  return hi;
}

PoincareResult poincare_check(const FracContext& ctx, std::span<const double> u) {
  const GridDomain& g = ctx.grid();
  SampledFunction sf{std::vector<double>(u.begin(), u.end()),
                     std::vector<double>(u.size(), g.cell_measure())};
  const double lhs = modular_rho(ctx.nfunction(), sf);
  double C = g.diameter();
  std::vector<double> cu(u.size());
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (std::size_t k = 0; k < u.size(); ++k) cu[k] = C * u[k];
    const double rhs = ctx.value(cu) / ctx.scale();
    if (rhs >= lhs) return {rhs - lhs, C, lhs, rhs};
    C *= 2.0;
  }
  throw NonConvergence("poincare_check: no admissible constant found");
}

}  // namespace orlicz
