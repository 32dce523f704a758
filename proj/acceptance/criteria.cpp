#include "criteria.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/frac_modular.hpp"
#include "orlicz/local_modular.hpp"
#include "orlicz/nfunction.hpp"
#include "orlicz/psi.hpp"
#include "orlicz/singular_solver.hpp"

namespace orlicz::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

// n interior nodes reduced 4x in the smoke tier: 127 -> 31, 511 -> 127.
int tier_n(int n, const Options& o) { return o.smoke ? (n + 1) / 4 - 1 : n; }

std::string sci(double x) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << x;
  return os.str();
}

struct Check {
  std::ostringstream text;
  bool ok = true;

  // Appends "label value (op bound)" and folds the verdict in.
  void le(const std::string& label, double value, double bound) {
    sep();
    text << label << ' ' << sci(value) << " (<= " << sci(bound) << ')';
    ok = ok && value <= bound;
  }
  void ge(const std::string& label, double value, double bound) {
    sep();
    text << label << ' ' << sci(value) << " (>= " << sci(bound) << ')';
    ok = ok && value >= bound;
  }
  void flag(const std::string& label, bool value) {
    sep();
    text << label << ' ' << (value ? "yes" : "NO");
    ok = ok && value;
  }
  void note(const std::string& s) {
    sep();
    text << s;
  }

 private:
  void sep() {
    if (text.tellp() > 0) text << "; ";
  }
};

std::vector<NFunction> five_kinds() {
  return {NFunction::power(3.0), NFunction::power_log(2.0), NFunction::max_power(3.0, 2.0),
          NFunction::sum_power(2.0, 3.0), NFunction::exp_square()};
}

// 1. Young's inequality, its equality case and biconjugation.
void young_suite(Check& c, const Options& o) {
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> box(0.0, 10.0);
  const int pairs = o.smoke ? 2500 : 10000;
  const auto kinds = five_kinds();
  const int per_kind = pairs / static_cast<int>(kinds.size());
  double worst_gap = 0.0, worst_curve = 0.0, worst_bi = 0.0;
  for (const NFunction& nf : kinds) {
    for (int k = 0; k < per_kind; ++k) {
      const double s = box(rng), t = box(rng);
      const YoungPair yp = young_gap(nf, s, t);
      const double scale = 1.0 + nf.value(t) + conjugate_eval(nf, s);
      worst_gap = std::min(worst_gap, yp.gap / scale);
    }
    for (int k = 0; k < per_kind; ++k) {
      const double t = box(rng);
      const double s = nf.derivative(t);
      const YoungPair yp = young_gap(nf, s, t);
      const double scale = 1.0 + nf.value(t) + conjugate_eval(nf, s);
      worst_curve = std::max(worst_curve, std::abs(yp.gap) / scale);
    }
    // ExpSquare overflows past t = sqrt(700); its samples stop at 20.
    const double hi = nf.kind() == Kind::ExpSquare ? 20.0 : 100.0;
    std::vector<double> ts;
    for (int k = 0; k < 25; ++k) ts.push_back(1e-2 * std::pow(hi / 1e-2, k / 24.0));
    worst_bi = std::max(worst_bi, biconjugate_check(nf, ts));
  }
  c.note(std::to_string(per_kind * 5) + " pairs");
  c.ge("min relative Young gap", worst_gap, -1e-9);
  c.le("max gap on s = t phi(t)", worst_curve, 1e-7);
  c.le("biconjugation error", worst_bi, 1e-6);
}

// 2. Index classification.
void indices(Check& c, const Options&) {
  const SobolevIndices e = sobolev_indices(NFunction::exp_square());
  const Delta2Class ec = delta2_classify(e);
  c.le("ExpSquare |ell - 2|", std::abs(e.ell - 2.0), 1e-3);
  c.flag("ExpSquare m infinite", e.m_infinite);
  c.flag("ExpSquare (not Delta2, conjugate Delta2)", !ec.phi_delta2 && ec.conj_delta2);
  double worst = 0.0;
  for (double p : {1.5, 2.0, 3.0, 4.0, 7.5}) {
    const SobolevIndices idx = sobolev_indices(NFunction::power(p));
    worst = std::max({worst, std::abs(idx.ell - p), std::abs(idx.m - p)});
  }
  c.le("Power(p) max |index - p|", worst, 1e-9);
}

// 3. Psi quadrature against the closed forms, and the equivalence band.
void psi_oracle(Check& c, const Options&) {
  const std::vector<NFunction> kinds{NFunction::power(2.0), NFunction::power(3.0),
                                     NFunction::power_log(2.0), NFunction::max_power(3.0, 2.0),
                                     NFunction::sum_power(2.0, 3.0)};
  double worst = 0.0;
  for (const NFunction& nf : kinds)
    for (int dim = 1; dim <= 3; ++dim) {
      const PsiFunction psi(nf, dim);
      for (double t : {0.25, 1.0, 4.0}) {
        const double closed = psi_closed_form(nf, dim, t);
        worst = std::max(worst, std::abs(psi_eval(psi, t) - closed) / std::abs(closed));
      }
    }
  c.le("max relative |psi_eval - closed form|", worst, 1e-6);
  double k1 = std::numeric_limits<double>::infinity(), k2 = 0.0;
  for (const NFunction& nf : kinds)
    for (int dim = 1; dim <= 3; ++dim) {
      const EquivalenceBand band = equivalence_band(PsiFunction(nf, dim));
      k1 = std::min(k1, band.k1);
      k2 = std::max(k2, band.k2);
    }
  c.ge("min Psi/Phi on [1e-2, 1e2]", k1, 1e-12);
  c.le("max Psi/Phi on [1e-2, 1e2]", k2, 1e12);
}

// 4. The (1-s)-scaled radial integral against Psi.
void scaled_limit(Check& c, const Options&) {
  const std::vector<double> s_pow{0.5, 0.9, 0.99, 0.999};
  const auto pe = scaled_modular_limit_check(NFunction::power(2.0), 2, 1.0, s_pow);
  c.le("Power(2) N=2 max error", *std::max_element(pe.begin(), pe.end()), 1e-4);
  const std::vector<double> s_exp{0.9, 0.99, 0.999};
  const auto ee = scaled_modular_limit_check(NFunction::exp_square(), 1, 0.5, s_exp);
  c.note("ExpSquare N=1 t=0.5 errors " + sci(ee[0]) + ", " + sci(ee[1]) + ", " + sci(ee[2]));
  c.flag("ExpSquare errors strictly decreasing", ee[1] < ee[0] && ee[2] < ee[1]);
}

// 5. Gradient against central differences.
void gradients(Check& c, const Options& o) {
  std::mt19937_64 rng(o.seed + 5);
  const int n = tier_n(31, o);
  const GridDomain grid = GridDomain::make(1, n, n);
  struct Case {
    NFunction nf;
    double amplitude;
  };
  const std::vector<Case> cases{{NFunction::power(2.0), 1.0},
                                {NFunction::sum_power(2.0, 3.0), 1.0},
                                {NFunction::exp_square(), 0.1}};
  double worst = 0.0;
  const double eps = 1e-6;
  for (const Case& cs : cases) {
    const FracContext ctx(grid, cs.nf, 0.5);
    std::uniform_real_distribution<double> amp(-cs.amplitude, cs.amplitude);
    for (int draw = 0; draw < 20; ++draw) {
      std::vector<double> u(n);
      for (double& x : u) x = amp(rng);
      const std::vector<double> g = energy_gradient(ctx, u);
      for (int i = 0; i < n; ++i) {
        std::vector<double> up = u, um = u;
        up[i] += eps;
        um[i] -= eps;
        const double fd = (ctx.value(up) - ctx.value(um)) / (2.0 * eps);
        worst = std::max(worst, std::abs(g[i] - fd));
      }
    }
  }
  c.le("max |gradient - central difference|", worst, 1e-5);
}

// 6. Quadratic case against the assembled matrix.
void quadratic(Check& c, const Options& o) {
  std::mt19937_64 rng(o.seed + 6);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  const int n = tier_n(63, o);
  const double h = 1.0 / (n + 1);
  double worst_mod = 0.0, worst_pair = 0.0, worst_solve = 0.0;
  for (double s : {0.25, 0.5, 0.75}) {
    const oracle::Matrix A = oracle::assemble_quadratic_1d(n, n, s);
    const FracContext ctx(GridDomain::make(1, n, n), NFunction::power(2.0), s);
    for (int draw = 0; draw < 10; ++draw) {
      std::vector<double> u(n), v(n);
      for (int i = 0; i < n; ++i) {
        u[i] = amp(rng);
        v[i] = amp(rng);
      }
      const std::vector<double> Au = A.apply(u), Av = A.apply(v);
      double uAu = 0.0, vAu = 0.0, vAv = 0.0;
      for (int i = 0; i < n; ++i) {
        uAu += u[i] * Au[i];
        vAu += v[i] * Au[i];
        vAv += v[i] * Av[i];
      }
      worst_mod = std::max(worst_mod, std::abs(ctx.value(u) - 0.5 * uAu) / (0.5 * uAu));
      // Normalized by the Cauchy-Schwarz bound of the bilinear form.
      worst_pair = std::max(worst_pair,
                            std::abs(ctx.pairing(u, v) - 0.5 * vAu) / (0.5 * std::sqrt(uAu * vAv)));
    }
    SingularProblem problem;
    problem.nf = NFunction::power(2.0);
    problem.gamma = 0.5;
    problem.s = s;
    problem.grid = GridDomain::make(1, n, n);
    problem.opt_tol = 1e-9;
    const SolveReport report = minimize(problem);
    const std::vector<double> ref = oracle::newton_fixed_point(A, h, 0.5);
    double diff = 0.0, peak = 0.0;
    for (int i = 0; i < n; ++i) {
      diff = std::max(diff, std::abs(report.u.values[i] - ref[i]));
      peak = std::max(peak, ref[i]);
    }
    worst_solve = std::max(worst_solve, diff / peak);
  }
  c.le("modular relative error", worst_mod, 1e-9);
  c.le("pairing relative error", worst_pair, 1e-9);
  c.le("solver vs Newton fixed point", worst_solve, 1e-6);
}

// 7. Certificates over the kind x gamma x s grid.
void certificates(Check& c, const Options& o) {
  const int n = tier_n(127, o);
  const std::vector<NFunction> kinds{NFunction::power(2.0), NFunction::power(3.0),
                                     NFunction::sum_power(2.0, 3.0), NFunction::exp_square()};
  double max_energy = -std::numeric_limits<double>::infinity();
  double min_node = std::numeric_limits<double>::infinity();
  double gap = 0.0, residual = 0.0, spread = 0.0;
  int configs = 0;
  for (const NFunction& nf : kinds)
    for (double gamma : {0.25, 0.5, 0.75})
      for (int local = 0; local < 2; ++local) {
        SingularProblem p;
        p.nf = nf;
        p.gamma = gamma;
        p.grid = GridDomain::make(1, n, n);
        if (local) p.s.reset();
        else p.s = 0.5;
        const SolveReport r = minimize(p);
        const CertificateSummary cert = compute_certificates(r, p);
        max_energy = std::max(max_energy, r.energy);
        min_node = std::min(min_node, r.min_value);
        gap = std::max(gap, cert.energy_identity_gap);
        residual = std::max(residual, cert.weak_residual);
        spread = std::max(spread, uniqueness_probe(p, 4, o.seed + configs).max_distance);
        ++configs;
      }
  c.note(std::to_string(configs) + " configurations");
  c.le("max energy", max_energy, -1e-300);
  c.ge("min node value", min_node, 1e-300);
  c.le("max energy identity gap", gap, 1e-5);
  c.le("max weak residual", residual, 1e-3);
  c.le("max uniqueness spread", spread, 1e-4);
}

// 8. Local Power(2) problem against the shooting solution of -u'' = u^{-1/2}.
void ode_oracle(Check& c, const Options& o) {
  // Phi = t^2/2 gives Psi = t^2/2 in one dimension: kappa = 1.
  const oracle::ShootingSolution ode = oracle::shoot_singular_bvp(1.0, 0.5);
  std::vector<double> errors;
  std::ostringstream seq;
  for (int n : {127, 255, 511}) {
    const int m = tier_n(n, o);
    SingularProblem p;
    p.nf = NFunction::power(2.0);
    p.gamma = 0.5;
    p.s.reset();
    p.grid = GridDomain::make(1, m, m);
    p.opt_tol = 1e-10;
    const SolveReport r = minimize(p);
    std::vector<double> x(m);
    for (int i = 0; i < m; ++i) x[i] = (i + 1) * p.grid.h();
    const std::vector<double> ref = ode.sample(x);
    double err = 0.0;
    for (int i = 0; i < m; ++i) err = std::max(err, std::abs(r.u.values[i] - ref[i]));
    errors.push_back(err);
    seq << (seq.tellp() > 0 ? ", " : "") << "n=" << m << ": " << sci(err);
  }
  c.note("max-norm errors " + seq.str());
  c.le("error on the finest grid", errors.back(), o.smoke ? 1e-2 : 1e-3);
  c.flag("errors decrease under refinement", errors[1] < errors[0] && errors[2] < errors[1]);
}

// 9. s -> 1 study.
void limit(Check& c, const Options& o) {
  const int n = tier_n(127, o);
  const std::vector<double> s_values{0.5, 0.7, 0.9, 0.95, 0.99};
  for (const NFunction& nf : {NFunction::power(2.0), NFunction::sum_power(2.0, 3.0)}) {
    const LimitStudy st = limit_study(nf, 0.5, GridDomain::make(1, n, n), s_values);
    std::ostringstream seq;
    for (double d : st.distances) seq << (seq.tellp() > 0 ? ", " : "") << sci(d);
    c.note(nf.describe() + " distances " + seq.str());
    c.flag(nf.describe() + " tail non-increasing", st.tail_monotone);
    c.le(nf.describe() + " final/first", st.final_ratio, 0.5);
  }
}

// 10. Positive-part contraction and monotonicity of the gradient.
void contraction(Check& c, const Options& o) {
  std::mt19937_64 rng(o.seed + 10);
  const int n = tier_n(31, o);
  const GridDomain grid = GridDomain::make(1, n, n);
  struct Case {
    NFunction nf;
    double amplitude;
  };
  const std::vector<Case> cases{{NFunction::power(2.0), 1.0},
                                {NFunction::power(3.0), 1.0},
                                {NFunction::sum_power(2.0, 3.0), 1.0},
                                {NFunction::power_log(2.0), 1.0},
                                {NFunction::exp_square(), 0.2}};
  const std::vector<double> s_values{0.25, 0.5, 0.75, 0.9};
  std::vector<FracContext> contexts;
  for (const Case& cs : cases)
    for (double s : s_values) contexts.emplace_back(grid, cs.nf, s);
  std::uniform_int_distribution<std::size_t> pick(0, contexts.size() - 1);
  int pos_violations = 0, mono_violations = 0;
  double worst_pos = -std::numeric_limits<double>::infinity();
  double worst_mono = std::numeric_limits<double>::infinity();
  for (int draw = 0; draw < 200; ++draw) {
    const std::size_t k = pick(rng);
    const FracContext& ctx = contexts[k];
    std::uniform_real_distribution<double> amp(-cases[k / s_values.size()].amplitude,
                                               cases[k / s_values.size()].amplitude);
    std::vector<double> u(n), up(n), v(n);
    for (int i = 0; i < n; ++i) {
      u[i] = amp(rng);
      up[i] = std::max(u[i], 0.0);
      v[i] = amp(rng);
    }
    const double iu = ctx.value(u), iup = ctx.value(up);
    const double pos_excess = (iup - iu) / std::max(1.0, iu);
    worst_pos = std::max(worst_pos, pos_excess);
    if (pos_excess > 1e-10) ++pos_violations;

    const std::vector<double> gu = energy_gradient(ctx, u), gv = energy_gradient(ctx, v);
    double mono = 0.0, scale = 1.0;
    for (int i = 0; i < n; ++i) {
      mono += (gu[i] - gv[i]) * (u[i] - v[i]);
      scale += std::abs(gu[i] * (u[i] - v[i])) + std::abs(gv[i] * (u[i] - v[i]));
    }
    worst_mono = std::min(worst_mono, mono / scale);
    if (mono / scale < -1e-10) ++mono_violations;
  }
  c.note("max (I(u+) - I(u))/max(1, I(u)) " + sci(worst_pos) +
         ", min normalized monotonicity " + sci(worst_mono));
  c.le("positive-part violations", pos_violations, 0);
  c.le("monotonicity violations", mono_violations, 0);
}

struct Definition {
  const char* title;
  double limit_seconds;
  void (*body)(Check&, const Options&);
};

const Definition kDefinitions[kCriterionCount] = {
    {"Young/conjugation suite", 10.0, young_suite},
    {"Index classification", 1.0, indices},
    {"Psi oracle agreement", 30.0, psi_oracle},
    {"Scaled-limit check", 30.0, scaled_limit},
    {"Gradient correctness", 20.0, gradients},
    {"Quadratic oracle", 30.0, quadratic},
    {"Solver certificates", 600.0, certificates},
    {"ODE oracle", 120.0, ode_oracle},
    {"s -> 1 limit study", 600.0, limit},
    {"Positive part and pairing monotonicity", 30.0, contraction},
};

}  // namespace

Options Options::from_environment(std::uint64_t seed) {
  Options o;
  o.seed = seed;
  const char* env = std::getenv("ORLICZ_VAR_SMOKE");
  o.smoke = env != nullptr && std::string(env) == "1";
  return o;
}

std::string CriterionResult::line() const {
  std::ostringstream os;
  os << "criterion " << std::setw(2) << id << " [" << (passed ? "PASS" : "FAIL") << "] " << title
     << ": " << measured << "; runtime " << std::fixed << std::setprecision(2) << seconds
     << " s (< " << std::setprecision(0) << limit_seconds << " s)";
  return os.str();
}

CriterionResult run_criterion(int id, const Options& options) {
  if (id < 1 || id > kCriterionCount) throw ConfigError("acceptance: no criterion " + std::to_string(id));
  const Definition& def = kDefinitions[id - 1];
  CriterionResult r;
  r.id = id;
  r.title = def.title;
  r.limit_seconds = def.limit_seconds;
  Check check;
  const auto t0 = Clock::now();
  try {
    def.body(check, options);
  } catch (const std::exception& e) {
    check.ok = false;
    check.note(std::string("error: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  r.passed = check.ok && r.seconds < r.limit_seconds;
  r.measured = check.text.str();
  return r;
}

std::vector<CriterionResult> run_all(const Options& options,
                                     const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) {
    out.push_back(run_criterion(id, options));
    if (on_result) on_result(out.back());
  }
  return out;
}

}  // namespace orlicz::acceptance
