#include "orlicz/singular_solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <sstream>

#include "orlicz/errors.hpp"
#include "orlicz/frac_modular.hpp"
#include "orlicz/local_modular.hpp"
#include "orlicz/orlicz_space.hpp"
#include "orlicz/psi.hpp"

namespace orlicz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArmijo = 1e-4;
constexpr double kBacktrack = 0.5;
constexpr std::size_t kMemory = 10;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

// Regularized energy on the nonnegative cone. `scale` bounds the magnitude
// of the summed terms, for roundoff-aware comparisons.
struct Objective {
  const DiscreteEnergy& modular;
  double gamma;
  double cell;
  bool singular;

  struct Eval {
    double value;
    double scale;
  };

  Eval value(std::span<const double> u, double eps) const {
    double f;
    try {
      f = modular.value(u);
    } catch (const NonFinite&) {
      return {kInf, kInf};
    }
    const double s = singular_part(u, eps, {});
    return {f + s, std::abs(f) + std::abs(s)};
  }

  Eval value_and_gradient(std::span<const double> u, double eps, std::span<double> g) const {
    double f;
    try {
      f = modular.value_and_gradient(u, g);
    } catch (const NonFinite&) {
      return {kInf, kInf};
    }
    const double s = singular_part(u, eps, g);
    return {f + s, std::abs(f) + std::abs(s)};
  }

  // Adds the cone gradient -(u+eps)^{-gamma} cell into g when non-empty.
  double singular_part(std::span<const double> u, double eps, std::span<double> g) const {
    if (!singular) return 0.0;
    const double a = 1.0 - gamma;
    const double base = eps > 0.0 ? std::pow(eps, a) : 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double x = u[i] + eps;
      sum += std::pow(x, a) - base;
      if (!g.empty()) g[i] -= cell * std::pow(x, -gamma);
    }
    return -cell * sum / a;
  }
};

void projected_gradient(std::span<const double> u, std::span<const double> g,
                        std::span<double> pg) {
  for (std::size_t i = 0; i < u.size(); ++i) pg[i] = (u[i] > 0.0 || g[i] < 0.0) ? g[i] : 0.0;
}

struct Pair {
  std::vector<double> s, y;
  double rho;
};

// Two-loop recursion: d = -H pg.
void lbfgs_direction(const std::deque<Pair>& mem, std::span<const double> pg,
                     std::span<double> d) {
  std::vector<double> q(pg.begin(), pg.end());
  std::vector<double> alpha(mem.size());
  for (std::size_t k = mem.size(); k-- > 0;) {
    alpha[k] = mem[k].rho * dot(mem[k].s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * mem[k].y[i];
  }
  const Pair& last = mem.back();
  const double scale = dot(last.s, last.y) / dot(last.y, last.y);
  for (double& x : q) x *= scale;
  for (std::size_t k = 0; k < mem.size(); ++k) {
    const double beta = mem[k].rho * dot(mem[k].y, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[k] - beta) * mem[k].s[i];
  }
  for (std::size_t i = 0; i < q.size(); ++i) d[i] = -q[i];
}

}  // namespace

std::vector<double> SingularProblem::default_eps_schedule() {
  return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10};
}

void SingularProblem::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("problem: gamma must lie in (0,1)");
  if (s && !(*s > 0.0 && *s < 1.0)) throw ConfigError("problem: s must lie in (0,1) or be \"local\"");
  if (eps_schedule.empty()) throw ConfigError("problem: empty eps_schedule");
  for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
    if (!(eps_schedule[k] > 0.0)) throw ConfigError("problem: eps values must be positive");
    if (k > 0 && !(eps_schedule[k] < eps_schedule[k - 1]))
      throw ConfigError("problem: eps_schedule must be strictly decreasing");
  }
  if (!(opt_tol > 0.0)) throw ConfigError("problem: opt_tol must be positive");
  if (!(initial_value > 0.0)) throw ConfigError("problem: initial_value must be positive");
  if (max_iterations < 1) throw ConfigError("problem: max_iterations must be positive");
}

SingularProblem SingularProblem::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("problem: expected an object");
  SingularProblem p;
  if (!j.contains("nfunction")) throw ConfigError("problem: missing 'nfunction'");
  p.nf = NFunction::from_json(j["nfunction"]);
  auto number = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError(std::string("problem: '") + key + "' must be a number");
    return j[key].get<double>();
  };
  p.gamma = number("gamma", p.gamma);
  if (j.contains("s")) {
    const auto& s = j["s"];
    if (s.is_string()) {
      if (s.get<std::string>() != "local") throw ConfigError("problem: s must be a number or \"local\"");
      p.s.reset();
    } else if (s.is_number()) {
      p.s = s.get<double>();
    } else {
      throw ConfigError("problem: s must be a number or \"local\"");
    }
  } else {
    p.s = 0.5;
  }
  if (j.contains("grid")) p.grid = GridDomain::from_json(j["grid"]);
  if (j.contains("eps_schedule")) {
    if (!j["eps_schedule"].is_array()) throw ConfigError("problem: eps_schedule must be an array");
    p.eps_schedule.clear();
    for (const auto& e : j["eps_schedule"]) {
      if (!e.is_number()) throw ConfigError("problem: eps_schedule entries must be numbers");
      p.eps_schedule.push_back(e.get<double>());
    }
  }
  p.opt_tol = number("opt_tol", p.opt_tol);
  p.initial_value = number("initial_value", p.initial_value);
  if (j.contains("max_iterations")) {
    if (!j["max_iterations"].is_number_integer()) throw ConfigError("problem: max_iterations must be an integer");
    p.max_iterations = j["max_iterations"].get<long>();
  }
  if (j.contains("singular")) {
    if (!j["singular"].is_boolean()) throw ConfigError("problem: 'singular' must be a boolean");
    p.singular = j["singular"].get<bool>();
  }
  p.validate();
  return p;
}

nlohmann::json SingularProblem::to_json() const {
  nlohmann::json j{{"nfunction", nf.to_json()},
                   {"gamma", gamma},
                   {"grid", grid.to_json()},
                   {"eps_schedule", eps_schedule},
                   {"opt_tol", opt_tol},
                   {"initial_value", initial_value},
                   {"max_iterations", max_iterations},
                   {"singular", singular}};
  if (s) j["s"] = *s;
  else j["s"] = "local";
  return j;
}

std::string SingularProblem::label() const {
  std::ostringstream os;
  os << nf.describe() << " gamma=" << gamma << " s=";
  if (s) os << *s;
  else os << "local";
  os << " dim=" << grid.dim << " n=" << grid.n;
  return os.str();
}

std::unique_ptr<DiscreteEnergy> make_energy(const SingularProblem& problem) {
  if (problem.s) return std::make_unique<FracContext>(problem.grid, problem.nf, *problem.s);
  return std::make_unique<LocalContext>(problem.grid, PsiFunction(problem.nf, problem.grid.dim));
}

SingularTerm singular_term(std::span<const double> u, double gamma, double eps, double cell) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("singular_term: gamma must lie in (0,1)");
  if (eps < 0.0) throw ConfigError("singular_term: eps must be nonnegative");
  const double a = 1.0 - gamma;
  const double base = eps > 0.0 ? std::pow(eps, a) : 0.0;
  SingularTerm out{0.0, std::vector<double>(u.size())};
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double au = std::abs(u[i]);
    if (eps == 0.0 && !(u[i] > 0.0))
      throw SingularEvaluation("singular_term: u must be positive when eps = 0");
    const double x = au + eps;
    sum += std::pow(x, a) - base;
    const double sign = u[i] > 0.0 ? 1.0 : (u[i] < 0.0 ? -1.0 : 0.0);
    out.gradient[i] = -sign * std::pow(x, -gamma) * cell;
  }
  out.value = -cell * sum / a;
  return out;
}

nlohmann::json SolveReport::to_json() const {
  nlohmann::json stages = nlohmann::json::array();
  for (const TraceEntry& t : trace)
    stages.push_back({{"eps", t.eps}, {"iteration", t.iteration}, {"energy", t.energy},
                      {"pg_norm", t.pg_norm}});
  return {{"energy", energy},
          {"min_value", min_value},
          {"weak_residual", weak_residual},
          {"energy_identity_gap", energy_identity_gap},
          {"iterations", iterations},
          {"eps_final", eps_final},
          {"pg_norm", pg_norm},
          {"start_rescaled", start_rescaled},
          {"stage_monotone", stage_monotone},
          {"trace", stages}};
}

SolveReport minimize(const SingularProblem& problem, const std::vector<double>* start) {
  problem.validate();
  const auto modular = make_energy(problem);
  const GridDomain& grid = problem.grid;
  const std::size_t N = grid.size();
  const Objective obj{*modular, problem.gamma, grid.cell_measure(), problem.singular};

  SolveReport report;
  std::vector<double> u = start ? *start : std::vector<double>(N, problem.initial_value);
  if (u.size() != N) throw ConfigError("minimize: start vector has the wrong size");
  for (double& x : u) x = std::max(x, 0.0);

  // A start outside the effective domain (ExpSquare overflow) is shrunk.
  for (int k = 0; !std::isfinite(obj.value(u, problem.eps_schedule.front()).value); ++k) {
    if (k > 200) throw NonFinite("minimize: no finite-energy start found");
    for (double& x : u) x *= 0.5;
    report.start_rescaled = true;
  }
  // Descent along the ray theta*u: a far-off start (ExpSquare from a large
  // constant) sits where quasi-Newton steps crawl.
  {
    const double eps0 = problem.eps_schedule.front();
    double best = obj.value(u, eps0).value;
    std::vector<double> half(u);
    for (int k = 0; k < 200; ++k) {
      for (double& x : half) x *= 0.5;
      const double e = obj.value(half, eps0).value;
      if (!(e < best)) break;
      best = e;
      u = half;
      report.start_rescaled = true;
    }
  }

  std::vector<double> g(N), pg(N), d(N), trial(N), g_trial(N);
  long iterations = 0;
  const double eps_final = problem.eps_schedule.back();
  for (double eps : problem.eps_schedule) {
    const double stage_tol = std::max(problem.opt_tol, eps);
    std::deque<Pair> mem;
    Objective::Eval f = obj.value_and_gradient(u, eps, g);
    double pg_norm = 0.0;
    for (;;) {
      projected_gradient(u, g, pg);
      pg_norm = norm2(pg);
      if (pg_norm <= stage_tol * (1.0 + std::abs(f.value))) break;
      if (++iterations > problem.max_iterations)
        throw NonConvergence("minimize: iteration limit reached for " + problem.label());

      bool steepest = mem.empty();
      if (!steepest) {
        lbfgs_direction(mem, pg, d);
        // Variables held at the bound stay there.
        for (std::size_t i = 0; i < N; ++i)
          if (u[i] <= 0.0 && g[i] >= 0.0) d[i] = 0.0;
        if (!(dot(d, pg) < 0.0)) steepest = true;
      }
      if (steepest) {
        mem.clear();
        const double step = 0.1 * std::max(norm_inf(u), 1e-3) / norm_inf(pg);
        for (std::size_t i = 0; i < N; ++i) d[i] = -step * pg[i];
      }

      double alpha = 1.0;
      bool accepted = false, clipped = false;
      Objective::Eval ft{};
      for (int bt = 0; bt < 80; ++bt) {
        clipped = false;
        for (std::size_t i = 0; i < N; ++i) {
          trial[i] = u[i] + alpha * d[i];
          if (trial[i] < 0.0) {
            trial[i] = 0.0;
            clipped = true;
          }
        }
        double decrease = 0.0;
        for (std::size_t i = 0; i < N; ++i) decrease += g[i] * (trial[i] - u[i]);
        ft = obj.value(trial, eps);
        const double band = 8.0 * std::numeric_limits<double>::epsilon() * f.scale;
        if (ft.value <= f.value + kArmijo * decrease + band) {
          accepted = true;
          break;
        }
        alpha *= kBacktrack;
      }
      if (!accepted) {
        if (!mem.empty()) {
          mem.clear();
          continue;
        }
        break;  // stalled at roundoff; the certificates judge the result
      }
      if (ft.value > f.value + 8.0 * std::numeric_limits<double>::epsilon() * f.scale)
        report.stage_monotone = false;

      Objective::Eval fn = obj.value_and_gradient(trial, eps, g_trial);
      Pair pair{std::vector<double>(N), std::vector<double>(N), 0.0};
      for (std::size_t i = 0; i < N; ++i) {
        pair.s[i] = trial[i] - u[i];
        pair.y[i] = g_trial[i] - g[i];
      }
      const double sy = dot(pair.s, pair.y);
      if (clipped) {
        mem.clear();
      } else if (sy > 1e-12 * norm2(pair.s) * norm2(pair.y)) {
        pair.rho = 1.0 / sy;
        mem.push_back(std::move(pair));
        if (mem.size() > kMemory) mem.pop_front();
      }
      u.swap(trial);
      g.swap(g_trial);
      f = fn;
    }
    report.trace.push_back({eps, iterations, f.value, pg_norm});
    report.energy = f.value;
    report.pg_norm = pg_norm;
  }

  report.u = GridFunction{grid, u};
  report.iterations = iterations;
  report.eps_final = eps_final;
  report.min_value = *std::min_element(u.begin(), u.end());
  // Energy at eps = 0, where it is defined without regularization.
  report.energy = obj.value(u, 0.0).value;
  if (problem.singular && report.min_value > 0.0) {
    const CertificateSummary c = compute_certificates(report, problem);
    report.weak_residual = c.weak_residual;
    report.energy_identity_gap = c.energy_identity_gap;
  } else if (problem.singular) {
    report.weak_residual = kInf;
    report.energy_identity_gap = kInf;
  }
  return report;
}

nlohmann::json CertificateSummary::to_json() const {
  return {{"weak_residual", weak_residual},
          {"energy_identity_gap", energy_identity_gap},
          {"inequality_margin", inequality_margin},
          {"min_value", min_value},
          {"passed", passed},
          {"message", message}};
}

CertificateSummary compute_certificates(const SolveReport& report, const SingularProblem& problem,
                                        const CertificateTolerances& tol, std::uint64_t seed) {
  CertificateSummary c;
  const std::vector<double>& u = report.u.values;
  const std::size_t N = u.size();
  c.min_value = N ? *std::min_element(u.begin(), u.end()) : 0.0;
  if (!(c.min_value > 0.0)) {
    c.weak_residual = c.energy_identity_gap = kInf;
    c.inequality_margin = -kInf;
    c.message = "minimizer is not strictly positive";
    return c;
  }
  const auto modular = make_energy(problem);
  const double cell = problem.grid.cell_measure();
  const double gamma = problem.gamma;

  // g_i = 2 <(-Delta)^s u, e_i>.
  std::vector<double> g(N);
  modular->value_and_gradient(u, g);
  std::vector<double> force(N);
  double mass = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    force[i] = cell * std::pow(u[i], -gamma);
    mass += cell * std::pow(u[i], 1.0 - gamma);
    c.weak_residual = std::max(c.weak_residual, std::abs(g[i] - force[i]) / force[i]);
  }
  const double two_pairing = 2.0 * modular->pairing(u, u);
  c.energy_identity_gap = std::abs(two_pairing - mass) / (1.0 + mass);

  // 2 <u, w> >= int u^{-gamma} w for w = -2u + (v - u)^+.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 2.0);
  const double umax = *std::max_element(u.begin(), u.end());
  std::vector<std::vector<double>> tests(3, std::vector<double>(N));
  for (std::size_t i = 0; i < N; ++i) {
    tests[0][i] = 0.0;
    tests[1][i] = 4.0 * u[i];
    tests[2][i] = unit(rng) * umax;
  }
  c.inequality_margin = kInf;
  std::vector<double> w(N);
  for (const auto& v : tests) {
    for (std::size_t i = 0; i < N; ++i) w[i] = -2.0 * u[i] + std::max(v[i] - u[i], 0.0);
    const double lhs = 2.0 * modular->pairing(u, w);
    double rhs = 0.0;
    for (std::size_t i = 0; i < N; ++i) rhs += force[i] * w[i];
    c.inequality_margin = std::min(c.inequality_margin, (lhs - rhs) / (1.0 + mass));
  }

  std::ostringstream msg;
  if (c.weak_residual > tol.weak_residual)
    msg << "weak residual " << c.weak_residual << " > " << tol.weak_residual << "; ";
  if (c.energy_identity_gap > tol.identity_gap)
    msg << "energy identity gap " << c.energy_identity_gap << " > " << tol.identity_gap << "; ";
  if (c.inequality_margin < -tol.inequality)
    msg << "inequality margin " << c.inequality_margin << " < " << -tol.inequality << "; ";
  c.message = msg.str();
  c.passed = c.message.empty();
  if (c.passed) c.message = "ok";
  return c;
}

CertificateSummary certify(const SolveReport& report, const SingularProblem& problem,
                           const CertificateTolerances& tol, std::uint64_t seed) {
  CertificateSummary c = compute_certificates(report, problem, tol, seed);
  if (!c.passed) throw CertificationFailure("certify: " + c.message);
  return c;
}

UniquenessResult uniqueness_probe(const SingularProblem& problem, int n_starts,
                                  std::uint64_t seed) {
  if (n_starts < 1) throw ConfigError("uniqueness_probe: need at least one start");
  const std::size_t N = problem.grid.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> positive(0.01, 2.0);
  UniquenessResult out;
  const double constants[] = {0.01, 1.0, 10.0};
  for (int k = 0; k < n_starts; ++k) {
    std::vector<double> start(N);
    if (k < 3) std::fill(start.begin(), start.end(), constants[k]);
    else
      for (double& x : start) x = positive(rng);
    out.reports.push_back(minimize(problem, &start));
  }
  const double cell = problem.grid.cell_measure();
  for (std::size_t a = 0; a < out.reports.size(); ++a)
    for (std::size_t b = a + 1; b < out.reports.size(); ++b) {
      SampledFunction diff;
      diff.weights.assign(N, cell);
      diff.values.resize(N);
      for (std::size_t i = 0; i < N; ++i)
        diff.values[i] = out.reports[a].u.values[i] - out.reports[b].u.values[i];
      out.max_distance = std::max(out.max_distance, luxemburg_norm(problem.nf, diff));
    }
  return out;
}

LimitStudy limit_study(const NFunction& nf, double gamma, const GridDomain& grid,
                       const std::vector<double>& s_values, const SingularProblem& base) {
  if (s_values.empty()) throw ConfigError("limit_study: no s values");
  for (std::size_t k = 0; k < s_values.size(); ++k) {
    if (!(s_values[k] > 0.0 && s_values[k] < 1.0)) throw ConfigError("limit_study: s must lie in (0,1)");
    if (k > 0 && !(s_values[k] > s_values[k - 1])) throw ConfigError("limit_study: s must increase");
  }
  SingularProblem problem = base;
  problem.nf = nf;
  problem.gamma = gamma;
  problem.grid = grid;
  problem.s.reset();

  LimitStudy study;
  study.s_values = s_values;
  study.local_report = minimize(problem);
  const std::size_t N = grid.size();
  for (double s : s_values) {
    problem.s = s;
    study.reports.push_back(minimize(problem));
    SampledFunction diff;
    diff.weights.assign(N, grid.cell_measure());
    diff.values.resize(N);
    for (std::size_t i = 0; i < N; ++i)
      diff.values[i] = study.reports.back().u.values[i] - study.local_report.u.values[i];
    study.distances.push_back(luxemburg_norm(nf, diff));
  }
  const std::size_t m = study.distances.size();
  study.tail_monotone = true;
  for (std::size_t k = m >= 3 ? m - 2 : 1; k < m; ++k)
    if (study.distances[k] > study.distances[k - 1]) study.tail_monotone = false;
  study.final_ratio = study.distances.front() > 0.0 ? study.distances.back() / study.distances.front() : 0.0;
  if (!study.tail_monotone) {
    study.warning = true;
    std::ostringstream os;
    os << "MonotonicityWarning: distance tail increases at fixed h = " << grid.h()
       << " (n = " << grid.n << ", halo = " << grid.halo << ")";
    study.warning_message = os.str();
  }
  return study;
}

CoercivityResult coercivity_probe(const SingularProblem& problem, std::span<const double> ray_u,
                                  std::span<const double> t_values) {
  problem.validate();
  if (ray_u.size() != problem.grid.size()) throw ConfigError("coercivity_probe: ray has the wrong size");
  if (norm_inf(ray_u) == 0.0) throw ConfigError("coercivity_probe: ray must be nonzero");
  const auto modular = make_energy(problem);
  const double cell = problem.grid.cell_measure();
  CoercivityResult out;
  std::vector<double> tu(ray_u.size());
  for (double t : t_values) {
    for (std::size_t i = 0; i < tu.size(); ++i) tu[i] = t * ray_u[i];
    double e;
    try {
      e = modular->value(tu);
    } catch (const NonFinite&) {
      out.coercive_by_overflow = true;
      out.energies.push_back(kInf);
      continue;
    }
    if (problem.singular) {
      double mass = 0.0;
      for (double x : tu) mass += std::pow(std::abs(x), 1.0 - problem.gamma);
      e -= cell * mass / (1.0 - problem.gamma);
    }
    out.energies.push_back(e);
  }
  const std::size_t m = out.energies.size();
  out.positive_at_largest = m > 0 && out.energies.back() > 0.0;
  out.eventually_increasing = m >= 2 && out.energies[m - 1] > out.energies[m - 2];
  return out;
}

}  // namespace orlicz
