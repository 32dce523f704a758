#include "orlicz/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "criteria.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/nfunction.hpp"
#include "orlicz/psi.hpp"
#include "orlicz/singular_solver.hpp"
#include "orlicz/version.hpp"

namespace orlicz::runner {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) t[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
  return t;
}

std::vector<double> number_array(const json& params, const char* key, std::vector<double> fallback) {
  if (!params.contains(key)) return fallback;
  const json& a = params[key];
  if (!a.is_array() || a.empty()) throw ConfigError(std::string("'") + key + "' must be a non-empty array");
  std::vector<double> out;
  for (const auto& v : a) {
    if (!v.is_number()) throw ConfigError(std::string("'") + key + "' entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

// nfunc-inspect and psi take the N-function either flat or under "nfunction".
NFunction nfunction_of(const json& params) {
  return NFunction::from_json(params.contains("nfunction") ? params["nfunction"] : params);
}

int dim_of(const json& params) {
  if (!params.contains("dim")) return 1;
  if (!params["dim"].is_number_integer()) throw ConfigError("'dim' must be an integer");
  const int dim = params["dim"].get<int>();
  if (dim < 1 || dim > 8) throw ConfigError("'dim' must lie in 1..8");
  return dim;
}

std::vector<double> positive_grid(const json& params) {
  auto t = number_array(params, "t_grid", log_grid(1e-2, 1e2, 41));
  for (double x : t)
    if (!(x > 0.0)) throw ConfigError("'t_grid' entries must be positive");
  return t;
}

int uniqueness_starts(const json& params) {
  if (!params.contains("uniqueness_starts")) return 0;
  const json& v = params["uniqueness_starts"];
  if (!v.is_number_integer() || v.get<int>() < 0)
    throw ConfigError("'uniqueness_starts' must be a non-negative integer");
  return v.get<int>();
}

std::vector<double> s_values_of(const json& params) {
  return number_array(params, "s_values", {0.5, 0.7, 0.9, 0.95, 0.99});
}

std::vector<int> criteria_of(const json& params) {
  std::vector<int> ids;
  if (!params.contains("criteria")) {
    for (int k = 1; k <= acceptance::kCriterionCount; ++k) ids.push_back(k);
    return ids;
  }
  if (!params["criteria"].is_array()) throw ConfigError("'criteria' must be an array");
  for (const auto& v : params["criteria"]) {
    if (!v.is_number_integer() || v.get<int>() < 1 || v.get<int>() > acceptance::kCriterionCount)
      throw ConfigError("'criteria' entries must be criterion numbers 1..10");
    ids.push_back(v.get<int>());
  }
  return ids;
}

void check_params(const std::string& command, const json& params) {
  if (!params.is_object()) throw ConfigError("params must be an object");
  if (command == "nfunc-inspect") {
    nfunction_of(params);
    positive_grid(params);
  } else if (command == "psi") {
    nfunction_of(params);
    dim_of(params);
    positive_grid(params);
  } else if (command == "solve") {
    SingularProblem::from_json(params);
    uniqueness_starts(params);
  } else if (command == "limit-study") {
    SingularProblem::from_json(params);
    for (double s : s_values_of(params))
      if (!(s > 0.0 && s < 1.0)) throw ConfigError("'s_values' must lie in (0,1)");
  } else if (command == "acceptance") {
    criteria_of(params);
  }
}

struct Output {
  int code = kOk;
  std::ostringstream summary;
  std::vector<std::string> files;
};

void write_file(const fs::path& dir, const std::string& name, const std::string& text, Output& out) {
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + (dir / name).string());
  f << text;
  out.files.push_back(name);
}

void inspect(const Experiment& ex, const fs::path& dir, Output& out) {
  const NFunction nf = nfunction_of(ex.params);
  const SobolevIndices idx = sobolev_indices(nf);
  const Delta2Class cls = delta2_classify(idx);
  std::ostringstream csv;
  csv << "t,phi,derivative,conjugate\n";
  for (double t : positive_grid(ex.params)) {
    double value, derivative, conj;
    try {
      value = nf.value(t);
      derivative = nf.derivative(t);
      conj = conjugate_eval(nf, t);
    } catch (const NonFinite&) {
      continue;  // outside the representable range (ExpSquare)
    }
    csv << num(t) << ',' << num(value) << ',' << num(derivative) << ',' << num(conj) << '\n';
  }
  write_file(dir, "nfunction.csv", csv.str(), out);
  json j{{"nfunction", nf.to_json()},
         {"ell", idx.ell},
         {"m", idx.m_infinite ? json("inf") : json(idx.m)},
         {"m_infinite", idx.m_infinite},
         {"phi_delta2", cls.phi_delta2},
         {"conjugate_delta2", cls.conj_delta2}};
  write_file(dir, "indices.json", j.dump(2) + "\n", out);
  out.summary << nf.describe() << "\n"
              << "ell = " << std::setprecision(6) << std::fixed << idx.ell << "\n"
              << "m = " << (idx.m_infinite ? std::string("inf") : num(idx.m)) << "\n"
              << "m_infinite = " << (idx.m_infinite ? "true" : "false") << "\n"
              << "Phi in Delta2: " << (cls.phi_delta2 ? "yes" : "no") << "\n"
              << "conjugate in Delta2: " << (cls.conj_delta2 ? "yes" : "no") << "\n";
}

void psi_table(const Experiment& ex, const fs::path& dir, Output& out) {
  const NFunction nf = nfunction_of(ex.params);
  const int dim = dim_of(ex.params);
  const PsiFunction psi(nf, dim);
  const bool closed = has_psi_closed_form(nf);
  std::ostringstream csv;
  csv << "t,psi_quadrature,psi_closed_form,ratio_to_phi\n";
  double worst = 0.0;
  for (double t : positive_grid(ex.params)) {
    double q, phi;
    try {
      q = psi_eval(psi, t);
      phi = nf.value(t);
    } catch (const NonFinite&) {
      continue;
    }
    csv << num(t) << ',' << num(q) << ',';
    if (closed) {
      const double c = psi_closed_form(nf, dim, t);
      worst = std::max(worst, std::abs(q - c) / std::abs(c));
      csv << num(c);
    }
    csv << ',' << num(q / phi) << '\n';
  }
  write_file(dir, "psi.csv", csv.str(), out);
  out.summary << "Psi for " << nf.describe() << " in dimension " << dim << "\n";
  if (closed) out.summary << "max relative quadrature/closed-form difference " << num(worst) << "\n";
  else out.summary << "no closed form for this kind\n";
}

void solve(const Experiment& ex, const fs::path& dir, Output& out) {
  const SingularProblem problem = SingularProblem::from_json(ex.params);
  const SolveReport report = minimize(problem);
  const CertificateSummary cert = compute_certificates(report, problem, {}, ex.seed);
  json j = report.to_json();
  j["certificates"] = cert.to_json();
  bool ok = cert.passed && report.energy < 0.0 && report.min_value > 0.0;
  if (const int starts = uniqueness_starts(ex.params); starts > 0) {
    const UniquenessResult u = uniqueness_probe(problem, starts, ex.seed);
    j["uniqueness"] = {{"starts", starts}, {"max_distance", u.max_distance}};
    ok = ok && u.max_distance <= 10.0 * problem.opt_tol;
    out.summary << "uniqueness spread " << num(u.max_distance) << " over " << starts << " starts\n";
  }
  write_file(dir, "report.json", j.dump(2) + "\n", out);
  write_file(dir, "solution.csv", report.u.to_csv(), out);
  out.summary << problem.label() << "\n"
              << "energy " << num(report.energy) << "\n"
              << "min value " << num(report.min_value) << "\n"
              << "iterations " << report.iterations << "\n"
              << "weak residual " << num(cert.weak_residual) << "\n"
              << "energy identity gap " << num(cert.energy_identity_gap) << "\n"
              << "certificates " << (ok ? "passed" : "FAILED") << "\n";
  if (!cert.passed) out.summary << cert.message << "\n";
  if (!ok) out.code = kCertificateFailure;
}

void limit(const Experiment& ex, const fs::path& dir, Output& out) {
  const SingularProblem base = SingularProblem::from_json(ex.params);
  const LimitStudy st = limit_study(base.nf, base.gamma, base.grid, s_values_of(ex.params), base);
  std::ostringstream csv;
  csv << "s,distance\n";
  for (std::size_t k = 0; k < st.s_values.size(); ++k)
    csv << num(st.s_values[k]) << ',' << num(st.distances[k]) << '\n';
  write_file(dir, "limit_study.csv", csv.str(), out);
  write_file(dir, "local_solution.csv", st.local_report.u.to_csv(), out);
  json j{{"s_values", st.s_values},
         {"distances", st.distances},
         {"tail_monotone", st.tail_monotone},
         {"final_ratio", st.final_ratio},
         {"warning", st.warning_message}};
  write_file(dir, "limit_study.json", j.dump(2) + "\n", out);
  out.summary << "limit study for " << base.nf.describe() << ", gamma " << num(base.gamma) << "\n";
  for (std::size_t k = 0; k < st.s_values.size(); ++k)
    out.summary << "  s = " << num(st.s_values[k]) << "  distance " << num(st.distances[k]) << "\n";
  out.summary << "tail non-increasing: " << (st.tail_monotone ? "yes" : "no") << "\n";
  if (st.warning) out.summary << "warning: " << st.warning_message << "\n";
}

void acceptance_suite(const Experiment& ex, const fs::path& dir, Output& out, std::ostream& log,
                      std::mutex& log_mutex) {
  const acceptance::Options options = acceptance::Options::from_environment(ex.seed);
  std::ostringstream csv;
  csv << "criterion,title,passed,measured\n";
  bool all = true;
  out.summary << "acceptance suite, seed " << ex.seed << (options.smoke ? ", smoke tier" : "") << "\n";
  for (int id : criteria_of(ex.params)) {
    const acceptance::CriterionResult r = acceptance::run_criterion(id, options);
    all = all && r.passed;
    std::string measured = r.measured;
    std::replace(measured.begin(), measured.end(), '"', '\'');
    csv << r.id << ",\"" << r.title << "\"," << (r.passed ? "true" : "false") << ",\"" << measured
        << "\"\n";
    out.summary << r.line() << "\n";
    std::lock_guard<std::mutex> lock(log_mutex);
    log << r.line() << std::endl;
  }
  write_file(dir, "acceptance.csv", csv.str(), out);
  out.summary << (all ? "all criteria passed" : "some criteria FAILED") << "\n";
  if (!all) out.code = kCertificateFailure;
}

std::mutex g_log_mutex;

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"nfunc-inspect", "psi", "solve", "limit-study",
                                              "acceptance"};
  return names;
}

std::vector<Experiment> parse_experiments(const std::string& command, const json& config,
                                          std::optional<std::uint64_t> seed_override) {
  const auto& names = commands();
  if (std::find(names.begin(), names.end(), command) == names.end())
    throw ConfigError("unknown command '" + command + "'");
  const bool list = config.is_array();
  if (!list && !config.is_object()) throw ConfigError("config must be an object or an array");
  if (list && config.empty()) throw ConfigError("config list is empty");
  std::vector<Experiment> out;
  for (const json& entry : list ? config : json::array({config})) {
    if (!entry.is_object()) throw ConfigError("config entries must be objects");
    Experiment ex;
    ex.command = command;
    if (entry.contains("command")) {
      if (!entry["command"].is_string() || entry["command"].get<std::string>() != command)
        throw ConfigError("config command does not match '" + command + "'");
    }
    if (entry.contains("params")) ex.params = entry["params"];
    if (entry.contains("seed")) {
      if (!entry["seed"].is_number_integer() || entry["seed"].get<std::int64_t>() < 0) throw ConfigError("'seed' must be a non-negative integer");
      ex.seed = entry["seed"].get<std::uint64_t>();
    }
    if (seed_override) ex.seed = *seed_override;
    try {
      check_params(command, ex.params);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("params: ") + e.what());
    }
    out.push_back(std::move(ex));
  }
  return out;
}

int run_experiment(const Experiment& ex, const fs::path& dir, int threads, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(dir);
  Output out;
  std::string error;
  try {
    if (ex.command == "nfunc-inspect") inspect(ex, dir, out);
    else if (ex.command == "psi") psi_table(ex, dir, out);
    else if (ex.command == "solve") solve(ex, dir, out);
    else if (ex.command == "limit-study") limit(ex, dir, out);
    else acceptance_suite(ex, dir, out, log, g_log_mutex);
  } catch (const NonConvergence& e) {
    out.code = kNonConvergence;
    error = e.what();
  } catch (const ConfigError& e) {
    out.code = kConfigError;
    error = e.what();
  } catch (const CapacityExceeded& e) {
    out.code = kConfigError;
    error = e.what();
  } catch (const json::exception& e) {
    out.code = kConfigError;
    error = e.what();
  } catch (const std::exception& e) {
    out.code = kCertificateFailure;
    error = e.what();
  }
  if (!error.empty()) out.summary << "error: " << error << "\n";
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json manifest{{"command", ex.command},
                {"params", ex.params},
                {"seed", ex.seed},
                {"threads", threads},
                {"version", kVersion},
                {"wall_seconds", wall},
                {"exit_code", out.code},
                {"outputs", out.files}};
  if (!error.empty()) manifest["error"] = error;
  {
    std::ofstream f(dir / "manifest.json");
    f << manifest.dump(2) << "\n";
  }
  {
    std::ofstream f(dir / "summary.txt");
    f << out.summary.str();
  }
  std::lock_guard<std::mutex> lock(g_log_mutex);
  log << ex.command << " -> " << dir.string() << " (exit " << out.code << ")\n";
  if (!error.empty()) log << "  " << error << "\n";
  return out.code;
}

int run(const Invocation& inv, std::ostream& log) {
  std::vector<Experiment> experiments;
  try {
    json config = json::object();
    if (inv.config) {
      std::ifstream f(*inv.config);
      if (!f) throw ConfigError("cannot read config " + inv.config->string());
      try {
        config = json::parse(f);
      } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
      }
    } else if (inv.command != "acceptance") {
      throw ConfigError("--config is required for " + inv.command);
    }
    if (inv.jobs < 1) throw ConfigError("--jobs must be at least 1");
    experiments = parse_experiments(inv.command, config, inv.seed);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  std::vector<fs::path> dirs;
  for (std::size_t k = 0; k < experiments.size(); ++k) {
    if (experiments.size() == 1) {
      dirs.push_back(inv.out);
    } else {
      char name[16];
      std::snprintf(name, sizeof name, "%03zu-", k);
      dirs.push_back(inv.out / (name + inv.command));
    }
  }

  const int workers = std::min<int>(inv.jobs, static_cast<int>(experiments.size()));
  std::vector<int> codes(experiments.size(), kOk);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next++) < experiments.size();)
      codes[k] = run_experiment(experiments[k], dirs[k], inv.jobs, log);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return *std::max_element(codes.begin(), codes.end());
}

}  // namespace orlicz::runner
