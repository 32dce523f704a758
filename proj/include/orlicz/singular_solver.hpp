#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "orlicz/energy.hpp"
#include "orlicz/grid.hpp"
#include "orlicz/nfunction.hpp"

namespace orlicz {

/// Minimize I(u) = I1(u) - (1-gamma)^{-1} int |u|^{1-gamma} over grid
/// functions; s unset means the local problem with Psi in place of Phi.
struct SingularProblem {
  NFunction nf = NFunction::power(2.0);
  double gamma = 0.5;
  std::optional<double> s;  ///< nullopt: local
  GridDomain grid = GridDomain::make(1, 63, 63);
  std::vector<double> eps_schedule = default_eps_schedule();
  double opt_tol = 1e-8;
  long max_iterations = 100000;
  double initial_value = 0.1;
  bool singular = true;  ///< false drops the singular term (zero forcing)

  static std::vector<double> default_eps_schedule();
  /// {"nfunction": {...}, "gamma": 0.5, "s": 0.5 | "local",
  ///  "grid": {"dim": 1, "n": 127, "halo": 127}, "eps_schedule": [...],
  ///  "opt_tol": 1e-8}
  static SingularProblem from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
  bool local() const { return !s.has_value(); }
  std::string label() const;
};

/// The modular part of the problem: FracContext or LocalContext.
std::unique_ptr<DiscreteEnergy> make_energy(const SingularProblem& problem);

struct SingularTerm {
  double value;
  std::vector<double> gradient;
};

/// value = -(1-gamma)^{-1} sum_i cell [(|u_i| + eps)^{1-gamma} - eps^{1-gamma}],
/// gradient_i = -sign(u_i) (|u_i| + eps)^{-gamma} cell.
/// The eps^{1-gamma} shift is taken over the discrete measure n^dim * cell,
/// so u = 0 maps to 0 exactly.
SingularTerm singular_term(std::span<const double> u, double gamma, double eps, double cell);

struct TraceEntry {
  double eps;
  long iteration;
  double energy;
  double pg_norm;
};

struct SolveReport {
  GridFunction u;
  double energy = 0.0;
  double min_value = 0.0;
  double weak_residual = 0.0;
  double energy_identity_gap = 0.0;
  long iterations = 0;
  double eps_final = 0.0;
  double pg_norm = 0.0;
  bool start_rescaled = false;   ///< the start was shrunk (overflow or ray descent)
  bool stage_monotone = true;    ///< no increase inside a stage beyond 8 ulp of the energy scale
  std::vector<TraceEntry> trace; ///< one entry per stage end

  nlohmann::json to_json() const;
};

/// Projected limited-memory quasi-Newton descent with Armijo backtracking,
/// continued over the eps schedule. `start` overrides the constant start.
SolveReport minimize(const SingularProblem& problem,
                     const std::vector<double>* start = nullptr);

struct CertificateSummary {
  double weak_residual = 0.0;        ///< max_i |g_i - cell u_i^{-gamma}| / (cell u_i^{-gamma})
  double energy_identity_gap = 0.0;  ///< |2 <u,u> - int u^{1-gamma}| / (1 + int u^{1-gamma})
  double inequality_margin = 0.0;    ///< min over test v of lhs - rhs, normalized
  double min_value = 0.0;
  bool passed = false;
  std::string message;

  nlohmann::json to_json() const;
};

struct CertificateTolerances {
  double weak_residual = 1e-3;
  double identity_gap = 1e-5;
  double inequality = 1e-6;
};

/// Certificates at eps = 0; never throws on failure.
CertificateSummary compute_certificates(const SolveReport& report, const SingularProblem& problem,
                                        const CertificateTolerances& tol = {},
                                        std::uint64_t seed = 1);

/// As compute_certificates, but throws CertificationFailure when one fails.
CertificateSummary certify(const SolveReport& report, const SingularProblem& problem,
                           const CertificateTolerances& tol = {}, std::uint64_t seed = 1);

struct UniquenessResult {
  double max_distance = 0.0;
  std::vector<SolveReport> reports;
};

/// Starts from constants 0.01, 1, 10, then random positive vectors; returns
/// the largest pairwise Luxemburg distance between the minimizers.
UniquenessResult uniqueness_probe(const SingularProblem& problem, int n_starts,
                                  std::uint64_t seed = 1);

struct LimitStudy {
  std::vector<double> s_values;
  std::vector<double> distances;
  SolveReport local_report;
  std::vector<SolveReport> reports;
  bool tail_monotone = false;   ///< last three distances non-increasing
  double final_ratio = 0.0;     ///< distances.back() / distances.front()
  bool warning = false;         ///< tail not monotone
  std::string warning_message;
};

LimitStudy limit_study(const NFunction& nf, double gamma, const GridDomain& grid,
                       const std::vector<double>& s_values, const SingularProblem& base = {});

struct CoercivityResult {
  std::vector<double> energies;     ///< +inf where the modular overflowed
  bool coercive_by_overflow = false;
  bool eventually_increasing = false;
  bool positive_at_largest = false;
};

/// Energies I(t u) at eps = 0 along the ray through u.
CoercivityResult coercivity_probe(const SingularProblem& problem, std::span<const double> ray_u,
                                  std::span<const double> t_values);

}  // namespace orlicz
