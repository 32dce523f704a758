#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace orlicz {

enum class Kind { Power, PowerLog, MaxPower, SumPower, ExpSquare, Tabulated };

std::string to_string(Kind kind);

/// One monomial c * t^e of an N-function that is a finite sum of powers.
struct PowerTerm {
  double coef;
  double exponent;
};

/// An N-function Phi(t) = int_0^|t| phi(tau) tau dtau, stored by kind.
///
/// The built-in kinds are
///   Power(p)       Phi = t^p / p
///   PowerLog(p,c)  Phi = t^p (c + |log t|), c >= (2p-1)/(p(p-1))
///   MaxPower(p,q)  Phi = max{t^p, t^q}
///   SumPower(p,q)  Phi = t^p + t^q
///   ExpSquare      Phi = (exp(t^2) - 1) / 2
///   Tabulated      samples (t_k, phi(t_k)); t phi(t) is interpolated
///                  piecewise linearly in log-log coordinates and extended
///                  by the end slopes.
///
/// Values are immutable; copies share tabulated data.
class NFunction {
 public:
  static NFunction power(double p);
  /// The default shift c is the smallest one that keeps Phi convex at t = 1.
  static NFunction power_log(double p);
  static NFunction power_log(double p, double shift);
  static NFunction max_power(double p, double q);
  static NFunction sum_power(double p, double q);
  static NFunction exp_square();
  static NFunction tabulated(std::vector<std::pair<double, double>> samples);

  /// {"kind": "power"|"powerlog"|"maxpower"|"sumpower"|"expsquare"|
  ///  "tabulated", "p": .., "q": .., "c": .., "samples": [[t, phi], ...]}
  static NFunction from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  double q() const { return q_; }
  double shift() const { return shift_; }
  std::string describe() const;

  /// Phi(|t|).
  double value(double t) const;
  double operator()(double t) const { return value(t); }
  /// Phi'(t) = t phi(t) for t >= 0.
  double derivative(double t) const;
  /// The density phi(t); at t = 0 the right limit (possibly +inf).
  double phi(double t) const;
  /// G(t) = int_0^t Phi(rho) / rho drho. The radial primitive shared by the
  /// exterior tail of the Gagliardo modular and by the limit function Psi.
  double log_primitive(double t) const;

  /// Non-empty iff Phi is a finite sum of monomials; lets callers hoist
  /// homogeneous kernel sums.
  std::span<const PowerTerm> power_terms() const { return terms_; }

 private:
  struct Table;

  NFunction() = default;

  double tab_derivative(double t) const;
  double tab_value(double t) const;
  double tab_log_primitive(double t) const;

  Kind kind_ = Kind::Power;
  double p_ = 2.0;
  double q_ = 0.0;
  double shift_ = 0.0;
  std::vector<PowerTerm> terms_;
  std::shared_ptr<const Table> table_;
};

/// Phi~(s) = sup_{t>0} (s t - Phi(t)). Solves t phi(t) = s by bisection on a
/// bracket grown geometrically from [0, 1].
double conjugate_eval(const NFunction& nf, double s);

/// The maximizer t* of s t - Phi(t), i.e. the inverse of t -> t phi(t).
double conjugate_argmax(const NFunction& nf, double s);

/// max_k |Phi~~(t_k) - Phi(t_k)| / (1 + Phi(t_k)), with the second transform
/// computed from the first by the same bisection scheme.
double biconjugate_check(const NFunction& nf, std::span<const double> t_samples);

struct YoungPair {
  double s_val;
  double t_val;
  double gap;  ///< Phi(t) + Phi~(s) - s t
};

YoungPair young_gap(const NFunction& nf, double s_val, double t_val);

struct SobolevIndices {
  double ell;
  double m;  ///< +inf when m_infinite
  bool m_infinite;
};

/// inf and sup of t^2 phi(t) / Phi(t) over n log-spaced samples in
/// [t_lo, t_hi]. m is declared infinite when the ratio exceeds 1e6, or when
/// it is still growing at t_hi with a last-decade log-log slope >= 0.5.
SobolevIndices sobolev_indices(const NFunction& nf, double t_lo = 1e-3,
                               double t_hi = 10.0, int n = 256);

struct Delta2Class {
  bool phi_delta2;
  bool conj_delta2;
};

/// phi_delta2 = (m < inf), conj_delta2 = (ell > 1); ell within 1e-3 of 1 is
/// treated as 1.
Delta2Class delta2_classify(const SobolevIndices& idx);

}  // namespace orlicz
