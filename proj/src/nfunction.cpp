#include "orlicz/nfunction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "orlicz/errors.hpp"

namespace orlicz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// exp(t^2) overflows past t^2 ~ 709.78; refuse before that.
constexpr double kExpSquareLimit = 700.0;

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw NonFinite(std::string(what) + ": overflow");
  return v;
}

double monomial(double t, double e) {
  if (e == 2.0) return t * t;
  if (e == 3.0) return t * t * t;
  if (e == 4.0) {
    const double t2 = t * t;
    return t2 * t2;
  }
  return std::pow(t, e);
}

// Ein(z) = int_0^z (e^w - 1)/w dw.
double ein(double z) {
  if (z <= 0.0) return 0.0;
  if (z < 40.0) {
    double term = z, sum = z;
    for (int k = 2; k < 400; ++k) {
      term *= z / k;
      const double add = term / k;
      sum += add;
      if (add < 1e-17 * sum) break;
    }
    return sum;
  }
  return std::expint(z) - std::numbers::egamma - std::log(z);
}

// Right limit of c t^{e-2} at 0.
double monomial_phi_at_zero(double c, double e) {
  if (e < 2.0) return kInf;
  if (e == 2.0) return c;
  return 0.0;
}

}  // namespace

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::Power: return "power";
    case Kind::PowerLog: return "powerlog";
    case Kind::MaxPower: return "maxpower";
    case Kind::SumPower: return "sumpower";
    case Kind::ExpSquare: return "expsquare";
    case Kind::Tabulated: return "tabulated";
  }
  return "unknown";
}

struct NFunction::Table {
  std::vector<double> t;      // knots
  std::vector<double> a;      // t phi(t) at knots
  std::vector<double> beta;   // log-log slope on [t_k, t_{k+1}]; beta[0] also below t_0
  std::vector<double> Phi;    // Phi(t_k)
  std::vector<double> G;      // log_primitive(t_k)
  std::vector<std::pair<double, double>> samples;

  std::size_t segment(double x) const {
    // Index k with t_k <= x < t_{k+1}; the last segment extends to infinity.
    auto it = std::upper_bound(t.begin(), t.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - t.begin());
    return std::min(k == 0 ? 0 : k - 1, beta.size() - 1);
  }
};

NFunction NFunction::power(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("power: need p > 1");
  NFunction f;
  f.kind_ = Kind::Power;
  f.p_ = p;
  f.terms_ = {{1.0 / p, p}};
  return f;
}

NFunction NFunction::power_log(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("powerlog: need p > 1");
  return power_log(p, (2.0 * p - 1.0) / (p * (p - 1.0)));
}

NFunction NFunction::power_log(double p, double shift) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("powerlog: need p > 1");
  const double min_shift = (2.0 * p - 1.0) / (p * (p - 1.0));
  if (!(shift >= min_shift * (1.0 - 1e-12)))
    throw ConfigError("powerlog: shift c must be >= (2p-1)/(p(p-1)) for convexity");
  NFunction f;
  f.kind_ = Kind::PowerLog;
  f.p_ = p;
  f.shift_ = shift;
  return f;
}

NFunction NFunction::max_power(double p, double q) {
  if (!(p > 1.0) || !(q > 1.0) || !std::isfinite(p) || !std::isfinite(q))
    throw ConfigError("maxpower: need p, q > 1");
  NFunction f;
  f.kind_ = Kind::MaxPower;
  f.p_ = p;
  f.q_ = q;
  return f;
}

NFunction NFunction::sum_power(double p, double q) {
  if (!(p > 1.0) || !(q > 1.0) || !std::isfinite(p) || !std::isfinite(q))
    throw ConfigError("sumpower: need p, q > 1");
  NFunction f;
  f.kind_ = Kind::SumPower;
  f.p_ = p;
  f.q_ = q;
  f.terms_ = {{1.0, p}, {1.0, q}};
  return f;
}

NFunction NFunction::exp_square() {
  NFunction f;
  f.kind_ = Kind::ExpSquare;
  f.p_ = 2.0;
  return f;
}

NFunction NFunction::tabulated(std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 2) throw ConfigError("tabulated: need at least two samples");
  auto table = std::make_shared<Table>();
  table->samples = samples;
  for (const auto& [t, ph] : samples) {
    if (!(t > 0.0) || !std::isfinite(t) || !(ph > 0.0) || !std::isfinite(ph))
      throw ConfigError("tabulated: samples need t > 0 and phi(t) > 0");
    if (!table->t.empty() && !(t > table->t.back()))
      throw ConfigError("tabulated: t must be strictly increasing");
    const double a = t * ph;
    if (!table->a.empty() && !(a > table->a.back()))
      throw ConfigError("tabulated: t phi(t) must be strictly increasing");
    table->t.push_back(t);
    table->a.push_back(a);
  }
  const std::size_t n = table->t.size();
  for (std::size_t k = 0; k + 1 < n; ++k)
    table->beta.push_back(std::log(table->a[k + 1] / table->a[k]) /
                          std::log(table->t[k + 1] / table->t[k]));
  // Below t_0: a(t) = a_0 (t/t_0)^beta_0.
  table->Phi.resize(n);
  table->G.resize(n);
  {
    const double b = table->beta[0];
    const double B = table->a[0] * table->t[0] / (b + 1.0);
    table->Phi[0] = B;
    table->G[0] = B / (b + 1.0);
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double b = table->beta[k];
    const double B = table->a[k] * table->t[k] / (b + 1.0);
    const double A = table->Phi[k] - B;
    const double x = table->t[k + 1] / table->t[k];
    const double xb = std::pow(x, b + 1.0);
    table->Phi[k + 1] = table->Phi[k] + B * (xb - 1.0);
    table->G[k + 1] = table->G[k] + A * std::log(x) + B / (b + 1.0) * (xb - 1.0);
  }
  NFunction f;
  f.kind_ = Kind::Tabulated;
  f.table_ = std::move(table);
  return f;
}

NFunction NFunction::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("nfunction: expected a JSON object");
  if (!j.contains("kind") || !j["kind"].is_string())
    throw ConfigError("nfunction: missing string field 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  auto number = [&](const char* key) -> double {
    if (!j.contains(key) || !j[key].is_number())
      throw ConfigError("nfunction '" + kind + "': missing numeric field '" + key + "'");
    return j[key].get<double>();
  };
  if (kind == "power") return power(number("p"));
  if (kind == "powerlog")
    return j.contains("c") ? power_log(number("p"), number("c")) : power_log(number("p"));
  if (kind == "maxpower") return max_power(number("p"), number("q"));
  if (kind == "sumpower") return sum_power(number("p"), number("q"));
  if (kind == "expsquare") return exp_square();
  if (kind == "tabulated") {
    if (!j.contains("samples") || !j["samples"].is_array())
      throw ConfigError("nfunction 'tabulated': missing array 'samples'");
    std::vector<std::pair<double, double>> samples;
    for (const auto& row : j["samples"]) {
      if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
        throw ConfigError("nfunction 'tabulated': samples must be [t, phi_t] pairs");
      samples.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    return tabulated(std::move(samples));
  }
  throw ConfigError("nfunction: unknown kind '" + kind + "'");
}

nlohmann::json NFunction::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind_);
  switch (kind_) {
    case Kind::Power: j["p"] = p_; break;
    case Kind::PowerLog: j["p"] = p_; j["c"] = shift_; break;
    case Kind::MaxPower:
    case Kind::SumPower: j["p"] = p_; j["q"] = q_; break;
    case Kind::ExpSquare: break;
    case Kind::Tabulated: {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& [t, ph] : table_->samples) rows.push_back({t, ph});
      j["samples"] = rows;
      break;
    }
  }
  return j;
}

std::string NFunction::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Power: os << "Power(" << p_ << ")"; break;
    case Kind::PowerLog: os << "PowerLog(" << p_ << ", c=" << shift_ << ")"; break;
    case Kind::MaxPower: os << "MaxPower(" << p_ << ", " << q_ << ")"; break;
    case Kind::SumPower: os << "SumPower(" << p_ << ", " << q_ << ")"; break;
    case Kind::ExpSquare: os << "ExpSquare"; break;
    case Kind::Tabulated: os << "Tabulated(" << table_->t.size() << " samples)"; break;
  }
  return os.str();
}

double NFunction::value(double t) const {
  t = std::abs(t);
  if (t == 0.0) return 0.0;
  switch (kind_) {
    case Kind::Power:
      return checked(monomial(t, p_) / p_, "Phi");
    case Kind::PowerLog:
      return checked(std::pow(t, p_) * (shift_ + std::abs(std::log(t))), "Phi");
    case Kind::MaxPower:
      return checked(t <= 1.0 ? monomial(t, std::min(p_, q_)) : monomial(t, std::max(p_, q_)),
                     "Phi");
    case Kind::SumPower:
      return checked(monomial(t, p_) + monomial(t, q_), "Phi");
    case Kind::ExpSquare: {
      const double t2 = t * t;
      if (t2 > kExpSquareLimit) throw NonFinite("ExpSquare: t^2 exceeds 700");
      return 0.5 * std::expm1(t2);
    }
    case Kind::Tabulated:
      return checked(tab_value(t), "Phi");
  }
  return 0.0;
}

double NFunction::derivative(double t) const {
  t = std::abs(t);
  if (t == 0.0) return 0.0;
  switch (kind_) {
    case Kind::Power:
      if (p_ == 2.0) return t;
      if (p_ == 3.0) return t * t;
      return checked(std::pow(t, p_ - 1.0), "Phi'");
    case Kind::PowerLog: {
      const double L = std::log(t);
      const double base = std::pow(t, p_ - 1.0);
      // Right-continuous at t = 1 where the one-sided slopes jump by 2.
      return checked(t < 1.0 ? base * (p_ * shift_ - p_ * L - 1.0)
                             : base * (p_ * shift_ + p_ * L + 1.0),
                     "Phi'");
    }
    case Kind::MaxPower: {
      const double e = t < 1.0 ? std::min(p_, q_) : std::max(p_, q_);
      return checked(e * monomial(t, e - 1.0), "Phi'");
    }
    case Kind::SumPower:
      return checked(p_ * monomial(t, p_ - 1.0) + q_ * monomial(t, q_ - 1.0), "Phi'");
    case Kind::ExpSquare: {
      const double t2 = t * t;
      if (t2 > kExpSquareLimit) throw NonFinite("ExpSquare: t^2 exceeds 700");
      return t * std::exp(t2);
    }
    case Kind::Tabulated:
      return checked(tab_derivative(t), "Phi'");
  }
  return 0.0;
}

double NFunction::phi(double t) const {
  t = std::abs(t);
  if (t > 0.0) return derivative(t) / t;
  switch (kind_) {
    case Kind::Power: return monomial_phi_at_zero(1.0, p_);
    case Kind::PowerLog: return p_ <= 2.0 ? kInf : 0.0;
    case Kind::MaxPower: {
      const double lo = std::min(p_, q_);
      return monomial_phi_at_zero(lo, lo);
    }
    case Kind::SumPower:
      return monomial_phi_at_zero(p_, p_) + monomial_phi_at_zero(q_, q_);
    case Kind::ExpSquare: return 1.0;
    case Kind::Tabulated: {
      const double b = table_->beta[0];
      if (b < 1.0) return kInf;
      if (b == 1.0) return table_->a[0] / table_->t[0];
      return 0.0;
    }
  }
  return 0.0;
}

double NFunction::log_primitive(double t) const {
  t = std::abs(t);
  if (t == 0.0) return 0.0;
  switch (kind_) {
    case Kind::Power:
      return checked(monomial(t, p_) / (p_ * p_), "G");
    case Kind::PowerLog: {
      const double p = p_;
      const double tp = std::pow(t, p);
      const double L = std::log(t);
      const double core = t <= 1.0 ? tp / p * (-L + 1.0 / p)
                                   : 2.0 / (p * p) + tp / p * (L - 1.0 / p);
      return checked(shift_ * tp / p + core, "G");
    }
    case Kind::MaxPower: {
      const double lo = std::min(p_, q_), hi = std::max(p_, q_);
      if (t <= 1.0) return monomial(t, lo) / lo;
      return checked(1.0 / lo + (monomial(t, hi) - 1.0) / hi, "G");
    }
    case Kind::SumPower:
      return checked(monomial(t, p_) / p_ + monomial(t, q_) / q_, "G");
    case Kind::ExpSquare: {
      const double t2 = t * t;
      if (t2 > kExpSquareLimit) throw NonFinite("ExpSquare: t^2 exceeds 700");
      return 0.25 * ein(t2);
    }
    case Kind::Tabulated:
      return checked(tab_log_primitive(t), "G");
  }
  return 0.0;
}

double NFunction::tab_derivative(double x) const {
  const Table& tb = *table_;
  const std::size_t k = tb.segment(x);
  return tb.a[k] * std::pow(x / tb.t[k], tb.beta[k]);
}

double NFunction::tab_value(double x) const {
  const Table& tb = *table_;
  if (x < tb.t[0]) return tb.Phi[0] * std::pow(x / tb.t[0], tb.beta[0] + 1.0);
  const std::size_t k = tb.segment(x);
  const double b = tb.beta[k];
  const double B = tb.a[k] * tb.t[k] / (b + 1.0);
  return tb.Phi[k] + B * (std::pow(x / tb.t[k], b + 1.0) - 1.0);
}

double NFunction::tab_log_primitive(double x) const {
  const Table& tb = *table_;
  if (x < tb.t[0]) return tb.G[0] * std::pow(x / tb.t[0], tb.beta[0] + 1.0);
  const std::size_t k = tb.segment(x);
  const double b = tb.beta[k];
  const double B = tb.a[k] * tb.t[k] / (b + 1.0);
  const double A = tb.Phi[k] - B;
  const double r = x / tb.t[k];
  return tb.G[k] + A * std::log(r) + B / (b + 1.0) * (std::pow(r, b + 1.0) - 1.0);
}

// ---------------------------------------------------------------------------
// Conjugation

namespace {

constexpr int kMaxDoublings = 1000;
constexpr double kConjugateRelTol = 1e-12;

// Smallest t with deriv(t) >= s for a nondecreasing deriv with deriv(0) = 0.
template <class Deriv>
double invert_monotone(const Deriv& raw, double s) {
  if (s <= 0.0) return 0.0;
  // An overflowing derivative sits above every finite target.
  auto deriv = [&](double t) {
    try {
      return raw(t);
    } catch (const NonFinite&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  double lo = 0.0, hi = 1.0;
  int doublings = 0;
  while (deriv(hi) < s) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > kMaxDoublings)
      throw BracketFailure("conjugate: t phi(t) does not reach the requested s");
  }
  for (int it = 0; it < 400 && hi - lo > kConjugateRelTol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (deriv(mid) < s) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double conjugate_argmax(const NFunction& nf, double s) {
  return invert_monotone([&](double t) { return nf.derivative(t); }, std::abs(s));
}

double conjugate_eval(const NFunction& nf, double s) {
  s = std::abs(s);
  if (s == 0.0) return 0.0;
  const double t = conjugate_argmax(nf, s);
  return std::max(0.0, s * t - nf.value(t));
}

double biconjugate_check(const NFunction& nf, std::span<const double> t_samples) {
  double worst = 0.0;
  for (double t : t_samples) {
    if (t == 0.0) continue;  // both transforms vanish at 0
    // The conjugate's derivative is the inverse of t phi(t); invert it again.
    const double sigma =
        invert_monotone([&](double x) { return conjugate_argmax(nf, x); }, t);
    const double bi = t * sigma - conjugate_eval(nf, sigma);
    const double ref = nf.value(t);
    worst = std::max(worst, std::abs(bi - ref) / (1.0 + ref));
  }
  return worst;
}

YoungPair young_gap(const NFunction& nf, double s_val, double t_val) {
  return {s_val, t_val, nf.value(t_val) + conjugate_eval(nf, s_val) - s_val * t_val};
}

// ---------------------------------------------------------------------------
// Indices

SobolevIndices sobolev_indices(const NFunction& nf, double t_lo, double t_hi, int n) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo) || n < 16)
    throw ConfigError("sobolev_indices: need 0 < t_lo < t_hi and n >= 16");
  auto ratio = [&](double t) { return t * nf.derivative(t) / nf.value(t); };
  const double step = std::log(t_hi / t_lo) / (n - 1);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int k = 0; k < n; ++k) {
    const double t = t_lo * std::exp(step * k);
    const double r = ratio(k == n - 1 ? t_hi : t);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const double t_prev = std::max(t_lo, t_hi / 10.0);
  const double r_end = ratio(t_hi);
  const double r_prev = ratio(t_prev);
  const double slope = std::log(r_end / r_prev) / std::log(t_hi / t_prev);
  const bool growing = r_end > r_prev;
  const bool infinite = hi > 1e6 || (growing && slope >= 0.5);
  return {lo, infinite ? std::numeric_limits<double>::infinity() : hi, infinite};
}

Delta2Class delta2_classify(const SobolevIndices& idx) {
  return {!idx.m_infinite, idx.ell > 1.0 + 1e-3};
}

}  // namespace orlicz
