#pragma once

#include <vector>

#include "orlicz/energy.hpp"

namespace orlicz {

/// Discrete (s, Phi)-Gagliardo modular
///
///   I1(u) = (1-s) sum_{i<j} 2 w_ij Phi(|u_i - u_j| / d_ij^s)
///         + near-diagonal cell term + exterior tail,
///
/// where the pair sum runs over node pairs with at least one interior end
/// (halo nodes carry 0), w_ij = h^{2 dim} / d_ij^dim.
///
/// The near-diagonal term replaces the excluded same-cell pairs by the exact
/// cell integral of a locally linear u: in 1-D, per edge e with slope g_e,
///   F(g) = (1-s) int_0^h 2 (h - r) Phi(g r^{1-s}) dr / r,
/// which tends to h Psi(g) as s -> 1. In 2-D the square-cell overlap is
/// angle-averaged and applied to the four one-sided gradients at each node.
///
/// The tail integrates the exterior beyond the halo box in closed form
/// through the log primitive G of Phi.
class FracContext final : public DiscreteEnergy {
 public:
  /// Dense pair enumeration is refused beyond this many ordered pairs.
  static constexpr double kMaxPairs = 1e8;

  FracContext(GridDomain grid, NFunction nf, double s);

  const GridDomain& grid() const override { return grid_; }
  const NFunction& nfunction() const override { return nf_; }
  double s() const { return s_; }
  double scale() const { return 1.0 - s_; }

  /// Ordered node pairs with at least one interior end.
  double pair_count() const;
  /// w = h^{2 dim} / dist^dim.
  double kernel_weight(double dist) const;

  double value(std::span<const double> u) const override;
  double value_and_gradient(std::span<const double> u, std::span<double> g) const override;
  double pairing(std::span<const double> u, std::span<const double> v) const override;

  /// Near-diagonal cell contribution F(g) for a slope magnitude g.
  double self_term(double g) const;
  /// Exterior tail of one interior node carrying value x.
  double tail_term(std::size_t node, double x) const;

 private:
  struct Node {
    int a;
    int b;
  };
  struct HaloSpan {
    int lo;
    int hi;
  };

  int key(int da, int db) const { return grid_.dim == 1 ? std::abs(da) : da * da + db * db; }
  template <class F>
  void for_each_halo(std::size_t i, F&& f) const;
  double grad_value(double x) const;  // F'(x)

  // Shared driver: adds the value, and if grad is non-empty the gradient, and
  // if dir is non-empty the directional derivative into *slope.
  double evaluate(std::span<const double> u, std::span<double> grad,
                  std::span<const double> dir, double* slope) const;

  GridDomain grid_;
  NFunction nf_;
  double s_;
  std::vector<Node> nodes_;
  std::vector<double> pair_w2_;  // 2 w by key
  std::vector<double> dsinv_;    // d^{-s} by key
  std::vector<PowerTerm> terms_;
  std::vector<std::vector<double>> term_pair_;   // 2 w d^{-s e} by key
  std::vector<std::vector<double>> term_halo_;   // per node: sum over halo pairs
  std::vector<double> term_self_;                // F(g) = sum coef g^e term_self
  std::vector<std::vector<double>> term_tail_;   // per node
  std::vector<double> self_levels_, self_weights_;
  // Tail: per node, directions with weight and R^{-s}.
  std::vector<double> tail_weight_;
  std::vector<std::vector<double>> tail_rs_;
};

/// Operation-style wrappers.
double modular_I1(const FracContext& ctx, std::span<const double> u);
double weak_pairing(const DiscreteEnergy& ctx, std::span<const double> u,
                    std::span<const double> v);
std::vector<double> energy_gradient(const DiscreteEnergy& ctx, std::span<const double> u);

/// inf{lambda > 0 : I(u / lambda) <= 1} for the given modular.
double gagliardo_seminorm(const DiscreteEnergy& ctx, std::span<const double> u);

struct PoincareResult {
  double slack;   ///< rhs - lhs at C_used
  double C_used;  ///< diam(Omega), doubled until the inequality held
  double lhs;     ///< rho_Phi(u)
  double rhs;     ///< unscaled Gagliardo modular of C u
};

/// rho_Phi(u) <= I1(C u) / (1-s), starting from C = diam(Omega).
PoincareResult poincare_check(const FracContext& ctx, std::span<const double> u);

}  // namespace orlicz
