#pragma once

#include "orlicz/energy.hpp"
#include "orlicz/psi.hpp"

namespace orlicz {

/// int_Omega Psi(|grad u|) with one-sided differences and u = 0 outside.
/// 1-D: sum over the n+1 edges of h Psi(|slope|). 2-D: h^2/4 times the sum,
/// over every node of the closed grid, of Psi at its four one-sided
/// gradients.
class LocalContext final : public DiscreteEnergy {
 public:
  LocalContext(GridDomain grid, PsiFunction psi);

  const GridDomain& grid() const override { return grid_; }
  /// The base Phi; norms of solutions are measured in L^Phi.
  const NFunction& nfunction() const override { return psi_.base(); }
  const PsiFunction& psi() const { return psi_; }

  double value(std::span<const double> u) const override;
  double value_and_gradient(std::span<const double> u, std::span<double> g) const override;
  double pairing(std::span<const double> u, std::span<const double> v) const override;

 private:
  double evaluate(std::span<const double> u, std::span<double> grad,
                  std::span<const double> dir, double* slope) const;

  GridDomain grid_;
  PsiFunction psi_;
};

double local_modular(const LocalContext& ctx, std::span<const double> u);

}  // namespace orlicz
