#pragma once

#include <span>

#include "orlicz/grid.hpp"
#include "orlicz/nfunction.hpp"

namespace orlicz {

/// A convex, even modular on grid functions: the fractional I1 or its local
/// limit. pairing(u, v) is half the directional derivative, so
/// sum_i g_i v_i = 2 pairing(u, v).
class DiscreteEnergy {
 public:
  virtual ~DiscreteEnergy() = default;

  virtual const GridDomain& grid() const = 0;
  virtual const NFunction& nfunction() const = 0;

  virtual double value(std::span<const double> u) const = 0;
  /// Writes the gradient into g (size n^dim) and returns the value.
  virtual double value_and_gradient(std::span<const double> u, std::span<double> g) const = 0;
  virtual double pairing(std::span<const double> u, std::span<const double> v) const = 0;
};

}  // namespace orlicz
