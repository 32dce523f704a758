#pragma once

#include <functional>
#include <vector>

#include "orlicz/nfunction.hpp"

namespace orlicz {

/// Values on a discrete measure space; weights are the cell measures.
struct SampledFunction {
  std::vector<double> values;
  std::vector<double> weights;

  static SampledFunction uniform(std::vector<double> values, double measure);
  std::size_t size() const { return values.size(); }
  double measure() const;
};

/// sum_k w_k Phi(|u_k|).
double modular_rho(const NFunction& nf, const SampledFunction& u);

/// inf{lambda > 0 : rho(u / lambda) <= 1}, bisected to 1e-13 relative.
/// Overflow of the modular counts as +inf, so ExpSquare needs no special care.
double luxemburg_norm(const NFunction& nf, const SampledFunction& u);

/// Luxemburg norm for an arbitrary even Young function given pointwise.
double luxemburg_norm(const std::function<double(double)>& young,
                      const SampledFunction& u);

/// 2 ||u||_Phi ||v||_Phi~ - |sum w u v|; the conjugate norm uses
/// conjugate_eval pointwise.
double holder_check(const NFunction& nf, const SampledFunction& u,
                    const SampledFunction& v);

}  // namespace orlicz
