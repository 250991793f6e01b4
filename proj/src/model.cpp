#include "asep/model.hpp"

#include <cmath>
#include <stdexcept>

namespace asep {

void ModelParams::validate() const {
  if (dim < 1) throw std::invalid_argument("model: dim must be >= 1");
  if (int(p_plus.size()) != dim || int(p_minus.size()) != dim)
    throw std::invalid_argument("model: p_plus/p_minus must have dim entries");
  for (int i = 0; i < dim; ++i) {
    if (p_plus[i] < 0 || p_minus[i] < 0)
      throw std::invalid_argument("model: jump weights must be non-negative");
    if (std::fabs(p_plus[i] + p_minus[i] - 2.0) > 1e-12)
      throw std::invalid_argument(
          "model: jump weights must satisfy p_plus + p_minus = 2 per axis");
  }
  if (speedup_exponent < 0)
    throw std::invalid_argument("model: speedup exponent must be >= 0");
}

void ModelParams::validate_boundary() const {
  if (variant == BoundaryVariant::DriftAligned) {
    if (delta(0) <= 0)
      throw std::invalid_argument(
          "model: DriftAligned boundary requires delta_1 > 0");
    if (speedup_exponent != 0)
      throw std::invalid_argument(
          "model: DriftAligned boundary runs on the bulk clock "
          "(speedup exponent must be 0)");
  }
}

ModelParams ModelParams::symmetric(int dim) {
  ModelParams p;
  p.dim = dim;
  p.p_plus.assign(dim, 1.0);
  p.p_minus.assign(dim, 1.0);
  p.variant = BoundaryVariant::ReversibleOneSite;
  return p;
}

}  // namespace asep
