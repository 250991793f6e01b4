#ifndef ASEP_MODEL_HPP
#define ASEP_MODEL_HPP

#include <string>
#include <vector>

namespace asep {

// DriftAligned: particles are created on the left face when a site is empty
// and destroyed on the right face when occupied, with rates proportional to
// delta_1. ReversibleOneSite: every face site carries both a creation and an
// annihilation channel, reversible for the single-site Bernoulli measure of
// density 1/2 + eps*b.
enum class BoundaryVariant { DriftAligned, ReversibleOneSite };

// Bulk jump weights and the boundary coupling. p_plus[i] + p_minus[i] must
// equal 2 on every axis; delta[i] = p_plus[i] - p_minus[i] is the drift.
struct ModelParams {
  int dim = 0;
  std::vector<double> p_plus;
  std::vector<double> p_minus;
  BoundaryVariant variant = BoundaryVariant::DriftAligned;
  // Boundary clock speedup s: face rates carry a factor eps^-s relative to
  // the bulk jump process. Must be 0 for DriftAligned; the reversible
  // variant needs s = 3 for its entropy flux to stay controlled.
  double speedup_exponent = 0.0;

  double delta(int axis0based) const {
    return p_plus[axis0based] - p_minus[axis0based];
  }

  // Throws std::invalid_argument with a description on any violation.
  void validate() const;
  // Extra constraints that only bind when a boundary generator is attached
  // (cylinder geometry): DriftAligned needs delta_1 > 0 and no speedup.
  void validate_boundary() const;

  static ModelParams symmetric(int dim);
};

// Boundary density offsets b, already evaluated on the two faces, indexed by
// transverse position. b is time independent, so one evaluation at setup is
// enough.
struct BoundaryProfile {
  std::vector<double> left;   // x1 = -inv_eps face (GammaPlus)
  std::vector<double> right;  // x1 = +inv_eps face (GammaMinus)
};

}  // namespace asep

#endif
