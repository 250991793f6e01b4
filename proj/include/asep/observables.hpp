#ifndef ASEP_OBSERVABLES_HPP
#define ASEP_OBSERVABLES_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "asep/lattice.hpp"
#include "asep/scalar_field.hpp"

namespace asep {

// Cubic averaging block of radius k: (2k+1)^d cells. The block must fit in
// the half-width of the lattice, k < inv_eps.
struct BlockSpec {
  int radius = 1;

  int64_t cell_count(int dim) const {
    int64_t n = 1;
    for (int i = 0; i < dim; ++i) n *= 2 * radius + 1;
    return n;
  }
};

// Handling of blocks that stick out across the axis-0 wall.
//   Truncated:  clip to the lattice and renormalize by the actual cell count;
//               the field covers every site.
//   Restricted: only evaluate where the full block fits, i.e. axis-0
//               coordinates with |x1| <= inv_eps - k.
enum class BlockMode { Truncated, Restricted };

// Rescaled empirical density field: at each node,
//   eps^-1 * (block average of eta - 1/2).
// Node positions follow the macroscopic embedding of the lattice.
ScalarField empirical_field(const Lattice& lattice,
                            std::span<const uint8_t> occupancy,
                            const BlockSpec& block, BlockMode mode);

// Same block average applied to an already macroscopic field on the full
// lattice grid (used to smooth a PDE solution with the block kernel that
// produced an empirical field, so both sides of a comparison are tested
// against the same kernel).
ScalarField block_smooth(const Lattice& lattice, const ScalarField& field,
                         const BlockSpec& block, BlockMode mode);

// Instantaneous current across the bond (x, x+e_i):
//   W = -[eta(x+e_i) - eta(x)] + delta_i [eta(x+e_i)eta(x)
//        - (eta(x) + eta(x+e_i))/2],
// and 0 when either endpoint is outside the lattice.
double current(const Lattice& lattice, std::span<const uint8_t> occupancy,
               int64_t site, int axis, double delta_i);

// Gradient part of the current alone, -(eta(x+e_i) - eta(x)) with the same
// sign convention as above; 0 outside the lattice.
double current_gradient_part(const Lattice& lattice,
                             std::span<const uint8_t> occupancy, int64_t site,
                             int axis);

// Mean of the drift part of the current over the canonical ensemble of a
// block with N cells at block density rho_bar:
//   delta_i (1 + 1/(N-1)) rho_bar (rho_bar - 1).
double conditional_current_mean(double rho_bar, int64_t cells, double delta_i);

// phi(m) = eps^-1 log((1 + 2 eps m)/(1 - 2 eps m)); odd in m, requires
// |2 eps m| < 1.
double chemical_potential(double m, double eps);

// Relative entropy density between two product Bernoulli measures given by
// sitewise occupation probabilities on a common grid:
//   s = eps^d sum_x [rho1 log(rho1/rho2) + (1-rho1) log((1-rho1)/(1-rho2))].
// Probabilities must be strictly inside (0,1).
double product_relative_entropy(const ScalarField& rho1,
                                const ScalarField& rho2, double eps);

// Centered occupancy averaged over each axis-0 slice, rescaled by eps^-1:
// a 1D profile along the bounded axis.
std::vector<double> slice_profile(const Lattice& lattice,
                                  std::span<const uint8_t> occupancy);

}  // namespace asep

#endif
