#ifndef ASEP_ORACLES_HPP
#define ASEP_ORACLES_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "asep/model.hpp"

namespace asep {

// Brute-force reference computations, written directly from the rate
// formulas and deliberately independent of the event engine, the block
// observables and the PDE stepper, so those can be validated against them.

// Full 8x8 transition-rate matrix of the one-dimensional three-site chain
// (inv_eps = 1, eps = 1). State index packs occupancies LSB-first with bit 0
// the left face site. Entry [s][t] is the rate of jumping from s to t;
// diagonal entries are zero.
std::array<std::array<double, 8>, 8> three_site_rate_matrix(
    const ModelParams& params, double b_left, double b_right);

// Canonical-ensemble mean of the drift part of the current across a fixed
// pair of cells in a block of `cells` sites holding exactly `particles`
// particles, by exhaustive enumeration. cells <= 20.
double enumerated_block_current_mean(int cells, int particles, double delta_i);

// Steady profile of delta1 (m^2)' + d11 m'' = 0 on [-1,1] with m(-1)=b_left,
// m(1)=b_right, via shooting on m'(-1) with RK4 integration and bisection.
// Returns the profile on n_nodes uniformly spaced nodes including both ends.
std::vector<double> shooting_steady_profile(double delta1, double d11,
                                            double b_left, double b_right,
                                            int n_nodes);

}  // namespace asep

#endif
