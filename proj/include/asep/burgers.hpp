#ifndef ASEP_BURGERS_HPP
#define ASEP_BURGERS_HPP

#include <functional>
#include <span>
#include <vector>

#include "asep/scalar_field.hpp"

namespace asep {

// Initial-boundary value problem
//   dm/dt = sum_i delta_i d_i(m^2) + sum_ij D_ij d2_ij m
// on [-1,1] x torus^(d-1) with Dirichlet data b on the two axis-0 faces and
// periodic identification elsewhere. all_periodic drops the Dirichlet faces
// (test mode for conservation and translation checks).
struct PdeProblem {
  int dim = 0;
  std::vector<double> delta;      // drift per axis
  std::vector<double> diffusion;  // dim x dim, symmetric positive definite
  ScalarField m0;                 // initial data; also fixes the grid
  std::vector<double> b_left;     // Dirichlet values, one per transverse node
  std::vector<double> b_right;
  double horizon = 0.0;
  bool all_periodic = false;
  // Optional forcing, used by manufactured-solution tests.
  std::function<double(double t, std::span<const double> u)> source;

  // Throws std::invalid_argument on inconsistent data: grid/dim mismatch,
  // asymmetric or non-positive-definite diffusion (tolerance 1e-12), or
  // initial data that disagrees with b on the faces by more than 1e-8.
  void validate() const;
};

struct SolverState {
  ScalarField m;
  double time = 0.0;
  int64_t step_count = 0;
  double dt = 0.0;  // step in force (last accepted)
};

SolverState make_state(const PdeProblem& problem);

// Time step bound 0.8 * min(h^2/(2 tr D), h/(4 |delta| max|m|)) with h the
// smallest grid spacing and |delta| the Euclidean drift norm.
double stable_dt(const PdeProblem& problem, const ScalarField& m);

// One explicit step of at most dt_cap (the CFL bound still applies).
// Conservative second-order central flux with local Lax-Friedrichs
// dissipation on reconstructed interface jumps; central second differences
// and four-corner cross stencils for the diffusion. Dirichlet faces are
// reimposed after the update. Throws with a CFL diagnostic if the field
// stops being finite.
void advance(SolverState& state, const PdeProblem& problem,
             double dt_cap = 0.0);

// Fields at the requested times (sorted, within [0, horizon]). An empty list
// yields just the field at the horizon. Steps land exactly on each time.
std::vector<ScalarField> solve(const PdeProblem& problem,
                               std::span<const double> snapshot_times);

// Sup-norm of |(after - before)/dt - RHS(before)| over computational nodes;
// t is the time of the first field (only the source term sees it).
double residual(const ScalarField& before, const ScalarField& after, double dt,
                const PdeProblem& problem, double t = 0.0);

}  // namespace asep

#endif
