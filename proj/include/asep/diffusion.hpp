#ifndef ASEP_DIFFUSION_HPP
#define ASEP_DIFFUSION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "asep/lattice.hpp"
#include "asep/model.hpp"

namespace asep {

// Sinusoidal density perturbation on the fully periodic torus: occupation
// probabilities 1/2 + amplitude*cos(q~.x), q~_i = 2 pi q_i / side. The mode
// amplitude is tracked on the diffusive time scale; its envelope decays as
// exp(-(kappa.D kappa) t) with kappa = q~/eps, which is what the fit returns.
struct ModeProbe {
  std::vector<int> wavevector;  // integer q, at least one nonzero entry
  double amplitude = 0.05;
  int replicas = 16;
  std::vector<double> macro_times;  // sorted observation times
};

struct RateEstimate {
  double rate = 0.0;  // fitted kappa.D kappa
  double se = 0.0;
  double r2 = 0.0;
  int points_used = 0;
  bool ok = false;
  std::string note;
  std::vector<double> amplitudes;  // ensemble mean per observation time
  std::vector<double> amplitude_se;
};

RateEstimate relax_mode(const Lattice& torus, const ModelParams& params,
                        const ModeProbe& probe, uint64_t master_seed,
                        int workers = 1);

struct ProbeResult {
  std::vector<int> wavevector;
  std::vector<double> kappa;  // macroscopic wavevector q~/eps
  RateEstimate estimate;
};

struct DiffusionEstimate {
  int dim = 0;
  std::vector<double> d_hat;  // dim x dim, symmetric
  std::vector<double> d_se;   // entrywise standard error
  double min_eigenvalue = 0.0;
  double max_asymmetry = 0.0;  // disagreement between paired +/- mixed probes
  bool positive_definite = false;
  std::vector<ProbeResult> probes;
};

// Solves kappa.D kappa = rate for the symmetric D by weighted least squares.
// Needs at least d axis-aligned and d(d-1)/2 mixed probes (throws otherwise).
DiffusionEstimate assemble_diffusion(const std::vector<ProbeResult>& probes,
                                     int dim);

// Probe budget for the standard measurement: unit vectors e_i plus the
// mixed e_i + e_j for every pair.
std::vector<std::vector<int>> standard_probe_set(int dim);

}  // namespace asep

#endif
