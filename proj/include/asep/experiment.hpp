#ifndef ASEP_EXPERIMENT_HPP
#define ASEP_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asep/diffusion.hpp"
#include "asep/expression.hpp"
#include "asep/model.hpp"
#include "asep/observables.hpp"
#include "asep/scalar_field.hpp"
#include "asep/simulation.hpp"

namespace asep {

struct Norms {
  double l1 = 0.0;
  double l2 = 0.0;
  double sup = 0.0;
};

// Discrete norms of a - b over the window |u1| <= window_u1 (all nodes when
// window_u1 < 0), normalized by the window node count. Grids must coincide
// unless interpolate is set, in which case b is multilinearly interpolated
// onto a's nodes.
Norms compare_fields(const ScalarField& a, const ScalarField& b,
                     double window_u1 = -1.0, bool interpolate = false);

enum class DSource { Identity, File, Estimator };

struct EstimatorSettings {
  int inv_eps = 8;
  int replicas = 48;
  double amplitude = 0.2;
  int points = 15;
  double efolds = 3.0;
};

struct ExperimentConfig {
  int dim = 3;
  std::vector<int> ladder;  // inv_eps values, one cell per entry
  ModelParams model;
  Expression m0_expr;
  Expression b_left_expr;
  Expression b_right_expr;
  double ell = 1.0;
  BlockMode field_mode = BlockMode::Truncated;
  DSource d_source = DSource::Identity;
  std::string d_file;
  std::vector<double> snapshot_times;
  int replicas = 1;
  uint64_t master_seed = 1;
  std::string out_dir;
  double window_start = 0.0;  // stationarity time window
  double window_end = 0.0;
  int window_samples = 0;
  EstimatorSettings estimator;

  // Block radius rule k = ceil(ell * inv_eps^(2/d)); throws ConfigError when
  // the rule leaves no admissible block (k >= inv_eps).
  int block_radius(int inv_eps) const;

  static ExperimentConfig from_file(const std::string& path);
};

struct CliOverrides {
  std::optional<uint64_t> seed;
  std::optional<int> replicas;
  std::optional<std::string> out_dir;
};
void apply_overrides(ExperimentConfig& config, const CliOverrides& overrides);

struct ConvergenceRow {
  int inv_eps = 0;
  double eps = 0.0;
  int block_radius = 0;
  int replicas = 0;
  double time = 0.0;
  double l1 = 0.0, l2 = 0.0, sup = 0.0;
  double mc_se = 0.0;  // window-averaged standard error of the mean field
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;  // sorted by decreasing eps
  std::optional<double> slope;       // d log(l1) / d log(eps) fit
  bool l1_strictly_decreasing = false;
  double smallest_eps_l1 = 0.0;
  double pass_threshold = 0.0;  // 0.25 * sup |m| over the window
  bool passed = false;
};

// Simulates the full ladder, solves the PDE per cell on the matching grid,
// and compares the ensemble-averaged empirical field with the PDE solution
// smoothed by the same block kernel, over the interior window that stays
// 2k sites away from the axis-0 faces. Writes fields, report.csv/.json and
// manifest.json into out_dir when set.
ConvergenceReport run_convergence_study(const ExperimentConfig& config);

struct StationarityReport {
  bool sufficient_data = false;
  int replicas = 0;
  double global_mean = 0.0, global_se = 0.0, global_z = 0.0;
  struct Slice {
    double u1 = 0.0;
    double mean = 0.0, se = 0.0, z = 0.0;
  };
  std::vector<Slice> slices;
  double max_slice_abs_z = 0.0;
  bool passed = false;  // |global z| < 3 and every slice |z| < 4
};

// Requires b == 0 and m0 == 0 (ConfigError otherwise). Time-averages the
// centered occupancy over the configured window.
StationarityReport run_stationarity_check(const ExperimentConfig& config);

struct RunRecord {
  std::vector<uint64_t> replica_seeds;
  std::vector<double> times;
  std::vector<ScalarField> mean_fields;
  std::vector<std::vector<double>> mean_currents;  // [time][axis]
  RunSummary totals;
  double wall_seconds = 0.0;  // not written to any output file
};

RunRecord run_simulate(const ExperimentConfig& config);

// Mode-relaxation measurement of D on a torus; writes d_estimate.json into
// out_dir when set. Throws std::runtime_error when a probe fit fails or the
// assembled matrix is not positive definite.
DiffusionEstimate run_estimate_d(const ExperimentConfig& config);

// Resolve the diffusion matrix for the PDE per config (identity, file, or
// inline estimator run).
std::vector<double> resolve_diffusion_matrix(const ExperimentConfig& config);

// Evaluate an expression at the macroscopic positions of all lattice sites.
std::vector<double> eval_on_lattice(const Expression& expr,
                                    const Lattice& lattice);
// Evaluate on one axis-0 face (u1 = -1 or +1 by `left`), transverse order.
std::vector<double> eval_on_face(const Expression& expr,
                                 const Lattice& lattice, bool left);

BoundaryProfile boundary_profile_from(const ExperimentConfig& config,
                                      const Lattice& lattice);

}  // namespace asep

#endif
