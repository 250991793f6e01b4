// Command-line front end: simulate | pde | converge | stationary |
// estimate-d | oracle. Exit codes: 0 success, 2 configuration error,
// 3 numerical failure, 4 failed acceptance check (--check).

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "asep/burgers.hpp"
#include "asep/config_file.hpp"
#include "asep/experiment.hpp"
#include "asep/oracles.hpp"
#include "asep/scalar_field.hpp"
#include "asep/version.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;
constexpr int kCheckFailed = 4;

struct CommonOpts {
  std::string config_path;
  std::string seed_str;
  int replicas = 0;
  std::string out;
  bool check = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_check) {
  cmd->add_option("-c,--config", opts.config_path, "configuration file")
      ->required();
  cmd->add_option("--seed", opts.seed_str, "master seed override");
  cmd->add_option("--replicas", opts.replicas, "replica count override");
  cmd->add_option("--out", opts.out, "output directory override");
  if (with_check)
    cmd->add_flag("--check", opts.check, "exit 4 unless the check passes");
}

asep::ExperimentConfig load(const CommonOpts& opts) {
  asep::ExperimentConfig config =
      asep::ExperimentConfig::from_file(opts.config_path);
  asep::CliOverrides overrides;
  if (!opts.seed_str.empty()) overrides.seed = std::stoull(opts.seed_str);
  if (opts.replicas > 0) overrides.replicas = opts.replicas;
  if (!opts.out.empty()) overrides.out_dir = opts.out;
  asep::apply_overrides(config, overrides);
  return config;
}

int run_pde_task(const asep::ExperimentConfig& config) {
  using namespace asep;
  if (config.ladder.size() != 1)
    throw ConfigError("pde: exactly one lattice.inv_eps required");
  if (config.snapshot_times.empty())
    throw ConfigError("pde: run.snapshot_times required");
  const Lattice lattice = Lattice::cylinder(config.ladder[0], config.dim);
  const std::vector<double> m0 = eval_on_lattice(config.m0_expr, lattice);
  const BoundaryProfile boundary = boundary_profile_from(config, lattice);

  PdeProblem problem;
  problem.dim = config.dim;
  problem.delta.resize(size_t(config.dim));
  for (int a = 0; a < config.dim; ++a)
    problem.delta[size_t(a)] = config.model.delta(a);
  problem.diffusion = resolve_diffusion_matrix(config);
  problem.m0 = ScalarField::lattice_grid(lattice);
  problem.m0.values = m0;
  problem.b_left = boundary.left;
  problem.b_right = boundary.right;
  problem.horizon = config.snapshot_times.back();

  auto fields = solve(problem, config.snapshot_times);
  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    for (size_t j = 0; j < fields.size(); ++j) {
      char name[128];
      std::snprintf(name, sizeof name, "%s/pde_t%zu.csv",
                    config.out_dir.c_str(), j);
      write_field_csv(name, fields[j]);
    }
  }
  std::printf("pde: solved %zu snapshot(s) on a %d-node axis\n", fields.size(),
              lattice.side());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"open-boundary exclusion process simulator and Burgers solver"};
  app.set_version_flag("--version", ASEP_VERSION);
  app.require_subcommand(1);

  CommonOpts simulate_opts, pde_opts, converge_opts, stationary_opts,
      estimate_opts;

  auto* simulate = app.add_subcommand("simulate", "run replicas, dump fields");
  add_common(simulate, simulate_opts, false);
  auto* pde = app.add_subcommand("pde", "solve the limiting equation only");
  add_common(pde, pde_opts, false);
  auto* converge =
      app.add_subcommand("converge", "grid of eps: simulation vs PDE error");
  add_common(converge, converge_opts, true);
  auto* stationary =
      app.add_subcommand("stationary", "flat-profile stationarity statistics");
  add_common(stationary, stationary_opts, true);
  auto* estimate =
      app.add_subcommand("estimate-d", "measure the diffusion matrix");
  add_common(estimate, estimate_opts, false);

  auto* oracle = app.add_subcommand(
      "oracle", "brute-force references (independent of the engine)");
  oracle->require_subcommand(1);

  auto* gen = oracle->add_subcommand("generator-matrix",
                                     "8x8 rate matrix of the 3-site chain");
  double gen_pp = 1.2, gen_pm = 0.8, gen_bl = 0.0, gen_br = 0.0;
  gen->add_option("--p-plus", gen_pp, "jump weight +e1");
  gen->add_option("--p-minus", gen_pm, "jump weight -e1");
  gen->add_option("--b-left", gen_bl, "boundary offset, left face");
  gen->add_option("--b-right", gen_br, "boundary offset, right face");

  auto* blk = oracle->add_subcommand(
      "block-mean", "canonical-ensemble drift current by enumeration");
  int blk_dim = 1, blk_radius = 1;
  double blk_delta = 1.0;
  blk->add_option("--dim", blk_dim, "block dimension");
  blk->add_option("--radius", blk_radius, "block radius k");
  blk->add_option("--delta", blk_delta, "drift delta_i");

  auto* steady = oracle->add_subcommand(
      "steady-1d", "shooting solution of delta1 (m^2)' + d11 m'' = 0");
  double st_delta = 0.4, st_d11 = 1.0, st_bl = 0.3, st_br = -0.3;
  int st_nodes = 201;
  steady->add_option("--delta1", st_delta, "drift");
  steady->add_option("--d11", st_d11, "diffusion coefficient");
  steady->add_option("--b-left", st_bl, "m(-1)");
  steady->add_option("--b-right", st_br, "m(+1)");
  steady->add_option("--nodes", st_nodes, "output nodes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (simulate->parsed()) {
      auto record = asep::run_simulate(load(simulate_opts));
      std::printf("simulate: %llu events over %zu replica(s)\n",
                  (unsigned long long)record.totals.total_events(),
                  record.replica_seeds.size());
      return kOk;
    }
    if (pde->parsed()) return run_pde_task(load(pde_opts));
    if (converge->parsed()) {
      auto report = asep::run_convergence_study(load(converge_opts));
      for (const auto& r : report.rows)
        std::printf("inv_eps=%d t=%g L1=%.6g L2=%.6g sup=%.6g mc_se=%.6g\n",
                    r.inv_eps, r.time, r.l1, r.l2, r.sup, r.mc_se);
      std::printf("decreasing=%s smallest_L1=%.6g threshold=%.6g%s\n",
                  report.l1_strictly_decreasing ? "yes" : "no",
                  report.smallest_eps_l1, report.pass_threshold,
                  report.slope ? "" : " (no slope: single cell)");
      if (converge_opts.check && !report.passed) return kCheckFailed;
      return kOk;
    }
    if (stationary->parsed()) {
      auto report = asep::run_stationarity_check(load(stationary_opts));
      if (!report.sufficient_data) {
        std::printf("stationary: insufficient data (empty time window)\n");
        return stationary_opts.check ? kCheckFailed : kOk;
      }
      std::printf("stationary: global z=%.3f max slice |z|=%.3f -> %s\n",
                  report.global_z, report.max_slice_abs_z,
                  report.passed ? "ok" : "off");
      if (stationary_opts.check && !report.passed) return kCheckFailed;
      return kOk;
    }
    if (estimate->parsed()) {
      auto est = asep::run_estimate_d(load(estimate_opts));
      std::printf("estimate-d: min eigenvalue %.4f, asymmetry %.4g\n",
                  est.min_eigenvalue, est.max_asymmetry);
      for (int i = 0; i < est.dim; ++i) {
        for (int j = 0; j < est.dim; ++j)
          std::printf("%s%.5f", j ? " " : "", est.d_hat[size_t(i) * est.dim + j]);
        std::printf("\n");
      }
      return kOk;
    }
    if (gen->parsed()) {
      asep::ModelParams params;
      params.dim = 1;
      params.p_plus = {gen_pp};
      params.p_minus = {gen_pm};
      auto rate = asep::three_site_rate_matrix(params, gen_bl, gen_br);
      for (int s = 0; s < 8; ++s) {
        for (int t = 0; t < 8; ++t)
          std::printf("%s%.17g", t ? "," : "", rate[s][t]);
        std::printf("\n");
      }
      return kOk;
    }
    if (blk->parsed()) {
      int64_t cells = 1;
      for (int i = 0; i < blk_dim; ++i) cells *= 2 * blk_radius + 1;
      std::printf("n,enumerated,closed_form\n");
      for (int n = 0; n <= cells; ++n) {
        const double rho = double(n) / double(cells);
        std::printf("%d,%.17g,%.17g\n", n,
                    asep::enumerated_block_current_mean(int(cells), n,
                                                        blk_delta),
                    asep::conditional_current_mean(rho, cells, blk_delta));
      }
      return kOk;
    }
    if (steady->parsed()) {
      auto profile = asep::shooting_steady_profile(st_delta, st_d11, st_bl,
                                                   st_br, st_nodes);
      std::printf("u,m\n");
      for (int i = 0; i < st_nodes; ++i)
        std::printf("%.17g,%.17g\n", -1.0 + 2.0 * i / (st_nodes - 1),
                    profile[size_t(i)]);
      return kOk;
    }
  } catch (const asep::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumericalError;
  }
  return kOk;
}
