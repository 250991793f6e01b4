#include "asep/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "asep/burgers.hpp"
#include "asep/config_file.hpp"
#include "asep/parallel.hpp"
#include "asep/rng.hpp"
#include "asep/snapshot.hpp"
#include "asep/version.hpp"

namespace asep {

namespace {

namespace fs = std::filesystem;

// Multilinear interpolation of `f` at position u (clamped on the bounded
// axis, wrapped on periodic ones).
double interp_at(const ScalarField& f, std::span<const double> u) {
  const int d = f.dim;
  std::vector<int> lo(d);
  std::vector<double> frac(d);
  for (int a = 0; a < d; ++a) {
    const auto& ax = f.axes[a];
    double x = (u[size_t(a)] - ax.origin) / ax.spacing;
    if (ax.periodic) {
      const double n = ax.n;
      x = std::fmod(std::fmod(x, n) + n, n);
      lo[size_t(a)] = int(std::floor(x)) % ax.n;
    } else {
      x = std::clamp(x, 0.0, double(ax.n - 1));
      lo[size_t(a)] = std::min(int(std::floor(x)), ax.n - 2);
    }
    frac[size_t(a)] = x - std::floor(x);
  }
  double acc = 0.0;
  std::vector<int> idx(d);
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      const bool hi = corner & (1 << a);
      w *= hi ? frac[size_t(a)] : 1.0 - frac[size_t(a)];
      int j = lo[size_t(a)] + (hi ? 1 : 0);
      if (f.axes[a].periodic && j >= f.axes[a].n) j -= f.axes[a].n;
      idx[size_t(a)] = std::min(j, f.axes[a].n - 1);
    }
    acc += w * f.at(idx);
  }
  return acc;
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

nlohmann::json config_manifest(const ExperimentConfig& c) {
  nlohmann::json j;
  j["version"] = ASEP_VERSION;
  j["dim"] = c.dim;
  j["ladder"] = c.ladder;
  j["p_plus"] = c.model.p_plus;
  j["p_minus"] = c.model.p_minus;
  j["boundary_variant"] = c.model.variant == BoundaryVariant::DriftAligned
                              ? "drift_aligned"
                              : "reversible_one_site";
  j["speedup_exponent"] = c.model.speedup_exponent;
  j["m0"] = c.m0_expr.empty() ? "" : c.m0_expr.source();
  j["b_left"] = c.b_left_expr.empty() ? "" : c.b_left_expr.source();
  j["b_right"] = c.b_right_expr.empty() ? "" : c.b_right_expr.source();
  j["ell"] = c.ell;
  j["block_mode"] =
      c.field_mode == BlockMode::Truncated ? "truncated" : "restricted";
  j["d_source"] = c.d_source == DSource::Identity
                      ? "identity"
                      : (c.d_source == DSource::File ? "file" : "estimator");
  if (!c.d_file.empty()) j["d_file"] = c.d_file;
  j["snapshot_times"] = c.snapshot_times;
  j["replicas"] = c.replicas;
  j["master_seed"] = c.master_seed;
  return j;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << "\n";
}

void warn_low_dimension(const ExperimentConfig& c) {
  if (c.dim <= 2)
    std::fprintf(stderr,
                 "warning: d = %d; transport coefficients of the driven "
                 "dynamics diverge for d <= 2, treat results as smoke tests\n",
                 c.dim);
}

uint64_t cell_replica_seed(uint64_t master, int inv_eps, int replica) {
  return Rng::mix(Rng::mix(master, uint64_t(inv_eps)), uint64_t(replica));
}

ScalarField field_from_values(const Lattice& lattice,
                              const std::vector<double>& values) {
  ScalarField f = ScalarField::lattice_grid(lattice);
  f.values = values;
  return f;
}

}  // namespace

Norms compare_fields(const ScalarField& a, const ScalarField& b,
                     double window_u1, bool interpolate) {
  const ScalarField* bb = &b;
  ScalarField resampled;
  if (!a.same_grid(b)) {
    if (!interpolate)
      throw std::invalid_argument(
          "compare fields: grid mismatch and interpolation disabled");
    resampled = a;  // copy grid
    std::vector<int> idx(a.dim, 0);
    std::vector<double> u(a.dim);
    for (int64_t flat = 0; flat < a.size(); ++flat) {
      for (int ax = 0; ax < a.dim; ++ax) u[size_t(ax)] = a.node_position(ax, idx[size_t(ax)]);
      resampled.values[size_t(flat)] = interp_at(b, u);
      for (int ax = a.dim - 1; ax >= 0; --ax) {
        if (++idx[size_t(ax)] < a.axes[size_t(ax)].n) break;
        idx[size_t(ax)] = 0;
      }
    }
    bb = &resampled;
  }

  Norms norms;
  int64_t count = 0;
  std::vector<int> idx(a.dim, 0);
  for (int64_t flat = 0; flat < a.size(); ++flat) {
    const double u1 = a.node_position(0, idx[0]);
    if (window_u1 < 0.0 || std::fabs(u1) <= window_u1 + 1e-12) {
      const double d = a.values[size_t(flat)] - bb->values[size_t(flat)];
      norms.l1 += std::fabs(d);
      norms.l2 += d * d;
      norms.sup = std::max(norms.sup, std::fabs(d));
      ++count;
    }
    for (int ax = a.dim - 1; ax >= 0; --ax) {
      if (++idx[size_t(ax)] < a.axes[size_t(ax)].n) break;
      idx[size_t(ax)] = 0;
    }
  }
  if (count == 0)
    throw std::invalid_argument("compare fields: empty comparison window");
  norms.l1 /= double(count);
  norms.l2 = std::sqrt(norms.l2 / double(count));
  return norms;
}

int ExperimentConfig::block_radius(int inv_eps) const {
  const double raw = ell * std::pow(double(inv_eps), 2.0 / dim);
  int k = int(std::ceil(raw - 1e-9));
  if (k < 1) k = 1;
  if (k >= inv_eps)
    throw ConfigError("blocks: rule k = ceil(ell * eps^(-2/d)) gives k = " +
                      std::to_string(k) + " >= inv_eps = " +
                      std::to_string(inv_eps));
  return k;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  ConfigFile f = ConfigFile::parse_file(path);
  ExperimentConfig c;

  c.dim = f.get_int("lattice", "dim");
  if (c.dim < 1 || c.dim > kMaxDim)
    throw ConfigError("lattice.dim out of range");
  c.ladder = f.get_ints("lattice", "inv_eps");
  for (int n : c.ladder)
    if (n < 1) throw ConfigError("lattice.inv_eps entries must be >= 1");

  c.model.dim = c.dim;
  c.model.p_plus = f.get_doubles("model", "p_plus");
  c.model.p_minus = f.get_doubles("model", "p_minus");
  if (auto v = f.get_opt("model", "boundary")) {
    if (*v == "drift_aligned")
      c.model.variant = BoundaryVariant::DriftAligned;
    else if (*v == "reversible_one_site")
      c.model.variant = BoundaryVariant::ReversibleOneSite;
    else
      throw ConfigError("model.boundary must be drift_aligned or "
                        "reversible_one_site");
  }
  c.model.speedup_exponent = f.get_double("model", "speedup_exponent", 0.0);
  try {
    c.model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  auto parse_expr = [&](const std::string& key,
                        const std::string& fallback) -> Expression {
    std::string text = fallback;
    if (auto v = f.get_opt("profiles", key)) text = *v;
    try {
      return Expression::parse(text, c.dim);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("profiles.") + key + ": " + e.what());
    }
  };
  c.m0_expr = parse_expr("m0", "0");
  std::string b_default = "0";
  if (auto v = f.get_opt("profiles", "b")) b_default = *v;
  Expression b_expr;
  try {
    b_expr = Expression::parse(b_default, c.dim);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("profiles.b: ") + e.what());
  }
  c.b_left_expr = b_expr;
  c.b_right_expr = b_expr;
  if (f.has("profiles", "b_left")) c.b_left_expr = parse_expr("b_left", "0");
  if (f.has("profiles", "b_right")) c.b_right_expr = parse_expr("b_right", "0");

  c.ell = f.get_double("blocks", "ell", 1.0);
  if (c.ell <= 0) throw ConfigError("blocks.ell must be positive");
  if (auto v = f.get_opt("blocks", "mode")) {
    if (*v == "truncated")
      c.field_mode = BlockMode::Truncated;
    else if (*v == "restricted")
      c.field_mode = BlockMode::Restricted;
    else
      throw ConfigError("blocks.mode must be truncated or restricted");
  }

  if (auto v = f.get_opt("pde", "d_source")) {
    if (*v == "identity")
      c.d_source = DSource::Identity;
    else if (*v == "file")
      c.d_source = DSource::File;
    else if (*v == "estimator")
      c.d_source = DSource::Estimator;
    else
      throw ConfigError("pde.d_source must be identity, file or estimator");
  }
  if (auto v = f.get_opt("pde", "d_file")) c.d_file = *v;
  if (c.d_source == DSource::File && c.d_file.empty())
    throw ConfigError("pde.d_file required when d_source = file");

  if (f.has("run", "snapshot_times")) {
    c.snapshot_times = f.get_doubles("run", "snapshot_times");
    for (size_t i = 0; i < c.snapshot_times.size(); ++i) {
      if (c.snapshot_times[i] < 0)
        throw ConfigError("run.snapshot_times must be non-negative");
      if (i > 0 && c.snapshot_times[i] < c.snapshot_times[i - 1])
        throw ConfigError("run.snapshot_times must be sorted");
    }
  }
  c.replicas = f.get_int("run", "replicas", 1);
  if (c.replicas < 1) throw ConfigError("run.replicas must be >= 1");
  c.master_seed = f.get_u64("run", "master_seed", 1);
  if (f.has("run", "window")) {
    auto w = f.get_doubles("run", "window");
    if (w.size() != 2) throw ConfigError("run.window must be two times");
    c.window_start = w[0];
    c.window_end = w[1];
  }
  c.window_samples = f.get_int("run", "samples", 0);

  c.estimator.inv_eps = f.get_int("estimator", "inv_eps", 8);
  c.estimator.replicas = f.get_int("estimator", "replicas", 48);
  c.estimator.amplitude = f.get_double("estimator", "amplitude", 0.2);
  c.estimator.points = f.get_int("estimator", "points", 15);
  c.estimator.efolds = f.get_double("estimator", "efolds", 3.0);

  if (auto v = f.get_opt("output", "dir")) c.out_dir = *v;

  auto unknown = f.unknown_keys();
  if (!unknown.empty()) {
    std::string msg = "config: unknown key(s):";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }
  return c;
}

void apply_overrides(ExperimentConfig& config, const CliOverrides& o) {
  if (o.seed) config.master_seed = *o.seed;
  if (o.replicas) config.replicas = *o.replicas;
  if (o.out_dir) config.out_dir = *o.out_dir;
}

std::vector<double> eval_on_lattice(const Expression& expr,
                                    const Lattice& lattice) {
  std::vector<double> out(size_t(lattice.site_count()));
  std::vector<double> u(size_t(lattice.dim()));
  for (int64_t s = 0; s < lattice.site_count(); ++s) {
    Coords c = lattice.decode(s);
    for (int a = 0; a < lattice.dim(); ++a)
      u[size_t(a)] = lattice.macro_position(c[size_t(a)], a);
    out[size_t(s)] = expr.eval(u);
  }
  return out;
}

std::vector<double> eval_on_face(const Expression& expr,
                                 const Lattice& lattice, bool left) {
  const int64_t face = lattice.face_site_count();
  std::vector<double> out(size_t(face));
  std::vector<double> u(size_t(lattice.dim()));
  const int64_t base = left ? 0 : lattice.site_count() - face;
  for (int64_t t = 0; t < face; ++t) {
    Coords c = lattice.decode(base + t);
    for (int a = 0; a < lattice.dim(); ++a)
      u[size_t(a)] = lattice.macro_position(c[size_t(a)], a);
    out[size_t(t)] = expr.eval(u);
  }
  return out;
}

BoundaryProfile boundary_profile_from(const ExperimentConfig& config,
                                      const Lattice& lattice) {
  BoundaryProfile profile;
  profile.left = eval_on_face(config.b_left_expr, lattice, true);
  profile.right = eval_on_face(config.b_right_expr, lattice, false);
  return profile;
}

std::vector<double> resolve_diffusion_matrix(const ExperimentConfig& config) {
  const int d = config.dim;
  if (config.d_source == DSource::Identity) {
    std::vector<double> m(size_t(d) * d, 0.0);
    for (int i = 0; i < d; ++i) m[size_t(i) * d + i] = 1.0;
    return m;
  }
  if (config.d_source == DSource::File) {
    std::ifstream in(config.d_file);
    if (!in) throw ConfigError("pde.d_file: cannot open " + config.d_file);
    nlohmann::json j;
    in >> j;
    const auto& rows = j.contains("d_hat") ? j["d_hat"] : j.at("d");
    if (int(rows.size()) != d)
      throw ConfigError("pde.d_file: matrix must be dim x dim");
    std::vector<double> m(size_t(d) * d);
    for (int i = 0; i < d; ++i) {
      if (int(rows[size_t(i)].size()) != d)
        throw ConfigError("pde.d_file: matrix must be dim x dim");
      for (int jx = 0; jx < d; ++jx)
        m[size_t(i) * d + jx] = rows[size_t(i)][size_t(jx)].get<double>();
    }
    return m;
  }
  DiffusionEstimate est = run_estimate_d(config);
  return est.d_hat;
}

namespace {

PdeProblem build_pde_problem(const ExperimentConfig& config,
                             const Lattice& lattice,
                             const std::vector<double>& diffusion,
                             const std::vector<double>& m0_sites,
                             const BoundaryProfile& boundary, double horizon) {
  PdeProblem p;
  p.dim = config.dim;
  p.delta.resize(size_t(config.dim));
  for (int a = 0; a < config.dim; ++a) p.delta[size_t(a)] = config.model.delta(a);
  p.diffusion = diffusion;
  p.m0 = field_from_values(lattice, m0_sites);
  p.b_left = boundary.left;
  p.b_right = boundary.right;
  p.horizon = horizon;
  return p;
}

}  // namespace

ConvergenceReport run_convergence_study(const ExperimentConfig& config) {
  if (config.snapshot_times.empty())
    throw ConfigError("converge: run.snapshot_times required");
  if (config.ladder.empty()) throw ConfigError("converge: empty ladder");
  warn_low_dimension(config);

  // rows ordered by decreasing eps = increasing inv_eps
  std::vector<int> ladder = config.ladder;
  std::sort(ladder.begin(), ladder.end());

  const std::vector<double> diffusion = resolve_diffusion_matrix(config);
  const size_t n_times = config.snapshot_times.size();
  const int workers = worker_count();

  ensure_dir(config.out_dir);
  nlohmann::json manifest = config_manifest(config);
  manifest["task"] = "converge";
  manifest["diffusion"] = diffusion;

  ConvergenceReport report;
  // per snapshot time: l1 per cell, for the pass checks
  std::vector<std::vector<double>> l1_by_time(n_times);
  double threshold = 0.0;

  for (int inv_eps : ladder) {
    const Lattice lattice = Lattice::cylinder(inv_eps, config.dim);
    const int k = config.block_radius(inv_eps);
    if (2 * k > inv_eps)
      throw ConfigError(
          "converge: interior window empty (2k > inv_eps); lower blocks.ell");
    const double eps = lattice.eps();
    const double window_u1 = (inv_eps - 2 * k) * eps;
    const BlockSpec block{k};

    const std::vector<double> m0_sites =
        eval_on_lattice(config.m0_expr, lattice);
    const BoundaryProfile boundary = boundary_profile_from(config, lattice);

    // hydrodynamic compatibility m0 = b on the faces
    const int64_t face = lattice.face_site_count();
    for (int64_t t = 0; t < face; ++t) {
      if (std::fabs(m0_sites[size_t(t)] - boundary.left[size_t(t)]) > 1e-9 ||
          std::fabs(m0_sites[size_t(lattice.site_count() - face + t)] -
                    boundary.right[size_t(t)]) > 1e-9)
        throw ConfigError(
            "converge: m0 must equal b on the boundary faces (profiles "
            "violate m0|_faces = b)");
    }

    PdeProblem pde = build_pde_problem(config, lattice, diffusion, m0_sites,
                                       boundary, config.snapshot_times.back());
    std::vector<ScalarField> pde_fields = solve(pde, config.snapshot_times);
    std::vector<ScalarField> pde_smoothed;
    pde_smoothed.reserve(n_times);
    for (const auto& f : pde_fields)
      pde_smoothed.push_back(
          block_smooth(lattice, f, block, BlockMode::Restricted));

    // replica fields, stored per replica and reduced in index order
    const int M = config.replicas;
    std::vector<std::vector<std::vector<double>>> fields(
        size_t(M), std::vector<std::vector<double>>(n_times));
    std::vector<uint64_t> seeds(size_t(M));
    for (int r = 0; r < M; ++r)
      seeds[size_t(r)] = cell_replica_seed(config.master_seed, inv_eps, r);

    parallel_for(M, workers, [&](int64_t r) {
      Rng rng(seeds[size_t(r)]);
      ExclusionProcess process(lattice, config.model, boundary);
      process.sample_initial(m0_sites, rng);
      auto on_snapshot = [&](size_t idx, double) {
        ScalarField f = empirical_field(lattice, process.occupancy(), block,
                                        BlockMode::Restricted);
        fields[size_t(r)][idx] = std::move(f.values);
      };
      process.run_until_macro(config.snapshot_times.back(),
                              config.snapshot_times, rng, on_snapshot);
    });

    ScalarField grid = empirical_field(
        lattice, std::vector<uint8_t>(size_t(lattice.site_count()), 0), block,
        BlockMode::Restricted);
    const int64_t nodes = grid.size();

    for (size_t j = 0; j < n_times; ++j) {
      ScalarField mean = grid;
      for (int64_t i = 0; i < nodes; ++i) {
        double acc = 0.0;
        for (int r = 0; r < M; ++r) acc += fields[size_t(r)][j][size_t(i)];
        mean.values[size_t(i)] = acc / M;
      }
      mean.meta.eps = eps;
      mean.meta.block_radius = k;
      mean.meta.time = config.snapshot_times[j];
      mean.meta.seed = config.master_seed;
      mean.meta.variant = config.model.variant == BoundaryVariant::DriftAligned
                              ? "drift_aligned"
                              : "reversible_one_site";

      // window-averaged Monte Carlo standard error of the mean field
      double se_acc = 0.0;
      int64_t se_count = 0;
      {
        std::vector<int> idx(mean.dim, 0);
        for (int64_t i = 0; i < nodes; ++i) {
          const double u1 = mean.node_position(0, idx[0]);
          if (std::fabs(u1) <= window_u1 + 1e-12) {
            double var = 0.0;
            if (M > 1) {
              const double mu = mean.values[size_t(i)];
              for (int r = 0; r < M; ++r) {
                const double d = fields[size_t(r)][j][size_t(i)] - mu;
                var += d * d;
              }
              var /= double(M - 1);
            }
            se_acc += std::sqrt(var / M);
            ++se_count;
          }
          for (int ax = mean.dim - 1; ax >= 0; --ax) {
            if (++idx[size_t(ax)] < mean.axes[size_t(ax)].n) break;
            idx[size_t(ax)] = 0;
          }
        }
      }

      Norms norms = compare_fields(mean, pde_smoothed[j], window_u1);

      ConvergenceRow row;
      row.inv_eps = inv_eps;
      row.eps = eps;
      row.block_radius = k;
      row.replicas = M;
      row.time = config.snapshot_times[j];
      row.l1 = norms.l1;
      row.l2 = norms.l2;
      row.sup = norms.sup;
      row.mc_se = se_count ? se_acc / double(se_count) : 0.0;
      report.rows.push_back(row);
      l1_by_time[j].push_back(norms.l1);

      if (!config.out_dir.empty()) {
        char name[128];
        std::snprintf(name, sizeof name, "%s/sim_inv%d_t%zu.csv",
                      config.out_dir.c_str(), inv_eps, j);
        write_field_csv(name, mean);
        std::snprintf(name, sizeof name, "%s/pde_inv%d_t%zu.csv",
                      config.out_dir.c_str(), inv_eps, j);
        write_field_csv(name, pde_smoothed[j]);
      }

      // pass threshold from the finest cell at the last snapshot time
      if (inv_eps == ladder.back() && j == n_times - 1) {
        double sup_m = 0.0;
        std::vector<int> idx(mean.dim, 0);
        for (int64_t i = 0; i < nodes; ++i) {
          const double u1 = mean.node_position(0, idx[0]);
          if (std::fabs(u1) <= window_u1 + 1e-12)
            sup_m = std::max(sup_m,
                             std::fabs(pde_smoothed[j].values[size_t(i)]));
          for (int ax = mean.dim - 1; ax >= 0; --ax) {
            if (++idx[size_t(ax)] < mean.axes[size_t(ax)].n) break;
            idx[size_t(ax)] = 0;
          }
        }
        threshold = 0.25 * sup_m;
      }
    }
    manifest["replica_seeds"][std::to_string(inv_eps)] = seeds;
  }

  // pass checks: strict decrease per snapshot time, smallness at the finest
  // cell of the last time
  report.l1_strictly_decreasing = true;
  for (const auto& l1s : l1_by_time)
    for (size_t c = 1; c < l1s.size(); ++c)
      if (!(l1s[c] < l1s[c - 1])) report.l1_strictly_decreasing = false;
  report.smallest_eps_l1 = l1_by_time.back().back();
  report.pass_threshold = threshold;
  report.passed = report.l1_strictly_decreasing &&
                  report.smallest_eps_l1 < threshold &&
                  ladder.size() >= 1;

  if (ladder.size() >= 2) {
    // least squares of ln l1 against ln eps at the last snapshot time
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto& l1s = l1_by_time.back();
    for (size_t c = 0; c < ladder.size(); ++c) {
      const double x = std::log(1.0 / ladder[c]);
      const double y = std::log(std::max(l1s[c], 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = double(ladder.size());
    report.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }

  if (!config.out_dir.empty()) {
    std::string path = config.out_dir + "/report.csv";
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + path);
    std::fprintf(f, "inv_eps,eps,k,replicas,time,l1,l2,sup,mc_se\n");
    for (const auto& r : report.rows)
      std::fprintf(f, "%d,%.17g,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                   r.inv_eps, r.eps, r.block_radius, r.replicas, r.time, r.l1,
                   r.l2, r.sup, r.mc_se);
    std::fclose(f);

    nlohmann::json jr;
    for (const auto& r : report.rows)
      jr["rows"].push_back({{"inv_eps", r.inv_eps},
                            {"eps", r.eps},
                            {"k", r.block_radius},
                            {"replicas", r.replicas},
                            {"time", r.time},
                            {"l1", r.l1},
                            {"l2", r.l2},
                            {"sup", r.sup},
                            {"mc_se", r.mc_se}});
    if (report.slope) jr["slope"] = *report.slope;
    jr["l1_strictly_decreasing"] = report.l1_strictly_decreasing;
    jr["smallest_eps_l1"] = report.smallest_eps_l1;
    jr["pass_threshold"] = report.pass_threshold;
    jr["passed"] = report.passed;
    write_json(config.out_dir + "/report.json", jr);
    write_json(config.out_dir + "/manifest.json", manifest);
  }
  return report;
}

StationarityReport run_stationarity_check(const ExperimentConfig& config) {
  if (config.ladder.size() != 1)
    throw ConfigError("stationary: exactly one lattice.inv_eps required");
  warn_low_dimension(config);

  const Lattice lattice = Lattice::cylinder(config.ladder[0], config.dim);
  const std::vector<double> m0_sites =
      eval_on_lattice(config.m0_expr, lattice);
  const BoundaryProfile boundary = boundary_profile_from(config, lattice);
  for (double v : m0_sites)
    if (std::fabs(v) > 1e-15)
      throw ConfigError("stationary: requires m0 = 0 everywhere");
  for (double v : boundary.left)
    if (std::fabs(v) > 1e-15)
      throw ConfigError("stationary: requires b = 0 on the boundary");
  for (double v : boundary.right)
    if (std::fabs(v) > 1e-15)
      throw ConfigError("stationary: requires b = 0 on the boundary");

  StationarityReport report;
  report.replicas = config.replicas;
  if (config.window_samples <= 0 || config.window_end <= config.window_start) {
    report.sufficient_data = false;
    report.passed = false;
    if (!config.out_dir.empty()) {
      ensure_dir(config.out_dir);
      nlohmann::json j;
      j["sufficient_data"] = false;
      write_json(config.out_dir + "/stationarity.json", j);
      nlohmann::json manifest = config_manifest(config);
      manifest["task"] = "stationary";
      write_json(config.out_dir + "/manifest.json", manifest);
    }
    return report;
  }
  report.sufficient_data = true;

  const int samples = config.window_samples;
  std::vector<double> times(size_t(samples));
  for (int i = 0; i < samples; ++i)
    times[size_t(i)] = config.window_start +
                       (i + 1) * (config.window_end - config.window_start) /
                           samples;

  const int side = lattice.side();
  const int64_t sites = lattice.site_count();
  const int M = config.replicas;
  // per replica: time-averaged global mean and per-slice means
  std::vector<double> global(size_t(M), 0.0);
  std::vector<std::vector<double>> slices(size_t(M),
                                          std::vector<double>(size_t(side), 0.0));

  parallel_for(M, worker_count(), [&](int64_t r) {
    Rng rng(cell_replica_seed(config.master_seed, lattice.inv_eps(), int(r)));
    ExclusionProcess process(lattice, config.model, boundary);
    process.sample_initial(m0_sites, rng);
    std::vector<double> slice_acc(size_t(side), 0.0);
    double global_acc = 0.0;
    auto on_snapshot = [&](size_t, double) {
      auto occ = process.occupancy();
      const int64_t face = sites / side;
      for (int t = 0; t < side; ++t) {
        int64_t cnt = 0;
        for (int64_t i = 0; i < face; ++i)
          cnt += occ[size_t(t) * size_t(face) + size_t(i)];
        const double centered = double(cnt) / double(face) - 0.5;
        slice_acc[size_t(t)] += centered;
        global_acc += centered / side;
      }
    };
    process.run_until_macro(times.back(), times, rng, on_snapshot);
    global[size_t(r)] = global_acc / samples;
    for (int t = 0; t < side; ++t)
      slices[size_t(r)][size_t(t)] = slice_acc[size_t(t)] / samples;
  });

  auto z_of = [&](const std::vector<double>& xs, double& mean, double& se) {
    mean = 0.0;
    for (double x : xs) mean += x;
    mean /= double(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var = xs.size() > 1 ? var / double(xs.size() - 1) : 0.0;
    se = std::sqrt(var / double(xs.size()));
    return se > 0 ? mean / se : 0.0;
  };

  report.global_z = z_of(global, report.global_mean, report.global_se);

  report.max_slice_abs_z = 0.0;
  for (int t = 0; t < side; ++t) {
    std::vector<double> xs(size_t(M));
    for (int r = 0; r < M; ++r) xs[size_t(r)] = slices[size_t(r)][size_t(t)];
    StationarityReport::Slice s;
    s.u1 = lattice.macro_position(t - lattice.inv_eps(), 0);
    s.z = z_of(xs, s.mean, s.se);
    report.slices.push_back(s);
    report.max_slice_abs_z = std::max(report.max_slice_abs_z, std::fabs(s.z));
  }
  report.passed = std::fabs(report.global_z) < 3.0 &&
                  report.max_slice_abs_z < 4.0;

  if (!config.out_dir.empty()) {
    ensure_dir(config.out_dir);
    nlohmann::json j;
    j["sufficient_data"] = true;
    j["replicas"] = M;
    j["global"] = {{"mean", report.global_mean},
                   {"se", report.global_se},
                   {"z", report.global_z}};
    for (const auto& s : report.slices)
      j["slices"].push_back(
          {{"u1", s.u1}, {"mean", s.mean}, {"se", s.se}, {"z", s.z}});
    j["max_slice_abs_z"] = report.max_slice_abs_z;
    j["passed"] = report.passed;
    write_json(config.out_dir + "/stationarity.json", j);
    nlohmann::json manifest = config_manifest(config);
    manifest["task"] = "stationary";
    write_json(config.out_dir + "/manifest.json", manifest);
  }
  return report;
}

RunRecord run_simulate(const ExperimentConfig& config) {
  if (config.ladder.size() != 1)
    throw ConfigError("simulate: exactly one lattice.inv_eps required");
  if (config.snapshot_times.empty())
    throw ConfigError("simulate: run.snapshot_times required");
  warn_low_dimension(config);

  const Lattice lattice = Lattice::cylinder(config.ladder[0], config.dim);
  const int k = config.block_radius(lattice.inv_eps());
  const BlockSpec block{k};
  const std::vector<double> m0_sites =
      eval_on_lattice(config.m0_expr, lattice);
  const BoundaryProfile boundary = boundary_profile_from(config, lattice);

  const int M = config.replicas;
  const size_t n_times = config.snapshot_times.size();

  RunRecord record;
  record.times = config.snapshot_times;
  record.replica_seeds.resize(size_t(M));
  for (int r = 0; r < M; ++r)
    record.replica_seeds[size_t(r)] =
        cell_replica_seed(config.master_seed, lattice.inv_eps(), r);

  std::vector<std::vector<std::vector<double>>> fields(
      size_t(M), std::vector<std::vector<double>>(n_times));
  std::vector<std::vector<std::vector<double>>> currents(
      size_t(M),
      std::vector<std::vector<double>>(n_times,
                                       std::vector<double>(size_t(config.dim))));
  std::vector<RunSummary> summaries(size_t(M));
  std::vector<uint8_t> final_occupancy;
  double final_micro_time = 0.0;

  const auto t_start = std::chrono::steady_clock::now();
  parallel_for(M, worker_count(), [&](int64_t r) {
    Rng rng(record.replica_seeds[size_t(r)]);
    ExclusionProcess process(lattice, config.model, boundary);
    process.sample_initial(m0_sites, rng);
    auto on_snapshot = [&](size_t idx, double) {
      ScalarField f = empirical_field(lattice, process.occupancy(), block,
                                      config.field_mode);
      fields[size_t(r)][idx] = std::move(f.values);
      // bond-averaged current per axis
      auto occ = process.occupancy();
      for (int a = 0; a < config.dim; ++a) {
        double acc = 0.0;
        int64_t bonds = 0;
        for (int64_t s = 0; s < lattice.site_count(); ++s) {
          if (lattice.neighbor_raw(s, a, 1) < 0) continue;
          acc += current(lattice, occ, s, a + 1, config.model.delta(a));
          ++bonds;
        }
        currents[size_t(r)][idx][size_t(a)] = bonds ? acc / double(bonds) : 0.0;
      }
      if (r == 0 && idx == n_times - 1) {
        auto o = process.occupancy();
        final_occupancy.assign(o.begin(), o.end());
        final_micro_time = process.micro_time();
      }
    };
    summaries[size_t(r)] = process.run_until_macro(
        config.snapshot_times.back(), config.snapshot_times, rng, on_snapshot);
  });
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();

  for (int r = 0; r < M; ++r) {
    record.totals.exchange_events += summaries[size_t(r)].exchange_events;
    record.totals.birth_events += summaries[size_t(r)].birth_events;
    record.totals.death_events += summaries[size_t(r)].death_events;
    record.totals.absorbed |= summaries[size_t(r)].absorbed;
  }

  ScalarField grid = empirical_field(
      lattice, std::vector<uint8_t>(size_t(lattice.site_count()), 0), block,
      config.field_mode);
  for (size_t j = 0; j < n_times; ++j) {
    ScalarField mean = grid;
    for (int64_t i = 0; i < mean.size(); ++i) {
      double acc = 0.0;
      for (int r = 0; r < M; ++r) acc += fields[size_t(r)][j][size_t(i)];
      mean.values[size_t(i)] = acc / M;
    }
    mean.meta.eps = lattice.eps();
    mean.meta.block_radius = k;
    mean.meta.time = config.snapshot_times[j];
    mean.meta.seed = config.master_seed;
    record.mean_fields.push_back(std::move(mean));

    std::vector<double> cur(size_t(config.dim), 0.0);
    for (int a = 0; a < config.dim; ++a) {
      for (int r = 0; r < M; ++r) cur[size_t(a)] += currents[size_t(r)][j][size_t(a)];
      cur[size_t(a)] /= M;
    }
    record.mean_currents.push_back(cur);
  }

  if (!config.out_dir.empty()) {
    ensure_dir(config.out_dir);
    for (size_t j = 0; j < n_times; ++j) {
      char name[128];
      std::snprintf(name, sizeof name, "%s/field_t%zu.csv",
                    config.out_dir.c_str(), j);
      write_field_csv(name, record.mean_fields[j]);
    }
    nlohmann::json j;
    j["times"] = record.times;
    j["mean_currents"] = record.mean_currents;
    j["events"] = {{"exchange", record.totals.exchange_events},
                   {"birth", record.totals.birth_events},
                   {"death", record.totals.death_events},
                   {"absorbed", record.totals.absorbed}};
    write_json(config.out_dir + "/observables.json", j);
    if (!final_occupancy.empty()) {
      Snapshot snap = make_snapshot(lattice, final_occupancy,
                                    record.replica_seeds[0], final_micro_time);
      write_snapshot(config.out_dir + "/final.snap", snap);
    }
    nlohmann::json manifest = config_manifest(config);
    manifest["task"] = "simulate";
    manifest["replica_seeds"]["all"] = record.replica_seeds;
    write_json(config.out_dir + "/manifest.json", manifest);
  }
  return record;
}

DiffusionEstimate run_estimate_d(const ExperimentConfig& config) {
  const int d = config.dim;
  const Lattice torus = Lattice::torus(config.estimator.inv_eps, d);
  const int side = torus.side();
  const double inv_eps = double(torus.inv_eps());
  constexpr double kPi = 3.14159265358979323846;

  std::vector<ProbeResult> results;
  const auto qs = standard_probe_set(d);
  for (size_t pi = 0; pi < qs.size(); ++pi) {
    const auto& q = qs[pi];
    std::vector<double> kappa(size_t(d));
    double k2 = 0.0;
    for (int a = 0; a < d; ++a) {
      kappa[size_t(a)] = 2.0 * kPi * q[size_t(a)] * inv_eps / side;
      k2 += kappa[size_t(a)] * kappa[size_t(a)];
    }
    ModeProbe probe;
    probe.wavevector = q;
    probe.amplitude = config.estimator.amplitude;
    probe.replicas = config.estimator.replicas;
    const double horizon = config.estimator.efolds / k2;
    const int points = std::max(4, config.estimator.points);
    for (int i = 0; i < points; ++i)
      probe.macro_times.push_back(horizon * i / (points - 1));

    RateEstimate est =
        relax_mode(torus, config.model, probe,
                   Rng::mix(config.master_seed, 7000 + uint64_t(pi)),
                   worker_count());
    results.push_back(ProbeResult{q, kappa, est});
  }

  for (const auto& r : results)
    if (!r.estimate.ok)
      throw std::runtime_error("estimate-d: probe fit failed (" +
                               r.estimate.note + ")");

  DiffusionEstimate estimate = assemble_diffusion(results, d);

  if (!config.out_dir.empty()) {
    ensure_dir(config.out_dir);
    nlohmann::json j;
    j["inv_eps"] = torus.inv_eps();
    j["replicas"] = config.estimator.replicas;
    j["amplitude"] = config.estimator.amplitude;
    for (const auto& r : results) {
      nlohmann::json p;
      p["q"] = r.wavevector;
      p["kappa"] = r.kappa;
      p["rate"] = r.estimate.rate;
      p["se"] = r.estimate.se;
      p["r2"] = r.estimate.r2;
      p["points_used"] = r.estimate.points_used;
      j["probes"].push_back(p);
    }
    std::vector<std::vector<double>> rows(size_t(d)), ses(size_t(d));
    for (int i = 0; i < d; ++i) {
      rows[size_t(i)].assign(estimate.d_hat.begin() + i * d,
                             estimate.d_hat.begin() + (i + 1) * d);
      ses[size_t(i)].assign(estimate.d_se.begin() + i * d,
                            estimate.d_se.begin() + (i + 1) * d);
    }
    j["d_hat"] = rows;
    j["d_se"] = ses;
    j["min_eigenvalue"] = estimate.min_eigenvalue;
    j["max_asymmetry"] = estimate.max_asymmetry;
    j["positive_definite"] = estimate.positive_definite;
    write_json(config.out_dir + "/d_estimate.json", j);
    nlohmann::json manifest = config_manifest(config);
    manifest["task"] = "estimate-d";
    manifest["estimator"] = {{"inv_eps", config.estimator.inv_eps},
                             {"replicas", config.estimator.replicas},
                             {"amplitude", config.estimator.amplitude},
                             {"points", config.estimator.points},
                             {"efolds", config.estimator.efolds}};
    write_json(config.out_dir + "/manifest.json", manifest);
  }

  if (!estimate.positive_definite)
    throw std::runtime_error(
        "estimate-d: assembled matrix is not positive definite");
  return estimate;
}

}  // namespace asep
